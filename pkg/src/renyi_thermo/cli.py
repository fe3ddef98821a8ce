"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input/parse error,
3 domain error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, example
from .entropy import renyi_entropy, renyi_relative, sandwiched_renyi
from .errors import ConfigError, DomainError, EigenConvergenceError, UnknownCheckError, ValidationError
from .harness import REGISTRY, TrialConfig, run_suite
from .io import dumps, load_matrix, report_document
from .thermo import thermo_report
from .uncertainty import ObservableSet, alpha_variance, build_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3
PROG = "renyi-thermo"


def alpha_arg(text: str) -> float:
    """Parse an alpha value; accepts ``inf``."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha must be a number or 'inf', got {text!r}") from None


def dims_arg(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma-separated integers, got {text!r}") from None


def _fmt_alpha(a: float):
    return "inf" if math.isinf(a) else a


def build_parser() -> argparse.ArgumentParser:
    def add_globals(parser, default):
        parser.add_argument("--tol", type=float, default=default(None),
                            help="tolerance: equilibrium test for thermo, violation tolerance for verify")
        parser.add_argument("--output", default=default("-"), help="write the JSON report here (default: stdout)")
        parser.add_argument("--quiet", action="store_true", default=default(False),
                            help="suppress the summary on stderr")

    p = argparse.ArgumentParser(prog=PROG, description="Renyi entropies, thermodynamics and uncertainty relations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    add_globals(p, lambda d: d)
    # global flags are also accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, lambda d: argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def command(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    s = command("thermo", "entropy, energies and free energy of (rho, H)")
    s.add_argument("--hamiltonian", "-H", required=True, help="Hermitian matrix file")
    s.add_argument("--state", help="density matrix file (default: Gibbs state of H)")
    s.add_argument("--alpha", type=alpha_arg, required=True)
    s.add_argument("--beta", type=float, required=True)

    s = command("uncertainty", "covariance, commutator and Gram matrices of observables")
    s.add_argument("--state", required=True, help="density matrix file")
    s.add_argument("observables", nargs="+", help="Hermitian matrix files")
    s.add_argument("--alpha", type=alpha_arg, help="also report alpha-variances")

    s = command("entropy", "Renyi entropies of a state")
    s.add_argument("--state", required=True)
    s.add_argument("--alpha", type=alpha_arg, action="append", required=True,
                   help="may be given several times")

    s = command("rel-entropy", "Renyi relative entropy D_alpha(rho || sigma)")
    s.add_argument("--state", required=True)
    s.add_argument("--sigma", required=True, help="positive definite matrix file")
    s.add_argument("--alpha", type=alpha_arg, required=True)
    s.add_argument("--sandwiched", action="store_true", help="also report the sandwiched divergence")

    s = command("verify", "run the randomized verification suite")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--dims", type=dims_arg, default=(2, 3, 4, 8))
    s.add_argument("--only", action="append", metavar="NAME", help="run only this check (repeatable)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timings", action="store_true", help="include elapsed times (output no longer reproducible)")
    s.add_argument("--list", action="store_true", help="list check names and exit")

    command("paper-example", "reproduce the built-in worked example table")
    return p


def _emit(args, doc: dict) -> None:
    text = dumps(doc) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def cmd_thermo(args) -> int:
    H = load_matrix(args.hamiltonian)
    files = {"hamiltonian": args.hamiltonian}
    rho = None
    if args.state:
        rho = load_matrix(args.state).operator()
        files["state"] = args.state
    kw = {} if args.tol is None else {"equilibrium_tol": args.tol}
    rep = thermo_report(H.operator(), args.alpha, args.beta, rho, **kw)
    params = {"alpha": _fmt_alpha(args.alpha), "beta": args.beta, "state": "file" if rho is not None else "gibbs"}
    _emit(args, report_document("thermo", files, params, rep.as_dict()))
    _say(args, f"F = {rep.F_alpha_beta!r}, E = {rep.E_alpha_beta!r}, S = {rep.S_alpha!r}")
    return EXIT_OK


def cmd_uncertainty(args) -> int:
    rho = load_matrix(args.state).operator()
    obs = [load_matrix(p).operator() for p in args.observables]
    rep = build_report(ObservableSet(rho, obs))
    results = {
        "means": rep.means,
        "cov": rep.cov,
        "delta": rep.delta,
        "tau": rep.tau,
        "schrodinger_gaps": rep.schrodinger_gaps,
    }
    if rep.det_gap is None:
        results["note"] = "m must be even for det_gap and hadamard_gap"
    else:
        results["det_gap"] = rep.det_gap
        results["hadamard_gap"] = rep.hadamard_gap
    results["tau_min_eig"] = rep.tau_min_eig
    results["strict"] = rep.strict
    if args.alpha is not None:
        results["alpha_variances"] = [alpha_variance(rho, X, args.alpha) for X in obs]
    files = {"state": args.state, **{f"observable{j}": p for j, p in enumerate(args.observables)}}
    params = {"alpha": _fmt_alpha(args.alpha) if args.alpha is not None else None}
    _emit(args, report_document("uncertainty", files, params, results))
    _say(args, f"m = {len(obs)}, det_gap = {rep.det_gap!r}")
    return EXIT_OK


def cmd_entropy(args) -> int:
    rho = load_matrix(args.state).operator()
    values = [{"alpha": _fmt_alpha(a), "S_alpha": renyi_entropy(rho, a)} for a in args.alpha]
    _emit(args, report_document("entropy", {"state": args.state},
                                {"alphas": [_fmt_alpha(a) for a in args.alpha]}, {"entropies": values}))
    return EXIT_OK


def cmd_rel_entropy(args) -> int:
    rho = load_matrix(args.state).operator()
    sigma = load_matrix(args.sigma).operator()
    results = {"D_alpha": renyi_relative(rho, sigma, args.alpha)}
    if args.sandwiched:
        results["sandwiched"] = sandwiched_renyi(rho, sigma, args.alpha)
    _emit(args, report_document("rel-entropy", {"state": args.state, "sigma": args.sigma},
                                {"alpha": _fmt_alpha(args.alpha)}, results))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        print("\n".join(REGISTRY))
        return EXIT_OK
    kw = {} if args.tol is None else {"tol": args.tol}
    config = TrialConfig(seed=args.seed, trials=args.trials, dims=args.dims, **kw)
    if args.workers < 1:
        raise ConfigError("workers must be >= 1")
    suite = run_suite(config, only=args.only, workers=args.workers)
    doc = {"command": "verify", "inputs": {"files": {}, "params": config.as_dict()},
           "results": suite.as_dict(timing=args.timings), "version": __version__}
    _emit(args, doc)
    for r in suite.reports:
        _say(args, f"{'PASS' if r.passed else 'FAIL'} {r.name} failures={r.failures} worst_gap={r.worst_gap:.3e}")
    _say(args, f"mutation guard detected: {suite.mutation_guard.get('detected')}")
    return EXIT_OK if suite.passed else EXIT_FAIL


def cmd_paper_example(args) -> int:
    rows = example.evaluate()
    ok = all(r["pass"] for r in rows)
    results = {
        "hamiltonian_spectrum": list(example.SPECTRUM),
        "beta": example.BETA,
        "rows": [{**r, "alpha": _fmt_alpha(r["alpha"])} for r in rows],
        "pass": ok,
    }
    _emit(args, report_document("paper-example", {}, {}, results))
    for r in rows:
        extra = f"  (printed {r['printed']}: {r['note']})" if "printed" in r else ""
        _say(args, f"{'ok  ' if r['pass'] else 'FAIL'} {r['quantity']:<11s} alpha={_fmt_alpha(r['alpha'])!s:<4} "
                   f"{r['computed']:.8f} ref {r['reference']} |diff| {r['abs_diff']:.2e} [{r['provenance']}]{extra}")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "thermo": cmd_thermo,
    "uncertainty": cmd_uncertainty,
    "entropy": cmd_entropy,
    "rel-entropy": cmd_rel_entropy,
    "verify": cmd_verify,
    "paper-example": cmd_paper_example,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, ConfigError, UnknownCheckError) as exc:
        msg = exc.args[0] if isinstance(exc, UnknownCheckError) and exc.args else str(exc)
        print(f"{PROG} {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, EigenConvergenceError) as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
