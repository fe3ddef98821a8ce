"""Deterministic randomized property checking.

Each registered check is a function of a :class:`TrialContext`; it returns
one or more *margins*, normalized so that a margin ``>= -tol`` means the
property holds.  Trial ``i`` of check ``name`` draws all of its randomness
from the substream ``(seed, crc32(name), i)``, so reports do not depend on
execution order or on the number of worker threads.
"""
from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional

import numpy as np

from ..errors import ConfigError, UnknownCheckError
from ..linalg import HermitianMatrix
from ..states import (
    PositiveMatrix,
    as_positive,
    ginibre,
    ginibre_density,
    gue_hermitian,
    haar_unitary,
    rng_for,
)

DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, math.inf)
DEFAULT_BETAS = (-2.0, -1.0, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class TrialConfig:
    seed: int = 42
    trials: int = 1000
    dims: tuple = (2, 3, 4, 8)
    alphas: tuple = DEFAULT_ALPHAS
    betas: tuple = DEFAULT_BETAS
    tol: float = 1e-9

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.dims or any(int(d) < 1 for d in self.dims):
            raise ConfigError(f"dims must be a nonempty list of positive integers, got {self.dims}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if any(a < 0 or math.isnan(a) for a in self.alphas):
            raise ConfigError("alphas must lie in [0, inf]")
        if not self.betas or any(not math.isfinite(b) or b == 0 for b in self.betas):
            raise ConfigError("betas must be finite and nonzero")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "alphas", tuple(sorted(float(a) for a in self.alphas)))
        object.__setattr__(self, "betas", tuple(sorted(float(b) for b in self.betas)))

    def alphas_where(self, pred: Callable[[float], bool]) -> tuple:
        return tuple(a for a in self.alphas if pred(a))

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "dims": list(self.dims),
            "alphas": [_num(a) for a in self.alphas],
            "betas": list(self.betas),
            "tol": self.tol,
        }


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


class TrialContext:
    """Randomness, input recording and margin helpers for one trial."""

    def __init__(self, check: str, index: int, config: TrialConfig):
        self.index = index
        self.config = config
        self.tol = config.tol
        self.n = config.dims[index % len(config.dims)]
        self.rng = rng_for(config.seed, zlib.crc32(check.encode()), index)
        self.inputs: dict = {}
        self.observations: dict = {}

    # -- sampling -----------------------------------------------------------
    def record(self, **inputs):
        self.inputs.update(inputs)

    def state(self, n: Optional[int] = None, rank: Optional[int] = None):
        return ginibre_density(n or self.n, self.rng, rank)

    def hermitian(self, n: Optional[int] = None, scale: float = 1.0) -> HermitianMatrix:
        return gue_hermitian(n or self.n, self.rng, scale)

    def positive(self, n: Optional[int] = None) -> PositiveMatrix:
        """Positive definite operator with a random trace in ``[e^-1, e]``."""
        rho = ginibre_density(n or self.n, self.rng)
        return as_positive(rho.data * math.exp(self.rng.uniform(-1.0, 1.0)))

    def unitary(self, n: Optional[int] = None) -> np.ndarray:
        return haar_unitary(n or self.n, self.rng)

    def complex_matrix(self, n: Optional[int] = None, m: Optional[int] = None) -> np.ndarray:
        n = n or self.n
        return ginibre(n, m or n, self.rng)

    def pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def cycle(self, seq):
        """Deterministic round-robin choice by trial index."""
        return seq[(self.index // len(self.config.dims)) % len(seq)]

    # -- margins ------------------------------------------------------------
    def atleast(self, value: float, bound: float = 0.0, tol: Optional[float] = None) -> float:
        """Margin for ``value >= bound`` with slack ``tol`` (default: run tolerance)."""
        m = value - bound
        return m if tol is None else m * (self.tol / tol)

    def close(self, diff: float, tol: Optional[float] = None) -> float:
        """Margin for ``|diff| <= tol`` (default: run tolerance)."""
        m = -abs(diff)
        return m if tol is None else m * (self.tol / tol)

    def require(self, ok: bool) -> float:
        return 0.0 if ok else -math.inf

    def observe(self, key: str, value: float):
        lo, hi, k = self.observations.get(key, (math.inf, -math.inf, 0))
        self.observations[key] = (min(lo, value), max(hi, value), k + 1)


TrialFn = Callable[[TrialContext], object]


@dataclass(frozen=True)
class Check:
    name: str
    fn: TrialFn
    claim: str
    asserts: bool = True


REGISTRY: dict = {}


def register(name: str, claim: str, asserts: bool = True):
    def deco(fn: TrialFn) -> TrialFn:
        REGISTRY[name] = Check(name, fn, claim, asserts)
        return fn

    return deco


@dataclass
class PropertyReport:
    name: str
    claim: str
    trials_run: int
    failures: int
    worst_gap: float
    witness: Optional[dict] = None
    observations: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "name": self.name,
            "claim": self.claim,
            "trials_run": self.trials_run,
            "failures": self.failures,
            "worst_gap": _num(self.worst_gap),
            "witness": self.witness,
        }
        if self.observations:
            d["observations"] = {
                k: {"min": _num(lo), "max": _num(hi), "count": c}
                for k, (lo, hi, c) in sorted(self.observations.items())
            }
        if timing:
            d["elapsed_s"] = self.elapsed
        return d


def _flatten_margins(out) -> list:
    if out is None:
        return []
    if isinstance(out, (int, float, np.floating)):
        return [float(out)]
    return [float(x) for x in out]


def _serialize(value):
    from ..io import encode_value

    return encode_value(value)


def run_check(name: str, config: Optional[TrialConfig] = None, *, _fn: Optional[TrialFn] = None) -> PropertyReport:
    """Run ``config.trials`` trials of a registered check."""
    from . import checks  # noqa: F401  (populates REGISTRY)

    config = config or TrialConfig()
    if name not in REGISTRY:
        raise UnknownCheckError(f"unknown check {name!r}")
    check = REGISTRY[name]
    fn = _fn or check.fn
    start = time.perf_counter()
    failures = 0
    worst = math.inf
    worst_ctx = None
    worst_error = None
    obs: dict = {}
    for i in range(config.trials):
        ctx = TrialContext(name, i, config)
        error = None
        try:
            margins = _flatten_margins(fn(ctx))
        except Exception as exc:  # a crashing trial is a failing trial
            margins = [-math.inf]
            error = f"{type(exc).__name__}: {exc}"
        if not check.asserts:
            margins = [0.0]
        m = min(margins) if margins else math.inf
        if math.isnan(m):
            m = -math.inf
        if m < -config.tol:
            failures += 1
        if m < worst:
            worst, worst_ctx, worst_error = m, ctx, error
        for k, (lo, hi, c) in ctx.observations.items():
            plo, phi, pc = obs.get(k, (math.inf, -math.inf, 0))
            obs[k] = (min(plo, lo), max(phi, hi), pc + c)
    witness = None
    if failures and worst_ctx is not None:
        witness = {
            "trial": worst_ctx.index,
            "n": worst_ctx.n,
            "inputs": {k: _serialize(v) for k, v in sorted(worst_ctx.inputs.items())},
        }
        if worst_error:
            witness["error"] = worst_error
    return PropertyReport(
        name=name,
        claim=check.claim,
        trials_run=config.trials,
        failures=failures,
        worst_gap=worst,
        witness=witness,
        observations=obs,
        elapsed=time.perf_counter() - start,
    )


@dataclass
class SuiteResult:
    reports: list
    passed: bool
    mutation_guard: dict
    elapsed: float

    def as_dict(self, timing: bool = False) -> dict:
        summary = {
            "pass": self.passed,
            "checks": len(self.reports),
            "failed_checks": [r.name for r in self.reports if not r.passed],
            "mutation_guard": self.mutation_guard,
        }
        if timing:
            summary["elapsed_s"] = self.elapsed
        return {
            "summary": summary,
            "reports": [r.as_dict(timing) for r in self.reports],
        }


def _safe_run(name: str, config: TrialConfig) -> PropertyReport:
    try:
        return run_check(name, config)
    except Exception as exc:
        return PropertyReport(name, REGISTRY[name].claim, 0, config.trials, -math.inf,
                              {"error": f"{type(exc).__name__}: {exc}"})


def mutation_guard(config: TrialConfig) -> dict:
    """Run ``pb_inequality`` with its bound tightened by 0.01; it must fail."""
    from .checks import pb_inequality_trial

    shift = 0.01
    rep = run_check("pb_inequality", config, _fn=lambda ctx: pb_inequality_trial(ctx, tighten=shift))
    return {"check": "pb_inequality", "tighten": shift, "failures": rep.failures,
            "detected": rep.failures > 0}


def run_suite(config: Optional[TrialConfig] = None, *, only: Optional[Iterable[str]] = None,
              workers: int = 1, guard: bool = True) -> SuiteResult:
    """Run every registered check (or the ``only`` subset)."""
    from . import checks  # noqa: F401

    config = config or TrialConfig()
    names = list(REGISTRY) if only is None else list(only)
    for name in names:
        if name not in REGISTRY:
            raise UnknownCheckError(f"unknown check {name!r}")
    start = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda nm: _safe_run(nm, config), names))
    else:
        reports = [_safe_run(nm, config) for nm in names]
    mg = mutation_guard(config) if guard else {"skipped": True}
    passed = all(r.passed for r in reports) and mg.get("detected", True)
    return SuiteResult(reports, passed, mg, time.perf_counter() - start)


def with_overrides(config: TrialConfig, **kw) -> TrialConfig:
    return replace(config, **kw)
