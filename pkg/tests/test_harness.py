import json
import math

import pytest

from renyi_thermo.errors import ConfigError, UnknownCheckError
from renyi_thermo.harness import REGISTRY, TrialConfig, run_check, run_suite
from renyi_thermo.harness.checks import pb_inequality_trial
from renyi_thermo.harness.runner import mutation_guard
from renyi_thermo.io import dumps

EXPECTED = {
    "entropy_bounds", "entropy_monotone_alpha", "S_concave", "lieb_concavity", "D_joint_convex",
    "D_lower_bound", "unitary_invariance", "pb_inequality", "pb_corollary", "free_energy_is_divergence",
    "alpha_derivative_identity", "energy_monotone_beta", "energy_beta_limits", "logZ_concavity",
    "gibbs_local_min", "schrodinger", "det_inequality", "lemma_split", "hadamard_chain",
    "alpha_shift_rules", "alpha_variance_limit", "sandwiched_reduction", "alt_energy_comparison",
}


class TestConfig:
    def test_defaults(self):
        c = TrialConfig()
        assert (c.seed, c.trials, c.dims, c.tol) == (42, 1000, (2, 3, 4, 8), 1e-9)
        assert c.alphas == (0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, math.inf)
        assert c.betas == (-2.0, -1.0, 0.5, 1.0, 2.0, 5.0)

    @pytest.mark.parametrize("kw", [
        {"trials": 0}, {"dims": ()}, {"dims": (2, 0)}, {"tol": 0.0}, {"tol": -1e-9},
        {"alphas": (-1.0,)}, {"alphas": (math.nan,)}, {"betas": ()}, {"betas": (0.0,)},
        {"betas": (math.inf,)}, {"seed": -1}, {"seed": 2**64},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            TrialConfig(**kw)

    def test_json_ready(self):
        json.dumps(TrialConfig().as_dict(), allow_nan=False)


class TestRunCheck:
    def test_registry_complete(self):
        assert set(REGISTRY) == EXPECTED

    def test_unknown(self):
        with pytest.raises(UnknownCheckError):
            run_check("no_such", TrialConfig(trials=1))

    def test_single_trial(self):
        rep = run_check("entropy_bounds", TrialConfig(trials=1))
        assert rep.trials_run == 1
        assert rep.passed and rep.witness is None

    def test_failures_iff_gap(self):
        cfg = TrialConfig(trials=40)
        for name in ("schrodinger", "pb_inequality", "D_lower_bound"):
            rep = run_check(name, cfg)
            assert (rep.failures == 0) == (rep.worst_gap >= -cfg.tol)

    def test_deterministic(self):
        cfg = TrialConfig(seed=7, trials=25)
        a = run_check("D_joint_convex", cfg).as_dict()
        b = run_check("D_joint_convex", cfg).as_dict()
        assert a == b
        c = run_check("D_joint_convex", TrialConfig(seed=8, trials=25)).as_dict()
        assert c["worst_gap"] != a["worst_gap"]

    def test_mutated_check_reports_witness(self):
        cfg = TrialConfig(trials=20)
        rep = run_check("pb_inequality", cfg, _fn=lambda ctx: pb_inequality_trial(ctx, tighten=0.01))
        assert rep.failures > 0
        assert rep.worst_gap < -cfg.tol
        w = rep.witness
        assert set(w) >= {"trial", "n", "inputs"}
        assert {"rho", "H", "beta"} <= set(w["inputs"])
        json.dumps(rep.as_dict(), allow_nan=False)

    def test_crash_is_failure(self):
        def boom(ctx):
            ctx.record(x=1.0)
            raise ArithmeticError("bad trial")

        rep = run_check("entropy_bounds", TrialConfig(trials=3), _fn=boom)
        assert rep.failures == 3
        assert rep.worst_gap == -math.inf
        assert "bad trial" in rep.witness["error"]

    def test_observing_check_never_fails(self):
        rep = run_check("alt_energy_comparison", TrialConfig(trials=30))
        assert rep.failures == 0
        assert "alpha=2" in rep.observations
        lo, hi, count = rep.observations["alpha=2"]
        assert 0 <= lo <= hi and count > 0

    def test_timing_optional(self):
        rep = run_check("entropy_bounds", TrialConfig(trials=2))
        assert "elapsed_s" not in rep.as_dict()
        assert rep.as_dict(timing=True)["elapsed_s"] >= 0


class TestSuite:
    def test_every_name_once(self):
        suite = run_suite(TrialConfig(trials=3))
        names = [r.name for r in suite.reports]
        assert sorted(names) == sorted(EXPECTED)
        assert len(names) == len(set(names))
        assert suite.passed

    def test_thread_count_independent(self):
        cfg = TrialConfig(trials=8)
        a = dumps(run_suite(cfg, workers=1).as_dict())
        b = dumps(run_suite(cfg, workers=3).as_dict())
        assert a == b

    def test_only(self):
        suite = run_suite(TrialConfig(trials=2), only=["schrodinger", "lemma_split"], guard=False)
        assert [r.name for r in suite.reports] == ["schrodinger", "lemma_split"]
        with pytest.raises(UnknownCheckError):
            run_suite(TrialConfig(trials=2), only=["nope"])

    def test_mutation_guard(self):
        g = mutation_guard(TrialConfig(trials=50))
        assert g["detected"] and g["failures"] > 0
