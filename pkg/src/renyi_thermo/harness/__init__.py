"""Randomized verification of the package's inequalities and identities."""
from . import checks  # noqa: F401  (registers every check)
from .runner import REGISTRY, PropertyReport, SuiteResult, TrialConfig, run_check, run_suite

__all__ = ["REGISTRY", "PropertyReport", "SuiteResult", "TrialConfig", "run_check", "run_suite"]
