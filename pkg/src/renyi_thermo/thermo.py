"""Partition functions, Renyi internal and free energies, equilibrium energies.

All traces of the form ``Tr rho^alpha exp(c H)`` are evaluated in log space
from the two spectra and the overlap of the eigenbases, so no exponential is
ever formed at full scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .entropy import (
    NEAR_ONE_TOL,
    RANK_TOL,
    check_alpha,
    is_near_one,
    log_power_spectrum,
    renyi_entropy,
)
from .errors import AlphaInfiniteError, AlphaOneError, BetaZeroError, DomainError
from .linalg import (
    EigenDecomposition,
    HermitianMatrix,
    _raw,
    as_hermitian,
    eig_hermitian,
    logsumexp,
    overlap_weights,
)
from .states import DensityMatrix, as_density, check_beta_range, gibbs_state, gibbs_weights


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if beta == 0.0:
        raise BetaZeroError()
    if not math.isfinite(beta):
        raise DomainError("beta must be finite")
    return beta


def log_partition(H, beta: float) -> float:
    """``log Tr exp(-beta H)`` by log-sum-exp over the spectrum."""
    H = as_hermitian(H)
    beta = check_beta_range(H, beta)
    return float(logsumexp(-beta * H.eig.eigenvalues))


def _log_tr_power_exp(rho: DensityMatrix, alpha: float, H: HermitianMatrix, c: float,
                      rank_tol: float = RANK_TOL) -> float:
    """``log Tr rho^alpha exp(c H)``."""
    a = rho.spectral_decomposition
    b = H.eig
    W = overlap_weights(a, b)
    x = c * b.eigenvalues[:, None] + log_power_spectrum(a.eigenvalues, alpha, rank_tol)[None, :]
    return float(logsumexp(x, b=W))


def _mean(rho: DensityMatrix, A: HermitianMatrix) -> float:
    a = rho.spectral_decomposition
    b = A.eig
    return float(b.eigenvalues @ overlap_weights(a, b) @ a.eigenvalues)


def _joint_spectrum(rho: DensityMatrix, A: HermitianMatrix, tol: float = 1e-10):
    """Common eigenbasis diagonals ``(p, a)`` of a commuting pair, or None."""
    scale = 1.0 + float(np.max(np.abs(A.data)))
    U = rho.eig.eigenvectors
    M = U.conj().T @ A.data @ U
    off = M - np.diag(np.diag(M))
    if np.max(np.abs(off)) <= tol * scale:
        return rho.spectrum, np.diag(M).real
    comm = rho.data @ A.data - A.data @ rho.data
    if np.max(np.abs(comm)) > tol * scale:
        return None
    # generic combination of commuting matrices separates both spectra
    V = eig_hermitian(as_hermitian(rho.data + A.data / (math.pi * scale))).eigenvectors
    P = V.conj().T @ rho.data @ V
    M = V.conj().T @ A.data @ V
    for X, s in ((P, 1.0), (M, scale)):
        if np.max(np.abs(X - np.diag(np.diag(X)))) > tol * s:
            return None
    return np.clip(np.diag(P).real, 0.0, None), np.diag(M).real


def alpha_expectation_inf(rho, A) -> float:
    """``lim_{alpha -> inf} <A>_alpha`` for a state commuting with ``A``.

    In a common eigenbasis the limit is ``max_j (log p_j + a_j) - max_j log p_j``.
    """
    rho, A = as_density(rho), as_hermitian(A)
    joint = _joint_spectrum(rho, A)
    if joint is None:
        raise AlphaInfiniteError(
            "alpha = inf expectation is only defined here for states commuting with the observable"
        )
    p, a = joint
    pos = p > 0.0
    logp = np.log(p[pos])
    return float(np.max(logp + a[pos]) - np.max(logp))


def alpha_expectation(rho, A, alpha: float, *, near_one_tol: float = NEAR_ONE_TOL) -> float:
    """``<A>_alpha = log(Tr rho^alpha e^((alpha-1) A) / Tr rho^alpha) / (alpha - 1)``."""
    alpha = check_alpha(alpha)
    if math.isinf(alpha):
        raise AlphaInfiniteError("alpha = inf: use equilibrium_energy or alpha_expectation_inf")
    rho, A = as_density(rho), as_hermitian(A)
    if is_near_one(alpha, near_one_tol):
        return _mean(rho, A)
    p = rho.spectrum
    num = _log_tr_power_exp(rho, alpha, A, alpha - 1.0)
    den = float(logsumexp(log_power_spectrum(p, alpha)))
    return (num - den) / (alpha - 1.0)


def _scaled(H: HermitianMatrix, beta: float) -> HermitianMatrix:
    eig = H.eig
    w = beta * eig.eigenvalues
    U = eig.eigenvectors
    if beta < 0:
        w, U = w[::-1], U[:, ::-1]
    eig = EigenDecomposition(np.ascontiguousarray(w), np.ascontiguousarray(U))
    return HermitianMatrix._trusted(beta * H.data, eig)


def internal_energy(rho, H, alpha: float, beta: float, *, near_one_tol: float = NEAR_ONE_TOL) -> float:
    """Renyi internal energy ``E_{alpha,beta}(rho, H) = <beta H>_alpha / beta``."""
    beta = _check_beta(beta)
    alpha = check_alpha(alpha)
    rho, H = as_density(rho), as_hermitian(H)
    check_beta_range(H, beta)
    bH = _scaled(H, beta)
    if math.isinf(alpha):
        return alpha_expectation_inf(rho, bH) / beta
    return alpha_expectation(rho, bH, alpha, near_one_tol=near_one_tol) / beta


def free_energy(rho, H, alpha: float, beta: float, *, near_one_tol: float = NEAR_ONE_TOL) -> float:
    """Renyi free energy ``F = E_{alpha,beta} - S_alpha / beta
    = log Tr rho^alpha e^((alpha-1) beta H) / (beta (alpha - 1))``."""
    beta = _check_beta(beta)
    alpha = check_alpha(alpha)
    rho, H = as_density(rho), as_hermitian(H)
    check_beta_range(H, beta)
    if is_near_one(alpha, near_one_tol) or math.isinf(alpha):
        E = internal_energy(rho, H, alpha, beta, near_one_tol=near_one_tol)
        return E - renyi_entropy(rho, alpha, near_one_tol=near_one_tol) / beta
    c = (alpha - 1.0) * beta
    return _log_tr_power_exp(rho, alpha, H, c) / c


def equilibrium_energy(H, alpha: float, beta: float, *, near_one_tol: float = NEAR_ONE_TOL) -> float:
    """Internal energy of the Gibbs state, ``(log Z_beta - log Z_{alpha beta}) / (beta (alpha - 1))``.

    Both partition functions are taken relative to the same spectral edge so
    the leading terms cancel exactly; this keeps the large-``|beta|`` limits
    accurate.
    """
    beta = _check_beta(beta)
    alpha = check_alpha(alpha)
    w = as_hermitian(H).eig.eigenvalues
    if math.isinf(alpha):
        return float(w[0] if beta > 0 else w[-1])
    if is_near_one(alpha, near_one_tol):
        return float(gibbs_weights(H, beta) @ w)
    ref = w[0] if beta > 0 else w[-1]
    d = w - ref
    L_beta = logsumexp(-beta * d)
    L_alpha_beta = logsumexp(-alpha * beta * d)
    return float(ref + (L_beta - L_alpha_beta) / (beta * (alpha - 1.0)))


def alpha_derivative(psi: Callable[[float], float], alpha: float, beta: float) -> float:
    """Secant quotient ``(psi(alpha beta) - psi(beta)) / (beta (alpha - 1))``."""
    if alpha == 1.0:
        raise AlphaOneError("the alpha-derivative is undefined at alpha = 1")
    beta = _check_beta(beta)
    return (psi(alpha * beta) - psi(beta)) / (beta * (alpha - 1.0))


def logZ_curvature(H, beta: float) -> float:
    """``d^2 log Z / d beta^2``, the variance of H in its Gibbs state."""
    H = as_hermitian(H)
    check_beta_range(H, beta)
    w = H.eig.eigenvalues
    p = gibbs_weights(H, beta)
    mean = p @ w
    return float(p @ (w - mean) ** 2)


def trace_distance(rho, sigma) -> float:
    d = as_hermitian(_raw(rho) - _raw(sigma))
    return 0.5 * float(np.sum(np.abs(d.eig.eigenvalues)))


def _gibbs_unguarded(H: HermitianMatrix, beta: float) -> np.ndarray:
    p = gibbs_weights(H, beta)
    return H.eig.reconstruct(p)


@dataclass(frozen=True)
class ThermoReport:
    alpha: float
    beta: float
    S_alpha: float
    E_alpha_beta: float
    F_alpha_beta: float
    log_Z_beta: float
    is_equilibrium: bool
    pb_gap: float

    def as_dict(self) -> dict:
        return {
            "S_alpha": self.S_alpha,
            "E_alpha_beta": self.E_alpha_beta,
            "F_alpha_beta": self.F_alpha_beta,
            "log_Z_beta": self.log_Z_beta,
            "pb_gap": self.pb_gap,
            "is_equilibrium": self.is_equilibrium,
        }


def thermo_report(H, alpha: float, beta: float, rho=None, *, equilibrium_tol: float = 1e-8) -> ThermoReport:
    """All thermodynamic quantities of ``(rho, H)``; ``rho`` defaults to the Gibbs state."""
    beta = _check_beta(beta)
    alpha = check_alpha(alpha)
    H = as_hermitian(H)
    rho = gibbs_state(H, beta) if rho is None else as_density(rho)
    S = renyi_entropy(rho, alpha)
    F = free_energy(rho, H, alpha, beta)
    E = internal_energy(rho, H, alpha, beta)
    logZ = log_partition(H, beta)
    eq = trace_distance(rho, _gibbs_unguarded(H, beta)) <= equilibrium_tol
    return ThermoReport(alpha, beta, S, E, F, logZ, eq, beta * F + logZ)
