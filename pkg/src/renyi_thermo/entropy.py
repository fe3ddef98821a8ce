"""Renyi entropies and Renyi relative entropies of finite-dimensional states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphaInfiniteError, DimensionMismatchError, DomainError, ValidationError
from .linalg import (
    SpectralFunction,
    as_hermitian,
    logsumexp,
    matrix_fn,
    overlap_weights,
    trace_product,
)
from .states import DensityMatrix, as_density, as_positive

NEAR_ONE_TOL = 1e-6
RANK_TOL = 1e-10


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if math.isnan(alpha) or alpha < 0.0:
        raise DomainError(f"alpha must be in [0, inf], got {alpha}")
    return alpha


def is_near_one(alpha: float, near_one_tol: float = NEAR_ONE_TOL) -> bool:
    return abs(alpha - 1.0) <= near_one_tol


def log_power_spectrum(p: np.ndarray, alpha: float, rank_tol: float = RANK_TOL) -> np.ndarray:
    """``log(p_i^alpha)`` with ``0^alpha = 0`` (``-inf``), including ``0^0 = 0``.

    At ``alpha = 0`` eigenvalues up to ``rank_tol`` count as zero, so the
    result describes the support projector.
    """
    out = np.full(p.shape, -np.inf)
    if alpha == 0.0:
        out[p > rank_tol] = 0.0
    else:
        pos = p > 0.0
        out[pos] = alpha * np.log(p[pos])
    return out


def renyi_entropy(rho, alpha: float, *, near_one_tol: float = NEAR_ONE_TOL,
                  rank_tol: float = RANK_TOL) -> float:
    """Renyi entropy ``log(Tr rho^alpha) / (1 - alpha)``.

    ``alpha = 0`` gives ``log rank``, ``alpha`` near 1 the von Neumann entropy
    and ``alpha = inf`` the min-entropy ``-log max p``.
    """
    alpha = check_alpha(alpha)
    p = as_density(rho).spectrum
    if alpha == 0.0:
        return math.log(int(np.count_nonzero(p > rank_tol)))
    if math.isinf(alpha):
        return -math.log(float(p[-1]))
    pos = p[p > 0.0]
    if is_near_one(alpha, near_one_tol):
        return float(-np.sum(pos * np.log(pos)))
    return float(logsumexp(alpha * np.log(pos))) / (1.0 - alpha)


def renyi_relative(rho, sigma, alpha: float, *, near_one_tol: float = NEAR_ONE_TOL,
                   rank_tol: float = RANK_TOL) -> float:
    """Renyi relative entropy ``log Tr(rho^alpha sigma^(1-alpha)) / (alpha - 1)``.

    ``sigma`` must be positive definite but need not have unit trace.  Near
    ``alpha = 1`` the Umegaki form ``Tr rho (log rho - log sigma)`` is used,
    with ``log rho`` restricted to the support of ``rho``.
    """
    alpha = check_alpha(alpha)
    if math.isinf(alpha):
        raise AlphaInfiniteError("relative entropy at alpha = inf is not supported")
    rho = as_density(rho)
    sigma = as_positive(sigma)
    a = rho.spectral_decomposition
    b = sigma.eig
    W = overlap_weights(a, b)
    p = a.eigenvalues
    log_s = np.log(b.eigenvalues)
    if is_near_one(alpha, near_one_tol):
        pos = p > 0.0
        ent = float(np.sum(p[pos] * np.log(p[pos])))
        cross = float(log_s @ W @ p)
        return ent - cross
    log_t = logsumexp(
        (1.0 - alpha) * log_s[:, None] + log_power_spectrum(p, alpha, rank_tol)[None, :], b=W
    )
    return float(log_t) / (alpha - 1.0)


def sandwiched_renyi(rho, sigma, alpha: float, *, near_one_tol: float = NEAR_ONE_TOL) -> float:
    """Sandwiched Renyi divergence
    ``log Tr (sigma^g rho sigma^g)^alpha / (alpha - 1)`` with ``g = (1-alpha)/(2 alpha)``.

    Agrees with :func:`renyi_relative` when ``rho`` and ``sigma`` commute.
    """
    alpha = check_alpha(alpha)
    if alpha == 0.0 or math.isinf(alpha):
        raise DomainError("sandwiched divergence needs alpha in (0, 1) or (1, inf)")
    rho = as_density(rho)
    sigma = as_positive(sigma)
    if rho.n != sigma.n:
        raise DimensionMismatchError(f"state is {rho.n}x{rho.n} but sigma is {sigma.n}x{sigma.n}")
    if is_near_one(alpha, near_one_tol):
        return renyi_relative(rho, sigma, 1.0)
    S = matrix_fn(sigma, SpectralFunction.power((1.0 - alpha) / (2.0 * alpha))).data
    M = as_hermitian(S @ rho.data @ S)
    mu = np.clip(M.eig.eigenvalues, 0.0, None)
    mu = mu[mu > 0.0]
    return float(logsumexp(alpha * np.log(mu))) / (alpha - 1.0)


@dataclass(frozen=True)
class LiebProbe:
    """Parameters of the trace functional ``(A, B) -> Tr K* A^q K B^r``."""

    K: np.ndarray
    q: float
    r: float

    def __post_init__(self):
        if not (0.0 <= self.q <= 1.0 and 0.0 <= self.r <= 1.0 and self.q + self.r <= 1.0 + 1e-15):
            raise ValidationError(f"need 0 <= q, r <= 1 and q + r <= 1, got q={self.q}, r={self.r}")


def lieb_trace(probe: LiebProbe, A, B) -> float:
    A, B = as_positive(A), as_positive(B)
    K = np.asarray(probe.K, dtype=np.complex128)
    Aq = matrix_fn(A, SpectralFunction.power(probe.q))
    Br = matrix_fn(B, SpectralFunction.power(probe.r))
    return trace_product([K.conj().T, Aq, K, Br]).real


def is_pure(rho: DensityMatrix, tol: float = 1e-9) -> bool:
    """Pure iff the Renyi-2 entropy vanishes."""
    return renyi_entropy(rho, 2.0) <= tol
