"""Variances, covariance/commutator matrices and uncertainty inequalities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .entropy import NEAR_ONE_TOL, check_alpha
from .errors import DimensionMismatchError, NotPositiveError, OddDimensionError, ValidationError
from .linalg import (
    HermitianMatrix,
    SpectralFunction,
    as_hermitian,
    determinant,
    gram,
    matrix_fn,
)
from .states import DensityMatrix, as_density
from .thermo import alpha_expectation, alpha_expectation_inf

STRICT_TAU_EIG = 1e-6


def _pair(rho, A) -> tuple[DensityMatrix, HermitianMatrix]:
    rho, A = as_density(rho), as_hermitian(A)
    if rho.n != A.n:
        raise DimensionMismatchError(f"state is {rho.n}x{rho.n} but observable is {A.n}x{A.n}")
    return rho, A


def _expect(rho: np.ndarray, X: np.ndarray) -> complex:
    # Tr(rho X)
    return complex(np.sum(rho * X.T))


def moments(rho, A) -> tuple[float, float]:
    """Mean ``Tr rho A`` and variance ``Tr rho (A - <A>)^2``."""
    rho, A = _pair(rho, A)
    mean = _expect(rho.data, A.data).real
    D = A.data - mean * np.eye(A.n)
    return mean, _expect(rho.data, D @ D).real


def covariance(rho, A, B) -> float:
    """``Tr rho {A, B} / 2 - <A><B>``; exactly symmetric in ``A`` and ``B``."""
    rho, A = _pair(rho, A)
    _, B = _pair(rho, B)
    sym = A.data @ B.data + B.data @ A.data
    ma = _expect(rho.data, A.data).real
    mb = _expect(rho.data, B.data).real
    return 0.5 * _expect(rho.data, sym).real - ma * mb


def commutator_mean(rho, A, B) -> float:
    """``<i[A, B]>``, real because ``i[A, B]`` is Hermitian."""
    rho, A = _pair(rho, A)
    _, B = _pair(rho, B)
    C = 1j * (A.data @ B.data - B.data @ A.data)
    return _expect(rho.data, C).real


def deviations(rho, observables: Sequence) -> list[np.ndarray]:
    """Weighted deviations ``rho^(1/2) (X - <X>) / sqrt(Tr rho)``."""
    rho = as_density(rho)
    root = matrix_fn(rho, SpectralFunction.power(0.5)).data
    tr = float(np.trace(rho.data).real)
    out = []
    for X in observables:
        _, X = _pair(rho, X)
        m = _expect(rho.data, X.data).real / tr
        out.append(root @ (X.data - m * np.eye(X.n)) / math.sqrt(tr))
    return out


def schrodinger_gap(rho, A, B) -> float:
    """``var(A) var(B) - Cov(A,B)^2 - (<i[A,B]>/2)^2``, never negative in exact arithmetic."""
    _, va = moments(rho, A)
    _, vb = moments(rho, B)
    cov = covariance(rho, A, B)
    c = 0.5 * commutator_mean(rho, A, B)
    return va * vb - cov * cov - c * c


def robertson_gap(rho, A, B) -> float:
    """``var(A) var(B) - |<[A,B]>|^2 / 4``; never smaller than the Schrodinger gap."""
    _, va = moments(rho, A)
    _, vb = moments(rho, B)
    c = 0.5 * commutator_mean(rho, A, B)
    return va * vb - c * c


def schrodinger_saturated(rho, A, B) -> bool:
    _, va = moments(rho, A)
    _, vb = moments(rho, B)
    return schrodinger_gap(rho, A, B) <= 1e-10 * (va * vb + 1.0)


def deviations_proportional(rho, A, B, tol: float = 1e-8) -> bool:
    """Whether the weighted deviations of ``A`` and ``B`` are linearly dependent.

    This is the exact equality condition of the Schrodinger inequality; it
    holds in particular for ``B = c A + d I``.
    """
    Da, Db = deviations(rho, [A, B])
    tau = gram([Da, Db]).real
    na, nb = tau[0, 0], tau[1, 1]
    if na <= tol**2 or nb <= tol**2:
        return True
    g = gram([Da, Db])
    return abs(na * nb - abs(g[0, 1]) ** 2) <= tol * na * nb


@dataclass(frozen=True)
class ObservableSet:
    rho: DensityMatrix
    observables: tuple

    def __init__(self, rho, observables: Sequence):
        rho = as_density(rho)
        obs = tuple(as_hermitian(X) for X in observables)
        if not obs:
            raise ValidationError("need at least one observable")
        for X in obs:
            if X.n != rho.n:
                raise DimensionMismatchError(
                    f"state is {rho.n}x{rho.n} but an observable is {X.n}x{X.n}"
                )
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "observables", obs)

    @property
    def m(self) -> int:
        return len(self.observables)


@dataclass(frozen=True)
class UncertaintyReport:
    means: np.ndarray
    cov: np.ndarray
    delta: np.ndarray
    tau: np.ndarray
    schrodinger_gaps: np.ndarray
    det_gap: Optional[float]
    hadamard_gap: Optional[float]
    tau_min_eig: float
    cov_residual: float

    @property
    def strict(self) -> bool:
        return self.tau_min_eig > STRICT_TAU_EIG


def build_report(obs: ObservableSet) -> UncertaintyReport:
    rho = obs.rho
    X = obs.observables
    m = obs.m
    tau = gram(deviations(rho, X))
    cov = 0.5 * (tau + tau.T)
    delta = 0.5 * (tau - tau.T)
    means = np.array([_expect(rho.data, x.data).real for x in X])
    direct = np.array([[covariance(rho, X[j], X[k]) for k in range(m)] for j in range(m)])
    gaps = np.zeros((m, m))
    for j in range(m):
        for k in range(j + 1, m):
            gaps[j, k] = gaps[k, j] = schrodinger_gap(rho, X[j], X[k])
    tau_min = float(as_hermitian(tau).eig.eigenvalues[0])
    det_gap = had_gap = None
    if m % 2 == 0:
        det_gap, had_gap = _gaps_from(cov.real, delta)
    return UncertaintyReport(
        means=means,
        cov=cov.real,
        delta=delta,
        tau=tau,
        schrodinger_gaps=gaps,
        det_gap=det_gap,
        hadamard_gap=had_gap,
        tau_min_eig=tau_min,
        cov_residual=float(np.max(np.abs(cov.real - direct))),
    )


def _gaps_from(cov: np.ndarray, delta: np.ndarray) -> tuple[float, float]:
    det_cov = determinant(cov).real
    det_id = determinant(1j * delta).real
    return det_cov - det_id, float(np.prod(np.diag(cov))) - det_id


@dataclass(frozen=True)
class DetGaps:
    det_gap: float
    hadamard_gap: float
    det_cov: float
    det_i_delta: float
    strict: bool


def det_gaps(obs: ObservableSet) -> DetGaps:
    """``det cov - det(i delta)`` and ``prod var_j - det(i delta)`` for even ``m``.

    ``strict`` is set when the Gram matrix is safely positive definite, in
    which case the first gap is guaranteed strictly positive.
    """
    if obs.m % 2:
        raise OddDimensionError(f"determinant inequality needs an even number of observables, got {obs.m}")
    rep = build_report(obs)
    det_cov = determinant(rep.cov).real
    det_id = determinant(1j * rep.delta).real
    return DetGaps(rep.det_gap, rep.hadamard_gap, det_cov, det_id, rep.strict)


def split_eigenvalues(C) -> np.ndarray:
    """Spectrum of ``A^(-1/2) B A^(-1/2)`` for the symmetric/antisymmetric split of ``C``."""
    A, B = _split(C)
    Ainv = matrix_fn(A, SpectralFunction.power(-0.5)).data
    return as_hermitian(Ainv @ B @ Ainv).eig.eigenvalues


def _split(C):
    C = np.asarray(C.data if isinstance(C, HermitianMatrix) else C, dtype=np.complex128)
    Cm = as_hermitian(C)
    if Cm.eig.eigenvalues[0] <= 1e-10 * max(1.0, float(np.linalg.norm(C))):
        raise NotPositiveError("C must be positive definite")
    C = Cm.data
    A = HermitianMatrix._trusted(0.5 * (C + C.T))
    B = HermitianMatrix._trusted(0.5 * (C - C.T))
    return A, B


def lemma_split_check(C) -> tuple[float, float]:
    """``(det A, det iB)`` for ``A = (C + C^T)/2``, ``B = (C - C^T)/2``.

    For positive definite ``C`` of even order, ``det A > det iB``.
    """
    C = np.asarray(C.data if isinstance(C, HermitianMatrix) else C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatchError("C must be square")
    if C.shape[0] % 2:
        raise OddDimensionError(f"C must have even order, got {C.shape[0]}")
    A, B = _split(C)
    lam = split_eigenvalues(C)
    if np.max(np.abs(lam)) > 1.0 + 1e-9:
        raise ArithmeticError(f"split eigenvalues outside [-1, 1]: {lam}")
    return determinant(A.data).real, determinant(1j * B.data).real


def alpha_variance(rho, A, alpha: float, *, alpha_mean: Optional[float] = None,
                   near_one_tol: float = NEAR_ONE_TOL) -> float:
    """``Tr rho (A - <A>_alpha)^2``.

    At ``alpha = inf`` the mean must be supplied, or ``rho`` must commute with
    ``A`` (e.g. a Gibbs state of ``A``) so the limit can be taken.
    """
    alpha = check_alpha(alpha)
    rho, A = _pair(rho, A)
    if alpha_mean is None:
        if math.isinf(alpha):
            alpha_mean = alpha_expectation_inf(rho, A)
        else:
            alpha_mean = alpha_expectation(rho, A, alpha, near_one_tol=near_one_tol)
    D = A.data - alpha_mean * np.eye(A.n)
    return _expect(rho.data, D @ D).real


def alpha_std(rho, A, alpha: float, **kwargs) -> float:
    return math.sqrt(max(alpha_variance(rho, A, alpha, **kwargs), 0.0))
