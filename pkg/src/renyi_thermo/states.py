"""Density matrices, positive operators, Gibbs states and random ensembles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BetaRangeError,
    NotPositiveError,
    SingularSigmaError,
    ValidationError,
    ZeroTraceError,
)
from .linalg import EigenDecomposition, HermitianMatrix, as_hermitian, pd_tol

EPS = np.finfo(float).eps
REPAIR_LIMIT = 1e-6
BETA_SPREAD_LIMIT = 700.0


def _noise_floor(w: np.ndarray) -> float:
    """Eigenvalues below this are indistinguishable from zero."""
    return 4.0 * w.shape[0] * EPS * float(np.max(np.abs(w)))


class DensityMatrix(HermitianMatrix):
    """Positive semidefinite Hermitian matrix with unit trace.

    Construction repairs numerical noise: eigenvalues down to ``-1e-6`` are
    clipped to zero and the trace is renormalized.  Larger negativity or a
    non-positive trace is an error.
    """

    def __init__(self, data, *, tol: Optional[float] = None, purity_hint: Optional[bool] = None):
        super().__init__(data, tol=tol)
        self.purity_hint = purity_hint
        self._exact = False
        self._spectrum = None
        w = self.eig.eigenvalues
        if w[0] < -REPAIR_LIMIT:
            raise NotPositiveError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3g})")
        if float(np.sum(w)) <= 0.0:
            raise ZeroTraceError("matrix has non-positive trace")
        U = self.eig.eigenvectors
        data = self.data
        if w[0] < -_noise_floor(w):
            w = np.clip(w, 0.0, None)
            data = (U * w) @ U.conj().T
            data = 0.5 * (data + data.conj().T)
        tr = float(np.trace(data).real)
        if abs(tr - 1.0) > 4.0 * self.n * EPS:
            data = data / tr
            w = w / tr
        if data is not self.data:
            w = np.array(w)
            w.flags.writeable = False
            self._set(np.array(data), EigenDecomposition(w, U))

    @classmethod
    def _from_spectrum(cls, w: np.ndarray, U: np.ndarray, purity_hint=None) -> "DensityMatrix":
        """Exact construction from a known spectrum (ascending) and basis."""
        w = np.array(w, dtype=float)
        U = np.ascontiguousarray(U, dtype=np.complex128)
        w.flags.writeable = False
        U.flags.writeable = False
        data = (U * w) @ U.conj().T
        obj = cls._trusted(0.5 * (data + data.conj().T), EigenDecomposition(w, U))
        obj.purity_hint = purity_hint
        obj._exact = True
        obj._spectrum = None
        return obj

    @property
    def spectrum(self) -> np.ndarray:
        """Eigenvalues (ascending) with negative and sub-noise values set to 0."""
        if self._spectrum is None:
            w = np.clip(self.eig.eigenvalues, 0.0, None)
            if not self._exact:
                w = np.where(w <= _noise_floor(w), 0.0, w)
            w.flags.writeable = False
            self._spectrum = w
        return self._spectrum

    @property
    def spectral_decomposition(self) -> EigenDecomposition:
        return EigenDecomposition(self.spectrum, self.eig.eigenvectors)


class PositiveMatrix(HermitianMatrix):
    """Strictly positive definite Hermitian matrix (not necessarily unit trace)."""

    def __init__(self, data, *, tol: Optional[float] = None):
        super().__init__(data, tol=tol)
        _require_pd(self)


def _require_pd(A: HermitianMatrix) -> None:
    lo = float(A.eig.eigenvalues[0])
    if lo <= pd_tol(A):
        raise SingularSigmaError(f"sigma must be positive definite (min eigenvalue {lo:.3g})")


def as_density(x) -> DensityMatrix:
    if isinstance(x, DensityMatrix):
        return x
    return DensityMatrix(x.data if isinstance(x, HermitianMatrix) else x)


def as_positive(x) -> PositiveMatrix:
    """View ``x`` as a PositiveMatrix, reusing any cached eigendecomposition."""
    if isinstance(x, PositiveMatrix):
        return x
    if isinstance(x, HermitianMatrix):
        _require_pd(x)
        return PositiveMatrix._trusted(x.data, x.eig)
    return PositiveMatrix(x)


def density_from_matrix(A) -> DensityMatrix:
    """Validate ``A`` as a state, clipping small negative eigenvalues."""
    return DensityMatrix(A.data if isinstance(A, HermitianMatrix) else A)


def pure_state(v) -> DensityMatrix:
    """The rank-one projector ``v v* / ||v||^2``."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    norm = float(np.linalg.norm(v))
    if v.size == 0 or norm == 0.0 or not np.isfinite(norm):
        raise ValidationError("pure_state needs a nonzero finite vector")
    v = v / norm
    n = v.size
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(n, dtype=np.complex128)]))
    U = np.column_stack([Q[:, 1:n], v])
    w = np.zeros(n)
    w[-1] = 1.0
    return DensityMatrix._from_spectrum(w, U, purity_hint=True)


def maximally_mixed(n: int) -> DensityMatrix:
    if n < 1:
        raise ValidationError("dimension must be positive")
    return DensityMatrix._from_spectrum(np.full(n, 1.0 / n), np.eye(n), purity_hint=(n == 1))


def gibbs_weights(H, beta: float) -> np.ndarray:
    """Boltzmann weights ``exp(-beta w_i) / Z`` over the ascending spectrum of H."""
    w = as_hermitian(H).eig.eigenvalues
    x = -beta * w
    x = x - np.max(x)
    p = np.exp(x)
    return p / np.sum(p)


def check_beta_range(H, beta: float) -> float:
    """Reject ``beta`` when ``|beta|`` times the spectral spread of H exceeds 700."""
    beta = float(beta)
    if not np.isfinite(beta):
        raise BetaRangeError("beta must be finite")
    w = as_hermitian(H).eig.eigenvalues
    if abs(beta) * (w[-1] - w[0]) > BETA_SPREAD_LIMIT:
        raise BetaRangeError(
            f"beta out of range: |beta| * spectral spread = {abs(beta) * (w[-1] - w[0]):.4g} "
            f"exceeds {BETA_SPREAD_LIMIT:g}"
        )
    return beta


def gibbs_state(H, beta: float) -> DensityMatrix:
    """Equilibrium state ``exp(-beta H) / Tr exp(-beta H)``."""
    H = as_hermitian(H)
    beta = check_beta_range(H, beta)
    p = gibbs_weights(H, beta)
    order = np.argsort(p, kind="stable")
    return DensityMatrix._from_spectrum(p[order], H.eig.eigenvectors[:, order])


# -- random ensembles -------------------------------------------------------

def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator keyed by ``seed`` and a stream path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def ginibre(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """n x m matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1)."""
    z = rng.standard_normal((n, m, 2)) * np.sqrt(0.5)
    return z[..., 0] + 1j * z[..., 1]


def ginibre_density(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Hilbert-Schmidt random state ``G G* / Tr G G*``; full rank unless ``rank < n``."""
    G = ginibre(n, n if rank is None else rank, rng)
    A = G @ G.conj().T
    return DensityMatrix(A / np.trace(A).real)


def gue_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianMatrix:
    M = ginibre(n, n, rng)
    return HermitianMatrix._trusted(scale * 0.5 * (M + M.conj().T))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(n, n, rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))


@dataclass(frozen=True)
class SampleSpec:
    kind: str  # "ginibre_density" | "gue_hermitian" | "haar_unitary"
    n: int
    seed: int
    scale: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.kind not in ("ginibre_density", "gue_hermitian", "haar_unitary"):
            raise ValidationError(f"unknown sample kind {self.kind!r}")


def sample(spec: SampleSpec):
    rng = rng_for(spec.seed, 0)
    if spec.kind == "ginibre_density":
        return ginibre_density(spec.n, rng)
    if spec.kind == "gue_hermitian":
        return gue_hermitian(spec.n, rng, spec.scale)
    return haar_unitary(spec.n, rng)
