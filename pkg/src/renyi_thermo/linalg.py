"""Hermitian linear algebra: eigendecomposition, spectral functions, traces.

Every spectral quantity in the package is evaluated through
:func:`eig_hermitian`, which runs a cyclic complex Jacobi iteration.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Optional, Sequence

import numpy as np

from . import _jacobi
from .errors import (
    DimensionMismatchError,
    EigenConvergenceError,
    SpectralDomainError,
    ValidationError,
)

HERMITIAN_TOL = 1e-12


def pd_tol(A) -> float:
    """Default positivity threshold ``1e-10 * max(1, ||A||_F)``."""
    return 1e-10 * max(1.0, float(np.linalg.norm(_raw(A))))


def _raw(A) -> np.ndarray:
    if isinstance(A, HermitianMatrix):
        return A.data
    return np.asarray(A)


def _as_square(data) -> np.ndarray:
    a = np.array(data, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real spectrum and matching unitary eigenbasis (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def descending(self) -> tuple[np.ndarray, np.ndarray]:
        """The same decomposition ordered largest eigenvalue first."""
        return self.eigenvalues[::-1], self.eigenvectors[:, ::-1]

    def reconstruct(self, values: Optional[np.ndarray] = None) -> np.ndarray:
        w = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return (U * w) @ U.conj().T


class HermitianMatrix:
    """An immutable n x n complex Hermitian matrix.

    The input must be Hermitian to within ``tol`` (default
    ``1e-12 * max(1, max|A_ij|)``); the stored data is the exact Hermitian
    part ``(A + A*)/2``.  The eigendecomposition is computed lazily and
    memoized.
    """

    def __init__(self, data, *, tol: Optional[float] = None):
        a = _as_square(data)
        scale = max(1.0, float(np.max(np.abs(a))))
        tol = HERMITIAN_TOL * scale if tol is None else tol
        asym = float(np.max(np.abs(a - a.conj().T)))
        if asym > tol:
            raise ValidationError(f"matrix is not Hermitian (max |A - A*| = {asym:.3g})")
        self._set(0.5 * (a + a.conj().T), None)

    def _set(self, data: np.ndarray, eig: Optional[EigenDecomposition]) -> None:
        data.flags.writeable = False
        self._data = data
        self._eig = eig

    @classmethod
    def _trusted(cls, data: np.ndarray, eig: Optional[EigenDecomposition] = None):
        """Wrap already-Hermitian data without validation (internal use)."""
        obj = cls.__new__(cls)
        HermitianMatrix._set(obj, np.ascontiguousarray(data, dtype=np.complex128), eig)
        return obj

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def eig(self) -> EigenDecomposition:
        if self._eig is None:
            self._eig = _decompose(self._data)
        return self._eig

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy()
        return self._data.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


def as_hermitian(A) -> HermitianMatrix:
    if isinstance(A, HermitianMatrix):
        return A
    return HermitianMatrix(A)


def _canonical_phase(U: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    U = U.copy()
    for k in range(U.shape[1]):
        col = U[:, k]
        big = np.nonzero(np.abs(col) > 1e-8)[0]
        if big.size:
            z = col[big[0]]
            U[:, k] = col * (abs(z) / z)
    return U


def _sort_order(w: np.ndarray, U: np.ndarray) -> np.ndarray:
    # exact ties fall back to lexicographic order on the canonical columns
    keys = []
    for k in range(U.shape[1] - 1, -1, -1):
        keys.append(-U[k].imag)
        keys.append(-U[k].real)
    keys.append(w)
    return np.lexsort(keys)


def _decompose(a: np.ndarray) -> EigenDecomposition:
    work = np.array(a, dtype=np.complex128, order="C")
    w, V, sweeps = _jacobi.jacobi_kernel(work, _jacobi.SWEEP_CAP, _jacobi.REL_TOL)
    if sweeps < 0:
        raise EigenConvergenceError(
            f"Jacobi iteration did not converge within {_jacobi.SWEEP_CAP} sweeps"
        )
    V = _canonical_phase(V)
    order = _sort_order(w, V)
    w = w[order]
    V = np.ascontiguousarray(V[:, order])
    w.flags.writeable = False
    V.flags.writeable = False
    return EigenDecomposition(w, V)


def eig_hermitian(A) -> EigenDecomposition:
    """Eigendecomposition ``A = U diag(w) U*`` with ``w`` ascending."""
    return as_hermitian(A).eig


@dataclass(frozen=True)
class SpectralFunction:
    """A real function applied to the spectrum of a Hermitian matrix."""

    kind: str
    p: float = 1.0
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def power(cls, p: float) -> "SpectralFunction":
        return cls("power", p=float(p))

    @classmethod
    def exp(cls, scale: float = 1.0) -> "SpectralFunction":
        """``x -> exp(scale * x)``."""
        return cls("exp", p=float(scale))

    @classmethod
    def log(cls) -> "SpectralFunction":
        return cls("log")

    @classmethod
    def custom(cls, fn: Callable[[np.ndarray], np.ndarray]) -> "SpectralFunction":
        return cls("custom", fn=fn)

    def __call__(self, w: np.ndarray, tol: float) -> np.ndarray:
        if self.kind == "exp":
            return np.exp(self.p * w)
        if self.kind == "log":
            if w[0] <= tol:
                raise SpectralDomainError(
                    f"log needs a positive definite matrix (min eigenvalue {w[0]:.3g})"
                )
            return np.log(w)
        if self.kind == "power":
            return _spectral_power(w, self.p, tol)
        if self.kind == "custom":
            return np.asarray(self.fn(w), dtype=float)
        raise ValueError(f"unknown spectral function {self.kind!r}")


def _spectral_power(w: np.ndarray, p: float, tol: float) -> np.ndarray:
    if p == 0.0:
        # 0^0 = 0: the support projector
        return (w > tol).astype(float)
    if p < 0.0:
        if w[0] <= tol:
            raise SpectralDomainError(
                f"negative power needs a positive definite matrix (min eigenvalue {w[0]:.3g})"
            )
        return w**p
    if float(p).is_integer():
        return w**p
    if w[0] < -tol:
        raise SpectralDomainError(
            f"fractional power needs a positive semidefinite matrix (min eigenvalue {w[0]:.3g})"
        )
    return np.clip(w, 0.0, None) ** p


def matrix_fn(A, f: SpectralFunction, *, tol: Optional[float] = None) -> HermitianMatrix:
    """``U f(diag w) U*``; the result carries its own eigendecomposition."""
    H = as_hermitian(A)
    tol = pd_tol(H) if tol is None else tol
    eig = H.eig
    fw = f(eig.eigenvalues, tol)
    order = np.argsort(fw, kind="stable")
    fw = fw[order]
    U = np.ascontiguousarray(eig.eigenvectors[:, order])
    out = (U * fw) @ U.conj().T
    out = 0.5 * (out + out.conj().T)
    return HermitianMatrix._trusted(out, EigenDecomposition(fw, U))


def _check_same_shape(mats: Sequence[np.ndarray]) -> None:
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(shapes)}")
    (shape,) = shapes
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatchError(f"expected square matrices, got {shape}")


def trace_product(factors: Sequence) -> complex:
    """Trace of the ordered product ``F1 F2 ... Fk``."""
    mats = [_raw(f) for f in factors]
    if not mats:
        raise ValueError("trace_product needs at least one factor")
    _check_same_shape(mats)
    if len(mats) == 1:
        return complex(np.trace(mats[0]))
    head = reduce(np.matmul, mats[:-1])
    # Tr(XY) without forming XY
    return complex(np.sum(head * mats[-1].T))


def bracket(A, B, kind: str = "commutator") -> np.ndarray:
    """``AB - BA`` (commutator) or ``AB + BA`` (anticommutator)."""
    a, b = _raw(A), _raw(B)
    _check_same_shape([a, b])
    ab, ba = a @ b, b @ a
    if kind == "commutator":
        return ab - ba
    if kind == "anticommutator":
        return ab + ba
    raise ValueError(f"kind must be 'commutator' or 'anticommutator', got {kind!r}")


def determinant(M) -> complex:
    """Determinant by LU factorization with partial pivoting."""
    m = np.asarray(_raw(M), dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"determinant needs a square matrix, got {m.shape}")
    return complex(np.linalg.det(m))


def min_eigenvalue(A) -> float:
    return float(eig_hermitian(A).eigenvalues[0])


def is_positive_definite(A, tol: Optional[float] = None) -> bool:
    H = as_hermitian(A)
    tol = pd_tol(H) if tol is None else tol
    return min_eigenvalue(H) > tol


def gram(deviations: Sequence) -> np.ndarray:
    """Gram matrix ``tau[j, k] = Tr(D_j D_k*)`` in the Hilbert-Schmidt product."""
    mats = [np.asarray(_raw(d), dtype=np.complex128) for d in deviations]
    if not mats:
        raise ValueError("gram needs at least one matrix")
    _check_same_shape(mats)
    F = np.stack([m.ravel() for m in mats])
    tau = F @ F.conj().T
    return 0.5 * (tau + tau.conj().T)


def logsumexp(x, b=None) -> float:
    """``log sum b * exp(x)`` over all entries, for non-negative weights ``b``.

    ``-inf`` entries and zero weights contribute nothing; an empty or
    all-zero sum gives ``-inf``.
    """
    x = np.asarray(x, dtype=float)
    if b is not None:
        b = np.broadcast_to(b, x.shape)
        keep = b > 0.0
        x = x[keep] + np.log(b[keep])
    if x.size == 0:
        return -np.inf
    m = float(np.max(x))
    if not np.isfinite(m):
        return m
    return m + float(np.log(np.sum(np.exp(x - m))))


def overlap_weights(a: EigenDecomposition, b: EigenDecomposition) -> np.ndarray:
    """``W[i, j] = |<b_i, a_j>|^2``, a doubly stochastic matrix.

    Weights below ``(n eps)^2`` are below the resolution of the eigenvectors
    and are set to zero.  Otherwise rounding noise of a shared eigenbasis
    (e.g. a Gibbs state and its Hamiltonian) would be amplified by large
    spectral factors in :func:`log_trace_spectral`.
    """
    _check_same_shape([a.eigenvectors, b.eigenvectors])
    W = b.eigenvectors.conj().T @ a.eigenvectors
    W = W.real**2 + W.imag**2
    W[W < (W.shape[0] * np.finfo(float).eps) ** 2] = 0.0
    return W


def log_trace_spectral(
    a: EigenDecomposition,
    log_fa: np.ndarray,
    b: EigenDecomposition,
    log_gb: np.ndarray,
    weights: Optional[np.ndarray] = None,
) -> float:
    """``log Tr f(A) g(B)`` from the log-spectra ``log f(a_j)`` and ``log g(b_i)``.

    ``Tr f(A) g(B) = sum_ij f(a_j) g(b_i) |<b_i, a_j>|^2`` is a sum of
    non-negative terms, so it is evaluated as a weighted log-sum-exp.  Entries
    of ``-inf`` encode zero eigenvalues of ``f(A)`` or ``g(B)``.
    """
    W = overlap_weights(a, b) if weights is None else weights
    x = log_gb[:, None] + log_fa[None, :]
    return float(logsumexp(x, b=W))
