"""Cyclic complex Jacobi eigensolver for Hermitian matrices.

Each step applies the unitary plane rotation

    P = [[c, s e], [-s conj(e), c]]      (rows/cols p, q)

with ``e`` the phase of ``A[p, q]``, chosen so that ``(P* A P)[p, q] = 0``.
The kernel is compiled with numba when available; the pure Python fallback
computes the same thing, slower.
"""
import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

SWEEP_CAP = 64
REL_TOL = 1e-14


@njit(cache=True, nogil=True)
def _off_norm(A):
    n = A.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += A[i, j].real ** 2 + A[i, j].imag ** 2
    return math.sqrt(s)


@njit(cache=True, nogil=True)
def jacobi_kernel(A, max_sweeps, rel_tol):
    """Diagonalize the Hermitian matrix ``A`` in place.

    Returns ``(w, V, sweeps)`` with ``A_in = V diag(w) V*``; eigenvalues are
    unsorted. ``sweeps == -1`` signals non-convergence.
    """
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += A[i, j].real ** 2 + A[i, j].imag ** 2
    fro = math.sqrt(fro)
    target = rel_tol * fro
    sweeps = 0
    converged = _off_norm(A) <= target
    while not converged and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                # rotation too small to change the diagonal: drop the entry
                if mag < 1e-300 or (
                    abs(app) + 100.0 * mag == abs(app)
                    and abs(aqq) + 100.0 * mag == abs(aqq)
                ):
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                e = apq / mag
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                se = s * e
                sec = s * e.conjugate()
                # A <- A P
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - sec * akq
                    A[k, q] = se * akp + c * akq
                # A <- P* A
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - se * aqk
                    A[q, k] = sec * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - sec * vkq
                    V[k, q] = se * vkp + c * vkq
        converged = _off_norm(A) <= target
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i].real
    if not converged:
        sweeps = -1
    return w, V, sweeps
