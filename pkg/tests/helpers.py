"""Sampling helpers built on plain numpy, independent of the package samplers."""
import numpy as np


def random_hermitian(rng, n, scale=1.0):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (M + M.conj().T) / 2


def random_state(rng, n, rank=None):
    G = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    A = G @ G.conj().T
    return A / np.trace(A).real


def random_unitary(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
