"""JSON matrix files and report documents.

Matrices are stored as ``{"n", "kind", "data", "label"}`` with ``data`` an
``n x n`` row-major array of ``[re, im]`` pairs.  Floats are written with
Python's shortest round-trip representation, so a file written and read
back reproduces every entry bit for bit.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import NotPositiveError, ValidationError
from .linalg import EigenDecomposition, HermitianMatrix, as_hermitian, pd_tol
from .states import DensityMatrix, PositiveMatrix

KINDS = ("hermitian", "density", "positive")
STATE_TOL = 1e-10


def _num(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def encode_matrix(a: np.ndarray) -> list:
    a = np.asarray(a)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in a.astype(np.complex128)]


def encode_value(v):
    """JSON-ready form of scalars, arrays and matrices."""
    if isinstance(v, HermitianMatrix):
        return encode_matrix(v.data)
    if isinstance(v, EigenDecomposition):
        return {"eigenvalues": encode_value(v.eigenvalues), "eigenvectors": encode_matrix(v.eigenvectors)}
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            if v.ndim == 2:
                return encode_matrix(v)
            return [[_num(z.real), _num(z.imag)] for z in v.ravel()]
        return [encode_value(x) for x in v.tolist()] if v.ndim > 1 else [_num(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    if isinstance(v, complex):
        return [_num(v.real), _num(v.imag)]
    if isinstance(v, dict):
        return {k: encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    return v


def decode_matrix(data, n: Optional[int] = None) -> np.ndarray:
    try:
        a = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"data: not a numeric array of [re, im] pairs ({exc})") from None
    if a.ndim != 3 or a.shape[2] != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"data: expected an n x n array of [re, im] pairs, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValidationError(f"n: declared {n} but data is {a.shape[0]}x{a.shape[1]}")
    out = np.empty(a.shape[:2], dtype=np.complex128)
    # assign parts separately; re + 1j*im would turn -0.0 into 0.0
    out.real, out.imag = a[..., 0], a[..., 1]
    return out


@dataclass(frozen=True)
class MatrixFile:
    n: int
    kind: str
    data: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind: must be one of {', '.join(KINDS)}, got {self.kind!r}")

    def to_json(self) -> dict:
        d = {"n": self.n, "kind": self.kind, "data": encode_matrix(self.data)}
        if self.label is not None:
            d["label"] = self.label
        return d

    @classmethod
    def from_json(cls, obj) -> "MatrixFile":
        if not isinstance(obj, dict):
            raise ValidationError("matrix file must be a JSON object")
        for key in ("n", "kind", "data"):
            if key not in obj:
                raise ValidationError(f"{key}: missing field")
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValidationError(f"n: must be a positive integer, got {n!r}")
        label = obj.get("label")
        if label is not None and not isinstance(label, str):
            raise ValidationError("label: must be a string")
        mf = cls(n, obj["kind"], decode_matrix(obj["data"], n), label)
        mf.operator()  # validate against the declared kind
        return mf

    def operator(self) -> HermitianMatrix:
        """The matrix as the operator type its kind declares, strictly validated."""
        H = as_hermitian(self.data)
        if self.kind == "hermitian":
            return H
        w = H.eig.eigenvalues
        if self.kind == "density":
            if w[0] < -STATE_TOL:
                raise NotPositiveError(f"data: density matrix has eigenvalue {w[0]:.3g} < 0")
            tr = float(np.trace(H.data).real)
            if abs(tr - 1.0) > STATE_TOL:
                raise ValidationError(f"data: density matrix has trace {tr!r}, expected 1")
            return DensityMatrix(H.data)
        if w[0] <= pd_tol(H):
            raise NotPositiveError(f"data: positive matrix has eigenvalue {w[0]:.3g}, not positive definite")
        return PositiveMatrix._trusted(H.data, H.eig)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")


def load_matrix(path) -> MatrixFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    try:
        return MatrixFile.from_json(obj)
    except ValidationError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def report_document(command: str, files: dict, params: dict, results: dict) -> dict:
    from . import __version__

    return {
        "command": command,
        "inputs": {
            "files": {k: {"path": str(p), "sha256": file_digest(p)} for k, p in files.items()},
            "params": encode_value(params),
        },
        "results": encode_value(results),
        "version": __version__,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False)
