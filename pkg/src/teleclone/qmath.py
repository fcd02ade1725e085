"""Dense complex linear algebra for small labeled tensor-product systems.

Everything operates on plain ``numpy`` complex arrays.  The labeled-layout
bookkeeping (which tensor factor is which subsystem) lives only in the
functions that need it (``partial_trace``, ``embed_operator``).  Dimensions
here stay tiny (4-qubit composites at most), so there is no sparsity and no
eigensolver; approximate equality is always an absolute Frobenius-distance
test against ``DEFAULT_ATOL``.

Basis convention, inherited by every other module: |0> is the first basis
vector and composite indices are big-endian in listed label order (the
leftmost label is the most significant digit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

DEFAULT_ATOL = 1e-10

_EINSUM_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class SubsystemLabel:
    """A named tensor factor with an explicit dimension (2 for qubits)."""

    name: str
    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"subsystem {self.name!r} needs a positive dimension")


LabelLike = Union[str, SubsystemLabel]


def as_label(label: LabelLike) -> SubsystemLabel:
    return label if isinstance(label, SubsystemLabel) else SubsystemLabel(label)


def as_layout(labels: Iterable[LabelLike]) -> tuple[SubsystemLabel, ...]:
    """Coerce to a label tuple, rejecting duplicate names."""
    layout = tuple(as_label(l) for l in labels)
    names = [l.name for l in layout]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate subsystem labels in layout {names}")
    return layout


def layout_dim(layout: Iterable[LabelLike]) -> int:
    return math.prod(l.dim for l in as_layout(layout))


def asmatrix(m) -> np.ndarray:
    """Validate and return a finite complex 2-d array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the left operand's subsystems come first."""
    return np.kron(asmatrix(a), asmatrix(b))


def dagger(m) -> np.ndarray:
    return asmatrix(m).conj().T


def matmul(a, b) -> np.ndarray:
    a, b = asmatrix(a), asmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def scale(c: complex, m) -> np.ndarray:
    return complex(c) * asmatrix(m)


def add(a, b) -> np.ndarray:
    a, b = asmatrix(a), asmatrix(b)
    if a.shape != b.shape:
        raise ValueError(f"add dimension mismatch: {a.shape} vs {b.shape}")
    return a + b


def trace(m) -> complex:
    a = asmatrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def frobenius_distance(a, b) -> float:
    """Matrix 2-norm of (a - b); the metric behind every approximate test."""
    a, b = asmatrix(a), asmatrix(b)
    if a.shape != b.shape:
        raise ValueError(f"distance dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def partial_trace(m, layout: Sequence[LabelLike], traced: Iterable[LabelLike]) -> np.ndarray:
    """Trace out the named subsystems, preserving the order of the rest.

    ``m`` must be square with dimension equal to the product of the layout
    dimensions; unknown labels in ``traced`` are rejected.
    """
    layout = as_layout(layout)
    dims = [l.dim for l in layout]
    n = math.prod(dims)
    a = asmatrix(m)
    if a.shape != (n, n):
        raise ValueError(f"matrix shape {a.shape} does not match layout dimension {n}")
    traced_names = {as_label(t).name for t in traced}
    known = {l.name for l in layout}
    unknown = traced_names - known
    if unknown:
        raise ValueError(f"unknown subsystem labels {sorted(unknown)}; layout has {sorted(known)}")

    k = len(dims)
    row, col, out_row, out_col = [], [], [], []
    nxt = 0
    for i, label in enumerate(layout):
        if label.name in traced_names:
            s = _EINSUM_LETTERS[nxt]; nxt += 1
            row.append(s); col.append(s)
        else:
            r = _EINSUM_LETTERS[nxt]; nxt += 1
            c = _EINSUM_LETTERS[nxt]; nxt += 1
            row.append(r); col.append(c)
            out_row.append(r); out_col.append(c)
    spec = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    kept = math.prod(d for d, l in zip(dims, layout) if l.name not in traced_names)
    return np.einsum(spec, a.reshape(dims + dims)).reshape(kept, kept)


def embed_operator(op, op_labels: Sequence[LabelLike], ambient: Sequence[LabelLike]) -> np.ndarray:
    """Extend ``op`` (acting on ``op_labels``) by identity onto ``ambient``.

    The ambient layout may list the operator's labels in any positions; the
    result is permuted to ambient order.
    """
    op_layout = as_layout(op_labels)
    ambient_layout = as_layout(ambient)
    op_names = [l.name for l in op_layout]
    ambient_names = [l.name for l in ambient_layout]
    missing = set(op_names) - set(ambient_names)
    if missing:
        raise ValueError(f"operator labels {sorted(missing)} not present in ambient layout")
    a = asmatrix(op)
    d_op = math.prod(l.dim for l in op_layout)
    if a.shape != (d_op, d_op):
        raise ValueError(f"operator shape {a.shape} does not match its labels (dim {d_op})")

    rest = [l for l in ambient_layout if l.name not in op_names]
    full = np.kron(a, identity(math.prod([l.dim for l in rest], start=1)))
    perm_names = op_names + [l.name for l in rest]
    perm_dims = [l.dim for l in op_layout] + [l.dim for l in rest]
    # transpose axes from (op_labels + rest) ordering into ambient ordering
    positions = [perm_names.index(name) for name in ambient_names]
    k = len(perm_dims)
    t = full.reshape(perm_dims + perm_dims)
    t = t.transpose(positions + [k + p for p in positions])
    n = math.prod(perm_dims)
    return t.reshape(n, n)
