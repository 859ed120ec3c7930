"""Right D_n-module maps on M_{m,n}, stored by their column operators.

Such a map satisfies T(xd) = T(x)d for every diagonal d and is
determined by n matrices a_1..a_n in M_m: column j of T(x) is a_j
applied to column j of x.  The diagonal right factors are implicit;
storing them would invite inconsistent representations.
"""

import json
from dataclasses import dataclass

import numpy as np

from .linalg import op_norm_matrix


class MapFileError(ValueError):
    pass


class MapParseError(MapFileError):
    """File is not valid JSON."""


class MapSchemaError(MapFileError):
    """File is valid JSON but does not describe a map."""


class RightModuleMap:
    def __init__(self, columns):
        cols = [np.asarray(a, dtype=complex) for a in columns]
        if not cols:
            raise ValueError("need at least one column operator")
        m = cols[0].shape[0] if cols[0].ndim == 2 else -1
        for a in cols:
            if a.ndim != 2 or a.shape != (m, m):
                raise ValueError("column operators must be square matrices of a common dimension")
            if not np.all(np.isfinite(a.view(float))):
                raise ValueError("column operators must be finite")
        self.columns = tuple(cols)
        self.m = m
        self.n = len(cols)

    def __repr__(self):
        return f"RightModuleMap(m={self.m}, n={self.n})"

    def stacked(self):
        """The (n, m, m) array of column operators."""
        return np.stack(self.columns)


@dataclass
class Witness:
    """A point x in the unit ball of M_{km,n} together with the norm of its
    amplified image; every reported lower bound carries one so it can be
    re-checked independently."""

    k: int
    x: np.ndarray
    value: float

    def to_dict(self):
        return {"k": self.k, "x": _matrix_to_json(self.x), "value": self.value}

    @staticmethod
    def from_dict(d):
        return Witness(k=int(d["k"]), x=_matrix_from_json(d["x"], "x"), value=float(d["value"]))


def apply(T, x):
    """Column j of the output is a_j times column j of x."""
    return apply_amplified(T, 1, x)


def apply_amplified(T, k, x):
    """The k-fold column amplification: column j maps through I_k (x) a_j."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (k * T.m, T.n):
        raise ValueError(f"expected shape {(k * T.m, T.n)}, got {x.shape}")
    xr = x.reshape(k, T.m, T.n)
    out = np.einsum("jab,kbj->kaj", T.stacked(), xr)
    return out.reshape(k * T.m, T.n)


def witness_value(T, w):
    """Re-evaluate a witness against a map."""
    return op_norm_matrix(apply_amplified(T, w.k, w.x))


def embed(T, m2, n2):
    """Pad column operators with zeros to m2 x m2 and append zero operators
    up to n2 columns; the op and cb norms are unchanged."""
    if m2 < T.m or n2 < T.n:
        raise ValueError("embed cannot shrink dimensions")
    cols = []
    for a in T.columns:
        b = np.zeros((m2, m2), dtype=complex)
        b[: T.m, : T.m] = a
        cols.append(b)
    for _ in range(n2 - T.n):
        cols.append(np.zeros((m2, m2), dtype=complex))
    return RightModuleMap(cols)


def truncate(T, n2):
    """Keep the first n2 column operators."""
    if not 1 <= n2 <= T.n:
        raise ValueError(f"truncation width must be in 1..{T.n}")
    return RightModuleMap(T.columns[:n2])


def compress_map(T, basis):
    """Compress every column operator to the span of `basis`.

    basis: list of orthonormal vectors in C^m; the result's operators are
    the compressions expressed in that basis, in the caller's order.
    """
    B = np.column_stack([np.asarray(v, dtype=complex) for v in basis])
    if B.shape[0] != T.m:
        raise ValueError("basis vectors must live in C^m")
    gram = B.conj().T @ B
    if np.linalg.norm(gram - np.eye(B.shape[1])) > 1e-10:
        raise ValueError("basis is not orthonormal")
    return RightModuleMap([B.conj().T @ a @ B for a in T.columns])


def tensor(T, S):
    """Tensor product map on M_{m_T m_S, n_T n_S}.

    Column operator at index (j-1)*n_S + i is kron(a_j, b_i), matching the
    identification of D_{n_T} (x) D_{n_S} with D_{n_T n_S}.
    """
    cols = []
    for a in T.columns:
        for b in S.columns:
            cols.append(np.kron(a, b))
    return RightModuleMap(cols)


def _matrix_to_json(x):
    x = np.asarray(x, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in x]


def _matrix_from_json(obj, where):
    if not isinstance(obj, list) or not obj:
        raise MapSchemaError(f"{where}: expected a non-empty list of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list) or (width is not None and len(row) != width):
            raise MapSchemaError(f"{where}: row {i} is not a list of length {width}")
        width = len(row)
        vals = []
        for j, cell in enumerate(row):
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(c, (int, float)) for c in cell)
            ):
                raise MapSchemaError(f"{where}: entry ({i},{j}) is not a [re, im] pair")
            vals.append(complex(cell[0], cell[1]))
        rows.append(vals)
    x = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(x.view(float))):
        raise MapSchemaError(f"{where}: entries must be finite")
    return x


def map_to_dict(T):
    return {"m": T.m, "n": T.n, "columns": [_matrix_to_json(a) for a in T.columns]}


def map_from_dict(d):
    if not isinstance(d, dict):
        raise MapSchemaError("top level must be an object")
    for key in ("m", "n", "columns"):
        if key not in d:
            raise MapSchemaError(f"missing field '{key}'")
    m, n = d["m"], d["n"]
    if not (isinstance(m, int) and isinstance(n, int) and m >= 1 and n >= 1):
        raise MapSchemaError("'m' and 'n' must be positive integers")
    cols = d["columns"]
    if not isinstance(cols, list) or len(cols) != n:
        raise MapSchemaError(f"expected {n} column operators, got {len(cols) if isinstance(cols, list) else type(cols).__name__}")
    mats = [_matrix_from_json(c, f"columns[{j}]") for j, c in enumerate(cols)]
    for j, a in enumerate(mats):
        if a.shape != (m, m):
            raise MapSchemaError(f"columns[{j}]: expected shape {(m, m)}, got {a.shape}")
    return RightModuleMap(mats)


def save_map(T, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(map_to_dict(T), f)
        f.write("\n")


def load_map(path):
    with open(path, encoding="utf-8") as f:
        text = f.read()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise MapParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    return map_from_dict(d)
