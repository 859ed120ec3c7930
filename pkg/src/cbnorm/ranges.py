"""Matrix numerical ranges Q(b, xi), their extremal parts, and the
tracial geometric mean.

For a tuple b = (b_1..b_l) the range point at a unit vector xi is the
Gram matrix Q(b,xi)_{ij} = <b_i xi, b_j xi>.  W_m,e(b) collects the
points generated by unit vectors in the maximal eigenspace of b*b; for
diagonal tuples it is exactly the convex hull of the coordinate
vertices Q(b, e_p) over the maximizing coordinates p.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import psd_sqrt, trace_norm

TAU_EIG = 1e-9


@dataclass
class OperatorTuple:
    """A row [a_1 ... a_l] or column stack of square matrices."""

    entries: tuple
    orientation: str = "row"

    def __post_init__(self):
        entries = tuple(np.asarray(a, dtype=complex) for a in self.entries)
        if not entries:
            raise ValueError("need at least one operator")
        d = entries[0].shape[0]
        for a in entries:
            if a.ndim != 2 or a.shape != (d, d):
                raise ValueError("operators must be square with a common dimension")
        if self.orientation not in ("row", "column"):
            raise ValueError("orientation must be 'row' or 'column'")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self):
        return self.entries[0].shape[0]

    def star(self):
        flipped = "column" if self.orientation == "row" else "row"
        return OperatorTuple(tuple(a.conj().T for a in self.entries), flipped)


@dataclass
class RangePoint:
    q: np.ndarray
    xi: np.ndarray


def q_matrix(t, xi):
    """The range point Q(t, xi) = [<b_i xi, b_j xi>] for a unit vector xi."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise ValueError("xi must be a unit vector")
    g = np.column_stack([a @ xi for a in t.entries])
    q = (g.conj().T @ g).T
    return RangePoint(q=q, xi=xi)


def _as_column(t):
    return t if t.orientation == "column" else t.star()


def wme_diagonal(b):
    """Vertices of W_m,e for a tuple of diagonal matrices.

    b*b is diagonal, so its maximal eigenspace is spanned by coordinate
    vectors; the extremal range is the convex hull of Q(b, e_p) over the
    coordinates p carrying the maximal diagonal entry.
    """
    b = _as_column(b)
    d = b.dim
    diags = []
    for a in b.entries:
        if np.max(np.abs(a - np.diag(np.diag(a)))) > 1e-12:
            raise ValueError("tuple entries must be diagonal")
        diags.append(np.diag(a))
    weight = np.sum(np.abs(np.array(diags)) ** 2, axis=0)
    top = weight.max()
    out = []
    for p in range(d):
        if weight[p] >= top * (1.0 - TAU_EIG):
            e = np.zeros(d, dtype=complex)
            e[p] = 1.0
            out.append(q_matrix(b, e))
    return out


def wme_sample(t, samples, seed=0):
    """Range points of Haar-random unit vectors in the maximal eigenspace.

    For a row tuple a this samples W_m,e(a*): the Gram matrix used is
    sum a_j a_j*, and the points are Q(a*, xi).
    """
    c = _as_column(t)
    gram = sum(a.conj().T @ a for a in c.entries)
    w, v = np.linalg.eigh(gram)
    top = w[-1]
    basis = v[:, w >= top * (1.0 - TAU_EIG)]
    r = basis.shape[1]
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        coeff = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        coeff /= np.linalg.norm(coeff)
        xi = basis @ coeff
        xi /= np.linalg.norm(xi)
        out.append(q_matrix(c, xi))
    return out


def tgm(x, y):
    """Tracial geometric mean ||sqrt(x) sqrt(y)||_1 of two PSD matrices."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    return trace_norm(psd_sqrt(x) @ psd_sqrt(y))


def tgm_lower_bound(T, xi, eta):
    """tgm(Q(a*, xi), diag(|eta_i|^2)): a valid lower bound for ||T|| at any
    unit pair, and equal to it at the extremal pair.

    Q for the canonical diagonal right factors is diag(|eta_i|^2) exactly,
    so it is formed directly.
    """
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    eta = np.asarray(eta, dtype=complex).reshape(-1)
    for v in (xi, eta):
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("xi and eta must be unit vectors")
    a_star = OperatorTuple(tuple(a.conj().T for a in T.columns), "column")
    q = q_matrix(a_star, xi).q
    y = np.diag(np.abs(eta) ** 2).astype(complex)
    return tgm(q, y)


def _flatten_herm(q):
    d = q.shape[0]
    iu = np.triu_indices(d, 1)
    return np.concatenate([np.diag(q).real, np.sqrt(2) * q[iu].real, np.sqrt(2) * q[iu].imag])


def star_distance(a, b, samples=200, seed=0, iters=1000):
    """Heuristic Frobenius distance between conv W_m,e(a*) and conv W_m,e(b).

    Sampled vertices on the a side, exact vertices on the diagonal b side,
    then conditional-gradient minimization of the squared distance over the
    two convex hulls.  A value near 0 is evidence that the hulls intersect;
    a positive value is only evidence against, since sampling can miss
    points of W_m,e(a*).
    """
    pts = wme_sample(a, samples, seed)
    verts = wme_diagonal(b)
    A = np.column_stack([_flatten_herm(p.q) for p in pts])
    B = np.column_stack([_flatten_herm(p.q) for p in verts])
    lam = np.full(A.shape[1], 1.0 / A.shape[1])
    mu = np.full(B.shape[1], 1.0 / B.shape[1])
    for _ in range(iters):
        d = A @ lam - B @ mu
        i = int(np.argmin(A.T @ d))
        j = int(np.argmax(B.T @ d))
        w = A[:, i] - B[:, j]
        gap = 2.0 * float(d @ (d - w))
        if gap <= 1e-14:
            break
        denom = float(np.linalg.norm(d - w) ** 2)
        if denom <= 0:
            break
        gamma = min(1.0, max(0.0, float(d @ (d - w)) / denom))
        lam *= 1.0 - gamma
        lam[i] += gamma
        mu *= 1.0 - gamma
        mu[j] += gamma
    return float(np.linalg.norm(A @ lam - B @ mu))
