"""The explicit extremal maps and their witnesses.

Everything here is built from closed forms (roots of unity, 1/sqrt(2),
thirds); decimal literals never appear.  Witnesses are stored pre-scaled
into the unit ball, and their recorded values are evaluated, so each one
independently certifies the lower bound it claims.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import op_norm_matrix
from .modmap import RightModuleMap, Witness, apply_amplified, truncate


@dataclass
class Expected:
    hs: float = None
    op: float = None
    cb: float = None


@dataclass
class NamedConstruction:
    name: str
    map: RightModuleMap
    witnesses: list = field(default_factory=list)
    expected: Expected = field(default_factory=Expected)

    def witness(self, k):
        for w in self.witnesses:
            if w.k == k:
                return w
        return None


def _roots(m):
    # m-th roots of unity with conjugate pairs sharing bits, so that
    # products rho^k rho^{-k} land within one ulp of 1; fourth roots are
    # snapped to exact Gaussian integers
    out = [complex(1.0, 0.0)] * m
    for k in range(1, m // 2 + 1):
        z = complex(np.exp(2j * np.pi * k / m))
        if (4 * k) % m == 0:
            z = complex(round(z.real), round(z.imag))
        out[k] = z
        out[m - k] = z.conjugate()
    return out


def clock(m):
    """g = diag(1, rho, ..., rho^{m-1}) with rho = exp(2 pi i / m)."""
    return np.diag(_roots(m)).astype(complex)


def shift(m):
    """The m-cycle permutation matrix h with h e_i = e_{i+1 mod m}."""
    return np.roll(np.eye(m, dtype=complex), 1, axis=0)


def _amp_value(T, k, x):
    return op_norm_matrix(apply_amplified(T, k, x))


def thm_eg_map(m):
    """The clock-and-shift map on M_{m,m^2} with op norm sqrt(m) and cb
    norm m: column operator j = m*r + s is g^{-(s-1)} h^{-r}.

    The cb witness stacks the blocks x^i whose column j is
    rho^{(i-1)(s-1)} e_{alpha^r(i)}, scaled by 1/sqrt(m) into the unit
    ball; the op witness collects the columns a_j* e_1 / sqrt(m).
    """
    if m < 2:
        raise ValueError("need m >= 2")
    roots = _roots(m)
    n = m * m
    cols = []
    for r in range(m):
        for s in range(1, m + 1):
            a = np.zeros((m, m), dtype=complex)
            for i in range(m):
                # g^{-(s-1)} h^{-r} maps e_{i+r mod m} to rho^{-i(s-1)} e_i
                a[i, (i + r) % m] = roots[(-i * (s - 1)) % m]
            cols.append(a)
    T = RightModuleMap(cols)

    x = np.zeros((m * m, n), dtype=complex)
    for i in range(m):  # block row i holds x^{i+1}
        j = 0
        for r in range(m):
            for s in range(1, m + 1):
                x[i * m + (i + r) % m, j] = roots[(i * (s - 1)) % m]
                j += 1
    x /= np.sqrt(m)
    cb_w = Witness(k=m, x=x, value=_amp_value(T, m, x))

    y = np.column_stack([a.conj().T[:, 0] for a in cols]) / np.sqrt(m)
    op_w = Witness(k=1, x=y, value=_amp_value(T, 1, y))

    return NamedConstruction(
        name=f"msq:{m}",
        map=T,
        witnesses=[op_w, cb_w],
        expected=Expected(hs=1.0, op=float(np.sqrt(m)), cb=float(m)),
    )


def example_2x3():
    """The map [[a,c,e],[b,d,f]] -> [[a,c,f],[b,-d,e]] on M_{2,3}, with
    op norm sqrt(2) and cb norm sqrt(3)."""
    eye = np.eye(2, dtype=complex)
    flip = np.diag([1.0, -1.0]).astype(complex)
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    T = RightModuleMap([eye, flip, swap])
    s = 1 / np.sqrt(2)
    x = s * np.array(
        [[1, 1, 0], [0, 0, 1], [0, 0, 1], [1, -1, 0]],
        dtype=complex,
    )
    cb_w = Witness(k=2, x=x, value=_amp_value(T, 2, x))
    y = np.array([[1, 0, 0], [0, 0, 1]], dtype=complex)
    op_w = Witness(k=1, x=y, value=_amp_value(T, 1, y))
    return NamedConstruction(
        name="2x3",
        map=T,
        witnesses=[op_w, cb_w],
        expected=Expected(hs=1.0, op=float(np.sqrt(2)), cb=float(np.sqrt(3))),
    )


def example_2x4():
    """The extension of example_2x3 by a fourth column sending (g,h) to
    (h,-g); op norm sqrt(2), cb norm 2."""
    eye = np.eye(2, dtype=complex)
    flip = np.diag([1.0, -1.0]).astype(complex)
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    rot = np.array([[0, 1], [-1, 0]], dtype=complex)
    T = RightModuleMap([eye, flip, swap, rot])
    s = 1 / np.sqrt(2)
    x = s * np.array(
        [[1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1], [1, -1, 0, 0]],
        dtype=complex,
    )
    cb_w = Witness(k=2, x=x, value=_amp_value(T, 2, x))
    y = np.array([[1, 0, 0, 0], [0, 0, 1, 0]], dtype=complex)
    op_w = Witness(k=1, x=y, value=_amp_value(T, 1, y))
    return NamedConstruction(
        name="2x4",
        map=T,
        witnesses=[op_w, cb_w],
        expected=Expected(hs=1.0, op=float(np.sqrt(2)), cb=2.0),
    )


def perm_unitary(alpha):
    """Permutation matrix u with u e_i = e_{alpha(i)}; alpha is the list
    of 1-based images."""
    m = len(alpha)
    if sorted(alpha) != list(range(1, m + 1)):
        raise ValueError("not a permutation of 1..m")
    u = np.zeros((m, m), dtype=complex)
    for i, img in enumerate(alpha):
        u[img - 1, i] = 1.0
    return u


def _perm_from_cycles(m, text):
    # "(1 3)(2)" -> images list; fixed points may be omitted
    images = list(range(1, m + 1))
    for part in text.replace(")", ")|").split("|"):
        part = part.strip()
        if not part:
            continue
        nums = [int(t) for t in part.strip("()").split()]
        for a, b in zip(nums, nums[1:] + nums[:1]):
            images[a - 1] = b
    return images


def p34_example():
    """The permutation-column map on M_{3,4} with columns u_(1), u_(1 2),
    u_(1 3), u_(2 3), and the 6x4 witness whose squared value is the
    largest root of 18 t^3 - 72 t^2 + 33 t - 2."""
    cycles = ["(1)", "(1 2)", "(1 3)", "(2 3)"]
    T = RightModuleMap([perm_unitary(_perm_from_cycles(3, c)) for c in cycles])
    t = 2.0 / 3.0
    h = 1.0 / 3.0
    c = 1 / np.sqrt(2)
    x = np.array(
        [
            [-t, 0, 0, t],
            [0, 1, 0, 0],
            [0, 0, c, 0],
            [0, 0, c, 0],
            [h, 0, 0, t],
            [-t, 0, 0, -h],
        ],
        dtype=complex,
    )
    cb_w = Witness(k=2, x=x, value=_amp_value(T, 2, x))
    y = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], dtype=complex)
    op_w = Witness(k=1, x=y, value=_amp_value(T, 1, y))
    return NamedConstruction(
        name="p34",
        map=T,
        witnesses=[op_w, cb_w],
        expected=Expected(hs=1.0, op=float(np.sqrt(3)), cb=None),
    )


def truncation_example(m, n):
    """First n columns of the clock-and-shift map; keeping the first n
    columns of its witness certifies the amplified value sqrt(n), while
    the op norm stays at most sqrt(m), so the ratio is at least
    sqrt(n/m)."""
    if not 1 <= n <= m * m:
        raise ValueError("need 1 <= n <= m^2")
    base = thm_eg_map(m)
    T = truncate(base.map, n)
    full = base.witness(m)
    y = full.x[:, :n]
    w = Witness(k=m, x=y, value=_amp_value(T, m, y))
    return NamedConstruction(
        name=f"trunc:{m}:{n}",
        map=T,
        witnesses=[w],
        expected=Expected(hs=1.0),
    )


def by_name(name):
    """Look up a construction by its CLI identifier."""
    if name == "2x3":
        return example_2x3()
    if name == "2x4":
        return example_2x4()
    if name == "p34":
        return p34_example()
    if name.startswith("msq:"):
        return thm_eg_map(int(name.split(":")[1]))
    if name.startswith("trunc:"):
        _, m, n = name.split(":")
        return truncation_example(int(m), int(n))
    raise KeyError(f"unknown construction {name!r}")
