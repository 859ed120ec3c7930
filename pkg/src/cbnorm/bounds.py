"""Closed-form bounds for C(m,n), the largest cb/op ratio over right
D_n-module maps on M_{m,n}, plus per-map inequality checking.

Rules, applied in order:
  (i)   m = 1 or n in {1,2}: C = 1.
  (ii)  m > n: C(m,n) = C(n,n).
  (iii) n >= m^2: C = sqrt(m).
  (iv)  otherwise sqrt(max(floor(sqrt(n)), n/ceil(sqrt(n)))) <= C
        <= sqrt(min(m, n/2)).
The interval endpoints are compared as exact rationals before taking
square roots, so coincidences like C(3,3) are reported as exact.
"""

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .norms import EngineOptions, amplification_profile, hs_norm


@dataclass
class CBounds:
    m: int
    n: object  # int, or math.inf for the diffuse case
    lower: float
    upper: float
    exact: float = None
    provenance: tuple = ()

    def to_dict(self):
        n = self.n if self.n != math.inf else "inf"
        return {
            "m": self.m,
            "n": n,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "provenance": list(self.provenance),
        }

    @staticmethod
    def from_dict(d):
        n = math.inf if d["n"] == "inf" else d["n"]
        return CBounds(
            m=d["m"],
            n=n,
            lower=d["lower"],
            upper=d["upper"],
            exact=d.get("exact"),
            provenance=tuple(d.get("provenance", ())),
        )


def c_bounds(m, n):
    if isinstance(n, str):
        if n != "inf":
            raise ValueError("n must be a positive integer or 'inf'")
        n = math.inf
    if not (isinstance(m, int) and m >= 1):
        raise ValueError("m must be a positive integer")
    if n != math.inf and not (isinstance(n, int) and n >= 1):
        raise ValueError("n must be a positive integer or 'inf'")

    if m == 1 or n in (1, 2):
        v = 1.0
        return CBounds(m=m, n=n, lower=v, upper=v, exact=v, provenance=("i",))
    if n != math.inf and m > n:
        inner = c_bounds(n, n)
        return CBounds(
            m=m,
            n=n,
            lower=inner.lower,
            upper=inner.upper,
            exact=inner.exact,
            provenance=("ii",) + inner.provenance,
        )
    if n == math.inf or n >= m * m:
        v = float(np.sqrt(m))
        return CBounds(m=m, n=n, lower=v, upper=v, exact=v, provenance=("iii",))

    fl = math.isqrt(n)
    ce = fl if fl * fl == n else fl + 1
    lower_sq = max(Fraction(fl), Fraction(n, ce))
    upper_sq = min(Fraction(m), Fraction(n, 2))
    lower = float(np.sqrt(float(lower_sq)))
    upper = float(np.sqrt(float(upper_sq)))
    exact = lower if lower_sq == upper_sq else None
    return CBounds(m=m, n=n, lower=lower, upper=upper, exact=exact, provenance=("iv",))


def product_bound(m, n, s, t):
    """c_bounds(m,n).lower * c_bounds(s,t).lower, a valid lower bound for
    C(ms, nt) by multiplicativity of cb norms under tensoring."""
    return c_bounds(m, n).lower * c_bounds(s, t).lower


def bounds_table(m_max, n_max):
    return [c_bounds(m, n) for m in range(1, m_max + 1) for n in range(1, n_max + 1)]


def table_to_csv(rows):
    """CSV with header m,n,lower,upper,exact,provenance; 12 significant
    digits; empty exact field when only an interval is known."""
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["m", "n", "lower", "upper", "exact", "provenance"])
    for b in rows:
        w.writerow(
            [
                b.m,
                b.n if b.n != math.inf else "inf",
                f"{b.lower:.12g}",
                f"{b.upper:.12g}",
                "" if b.exact is None else f"{b.exact:.12g}",
                ";".join(b.provenance),
            ]
        )
    return buf.getvalue()


def check_map_inequalities(T, report, options=None):
    """Evaluate the per-map norm inequalities against a report.

    Returns a list of (rule, satisfied, slack) with slack = bound - value,
    so 0 means tight; satisfied allows 1e-8 rounding.  The amplified chain
    is recomputed with warm starts so the monotone rows are meaningful.
    """
    tol = 1e-8
    options = options or EngineOptions(restarts=report.restarts, seed=report.seed)
    hs = hs_norm(T)
    k_top = min(T.m, T.n)
    out = []

    def add(rule, value, bound):
        slack = bound - value
        out.append((rule, slack >= -tol, float(slack)))

    add("hs<=op", hs, report.op_lower)
    add("op<=sqrt(min(m,n))hs", report.op_lower, np.sqrt(min(T.m, T.n)) * hs)
    add("cb<=sqrt(min(m^2,n))hs", report.cb_lower, np.sqrt(min(T.m * T.m, T.n)) * hs)
    if T.n >= 2:
        add("cb<=sqrt(min(m,n/2))op", report.cb_lower, np.sqrt(min(T.m, T.n / 2)) * report.op_upper)
    if k_top > 1:
        vals = amplification_profile(T, options, k_top)
        for k in range(2, k_top + 1):
            add(f"level:k={k}<=sqrt(k)op", vals[k - 1], np.sqrt(k) * report.op_upper)
            add(f"monotone:k={k}", vals[k - 2], vals[k - 1])
    return out
