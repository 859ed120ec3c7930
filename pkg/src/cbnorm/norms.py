"""The norm engine.

Lower bounds come from alternating maximization of ||T_{k,1}(x)|| over the
unit operator-norm ball, witness-backed so every figure can be re-checked;
upper bounds are the closed forms sqrt(min(m,n))*hs for the operator norm
and min(sqrt(min(m^2,n))*hs, ||[a_1 ... a_n]||) for the cb norm.  The cb
norm itself is ||T_{k,1}|| at k = min(m,n).
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import op_norm_matrix, polar_factor, svd
from .modmap import Witness, apply_amplified
from .ranges import tgm_lower_bound


@dataclass
class EngineOptions:
    restarts: int = 32
    max_iter: int = 500
    tol: float = 1e-12
    seed: int = 0


@dataclass
class NormReport:
    m: int
    n: int
    hs: float
    op_lower: float
    op_upper: float
    op_upper_best: float
    cb_lower: float
    cb_upper: float
    ratio_lower: float
    op_witness: Witness
    cb_witness: Witness
    restarts: int
    seed: int
    iterations: int

    def to_dict(self):
        d = {
            "m": self.m,
            "n": self.n,
            "hs": self.hs,
            "op_lower": self.op_lower,
            "op_upper": self.op_upper,
            "op_upper_best": self.op_upper_best,
            "cb_lower": self.cb_lower,
            "cb_upper": self.cb_upper,
            "ratio_lower": self.ratio_lower,
            "op_witness": self.op_witness.to_dict(),
            "cb_witness": self.cb_witness.to_dict(),
            "restarts": self.restarts,
            "seed": self.seed,
            "iterations": self.iterations,
        }
        return d

    @staticmethod
    def from_dict(d):
        return NormReport(
            m=int(d["m"]),
            n=int(d["n"]),
            hs=float(d["hs"]),
            op_lower=float(d["op_lower"]),
            op_upper=float(d["op_upper"]),
            op_upper_best=float(d["op_upper_best"]),
            cb_lower=float(d["cb_lower"]),
            cb_upper=float(d["cb_upper"]),
            ratio_lower=float(d["ratio_lower"]),
            op_witness=Witness.from_dict(d["op_witness"]),
            cb_witness=Witness.from_dict(d["cb_witness"]),
            restarts=int(d["restarts"]),
            seed=int(d["seed"]),
            iterations=int(d["iterations"]),
        )


def hs_norm(T):
    """max_j ||a_j||, the Hilbert-Schmidt-to-operator norm of the map."""
    return max(op_norm_matrix(a) for a in T.columns)


def row_concat_norm(T):
    """||[a_1 ... a_n]||, an upper bound for the cb norm."""
    return op_norm_matrix(np.hstack(T.columns))


def right_mult_coeff(T):
    """If T is right multiplication by a diagonal (every a_j a scalar
    multiple of I), return the coefficient moduli, else None.  For such
    maps op = cb = max |c_j| exactly."""
    eye = np.eye(T.m)
    cs = []
    for a in T.columns:
        c = a[0, 0]
        if np.linalg.norm(a - c * eye) > 1e-13 * max(1.0, abs(c)):
            return None
        cs.append(abs(c))
    return cs


def _threads():
    try:
        return max(1, int(os.environ.get("CBNORM_THREADS", "1")))
    except ValueError:
        return 1


def _assemble_g(A_conj, k, zeta, eta):
    # G = sum_j conj(eta_j) (I_k (x) a_j)^dagger zeta e_j^dagger
    km = A_conj.shape[1] * k
    zr = zeta.reshape(k, -1)
    cz = np.einsum("jba,kb->kaj", A_conj, zr)
    cz = cz * eta.conj()[None, None, :]
    return cz.reshape(km, -1)


def _ascend(T, k, x0, max_iter, tol):
    """Monotone alternating ascent from x0.

    Alternates the top singular pair of the image with the polar factor of
    the linearized objective; each sweep cannot decrease the value.  Returns
    (value, x, sweeps) with value exactly the image norm of x.
    """
    A = T.stacked()
    A_conj = A.conj()
    x = x0
    best_val = -1.0
    best_x = x0
    prev = -1.0
    sweeps = 0
    for _ in range(max_iter):
        sweeps += 1
        y = apply_amplified(T, k, x)
        u, s, vh = np.linalg.svd(y, full_matrices=False)
        cur = float(s[0])
        if cur > best_val:
            best_val, best_x = cur, x
        if cur <= prev * (1.0 + tol):
            break
        prev = cur
        g = _assemble_g(A_conj, k, u[:, 0], vh[0, :].conj())
        x = polar_factor(g)
    return best_val, best_x, sweeps


def _structured_start(T, k):
    # rank-one maximizer of the Hilbert-Schmidt bound: puts hs in the basin
    # from the first sweep, so hs <= op_lower always holds in reports
    norms = [op_norm_matrix(a) for a in T.columns]
    j = int(np.argmax(norms))
    _, _, v = svd(T.columns[j])
    x0 = np.zeros((k * T.m, T.n), dtype=complex)
    x0[: T.m, j] = v[:, 0]
    return x0


def amplified_norm_lower(T, k, options=None, extra_starts=()):
    """Best found value of ||T_{k,1}(x)|| over the unit ball, with witness.

    Multi-start alternating maximization; the returned value is evaluated
    on the returned witness, so it is a true lower bound for ||T_{k,1}||.
    """
    options = options or EngineOptions()
    rng = np.random.default_rng(options.seed)
    starts = [_structured_start(T, k)]
    for x0 in extra_starts:
        x0 = np.asarray(x0, dtype=complex)
        nrm = op_norm_matrix(x0)
        if nrm > 1.0:
            x0 = x0 / nrm
        starts.append(x0)
    while len(starts) < max(options.restarts, len(starts)):
        z = rng.standard_normal((k * T.m, T.n)) + 1j * rng.standard_normal((k * T.m, T.n))
        starts.append(polar_factor(z))

    def run(x0):
        return _ascend(T, k, x0, options.max_iter, options.tol)

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, starts))
    else:
        results = [run(x0) for x0 in starts]

    best_val, best_x = -1.0, starts[0]
    sweeps = 0
    for val, x, sw in results:
        sweeps += sw
        if val > best_val:
            best_val, best_x = val, x
    return best_val, Witness(k=k, x=best_x, value=best_val), sweeps


def _rank_one_witness(T, k):
    # exact maximizer when min(m,n) = 1 or for degenerate short-circuits
    x0 = _structured_start(T, k)
    val = op_norm_matrix(apply_amplified(T, k, x0))
    return val, Witness(k=k, x=x0, value=val), 0


def _op_norm(T, options=None):
    options = options or EngineOptions()
    hs = hs_norm(T)
    upper = np.sqrt(min(T.m, T.n)) * hs
    if hs == 0.0:
        w = Witness(k=1, x=np.zeros((T.m, T.n), dtype=complex), value=0.0)
        return 0.0, 0.0, w, 0
    if min(T.m, T.n) == 1:
        lower, w, sweeps = _rank_one_witness(T, 1)
    else:
        lower, w, sweeps = amplified_norm_lower(T, 1, options)
    _, u, v = svd(apply_amplified(T, 1, w.x))
    zeta, eta = u[:, 0], v[:, 0]
    tgm_val = tgm_lower_bound(T, zeta, eta)
    A_conj = T.stacked().conj()
    for _ in range(500):
        # the pair certifies more than the iterate achieves only when the
        # ascent stalled short of its fixed point; polish until they agree
        if tgm_val - lower <= 1e-6:
            break
        x = polar_factor(_assemble_g(A_conj, 1, zeta, eta))
        s, u, v = svd(apply_amplified(T, 1, x))
        val = float(s[0])
        sweeps += 1
        if val > lower:
            lower, w = val, Witness(k=1, x=x, value=val)
        zeta, eta = u[:, 0], v[:, 0]
        tgm_val = tgm_lower_bound(T, zeta, eta)
    if abs(tgm_val - lower) > 1e-6:
        raise ArithmeticError(
            f"tracial-geometric-mean cross-check failed: {tgm_val!r} vs engine {lower!r}"
        )
    return lower, float(upper), w, sweeps


def _cb_norm(T, options=None, extra_starts=()):
    options = options or EngineOptions()
    hs = hs_norm(T)
    k = min(T.m, T.n)
    upper = min(np.sqrt(min(T.m * T.m, T.n)) * hs, row_concat_norm(T))
    if hs == 0.0:
        w = Witness(k=k, x=np.zeros((k * T.m, T.n), dtype=complex), value=0.0)
        return 0.0, 0.0, w, 0
    if k == 1:
        lower, w, sweeps = _rank_one_witness(T, 1)
    else:
        lower, w, sweeps = amplified_norm_lower(T, k, options, extra_starts=extra_starts)
    return lower, float(upper), w, sweeps


def op_norm(T, options=None):
    """(lower, upper, witness) for the operator norm.

    lower is witness-backed; upper is sqrt(min(m,n)) * hs.  The engine's
    extremal pair is cross-checked against the tracial-geometric-mean
    lower bound, which agrees with the engine value at any fixed point.
    """
    lower, upper, w, _ = _op_norm(T, options)
    return lower, upper, w


def cb_norm(T, options=None, extra_starts=()):
    """(lower, upper, witness) for the completely bounded norm.

    lower is the engine value at amplification level k = min(m,n); upper is
    min(sqrt(min(m^2,n)) * hs, ||[a_1 ... a_n]||) -- the second bound is
    valid because the canonical representation has ||b|| = 1.
    """
    lower, upper, w, _ = _cb_norm(T, options, extra_starts)
    return lower, upper, w


def norm_report(T, options=None, certified_op=None, cb_extra_starts=()):
    """Full report: hs, op and cb bounds, witnesses, and the certified
    cb/op ratio lower bound.

    ratio_lower divides cb_lower by the best certified upper bound for the
    operator norm, so it is always a valid lower bound for C(m,n); pass
    certified_op when an exact operator norm is known from elsewhere.
    """
    options = options or EngineOptions()
    hs = hs_norm(T)
    op_lower, op_upper, op_w, it1 = _op_norm(T, options)
    extra = list(cb_extra_starts)
    k = min(T.m, T.n)
    if hs > 0.0 and k > 1:
        pad = np.zeros((k * T.m, T.n), dtype=complex)
        pad[: T.m] = op_w.x
        extra.insert(0, pad)
    cb_lower, cb_upper, cb_w, it2 = _cb_norm(T, options, extra_starts=extra)
    best = op_upper
    cs = right_mult_coeff(T)
    if cs is not None:
        best = min(best, max(cs))
    if certified_op is not None:
        best = min(best, float(certified_op))
    ratio = cb_lower / best if best > 0 else 0.0
    return NormReport(
        m=T.m,
        n=T.n,
        hs=hs,
        op_lower=op_lower,
        op_upper=op_upper,
        op_upper_best=float(best),
        cb_lower=cb_lower,
        cb_upper=cb_upper,
        ratio_lower=float(ratio),
        op_witness=op_w,
        cb_witness=cb_w,
        restarts=options.restarts,
        seed=options.seed,
        iterations=it1 + it2,
    )


def amplification_profile(T, options=None, k_max=None):
    """Engine values for k = 1..k_max with warm starts cascaded upward,
    so the sequence is nondecreasing by construction."""
    options = options or EngineOptions()
    k_max = k_max or min(T.m, T.n)
    vals = []
    warm = None
    for k in range(1, k_max + 1):
        extra = ()
        if warm is not None:
            pad = np.zeros((k * T.m, T.n), dtype=complex)
            pad[: (k - 1) * T.m] = warm
            extra = (pad,)
        val, w, _ = amplified_norm_lower(T, k, options, extra_starts=extra)
        vals.append(val)
        warm = w.x
    return vals
