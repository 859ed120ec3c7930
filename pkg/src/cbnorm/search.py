"""Search of the structured map classes P(m,n) (permutation columns) and
U(m,n) (unitary columns) for large cb/op ratios.

Ratios are always quoted against a certified operator-norm upper bound,
so every record is a true lower bound for C(m,n); records carry their
witness and can be re-verified without trusting the search path.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .linalg import haar_unitary, op_norm_matrix, polar_factor
from .modmap import RightModuleMap, Witness, apply_amplified, map_from_dict, map_to_dict, tensor
from .norms import EngineOptions, NormReport, _ascend, amplified_norm_lower, norm_report
from .constructions import perm_unitary


class CapExceeded(RuntimeError):
    def __init__(self, message, required):
        super().__init__(message)
        self.required = required


@dataclass
class SearchRecord:
    class_tag: str
    m: int
    n: int
    map: RightModuleMap
    report: NormReport
    ratio_lower: float
    seed: int
    iterations: int
    shard: int
    heuristic_denominator: bool

    def to_dict(self):
        return {
            "class_tag": self.class_tag,
            "m": self.m,
            "n": self.n,
            "map": map_to_dict(self.map),
            "report": self.report.to_dict(),
            "ratio_lower": self.ratio_lower,
            "seed": self.seed,
            "iterations": self.iterations,
            "shard": self.shard,
            "heuristic_denominator": self.heuristic_denominator,
        }

    @staticmethod
    def from_dict(d):
        return SearchRecord(
            class_tag=d["class_tag"],
            m=int(d["m"]),
            n=int(d["n"]),
            map=map_from_dict(d["map"]),
            report=NormReport.from_dict(d["report"]),
            ratio_lower=float(d["ratio_lower"]),
            seed=int(d["seed"]),
            iterations=int(d["iterations"]),
            shard=int(d["shard"]),
            heuristic_denominator=bool(d["heuristic_denominator"]),
        )


def _record(class_tag, T, report, seed, iterations, shard):
    return SearchRecord(
        class_tag=class_tag,
        m=T.m,
        n=T.n,
        map=T,
        report=report,
        ratio_lower=report.ratio_lower,
        seed=seed,
        iterations=iterations,
        shard=shard,
        heuristic_denominator=bool(report.op_upper_best - report.op_lower > 1e-6),
    )


def best_record(records):
    """Deterministic reduction: max ratio, ties by the lexicographically
    smallest serialized map."""
    best = None
    for r in records:
        if best is None or r.ratio_lower > best.ratio_lower:
            best = r
        elif r.ratio_lower == best.ratio_lower:
            if json.dumps(map_to_dict(r.map), sort_keys=True) < json.dumps(map_to_dict(best.map), sort_keys=True):
                best = r
    return best


# ---------------------------------------------------------------- P(m,n)

def _compose(p, q):
    return tuple(p[q[i]] for i in range(len(p)))


def _inverse(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def _canonical(tup, perms_m, perms_n):
    """Lexicographically minimal representative of a normalized tuple
    (first entry the identity) under simultaneous conjugation and column
    reordering followed by re-normalization."""
    best = None
    for sigma in perms_n:
        reordered = [tup[sigma[i]] for i in range(len(tup))]
        lead_inv = _inverse(reordered[0])
        renorm = [_compose(lead_inv, p) for p in reordered]
        for beta in perms_m:
            beta_inv = _inverse(beta)
            cand = tuple(_compose(beta, _compose(p, beta_inv)) for p in renorm)
            if best is None or cand < best:
                best = cand
    return best


def enumerate_perm_class(m, n, normalize=True, cap=10**6):
    """Maps with permutation column operators, first column the identity.

    With normalize set, yields one representative per equivalence class
    modulo simultaneous S_m-conjugation and column reordering; otherwise
    the raw product.  Raises CapExceeded when the underlying product
    m!^(n-1) is larger than cap.
    """
    perms_m = list(itertools.permutations(range(m)))
    count = len(perms_m) ** (n - 1)
    if count > cap:
        raise CapExceeded(
            f"enumeration needs {count} tuples, above the cap {cap}", required=count
        )
    ident = tuple(range(m))
    perms_n = list(itertools.permutations(range(n)))
    for rest in itertools.product(perms_m, repeat=n - 1):
        tup = (ident,) + rest
        if normalize:
            if _canonical(tup, perms_m, perms_n) != tup:
                continue
        yield RightModuleMap([perm_unitary([v + 1 for v in p]) for p in tup])


def run_perm_search(m, n, options=None, normalize=True, cap=10**6, skip_shards=()):
    """Evaluate every enumerated permutation-column map; shard index is the
    enumeration position."""
    options = options or EngineOptions()
    skip = set(skip_shards)
    records = []
    for shard, T in enumerate(enumerate_perm_class(m, n, normalize=normalize, cap=cap)):
        if shard in skip:
            continue
        rep = norm_report(T, options)
        records.append(_record("perm", T, rep, options.seed, rep.iterations, shard))
    return records


# ---------------------------------------------------------------- U(m,n)

def _column_polar_update(cols, k, x):
    """For a fixed witness the best unitary for each column is the polar
    factor of the linearized objective; one pass is monotone in the value."""
    m = cols[0].shape[0]
    n = len(cols)
    y = apply_amplified(RightModuleMap(cols), k, x)
    u, s, vh = np.linalg.svd(y, full_matrices=False)
    zeta = u[:, 0].reshape(k, m)
    eta = vh[0, :].conj()
    xr = x.reshape(k, m, n)
    new = []
    for j in range(n):
        c = np.zeros((m, m), dtype=complex)
        for b in range(k):
            c += eta[j] * np.outer(xr[b, :, j], zeta[b].conj())
        new.append(polar_factor(c.conj().T))
    return new, float(s[0])


def _alt_ascent(cols, k, x0, outer=200, tol=1e-12):
    """Alternate witness ascent with column polar updates until stationary."""
    T = RightModuleMap(cols)
    val, x, _ = _ascend(T, k, x0, max_iter=60, tol=tol)
    for _ in range(outer):
        new_cols, _ = _column_polar_update(cols, k, x)
        T2 = RightModuleMap(new_cols)
        v2, x2, _ = _ascend(T2, k, x, max_iter=60, tol=tol)
        if v2 <= val * (1.0 + tol):
            break
        cols, val, x = new_cols, v2, x2
    return cols, val, x


def _geodesic(c, eps, rng):
    z = rng.standard_normal(c.shape) + 1j * rng.standard_normal(c.shape)
    herm = 1j * (z - z.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    step = (v * np.exp(-1j * eps * w)) @ v.conj().T
    return step @ c


def search_unitary(m, n, iters=2000, restarts=8, seed=0, skip_shards=()):
    """Stochastic search over unitary column tuples.

    Each restart is an independent shard: a Haar start polished by
    alternating ascent, then geodesic perturbations exp(eps A) with
    skew-Hermitian Gaussian A, accepted when the value improves; eps is
    halved on rejection with floor 1e-4.  Deterministic per seed.
    Returns all shard records; reduce with best_record.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    k = min(m, n)
    skip = set(skip_shards)
    budget = max(1, iters // max(1, restarts))
    records = []
    for shard in range(restarts):
        if shard in skip:
            continue
        rng = np.random.default_rng([seed, shard])
        cols = [haar_unitary(m, rng) for _ in range(n)]
        z = rng.standard_normal((k * m, n)) + 1j * rng.standard_normal((k * m, n))
        cols, val, x = _alt_ascent(cols, k, polar_factor(z))
        eps = 0.3
        for _ in range(budget):
            cand = [_geodesic(c, eps, rng) for c in cols]
            v2, x2, _ = _ascend(RightModuleMap(cand), k, x, max_iter=40, tol=1e-12)
            if v2 > val:
                cols, val, x = _alt_ascent(cand, k, x2)
            else:
                eps = max(eps / 2, 1e-4)
        T = RightModuleMap(cols)
        rep = norm_report(T, EngineOptions(restarts=8, seed=seed), cb_extra_starts=(x,))
        records.append(_record("unitary", T, rep, seed, iters, shard))
    return records


# ------------------------------------------------------------- refinement

def refine_witness(T, start, restarts=32, seed=0):
    """Run the engine seeded at `start` plus fresh restarts; the returned
    witness value never drops below the start's."""
    options = EngineOptions(restarts=restarts, seed=seed)
    _, w, _ = amplified_norm_lower(T, start.k, options, extra_starts=(start.x,))
    return w


def _kron_witness(w1, n1, w2, n2):
    # rows of kron(x1, x2) are ordered (copy1, base1, copy2, base2); the
    # tensor map's amplification wants (copy1, copy2, base1, base2)
    m1 = w1.x.shape[0] // w1.k
    m2 = w2.x.shape[0] // w2.k
    big = np.kron(w1.x, w2.x)
    big = big.reshape(w1.k, m1, w2.k, m2, n1 * n2).transpose(0, 2, 1, 3, 4)
    x = big.reshape(w1.k * w2.k * m1 * m2, n1 * n2)
    return Witness(k=w1.k * w2.k, x=x, value=w1.value * w2.value)


def tensor_power_ratio(T, k_max, options=None, cap=10**6, tol=1e-9):
    """Certified ratio lower bounds for the tensor powers T, T(x)T, ...

    Each power's engine is seeded with the Kronecker product of the
    previous witnesses, so ratio(k) >= ratio(1)^k - tol holds by
    construction; a violation raises ArithmeticError.
    """
    options = options or EngineOptions()
    rep1 = norm_report(T, options)
    out = [(1, rep1.ratio_lower)]
    power = T
    w = rep1.cb_witness
    for k in range(2, k_max + 1):
        if (T.m**k) * (T.n**k) > cap:
            raise CapExceeded(
                f"power {k} has {(T.m ** k) * (T.n ** k)} entries, above the cap {cap}",
                required=(T.m**k) * (T.n**k),
            )
        power = tensor(power, T)
        w = _kron_witness(w, T.n ** (k - 1), rep1.cb_witness, T.n)
        rep = norm_report(power, options, cb_extra_starts=(w.x,))
        out.append((k, rep.ratio_lower))
        if rep.ratio_lower < rep1.ratio_lower**k - tol:
            raise ArithmeticError(
                f"power {k} ratio {rep.ratio_lower!r} below {rep1.ratio_lower!r}^{k}"
            )
        w = rep.cb_witness
    return out


# ------------------------------------------------------------ persistence

def records_to_jsonl(records):
    return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records)


def read_jsonl(path):
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(SearchRecord.from_dict(json.loads(line)))
    return records
