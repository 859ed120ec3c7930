"""Named verification cases: each reproduces a known value or property
and reports per-check pass/fail.

Equalities are always asserted two-sided: the witness-backed lower bound
must reach the target and the closed-form upper bound must not exceed it,
so no check trusts the optimizer alone.
"""

from dataclasses import dataclass, field

import numpy as np

from .bounds import bounds_table, c_bounds, check_map_inequalities
from .constructions import example_2x3, example_2x4, p34_example, thm_eg_map, truncation_example
from .linalg import op_norm_matrix
from .modmap import MapFileError, RightModuleMap, load_map, witness_value
from .norms import EngineOptions, amplified_norm_lower, norm_report
from .search import refine_witness


@dataclass
class Check:
    description: str
    target: float
    achieved: float
    tolerance: float
    direction: str  # "abs", "ge" or "le"
    passed: bool

    def to_dict(self):
        return {
            "description": self.description,
            "target": self.target,
            "achieved": self.achieved,
            "tolerance": self.tolerance,
            "direction": self.direction,
            "passed": self.passed,
        }


@dataclass
class VerifyCase:
    name: str
    checks: list = field(default_factory=list)

    @property
    def all_pass(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "name": self.name,
            "checks": [c.to_dict() for c in self.checks],
            "all_pass": self.all_pass,
        }


class UnknownCaseError(KeyError):
    pass


def _abs(desc, target, achieved, tol):
    target, achieved = float(target), float(achieved)
    return Check(desc, target, achieved, tol, "abs", abs(achieved - target) <= tol)


def _ge(desc, target, achieved, tol=0.0):
    target, achieved = float(target), float(achieved)
    return Check(desc, target, achieved, tol, "ge", achieved >= target - tol)


def _le(desc, target, achieved, tol=0.0):
    target, achieved = float(target), float(achieved)
    return Check(desc, target, achieved, tol, "le", achieved <= target + tol)


def _witness_checks(construction, checks):
    for w in construction.witnesses:
        revalue = witness_value(construction.map, w)
        checks.append(_abs(f"witness k={w.k} value re-evaluates", w.value, revalue, 1e-9))
        checks.append(_le(f"witness k={w.k} stays in the unit ball", 1.0, op_norm_matrix(w.x), 1e-9))


def _report_for(construction, options):
    cb_w = construction.witness(min(construction.map.m, construction.map.n))
    seeds = (cb_w.x,) if cb_w is not None else ()
    return norm_report(construction.map, options, cb_extra_starts=seeds)


def _equality_checks(name, construction, rep, tol, checks):
    e = construction.expected
    if e.hs is not None:
        checks.append(_abs(f"{name}: hs", e.hs, rep.hs, tol))
    if e.op is not None:
        checks.append(_ge(f"{name}: op lower reaches target", e.op, rep.op_lower, tol))
        checks.append(_le(f"{name}: op upper meets target", e.op, rep.op_upper, tol))
    if e.cb is not None:
        checks.append(_ge(f"{name}: cb lower reaches target", e.cb, rep.cb_lower, tol))
        checks.append(_le(f"{name}: cb upper meets target", e.cb, rep.cb_upper, tol))


def case_2x3(tol=1e-6, options=None):
    options = options or EngineOptions()
    c = example_2x3()
    rep = _report_for(c, options)
    checks = []
    _equality_checks("2x3", c, rep, tol, checks)
    checks.append(_ge("2x3: ratio lower bound", np.sqrt(1.5), rep.ratio_lower, tol))
    _witness_checks(c, checks)
    return VerifyCase("2x3", checks)


def case_2x4(tol=1e-6, options=None):
    options = options or EngineOptions()
    c = example_2x4()
    rep = _report_for(c, options)
    checks = []
    _equality_checks("2x4", c, rep, tol, checks)
    checks.append(_ge("2x4: ratio lower bound", np.sqrt(2), rep.ratio_lower, tol))
    _witness_checks(c, checks)
    return VerifyCase("2x4", checks)


def case_msq(m, tol=1e-6, options=None):
    options = options or EngineOptions()
    c = thm_eg_map(m)
    rep = _report_for(c, options)
    checks = []
    _equality_checks(f"msq:{m}", c, rep, tol, checks)

    # the defining identities a_j v_j^i = e_i, at machine precision
    x = c.witness(m).x * np.sqrt(m)
    worst = 0.0
    for j, a in enumerate(c.map.columns):
        for i in range(m):
            v = x[i * m : (i + 1) * m, j]
            err = np.max(np.abs(a @ v - np.eye(m)[:, i]))
            worst = max(worst, float(err))
    checks.append(_le(f"msq:{m}: a_j v_j^i = e_i", 0.0, worst, 1e-15))

    gram = x @ x.conj().T
    row_err = float(np.max(np.abs(gram - m * np.eye(m * m))))
    checks.append(_le(f"msq:{m}: witness rows orthogonal, norm sqrt(m)", 0.0, row_err, 1e-10))

    if m >= 2:
        val, _, _ = amplified_norm_lower(c.map, m - 1, options)
        checks.append(
            _le(
                f"msq:{m}: level m-1 value at most sqrt(m-1) op",
                np.sqrt(m - 1) * rep.op_upper,
                val,
                1e-6,
            )
        )
    _witness_checks(c, checks)
    return VerifyCase(f"msq:{m}", checks)


def case_trunc(m, n, tol=1e-6, options=None):
    options = options or EngineOptions()
    c = truncation_example(m, n)
    rep = _report_for(c, options)
    w = c.witnesses[0]
    checks = [
        _ge(f"trunc:{m}:{n}: witness value", np.sqrt(n), w.value, tol),
        _le(f"trunc:{m}:{n}: op upper", np.sqrt(m), rep.op_upper, 1e-9),
        _ge(f"trunc:{m}:{n}: ratio lower bound", np.sqrt(n / m), rep.ratio_lower, 1e-5),
    ]
    _witness_checks(c, checks)
    return VerifyCase(f"trunc:{m}:{n}", checks)


def largest_root_bisect(coeffs, lo, hi, iters=200):
    """Largest real root of a polynomial by bisection on [lo, hi]; the
    bracket must contain exactly the largest root."""

    def p(t):
        v = 0.0
        for coef in coeffs:
            v = v * t + coef
        return v

    a, b = lo, hi
    fa, fb = p(a), p(b)
    if fa * fb > 0:
        raise ValueError("bracket does not straddle a root")
    for _ in range(iters):
        mid = (a + b) / 2
        fm = p(mid)
        if fa * fm <= 0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return (a + b) / 2


def case_p34(tol=1e-6, options=None):
    options = options or EngineOptions()
    c = p34_example()
    rep = _report_for(c, options)
    checks = []
    w = c.witness(2)
    checks.append(_abs("p34: witness has unit norm", 1.0, op_norm_matrix(w.x), 1e-10))
    _equality_checks("p34", c, rep, tol, checks)

    root = largest_root_bisect([18.0, -72.0, 33.0, -2.0], 3.0, 4.0)
    checks.append(_abs("p34: witness value squared is the cubic's largest root", root, w.value**2, 1e-9))

    refined = refine_witness(c.map, w, restarts=options.restarts, seed=options.seed)
    checks.append(_ge("p34: refined ratio", 1.13, refined.value / rep.op_upper, 0.0))
    _witness_checks(c, checks)
    return VerifyCase("p34", checks)


def case_twocol(seeds=100, tol=1e-5, options=None):
    """Random right D_2-module maps have equal op and cb norms."""
    options = options or EngineOptions(restarts=16)
    ms = (2, 3, 4, 5)
    worst = 0.0
    rng = np.random.default_rng(options.seed)
    for i in range(seeds):
        m = ms[i % len(ms)]
        cols = [
            rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)) for _ in range(2)
        ]
        rep = norm_report(RightModuleMap(cols), options)
        worst = max(worst, rep.cb_lower - rep.op_lower)
    check = _le(f"twocol: max cb-op gap over {seeds} maps", 0.0, worst, tol)
    return VerifyCase("twocol", [check])


def case_bounds_sweep():
    checks = []
    b23 = c_bounds(2, 3)
    checks.append(_abs("bounds: C(2,3) exact", np.sqrt(1.5), b23.exact if b23.exact else -1.0, 1e-12))
    b39 = c_bounds(3, 9)
    checks.append(_abs("bounds: C(3,9) exact", np.sqrt(3), b39.exact if b39.exact else -1.0, 1e-12))
    b35 = c_bounds(3, 5)
    checks.append(_abs("bounds: C(3,5) lower", np.sqrt(2), b35.lower, 1e-12))
    checks.append(_abs("bounds: C(3,5) upper", np.sqrt(2.5), b35.upper, 1e-12))
    b53 = c_bounds(5, 3)
    b33 = c_bounds(3, 3)
    checks.append(_abs("bounds: C(5,3) lower matches C(3,3)", b33.lower, b53.lower, 0.0))
    checks.append(_abs("bounds: C(5,3) upper matches C(3,3)", b33.upper, b53.upper, 0.0))

    rows = bounds_table(12, 12)
    table = {(b.m, b.n): b for b in rows}
    violations = 0
    for (m, n), b in table.items():
        for (m2, n2), b2 in table.items():
            if m <= m2 and n <= n2 and b.lower > b2.upper + 1e-12:
                violations += 1
    checks.append(_le("bounds: monotone in the product order (violations)", 0.0, float(violations), 0.0))
    return VerifyCase("bounds-sweep", checks)


def failed_mapfile_case(reason):
    """A verify case that reports an unreadable map file as a failure."""
    return VerifyCase("mapfile", [Check(f"mapfile: {reason}", 0.0, 1.0, 0.0, "abs", False)])


def case_mapfile(path, tol=1e-6, options=None):
    try:
        T = load_map(path)
    except (MapFileError, OSError) as e:
        return failed_mapfile_case(str(e))
    return case_map(T, tol, options)


def case_map(T, tol=1e-6, options=None):
    """Internal-consistency checks on an arbitrary map: report invariants,
    witness re-evaluation, and the general norm inequalities."""
    options = options or EngineOptions()
    checks = []
    rep = norm_report(T, options)
    checks.append(_le("mapfile: hs below op lower", rep.op_lower, rep.hs, 1e-9))
    checks.append(_le("mapfile: op lower below upper", rep.op_upper, rep.op_lower, 2e-9))
    checks.append(_le("mapfile: cb lower below upper", rep.cb_upper, rep.cb_lower, 1e-9))
    for w, label in ((rep.op_witness, "op"), (rep.cb_witness, "cb")):
        checks.append(_abs(f"mapfile: {label} witness re-evaluates", w.value, witness_value(T, w), 1e-9))
    for rule, ok, slack in check_map_inequalities(T, rep, options):
        checks.append(Check(f"mapfile: {rule}", 0.0, float(slack), 1e-8, "ge", bool(ok)))
    return VerifyCase("mapfile", checks)


def run_cases(selector="all", seeds=100, tol=1e-6, map_path=None, map_obj=None, options=None):
    """Resolve a selector to its verification cases and run them."""
    options = options or EngineOptions()
    cases = []
    if selector == "all":
        cases.append(case_2x3(tol, options))
        cases.append(case_2x4(tol, options))
        for m in (2, 3):
            cases.append(case_msq(m, tol, options))
            for n in range(2, m * m + 1):
                cases.append(case_trunc(m, n, tol, options))
        cases.append(case_p34(tol, options))
        cases.append(case_twocol(seeds, options=EngineOptions(restarts=16, seed=options.seed)))
        cases.append(case_bounds_sweep())
    elif selector == "2x3":
        cases.append(case_2x3(tol, options))
    elif selector == "2x4":
        cases.append(case_2x4(tol, options))
    elif selector == "p34":
        cases.append(case_p34(tol, options))
    elif selector == "twocol":
        cases.append(case_twocol(seeds, options=options))
    elif selector == "bounds-sweep":
        cases.append(case_bounds_sweep())
    elif selector.startswith("msq:"):
        cases.append(case_msq(int(selector.split(":")[1]), tol, options))
    elif selector.startswith("trunc:"):
        _, m, n = selector.split(":")
        cases.append(case_trunc(int(m), int(n), tol, options))
    else:
        raise UnknownCaseError(selector)
    if map_path is not None:
        cases.append(case_mapfile(map_path, tol, options))
    if map_obj is not None:
        cases.append(case_map(map_obj, tol, options))
    return cases
