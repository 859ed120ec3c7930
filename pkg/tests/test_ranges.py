import numpy as np
import pytest

from cbnorm.constructions import example_2x3
from cbnorm.norms import EngineOptions, op_norm
from cbnorm.linalg import svd
from cbnorm.modmap import RightModuleMap, apply
from cbnorm.ranges import (
    OperatorTuple,
    q_matrix,
    star_distance,
    tgm,
    tgm_lower_bound,
    wme_diagonal,
    wme_sample,
)


def _units(n):
    return tuple(np.diag((np.arange(n) == p).astype(float)) for p in range(n))


def test_operator_tuple_validation():
    with pytest.raises(ValueError):
        OperatorTuple(())
    with pytest.raises(ValueError):
        OperatorTuple((np.eye(2), np.eye(3)))
    with pytest.raises(ValueError):
        OperatorTuple((np.eye(2),), orientation="diagonal")
    t = OperatorTuple((np.eye(2), np.zeros((2, 2))), "row")
    assert t.star().orientation == "column"
    assert np.array_equal(t.star().entries[0], np.eye(2))


def test_q_matrix_values():
    b = OperatorTuple(_units(3), "column")
    e2 = np.array([0.0, 1.0, 0.0])
    q = q_matrix(b, e2).q
    assert np.allclose(q, np.diag([0.0, 1.0, 0.0]))

    u = OperatorTuple((np.array([[0, 1], [1, 0]], dtype=complex),), "column")
    q = q_matrix(u, np.array([0.6, 0.8])).q
    assert np.allclose(q, [[1.0]])

    b = OperatorTuple((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])), "column")
    q = q_matrix(b, np.array([1.0, 0.0])).q
    assert np.allclose(q, [[1.0, 0.0], [0.0, 0.0]])

    with pytest.raises(ValueError):
        q_matrix(b, np.array([1.0, 1.0]))


def test_q_matrix_psd_and_trace():
    rng = np.random.default_rng(0)
    for _ in range(50):
        entries = tuple(
            rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(4)
        )
        t = OperatorTuple(entries, "column")
        xi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        q = q_matrix(t, xi).q
        assert np.linalg.norm(q - q.conj().T) < 1e-12
        assert np.min(np.linalg.eigvalsh(q)) >= -1e-10
        assert np.trace(q).real == pytest.approx(
            sum(np.linalg.norm(a @ xi) ** 2 for a in entries), abs=1e-10
        )


def test_wme_diagonal_vertices():
    verts = wme_diagonal(OperatorTuple(_units(4), "column"))
    assert len(verts) == 4
    for p, v in enumerate(verts):
        e = np.zeros((4, 4))
        e[p, p] = 1.0
        assert np.allclose(v.q, e)

    b = OperatorTuple((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])), "column")
    verts = wme_diagonal(b)
    assert len(verts) == 1
    assert np.allclose(verts[0].q, [[1.0, 0.0], [0.0, 0.0]])

    verts = wme_diagonal(OperatorTuple((np.eye(3),), "column"))
    assert len(verts) == 3

    with pytest.raises(ValueError):
        wme_diagonal(OperatorTuple((np.ones((2, 2)),), "column"))


def test_wme_diagonal_convexity_identity():
    # on the top eigenspace, Q(b, xi) = sum_p |xi_p|^2 Q(b, e_p)
    rng = np.random.default_rng(1)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        l = int(rng.integers(1, 4))
        weights = rng.random(d)
        top = rng.choice(d, size=max(1, d // 2), replace=False)
        weights[top] = weights.max() + 1.0
        cols = []
        for _ in range(l):
            phases = np.exp(2j * np.pi * rng.random(d))
            cols.append(np.diag(phases * np.sqrt(weights / l)))
        b = OperatorTuple(tuple(cols), "column")
        verts = wme_diagonal(b)
        idx = [int(np.argmax(np.abs(v.xi))) for v in verts]
        xi = np.zeros(d, dtype=complex)
        coeff = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
        coeff /= np.linalg.norm(coeff)
        xi[idx] = coeff
        q = q_matrix(b, xi).q
        mix = sum(abs(c) ** 2 * v.q for c, v in zip(coeff, verts))
        assert np.linalg.norm(q - mix) < 1e-10


def test_wme_sample_constant_cases():
    a = OperatorTuple((np.eye(2), 0.5 * np.eye(2)), "row")
    pts = wme_sample(a, 20, seed=0)
    for p in pts:
        assert np.allclose(p.q, [[1.0, 0.5], [0.5, 0.25]], atol=1e-12)

    rng = np.random.default_rng(2)
    us = tuple(np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0] for _ in range(4))
    pts = wme_sample(OperatorTuple(us, "row"), 10, seed=1)
    for p in pts:
        assert np.trace(p.q).real == pytest.approx(4.0, abs=1e-10)


def test_tgm_identities():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    x = z @ z.conj().T
    assert tgm(x, x) == pytest.approx(np.trace(x).real, abs=1e-8)
    assert tgm(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)

    w = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    y = w @ w.conj().T
    for r in (0.0, 0.3, 1.0):
        assert tgm(r * x, y) == pytest.approx(np.sqrt(r) * tgm(x, y), abs=1e-8)
    u = rng.random(5)
    v = rng.random(5)
    assert tgm(np.diag(u), np.diag(v)) == pytest.approx(np.sum(np.sqrt(u * v)), abs=1e-10)
    assert abs(tgm(x, y) - tgm(y, x)) < 1e-9
    assert tgm(x, y) <= np.sqrt(np.trace(x).real * np.trace(y).real) + 1e-9
    with pytest.raises(ValueError):
        tgm(x, np.eye(3))


def test_tgm_lower_bound_identity_and_sup():
    T = RightModuleMap([np.eye(2)] * 2)
    e1 = np.array([1.0, 0.0])
    assert tgm_lower_bound(T, e1, e1) == pytest.approx(1.0, abs=1e-12)

    rng = np.random.default_rng(4)
    T = RightModuleMap(
        [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(4)]
    )
    lo, up, w = op_norm(T, EngineOptions(restarts=8))
    for _ in range(50):
        xi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        eta = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        eta /= np.linalg.norm(eta)
        assert tgm_lower_bound(T, xi, eta) <= lo + 1e-6


def test_tgm_lower_bound_attains_op_norm():
    T = example_2x3().map
    lo, _, w = op_norm(T, EngineOptions(restarts=8))
    _, u, v = svd(apply(T, w.x))
    assert tgm_lower_bound(T, u[:, 0], v[:, 0]) == pytest.approx(lo, abs=1e-6)
    assert lo == pytest.approx(np.sqrt(2), abs=1e-7)


def test_star_distance_oracles():
    a = OperatorTuple((np.eye(2), 0.5 * np.eye(2)), "row")
    b = OperatorTuple(_units(2), "column")
    assert star_distance(a, b) == pytest.approx(np.sqrt(17 / 32), abs=1e-6)

    s = 3**0.25
    c = example_2x3()
    at = OperatorTuple(tuple(np.asarray(x) / s for x in c.map.columns), "row")
    bt = OperatorTuple(tuple(s * u for u in _units(3)), "column")
    assert star_distance(at, bt, samples=200, seed=0) < 1e-3

    same = OperatorTuple((np.diag([1.0, 0.5]), np.diag([0.25, 0.75])), "column")
    assert star_distance(same, same, samples=50) < 1e-10
