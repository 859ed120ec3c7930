import numpy as np
import pytest

from cbnorm.constructions import (
    by_name,
    clock,
    example_2x3,
    example_2x4,
    p34_example,
    perm_unitary,
    shift,
    thm_eg_map,
    truncation_example,
)
from cbnorm.modmap import apply_amplified
from cbnorm.norms import EngineOptions, cb_norm, hs_norm, op_norm

FAST = EngineOptions(restarts=8, seed=0)


def _amp_sv(T, w):
    return np.linalg.svd(apply_amplified(T, w.k, w.x), compute_uv=False)[0]


def test_clock_shift_small():
    assert np.array_equal(clock(1), np.array([[1.0 + 0j]]))
    assert np.array_equal(shift(1), np.array([[1.0 + 0j]]))
    assert np.allclose(clock(2), np.diag([1.0, -1.0]))
    assert np.allclose(shift(2), np.array([[0, 1], [1, 0]]))


def test_clock_shift_order_and_commutation():
    for m in (2, 3, 5):
        g, h = clock(m), shift(m)
        assert np.allclose(np.linalg.matrix_power(g, m), np.eye(m), atol=1e-12)
        assert np.allclose(np.linalg.matrix_power(h, m), np.eye(m), atol=1e-12)
        w = np.exp(2j * np.pi / m)
        assert np.allclose(h @ g, w.conjugate() * g @ h, atol=1e-12)
        assert np.allclose(g.conj().T @ g, np.eye(m), atol=1e-12)
        assert np.allclose(h.conj().T @ h, np.eye(m), atol=1e-12)


def test_example_2x3_certificate():
    c = example_2x3()
    assert (c.map.m, c.map.n) == (2, 3)
    assert hs_norm(c.map) == pytest.approx(1.0, abs=1e-12)
    assert c.expected.op == np.sqrt(2)
    assert c.expected.cb == np.sqrt(3)
    assert _amp_sv(c.map, c.witness(1)) == pytest.approx(np.sqrt(2), abs=1e-12)
    assert _amp_sv(c.map, c.witness(2)) == pytest.approx(np.sqrt(3), abs=1e-12)
    lo, up, _ = op_norm(c.map, FAST)
    assert lo == pytest.approx(np.sqrt(2), abs=1e-9)
    assert up >= np.sqrt(2) - 1e-9
    lo, up, _ = cb_norm(c.map, FAST)
    assert lo == pytest.approx(np.sqrt(3), abs=1e-9)
    assert up <= np.sqrt(3) + 1e-9


def test_example_2x4_achieves_two():
    c = example_2x4()
    assert (c.map.m, c.map.n) == (2, 4)
    assert hs_norm(c.map) == pytest.approx(1.0, abs=1e-12)
    assert _amp_sv(c.map, c.witness(2)) == pytest.approx(2.0, abs=1e-12)
    lo, _, _ = op_norm(c.map, FAST)
    assert lo == pytest.approx(np.sqrt(2), abs=1e-9)
    assert c.witness(2).value == pytest.approx(2.0, abs=1e-12)


def test_thm_eg_map_matches_2x4_at_m2():
    c = thm_eg_map(2)
    base = example_2x4()
    assert all(
        np.array_equal(a, b) for a, b in zip(c.map.columns, base.map.columns)
    )


def test_thm_eg_map_witness_structure():
    for m in (2, 3):
        c = thm_eg_map(m)
        assert (c.map.m, c.map.n) == (m, m * m)
        x = c.witness(m).x
        assert x.shape == (m * m, m * m)
        # stacked witness has orthogonal rows of equal length
        gram = x @ x.conj().T
        scale = np.trace(gram).real / (m * m)
        assert np.max(np.abs(gram - scale * np.eye(m * m))) < 1e-10
        assert np.linalg.norm(x, 2) <= 1 + 1e-12
        assert c.witness(m).value == pytest.approx(float(m), abs=1e-12)
        assert c.witness(1).value == pytest.approx(np.sqrt(m), abs=1e-12)


def test_thm_eg_map_norms():
    for m in (2, 3):
        c = thm_eg_map(m)
        assert hs_norm(c.map) == pytest.approx(1.0, abs=1e-12)
        lo, up, _ = op_norm(c.map, FAST)
        assert lo == pytest.approx(np.sqrt(m), abs=1e-8)
        assert up <= np.sqrt(m) + 1e-8
        lo, up, _ = cb_norm(c.map, FAST)
        assert lo == pytest.approx(float(m), abs=1e-8)
        assert up <= m + 1e-8
    with pytest.raises(ValueError):
        thm_eg_map(1)


def test_perm_unitary():
    assert np.array_equal(perm_unitary((1, 2, 3)), np.eye(3))
    assert np.allclose(perm_unitary((2, 1)), [[0, 1], [1, 0]])
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = int(rng.integers(2, 6))
        alpha = [int(v) for v in rng.permutation(d) + 1]
        beta = [int(v) for v in rng.permutation(d) + 1]
        ua, ub = perm_unitary(alpha), perm_unitary(beta)
        comp = [alpha[beta[i] - 1] for i in range(d)]
        assert np.array_equal(ua @ ub, perm_unitary(comp))
    with pytest.raises(ValueError):
        perm_unitary((1, 1, 2))


def test_p34_certificate():
    c = p34_example()
    assert (c.map.m, c.map.n) == (3, 4)
    for a in c.map.columns:
        assert set(np.unique(np.abs(a))) <= {0.0, 1.0}
    assert hs_norm(c.map) == pytest.approx(1.0, abs=1e-12)
    w1 = c.witness(1)
    assert np.linalg.norm(w1.x, 2) <= 1 + 1e-12
    assert w1.value == pytest.approx(np.sqrt(3), abs=1e-12)
    lo, up, _ = op_norm(c.map, FAST)
    assert lo == pytest.approx(np.sqrt(3), abs=1e-9)
    assert up >= np.sqrt(3) - 1e-9

    w2 = c.witness(2)
    assert np.linalg.norm(w2.x, 2) <= 1 + 1e-10
    cbv = _amp_sv(c.map, w2)
    assert cbv == pytest.approx(1.866214757558, abs=1e-9)
    assert cbv / np.sqrt(3) > 1.0774


def test_truncation_example_values():
    for m, n in ((2, 3), (3, 5), (3, 9)):
        c = truncation_example(m, n)
        assert (c.map.m, c.map.n) == (m, n)
        assert hs_norm(c.map) == pytest.approx(1.0, abs=1e-12)
        w = c.witness(m)
        assert _amp_sv(c.map, w) == pytest.approx(np.sqrt(n), abs=1e-9)
        assert w.value == pytest.approx(np.sqrt(n), abs=1e-12)
    with pytest.raises(ValueError):
        truncation_example(2, 0)
    with pytest.raises(ValueError):
        truncation_example(2, 5)


def test_by_name_dispatch():
    for name in ("2x3", "2x4", "msq:2", "msq:3", "p34", "trunc:2:3", "trunc:3:7"):
        c = by_name(name)
        assert c.name == name or name in ("p34",)
        assert c.map.m >= 1
    assert by_name("2x3").map.n == 3
    assert by_name("trunc:3:7").map.n == 7
    with pytest.raises(KeyError):
        by_name("nope")
