import json

import numpy as np
import pytest

from cbnorm.constructions import example_2x3, example_2x4, thm_eg_map
from cbnorm.modmap import (
    MapFileError,
    MapParseError,
    MapSchemaError,
    RightModuleMap,
    Witness,
    apply,
    apply_amplified,
    compress_map,
    embed,
    load_map,
    map_from_dict,
    map_to_dict,
    save_map,
    tensor,
    truncate,
    witness_value,
)


def _random_map(rng, m, n):
    return RightModuleMap(
        [rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)) for _ in range(n)]
    )


def test_constructor_validation():
    with pytest.raises(ValueError):
        RightModuleMap([])
    with pytest.raises(ValueError):
        RightModuleMap([np.zeros((2, 3))])
    with pytest.raises(ValueError):
        RightModuleMap([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        RightModuleMap([np.array([[np.nan, 0], [0, 1]])])


def test_apply_displayed_action():
    # the 2x3 map sends [[a,c,e],[b,d,f]] to [[a,c,f],[b,-d,e]]
    T = example_2x3().map
    x = np.array([[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])
    expected = np.array([[1.0, 3.0, 6.0], [2.0, -4.0, 5.0]])
    assert np.array_equal(apply(T, x), expected)


def test_apply_identity_and_shape_check():
    T = RightModuleMap([np.eye(2)] * 3)
    x = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(apply(T, x), x)
    with pytest.raises(ValueError):
        apply(T, np.zeros((3, 3)))


def test_right_modularity():
    rng = np.random.default_rng(0)
    for _ in range(200):
        m, n = rng.integers(1, 5), rng.integers(1, 5)
        T = _random_map(rng, m, n)
        x = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        d = np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        assert np.linalg.norm(apply(T, x @ d) - apply(T, x) @ d) < 1e-12


def test_amplified_reduces_to_apply_and_blockwise():
    rng = np.random.default_rng(1)
    T = _random_map(rng, 3, 4)
    x = rng.standard_normal((3, 4))
    assert np.allclose(apply_amplified(T, 1, x), apply(T, x))
    blocks = [rng.standard_normal((3, 4)) for _ in range(3)]
    stacked = np.vstack(blocks)
    out = apply_amplified(T, 3, stacked)
    for i, blk in enumerate(blocks):
        assert np.allclose(out[3 * i : 3 * i + 3], apply(T, blk))


def test_amplified_witness_image_2x3():
    # T_{2,1} of the recorded cb witness is the rank-one all-ones pattern
    c = example_2x3()
    w = c.witness(2)
    img = apply_amplified(c.map, 2, w.x)
    expected = np.array(
        [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]
    ) / np.sqrt(2)
    assert np.linalg.norm(img - expected) < 1e-15


def test_amplified_witness_value_2x4():
    c = example_2x4()
    w = c.witness(2)
    assert abs(witness_value(c.map, w) - 2.0) < 1e-12


def test_embed_and_truncate():
    rng = np.random.default_rng(2)
    T = _random_map(rng, 2, 3)
    E = embed(T, 4, 5)
    assert (E.m, E.n) == (4, 5)
    assert np.array_equal(E.columns[0][:2, :2], T.columns[0])
    assert np.all(E.columns[3] == 0) and np.all(E.columns[4] == 0)
    back = truncate(embed(T, 2, 5), 3)
    for a, b in zip(back.columns, T.columns):
        assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        embed(T, 1, 3)
    with pytest.raises(ValueError):
        truncate(T, 0)
    with pytest.raises(ValueError):
        truncate(T, 4)


def test_truncate_thm_eg_matches_2x3():
    S = truncate(thm_eg_map(2).map, 3)
    R = example_2x3().map
    for a, b in zip(S.columns, R.columns):
        assert np.array_equal(a, b)


def test_compress_map():
    rng = np.random.default_rng(3)
    T = _random_map(rng, 3, 2)
    full = compress_map(T, list(np.eye(3)))
    for a, b in zip(full.columns, T.columns):
        assert np.allclose(a, b)
    one = compress_map(T, [np.eye(3)[:, 0]])
    for a, col in zip(one.columns, T.columns):
        assert a.shape == (1, 1)
        assert abs(a[0, 0] - col[0, 0]) < 1e-14
    with pytest.raises(ValueError):
        compress_map(T, [np.ones(3), np.ones(3)])


def test_tensor_index_convention():
    # column (j-1)*n_S + i of tensor(T, S) is kron(a_j, b_i)
    rng = np.random.default_rng(4)
    T = _random_map(rng, 2, 3)
    S = _random_map(rng, 2, 2)
    P = tensor(T, S)
    assert (P.m, P.n) == (4, 6)
    for j in range(3):
        for i in range(2):
            assert np.allclose(P.columns[j * 2 + i], np.kron(T.columns[j], S.columns[i]))


def test_tensor_acts_as_kron_on_kron():
    rng = np.random.default_rng(5)
    T = _random_map(rng, 2, 3)
    S = _random_map(rng, 3, 2)
    x = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    y = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    lhs = apply(tensor(T, S), np.kron(x, y))
    rhs = np.kron(apply(T, x), apply(S, y))
    assert np.linalg.norm(lhs - rhs) < 1e-10


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    T = _random_map(rng, 3, 4)
    p = tmp_path / "map.json"
    save_map(T, p)
    back = load_map(p)
    for a, b in zip(back.columns, T.columns):
        assert np.array_equal(a, b)


def test_load_map_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("")
    with pytest.raises(MapParseError):
        load_map(bad)
    bad.write_text("{ not json }")
    with pytest.raises(MapParseError) as e:
        load_map(bad)
    assert "line 1" in str(e.value)

    d = map_to_dict(example_2x3().map)
    d["n"] = 2
    bad.write_text(json.dumps(d))
    with pytest.raises(MapSchemaError):
        load_map(bad)

    d = map_to_dict(example_2x3().map)
    d["columns"][0][0][0] = [1.0]  # not a [re, im] pair
    bad.write_text(json.dumps(d))
    with pytest.raises(MapSchemaError) as e:
        load_map(bad)
    assert "columns[0]" in str(e.value)

    assert issubclass(MapParseError, MapFileError)
    assert issubclass(MapSchemaError, MapFileError)
    assert issubclass(MapFileError, ValueError)


def test_map_dict_round_trip():
    T = example_2x4().map
    back = map_from_dict(map_to_dict(T))
    for a, b in zip(back.columns, T.columns):
        assert np.array_equal(a, b)


def test_witness_serialization():
    w = example_2x3().witness(2)
    back = Witness.from_dict(w.to_dict())
    assert back.k == w.k
    assert np.array_equal(back.x, w.x)
    assert back.value == w.value
