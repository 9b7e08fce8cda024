import json
from itertools import product

import pytest
from hypothesis import given, strategies as st

from sigmaquiver import paths
from sigmaquiver.dynkin import build_dynkin
from sigmaquiver.paths import (
    build_hom_table,
    build_pairing,
    dump_paths_json,
    paths_between,
    relation_elements,
    sigma_path,
)

TABLES = {d: build_hom_table(d) for d in (1, 2, 3)}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_hom_dims_are_type_a_preprojective(d):
    t = TABLES[d]
    n = 2 * d - 1
    for i, j in product(range(1, n + 1), repeat=2):
        assert t.dim(i, j) == min(i, j, n + 1 - i, n + 1 - j)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_long_path_reaches_sigma(d):
    t = TABLES[d]
    dyn = t.dynkin
    for i in dyn.vertices:
        p = t.long_path(i)
        assert p[0] == i and p[-1] == dyn.sigma(i) and len(p) == 2 * d - 1


@pytest.mark.parametrize("d", [2, 3])
def test_relations_reduce_to_zero(d):
    t = TABLES[d]
    dyn = t.dynkin
    for i, j in product(dyn.vertices, repeat=2):
        for length in range(2, 2 * d - 1):
            for elem in relation_elements(dyn, i, j, length):
                assert not t.reduce_vector(elem).any()


def test_paths_between_small():
    dyn = build_dynkin(2)
    assert paths_between(dyn, 1, 1, 2) == [(1, 2, 1)]
    assert sorted(paths_between(dyn, 2, 2, 2)) == [(2, 1, 2), (2, 3, 2)]
    assert paths_between(dyn, 1, 3, 1) == []


@st.composite
def composable(draw):
    d = draw(st.sampled_from([2, 3]))
    dyn = TABLES[d].dynkin
    walk = [draw(st.sampled_from(list(dyn.vertices)))]
    for _ in range(draw(st.integers(0, 2 * d))):
        walk.append(draw(st.sampled_from(dyn.neighbors(walk[-1]))))
    cuts = sorted(draw(st.lists(st.integers(0, len(walk) - 1), min_size=2, max_size=2)))
    return d, tuple(walk), cuts


@given(composable())
def test_reduction_is_multiplicative(case):
    d, walk, (a, b) = case
    t = TABLES[d]
    # reducing a path equals composing the reductions of its pieces
    h, p = walk[: a + 1], walk[a:]
    whole = t.reduce(walk)
    hv, pv = t.reduce(h), t.reduce(p)
    if not hv or not pv:
        assert not whole
        return
    lhs = t.compose(pv, hv, walk[a], walk[-1], walk[0])
    assert lhs == {k: v for k, v in sorted(whole.items()) if v}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_pairing_nondegenerate_and_sigma_compatible(d):
    t = TABLES[d]
    pr = build_pairing(t)
    for (i, j), m in pr.B.items():
        assert m.shape == (t.dim(i, j), t.dim(t.dynkin.sigma(i), j))
    for k, inv in pr.inverse_transpose.items():
        assert inv.shape == pr.B[k].shape
    p = (1, 2, 3)
    assert sigma_path(build_dynkin(2), p) == (3, 2, 1)


def test_dump_is_deterministic():
    a = dump_paths_json(build_hom_table(2), build_pairing(build_hom_table(2)))
    b = dump_paths_json(TABLES[2], build_pairing(TABLES[2]))
    assert a == b
    assert json.loads(a)["long_path"]["1"] == [1, 2, 3]


def test_corrupted_sign_is_caught(monkeypatch):
    monkeypatch.setattr(paths.FramedQuiver, "sign", lambda self, i, j: 1 if j == i + 1 else 0)
    with pytest.raises(AssertionError):
        build_hom_table(2)
