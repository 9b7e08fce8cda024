import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigmaquiver.dynkin import build_dynkin, kan_dim, sigma_vec, weight_of
from sigmaquiver.kan import (
    FrameData,
    build_instance,
    check_relations,
    dump_kan_json,
    evaluation_kernel_trivial,
    full_point,
    is_sigma_fixed,
    is_subrep,
    perp,
    relation_sum,
    zero_point,
)
from sigmaquiver.grassmann import all_strata


@pytest.mark.parametrize(
    "d,w,sigma",
    [(2, (2, 0, 0), False), (2, (0, 2, 0), True), (2, (2, 0, 2), True), (2, (1, 0, 1), False), (3, (2, 0, 0, 0, 2), True)],
)
def test_kan_dims_and_relations(d, w, sigma):
    inst = build_instance(d, w, sigma)
    rep = inst.rep_q
    assert rep.vertex_dims == kan_dim(inst.dynkin, w)
    assert weight_of(inst.dynkin, w, rep.vertex_dims) == tuple(-x for x in sigma_vec(inst.dynkin, w))
    for i in inst.dynkin.vertices:
        assert not relation_sum(rep, i).any()
    for q in (2, 3):
        check_relations(inst.over(q)[0])


def test_frame_validation():
    with pytest.raises(ValueError):
        FrameData((1, 0, 1), sigma_mode=True)
    with pytest.raises(ValueError):
        FrameData((-1, 0, 0))
    with pytest.raises(ValueError):
        FrameData((2, 0, 0), sigma_mode=True, forms={1: np.eye(2, dtype=np.int64)})


def test_whole_space_is_stable_and_fixed():
    inst = build_instance(2, (0, 2, 0), True)
    rep, form = inst.over(3)
    top, bottom = full_point(rep), zero_point(rep)
    assert is_subrep(rep, top) and is_subrep(rep, bottom)
    # the whole of K_R W is costable: evaluation plus outgoing arrows is injective
    assert all(evaluation_kernel_trivial(rep, top, i) for i in rep.dynkin.vertices)
    assert perp(rep, form, top) == bottom and perp(rep, form, bottom) == top
    assert not is_sigma_fixed(rep, form, top)


@pytest.mark.parametrize("w", [(0, 2, 0), (2, 0, 2)])
def test_perp_is_an_involution_on_points(w):
    inst = build_instance(2, w, True)
    rep, form = inst.over(2)
    for st_ in all_strata(rep):
        for pt in st_.points[:50]:
            dual = perp(rep, form, pt)
            assert is_subrep(rep, dual)
            assert perp(rep, form, dual) == pt
            assert dual.dims == tuple(
                rep.dim(i) - pt.dims[rep.dynkin.sigma(i) - 1] for i in rep.dynkin.vertices
            )


@given(st.integers(0, 3), st.integers(0, 3))
def test_kan_dim_linear(a, b):
    dyn = build_dynkin(2)
    assert kan_dim(dyn, (a, 0, b)) == tuple(x + y for x, y in zip(kan_dim(dyn, (a, 0, 0)), kan_dim(dyn, (0, 0, b))))


def test_dump_kan_deterministic():
    a = dump_kan_json(build_instance(2, (0, 2, 0), True))
    b = dump_kan_json(build_instance(2, (0, 2, 0), True))
    assert a == b and '"form_blocks"' in a
