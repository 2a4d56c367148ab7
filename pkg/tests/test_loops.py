import itertools
from fractions import Fraction

import pytest

from loopforge.errors import DomainError, ParseError, StructuralError, WindowError
from loopforge.forms import FormSpec, form_eval
from loopforge.loops import (
    IOTA,
    TAGS,
    Embedding,
    GradedElement,
    LoopType,
    build,
    d0_action,
    embed,
    fixed_algebra,
    hat_sigma,
    hat_tau,
    loop_bracket,
    shift,
    vkey,
)

SMALL = {"A1": 2, "B1": 2, "C1": 2, "D1": 3, "B2": 2, "C2": 2, "BC2": 2}


def h(k, amb):
    return GradedElement.homogeneous(k, amb)


def test_sl2_loop_bracket_example():
    L = build("A1", 2, 2)
    x, y = h(1, {(1, 2): 1}), h(-1, {(2, 1): 1})
    assert loop_bracket(L, x, y) == h(0, {(1, 1): 1, (2, 2): -1})


def test_d0_action_and_bracket():
    L = build("A1", 2, 2)
    x = h(2, {(1, 2): Fraction(1, 3)}) + h(-1, {(2, 1): 1})
    assert d0_action(x) == h(2, {(1, 2): Fraction(2, 3)}) + h(-1, {(2, 1): -1})
    assert loop_bracket(L, GradedElement.d0(), x) == d0_action(x)
    assert loop_bracket(L, x, GradedElement.d0()) == -d0_action(x)
    assert not loop_bracket(L, GradedElement.c(), x)


def test_window_overflow_reported():
    L = build("A1", 2, 2)
    with pytest.raises(WindowError) as exc:
        loop_bracket(L, h(2, {(1, 2): 1}), h(1, {(2, 1): 1}))
    assert exc.value.degrees == [3]
    assert not loop_bracket(L, h(2, {(1, 2): 1}), h(1, {(1, 2): 1}))


@pytest.mark.parametrize("tag", TAGS)
def test_slice_dimensions(tag):
    L = build(tag, SMALL[tag], 1)
    dims = {"A1": (3, 3), "B1": (10, 10), "C1": (10, 10), "D1": (15, 15),
            "B2": (10, 5), "C2": (10, 5), "BC2": (10, 14)}[tag]
    assert L.dim(0) == dims[0]
    assert L.dim(1) == L.dim(-1) == dims[1]
    assert L.dim() == dims[0] + 2 * dims[1]


def test_variants():
    assert build("A1", 3, 1, variant="max").dim(0) == 9
    assert build("A1", 3, 1, variant="full").dim(0) == 10
    assert build("C2", 2, 1, variant="max").dim(1) == 6
    assert build("BC2", 2, 1, variant="max").dim(1) == 15
    with pytest.raises(DomainError):
        LoopType("B1", 2, 1, variant="full")
    with pytest.raises(DomainError):
        LoopType("X9", 2, 1)
    with pytest.raises(DomainError):
        LoopType("D1", 2, 1)


def test_b2_odd_bracket_is_d_operator():
    L = build("B2", 1, 2, allow_small=True)
    v1, v3 = h(1, {vkey(1): 1}), h(-1, {vkey(3): 1})
    assert loop_bracket(L, v1, v3) == h(0, {(1, 3): 1, (3, 2): -1})
    x = h(0, {(1, 3): 1, (3, 2): -1})
    assert loop_bracket(L, x, h(1, {vkey(3): 1})) == h(1, {vkey(1): 1})


@pytest.mark.parametrize("tag", TAGS)
def test_brackets_stay_in_algebra(tag):
    L = build(tag, SMALL[tag], 1)
    for i, j in itertools.product(range(L.dim()), repeat=2):
        z = L.bracket_indices(i, j)
        bi, bj = L.basis[i], L.basis[j]
        if abs(bi.degree + bj.degree) > 1:
            assert z is None
            continue
        for idx in z:
            assert L.basis[idx].degree == bi.degree + bj.degree
            assert L.basis[idx].weight == bi.weight + bj.weight


def test_coords_round_trip_and_membership():
    L = build("C2", 2, 2)
    x = L.element(3, 2) + L.element(L.indices_at(1)[0], Fraction(-1, 2))
    assert L.from_coords(L.coords(x)) == x
    assert not L.contains(h(1, {(1, 1): 1}))
    assert not L.contains(h(3, {(1, 2): 1}))


def test_shift_is_centroidal():
    L = build("A1", 2, 3)
    x, y = h(1, {(1, 2): 1}), h(-1, {(2, 1): 1, (1, 1): 1, (2, 2): -1})
    for m in (-1, 1):
        assert shift(m, loop_bracket(L, x, y)) == loop_bracket(L, shift(m, x), y)
    with pytest.raises(WindowError):
        shift(3, x, window=3)


def test_hat_sigma_is_involution_and_automorphism():
    L = build("A1", 4, 2, ambient="doubled")
    for i, j in itertools.product(range(0, L.dim(), 5), repeat=2):
        x, y = L.element(i), L.element(j)
        assert hat_sigma(L, hat_sigma(L, x)) == x
        if abs(L.basis[i].degree + L.basis[j].degree) <= 2:
            assert hat_sigma(L, loop_bracket(L, x, y)) == loop_bracket(L, hat_sigma(L, x), hat_sigma(L, y))


def test_hat_tau_on_d1():
    L = build("D1", 3, 1)
    x = h(1, {(3, 1): 1, (4, 6): -1})
    assert hat_tau(L, x) == h(1, {(6, 1): -1, (4, 3): 1})
    with pytest.raises(DomainError):
        hat_sigma(build("A1", 2, 1), x)


@pytest.mark.parametrize("ambient,rank,target", [("doubled", 4, "C2"), ("doubled_plus_one", 5, "BC2")])
def test_fixed_algebra_matches_direct(ambient, rank, target):
    fa = fixed_algebra(build("A1", rank, 2, ambient=ambient), "sigma")
    direct = build(target, 2, 2)
    assert fa.target == LoopType(target, 2, 2)
    assert fa.dims() == {k: direct.dim(k) for k in range(-2, 3)}


def test_fixed_algebra_tau():
    fa = fixed_algebra(build("D1", 3, 2), "tau")
    assert fa.dims() == {k: build("B2", 2, 2).dim(k) for k in range(-2, 3)}
    assert fa.dims() == {k: build("B2", 2, 2, realization="tau").dim(k) for k in range(-2, 3)}
    with pytest.raises(DomainError):
        fixed_algebra(build("D1", 3, 2), "sigma")


@pytest.mark.parametrize("tag", TAGS)
def test_embedding_commutes_with_brackets(tag):
    small = tag == "D1"
    src = LoopType(tag, 2, 1, allow_small=small)
    tgt = LoopType(tag, 3, 1)
    L2, L3 = build(src), build(tgt)
    e = Embedding.standard(src, tgt)
    spec = FormSpec.default()
    for i, j in itertools.product(range(L2.dim()), repeat=2):
        x, y = L2.element(i), L2.element(j)
        assert L3.contains(embed(e, x))
        assert form_eval(spec, L3, embed(e, x), embed(e, y)) == form_eval(spec, L2, x, y)
        if abs(L2.basis[i].degree + L2.basis[j].degree) <= 1:
            assert embed(e, loop_bracket(L2, x, y)) == loop_bracket(L3, embed(e, x), embed(e, y))


def test_embedding_rejects_mismatch():
    with pytest.raises(StructuralError):
        Embedding.standard(LoopType("C2", 3, 1), LoopType("C2", 2, 1))
    with pytest.raises(StructuralError):
        Embedding.standard(LoopType("C2", 2, 1), LoopType("B2", 3, 1))


def test_json_round_trip():
    L = build("B2", 2, 2)
    x = h(1, {vkey(5): Fraction(1, 2)}) + h(0, {(1, 2): 3, (1, 1): 1, (3, 3): -1}) + GradedElement.c(2)
    data = L.element_to_json(x)
    assert data["1"]["vector"] == [[5, "1/2"]]
    assert L.element_from_json(data) == x
    assert LoopType.from_json(L.type.to_json()) == L.type
    y = h(0, {IOTA: 1})
    assert build("A1", 2, 1, variant="full").element_from_json(L.element_to_json(y)) == y


def test_json_errors():
    L = build("A1", 2, 1)
    with pytest.raises(ParseError):
        L.element_from_json([1, 2])
    with pytest.raises(ParseError):
        L.element_from_json({"0": {"matrix": [[1, 7, "1"]]}})
    with pytest.raises(ParseError):
        LoopType.from_json({"type": "A1"})


def test_summary_is_deterministic():
    a = build("C2", 2, 2).summary()
    assert a == build("C2", 2, 2).summary()
    assert [r["dim"] for r in a["degrees"]] == [10, 5, 10, 5, 10]
    assert a["total_dim"] == 40
