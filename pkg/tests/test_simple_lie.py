import itertools
from fractions import Fraction

import pytest
import sympy

from loopforge.errors import DomainError, StructuralError
from loopforge.matrices import DiagExt, FinitaryMatrix, IndexUniverse, NaturalVector, StructuralS, diag_bracket, mat_bracket
from loopforge.simple_lie import (
    D_operator,
    RootLengthClass,
    SimpleType,
    Weight,
    basis_of,
    coroot,
    d_form,
    grading_module,
    in_simple_algebra,
    in_symmetric_part,
    module_action,
    root_length,
    root_vector,
    roots_of,
    span_closure,
)

DIMS = {("A", 2): 3, ("A", 3): 8, ("B", 2): 10, ("C", 2): 10, ("D", 3): 15, ("B", 3): 21, ("C", 3): 21, ("D", 4): 28}


def dim_formula(letter, n):
    return {"A": n * n - 1, "B": n * (2 * n + 1), "C": n * (2 * n + 1), "D": n * (2 * n - 1)}[letter]


@pytest.mark.parametrize("letter,n", sorted(DIMS))
def test_basis_dimensions(letter, n):
    basis = basis_of(SimpleType(letter, n))
    assert len(basis) == DIMS[(letter, n)] == dim_formula(letter, n)
    weights = [w for w, _ in basis if not w.is_zero()]
    assert sorted(weights) == roots_of(letter, n)
    assert len(set(weights)) == len(weights)
    for w, x in basis:
        assert in_simple_algebra(letter, x)
        assert w.is_zero() == x.is_diagonal()


def test_c2_root_lengths():
    t = SimpleType("C", 2)
    roots = [w for w, _ in basis_of(t) if not w.is_zero()]
    long = [r for r in roots if root_length(t, r) is RootLengthClass.LONG]
    assert sorted(long) == sorted(Weight.eps(i, c) for i in (1, 2) for c in (2, -2))
    assert len(roots) - len(long) == 4


def test_b2_root_lengths():
    t = SimpleType("B", 2)
    short = [w for w, _ in basis_of(t) if not w.is_zero() and root_length(t, w) is RootLengthClass.SHORT]
    assert sorted(short) == sorted(Weight.eps(i, c) for i in (1, 2) for c in (1, -1))


def test_rank_floors():
    with pytest.raises(DomainError):
        SimpleType("D", 2)
    with pytest.raises(DomainError):
        SimpleType("A", 1)
    SimpleType("D", 2, allow_small=True)


def test_coroot_examples():
    a = SimpleType("A", 2)
    mu = Weight.of({1: 1, 2: -1})
    assert coroot(a, mu) == DiagExt({1: 1, 2: -1})
    e = root_vector(a, mu)
    assert diag_bracket(coroot(a, mu), e) == e.scale(2)
    c = SimpleType("C", 2)
    h = coroot(c, Weight.eps(1, 2))
    x = root_vector(c, Weight.of({1: 1, 2: -1}))
    assert diag_bracket(h, x) == x


def test_coroot_rejects_non_root():
    with pytest.raises(DomainError):
        coroot(SimpleType("C", 2), Weight.eps(1, 1))


def test_length_classes():
    assert root_length("BC", Weight.eps(1), 2) is RootLengthClass.SHORT
    assert root_length("BC", Weight.eps(1, 2), 2) is RootLengthClass.EXTRA_LONG
    assert root_length("BC", Weight.of({1: 1, 2: -1}), 2) is RootLengthClass.LONG
    assert root_length("A", Weight.of({1: 1, 2: -1}), 3) is RootLengthClass.SHORT
    with pytest.raises(DomainError):
        root_length("A", Weight.eps(1), 3)


def test_weight_labels_round_trip():
    for w in roots_of("BC", 3):
        assert Weight.parse(w.label()) == w
    assert Weight.parse("0").is_zero()


def test_b2_module_action_oracle():
    u = IndexUniverse("doubled_plus_one", 1)
    for _, x in basis_of(SimpleType("B", 1, allow_small=True)):
        for a in u.indices():
            v = NaturalVector.basis_vector(u, a)
            got = module_action("B2", x, v)
            dense = sympy.Matrix(x.to_dense()) * sympy.Matrix([int(i == a) for i in u.indices()])
            assert [got.entries.get(i, 0) for i in u.indices()] == list(dense)


@pytest.mark.parametrize("tag,letter", [("C2", "C"), ("BC2", "B")])
def test_symmetric_module_closure(tag, letter):
    g = [x for _, x in basis_of(SimpleType(letter, 2))]
    s = [x for _, x in grading_module(tag, 2).basis]
    for x in g:
        for v in s:
            assert in_symmetric_part(letter, module_action(tag, x, v))
    for v, w in itertools.combinations(s, 2):
        assert in_simple_algebra(letter, mat_bracket(v, w))


def test_module_dimensions():
    assert len(grading_module("B2", 2).basis) == 5
    assert len(grading_module("C2", 2).basis) == 5
    assert len(grading_module("BC2", 2).basis) == 14
    zero = [w for w, _ in grading_module("BC2", 2).basis if w.is_zero()]
    assert len(zero) == 2


def test_module_action_shape_errors():
    x = basis_of(SimpleType("C", 2))[0][1]
    with pytest.raises(StructuralError):
        module_action("C2", x, NaturalVector.basis_vector(x.universe, 1))


def test_d_operator_properties():
    u = IndexUniverse("doubled_plus_one", 1)
    s = StructuralS("B", u)
    vs = [NaturalVector.basis_vector(u, a) for a in u.indices()]
    for v, w in itertools.product(vs, repeat=2):
        d = D_operator(v, w, s)
        assert d == -D_operator(w, v, s)
        assert in_simple_algebra("B", d)
        for z in vs:
            expected = v.scale(d_form(w, z, s)) - w.scale(d_form(v, z, s))
            assert d @ z == expected
    assert not D_operator(vs[0], vs[0], s)


def test_d_operator_rank_one_explicit():
    u = IndexUniverse("doubled_plus_one", 1)
    v1, v3 = NaturalVector.basis_vector(u, 1), NaturalVector.basis_vector(u, 3)
    d = D_operator(v1, v3)
    assert d == FinitaryMatrix(u, {(1, 3): 1, (3, 2): -1})


@pytest.mark.parametrize("n", [1, 2])
def test_d_operators_span_o(n):
    u = IndexUniverse("doubled_plus_one", n)
    vs = [NaturalVector.basis_vector(u, a) for a in u.indices()]
    from loopforge.linalg import rank

    assert rank(D_operator(v, w).entries for v, w in itertools.combinations(vs, 2)) == n * (2 * n + 1)


@pytest.mark.parametrize("letter,n", [("A", 3), ("B", 2), ("C", 2), ("D", 3), ("C", 3)])
def test_single_root_space_generates(letter, n):
    basis = [x for _, x in basis_of(SimpleType(letter, n))]
    ops = [lambda v, x=x: mat_bracket(x, FinitaryMatrix(x.universe, v)).entries for x in basis]
    for w, x in basis_of(SimpleType(letter, n)):
        if not w.is_zero():
            assert span_closure([x.entries], ops).rank == len(basis)
            break


@pytest.mark.parametrize("tag,letter", [("C2", "C"), ("BC2", "B")])
def test_symmetric_module_irreducible(tag, letter):
    g = [x for _, x in basis_of(SimpleType(letter, 2))]
    s = grading_module(tag, 2).basis
    ops = [lambda v, x=x: mat_bracket(x, FinitaryMatrix(x.universe, v)).entries for x in g]
    for _, v in s:
        assert span_closure([v.entries], ops).rank == len(s)


def test_natural_module_irreducible():
    g = [x for _, x in basis_of(SimpleType("B", 2))]
    u = g[0].universe
    ops = [lambda v, x=x: (x @ NaturalVector(u, v)).entries for x in g]
    for a in u.indices():
        assert span_closure([{a: Fraction(1)}], ops).rank == u.size
