from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from loopforge.linalg import Echelon, inverse_dense, nullspace, rank, solve, solve_dense, span_equal

entries = st.integers(-3, 3).map(Fraction)


def matrices(rows=st.integers(1, 5), cols=st.integers(1, 5)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(entries, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]))


def sparse(rows):
    return [{j: v for j, v in enumerate(r) if v} for r in rows]


@settings(max_examples=60)
@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(sparse(m)) == sympy.Matrix(m).rank()


@settings(max_examples=60)
@given(matrices())
def test_nullspace_matches_sympy(m):
    cols = len(m[0])
    kernel = nullspace(sparse(m), list(range(cols)))
    assert len(kernel) == len(sympy.Matrix(m).nullspace())
    for vec in kernel:
        for row in m:
            assert sum(row[j] * vec.get(j, 0) for j in range(cols)) == 0


@settings(max_examples=60)
@given(matrices(), st.lists(entries, min_size=5, max_size=5))
def test_solve_consistency(m, b):
    rows, cols = len(m), len(m[0])
    rhs = b[:rows]
    sol = solve(sparse(m), rhs, list(range(cols)))
    augmented = sympy.Matrix([list(r) + [v] for r, v in zip(m, rhs)])
    consistent = augmented.rank() == sympy.Matrix(m).rank()
    assert (sol is not None) == consistent
    if sol is not None:
        for row, v in zip(m, rhs):
            assert sum(row[j] * sol[j] for j in range(cols)) == v


@settings(max_examples=40)
@given(matrices(rows=st.just(3), cols=st.just(3)))
def test_inverse_matches_sympy(m):
    sm = sympy.Matrix(m)
    if sm.det() == 0:
        assert solve_dense(m, [1, 0, 0]) is None
        with pytest.raises(ZeroDivisionError):
            inverse_dense(m)
        return
    inv = inverse_dense(m)
    expected = sm.inv()
    assert [[Fraction(int(expected[i, j].p), int(expected[i, j].q)) for j in range(3)] for i in range(3)] == inv


def test_echelon_incremental():
    e = Echelon()
    assert e.add({"a": 1, "b": 2})
    assert not e.add({"a": 2, "b": 4})
    assert e.add({"b": 1})
    assert e.contains({"a": 5})
    assert e.rank == 2


def test_span_equal():
    assert span_equal([{0: 1}, {1: 1}], [{0: 1, 1: 1}, {0: 1, 1: -1}])
    assert not span_equal([{0: 1}], [{1: 1}])
