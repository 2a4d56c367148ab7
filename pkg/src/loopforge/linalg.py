"""Sparse exact linear algebra over Q.

Vectors are dicts mapping comparable keys to nonzero Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

SparseVec = dict


def clean(v: Mapping) -> dict:
    """Drop zero entries."""
    return {k: x for k, x in v.items() if x}


def axpy(y: dict, a, x: Mapping) -> dict:
    """In place y += a*x, removing cancelled entries."""
    if not a:
        return y
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)
    return y


def scale(a, x: Mapping) -> dict:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def lincomb(terms: Iterable[tuple[object, Mapping]]) -> dict:
    out: dict = {}
    for a, x in terms:
        axpy(out, a, x)
    return out


class Echelon:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self, order=None):
        self._order = order
        self.rows: dict[Hashable, dict] = {}
        self.inserted: list[Hashable] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _pivot(self, v: Mapping):
        if self._order is None:
            return min(v)
        return min(v, key=self._order)

    def reduce(self, v: Mapping) -> dict:
        """Residual of v modulo the current row space."""
        r = dict(v)
        rows = self.rows
        for k in [k for k in r if k in rows]:
            c = r.get(k)
            if c:
                axpy(r, -c, rows[k])
        return r

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)

    def add(self, v: Mapping) -> bool:
        """Insert v; return True when it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        p = self._pivot(r)
        inv = 1 / Fraction(r[p])
        r = {k: x * inv for k, x in r.items()}
        for row in self.rows.values():
            c = row.get(p)
            if c:
                axpy(row, -c, r)
        self.rows[p] = r
        self.inserted.append(p)
        return True

    def extend(self, vs: Iterable[Mapping]) -> int:
        return sum(1 for v in vs if self.add(v))

    def basis(self) -> list[dict]:
        """Rows sorted by pivot."""
        keys = sorted(self.rows, key=self._order) if self._order else sorted(self.rows)
        return [dict(self.rows[k]) for k in keys]

    def pivots(self) -> list:
        return sorted(self.rows, key=self._order) if self._order else sorted(self.rows)


def rank(vectors: Iterable[Mapping]) -> int:
    e = Echelon()
    e.extend(vectors)
    return e.rank


def rref(vectors: Iterable[Mapping], order=None) -> list[dict]:
    e = Echelon(order)
    e.extend(vectors)
    return e.basis()


def nullspace(equations: Iterable[Mapping], variables: Sequence[Hashable]) -> list[dict]:
    """Basis of {x : sum_k eq[k] x[k] = 0 for every equation}."""
    pos = {v: i for i, v in enumerate(variables)}
    e = Echelon(order=pos.__getitem__)
    for eq in equations:
        if eq:
            e.add(eq)
            if e.rank == len(variables):
                return []
    pivots = set(e.rows)
    out = []
    for f in variables:
        if f in pivots:
            continue
        vec = {f: Fraction(1)}
        for p, row in e.rows.items():
            c = row.get(f)
            if c:
                vec[p] = -c
        out.append(vec)
    return out


_RHS = ("__rhs__",)


def solve(equations: Sequence[Mapping], rhs: Sequence, variables: Sequence[Hashable]):
    """One solution of the linear system, or None when inconsistent.

    Free variables are set to zero.
    """
    pos = {v: i for i, v in enumerate(variables)}
    pos[_RHS] = len(variables)
    e = Echelon(order=pos.__getitem__)
    for eq, b in zip(equations, rhs):
        row = dict(eq)
        if b:
            row[_RHS] = Fraction(b)
        if row:
            e.add(row)
    if _RHS in e.rows:
        return None
    sol = {v: Fraction(0) for v in variables}
    for p, row in e.rows.items():
        sol[p] = row.get(_RHS, Fraction(0))
    return sol


def dense_rows(matrix: Sequence[Sequence]) -> list[dict]:
    """Convert a dense matrix to sparse rows keyed by column index."""
    return [{j: Fraction(x) for j, x in enumerate(row) if x} for row in matrix]


def solve_dense(matrix: Sequence[Sequence], rhs: Sequence):
    """Solve a dense square system; None when singular or inconsistent."""
    n = len(matrix)
    if rank(dense_rows(matrix)) < n:
        return None
    sol = solve(dense_rows(matrix), rhs, list(range(n)))
    return None if sol is None else [sol[j] for j in range(n)]


def in_span(basis: Iterable[Mapping], v: Mapping) -> bool:
    e = Echelon()
    e.extend(basis)
    return e.contains(v)


def span_equal(a: Iterable[Mapping], b: Iterable[Mapping]) -> bool:
    a, b = list(a), list(b)
    ea, eb = Echelon(), Echelon()
    ea.extend(a)
    eb.extend(b)
    return ea.rank == eb.rank and all(ea.contains(v) for v in b)


def inverse_dense(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Inverse of a square matrix by Gauss-Jordan elimination."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
