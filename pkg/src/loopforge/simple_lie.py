"""Split simple Lie algebras of types A-D at finite rank, their roots and grading modules."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .errors import DomainError, StructuralError
from .linalg import Echelon, nullspace
from .matrices import (
    DOUBLED,
    DOUBLED_PLUS_ONE,
    PLAIN,
    DiagExt,
    FinitaryMatrix,
    IndexUniverse,
    NaturalVector,
    StructuralS,
    diag_bracket,
    entry_weight,
    mat_bracket,
    sigma,
)


@dataclass(frozen=True, order=True)
class Weight:
    """Integer combination of the functionals eps_i, stored as sorted (i, c) pairs."""

    coeffs: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "Weight":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict[int, int] = {}
        for i, c in items:
            acc[i] = acc.get(i, 0) + c
        return cls(tuple(sorted((i, c) for i, c in acc.items() if c)))

    @classmethod
    def eps(cls, i: int, c: int = 1) -> "Weight":
        return cls.of({i: c})

    @classmethod
    def zero(cls) -> "Weight":
        return cls(())

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Weight") -> "Weight":
        return Weight.of(list(self.coeffs) + list(other.coeffs))

    def __neg__(self) -> "Weight":
        return Weight(tuple((i, -c) for i, c in self.coeffs))

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    def scale(self, k: int) -> "Weight":
        return Weight.of({i: k * c for i, c in self.coeffs})

    def inner(self, other: "Weight") -> int:
        o = dict(other.coeffs)
        return sum(c * o.get(i, 0) for i, c in self.coeffs)

    def evaluate(self, p: DiagExt) -> Fraction:
        return sum((c * p.value(i) for i, c in self.coeffs), Fraction(0))

    def label(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in self.coeffs:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign}{mag}e{i}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    @classmethod
    def parse(cls, text: str) -> "Weight":
        import re

        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls.zero()
        terms = re.findall(r"([+-]?)(\d*)e(\d+)", text)
        if "".join(s + m + "e" + i for s, m, i in terms) != text:
            raise DomainError(f"cannot parse weight {text!r}")
        return cls.of([(int(i), (-1 if s == "-" else 1) * (int(m) if m else 1)) for s, m, i in terms])

    def __repr__(self) -> str:
        return f"Weight({self.label()})"


class RootLengthClass(str, enum.Enum):
    SHORT = "short"
    LONG = "long"
    EXTRA_LONG = "extraLong"


_FLOORS = {"A": 2, "B": 2, "C": 2, "D": 3, "BC": 1}


@dataclass(frozen=True)
class SimpleType:
    """Type letter and truncation rank; BC is accepted only as a root-system label."""

    letter: str
    rank: int
    allow_small: bool = False

    def __post_init__(self):
        if self.letter not in _FLOORS:
            raise DomainError(f"unknown type letter {self.letter!r}")
        floor = 1 if self.allow_small else _FLOORS[self.letter]
        if not isinstance(self.rank, int) or self.rank < floor:
            raise DomainError(f"type {self.letter} needs rank >= {floor}, got {self.rank!r}")


def universe_for(letter: str, n: int) -> IndexUniverse:
    if letter == "A":
        return IndexUniverse(PLAIN, n)
    if letter == "B":
        return IndexUniverse(DOUBLED_PLUS_ONE, n)
    if letter in ("C", "D"):
        return IndexUniverse(DOUBLED, n)
    raise DomainError(f"no matrix realization for type {letter!r}")


def roots_of(letter: str, n: int) -> list[Weight]:
    """Root list from the closed-form description."""
    out: set[Weight] = set()
    idx = range(1, n + 1)
    if letter == "A":
        out = {Weight.of({i: 1, j: -1}) for i in idx for j in idx if i != j}
    else:
        if letter in ("B", "C", "D", "BC"):
            for i in idx:
                for j in idx:
                    if i < j:
                        for a in (1, -1):
                            for b in (1, -1):
                                out.add(Weight.of({i: a, j: b}))
        if letter in ("B", "BC"):
            out |= {Weight.eps(i, c) for i in idx for c in (1, -1)}
        if letter in ("C", "BC"):
            out |= {Weight.eps(i, c) for i in idx for c in (2, -2)}
        if letter not in ("B", "C", "D", "BC"):
            raise DomainError(f"unknown type letter {letter!r}")
    return sorted(out)


def reduced_roots(letter: str, n: int) -> list[Weight]:
    """Roots that are not twice another root."""
    roots = set(roots_of(letter, n))
    return sorted(r for r in roots if not (all(c % 2 == 0 for _, c in r.coeffs)
                                             and Weight.of({i: c // 2 for i, c in r.coeffs}) in roots))


def cartan_integer(nu: Weight, mu: Weight) -> Fraction:
    """<nu, mu> = 2 (nu, mu) / (mu, mu)."""
    mm = mu.inner(mu)
    if mm == 0:
        raise DomainError("Cartan integer against the zero weight")
    return Fraction(2 * nu.inner(mu), mm)


def root_length(t: SimpleType | str, mu: Weight, rank: int | None = None) -> RootLengthClass:
    """Length class of a root by squared length."""
    letter, n = (t.letter, t.rank) if isinstance(t, SimpleType) else (t, rank)
    if n is None:
        n = max([i for i, _ in mu.coeffs] + [2])
    roots = roots_of(letter, n)
    if mu not in roots:
        raise DomainError(f"{mu.label()} is not a root of {letter}{n}")
    sq = mu.inner(mu)
    if letter == "BC":
        return {1: RootLengthClass.SHORT, 2: RootLengthClass.LONG, 4: RootLengthClass.EXTRA_LONG}[sq]
    shortest = min(r.inner(r) for r in roots)
    return RootLengthClass.SHORT if sq == shortest else RootLengthClass.LONG


def matrix_weight(u: IndexUniverse, x: FinitaryMatrix, weight_fn=None) -> Weight | None:
    """Common weight of all entries of x, or None when x is not homogeneous."""
    wf = weight_fn or (lambda a, b: entry_weight(u, a, b))
    ws = {Weight.of(wf(i, j)) for (i, j) in x.entries}
    if len(ws) != 1:
        return Weight.zero() if not ws else None
    return ws.pop()


def graded_eigenbasis(
    universe: IndexUniverse,
    involution: Callable[[FinitaryMatrix], FinitaryMatrix] | list,
    sign: int = 1,
    traceless: bool = False,
    weight_fn: Callable[[int, int], Mapping[int, int]] | None = None,
) -> list[tuple[Weight, FinitaryMatrix]]:
    """Weight-homogeneous basis of {x : theta(x) = sign*x}, optionally traceless.

    `involution` may also be a list of (theta, sign) pairs of commuting
    involutions, giving the joint eigenspace.
    """
    pairs = involution if isinstance(involution, list) else [(involution, sign)]
    wf = weight_fn or (lambda a, b: entry_weight(universe, a, b))
    groups: dict[Weight, list[tuple[int, int]]] = {}
    for a in universe.indices():
        for b in universe.indices():
            groups.setdefault(Weight.of(wf(a, b)), []).append((a, b))
    out = []
    half = Fraction(1, 2)
    for w in sorted(groups, key=lambda w: (w.is_zero(), w)):
        ech = Echelon()
        for a, b in groups[w]:
            p = FinitaryMatrix.unit(universe, a, b)
            for theta, sg in pairs:
                p = (p + theta(p).scale(sg)).scale(half)
            ech.add(p.entries)
        rows = ech.basis()
        if traceless:
            rows = _traceless_part(rows)
        out.extend((w, FinitaryMatrix(universe, r)) for r in rows)
    return out


def _traceless_part(rows: list[dict]) -> list[dict]:
    """Basis of the trace-zero subspace of span(rows), in reduced form."""
    traces = [sum((v for (i, j), v in r.items() if i == j), Fraction(0)) for r in rows]
    if not any(traces):
        return rows
    kernel = nullspace([{k: t for k, t in enumerate(traces) if t}], list(range(len(rows))))
    ech = Echelon()
    for vec in kernel:
        acc: dict = {}
        for k, c in vec.items():
            for key, v in rows[k].items():
                acc[key] = acc.get(key, 0) + c * v
        ech.add({k: v for k, v in acc.items() if v})
    return ech.basis()


@lru_cache(maxsize=None)
def _basis_cached(letter: str, rank: int) -> tuple[tuple[Weight, FinitaryMatrix], ...]:
    u = universe_for(letter, rank)
    if letter == "A":
        out = []
        for i in u.indices():
            for j in u.indices():
                if i != j:
                    out.append((Weight.of({i: 1, j: -1}), FinitaryMatrix.unit(u, i, j)))
        out.sort(key=lambda p: p[0])
        for i in range(1, rank):
            out.append((Weight.zero(), FinitaryMatrix(u, {(i, i): 1, (i + 1, i + 1): -1})))
        return tuple(out)
    return tuple(graded_eigenbasis(u, lambda x: sigma(letter, x), 1))


def basis_of(t: SimpleType) -> list[tuple[Weight, FinitaryMatrix]]:
    """Root vectors (sorted by weight) followed by a diagonal Cartan basis."""
    if t.letter == "BC":
        raise DomainError("BC is a grading type only; it has no standalone algebra here")
    basis = list(_basis_cached(t.letter, t.rank))
    for w, x in basis:
        if not in_simple_algebra(t.letter, x):
            raise StructuralError(f"basis element {x!r} violates its defining relation")
    return basis


def in_simple_algebra(letter: str, x: FinitaryMatrix) -> bool:
    """Defining relation: traceless for A, s x = -x^t s for B, C, D."""
    if letter == "A":
        return x.trace() == 0
    s = StructuralS(letter, x.universe).matrix
    return s @ x == -(x.transpose() @ s)


def in_symmetric_part(letter: str, x: FinitaryMatrix) -> bool:
    """s x = x^t s and trace zero."""
    s = StructuralS(letter, x.universe).matrix
    return x.trace() == 0 and s @ x == x.transpose() @ s


def cartan_basis(t: SimpleType) -> list[FinitaryMatrix]:
    return [x for w, x in basis_of(t) if w.is_zero()]


def root_vector(t: SimpleType, mu: Weight) -> FinitaryMatrix:
    for w, x in basis_of(t):
        if w == mu:
            return x
    raise DomainError(f"{mu.label()} is not a root of {t.letter}{t.rank}")


def coroot(t: SimpleType, mu: Weight) -> DiagExt:
    """The element h of [g_mu, g_-mu] with [h, e_nu] = <nu, mu> e_nu for every root nu."""
    e = root_vector(t, mu)
    f = root_vector(t, -mu)
    h = mat_bracket(e, f)
    he = mat_bracket(h, e)
    (key, val), = list(e.entries.items())[:1]
    lam = he.entry(*key) / val
    if not lam or he != e.scale(lam):
        raise StructuralError("root vector is not an eigenvector of [e, f]")
    cor = DiagExt({i: v for i, v in h.scale(Fraction(2) / lam).diagonal().items()})
    for nu, x in basis_of(t):
        if nu.is_zero():
            continue
        if diag_bracket(cor, x) != x.scale(cartan_integer(nu, mu)):
            raise StructuralError(f"coroot of {mu.label()} fails on {nu.label()}")
    return cor


# grading modules

@dataclass(frozen=True)
class GradingModule:
    """Odd-degree module of a twisted type, with a weight-homogeneous basis."""

    kind: str  # "NaturalVector" or "SymmetricPart"
    tag: str
    rank: int
    basis: tuple


@lru_cache(maxsize=None)
def grading_module(tag: str, n: int) -> GradingModule:
    if tag == "B2":
        u = IndexUniverse(DOUBLED_PLUS_ONE, n)
        basis = tuple((Weight.of(u.weight_of_index(a)), NaturalVector.basis_vector(u, a))
                      for a in u.indices())
        basis = tuple(sorted(basis, key=lambda p: (p[0].is_zero(), p[0])))
        return GradingModule("NaturalVector", tag, n, basis)
    if tag in ("C2", "BC2"):
        letter = "C" if tag == "C2" else "B"
        u = universe_for(letter, n)
        basis = tuple(graded_eigenbasis(u, lambda x: sigma(letter, x), -1, traceless=True))
        return GradingModule("SymmetricPart", tag, n, basis)
    raise DomainError(f"{tag!r} is not a twisted type")


def module_action(tag: str, x: FinitaryMatrix, v):
    """Action of the grading algebra on its module: x v for B2, [x, v] otherwise."""
    if tag == "B2":
        if not isinstance(v, NaturalVector):
            raise StructuralError("B2 module elements are vectors")
        if x.universe != v.universe:
            raise StructuralError("universe mismatch")
        return x @ v
    if tag in ("C2", "BC2"):
        if not isinstance(v, FinitaryMatrix):
            raise StructuralError(f"{tag} module elements are matrices")
        out = mat_bracket(x, v)
        letter = "C" if tag == "C2" else "B"
        if not in_symmetric_part(letter, out):
            raise StructuralError("action left the grading module")
        return out
    raise DomainError(f"{tag!r} is not a twisted type")


def d_form(v: NaturalVector, w: NaturalVector, s: StructuralS | None = None) -> Fraction:
    """The symmetric form v^t s w."""
    s = s or StructuralS("B", v.universe)
    sm = s.matrix
    return sum((a * c * w.entries.get(j, 0) for i, a in v.entries.items()
                for (r, j), c in sm.entries.items() if r == i), Fraction(0))


def D_operator(v: NaturalVector, w: NaturalVector, s: StructuralS | None = None) -> FinitaryMatrix:
    """D_{v,w} = v w^t s - w v^t s, i.e. u -> (w,u) v - (v,u) w."""
    s = s or StructuralS("B", v.universe)
    sm = s.matrix
    return v.outer(w) @ sm - w.outer(v) @ sm


def span_closure(seeds: Iterable[dict], operators: Iterable[Callable[[dict], dict]], limit: int = 100000) -> Echelon:
    """Smallest subspace containing seeds and stable under the operators."""
    ops = list(operators)
    ech = Echelon()
    queue = [s for s in seeds if s]
    while queue:
        v = queue.pop()
        if ech.add(v):
            if ech.rank > limit:
                break
            for op in ops:
                w = op(v)
                if w:
                    queue.append(w)
    return ech
