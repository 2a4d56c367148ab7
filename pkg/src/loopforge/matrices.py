"""Finitely supported matrices, almost-scalar diagonals, s-matrices and involutions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DomainError, ParseError, StructuralError
from .exact import as_q, q_str

PLAIN = "plain"
DOUBLED = "doubled"
DOUBLED_PLUS_ONE = "doubled_plus_one"
_KINDS = (PLAIN, DOUBLED, DOUBLED_PLUS_ONE)


@dataclass(frozen=True)
class IndexUniverse:
    """Index set {1..size}; doubled kinds pair i with n+i, the odd kind adds 2n+1."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown universe kind {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"rank must be a positive integer, got {self.n!r}")

    @property
    def size(self) -> int:
        if self.kind == PLAIN:
            return self.n
        if self.kind == DOUBLED:
            return 2 * self.n
        return 2 * self.n + 1

    def indices(self) -> range:
        return range(1, self.size + 1)

    def __contains__(self, i) -> bool:
        return isinstance(i, int) and 1 <= i <= self.size

    def weight_of_index(self, i: int) -> dict[int, int]:
        """epsilon-coefficients of the weight carried by basis vector i."""
        if i not in self:
            raise StructuralError(f"index {i} outside {self}")
        if self.kind == PLAIN or i <= self.n:
            return {i: 1}
        if i <= 2 * self.n:
            return {i - self.n: -1}
        return {}

    def partner(self, i: int) -> int:
        """The index paired with i by the doubling (2n+1 is self-paired)."""
        if self.kind == PLAIN:
            raise StructuralError("plain universes have no pairing")
        if i <= self.n:
            return i + self.n
        if i <= 2 * self.n:
            return i - self.n
        return i

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}


def entry_weight(u: IndexUniverse, a: int, b: int) -> dict[int, int]:
    """Weight of the matrix unit e_ab: w(a) - w(b)."""
    out = dict(u.weight_of_index(a))
    for k, c in u.weight_of_index(b).items():
        v = out.get(k, 0) - c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


class FinitaryMatrix:
    """Sparse matrix over an index universe; zero entries are never stored."""

    __slots__ = ("universe", "entries")

    def __init__(self, universe: IndexUniverse, entries: Mapping[tuple[int, int], object] | None = None):
        self.universe = universe
        clean = {}
        for (i, j), v in (entries or {}).items():
            if i not in universe or j not in universe:
                raise StructuralError(f"entry ({i},{j}) outside {universe}")
            if v:
                clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def _raw(cls, universe, entries) -> "FinitaryMatrix":
        m = cls.__new__(cls)
        m.universe = universe
        m.entries = entries
        return m

    @classmethod
    def unit(cls, universe: IndexUniverse, i: int, j: int, coeff=1) -> "FinitaryMatrix":
        return cls(universe, {(i, j): Fraction(coeff)})

    @classmethod
    def zero(cls, universe: IndexUniverse) -> "FinitaryMatrix":
        return cls._raw(universe, {})

    @classmethod
    def identity(cls, universe: IndexUniverse) -> "FinitaryMatrix":
        return cls._raw(universe, {(i, i): Fraction(1) for i in universe.indices()})

    @classmethod
    def from_dense(cls, universe: IndexUniverse, rows) -> "FinitaryMatrix":
        return cls(universe, {(i + 1, j + 1): as_q(v) if isinstance(v, str) else v
                              for i, row in enumerate(rows) for j, v in enumerate(row)})

    def to_dense(self) -> list[list]:
        n = self.universe.size
        out = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), v in self.entries.items():
            out[i - 1][j - 1] = v
        return out

    def _check(self, other: "FinitaryMatrix"):
        if not isinstance(other, FinitaryMatrix):
            raise StructuralError(f"expected FinitaryMatrix, got {type(other).__name__}")
        if other.universe != self.universe:
            raise StructuralError(f"universe mismatch: {self.universe} vs {other.universe}")

    def entry(self, i: int, j: int):
        return self.entries.get((i, j), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitaryMatrix):
            return NotImplemented
        return self.universe == other.universe and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.universe, frozenset(self.entries.items())))

    def __add__(self, other: "FinitaryMatrix") -> "FinitaryMatrix":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return FinitaryMatrix._raw(self.universe, out)

    def __neg__(self) -> "FinitaryMatrix":
        return FinitaryMatrix._raw(self.universe, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "FinitaryMatrix") -> "FinitaryMatrix":
        return self + (-other)

    def scale(self, c) -> "FinitaryMatrix":
        if not c:
            return FinitaryMatrix.zero(self.universe)
        return FinitaryMatrix._raw(self.universe, {k: c * v for k, v in self.entries.items()})

    def __rmul__(self, c) -> "FinitaryMatrix":
        return self.scale(c)

    def __matmul__(self, other):
        if isinstance(other, NaturalVector):
            if other.universe != self.universe:
                raise StructuralError("universe mismatch in matrix-vector product")
            out: dict = {}
            for (i, j), v in self.entries.items():
                w = other.entries.get(j)
                if w:
                    out[i] = out.get(i, 0) + v * w
            return NaturalVector(self.universe, out)
        self._check(other)
        by_row: dict[int, list] = {}
        for (j, k), w in other.entries.items():
            by_row.setdefault(j, []).append((k, w))
        out = {}
        for (i, j), v in self.entries.items():
            for k, w in by_row.get(j, ()):
                out[(i, k)] = out.get((i, k), 0) + v * w
        return FinitaryMatrix._raw(self.universe, {k: v for k, v in out.items() if v})

    def transpose(self) -> "FinitaryMatrix":
        return FinitaryMatrix._raw(self.universe, {(j, i): v for (i, j), v in self.entries.items()})

    @property
    def T(self) -> "FinitaryMatrix":
        return self.transpose()

    def trace(self):
        total = Fraction(0)
        for (i, j), v in self.entries.items():
            if i == j:
                total = total + v
        return total

    def is_diagonal(self) -> bool:
        return all(i == j for i, j in self.entries)

    def diagonal(self) -> dict[int, object]:
        return {i: v for (i, j), v in self.entries.items() if i == j}

    def relabel(self, index_map: Mapping[int, int], universe: IndexUniverse) -> "FinitaryMatrix":
        return FinitaryMatrix(universe, {(index_map[i], index_map[j]): v for (i, j), v in self.entries.items()})

    def to_json(self) -> list:
        return [[i, j, q_str(v)] for (i, j), v in sorted(self.entries.items())]

    @classmethod
    def from_json(cls, universe: IndexUniverse, data) -> "FinitaryMatrix":
        try:
            return cls(universe, {(int(i), int(j)): as_q(v) for i, j, v in data})
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad matrix triplets: {data!r}") from exc

    def __repr__(self) -> str:
        body = ", ".join(f"e{i},{j}:{q_str(v) if isinstance(v, (int, Fraction)) else v!r}"
                         for (i, j), v in sorted(self.entries.items()))
        return f"FinitaryMatrix({self.universe.kind}({self.universe.n}); {body})"


class NaturalVector:
    """Sparse column vector over an index universe."""

    __slots__ = ("universe", "entries")

    def __init__(self, universe: IndexUniverse, entries: Mapping[int, object] | None = None):
        self.universe = universe
        clean = {}
        for i, v in (entries or {}).items():
            if i not in universe:
                raise StructuralError(f"index {i} outside {universe}")
            if v:
                clean[i] = v
        self.entries = clean

    @classmethod
    def basis_vector(cls, universe: IndexUniverse, i: int, coeff=1) -> "NaturalVector":
        return cls(universe, {i: Fraction(coeff)})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NaturalVector):
            return NotImplemented
        return self.universe == other.universe and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.universe, frozenset(self.entries.items())))

    def __add__(self, other: "NaturalVector") -> "NaturalVector":
        if other.universe != self.universe:
            raise StructuralError("universe mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return NaturalVector(self.universe, out)

    def __neg__(self) -> "NaturalVector":
        return NaturalVector(self.universe, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "NaturalVector") -> "NaturalVector":
        return self + (-other)

    def scale(self, c) -> "NaturalVector":
        return NaturalVector(self.universe, {k: c * v for k, v in self.entries.items()})

    __rmul__ = scale

    def outer(self, other: "NaturalVector") -> FinitaryMatrix:
        """The matrix v w^t."""
        return FinitaryMatrix(self.universe, {(i, j): a * b for i, a in self.entries.items()
                                              for j, b in other.entries.items()})

    def relabel(self, index_map: Mapping[int, int], universe: IndexUniverse) -> "NaturalVector":
        return NaturalVector(universe, {index_map[i]: v for i, v in self.entries.items()})

    def to_json(self) -> list:
        return [[i, q_str(v)] for i, v in sorted(self.entries.items())]

    @classmethod
    def from_json(cls, universe: IndexUniverse, data) -> "NaturalVector":
        try:
            return cls(universe, {int(i): as_q(v) for i, v in data})
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad vector entries: {data!r}") from exc

    def __repr__(self) -> str:
        body = ", ".join(f"v{i}:{q_str(v)}" for i, v in sorted(self.entries.items()))
        return f"NaturalVector({body})"


@dataclass(frozen=True)
class DiagExt:
    """Diagonal matrix finite + scalar*iota, iota being the identity on the whole index set."""

    finite: tuple[tuple[int, Fraction], ...] = ()
    scalar: Fraction = Fraction(0)

    def __init__(self, finite: Mapping[int, object] | Iterable = (), scalar=0):
        items = finite.items() if isinstance(finite, Mapping) else finite
        clean = tuple(sorted((int(i), as_q(v)) for i, v in items if as_q(v)))
        object.__setattr__(self, "finite", clean)
        object.__setattr__(self, "scalar", as_q(scalar))

    @classmethod
    def iota(cls, coeff=1) -> "DiagExt":
        return cls({}, coeff)

    @classmethod
    def from_values(cls, values: Iterable) -> "DiagExt":
        """diag(values[0], values[1], ...) on indices 1, 2, ..."""
        return cls({i + 1: as_q(v) for i, v in enumerate(values)})

    @property
    def finite_map(self) -> dict[int, Fraction]:
        return dict(self.finite)

    def value(self, i: int) -> Fraction:
        return dict(self.finite).get(i, Fraction(0)) + self.scalar

    def __add__(self, other: "DiagExt") -> "DiagExt":
        out = dict(self.finite)
        for i, v in other.finite:
            out[i] = out.get(i, 0) + v
        return DiagExt(out, self.scalar + other.scalar)

    def __neg__(self) -> "DiagExt":
        return self.scale(-1)

    def __sub__(self, other: "DiagExt") -> "DiagExt":
        return self + (-other)

    def scale(self, c) -> "DiagExt":
        c = as_q(c)
        return DiagExt({i: c * v for i, v in self.finite}, c * self.scalar)

    def __bool__(self) -> bool:
        return bool(self.finite) or bool(self.scalar)

    def restrict(self, universe: IndexUniverse) -> FinitaryMatrix:
        """The block of finite + scalar*iota on the universe's indices."""
        return FinitaryMatrix(universe, {(i, i): self.value(i) for i in universe.indices()})

    def to_json(self) -> dict:
        return {"finite": {str(i): q_str(v) for i, v in self.finite}, "scalar": q_str(self.scalar)}

    @classmethod
    def from_json(cls, data) -> "DiagExt":
        try:
            return cls({int(i): as_q(v) for i, v in data.get("finite", {}).items()},
                       as_q(data.get("scalar", "0")))
        except (AttributeError, TypeError, ValueError) as exc:
            raise ParseError(f"bad diagonal: {data!r}") from exc


_S_KIND = {"B": DOUBLED_PLUS_ONE, "C": DOUBLED, "D": DOUBLED}


@dataclass(frozen=True)
class StructuralS:
    """The structural matrix s of type B, C or D on its doubled universe."""

    type: str
    universe: IndexUniverse

    def __post_init__(self):
        if self.type not in _S_KIND:
            raise DomainError(f"s-matrix type must be B, C or D, got {self.type!r}")
        if self.universe.kind != _S_KIND[self.type]:
            raise StructuralError(f"type {self.type} needs a {_S_KIND[self.type]} universe")

    @property
    def matrix(self) -> FinitaryMatrix:
        n = self.universe.n
        upper = -1 if self.type == "C" else 1
        entries = {}
        for i in range(1, n + 1):
            entries[(i, n + i)] = Fraction(upper)
            entries[(n + i, i)] = Fraction(1)
        if self.type == "B":
            entries[(2 * n + 1, 2 * n + 1)] = Fraction(1)
        return FinitaryMatrix._raw(self.universe, entries)

    @property
    def square_sign(self) -> int:
        """s^2 = sign * identity."""
        return -1 if self.type == "C" else 1


def structural_s(letter: str, n_or_universe) -> StructuralS:
    if isinstance(n_or_universe, IndexUniverse):
        return StructuralS(letter, n_or_universe)
    return StructuralS(letter, IndexUniverse(_S_KIND[letter], n_or_universe))


def mat_bracket(x: FinitaryMatrix, y: FinitaryMatrix) -> FinitaryMatrix:
    """Commutator xy - yx."""
    x._check(y)
    return (x @ y) - (y @ x)


def diag_bracket(p: DiagExt, x: FinitaryMatrix) -> FinitaryMatrix:
    """[p, x]; entry (i,j) is (p_i - p_j) x_ij, so the iota part drops out."""
    fin = dict(p.finite)
    out = {}
    for (i, j), v in x.entries.items():
        c = fin.get(i, 0) - fin.get(j, 0)
        if c:
            out[(i, j)] = c * v
    return FinitaryMatrix._raw(x.universe, out)


def diag_act(p: DiagExt, v: NaturalVector) -> NaturalVector:
    """p applied to a column vector."""
    return NaturalVector(v.universe, {i: p.value(i) * c for i, c in v.entries.items()})


def sigma(letter: str, x: FinitaryMatrix) -> FinitaryMatrix:
    """The involution -s x^t s (types B, D) or s x^t s (type C).

    Both outer factors are s; with x in place of the trailing s the map is
    neither linear nor of period 2.
    """
    s = StructuralS(letter, x.universe).matrix
    y = s @ x.transpose() @ s
    return y if letter == "C" else -y


def tau_pair(universe: IndexUniverse) -> tuple[int, int]:
    """The swapped pair (j0, -j0) = (n, 2n) of a doubled universe."""
    if universe.kind != DOUBLED:
        raise StructuralError("tau acts on a doubled universe")
    return universe.n, 2 * universe.n


def tau(x: FinitaryMatrix) -> FinitaryMatrix:
    """Conjugation by the permutation matrix swapping j0 and -j0."""
    a, b = tau_pair(x.universe)
    swap = {a: b, b: a}
    return FinitaryMatrix._raw(x.universe, {(swap.get(i, i), swap.get(j, j)): v
                                            for (i, j), v in x.entries.items()})


def tau_vector(v: NaturalVector) -> NaturalVector:
    a, b = tau_pair(v.universe)
    swap = {a: b, b: a}
    return NaturalVector(v.universe, {swap.get(i, i): c for i, c in v.entries.items()})


def normalize_almost_scalar(p: DiagExt, window: Iterable[int]):
    """Split p on a finite window as h + scalar*iota_window + residual.

    h is traceless and supported on the window, scalar is the mean of p over
    the window, and residual vanishes on the window.
    """
    window = sorted(set(window))
    if not window:
        raise DomainError("window must be nonempty")
    values = {i: p.value(i) for i in window}
    mean = sum(values.values(), Fraction(0)) / len(window)
    h = DiagExt({i: v - mean for i, v in values.items()})
    iota_w = DiagExt({i: 1 for i in window})
    residual = p - h - iota_w.scale(mean)
    return h, mean, residual
