"""The seven locally loop algebras at finite rank and degree window.

Elements are stored componentwise as sparse "ambient" dicts.  Keys are
(a, b) for the matrix unit e_ab, (0, a) for the basis vector v_a of the
natural module, and (0, 0) for iota.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import DomainError, ParseError, StructuralError, WindowError
from .exact import as_q, q_str
from .linalg import Echelon, axpy, inverse_dense, nullspace
from .matrices import (
    DOUBLED,
    DOUBLED_PLUS_ONE,
    PLAIN,
    DiagExt,
    FinitaryMatrix,
    IndexUniverse,
    NaturalVector,
    sigma,
    tau,
)
from .simple_lie import (
    SimpleType,
    Weight,
    basis_of,
    graded_eigenbasis,
    grading_module,
    universe_for,
)

TAGS = ("A1", "B1", "C1", "D1", "B2", "C2", "BC2")
UNTWISTED = {"A1": "A", "B1": "B", "C1": "C", "D1": "D"}
TWISTED = ("B2", "C2", "BC2")
ROOT_TYPE = {"A1": "A", "B1": "B", "C1": "C", "D1": "D", "B2": "B", "C2": "C", "BC2": "BC"}
VARIANTS = ("core", "max", "full")

IOTA = (0, 0)


def vkey(a: int) -> tuple[int, int]:
    return (0, a)


@dataclass(frozen=True)
class LoopType:
    """Descriptor: type tag, truncation rank and degree window |k| <= window.

    variant "max" adds the diagonal complement (e_jj for A1, the odd
    complement p0 for C2/BC2); "full" (A1 only) also adds iota.
    realization "tau" builds B2 as the twisted fixed points inside D1 of rank+1.
    ambient selects the index universe of A1 (plain, doubled, doubled_plus_one).
    """

    tag: str
    rank: int
    window: int
    variant: str = "core"
    realization: str = "direct"
    ambient: str = PLAIN
    allow_small: bool = False

    def __post_init__(self):
        if self.tag not in TAGS:
            raise DomainError(f"unknown type tag {self.tag!r}; expected one of {', '.join(TAGS)}")
        if not isinstance(self.window, int) or self.window < 0:
            raise DomainError(f"window must be a nonnegative integer, got {self.window!r}")
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.variant == "full" and self.tag != "A1":
            raise DomainError("variant 'full' exists for A1 only")
        if self.realization not in ("direct", "tau") or (self.realization == "tau" and self.tag != "B2"):
            raise DomainError(f"realization {self.realization!r} not available for {self.tag}")
        if self.ambient != PLAIN and self.tag != "A1":
            raise DomainError("only A1 takes a non-plain ambient universe")
        if self.ambient == DOUBLED and (not isinstance(self.rank, int) or self.rank % 2):
            raise DomainError("A1 over a doubled universe needs even rank")
        if self.ambient == DOUBLED_PLUS_ONE and (not isinstance(self.rank, int) or self.rank % 2 == 0):
            raise DomainError("A1 over a doubled-plus-one universe needs odd rank")
        letter = "B" if self.tag == "BC2" else ROOT_TYPE[self.tag]
        rank = self.rank + 1 if self.realization == "tau" else self.rank
        letter = "D" if self.realization == "tau" else letter
        if self.tag == "A1" and self.ambient != PLAIN:
            return
        SimpleType(letter, rank, allow_small=self.allow_small)

    @property
    def twisted(self) -> bool:
        return self.tag in TWISTED

    def parity(self, k: int) -> int:
        return k % 2 if self.twisted else 0

    def degrees(self) -> range:
        return range(-self.window, self.window + 1)

    def with_rank(self, rank: int) -> "LoopType":
        return LoopType(self.tag, rank, self.window, self.variant, self.realization, self.ambient, self.allow_small)

    def with_window(self, window: int) -> "LoopType":
        return LoopType(self.tag, self.rank, window, self.variant, self.realization, self.ambient, self.allow_small)

    def to_json(self) -> dict:
        out = {"type": self.tag, "rank": self.rank, "window": self.window}
        if self.variant != "core":
            out["variant"] = self.variant
        if self.realization != "direct":
            out["realization"] = self.realization
        if self.ambient != PLAIN:
            out["ambient"] = self.ambient
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "LoopType":
        try:
            return cls(data["type"], int(data["rank"]), int(data["window"]),
                       data.get("variant", "core"), data.get("realization", "direct"),
                       data.get("ambient", PLAIN))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad algebra descriptor: {data!r}") from exc


@dataclass(frozen=True)
class BasisVector:
    """Weight-homogeneous basis vector of a graded slice."""

    label: str
    weight: Weight
    amb: Mapping
    part: str  # "g" (grading algebra), "s" (grading module) or "T" (diagonal complement)


@dataclass(frozen=True)
class BasisElement:
    index: int
    degree: int
    slot: int
    weight: Weight
    label: str
    part: str


class GradedElement:
    """Finite sum of x_k (x) t^k plus c and d0 coefficients."""

    __slots__ = ("body", "central", "deriv")

    def __init__(self, body: Mapping[int, Mapping] | None = None, central=0, deriv=0):
        self.body = {int(k): {kk: vv for kk, vv in v.items() if vv} for k, v in (body or {}).items()}
        self.body = {k: v for k, v in self.body.items() if v}
        self.central = Fraction(central)
        self.deriv = Fraction(deriv)

    @classmethod
    def c(cls, coeff=1) -> "GradedElement":
        return cls({}, coeff, 0)

    @classmethod
    def d0(cls, coeff=1) -> "GradedElement":
        return cls({}, 0, coeff)

    @classmethod
    def homogeneous(cls, degree: int, amb: Mapping) -> "GradedElement":
        return cls({degree: dict(amb)})

    def degrees(self) -> list[int]:
        return sorted(self.body)

    def component(self, k: int) -> dict:
        return dict(self.body.get(k, {}))

    def is_zero(self) -> bool:
        return not self.body and not self.central and not self.deriv

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.body == other.body and self.central == other.central and self.deriv == other.deriv

    def __hash__(self):
        return hash((frozenset((k, frozenset(v.items())) for k, v in self.body.items()), self.central, self.deriv))

    def __add__(self, other: "GradedElement") -> "GradedElement":
        body = {k: dict(v) for k, v in self.body.items()}
        for k, v in other.body.items():
            axpy(body.setdefault(k, {}), 1, v)
        return GradedElement(body, self.central + other.central, self.deriv + other.deriv)

    def scale(self, a) -> "GradedElement":
        a = Fraction(a)
        return GradedElement({k: {kk: a * vv for kk, vv in v.items()} for k, v in self.body.items()},
                             a * self.central, a * self.deriv)

    def __rmul__(self, a) -> "GradedElement":
        return self.scale(a)

    def __neg__(self) -> "GradedElement":
        return self.scale(-1)

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def core_part(self) -> "GradedElement":
        return GradedElement(self.body)

    def __repr__(self) -> str:
        parts = []
        for k in self.degrees():
            terms = " + ".join(f"{q_str(v)}*{_key_label(key)}" for key, v in sorted(self.body[k].items()))
            parts.append(f"({terms})t^{k}")
        if self.central:
            parts.append(f"{q_str(self.central)}*c")
        if self.deriv:
            parts.append(f"{q_str(self.deriv)}*d0")
        return "GradedElement(" + (" + ".join(parts) or "0") + ")"


def _key_label(key) -> str:
    if key == IOTA:
        return "iota"
    if key[0] == 0:
        return f"v{key[1]}"
    return f"e{key[0]},{key[1]}"


@dataclass(frozen=True)
class Slice:
    """Matrix, diagonal (iota) and vector parts of one homogeneous component."""

    matrix: FinitaryMatrix | None
    diag: DiagExt
    vector: NaturalVector | None = None


# ambient arithmetic ------------------------------------------------------

def _matmul(x: Mapping, y: Mapping) -> dict:
    rows: dict[int, list] = {}
    for (j, k), w in y.items():
        if j:
            rows.setdefault(j, []).append((k, w))
    out: dict = {}
    for (i, j), v in x.items():
        if i:
            for k, w in rows.get(j, ()):
                out[(i, k)] = out.get((i, k), 0) + v * w
    return out


def commutator(x: Mapping, y: Mapping) -> dict:
    """[x, y] on ambient matrix dicts; iota is central and drops out."""
    out = _matmul(x, y)
    for k, v in _matmul(y, x).items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _matvec(x: Mapping, v: Mapping) -> dict:
    out: dict = {}
    for (i, j), a in x.items():
        if i:
            b = v.get((0, j))
            if b:
                out[(0, i)] = out.get((0, i), 0) + a * b
    return {k: c for k, c in out.items() if c}


class LoopAlgebra:
    """A truncated loop algebra with per-parity slice bases and cached structure constants."""

    def __init__(self, lt: LoopType):
        self.type = lt
        self.window = lt.window
        self._build()
        self._prepare_coords()
        self.basis: list[BasisElement] = []
        self.index: dict[tuple[int, int], int] = {}
        for k in lt.degrees():
            for slot, bv in enumerate(self.slices[lt.parity(k)]):
                idx = len(self.basis)
                self.basis.append(BasisElement(idx, k, slot, bv.weight, f"{bv.label}@t^{k}", bv.part))
                self.index[(k, slot)] = idx
        self._table: dict[tuple[int, int], dict | None] = {}

    # construction

    def _build(self):
        lt = self.type
        n = lt.rank
        self.involution_letter = None
        if lt.tag == "A1":
            if lt.ambient == PLAIN:
                self.universe = IndexUniverse(PLAIN, n)
            elif lt.ambient == DOUBLED:
                self.universe = IndexUniverse(DOUBLED, n // 2)
            else:
                self.universe = IndexUniverse(DOUBLED_PLUS_ONE, (n - 1) // 2)
            self._wf = lambda a, b: ({a: 1, b: -1} if a != b else {})
            g = []
            for a in range(1, n + 1):
                for b in range(1, n + 1):
                    if a != b:
                        g.append(BasisVector(Weight.of({a: 1, b: -1}).label(), Weight.of({a: 1, b: -1}),
                                             {(a, b): Fraction(1)}, "g"))
            g.sort(key=lambda bv: bv.weight)
            for i in range(1, n):
                g.append(BasisVector(f"h{i}", Weight.zero(), {(i, i): Fraction(1), (i + 1, i + 1): Fraction(-1)}, "g"))
            if lt.variant in ("max", "full"):
                g.append(BasisVector("ejj", Weight.zero(), {(n, n): Fraction(1)}, "T"))
            if lt.variant == "full":
                g.append(BasisVector("iota", Weight.zero(), {IOTA: Fraction(1)}, "T"))
            self.slices = {0: g}
            return
        if lt.tag in UNTWISTED:
            letter = UNTWISTED[lt.tag]
            self.universe = universe_for(letter, n)
            self._wf = self._entry_wf
            self.slices = {0: self._from_pairs(basis_of(SimpleType(letter, n, lt.allow_small)), "g")}
            return
        if lt.tag == "B2" and lt.realization == "tau":
            u = IndexUniverse(DOUBLED, n + 1)
            self.universe = u
            self._wf = self._tau_wf
            sig = lambda x: sigma("D", x)
            even = graded_eigenbasis(u, [(sig, 1), (tau, 1)], weight_fn=self._tau_wf)
            odd = graded_eigenbasis(u, [(sig, 1), (tau, -1)], weight_fn=self._tau_wf)
            self.slices = {0: self._from_pairs(even, "g"), 1: self._from_pairs(odd, "s")}
            return
        if lt.tag == "B2":
            self.universe = universe_for("B", n)
            self._wf = self._entry_wf
            even = self._from_pairs(basis_of(SimpleType("B", n, lt.allow_small)), "g")
            odd = []
            for w, v in grading_module("B2", n).basis:
                odd.append(BasisVector(f"v[{w.label()}]", w, {vkey(i): c for i, c in v.entries.items()}, "s"))
            self.slices = {0: even, 1: odd}
            return
        letter = "C" if lt.tag == "C2" else "B"
        self.involution_letter = letter
        self.universe = universe_for(letter, n)
        self._wf = self._entry_wf
        even = self._from_pairs(basis_of(SimpleType(letter, n, lt.allow_small)), "g")
        odd = self._from_pairs(list(grading_module(lt.tag, n).basis), "s")
        if lt.variant == "max":
            odd.append(BasisVector("p0", Weight.zero(), self._p0(), "T"))
        self.slices = {0: even, 1: odd}

    def _p0(self) -> dict:
        n = self.type.rank
        if self.type.tag == "C2":
            return {(n, n): Fraction(1), (2 * n, 2 * n): Fraction(1)}
        return {(2 * n + 1, 2 * n + 1): Fraction(1)}

    def _entry_wf(self, a: int, b: int) -> dict:
        u = self.universe
        out = dict(u.weight_of_index(a))
        for k, c in u.weight_of_index(b).items():
            out[k] = out.get(k, 0) - c
        return out

    def _tau_index_weight(self, i: int) -> dict:
        n = self.type.rank
        if i <= n:
            return {i: 1}
        if n + 2 <= i <= 2 * n + 1:
            return {i - n - 1: -1}
        return {}

    def _tau_wf(self, a: int, b: int) -> dict:
        out = dict(self._tau_index_weight(a))
        for k, c in self._tau_index_weight(b).items():
            out[k] = out.get(k, 0) - c
        return out

    @staticmethod
    def _from_pairs(pairs, part: str) -> list[BasisVector]:
        out, zero_count = [], 0
        for w, x in pairs:
            if w.is_zero():
                zero_count += 1
                label = f"{'h' if part == 'g' else 's0_'}{zero_count}"
            else:
                label = w.label() if part == "g" else f"s[{w.label()}]"
            out.append(BasisVector(label, w, dict(x.entries), part))
        return out

    def key_weight(self, key) -> Weight:
        cache = self.__dict__.setdefault("_kw", {})
        w = cache.get(key)
        if w is None:
            if key == IOTA:
                w = Weight.zero()
            elif key[0] == 0:
                w = Weight.of(self._vec_weight(key[1]))
            else:
                w = Weight.of(self._wf(*key))
            cache[key] = w
        return w

    def _vec_weight(self, i: int) -> dict:
        return self.universe.weight_of_index(i)

    def _prepare_coords(self):
        self._groups: dict[int, dict[Weight, tuple]] = {}
        for par, slc in self.slices.items():
            groups: dict[Weight, list[int]] = {}
            for slot, bv in enumerate(slc):
                if any(self.key_weight(k) != bv.weight for k in bv.amb):
                    raise StructuralError(f"basis vector {bv.label} is not weight-homogeneous")
                groups.setdefault(bv.weight, []).append(slot)
            prepared = {}
            for w, slots in groups.items():
                ech = Echelon()
                for s in slots:
                    ech.add(slc[s].amb)
                if ech.rank != len(slots):
                    raise StructuralError(f"dependent basis in weight {w.label()}")
                pivots = ech.pivots()
                m = [[slc[s].amb.get(p, 0) for s in slots] for p in pivots]
                prepared[w] = (slots, pivots, inverse_dense(m))
            self._groups[par] = prepared

    # basic queries

    @property
    def tag(self) -> str:
        return self.type.tag

    def parity(self, k: int) -> int:
        return self.type.parity(k)

    def slice_basis(self, k: int) -> list[BasisVector]:
        return self.slices[self.parity(k)]

    def in_window(self, k: int) -> bool:
        return -self.window <= k <= self.window

    def indices_at(self, k: int) -> list[int]:
        return [self.index[(k, s)] for s in range(len(self.slice_basis(k)))]

    def indices_of_weight(self, w: Weight, k: int) -> list[int]:
        if not self.in_window(k):
            return []
        g = self._groups[self.parity(k)].get(w)
        return [self.index[(k, s)] for s in g[0]] if g else []

    def dim(self, k: int | None = None) -> int:
        if k is None:
            return len(self.basis)
        return len(self.slice_basis(k))

    def weights(self) -> list[Weight]:
        return sorted({bv.weight for slc in self.slices.values() for bv in slc})

    def t_prime_slots(self, k: int) -> list[int]:
        return [s for s, bv in enumerate(self.slice_basis(k)) if bv.part == "T"]

    def element(self, idx: int, coeff=1) -> GradedElement:
        b = self.basis[idx]
        amb = self.slice_basis(b.degree)[b.slot].amb
        c = Fraction(coeff)
        return GradedElement({b.degree: {k: c * v for k, v in amb.items()}})

    # coordinates

    def slot_coords(self, amb: Mapping, k: int) -> dict[int, Fraction]:
        """Coordinates of an ambient component in the slice basis at degree k."""
        groups = self._groups[self.parity(k)]
        slc = self.slice_basis(k)
        by_w: dict[Weight, dict] = {}
        for key, v in amb.items():
            if v:
                by_w.setdefault(self.key_weight(key), {})[key] = v
        out: dict[int, Fraction] = {}
        for w, part in by_w.items():
            g = groups.get(w)
            if g is None:
                raise StructuralError(f"component of weight {w.label()} is not in the degree-{k} slice")
            slots, pivots, minv = g
            vec = [part.get(p, 0) for p in pivots]
            coeffs = [sum((a * b for a, b in zip(row, vec) if a and b), Fraction(0)) for row in minv]
            recon: dict = {}
            for s, c in zip(slots, coeffs):
                if c:
                    axpy(recon, c, slc[s].amb)
                    out[s] = c
            if recon != part:
                raise StructuralError(f"component of weight {w.label()} is not in the degree-{k} slice")
        return out

    def coords(self, x: GradedElement) -> dict[int, Fraction]:
        """Coordinates over the global basis (central and d0 parts ignored)."""
        out = {}
        for k, amb in x.body.items():
            if not self.in_window(k):
                raise WindowError([k], self.window)
            for s, c in self.slot_coords(amb, k).items():
                out[self.index[(k, s)]] = c
        return out

    def from_coords(self, v: Mapping[int, object], central=0, deriv=0) -> GradedElement:
        body: dict[int, dict] = {}
        for idx, c in v.items():
            if c:
                b = self.basis[idx]
                axpy(body.setdefault(b.degree, {}), Fraction(c), self.slice_basis(b.degree)[b.slot].amb)
        return GradedElement(body, central, deriv)

    def contains(self, x: GradedElement) -> bool:
        try:
            self.coords(x)
        except (StructuralError, WindowError):
            return False
        return True

    # brackets

    def amb_bracket(self, x: Mapping, kx: int, y: Mapping, ky: int) -> dict:
        """Bracket of homogeneous ambient components of degrees kx and ky."""
        if self.tag == "B2" and self.type.realization == "direct":
            px, py = kx % 2, ky % 2
            if px == 0 and py == 0:
                return commutator(x, y)
            if px == 0:
                return _matvec(x, y)
            if py == 0:
                return {k: -v for k, v in _matvec(y, x).items()}
            return self._d_op(x, y)
        return commutator(x, y)

    def _d_op(self, v: Mapping, w: Mapping) -> dict:
        """D_{v,w} = v w^t s - w v^t s on ambient vectors."""
        u = self.universe
        out: dict = {}
        for (_, a), va in v.items():
            for (_, c), wc in w.items():
                pc, pa = u.partner(c), u.partner(a)
                out[(a, pc)] = out.get((a, pc), 0) + va * wc
                out[(c, pa)] = out.get((c, pa), 0) - wc * va
        return {k: x for k, x in out.items() if x}

    def trace_pair(self, x: Mapping, kx: int, y: Mapping, ky: int) -> Fraction:
        """Ambient trace pairing: tr(xy) on matrices (iota paired via the trace), 2 v^t s w on vectors."""
        if self.tag == "B2" and self.type.realization == "direct" and kx % 2 == 1:
            if ky % 2 != 1:
                return Fraction(0)
            u = self.universe
            return 2 * sum((va * y.get((0, u.partner(a)), 0) for (_, a), va in x.items()), Fraction(0))
        total = Fraction(0)
        for (a, b), v in x.items():
            if a:
                w = y.get((b, a))
                if w:
                    total += v * w
        sx, sy = x.get(IOTA, 0), y.get(IOTA, 0)
        if sx:
            total += sx * sum((v for (a, b), v in y.items() if a and a == b), Fraction(0))
        if sy:
            total += sy * sum((v for (a, b), v in x.items() if a and a == b), Fraction(0))
        return total

    def bracket_indices(self, i: int, j: int) -> dict[int, Fraction] | None:
        """Coordinates of [b_i, b_j]; None when the degree leaves the window."""
        key = (i, j)
        if key in self._table:
            return self._table[key]
        bi, bj = self.basis[i], self.basis[j]
        k = bi.degree + bj.degree
        if not self.in_window(k):
            self._table[key] = None
            return None
        amb = self.amb_bracket(self.slice_basis(bi.degree)[bi.slot].amb, bi.degree,
                               self.slice_basis(bj.degree)[bj.slot].amb, bj.degree)
        res = {self.index[(k, s)]: c for s, c in self.slot_coords(amb, k).items()}
        self._table[key] = res
        return res

    def bracket(self, x: GradedElement, y: GradedElement) -> GradedElement:
        return loop_bracket(self, x, y)

    # views and serialization

    def slice_view(self, x: GradedElement, k: int) -> Slice:
        amb = x.body.get(k, {})
        mat = {key: v for key, v in amb.items() if key[0]}
        vec = {key[1]: v for key, v in amb.items() if key[0] == 0 and key[1]}
        return Slice(FinitaryMatrix(self.universe, mat), DiagExt({}, amb.get(IOTA, 0)),
                     NaturalVector(self.universe, vec) if vec else None)

    def element_to_json(self, x: GradedElement) -> dict:
        out: dict = {}
        for k in x.degrees():
            sv = self.slice_view(x, k)
            entry = {"matrix": sv.matrix.to_json(), "diag": sv.diag.to_json()}
            if sv.vector is not None:
                entry["vector"] = sv.vector.to_json()
            out[str(k)] = entry
        out["c"] = q_str(x.central)
        out["d"] = q_str(x.deriv)
        return out

    def element_from_json(self, data: Mapping) -> GradedElement:
        if not isinstance(data, Mapping):
            raise ParseError("element must be a JSON object")
        body: dict[int, dict] = {}
        try:
            for key, entry in data.items():
                if key in ("c", "d"):
                    continue
                k = int(key)
                amb: dict = {}
                for i, j, v in entry.get("matrix", []):
                    axpy(amb, 1, {(int(i), int(j)): as_q(v)})
                diag = DiagExt.from_json(entry.get("diag", {}))
                for i, v in diag.finite:
                    axpy(amb, 1, {(i, i): v})
                if diag.scalar:
                    amb[IOTA] = amb.get(IOTA, 0) + diag.scalar
                for i, v in entry.get("vector", []):
                    axpy(amb, 1, {(0, int(i)): as_q(v)})
                for kk in amb:
                    if kk != IOTA and not all(z in self.universe for z in (kk if kk[0] else kk[1:])):
                        raise ParseError(f"index {kk} outside {self.universe}")
                body[k] = amb
            x = GradedElement(body, as_q(data.get("c", "0")), as_q(data.get("d", "0")))
        except (TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad element: {exc}") from exc
        return x

    def summary(self) -> dict:
        """Graded dimension table per degree and per weight."""
        rows = []
        for k in self.type.degrees():
            by_w: dict[str, int] = {}
            for bv in self.slice_basis(k):
                by_w[bv.weight.label()] = by_w.get(bv.weight.label(), 0) + 1
            rows.append({"degree": k, "dim": self.dim(k), "weights": dict(sorted(by_w.items()))})
        return {"algebra": self.type.to_json(), "universe": self.universe.to_json(),
                "total_dim": len(self.basis), "degrees": rows}


_CACHE: dict[LoopType, LoopAlgebra] = {}


def build(lt: LoopType | str, rank: int | None = None, window: int | None = None, **kw) -> LoopAlgebra:
    """Construct (and memoize) the truncated loop algebra of a descriptor."""
    if isinstance(lt, str):
        lt = LoopType(lt, rank, window, **kw)
    alg = _CACHE.get(lt)
    if alg is None:
        alg = _CACHE[lt] = LoopAlgebra(lt)
    return alg


def d0_action(x: GradedElement) -> GradedElement:
    """Degree derivation: multiplies the t^k component by k."""
    return GradedElement({k: {kk: k * v for kk, v in amb.items()} for k, amb in x.body.items()})


def loop_bracket(L: LoopAlgebra, x: GradedElement, y: GradedElement) -> GradedElement:
    """Bracket without the cocycle term; d0 acts by degree, c is central."""
    body: dict[int, dict] = {}
    overflow = []
    for a, xa in x.body.items():
        for b, yb in y.body.items():
            z = L.amb_bracket(xa, a, yb, b)
            if not z:
                continue
            if not L.in_window(a + b):
                overflow.append(a + b)
                continue
            axpy(body.setdefault(a + b, {}), 1, z)
    if overflow:
        raise WindowError(overflow, L.window)
    out = GradedElement(body)
    if x.deriv:
        out = out + d0_action(y).scale(x.deriv)
    if y.deriv:
        out = out - d0_action(x).scale(y.deriv)
    return out


def shift(m: int, x: GradedElement, window: int | None = None) -> GradedElement:
    """s_m: moves the t^k component to t^(k+m); c and d0 parts are dropped."""
    body = {k + m: dict(v) for k, v in x.body.items()}
    if window is not None:
        bad = [k for k in body if abs(k) > window]
        if bad:
            raise WindowError(bad, window)
    return GradedElement(body)


# twisting -------------------------------------------------------------------

def _amb_to_matrix(u: IndexUniverse, amb: Mapping) -> FinitaryMatrix:
    if IOTA in amb or any(k[0] == 0 for k in amb):
        raise StructuralError("twisting acts on matrix components only")
    return FinitaryMatrix(u, amb)


def hat_sigma(L: LoopAlgebra, x: GradedElement) -> GradedElement:
    """(-1)^k sigma(x_k) on A1 over a doubled universe; (-1)^k tau(x_k) on D1."""
    theta = _twist_map(L)
    body = {}
    for k, amb in x.body.items():
        y = theta(_amb_to_matrix(L.universe, amb))
        body[k] = {kk: (v if k % 2 == 0 else -v) for kk, v in y.entries.items()}
    return GradedElement(body, x.central, x.deriv)


hat_tau = hat_sigma


def _twist_map(L: LoopAlgebra):
    if L.tag == "A1" and L.universe.kind == DOUBLED:
        return lambda m: sigma("C", m)
    if L.tag == "A1" and L.universe.kind == DOUBLED_PLUS_ONE:
        return lambda m: sigma("B", m)
    if L.tag == "D1":
        return tau
    raise DomainError("twisting needs A1 over a doubled universe or D1")


@dataclass
class FixedAlgebra:
    """Fixed points of a twisting automorphism, degree by degree."""

    source: LoopType
    automorphism: str
    target: LoopType
    bases: dict[int, list[dict]] = field(default_factory=dict)

    def dims(self) -> dict[int, int]:
        return {k: len(v) for k, v in sorted(self.bases.items())}


def fixed_algebra(L: LoopAlgebra, automorphism: str = "sigma") -> FixedAlgebra:
    """Solve hat_theta(x) = x on each slice of L by linear algebra."""
    if automorphism not in ("sigma", "tau"):
        raise DomainError(f"unknown automorphism {automorphism!r}")
    if (automorphism == "tau") != (L.tag == "D1"):
        raise DomainError("tau twists D1; sigma twists A1 over a doubled universe")
    theta = _twist_map(L)
    lt = L.type
    if L.tag == "D1":
        target = LoopType("B2", lt.rank - 1, lt.window, realization="tau")
    elif L.universe.kind == DOUBLED:
        target = LoopType("C2", L.universe.n, lt.window)
    else:
        target = LoopType("BC2", L.universe.n, lt.window)
    per_parity = {}
    for par in (0, 1):
        slc = L.slices[0]
        sign = 1 if par == 0 else -1
        eqs: dict[tuple, dict] = {}
        for j, bv in enumerate(slc):
            img = theta(_amb_to_matrix(L.universe, bv.amb)).entries
            diff = {k: sign * v for k, v in img.items()}
            axpy(diff, -1, bv.amb)
            for key, v in diff.items():
                eqs.setdefault(key, {})[j] = v
        kernel = nullspace(list(eqs.values()), list(range(len(slc))))
        vecs = []
        for vec in kernel:
            amb: dict = {}
            for j, c in vec.items():
                axpy(amb, c, slc[j].amb)
            vecs.append(amb)
        per_parity[par] = vecs
    bases = {k: per_parity[k % 2] for k in lt.degrees()}
    return FixedAlgebra(lt, automorphism, target, bases)


# directed union ---------------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Block-respecting index injection from rank n to rank n' >= n."""

    source: LoopType
    target: LoopType
    index_map: tuple[tuple[int, int], ...]

    @classmethod
    def standard(cls, source: LoopType, target: LoopType) -> "Embedding":
        if source.tag != target.tag or source.realization != target.realization or source.ambient != target.ambient:
            raise StructuralError("embedding needs matching type descriptors")
        if target.rank < source.rank:
            raise StructuralError("target rank must not be smaller")
        if source.realization == "tau" or source.ambient != PLAIN:
            raise StructuralError("standard embeddings are defined for the plain realizations")
        n, m = source.rank, target.rank
        su = build(source).universe
        if su.kind == PLAIN:
            mp = {i: i for i in range(1, n + 1)}
        else:
            mp = {i: i for i in range(1, n + 1)}
            mp.update({n + i: m + i for i in range(1, n + 1)})
            if su.kind == DOUBLED_PLUS_ONE:
                mp[2 * n + 1] = 2 * m + 1
        return cls(source, target, tuple(sorted(mp.items())))

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.index_map)


def embed(e: Embedding, x: GradedElement) -> GradedElement:
    """Relabel indices of every component through the injection."""
    mp = e.mapping
    body = {}
    for k, amb in x.body.items():
        out = {}
        for key, v in amb.items():
            if key == IOTA:
                nk = IOTA
            elif key[0] == 0:
                nk = (0, mp[key[1]])
            else:
                nk = (mp[key[0]], mp[key[1]])
            out[nk] = v
        body[k] = out
    return GradedElement(body, x.central, x.deriv)


def iter_interior_pairs(L: LoopAlgebra) -> Iterator[tuple[int, int]]:
    """Index pairs whose bracket stays in the window."""
    for i, bi in enumerate(L.basis):
        for j, bj in enumerate(L.basis):
            if L.in_window(bi.degree + bj.degree):
                yield i, j
