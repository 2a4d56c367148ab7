"""Axiom checks, root data extended by Z, the diagonal-derivation solver, centers and spectra."""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import DomainError, MarginError, StructuralError
from .exact import q_str
from .forms import FormSpec, cocycle, extended_bracket, form_eval, t_xi
from .linalg import Echelon, axpy, nullspace
from .loops import (
    IOTA,
    ROOT_TYPE,
    TAGS,
    GradedElement,
    LoopAlgebra,
    LoopType,
    build,
    d0_action,
    loop_bracket,
)
from .matrices import DiagExt, sigma, tau
from .simple_lie import RootLengthClass, Weight, cartan_integer, reduced_roots, root_length, roots_of


# reports ---------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.detail:
            out["detail"] = self.detail
        out["witness"] = self.witness if not self.passed else None
        return out


@dataclass
class VerificationReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "", witness=None) -> Check:
        if not passed and witness is None:
            witness = {"note": detail or name}
        c = Check(name, bool(passed), detail, witness)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.witness))

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self, timing: bool = False) -> dict:
        out = {"suite": self.suite, "passed": self.passed, "checks": [c.to_json() for c in self.checks]}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _timed(report: VerificationReport, start: float) -> VerificationReport:
    report.seconds = time.perf_counter() - start
    return report


def _coords_json(v: Mapping) -> dict:
    return {str(k): q_str(c) for k, c in sorted(v.items())}


# structure tables ----------------------------------------------------------------

class StructureTable:
    """Structure constants of L, optionally extended by c (and d0), over a flat index set.

    Loop basis indices come first; c and d0 follow.  Individual products can be
    overridden to inject faults.
    """

    def __init__(self, L: LoopAlgebra, extended: bool = False, spec: FormSpec | None = None, with_d: bool = False):
        self.L = L
        self.extended = extended or with_d
        self.with_d = with_d
        self.spec = spec or FormSpec()
        n = len(L.basis)
        self.c_index = n if self.extended else None
        self.d_index = n + 1 if with_d else None
        self.size = n + (1 if self.extended else 0) + (1 if with_d else 0)
        self._form: dict[tuple[int, int], Fraction] = {}
        self._override: dict[tuple[int, int], dict] = {}

    def degree(self, i: int) -> int:
        return self.L.basis[i].degree if i < len(self.L.basis) else 0

    def weight(self, i: int) -> Weight:
        return self.L.basis[i].weight if i < len(self.L.basis) else Weight.zero()

    def label(self, i: int) -> str:
        if i == self.c_index:
            return "c"
        if i == self.d_index:
            return "d0"
        return self.L.basis[i].label

    def indices(self) -> range:
        return range(self.size)

    def corrupt(self, i: int, j: int, value: Mapping[int, object]):
        """Replace [b_i, b_j] (and, antisymmetrically, [b_j, b_i])."""
        v = {k: Fraction(x) for k, x in value.items() if x}
        self._override[(i, j)] = v
        self._override[(j, i)] = {k: -x for k, x in v.items()}

    def form(self, i: int, j: int) -> Fraction:
        key = (i, j)
        if key not in self._form:
            L = self.L
            if self.degree(i) + self.degree(j) != 0:
                val = Fraction(0)
            else:
                val = form_eval(self.spec, L, self.element(i), self.element(j))
            self._form[key] = val
        return self._form[key]

    def element(self, i: int) -> GradedElement:
        if i == self.c_index:
            return GradedElement.c()
        if i == self.d_index:
            return GradedElement.d0()
        return self.L.element(i)

    def bracket(self, i: int, j: int) -> dict[int, Fraction] | None:
        if (i, j) in self._override:
            return dict(self._override[(i, j)])
        n = len(self.L.basis)
        if i >= n or j >= n:
            if i == self.d_index and j < n:
                k = self.degree(j)
                return {j: Fraction(k)} if k else {}
            if j == self.d_index and i < n:
                k = self.degree(i)
                return {i: Fraction(-k)} if k else {}
            return {}
        res = self.L.bracket_indices(i, j)
        if res is None:
            return None
        res = dict(res)
        if self.extended:
            k = self.degree(i)
            if k and k + self.degree(j) == 0:
                phi = k * self.form(i, j)
                if phi:
                    res[self.c_index] = phi
        return res

    def bracket_vec(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> dict | None:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                r = self.bracket(i, j)
                if r is None:
                    return None
                axpy(out, a * b, r)
        return out

    def vec_to_element(self, v: Mapping[int, Fraction]) -> GradedElement:
        n = len(self.L.basis)
        core = self.L.from_coords({i: c for i, c in v.items() if i < n})
        return GradedElement(core.body, v.get(self.c_index, 0) if self.extended else 0,
                             v.get(self.d_index, 0) if self.with_d else 0)

    def element_to_vec(self, x: GradedElement) -> dict[int, Fraction]:
        out = dict(self.L.coords(x))
        if x.central:
            if not self.extended:
                raise StructuralError("central part in a plain table")
            out[self.c_index] = x.central
        if x.deriv:
            if not self.with_d:
                raise StructuralError("d0 part in a table without d0")
            out[self.d_index] = x.deriv
        return out


def _in_window(T: StructureTable, *degs: int) -> bool:
    return all(T.L.in_window(d) for d in degs)


# Jacobi and cocycle ------------------------------------------------------------------

def check_jacobi(T: StructureTable, limit: int | None = None) -> VerificationReport:
    """Antisymmetry on all pairs and Jacobi on every interior triple i < j < k."""
    start = time.perf_counter()
    rep = VerificationReport("jacobi")
    idx = list(T.indices())
    bad_anti = None
    for i in idx:
        for j in idx:
            if j < i:
                continue
            a, b = T.bracket(i, j), T.bracket(j, i)
            if a is None:
                continue
            neg = {k: -v for k, v in b.items()}
            if a != neg:
                bad_anti = {"pair": [T.label(i), T.label(j)]}
                break
        if bad_anti:
            break
    rep.add("antisymmetry", bad_anti is None, witness=bad_anti)
    count, bad = 0, None
    deg = T.degree
    for i, j, k in itertools.combinations(idx, 3):
        di, dj, dk = deg(i), deg(j), deg(k)
        if not _in_window(T, di + dj, dj + dk, di + dk, di + dj + dk):
            continue
        total: dict = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            inner = T.bracket(b, c)
            for l, v in inner.items():
                axpy(total, v, T.bracket(a, l))
        count += 1
        if total:
            bad = {"triple": [T.label(i), T.label(j), T.label(k)], "jacobiator": _coords_json(total)}
            break
        if limit and count >= limit:
            break
    rep.add("jacobi", bad is None, f"{count} interior triples", bad)
    return _timed(rep, start)


def random_element(L: LoopAlgebra, rng: random.Random, degrees: Iterable[int], terms: int = 3) -> GradedElement:
    """Sparse random combination of basis elements with small rational coefficients."""
    degrees = [d for d in degrees if L.in_window(d)]
    pool = [i for d in degrees for i in L.indices_at(d)]
    out = GradedElement()
    for _ in range(terms):
        i = rng.choice(pool)
        coeff = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        out = out + L.element(i, coeff)
    return out


def check_cocycle(L: LoopAlgebra, spec: FormSpec, trials: int = 1000, seed: int = 0) -> VerificationReport:
    """phi(u, u) = 0 and the cyclic identity on seeded random triples."""
    start = time.perf_counter()
    rep = VerificationReport("cocycle")
    rng = random.Random(seed)
    span = max(1, L.window // 2)
    degs = range(-span, span + 1)
    bad_alt = bad_cyc = None
    for t in range(trials):
        u, v, w = (random_element(L, rng, degs) for _ in range(3))
        if cocycle(spec, L, u, u) and bad_alt is None:
            bad_alt = {"trial": t, "u": L.element_to_json(u)}
        total = (cocycle(spec, L, loop_bracket(L, u, v), w) + cocycle(spec, L, loop_bracket(L, v, w), u)
                 + cocycle(spec, L, loop_bracket(L, w, u), v))
        if total and bad_cyc is None:
            bad_cyc = {"trial": t, "value": q_str(total)}
    rep.add("alternating", bad_alt is None, f"{trials} trials", bad_alt)
    rep.add("cyclic identity", bad_cyc is None, f"{trials} trials", bad_cyc)
    return _timed(rep, start)


# forms --------------------------------------------------------------------------

def check_form(L: LoopAlgebra, spec: FormSpec, trials: int = 200, seed: int = 0) -> VerificationReport:
    """Symmetry, gradedness, invariance under the extended bracket, skewness of d0."""
    start = time.perf_counter()
    rep = VerificationReport("forms")
    rng = random.Random(seed)
    span = max(1, L.window // 2)
    degs = list(range(-span, span + 1))
    sym = graded = inv = skew = None
    for t in range(trials):
        x, y, z = (random_element(L, rng, degs) for _ in range(3))
        x = x + GradedElement({}, rng.randint(-2, 2), rng.randint(-2, 2))
        y = y + GradedElement({}, rng.randint(-2, 2), rng.randint(-2, 2))
        if form_eval(spec, L, x, y) != form_eval(spec, L, y, x) and sym is None:
            sym = {"trial": t}
        a, b = rng.choice(degs), rng.choice(degs)
        if a + b:
            xa = random_element(L, rng, [a])
            yb = random_element(L, rng, [b])
            if form_eval(spec, L, xa, yb) and graded is None:
                graded = {"trial": t, "degrees": [a, b]}
        lhs = form_eval(spec, L, extended_bracket(L, spec, x, y), z)
        rhs = form_eval(spec, L, x, extended_bracket(L, spec, y, z))
        if lhs != rhs and inv is None:
            inv = {"trial": t, "lhs": q_str(lhs), "rhs": q_str(rhs)}
        u, v = x.core_part(), y.core_part()
        if form_eval(spec, L, d0_action(u), v) != -form_eval(spec, L, u, d0_action(v)) and skew is None:
            skew = {"trial": t}
    rep.add("symmetric", sym is None, f"{trials} trials", sym)
    rep.add("graded", graded is None, f"{trials} trials", graded)
    rep.add("invariant", inv is None, f"{trials} trials", inv)
    rep.add("d0 skew", skew is None, f"{trials} trials", skew)
    return _timed(rep, start)


def check_root_pairs(L: LoopAlgebra, spec: FormSpec) -> VerificationReport:
    """[x, y] = B(x, y) t_xi for all basis pairs in L_xi x L_-xi, xi != 0; t_delta = c."""
    start = time.perf_counter()
    rep = VerificationReport("root-pairs")
    tdelta = t_xi(spec, L, (Weight.zero(), 1))
    rep.add("t_delta = c", tdelta.to_element() == GradedElement.c(), witness={"t_delta": tdelta.to_json()})
    cache: dict = {}
    count, bad = 0, None
    for i, b in enumerate(L.basis):
        if b.weight.is_zero() and b.degree == 0:
            continue
        for j in L.indices_of_weight(-b.weight, -b.degree):
            key = (b.weight, b.degree)
            if key not in cache:
                cache[key] = t_xi(spec, L, key).to_element()
            x, y = L.element(i), L.element(j)
            lhs = extended_bracket(L, spec, x, y)
            rhs = cache[key].scale(form_eval(spec, L, x, y))
            count += 1
            if lhs != rhs:
                bad = {"pair": [b.label, L.basis[j].label]}
                break
        if bad:
            break
    rep.add("root pairs", bad is None, f"{count} root-space pairs", bad)
    return _timed(rep, start)


# torus axioms --------------------------------------------------------------

def delta_of(L: LoopAlgebra) -> tuple[str, int]:
    """Root system type letter and rank of L."""
    if L.tag == "A1" and L.universe.kind != "plain":
        return "A", L.universe.size
    return ROOT_TYPE[L.tag], L.type.rank


def check_lie_torus(T: StructureTable) -> VerificationReport:
    """(LT1)-(LT5) on the truncated algebra described by a structure table."""
    start = time.perf_counter()
    rep = VerificationReport("torus")
    L = T.L
    letter, n = delta_of(L)
    roots = set(roots_of(letter, n))
    idx = [i for i in T.indices() if i != T.d_index]

    # LT1
    stray = [T.label(i) for i in idx if not (T.weight(i).is_zero() or T.weight(i) in roots)]
    bad = {"weights outside the root system": stray} if stray else None
    if bad is None:
        for i in idx:
            for j in idx:
                r = T.bracket(i, j)
                if not r:
                    continue
                w = T.weight(i) + T.weight(j)
                k = T.degree(i) + T.degree(j)
                off = [l for l in r if T.weight(l) != w or T.degree(l) != k]
                if off:
                    bad = {"triple": [T.label(i), T.label(j), T.label(off[0])]}
                    break
            if bad:
                break
    rep.add("LT1", bad is None, "bracket respects the double grading", bad)

    # LT2
    by_key: dict[tuple[Weight, int], list[int]] = {}
    for i in idx:
        by_key.setdefault((T.weight(i), T.degree(i)), []).append(i)
    bad = None
    for g in L.type.degrees():
        target = by_key.get((Weight.zero(), g), [])
        ech = Echelon()
        for (w, h), xs in by_key.items():
            if w.is_zero() or not L.in_window(g - h):
                continue
            for y in by_key.get((-w, g - h), []):
                for x in xs:
                    r = T.bracket(x, y)
                    if r:
                        ech.add(r)
        if ech.rank != len(target) or any(not ech.contains({t: 1}) for t in target):
            bad = {"degree": g, "span": ech.rank, "dim": len(target)}
            break
    rep.add("LT2", bad is None, "zero-weight spaces spanned by root brackets", bad)

    # LT3
    bad = None
    for (w, g), xs in sorted(by_key.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if w.is_zero():
            continue
        ys = by_key.get((-w, -g))
        if not ys:
            bad = {"root": w.label(), "degree": g, "reason": "no opposite space"}
            break
        x, y = xs[0], ys[0]
        t = T.bracket(x, y)
        tx = T.bracket_vec(t, {x: Fraction(1)})
        lam = tx.get(x, Fraction(0)) if tx is not None else Fraction(0)
        if not lam:
            bad = {"root": w.label(), "degree": g, "reason": "[x, y] kills x"}
            break
        t = {k: v * 2 / lam for k, v in t.items()}
        for z in idx:
            r = T.bracket_vec(t, {z: Fraction(1)})
            expect = cartan_integer(T.weight(z), w) if not T.weight(z).is_zero() else Fraction(0)
            want = {z: expect} if expect else {}
            if r != want:
                bad = {"root": w.label(), "degree": g, "z": T.label(z)}
                break
        if bad:
            break
    rep.add("LT3", bad is None, "coroot action by Cartan integers", bad)

    # LT4
    bad = None
    red = set(reduced_roots(letter, n))
    for (w, g), xs in by_key.items():
        if not w.is_zero() and len(xs) > 1:
            bad = {"root": w.label(), "degree": g, "dim": len(xs)}
            break
    if bad is None:
        for mu in red:
            if len(by_key.get((mu, 0), [])) != 1:
                bad = {"root": mu.label(), "degree": 0, "dim": len(by_key.get((mu, 0), []))}
                break
    rep.add("LT4", bad is None, "root spaces at most one-dimensional", bad)

    # LT5
    support = sorted({T.degree(i) for i in idx if T.degree(i)})
    g = 0
    for k in support:
        g = math.gcd(g, k)
    rep.add("LT5", g == 1, f"support generates {g}Z", None if g == 1 else {"gcd": g})
    return _timed(rep, start)


# root data ---------------------------------------------------------------------

@dataclass(frozen=True)
class Progression:
    """The set residue + modulus*Z (modulus >= 1)."""

    modulus: int
    residue: int = 0

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError("progression modulus must be positive")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def __contains__(self, g: int) -> bool:
        return (g - self.residue) % self.modulus == 0

    def minus_multiple(self, k: int, other: "Progression") -> "Progression":
        """self - k*other."""
        if k == 0:
            return self
        return Progression(math.gcd(self.modulus, abs(k) * other.modulus), self.residue - k * other.residue)

    def plus(self, other: "Progression") -> "Progression":
        return Progression(math.gcd(self.modulus, other.modulus), self.residue + other.residue)

    def times(self, k: int) -> "Progression":
        return Progression(abs(k) * self.modulus, k * self.residue)

    def subset_of(self, other: "Progression") -> bool:
        return self.modulus % other.modulus == 0 and self.residue in other

    def meets(self, other: "Progression") -> bool:
        return (self.residue - other.residue) % math.gcd(self.modulus, other.modulus) == 0

    def generated(self) -> int:
        """Generator of the subgroup spanned by the set."""
        return math.gcd(self.modulus, self.residue)

    def label(self) -> str:
        if self.modulus == 1:
            return "Z"
        return f"{self.modulus}Z" if self.residue == 0 else f"{self.modulus}Z+{self.residue}"

    @classmethod
    def parse(cls, text: str) -> "Progression":
        text = text.replace(" ", "")
        if text == "Z":
            return cls(1)
        m, _, r = text.partition("Z")
        return cls(int(m or 1), int(r or 0))


Z = Progression(1)
TWO_Z = Progression(2)
TWO_Z_PLUS_ONE = Progression(2, 1)


@dataclass(frozen=True)
class RootDatum:
    """Root system Delta of type letter_rank with S_mu depending on the length class of mu."""

    name: str
    letter: str
    rank: int
    S: tuple  # ((RootLengthClass, Progression), ...)
    zero: Progression = Z

    def s_of(self, mu: Weight) -> Progression:
        return dict(self.S)[root_length(self.letter, mu, self.rank)]

    def to_json(self) -> dict:
        return {"name": self.name, "type": f"{self.letter}{self.rank}",
                "S": {cls.value: p.label() for cls, p in self.S}, "S0": self.zero.label()}


SH, LG, EX = RootLengthClass.SHORT, RootLengthClass.LONG, RootLengthClass.EXTRA_LONG


def builtin_data(rank: int = 3) -> dict[str, RootDatum]:
    """The seven reduced root systems extended by Z, at a given rank."""
    return {
        "A1": RootDatum("A1", "A", rank, ((SH, Z),)),
        "B1": RootDatum("B1", "B", rank, ((SH, Z), (LG, Z))),
        "C1": RootDatum("C1", "C", rank, ((SH, Z), (LG, Z))),
        "D1": RootDatum("D1", "D", rank, ((SH, Z),)),
        "B2": RootDatum("B2", "B", rank, ((SH, Z), (LG, TWO_Z))),
        "C2": RootDatum("C2", "C", rank, ((SH, Z), (LG, TWO_Z))),
        "BC2": RootDatum("BC2", "BC", rank, ((SH, Z), (LG, Z), (EX, TWO_Z_PLUS_ONE))),
    }


def mutant_data(rank: int = 3) -> dict[str, tuple[RootDatum, str]]:
    """Broken data paired with the axiom each one must fail."""
    return {
        "BC2 with S_ex = 2Z": (RootDatum("BC2-ex2Z", "BC", rank, ((SH, Z), (LG, Z), (EX, TWO_Z))), "S3"),
        "A1 with S = 2Z": (RootDatum("A1-2Z", "A", rank, ((SH, TWO_Z),), TWO_Z), "S0"),
        "B2 with S_sh = 2Z+1": (RootDatum("B2-odd", "B", rank, ((SH, TWO_Z_PLUS_ONE), (LG, TWO_Z))), "S2"),
        "B with S_lg = Z, S_sh = 2Z": (RootDatum("B-swap", "B", rank, ((SH, TWO_Z), (LG, Z))), "S1"),
        "C2 with S0 = 2Z": (RootDatum("C2-zero2Z", "C", rank, ((SH, Z), (LG, TWO_Z)), TWO_Z), "S4"),
    }


def check_root_datum(rd: RootDatum) -> VerificationReport:
    """(S0)-(S3) by progression arithmetic and (S4) for a short root."""
    start = time.perf_counter()
    rep = VerificationReport(f"rootdatum:{rd.name}")
    if rd.rank > 4:
        raise DomainError("root data are checked at rank <= 4")
    roots = roots_of(rd.letter, rd.rank)
    S = {mu: rd.s_of(mu) for mu in roots}
    g = 0
    for p in S.values():
        g = math.gcd(g, p.generated())
    rep.add("S0", g == 1, f"union generates {g}Z", None if g == 1 else {"generated": f"{g}Z"})
    bad = None
    for nu in roots:
        for mu in roots:
            k = cartan_integer(nu, mu)
            if k.denominator != 1:
                bad = {"nu": nu.label(), "mu": mu.label(), "reason": "non-integral Cartan integer"}
                break
            k = int(k)
            lhs = S[nu].minus_multiple(k, S[mu])
            refl = nu - mu.scale(k)
            if refl not in S or not lhs.subset_of(S[refl]):
                bad = {"nu": nu.label(), "mu": mu.label(), "lhs": lhs.label(),
                       "rhs": S[refl].label() if refl in S else None}
                break
        if bad:
            break
    rep.add("S1", bad is None, "S_nu - <nu,mu> S_mu inside S_(reflected)", bad)
    bad = next(({"root": mu.label(), "S": S[mu].label()} for mu in reduced_roots(rd.letter, rd.rank)
                if 0 not in S[mu]), None)
    rep.add("S2", bad is None, "0 in S_mu for reduced roots", bad)
    bad = None
    rs = set(roots)
    for mu in roots:
        if mu.scale(2) in rs and S[mu.scale(2)].meets(S[mu].times(2)):
            bad = {"root": mu.label(), "S_2mu": S[mu.scale(2)].label(), "2S_mu": S[mu].times(2).label()}
            break
    rep.add("S3", bad is None, "reduced: S_2mu and 2 S_mu disjoint", bad)
    short = next(mu for mu in roots if root_length(rd.letter, mu, rd.rank) == SH)
    ss = S[short].plus(S[short])
    rep.add("S4", ss == rd.zero, f"S_0 = {rd.zero.label()}, S_mu + S_mu = {ss.label()}",
            None if ss == rd.zero else {"root": short.label(), "sum": ss.label(), "S0": rd.zero.label()})
    return _timed(rep, start)


def root_datum_of(L: LoopAlgebra) -> dict[str, object]:
    """Observed S_mu (as degree sets within the window) grouped by length class."""
    letter, n = delta_of(L)
    obs: dict[str, set] = {}
    zero: set = set()
    for b in L.basis:
        if b.weight.is_zero():
            zero.add(b.degree)
        else:
            obs.setdefault(root_length(letter, b.weight, n).value, set()).add(b.degree)
    return {"S": {k: sorted(v) for k, v in sorted(obs.items())}, "S0": sorted(zero)}


def check_datum_matches(L: LoopAlgebra) -> VerificationReport:
    """Degrees observed in L agree with the built-in progressions inside the window."""
    rep = VerificationReport("datum-match")
    built = builtin_data()[L.tag]
    got = root_datum_of(L)
    for cls, prog in built.S:
        want = [k for k in L.type.degrees() if k in prog]
        seen = got["S"].get(cls.value, [])
        rep.add(f"S_{cls.value}", seen == want, f"{prog.label()}", None if seen == want else {"seen": seen, "want": want})
    want0 = [k for k in L.type.degrees() if k in built.zero]
    rep.add("S_0", got["S0"] == want0, built.zero.label(), None if got["S0"] == want0 else {"seen": got["S0"]})
    return rep


# generation -----------------------------------------------------------------------

def generation_check(L: LoopAlgebra, generators: list[GradedElement]) -> VerificationReport:
    """Close span(generators) under ad(generators) inside the window and compare with L."""
    start = time.perf_counter()
    rep = VerificationReport("generation")
    gens = [L.coords(g) for g in generators]

    def ad(g):
        def op(v):
            out: dict = {}
            for i, a in g.items():
                for j, b in v.items():
                    r = L.bracket_indices(i, j)
                    if r:
                        axpy(out, a * b, r)
            return out
        return op

    from .simple_lie import span_closure

    ech = span_closure(gens, [ad(g) for g in gens])
    per_degree = {}
    missing = []
    for k in L.type.degrees():
        got = sum(1 for p in ech.pivots() if L.basis[p].degree == k)
        per_degree[str(k)] = [got, L.dim(k)]
        if got != L.dim(k):
            missing.append(k)
    rep.add("generates", not missing, f"span dims per degree {per_degree}",
            {"missing degrees": missing} if missing else None)
    rep.seconds = time.perf_counter() - start
    return rep


# derivations --------------------------------------------------------------------

@dataclass
class Derivation:
    """Linear map of degree m on L given on basis indices: index -> coordinates."""

    L: LoopAlgebra
    degree: int
    action: dict[int, dict[int, Fraction]]

    @property
    def domain(self) -> set[int]:
        return set(self.action)

    def apply_index(self, i: int) -> dict[int, Fraction]:
        if i not in self.action:
            raise DomainError(f"basis element {self.L.basis[i].label} outside the derivation's domain")
        return self.action[i]

    def apply(self, x: GradedElement) -> GradedElement:
        out: dict = {}
        for i, c in self.L.coords(x).items():
            axpy(out, c, self.apply_index(i))
        return self.L.from_coords(out)

    def vector(self) -> dict:
        return {(i, j): c for i, img in self.action.items() for j, c in img.items()}

    def to_json(self) -> dict:
        return {self.L.basis[i].label: {self.L.basis[j].label: q_str(c) for j, c in sorted(img.items())}
                for i, img in sorted(self.action.items()) if img}


def _operator(L: LoopAlgebra, m: int, domain: Iterable[int], f: Callable[[int], dict]) -> Derivation:
    return Derivation(L, m, {i: f(i) for i in domain})


def inner_shift_operator(L: LoopAlgebra, p_amb: Mapping, m: int, domain: Iterable[int]) -> Derivation:
    """s_m o ad p with p an ambient component placed at degree m."""
    def f(i):
        b = L.basis[i]
        amb = L.amb_bracket(p_amb, m, L.slice_basis(b.degree)[b.slot].amb, b.degree)
        k = b.degree + m
        return {L.index[(k, s)]: c for s, c in L.slot_coords(amb, k).items()}
    return _operator(L, m, domain, f)


def degree_shift_operator(L: LoopAlgebra, m: int, domain: Iterable[int]) -> Derivation:
    """s_m o d0."""
    def f(i):
        b = L.basis[i]
        if not b.degree:
            return {}
        return {L.index[(b.degree + m, b.slot)]: Fraction(b.degree)}
    return _operator(L, m, domain, f)


def predicted_generators(L: LoopAlgebra, m: int) -> list[tuple[str, object]]:
    """Operators spanning the expected diagonal derivations of degree m.

    Entries are ("ad", ambient p) for s_m o ad p and ("d0", None) for s_m o d0.
    """
    tag, n = L.tag, L.type.rank
    u = L.universe
    out: list[tuple[str, object]] = []
    odd = L.type.twisted and m % 2
    if not odd:
        if tag == "A1":
            out += [("ad", {(i, i): Fraction(1)}) for i in u.indices()]
        else:
            out += [("ad", dict(L.slices[0][s].amb)) for s in range(len(L.slices[0]))
                    if L.slices[0][s].weight.is_zero()]
        out.append(("d0", None))
        return out
    if tag == "C2":
        return [("ad", {(i, i): Fraction(1), (n + i, n + i): Fraction(1)}) for i in range(1, n + 1)]
    if tag == "BC2":
        return ([("ad", {(i, i): Fraction(1), (n + i, n + i): Fraction(1)}) for i in range(1, n + 1)]
                + [("ad", {(2 * n + 1, 2 * n + 1): Fraction(1)})])
    return [("ad", dict(bv.amb)) for bv in L.slices[1] if bv.weight.is_zero()]


def _derivation_unknowns(L: LoopAlgebra, m: int) -> dict[int, list[int]]:
    out = {}
    for i, b in enumerate(L.basis):
        if L.in_window(b.degree + m):
            out[i] = L.indices_of_weight(b.weight, b.degree + m)
    return out


def solve_derivation_space(L: LoopAlgebra, m: int) -> tuple[list[tuple], list[dict]]:
    """Nullspace of the Leibniz system for degree-m weight-preserving maps on the window."""
    targets = _derivation_unknowns(L, m)
    variables = [(i, j) for i, js in targets.items() for j in js]
    eqs: list[dict] = []
    N = len(L.basis)
    for i in range(N):
        a = L.basis[i].degree
        if i not in targets:
            continue
        for j in range(i + 1, N):
            b = L.basis[j].degree
            if j not in targets or not L.in_window(a + b) or not L.in_window(a + b + m):
                continue
            rows: dict[int, dict] = {}
            # d([b_i, b_j])
            for l, c in L.bracket_indices(i, j).items():
                for r in targets[l]:
                    rows.setdefault(r, {})
                    axpy(rows[r], c, {(l, r): 1})
            # - [d b_i, b_j]
            for p in targets[i]:
                for r, c in (L.bracket_indices(p, j) or {}).items():
                    axpy(rows.setdefault(r, {}), -c, {(i, p): 1})
            # - [b_i, d b_j]
            for q in targets[j]:
                for r, c in (L.bracket_indices(i, q) or {}).items():
                    axpy(rows.setdefault(r, {}), -c, {(j, q): 1})
            eqs.extend(row for row in rows.values() if row)
    return variables, nullspace(eqs, variables)


@dataclass
class DerivationResult:
    L: LoopAlgebra
    degree: int
    margin: int
    interior: list[int]
    solved: list[Derivation]
    predicted: list[Derivation]
    predicted_labels: list[str]
    report: VerificationReport

    @property
    def dimension(self) -> int:
        return len(self.solved)

    def to_json(self) -> dict:
        return {
            "algebra": self.L.type.to_json(),
            "degree": self.degree,
            "margin": self.margin,
            "solvedDim": len(self.solved),
            "predictedDim": len(self.predicted),
            "predicted": self.predicted_labels,
            "solution": [d.to_json() for d in self.solved],
            "verdict": "match" if self.report.passed else "mismatch",
            "report": self.report.to_json(),
        }


def solve_diagonal_derivations(L: LoopAlgebra, m: int, margin: int | None = None) -> DerivationResult:
    """Solve Leibniz for diagonal derivations of degree m and compare with the predicted span.

    Both spaces are restricted to interior basis elements |k| <= window - margin.
    """
    start = time.perf_counter()
    if margin is None:
        margin = max(abs(m), 1)
    if margin < abs(m):
        raise MarginError(f"margin {margin} is smaller than |degree| = {abs(m)}; interior images would leave the window")
    if margin >= L.window:
        raise MarginError(f"margin {margin} leaves no interior degrees with nonzero t-degree in window {L.window}")
    interior = [i for i, b in enumerate(L.basis) if abs(b.degree) <= L.window - margin]
    interior_set = set(interior)
    variables, kernel = solve_derivation_space(L, m)
    ech = Echelon()
    for vec in kernel:
        ech.add({k: v for k, v in vec.items() if k[0] in interior_set})
    solved = []
    for row in ech.basis():
        action: dict[int, dict] = {i: {} for i in interior}
        for (i, j), c in row.items():
            action[i][j] = c
        solved.append(Derivation(L, m, action))
    gens = predicted_generators(L, m)
    predicted, labels = [], []
    for kind, p in gens:
        if kind == "ad":
            predicted.append(inner_shift_operator(L, p, m, interior))
            labels.append("s_%d o ad(%s)" % (m, " + ".join(f"{q_str(v)}*{_key(k)}" for k, v in sorted(p.items()))))
        else:
            predicted.append(degree_shift_operator(L, m, interior))
            labels.append(f"s_{m} o d0")
    pech = Echelon()
    for d in predicted:
        pech.add(d.vector())
    rep = VerificationReport(f"derive:{L.tag}:m={m}")
    rep.add("predicted in solved", all(ech.contains(d.vector()) for d in predicted))
    rep.add("solved in predicted", all(pech.contains(d.vector()) for d in solved))
    rep.add("equal dimension", ech.rank == pech.rank, f"solved {ech.rank}, predicted {pech.rank}",
            None if ech.rank == pech.rank else {"solved": ech.rank, "predicted": pech.rank})
    rep.seconds = time.perf_counter() - start
    return DerivationResult(L, m, margin, interior, solved, predicted, labels, rep)


def _key(k) -> str:
    if k == IOTA:
        return "iota"
    if k[0] == 0:
        return f"v{k[1]}"
    return f"e{k[0]}{k[1]}" if max(k) < 10 else f"e{k[0]},{k[1]}"


def shift_index(L: LoopAlgebra, i: int, j: int) -> int | None:
    """Index of s_j(b_i), or None if it leaves the window or changes parity."""
    b = L.basis[i]
    k = b.degree + j
    if not L.in_window(k) or L.parity(k) != L.parity(b.degree):
        return None
    return L.index[(k, b.slot)]


def check_shift_commutation(d: Derivation, shifts: Iterable[int] = (2, -2)) -> VerificationReport:
    """s_j o d = d o s_j on basis elements where both sides are defined."""
    L = d.L
    rep = VerificationReport("shift-commutation")
    for j in shifts:
        bad, count = None, 0
        for i in sorted(d.domain):
            si = shift_index(L, i, j)
            if si is None or si not in d.domain:
                continue
            left = {}
            for r, c in d.apply_index(i).items():
                sr = shift_index(L, r, j)
                if sr is None:
                    left = None
                    break
                left[sr] = c
            if left is None:
                continue
            right = d.apply_index(si)
            count += 1
            if left != right:
                diff = dict(left)
                axpy(diff, -1, right)
                bad = {"element": L.basis[i].label, "discrepancy": {L.basis[k].label: q_str(v) for k, v in diff.items()}}
                break
        rep.add(f"s_{j}", bad is None, f"{count} basis elements", bad)
    return rep


# extension to the untwisted ambient ------------------------------------------------

def ambient_of(L: LoopAlgebra) -> tuple[LoopAlgebra, Callable]:
    """The untwisted algebra containing a twisted L, with the finite involution."""
    lt = L.type
    if L.tag == "C2":
        amb = build(LoopType("A1", 2 * lt.rank, lt.window, ambient="doubled"))
        return amb, lambda x: sigma("C", x)
    if L.tag == "BC2":
        amb = build(LoopType("A1", 2 * lt.rank + 1, lt.window, ambient="doubled_plus_one"))
        return amb, lambda x: sigma("B", x)
    if L.tag == "B2" and lt.realization == "tau":
        return build(LoopType("D1", lt.rank + 1, lt.window, allow_small=True)), tau
    raise DomainError("extension needs C2, BC2 or the tau realization of B2")


@dataclass
class ExtendedDerivation:
    twisted: Derivation
    ambient: LoopAlgebra
    action: dict[int, dict[int, Fraction]]

    def as_derivation(self) -> Derivation:
        return Derivation(self.ambient, self.twisted.degree, self.action)


def extend_derivation(d: Derivation) -> ExtendedDerivation:
    """d~(y t^j): even j applies d to the theta-fixed part and s_-1 o d o s_1 to the rest; odd j the reverse."""
    L = d.L
    if not check_shift_commutation(d).passed:
        raise DomainError("derivation does not commute with s_2; no extension exists")
    A, theta = ambient_of(L)
    from .matrices import FinitaryMatrix

    half = Fraction(1, 2)

    def apply_twisted(amb: Mapping, k: int) -> dict | None:
        if not amb:
            return {}
        coords = L.slot_coords(amb, k)
        out: dict = {}
        for s, c in coords.items():
            i = L.index[(k, s)]
            if i not in d.action:
                return None
            axpy(out, c, d.action[i])
        x = L.from_coords(out)
        return x.body.get(k + d.degree, {})

    action = {}
    for i, b in enumerate(A.basis):
        j = b.degree
        y = FinitaryMatrix(A.universe, A.slice_basis(j)[b.slot].amb)
        ty = theta(y)
        plus = ((y + ty).scale(half)).entries
        minus = ((y - ty).scale(half)).entries
        inside, outside = (plus, minus) if j % 2 == 0 else (minus, plus)
        direct = apply_twisted(inside, j)
        hop = 1 if j % 2 == 0 else -1
        moved = apply_twisted(outside, j + hop) if L.in_window(j + hop) else None
        if direct is None or moved is None:
            continue
        total = dict(direct)
        axpy(total, 1, moved)
        k = j + d.degree
        if not A.in_window(k):
            continue
        action[i] = {A.index[(k, s)]: c for s, c in A.slot_coords(total, k).items()}
    return ExtendedDerivation(d, A, action)


def check_leibniz(d: Derivation) -> VerificationReport:
    """d[x, y] = [dx, y] + [x, dy] on domain pairs with all products in the window."""
    L = d.L
    rep = VerificationReport("leibniz")
    dom = sorted(d.domain)
    bad, count = None, 0
    for a, i in enumerate(dom):
        for j in dom[a:]:
            r = L.bracket_indices(i, j)
            if r is None or not all(l in d.domain for l in r):
                continue
            lhs: dict = {}
            for l, c in r.items():
                axpy(lhs, c, d.action[l])
            rhs: dict = {}
            ok = True
            for p, c in d.action[i].items():
                t = L.bracket_indices(p, j)
                if t is None:
                    ok = False
                    break
                axpy(rhs, c, t)
            for q, c in d.action[j].items():
                t = L.bracket_indices(i, q)
                if t is None:
                    ok = False
                    break
                axpy(rhs, c, t)
            if not ok:
                continue
            count += 1
            if lhs != rhs:
                bad = {"pair": [L.basis[i].label, L.basis[j].label]}
                break
        if bad:
            break
    rep.add("leibniz", bad is None and count > 0, f"{count} pairs", bad)
    return rep


def check_extension(ext: ExtendedDerivation, shifts: Iterable[int] | None = None) -> VerificationReport:
    """Leibniz on the ambient algebra, restriction to the twisted algebra, and commutation with shifts."""
    A, d = ext.ambient, ext.twisted
    L = d.L
    rep = VerificationReport("extension")
    dt = ext.as_derivation()
    rep.extend(check_leibniz(dt), "ambient ")
    bad, count = None, 0
    for i in sorted(d.domain):
        b = L.basis[i]
        x = L.element(i)
        ax = A.coords(x)
        if not all(k in dt.domain for k in ax):
            continue
        img: dict = {}
        for k, c in ax.items():
            axpy(img, c, dt.action[k])
        count += 1
        if A.from_coords(img) != d.apply(x):
            bad = {"element": b.label}
            break
    rep.add("restricts to d", bad is None and count > 0, f"{count} basis elements", bad)
    if shifts is None:
        shifts = [k for k in range(-A.window, A.window + 1) if k]
    sc = check_shift_commutation(dt, shifts)
    rep.extend(sc, "commutes with ")
    return rep


# center -------------------------------------------------------------------------

def compute_center(T: StructureTable, all_degrees: bool = False) -> list[dict[int, Fraction]]:
    """Basis of {z : [z, b] = 0 for every basis b with the product in the window}."""
    L = T.L
    unknowns = [i for i in T.indices() if i != T.d_index and (all_degrees or T.degree(i) == 0)]
    eqs: dict[tuple[int, int], dict] = {}
    for z in unknowns:
        for b in T.indices():
            if b == T.d_index:
                continue
            r = T.bracket(z, b)
            if not r:
                continue
            for k, c in r.items():
                eqs.setdefault((b, k), {})[z] = c
    return nullspace(list(eqs.values()), unknowns)


def null_pairing_span(T: StructureTable) -> Echelon:
    """Span of [L_0^m, L_0^-m] over m != 0 in the window."""
    L = T.L
    ech = Echelon()
    for m in range(1, L.window + 1):
        for i in L.indices_of_weight(Weight.zero(), m):
            for j in L.indices_of_weight(Weight.zero(), -m):
                r = T.bracket(i, j)
                if r:
                    ech.add(r)
    return ech


def root_pairing_dim(T: StructureTable, mu: Weight) -> int:
    """dim of sum_m [L_mu^m, L_-mu^-m] inside the window."""
    L = T.L
    ech = Echelon()
    for m in L.type.degrees():
        for i in L.indices_of_weight(mu, m):
            for j in L.indices_of_weight(-mu, -m):
                r = T.bracket(i, j)
                if r:
                    ech.add(r)
    return ech.rank


def check_center(L: LoopAlgebra, spec: FormSpec | None = None) -> VerificationReport:
    spec = spec or FormSpec()
    rep = VerificationReport("center")
    plain = StructureTable(L)
    ext = StructureTable(L, extended=True, spec=spec)
    zp = compute_center(plain, all_degrees=True)
    rep.add("plain center = 0", not zp, f"dim {len(zp)}", None if not zp else {"basis": [_coords_json(v) for v in zp]})
    ze = compute_center(ext, all_degrees=True)
    ok = len(ze) == 1 and set(ze[0]) == {ext.c_index}
    rep.add("extended center = Fc", ok, f"dim {len(ze)}", None if ok else {"basis": [_coords_json(v) for v in ze]})
    td = t_xi(spec, L, (Weight.zero(), 1)).to_element()
    tv = ext.element_to_vec(td)
    in_center = all(not ext.bracket_vec(tv, {b: Fraction(1)}) for b in range(len(L.basis)))
    rep.add("t_delta central", in_center)
    e2 = null_pairing_span(ext)
    ok = e2.rank == 1 and e2.contains({ext.c_index: 1})
    rep.add("null pairings extended", ok, f"span dim {e2.rank}", None if ok else {"rank": e2.rank})
    p2 = null_pairing_span(plain)
    rep.add("null pairings plain", p2.rank == 0, f"span dim {p2.rank}", None if not p2.rank else {"rank": p2.rank})
    mu = next(b.weight for b in L.basis if not b.weight.is_zero() and b.degree == 0)
    dp, de = root_pairing_dim(plain, mu), root_pairing_dim(ext, mu)
    rep.add("root pairings", (dp, de) == (1, 2), f"root {mu.label()}: plain {dp}, extended {de}",
            None if (dp, de) == (1, 2) else {"plain": dp, "extended": de})
    return rep


# spectra -------------------------------------------------------------------------

def ad_spectrum(p: DiagExt, targets: Iterable[GradedElement], a=1, b=0) -> list[Fraction]:
    """Eigenvalues of ad(p + a d0 + b c) on homogeneous targets."""
    a = Fraction(a)
    out = []
    for x in targets:
        if len(x.body) != 1 or x.central or x.deriv:
            raise DomainError("targets must be homogeneous core elements")
        (k, amb), = x.body.items()
        image = {}
        for key, v in amb.items():
            if key == IOTA or key[0] == 0:
                lam = Fraction(0) if key == IOTA else p.value(key[1])
            else:
                lam = p.value(key[0]) - p.value(key[1])
            image[key] = (lam + a * k) * v
        key0, v0 = next(iter(sorted(amb.items())))
        lam = image[key0] / v0
        residual = {kk: image[kk] - lam * vv for kk, vv in amb.items() if image[kk] != lam * vv}
        if residual:
            raise DomainError(f"target is not an eigenvector; residual {residual}")
        out.append(lam)
    return out


def unit_target(i: int, j: int, k: int = 0) -> GradedElement:
    return GradedElement({k: {(i, j): Fraction(1)}})


def spectrum_obstruction(p: DiagExt, n: int, a_max: int = 12, scaled: bool = False, degrees=(-1, 0, 1)) -> dict:
    """Desk-scale test whether ad(d0) and ad(p + d0) have incompatible spectra.

    Default eigenvalues are a*k + p_i - p_j; scaled=True uses a*(k + p_i - p_j).
    The verdict is "distinguishable" when every scaling 0 < |a| <= a_max leaves
    a non-integer eigenvalue.
    """
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    witnesses = {}
    for a in [s * v for v in range(1, a_max + 1) for s in (1, -1)]:
        found = None
        for i, j in pairs:
            for k in degrees:
                base = p.value(i) - p.value(j)
                lam = a * (k + base) if scaled else a * k + base
                if lam.denominator != 1:
                    found = {"a": a, "target": f"e{i},{j}@t^{k}", "eigenvalue": q_str(lam)}
                    break
            if found:
                break
        if found is None:
            return {"verdict": "inconclusive", "integralAt": a, "aMax": a_max, "scaled": scaled}
        witnesses[a] = found
    first = witnesses[1]
    return {"verdict": "distinguishable", "aMax": a_max, "scaled": scaled, "witness": first}


# suites -------------------------------------------------------------------------

def suite_torus(L: LoopAlgebra, table: StructureTable | None = None) -> VerificationReport:
    rep = VerificationReport("torus")
    rep.extend(check_lie_torus(table or StructureTable(L)))
    rep.extend(check_datum_matches(L), "datum ")
    return rep


def suite_rootdatum(rank: int = 3) -> VerificationReport:
    rep = VerificationReport("rootdatum")
    for name, rd in builtin_data(rank).items():
        rep.extend(check_root_datum(rd), f"{name} ")
    for name, (rd, axiom) in mutant_data(rank).items():
        r = check_root_datum(rd)
        failed = not r.check(axiom).passed
        rep.add(f"mutant {name} rejected by {axiom}", failed, witness=None if failed else {"datum": rd.to_json()})
    return rep


def suite_forms(L: LoopAlgebra, spec: FormSpec, seed: int = 0, trials: int = 100) -> VerificationReport:
    rep = VerificationReport("forms")
    rep.extend(check_form(L, spec, trials, seed))
    rep.extend(check_root_pairs(L, spec))
    rep.extend(check_cocycle(L, spec, trials, seed), "cocycle ")
    return rep


def suite_jacobi(L: LoopAlgebra, spec: FormSpec) -> VerificationReport:
    rep = VerificationReport("jacobi")
    rep.extend(check_jacobi(StructureTable(L)), "loop ")
    rep.extend(check_jacobi(StructureTable(L, extended=True, spec=spec, with_d=True)), "extended ")
    return rep


SUITES = ("torus", "rootdatum", "forms", "jacobi", "center")
