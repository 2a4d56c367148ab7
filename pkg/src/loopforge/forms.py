"""Invariant forms, the degree cocycle, the centrally extended bracket and t_xi."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DomainError, ParseError, SingularFormError
from .exact import as_q, q_str
from .linalg import nullspace, solve_dense
from .loops import IOTA, GradedElement, LoopAlgebra, loop_bracket
from .matrices import DiagExt
from .simple_lie import Weight


@dataclass(frozen=True)
class FormSpec:
    """Normalization of B: trace scale, the psi table on complement components, and B(d0, d0).

    psi maps (degree m, label a, label b) to psi_m(a, b); the lookup is symmetric
    under (m, a, b) <-> (-m, b, a).  B(c, d0) = 1 always.
    """

    trace_scale: Fraction = Fraction(1)
    psi: tuple = ((0, "iota", "iota", Fraction(1)),)
    dd: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "trace_scale", as_q(self.trace_scale))
        object.__setattr__(self, "dd", as_q(self.dd))
        if not self.trace_scale:
            raise DomainError("traceScale must be nonzero")
        items = self.psi.items() if isinstance(self.psi, Mapping) else (((m, a, b), v) for m, a, b, v in self.psi)
        clean = tuple(sorted((int(m), str(a), str(b), as_q(v)) for (m, a, b), v in items if as_q(v)))
        object.__setattr__(self, "psi", clean)

    @classmethod
    def default(cls) -> "FormSpec":
        return cls()

    @classmethod
    def make(cls, trace_scale=1, psi0_iota=1, dd=0, psi: Mapping | None = None) -> "FormSpec":
        table = dict(psi or {})
        table[(0, "iota", "iota")] = as_q(psi0_iota)
        return cls(trace_scale, table, dd)

    def psi_value(self, m: int, a: str, b: str) -> Fraction:
        table = {(mm, aa, bb): v for mm, aa, bb, v in self.psi}
        if (m, a, b) in table:
            return table[(m, a, b)]
        return table.get((-m, b, a), Fraction(0))

    @property
    def psi0_iota(self) -> Fraction:
        return self.psi_value(0, "iota", "iota")

    def to_json(self) -> dict:
        return {"traceScale": q_str(self.trace_scale), "psi0_iota": q_str(self.psi0_iota), "dd": q_str(self.dd)}

    @classmethod
    def from_json(cls, data: Mapping) -> "FormSpec":
        if not isinstance(data, Mapping):
            raise ParseError("form spec must be a JSON object")
        return cls.make(as_q(data.get("traceScale", "1")), as_q(data.get("psi0_iota", "1")), as_q(data.get("dd", "0")))


@dataclass(frozen=True)
class CartanElement:
    """h + c_coeff*c + d_coeff*d0 with h a degree-0 diagonal."""

    h: DiagExt = field(default_factory=DiagExt)
    c_coeff: Fraction = Fraction(0)
    d_coeff: Fraction = Fraction(0)

    def to_element(self) -> GradedElement:
        amb = {(i, i): v for i, v in self.h.finite}
        if self.h.scalar:
            amb[IOTA] = self.h.scalar
        return GradedElement({0: amb}, self.c_coeff, self.d_coeff)

    def to_json(self) -> dict:
        return {"h": self.h.to_json(), "c": q_str(self.c_coeff), "d": q_str(self.d_coeff)}


def _t_components(L: LoopAlgebra, amb: Mapping, k: int) -> dict[str, Fraction]:
    slots = L.t_prime_slots(k)
    if not slots:
        return {}
    coords = L.slot_coords(amb, k)
    basis = L.slice_basis(k)
    return {basis[s].label: coords[s] for s in slots if coords.get(s)}


def _component_form(spec: FormSpec, L: LoopAlgebra, x: Mapping, y: Mapping, k: int) -> Fraction:
    """B(x (x) t^k, y (x) t^-k) for ambient components x, y."""
    val = spec.trace_scale * L.trace_pair(x, k, y, -k)
    tx, ty = _t_components(L, x, k), _t_components(L, y, -k)
    if tx and ty:
        amb_x = {bv.label: bv.amb for bv in L.slice_basis(k) if bv.part == "T"}
        amb_y = {bv.label: bv.amb for bv in L.slice_basis(-k) if bv.part == "T"}
        for a, ca in tx.items():
            for b, cb in ty.items():
                val += ca * cb * (spec.psi_value(k, a, b)
                                  - spec.trace_scale * L.trace_pair(amb_x[a], k, amb_y[b], -k))
    return val


def form_eval(spec: FormSpec, L: LoopAlgebra, x: GradedElement, y: GradedElement) -> Fraction:
    """B(x, y) on (core + complement) (x) F[t, 1/t] + Fc + Fd0."""
    total = Fraction(0)
    for k, xk in x.body.items():
        yk = y.body.get(-k)
        if yk:
            total += _component_form(spec, L, xk, yk, k)
    total += x.central * y.deriv + x.deriv * y.central + spec.dd * x.deriv * y.deriv
    return total


def cocycle(spec: FormSpec, L: LoopAlgebra, u: GradedElement, v: GradedElement) -> Fraction:
    """phi(u, v) = B(d0(u), v) = sum_k k B(u_k, v_-k)."""
    total = Fraction(0)
    for k, uk in u.body.items():
        if k:
            vk = v.body.get(-k)
            if vk:
                total += k * _component_form(spec, L, uk, vk, k)
    return total


def extended_bracket(L: LoopAlgebra, spec: FormSpec, x: GradedElement, y: GradedElement) -> GradedElement:
    """Loop bracket plus phi(x, y) c; d0 acts by degree and c is central."""
    out = loop_bracket(L, x, y)
    phi = cocycle(spec, L, x.core_part(), y.core_part())
    return GradedElement(out.body, out.central + phi, out.deriv)


def cartan_basis_elements(L: LoopAlgebra) -> list[GradedElement]:
    """Degree-0 zero-weight basis elements of L (the truncated T part of H)."""
    return [L.element(i) for i in L.indices_of_weight(Weight.zero(), 0)]


def weight_on(mu: Weight, amb: Mapping) -> Fraction:
    """mu evaluated on a diagonal ambient component (iota counts through its scalar)."""
    diag = DiagExt({i: v for (i, j), v in amb.items() if i and i == j}, amb.get(IOTA, 0))
    return mu.evaluate(diag)


def h_gram(spec: FormSpec, L: LoopAlgebra) -> tuple[list[GradedElement], list[list[Fraction]]]:
    """Basis h_1..h_r, c, d0 of H with its Gram matrix."""
    basis = cartan_basis_elements(L) + [GradedElement.c(), GradedElement.d0()]
    gram = [[form_eval(spec, L, a, b) for b in basis] for a in basis]
    return basis, gram


def t_xi(spec: FormSpec, L: LoopAlgebra, xi: tuple[Weight, int]) -> CartanElement:
    """The element t of H with B(h, t) = xi(h) for every h in H; xi(c) = 0, xi(d0) = m."""
    mu, m = xi
    basis, gram = h_gram(spec, L)
    rhs = [weight_on(mu, b.body.get(0, {})) for b in basis[:-2]] + [Fraction(0), Fraction(m)]
    sol = solve_dense(gram, rhs)
    if sol is None:
        raise SingularFormError("B is degenerate on the truncated Cartan subalgebra")
    t = GradedElement()
    for coeff, b in zip(sol, basis):
        t = t + b.scale(coeff)
    amb = t.body.get(0, {})
    h = DiagExt({i: v for (i, j), v in amb.items() if i and i == j}, amb.get(IOTA, 0))
    if any(i != j for (i, j) in amb if i):
        raise SingularFormError("Cartan basis is not diagonal")
    return CartanElement(h, t.central, t.deriv)


def radical_of_form(spec: FormSpec, L: LoopAlgebra, degree: int) -> list[GradedElement]:
    """Basis of {x in L^degree : B(x, L^-degree) = 0}."""
    if not L.in_window(degree) or not L.in_window(-degree):
        raise DomainError(f"degree {degree} outside window {L.window}")
    xs = [L.element(i) for i in L.indices_at(degree)]
    ys = [L.element(i) for i in L.indices_at(-degree)]
    eqs = []
    for y in ys:
        row = {a: form_eval(spec, L, x, y) for a, x in enumerate(xs)}
        eqs.append({a: v for a, v in row.items() if v})
    kernel = nullspace(eqs, list(range(len(xs))))
    out = []
    for vec in kernel:
        z = GradedElement()
        for a, c in vec.items():
            z = z + xs[a].scale(c)
        out.append(z)
    return out
