"""Affine sl_3 by hand: loop brackets, the cocycle, t_xi and the center."""
from fractions import Fraction

from loopforge import FormSpec, GradedElement, build, extended_bracket, form_eval, t_xi
from loopforge.simple_lie import Weight
from loopforge.verify import StructureTable, check_center, compute_center


def show(title, value):
    print(f"{title:<36} {value}")


L = build("A1", 3, 2)
spec = FormSpec.default()
x = GradedElement.homogeneous(1, {(1, 2): 1})
y = GradedElement.homogeneous(-1, {(2, 1): 1})

show("graded dims", [L.dim(k) for k in L.type.degrees()])
show("[e12 t, e21 t^-1]", extended_bracket(L, spec, x, y))
show("B(e12 t, e21 t^-1)", form_eval(spec, L, x, y))

alpha = Weight.of({1: 1, 2: -1})
t = t_xi(spec, L, (alpha, 1))
show("t_xi for (e1 - e2, 1)", t.to_json())
show("t_delta", t_xi(spec, L, (Weight.zero(), 1)).to_json())

# [x, y] = B(x, y) t_xi on this root pair
lhs = extended_bracket(L, spec, x, y)
rhs = t.to_element().scale(form_eval(spec, L, x, y))
show("[x, y] - B(x, y) t_xi", lhs - rhs)

T = StructureTable(L, extended=True)
show("center of the extension", [{T.label(i): str(c) for i, c in v.items()} for v in compute_center(T, True)])
show("center of the loop algebra", compute_center(StructureTable(L), True))

h = {(1, 1): 1, (2, 2): -1}
for m in (1, 2):
    z = extended_bracket(L, spec, GradedElement.homogeneous(m, h), GradedElement.homogeneous(-m, h))
    show(f"[h t^{m}, h t^-{m}]", f"{z.central} c")

rep = check_center(L, spec)
for c in rep.checks:
    show(c.name, f"{'ok' if c.passed else 'FAIL'} {c.detail}")
show("trace scale 1/2 changes c-coefficient", extended_bracket(L, FormSpec.make(Fraction(1, 2)), x, y).central)
