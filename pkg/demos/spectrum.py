"""Eigenvalues of ad(p + d0) for the harmonic diagonal p = diag(1, 1/2, 1/3, ...)."""
from fractions import Fraction

from loopforge.matrices import DiagExt
from loopforge.verify import ad_spectrum, spectrum_obstruction, unit_target

n = 4
p = DiagExt({i: Fraction(1, i) for i in range(1, n + 1)})
for i in range(1, n + 1):
    row = ad_spectrum(p, [unit_target(i, j) for j in range(1, n + 1)])
    print(" ".join(f"{str(v):>6}" for v in row))

for name, q in (("harmonic", p), ("zero", DiagExt()), ("integer", DiagExt.from_values([1, 2, 3, 4]))):
    print(f"{name:<9} {spectrum_obstruction(q, n)}")
print("scaled   ", spectrum_obstruction(p, n, scaled=True))
