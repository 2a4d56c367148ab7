"""Diagonal derivations of the twisted types and their extension to the untwisted ambient."""
from loopforge import build
from loopforge.verify import (
    check_extension,
    check_shift_commutation,
    degree_shift_operator,
    extend_derivation,
    solve_diagonal_derivations,
)

for tag, kw in (("C2", {}), ("BC2", {}), ("B2", {"realization": "tau"})):
    L = build(tag, 2, 5, **kw)
    print(f"{tag} {kw or ''}")
    for m in range(-2, 3):
        res = solve_diagonal_derivations(L, m)
        verdict = "match" if res.report.passed else "MISMATCH"
        print(f"  m={m:>2}  dim {res.dimension}  {verdict}  {'; '.join(res.predicted_labels)}")
    for d in solve_diagonal_derivations(L, 1).solved:
        shifts = check_shift_commutation(d)
        ext = extend_derivation(d)
        rep = check_extension(ext)
        print(f"  degree-1 derivation: commutes with s_2 {shifts.passed}, extension to "
              f"{ext.ambient.tag} rank {ext.ambient.type.rank}: {rep.passed}")

# d0 itself does not commute with s_2, so it has no extension
L = build("C2", 2, 4)
d0 = degree_shift_operator(L, 0, [i for i, b in enumerate(L.basis) if abs(b.degree) <= 3])
bad = check_shift_commutation(d0, (2,)).checks[0]
print("d0 vs s_2:", bad.passed, bad.witness)
