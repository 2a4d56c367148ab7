"""Exact arithmetic for locally loop algebras, their central extensions and locally affine Lie algebras."""
from .errors import (
    DomainError,
    LoopforgeError,
    MarginError,
    ParseError,
    SingularFormError,
    StructuralError,
    WindowError,
)
from .exact import LaurentPoly, as_q, epsilon, laurent_mul, q_str
from .forms import CartanElement, FormSpec, cocycle, extended_bracket, form_eval, radical_of_form, t_xi
from .loops import (
    TAGS,
    Embedding,
    GradedElement,
    LoopAlgebra,
    LoopType,
    build,
    embed,
    fixed_algebra,
    hat_sigma,
    loop_bracket,
    shift,
)
from .matrices import (
    DiagExt,
    FinitaryMatrix,
    IndexUniverse,
    NaturalVector,
    StructuralS,
    diag_bracket,
    mat_bracket,
    normalize_almost_scalar,
    sigma,
    tau,
)
from .simple_lie import RootLengthClass, SimpleType, Weight, basis_of, coroot, module_action, root_length
from .verify import (
    Progression,
    RootDatum,
    StructureTable,
    VerificationReport,
    ad_spectrum,
    check_lie_torus,
    check_root_datum,
    compute_center,
    extend_derivation,
    generation_check,
    solve_diagonal_derivations,
    spectrum_obstruction,
)

__version__ = "0.1.0"
