"""Exact computations with cosymplectic and coKahler structures on Lie algebras."""
from .catalog import catalog_get, names, verify_all, verify_entry, verify_table_row
from .correspondence import (
    EvenBundle,
    OddBundle,
    extend,
    extend_acm,
    lift_iso,
    reduce,
    reduce_acm,
    verify_iso_even,
    verify_iso_odd,
)
from .errors import CosymError
from .forms import KForm, cartan_d, evaluate, interior, is_top_nonzero, kform, pullback, wedge
from .lie import (
    LieAlgebra,
    MatSpace,
    ad,
    bracket,
    derivation_space,
    is_derivation,
    jacobi_defect,
    new_lie_algebra,
    restrict_to_subspace,
)
from .structures import (
    AcmStructure,
    CosymPair,
    check_acm,
    check_almost_cosymplectic,
    check_symplectic,
    classify,
    detect_alpha,
    f_form,
    fundamental_form,
    is_ist,
    ist_derivation_space,
    lie_derivative_metric,
    lie_derivative_phi,
    nijenhuis,
    normality_defect,
    polarize,
    reeb_vector,
)

__version__ = "0.1.0"
