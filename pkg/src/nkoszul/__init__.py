"""Exact-arithmetic verification of PBW and bounded-degree Koszul properties.

The package checks, at a user-chosen degree bound and in exact cyclotomic
arithmetic, the homological conditions under which a filtered algebra
presented by inhomogeneous relations of a single top degree N has the PBW
property, including the antisymmetrizer-minus-psi family over smash
products with finite groups and its associated bimodule N-complexes.
"""

from .scalar import (
    DimensionMismatch,
    MatrixS,
    Scalar,
    Subspace,
    format_scalar,
    image,
    kernel,
    parse_scalar,
    rank,
    rref,
)
from .smashtensor import (
    FilteredSubspace,
    GroupData,
    Subbimodule,
    TensorContext,
    W,
    check_lemma22,
    ideal_component,
    product_EF,
    smash_product,
)
from .homogeneous import (
    HomogeneousAlgebra,
    KoszulCertificate,
    change_of_rings,
    check_ec,
    check_tor3_concentration,
    dim_A,
    koszul_complex_check,
    zeta,
)
from .filtered import (
    FilteredPresentation,
    PBWReport,
    PhiMap,
    build_down_up,
    build_lie,
    build_phi,
    check_condition_I,
    check_condition_J,
    check_remark_310,
    oracle_pbw,
    pbw_verdict,
    project_R,
)
from .grouppres import (
    GDecomposition,
    PsiMap,
    build_H_psi,
    build_psi_corollary45,
    build_psi_symplectic_reflection,
    check_equivariance,
    check_identity_41,
    decompose,
    koszul_differential,
    theorem_44_verdict,
)
from .komplex import (
    NComplexSlice,
    TruncatedU,
    check_dN_zero,
    contracted_complex,
    wedge_agreement,
    wedge_differentials,
)

__all__ = [
    "DimensionMismatch",
    "FilteredPresentation",
    "FilteredSubspace",
    "GDecomposition",
    "GroupData",
    "HomogeneousAlgebra",
    "KoszulCertificate",
    "MatrixS",
    "NComplexSlice",
    "PBWReport",
    "PhiMap",
    "PsiMap",
    "Scalar",
    "Subbimodule",
    "Subspace",
    "TensorContext",
    "TruncatedU",
    "W",
    "build_H_psi",
    "build_down_up",
    "build_lie",
    "build_phi",
    "build_psi_corollary45",
    "build_psi_symplectic_reflection",
    "change_of_rings",
    "check_condition_I",
    "check_condition_J",
    "check_dN_zero",
    "check_ec",
    "check_equivariance",
    "check_identity_41",
    "check_lemma22",
    "check_remark_310",
    "check_tor3_concentration",
    "contracted_complex",
    "decompose",
    "dim_A",
    "format_scalar",
    "ideal_component",
    "image",
    "kernel",
    "koszul_complex_check",
    "koszul_differential",
    "oracle_pbw",
    "parse_scalar",
    "pbw_verdict",
    "product_EF",
    "project_R",
    "rank",
    "rref",
    "smash_product",
    "theorem_44_verdict",
    "wedge_agreement",
    "wedge_differentials",
    "zeta",
]

__version__ = "0.1.0"
