"""Exact computation with cellular sheaves of vector spaces on finite posets.

The package builds the Alexandrov topology of a finite poset, solves for
sections of a cellular sheaf over arbitrary open sets by exact linear
algebra, computes stalks both canonically and as literal direct-limit
quotients, and verifies the gluing laws by finite enumeration.
"""

from .errors import (
    CellSheafError,
    DocumentError,
    EnumerationLimitError,
    FunctorialityError,
    GlueConflictError,
    NaturalityError,
    NotAntisymmetricError,
    NotOpenError,
    ShapeError,
    UnknownElementError,
    ValidationError,
)
from .linalg import (
    FpElement,
    Matrix,
    PrimeField,
    QQ,
    SubspaceBasis,
    block_assemble,
    compose,
    field_from_name,
    image_basis,
    is_exact_at,
    is_injective,
    is_surjective,
    kernel_basis,
    rref,
    subspace_from_rows,
)
from .order import (
    MonotoneMap,
    Poset,
    PreOrder,
    QuotientResult,
    as_poset,
    build_poset,
    build_preorder,
    factor_through_quotient,
    hasse_edges,
    identity_map,
    is_monotone,
    is_poset,
    quotient_to_poset,
)
from .topology import (
    BasisIndex,
    OpenSet,
    basis_index,
    basis_index_by_scan,
    check_index_lemma,
    closure_of_point,
    empty_open,
    enumerate_opens,
    is_continuous,
    is_open,
    open_star,
    open_violation,
    union_of_stars,
    whole_space,
)
from .sheaf import (
    AxiomReport,
    CellularSheaf,
    CoverCheck,
    DirectLimitStalk,
    Section,
    SectionSpace,
    StalkReport,
    build_sheaf,
    constant_sheaf,
    glue,
    restrict_section,
    restriction_matrix,
    section_from_value,
    sections_over,
    sections_over_all_pairs,
    stalk_at,
    stalk_direct_limit,
    verify_base_sheaf_axioms,
    verify_sheaf_axioms_extended,
)
from .morphism import (
    MorphismFlags,
    SheafMorphism,
    build_morphism,
    classify,
    extend_from_basis,
    identity_morphism,
    section_map,
    section_maps_all_injective,
    section_maps_all_invertible,
    stalk_map,
    stalk_map_direct_limit,
    zero_morphism,
)
from .document import (
    RealizedDocument,
    SheafDocument,
    parse_document,
    parse_text,
    realize,
    render_document,
)

__version__ = "0.1.0"
