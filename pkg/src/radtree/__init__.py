"""Spectral computations for radial metric trees and their halfline reductions."""
from .couplings import (
    ConditionReport,
    InterfaceCoupling,
    VertexCoupling,
    check_conditions,
    coupling_denominator,
    is_separating_interface,
    is_separating_vertex,
    preset,
    reconstruct_coupling,
    reduce_coupling,
)
from .errors import (
    ComplexCouplingUnsupported,
    Decoupled,
    DegenerateDenominator,
    DegenerateFloquet,
    DepthTooLarge,
    EmptyBlock,
    EmptyPrefix,
    MathematicalError,
    NoPeriod,
    NonIntegerBranching,
    RadtreeError,
    SpecValidationError,
    UndefinedLetter,
    WindowTooShort,
)
from .halfline import (
    HalflineSystem,
    free_transfer,
    interface_determinant,
    interface_transfer,
    monodromy,
    periodic_cell_transfer,
    propagate,
)
from .seqgen import (
    DataWord,
    detect_eventual_period,
    periodic_word,
    power2_word,
    substitution_word,
)
from .spectra import (
    BandStructure,
    WeylValue,
    band_structure,
    floquet_multipliers,
    halfline_eigenvalues,
    lyapunov_exponent,
    reflectionless_defect,
    weyl_m,
    weyl_m_boundary,
)
from .tree import (
    RadialTreeSpec,
    SpectralComparison,
    assemble_secular,
    compare_spectra,
    halfline_components,
    halfline_direct_sum_eigenvalues,
    leaf_count,
    symmetric_halfline,
    tree_eigenvalues,
)

__version__ = "0.1.0"
