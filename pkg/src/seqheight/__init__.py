"""Heights, preperiodic points, and currents for bounded sequences of
morphisms on projective space.

The library follows one pipeline: validate integer morphisms with exact
certificates (algebra, morphisms), iterate them with certified error control
(heights, orbits, averaging), and study the same dynamics analytically over
the complex numbers (green, equidist).  Everything rational is exact big
integer arithmetic; everything complex carries an explicit truncation
radius.
"""

from .algebra import (
    HomogeneousForm,
    NullstellensatzCertificate,
    RationalProjectivePoint,
    certify,
    monomials,
    normalize,
)
from .averaging import (
    AveragingReport,
    MonteCarloAverage,
    eigensystem_height_exact,
    eigensystem_height_mc,
    verify_averaging,
)
from .equidist import (
    CloudPoint,
    EquidistributionReport,
    PreimageCloud,
    chordal_distance,
    empirical_pairing,
    equidistribution_report,
    preimage_cloud,
    preimages_one_step,
    roundtrip_residual,
)
from .errors import (
    AllZero,
    BudgetExceeded,
    CertificateNotFound,
    Degenerate,
    DegenerateNearZero,
    DegreeTooSmall,
    DimensionMismatch,
    EnumerationTooLarge,
    MapsToZero,
    NonzeroRequired,
    NoRecurringPhase,
    RootFindingFailed,
    SeqHeightError,
    UnsupportedDimension,
)
from .green import (
    ChartFunction,
    ComplexLiftMap,
    GreenValue,
    LiftScalingReport,
    LiftSequence,
    PairingGrid,
    admissible_potential,
    constant_one,
    current_pairing,
    green_function,
    green_values,
    lift_scaling_check,
    radial_bump,
    sphere_height,
    sphere_im,
    sphere_re,
)
from .heights import (
    ExactLogHeight,
    HeightEstimate,
    canonical_height,
    functional_equation_residual,
    height_sequence,
    multiplicative_height,
    naive_height,
)
from .morphisms import (
    CheckedMap,
    Constant,
    DistortionCertificate,
    ExplicitWord,
    PeriodicWord,
    RandomWord,
    SequenceSpec,
    maps_from_config,
    perturbed_power_map,
    power_map,
    sample_word,
    sequence_from_config,
    validate,
)
from .orbits import (
    BudgetHit,
    FiniteOrbit,
    HeightEscape,
    UnboundedDemoReport,
    bounded_height_points,
    census_threshold,
    forward_orbit,
    preperiodic_census,
    unbounded_demo,
)

__version__ = "0.1.0"

__all__ = [
    "AllZero",
    "AveragingReport",
    "BudgetExceeded",
    "BudgetHit",
    "CertificateNotFound",
    "ChartFunction",
    "CheckedMap",
    "CloudPoint",
    "ComplexLiftMap",
    "Constant",
    "Degenerate",
    "DegenerateNearZero",
    "DegreeTooSmall",
    "DimensionMismatch",
    "DistortionCertificate",
    "EnumerationTooLarge",
    "EquidistributionReport",
    "ExactLogHeight",
    "ExplicitWord",
    "FiniteOrbit",
    "GreenValue",
    "HeightEscape",
    "HeightEstimate",
    "HomogeneousForm",
    "LiftScalingReport",
    "LiftSequence",
    "MapsToZero",
    "MonteCarloAverage",
    "NoRecurringPhase",
    "NonzeroRequired",
    "NullstellensatzCertificate",
    "PairingGrid",
    "PeriodicWord",
    "PreimageCloud",
    "RandomWord",
    "RationalProjectivePoint",
    "RootFindingFailed",
    "SeqHeightError",
    "SequenceSpec",
    "UnboundedDemoReport",
    "UnsupportedDimension",
    "admissible_potential",
    "bounded_height_points",
    "canonical_height",
    "census_threshold",
    "certify",
    "chordal_distance",
    "constant_one",
    "current_pairing",
    "eigensystem_height_exact",
    "eigensystem_height_mc",
    "empirical_pairing",
    "equidistribution_report",
    "forward_orbit",
    "functional_equation_residual",
    "green_function",
    "green_values",
    "height_sequence",
    "lift_scaling_check",
    "maps_from_config",
    "monomials",
    "multiplicative_height",
    "naive_height",
    "normalize",
    "perturbed_power_map",
    "power_map",
    "preimage_cloud",
    "preimages_one_step",
    "preperiodic_census",
    "radial_bump",
    "roundtrip_residual",
    "sample_word",
    "sequence_from_config",
    "sphere_height",
    "sphere_im",
    "sphere_re",
    "unbounded_demo",
    "validate",
    "verify_averaging",
]
