"""Ideal circle patterns on weighted surface decompositions.

Character-based existence criteria and combinatorial Ricci flows in
Euclidean and hyperbolic background geometry.
"""

__version__ = "0.1.0"

from .complex import (
    B1Report,
    CharacterVector,
    ComplexError,
    Triangulation,
    WeightedComplex,
    build_complex,
    character,
    euler_characteristic,
    load_complex,
    to_spec,
    triangulate,
    validate_b1,
)
from .criteria import (
    CriteriaReport,
    SubsetReport,
    Verdict,
    check_prescribed,
    check_subset_inequalities,
    classify_character,
)
from .flow import (
    FlowConfig,
    FlowError,
    FlowResult,
    FlowStatus,
    conserved_quantities,
    estimate_rate,
    run_flow,
)
from .geometry import (
    CurvatureVector,
    Geometry,
    GeometryRangeError,
    cone_angle,
    cone_angles,
    curvature_vector,
    edge_length,
    gauss_bonnet_residual,
    hyperbolic_area,
    inner_angle,
    inner_angle_gradient,
)
