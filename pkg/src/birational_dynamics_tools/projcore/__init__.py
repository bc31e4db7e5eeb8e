from .points import RatProjPoint, normalize, random_points
from .polymaps import HomogeneousMap, evaluate, evaluate_terms, linear_map, orbit, polynomial_ring
from .composition import (
    DEFAULT_MONOMIAL_BUDGET,
    CommonFactorReport,
    common_factor_degree,
    common_factor_report,
    compose,
    strip_common_factor,
)
from .birational import (
    BirationalPair,
    Direction,
    LocusDescription,
    LocusKind,
    StabilityEvidence,
    ValidationReport,
    degree_sequence,
    dynamical_degree_estimate,
    stability_evidence,
    validate_pair,
    vanishes_on,
)
from .families import cremona_pair, henon_pair, invert_matrix, regular_pair_p3, twisted_pair
from .specification import dump_pair, is_complex_specification, load_pair, pair_from_dict, pair_to_dict
