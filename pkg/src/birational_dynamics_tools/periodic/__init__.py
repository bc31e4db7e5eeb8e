from .exact import HenonFixedPoints, fixed_points_exact_henon
from .numeric import PeriodicPointSet, cycle_jacobian, least_period, periodic_points_numeric, require_points
from .equidist import (
    TEST_FUNCTION_LIBRARY_VERSION,
    TEST_FUNCTIONS,
    DiscrepancyReport,
    equidist_report,
    line_distance,
    line_mass,
)
