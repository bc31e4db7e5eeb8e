from .projcore import BirationalPair, RatProjPoint, cremona_pair, henon_pair, load_pair, regular_pair_p3, twisted_pair
from .padic import certify_stability_henon_A, orbit_valuations, vp, zariski_density_check
from .heights import canonical_height, hprime_recursion_check, lee_scan, naive_height
from .greenc import energy_partial_sum, fs_distance, green_partial, load_complex_pair, mu_grid_k2, phi_f
from .periodic import equidist_report, fixed_points_exact_henon, line_mass, periodic_points_numeric
from .tools import run
