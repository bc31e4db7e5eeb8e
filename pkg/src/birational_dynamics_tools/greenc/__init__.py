from .lift import (
    ComplexLift,
    ComplexLocus,
    ComplexPair,
    CProjPoint,
    complex_lift,
    complex_pair,
    complex_pair_from_dict,
    euclidean_norm,
    load_complex_pair,
    sup_norm,
)
from .potentials import fs_distance, green_partial, iterate_normalized, phi_f, phi_values
from .energy import EnergyMethod, EnergySeries, energy_partial_sum
from .grid import GridMeasure, export_grid, fs_volume_density, log_norm_of_iterate, mixed_density, mu_grid_k2
