from .naive import finite_place_constant, lift_bound_constant, naive_height, sample_points, total_c1_constant
from .canonical import HeightEstimate, canonical_height, height_tail_bound
from .lee import (
    HPrimeReport,
    LeeReport,
    c_sequence,
    hprime_batch,
    hprime_recursion_check,
    lee_admissible,
    lee_defect,
    lee_kappa,
    lee_scan,
)
