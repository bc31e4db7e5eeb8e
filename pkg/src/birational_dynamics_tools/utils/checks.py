from numbers import Real
from typing import Optional

import numpy as np
from scipy.stats import linregress


def calculate_geometric_ratio(series: np.ndarray, zero_tolerance: float = 1e-300) -> Optional[Real]:
    """Fit |series_n| ~ C r^n by least squares on the logarithms and return r.

    Entries with modulus below zero_tolerance are dropped. If fewer than two entries remain the series is
    (numerically) finitely supported and the ratio is 0.0."""
    series = np.abs(np.asarray(series, dtype=float))
    indices = np.flatnonzero(series > zero_tolerance)
    if len(indices) < 2:
        return 0.0
    fit = linregress(indices, np.log(series[indices]))
    return float(np.exp(fit.slope))


def is_cauchy(partial_sums: np.ndarray, ratio: float, tolerance: float = 1e-12) -> bool:
    """Check that the increments of partial_sums decay at least like (1 + n) ratio^n after their peak."""
    differences = np.abs(np.diff(np.asarray(partial_sums, dtype=float)))
    if len(differences) == 0 or differences.max() <= tolerance:
        return True
    if ratio >= 1:
        return False
    peak = int(np.argmax(differences))
    steps = np.arange(len(differences) - peak)
    envelope = differences[peak] * (1 + steps) * ratio**steps
    return bool(np.all(differences[peak:] <= envelope + tolerance))
