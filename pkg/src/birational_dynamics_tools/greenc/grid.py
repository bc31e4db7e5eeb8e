"""
Finite-difference approximation of the mixed measure d^-n delta^-n (f^n)^* omega ^ (f^-n)^* omega on a box of C^2.

The affine chart t = 1 is identified with R^4 through (Re z, Im z, Re w, Im w). Potentials are sampled at cell
centers, second derivatives come from applying numpy.gradient twice, and the measure density relative to Lebesgue
measure is (4 / pi^2) [u_zz v_ww + u_ww v_zz - 2 Re(u_zw conj(v_zw))] for u = u^+, v = u^-, where u_zw stands for
the mixed derivative d^2u / dz dw-bar.
"""
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from .lift import ComplexLift, ComplexPair, euclidean_norm, sup_norm
from ..utils.errors import ResourceLimit, WrongDimension
from ..utils.types import BoxType, FilePathType
from ..utils.writers import atomic_write_bytes, write_csv, write_json

MAX_GRID_CELLS = 20_000_000
DEFAULT_BOX = ((-3.0, 3.0),) * 4
# nodes evaluated per batch when iterating the lifts
SLAB_NODES = 250_000
AXIS_LABELS = ("re_z", "im_z", "re_w", "im_w")


@dataclass(eq=False)
class GridMeasure:
    n: int
    box: BoxType
    resolution: int
    cell_masses: np.ndarray
    total_mass: float
    clamped_mass_fraction: float = 0.0
    masked_nodes: int = 0

    def __post_init__(self):
        assert np.all(self.cell_masses >= 0), "Cell masses must be non-negative after clamping."

    @property
    def cell_volume(self) -> float:
        return math.prod((high - low) / self.resolution for low, high in self.box)

    def sidecar(self) -> dict:
        return dict(
            n=self.n,
            box=[list(interval) for interval in self.box],
            resolution=self.resolution,
            total_mass=self.total_mass,
            clamped_mass_fraction=self.clamped_mass_fraction,
            masked_nodes=self.masked_nodes,
            axes=list(AXIS_LABELS),
            dtype="<f8",
            order="C",
        )

    def z_marginal(self) -> pd.DataFrame:
        """Masses summed over (Re w, Im w), one row per (Re z, Im z) cell."""
        (low_x, high_x), (low_y, high_y) = self.box[0], self.box[1]
        centers_x = low_x + (np.arange(self.resolution) + 0.5) * (high_x - low_x) / self.resolution
        centers_y = low_y + (np.arange(self.resolution) + 0.5) * (high_y - low_y) / self.resolution
        marginal = self.cell_masses.sum(axis=(2, 3))
        grid_x, grid_y = np.meshgrid(centers_x, centers_y, indexing="ij")
        return pd.DataFrame(dict(re_z=grid_x.ravel(), im_z=grid_y.ravel(), mass=marginal.ravel()))


def _cell_centers(box: BoxType, resolution: int) -> Tuple[np.ndarray, ...]:
    return tuple(low + (np.arange(resolution) + 0.5) * (high - low) / resolution for low, high in box)


def log_norm_of_iterate(F: ComplexLift, points: np.ndarray, n: int) -> np.ndarray:
    """
    log |F^n(p)| (Euclidean norm) for a batch of points, renormalizing to unit sup norm after every step.

    Writing F^m(p) = c_m v_m with |v_m| = 1 gives log c_(m+1) = d log c_m + log |F(v_m)|.
    """
    log_scale = np.log(sup_norm(points))
    current = points / sup_norm(points)[..., None]
    for _ in range(n):
        image = F.evaluate(current)
        norms = sup_norm(image)
        with np.errstate(divide="ignore"):
            log_scale = F.degree * log_scale + np.log(norms)
        current = image / np.where(norms > 0, norms, 1.0)[..., None]
    with np.errstate(divide="ignore"):
        return log_scale + np.log(euclidean_norm(current))


def _potential(F: ComplexLift, n: int, axes: Sequence[np.ndarray], display_progress: bool, label: str) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    z = (grids[0] + 1j * grids[1]).ravel()
    w = (grids[2] + 1j * grids[3]).ravel()
    values = np.empty(z.shape, dtype=float)
    for start in tqdm(range(0, len(z), SLAB_NODES), desc=f"Potential {label}", disable=not display_progress):
        z_slab, w_slab = z[start : start + SLAB_NODES], w[start : start + SLAB_NODES]
        points = np.stack([z_slab, w_slab, np.ones_like(z_slab)], axis=-1)
        values[start : start + SLAB_NODES] = log_norm_of_iterate(F, points, n) / F.degree**n
    return values.reshape(grids[0].shape)


def _complex_hessian(u: np.ndarray, spacing: Sequence[float]):
    """Return u_zz-bar, u_ww-bar and u_zw-bar on the grid."""
    first = np.gradient(u, *spacing, edge_order=2)

    def second(i: int, j: int) -> np.ndarray:
        return np.gradient(first[i], spacing[j], axis=j, edge_order=2)

    x1, y1, x2, y2 = 0, 1, 2, 3
    u_zz = (second(x1, x1) + second(y1, y1)) / 4
    u_ww = (second(x2, x2) + second(y2, y2)) / 4
    u_zw = ((second(x1, x2) + second(y1, y2)) + 1j * (second(x1, y2) - second(y1, x2))) / 4
    return u_zz, u_ww, u_zw


def mixed_density(u_plus: np.ndarray, u_minus: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    """Density of dd^c u_plus ^ dd^c u_minus with respect to Lebesgue measure on R^4."""
    a_zz, a_ww, a_zw = _complex_hessian(u_plus, spacing)
    b_zz, b_ww, b_zw = _complex_hessian(u_minus, spacing)
    return 4 / math.pi**2 * (a_zz * b_ww + a_ww * b_zz - 2 * np.real(a_zw * np.conj(b_zw)))


def fs_volume_density(z, w):
    """Closed form of the Fubini-Study volume omega ^ omega in the chart t = 1; integrates to 1 over C^2."""
    radius2 = np.abs(z) ** 2 + np.abs(w) ** 2
    return 2 / (math.pi**2 * (1 + radius2) ** 3)


def mu_grid_k2(
    pair: ComplexPair,
    n: int = 3,
    box: BoxType = DEFAULT_BOX,
    resolution: int = 40,
    max_cells: int = MAX_GRID_CELLS,
    display_progress: bool = False,
) -> GridMeasure:
    """
    Approximate mu_n = d^-n delta^-n (f^n)^* omega ^ (f^-n)^* omega on a box of the affine chart of P^2.

    Negative cell densities are finite-difference artifacts. They are clamped to zero, the clamped mass relative to
    the positive mass is reported, and the remaining cells are scaled so the grid keeps the signed integral of the
    finite-difference density. Nodes where a potential is not finite are masked to zero mass.

    Raises
    ------
    WrongDimension
        If the pair does not act on P^2.
    ResourceLimit
        If resolution^4 exceeds max_cells.
    """
    if pair.k != 2:
        raise WrongDimension(f"The grid measure is only implemented on P^2 (received P^{pair.k}).")
    assert n >= 0, f"n ({n}) must be non-negative!"
    assert resolution >= 3, f"resolution ({resolution}) must be at least 3 for second differences."
    assert len(box) == 4 and all(low < high for low, high in box), f"Invalid box {box}."
    if resolution**4 > max_cells:
        raise ResourceLimit(f"A grid of {resolution}^4 = {resolution**4} cells exceeds the cap of {max_cells}.")

    axes = _cell_centers(box, resolution)
    spacing = [(high - low) / resolution for low, high in box]
    u_plus = _potential(pair.forward, n, axes, display_progress, "u+")
    u_minus = _potential(pair.backward, n, axes, display_progress, "u-")
    density = mixed_density(u_plus, u_minus, spacing)

    masked = ~np.isfinite(density)
    density[masked] = 0.0
    cell_volume = math.prod(spacing)
    negative_mass = -float(density[density < 0].sum()) * cell_volume
    masses = np.clip(density, 0.0, None) * cell_volume
    positive_mass = float(masses.sum())
    signed_mass = positive_mass - negative_mass
    if positive_mass > 0 and signed_mass > 0:
        masses *= signed_mass / positive_mass
    else:
        warnings.warn(f"The signed grid mass {signed_mass} is not positive; cell masses are left unscaled.")
    total_mass = float(masses.sum())
    return GridMeasure(
        n=n,
        box=tuple(tuple(float(value) for value in interval) for interval in box),
        resolution=resolution,
        cell_masses=masses,
        total_mass=total_mass,
        clamped_mass_fraction=negative_mass / positive_mass if positive_mass > 0 else 0.0,
        masked_nodes=int(np.count_nonzero(masked)),
    )


def export_grid(grid: GridMeasure, file_path: FilePathType) -> dict:
    """
    Write <stem>.bin (little-endian float64, row-major over the four axes), a <stem>.json sidecar and a
    <stem>_marginal.csv projection onto the z-plane. Returns the written paths.
    """
    file_path = Path(file_path)
    stem = file_path.with_suffix("")
    paths = dict(
        binary=stem.with_suffix(".bin"),
        sidecar=stem.with_suffix(".json"),
        marginal=stem.parent / f"{stem.name}_marginal.csv",
    )
    atomic_write_bytes(paths["binary"], np.ascontiguousarray(grid.cell_masses, dtype="<f8").tobytes(order="C"))
    write_json(paths["sidecar"], grid.sidecar())
    write_csv(paths["marginal"], grid.z_marginal())
    return paths
