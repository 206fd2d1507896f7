"""Grid geometry: barrier with slits, solenoid exclusion disk, sponge layer."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class GeometryMask:
    """Static geometry of a simulation grid.

    Indices are (ix, iy) with site coordinates x = origin[0] + ix*h,
    y = origin[1] + iy*h.  The barrier is a vertical column of Dirichlet
    sites at ``barrier_ix`` (``barrier_cells`` thick) interrupted by slit
    apertures given as inclusive iy index ranges.  The exclusion disk keeps
    the matter field strictly out of the region of nonzero magnetic field.
    """

    nx: int
    ny: int
    h: float
    origin: Tuple[float, float] = (0.0, 0.0)
    barrier_ix: Optional[int] = None
    barrier_cells: int = 2
    slits: List[Tuple[int, int]] = field(default_factory=list)
    exclusion_center: Optional[Tuple[float, float]] = None
    exclusion_radius: float = 0.0
    sponge_width: int = 32

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8 or self.h <= 0.0:
            raise GeometryError("grid must be at least 8x8 with positive spacing")
        if 2 * self.sponge_width >= min(self.nx, self.ny):
            raise GeometryError("sponge layers overlap: width too large")
        prev_hi = None
        for lo, hi in sorted(self.slits):
            if not (0 <= lo <= hi < self.ny):
                raise GeometryError(f"slit range ({lo}, {hi}) outside grid")
            if prev_hi is not None and lo <= prev_hi:
                raise GeometryError("slit apertures overlap")
            prev_hi = hi
        if self.slits and self.barrier_ix is None:
            raise GeometryError("slits given but no barrier column")

    # -- coordinates --------------------------------------------------------

    def x_coords(self) -> np.ndarray:
        return self.origin[0] + self.h * np.arange(self.nx)

    def y_coords(self) -> np.ndarray:
        return self.origin[1] + self.h * np.arange(self.ny)

    def site_points(self) -> np.ndarray:
        """(nx, ny, 2) array of site coordinates."""
        xs, ys = np.meshgrid(self.x_coords(), self.y_coords(), indexing="ij")
        return np.stack([xs, ys], axis=-1)

    # -- masks --------------------------------------------------------------

    def interior_mask(self) -> np.ndarray:
        """Float (nx, ny) array: 1 where the field evolves, 0 on Dirichlet sites.

        Dirichlet sites are the outer one-cell frame, the barrier (minus
        slits) and the exclusion disk.
        """
        m = np.ones((self.nx, self.ny), dtype=np.float64)
        m[0, :] = m[-1, :] = 0.0
        m[:, 0] = m[:, -1] = 0.0
        if self.barrier_ix is not None:
            i0 = self.barrier_ix
            i1 = min(self.nx, i0 + self.barrier_cells)
            wall = np.zeros(self.ny, dtype=np.float64)
            for lo, hi in self.slits:
                wall[lo:hi + 1] = 1.0
            m[i0:i1, :] *= wall[None, :]
        if self.exclusion_center is not None and self.exclusion_radius > 0.0:
            p = self.site_points()
            r2 = ((p[..., 0] - self.exclusion_center[0]) ** 2
                  + (p[..., 1] - self.exclusion_center[1]) ** 2)
            m[r2 <= self.exclusion_radius**2] = 0.0
        return m

    def exclusion_mask(self) -> np.ndarray:
        """Boolean (nx, ny) array: True inside the exclusion disk."""
        if self.exclusion_center is None or self.exclusion_radius <= 0.0:
            return np.zeros((self.nx, self.ny), dtype=bool)
        p = self.site_points()
        r2 = ((p[..., 0] - self.exclusion_center[0]) ** 2
              + (p[..., 1] - self.exclusion_center[1]) ** 2)
        return r2 <= self.exclusion_radius**2

    def sponge_profile(self, strength: float) -> np.ndarray:
        """Damping rate gamma(x, y): strength * (depth/width)^4 in the sponge band."""
        gamma = np.zeros((self.nx, self.ny), dtype=np.float64)
        w = self.sponge_width
        if w <= 0 or strength == 0.0:
            return gamma
        ix = np.arange(self.nx)[:, None]
        iy = np.arange(self.ny)[None, :]
        depth_x = np.maximum(w - ix, ix - (self.nx - 1 - w))
        depth_y = np.maximum(w - iy, iy - (self.ny - 1 - w))
        depth = np.maximum(depth_x, depth_y)
        depth = np.clip(depth, 0, w)
        gamma[:, :] = strength * (depth / w) ** 4
        return gamma
