"""Transform between the complex matter field (psi, A) and the real dressed
representation (phi, Abar).

phi = |psi| and Abar_mu = A_mu - (d_mu arg psi)/e.  Abar is the gauge-invariant
"dressed" potential: under A -> A + grad(chi), psi -> psi * exp(i e chi) both
changes cancel.  At nodes of psi the phase is undefined, so sites with
|psi| < eps_node * max|psi| are masked rather than silently zeroed.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from .potentials import VectorPotentialSpec, eval_potential

DEFAULT_EPS_NODE = 1e-12


class GaugeTransformError(ValueError):
    pass


def wrap_angle(d):
    """Fold angle differences into (-pi, pi]."""
    return -((-np.asarray(d) + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass
class ComplexField2D:
    """Complex amplitude on a uniform grid, with optional previous time level."""

    values: np.ndarray
    h: float
    origin: Tuple[float, float] = (0.0, 0.0)
    t: float = 0.0
    dt: Optional[float] = None
    values_prev: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if not np.all(np.isfinite(self.values.view(np.float64))):
            raise ValueError("field values must be finite")
        if self.values_prev is not None:
            self.values_prev = np.ascontiguousarray(self.values_prev,
                                                    dtype=np.complex128)
            if self.values_prev.shape != self.values.shape:
                raise ValueError("time levels must have matching shapes")

    @property
    def shape(self):
        return self.values.shape

    def site_points(self) -> np.ndarray:
        nx, ny = self.values.shape
        xs = self.origin[0] + self.h * np.arange(nx)
        ys = self.origin[1] + self.h * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)


@dataclass
class RealDressedPair:
    """Real amplitude phi >= 0 plus dressed potential (abar_x, abar_y, abar_t).

    ``mask`` is True where the transform is defined; at masked-out sites the
    potential components are NaN, never silently zero.  ``abar_t`` is None
    when the source field carried a single time level.
    """

    phi: np.ndarray
    abar_x: np.ndarray
    abar_y: np.ndarray
    mask: np.ndarray
    h: float
    origin: Tuple[float, float] = (0.0, 0.0)
    abar_t: Optional[np.ndarray] = None
    e: float = 1.0

    def __post_init__(self):
        if np.any(self.phi < 0.0):
            raise ValueError("phi must be nonnegative")


def _axis_phase_gradient(theta, defined, h, axis):
    """Branch-safe d(theta)/d(axis): centered in the bulk, one-sided 2nd order
    at the ends.  Returns (gradient, validity mask)."""
    theta = np.moveaxis(theta, axis, 0)
    defined = np.moveaxis(defined, axis, 0)
    f = wrap_angle(theta[1:] - theta[:-1])
    g = np.empty_like(theta)
    g[1:-1] = (f[1:] + f[:-1]) / (2.0 * h)
    g[0] = (3.0 * f[0] - f[1]) / (2.0 * h)
    g[-1] = (3.0 * f[-1] - f[-2]) / (2.0 * h)
    valid = np.empty(theta.shape, dtype=bool)
    valid[1:-1] = defined[:-2] & defined[1:-1] & defined[2:]
    valid[0] = defined[0] & defined[1] & defined[2]
    valid[-1] = defined[-1] & defined[-2] & defined[-3]
    return np.moveaxis(g, 0, axis), np.moveaxis(valid, 0, axis)


def to_schrodinger_gauge(
    psi: ComplexField2D,
    A: VectorPotentialSpec,
    e: float = 1.0,
    eps_node: float = DEFAULT_EPS_NODE,
) -> RealDressedPair:
    """Dress the external potential with the matter-field phase gradient.

    The phase derivative is a centered finite difference with neighbor
    differences folded into (-pi, pi] first (standard unwrapping for smooth
    fields); sites within eps_node of a node, or whose stencil touches one,
    are masked.
    """
    phi = np.abs(psi.values)
    peak = float(phi.max())
    if peak == 0.0:
        raise GaugeTransformError("field has no support")
    defined = phi >= eps_node * peak
    theta = np.angle(psi.values)

    gx, vx = _axis_phase_gradient(theta, defined, psi.h, axis=0)
    gy, vy = _axis_phase_gradient(theta, defined, psi.h, axis=1)
    mask = defined & vx & vy

    A_site = eval_potential(A, psi.site_points())
    abar_x = A_site[..., 0] - gx / e
    abar_y = A_site[..., 1] - gy / e
    abar_x[~mask] = np.nan
    abar_y[~mask] = np.nan

    abar_t = None
    if psi.values_prev is not None and psi.dt:
        phi_prev = np.abs(psi.values_prev)
        t_ok = mask & (phi_prev >= eps_node * peak)
        dth = wrap_angle(theta - np.angle(psi.values_prev)) / psi.dt
        # external A has no time component; Abar_t = -d_t(arg psi)/e
        abar_t = np.where(t_ok, -dth / e, np.nan)

    return RealDressedPair(phi=phi, abar_x=abar_x, abar_y=abar_y, mask=mask,
                           h=psi.h, origin=psi.origin, abar_t=abar_t, e=e)


def from_schrodinger_gauge(
    pair: RealDressedPair,
    A: VectorPotentialSpec,
    anchor: Tuple[int, int] = (0, 0),
    anchor_phase: float = 0.0,
    e: Optional[float] = None,
    holonomy_tol: float = 0.5,
) -> ComplexField2D:
    """Rebuild the complex field from (phi, Abar) and the external potential.

    The phase gradient is e*(A - Abar); it is integrated from ``anchor`` over
    a breadth-first spanning tree of the defined region (trapezoid rule per
    lattice edge).  Loop inconsistencies beyond ``holonomy_tol`` indicate a
    phase vortex and raise an error.
    """
    if e is None:
        e = pair.e
    mask = pair.mask
    nx, ny = mask.shape
    if not mask[anchor]:
        raise GaugeTransformError("anchor lies outside the defined region")

    labels, n_comp = ndimage.label(mask)
    if n_comp > 1:
        sizes = ndimage.sum_labels(mask, labels, index=range(1, n_comp + 1))
        raise GaugeTransformError(
            f"defined region is disconnected: {n_comp} components "
            f"with sizes {[int(s) for s in sizes]}")

    pts = np.stack(np.meshgrid(
        pair.origin[0] + pair.h * np.arange(nx),
        pair.origin[1] + pair.h * np.arange(ny),
        indexing="ij"), axis=-1)
    A_site = eval_potential(A, pts)
    gx = e * (A_site[..., 0] - pair.abar_x)
    gy = e * (A_site[..., 1] - pair.abar_y)

    theta = np.full((nx, ny), np.nan)
    theta[anchor] = anchor_phase
    seen = np.zeros((nx, ny), dtype=bool)
    seen[anchor] = True
    queue = deque([anchor])
    half_h = 0.5 * pair.h
    while queue:
        i, j = queue.popleft()
        for di, dj, grad in ((1, 0, gx), (-1, 0, gx), (0, 1, gy), (0, -1, gy)):
            ni, nj = i + di, j + dj
            if not (0 <= ni < nx and 0 <= nj < ny):
                continue
            if seen[ni, nj] or not mask[ni, nj]:
                continue
            step = (di + dj) * half_h * (grad[i, j] + grad[ni, nj])
            theta[ni, nj] = theta[i, j] + step
            seen[ni, nj] = True
            queue.append((ni, nj))

    # consistency over non-tree edges: residual phase must be integrable
    worst = 0.0
    for axis, grad in ((0, gx), (1, gy)):
        a = [slice(None)] * 2
        b = [slice(None)] * 2
        a[axis] = slice(None, -1)
        b[axis] = slice(1, None)
        both = mask[tuple(a)] & mask[tuple(b)]
        if not np.any(both):
            continue
        edge = half_h * (grad[tuple(a)] + grad[tuple(b)])
        resid = np.abs((theta[tuple(b)] - theta[tuple(a)] - edge)[both])
        worst = max(worst, float(resid.max()))
    if worst > holonomy_tol:
        raise GaugeTransformError(
            f"non-integrable phase: loop holonomy residual {worst:.3g} "
            f"exceeds tolerance {holonomy_tol:.3g}")

    values = np.where(mask, pair.phi * np.exp(1j * np.where(mask, theta, 0.0)),
                      pair.phi)
    return ComplexField2D(values=values, h=pair.h, origin=pair.origin)


@dataclass
class DressedCurrent:
    """Diagnostic current j_mu = -2 e^2 Abar_mu phi^2 per site (NaN where masked)."""

    jx: np.ndarray
    jy: np.ndarray
    jt: Optional[np.ndarray] = None


def dressed_current(pair: RealDressedPair, e: float = 1.0) -> DressedCurrent:
    f = -2.0 * e * e * pair.phi**2
    jt = None if pair.abar_t is None else f * pair.abar_t
    return DressedCurrent(jx=f * pair.abar_x, jy=f * pair.abar_y, jt=jt)
