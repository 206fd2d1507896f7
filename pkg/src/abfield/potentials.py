"""Static external vector-potential configurations and path integrals.

All quantities are in natural units (hbar = c = 1); lengths are measured in
units of the inverse mass parameter of the matter field and the flux is
quoted in units where the interference phase is e*flux directly.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

TWO_PI = 2.0 * np.pi

# Tolerance for classifying a signed-angle sum as an integer winding number.
WINDING_TOL = 1e-6


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class PathSpec:
    """Polyline in the plane, open or closed.

    ``vertices`` is an (N, 2) float array.  For closed paths the segment from
    the last vertex back to the first is implicit (a duplicated final vertex
    is accepted and dropped).
    """

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=np.float64))
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise PathError("degenerate path: need at least 2 points in the plane")
        if self.closed and np.allclose(v[0], v[-1]) and v.shape[0] > 2:
            v = v[:-1]
        object.__setattr__(self, "vertices", v)

    def segments(self) -> np.ndarray:
        """Return (M, 2, 2) array of segment endpoints, closing segment included."""
        v = self.vertices
        if self.closed:
            v = np.vstack([v, v[:1]])
        return np.stack([v[:-1], v[1:]], axis=1)

    def min_distance_to(self, point) -> float:
        """Minimum distance from any segment of the path to ``point``."""
        p = np.asarray(point, dtype=np.float64)
        best = np.inf
        for a, b in self.segments():
            best = min(best, _segment_point_distance(a, b, p))
        return float(best)


def _segment_point_distance(a, b, p) -> float:
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.hypot(*(p - a)))
    t = np.clip(float((p - a) @ d) / dd, 0.0, 1.0)
    return float(np.hypot(*(p - (a + t * d))))


def load_path(text: str) -> PathSpec:
    """Parse a plain-text vertex list: one "x y" pair per line.

    Lines starting with "#" are comments; the directive "#closed" marks the
    path as a closed loop.
    """
    closed = False
    verts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().lower() == "closed":
                closed = True
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PathError(f"line {lineno}: expected 'x y', got {raw!r}")
        try:
            verts.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise PathError(f"line {lineno}: {exc}") from None
    return PathSpec(np.array(verts, dtype=np.float64), closed=closed)


# ---------------------------------------------------------------------------
# Gauge functions chi(x) for shifted potentials A -> A + grad(chi)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeFunction:
    """Named smooth, single-valued gauge function with analytic gradient.

    kinds:
      "linear":    chi = c1*x + c2*y                 params (c1, c2)
      "sinusoid":  chi = a*sin(kx*x + ky*y + p)      params (a, kx, ky, p)
      "gaussian":  chi = a*exp(-((x-x0)^2+(y-y0)^2)/(2 w^2))   params (a, x0, y0, w)
    """

    kind: str
    params: Tuple[float, ...]

    def __post_init__(self):
        n_expected = {"linear": 2, "sinusoid": 4, "gaussian": 4}
        if self.kind not in n_expected:
            raise ValueError(f"unknown gauge function kind {self.kind!r}")
        if len(self.params) != n_expected[self.kind]:
            raise ValueError(
                f"gauge function {self.kind!r} takes {n_expected[self.kind]} params"
            )
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        px, py = x[..., 0], x[..., 1]
        if self.kind == "linear":
            c1, c2 = self.params
            return c1 * px + c2 * py
        if self.kind == "sinusoid":
            a, kx, ky, p = self.params
            return a * np.sin(kx * px + ky * py + p)
        a, x0, y0, w = self.params
        return a * np.exp(-((px - x0) ** 2 + (py - y0) ** 2) / (2.0 * w * w))

    def grad(self, x):
        x = np.asarray(x, dtype=np.float64)
        px, py = x[..., 0], x[..., 1]
        out = np.empty(x.shape, dtype=np.float64)
        if self.kind == "linear":
            c1, c2 = self.params
            out[..., 0] = c1
            out[..., 1] = c2
        elif self.kind == "sinusoid":
            a, kx, ky, p = self.params
            c = a * np.cos(kx * px + ky * py + p)
            out[..., 0] = kx * c
            out[..., 1] = ky * c
        else:
            a, x0, y0, w = self.params
            g = self(x) / (w * w)
            out[..., 0] = -(px - x0) * g
            out[..., 1] = -(py - y0) * g
        return out

    @property
    def id(self) -> str:
        return self.kind + ":" + ",".join("%.17g" % p for p in self.params)

    @staticmethod
    def from_id(text: str) -> "GaugeFunction":
        kind, _, rest = text.partition(":")
        params = tuple(float(p) for p in rest.split(",")) if rest else ()
        return GaugeFunction(kind.strip(), params)


# ---------------------------------------------------------------------------
# Vector-potential specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdealSolenoid:
    """Flux ``flux`` confined to a disk of radius ``radius`` around ``center``.

    Outside the solenoid the potential is the unique curl-free, continuous,
    azimuthal form A_phi = flux / (2 pi r); inside it rises linearly so that
    curl A integrates to the full flux over the disk.
    """

    flux: float
    radius: float = 1.0
    center: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("solenoid radius must be positive")


@dataclass(frozen=True)
class UniformVector:
    """Spatially constant vector potential (zero magnetic field)."""

    value: Tuple[float, float]


@dataclass(frozen=True)
class GaugeShifted:
    """Wraps a base spec, evaluating to base(x) + grad(chi)(x)."""

    base: "VectorPotentialSpec"
    chi: GaugeFunction


VectorPotentialSpec = Union[IdealSolenoid, UniformVector, GaugeShifted]


def eval_potential(spec: VectorPotentialSpec, x) -> np.ndarray:
    """Evaluate A at one point or an (..., 2) array of points."""
    x = np.asarray(x, dtype=np.float64)
    if isinstance(spec, UniformVector):
        out = np.empty(x.shape, dtype=np.float64)
        out[..., 0] = spec.value[0]
        out[..., 1] = spec.value[1]
        return out
    if isinstance(spec, GaugeShifted):
        return eval_potential(spec.base, x) + spec.chi.grad(x)
    # ideal solenoid
    d = x - np.asarray(spec.center)
    r = np.hypot(d[..., 0], d[..., 1])
    # A_phi = flux/(2 pi r) outside, flux*r/(2 pi R^2) inside; A = A_phi * phi_hat
    with np.errstate(divide="ignore", invalid="ignore"):
        mag_over_r = np.where(
            r > spec.radius,
            spec.flux / (TWO_PI * r * r),
            spec.flux / (TWO_PI * spec.radius**2),
        )
    mag_over_r = np.where(r == 0.0, 0.0, mag_over_r)
    out = np.empty(x.shape, dtype=np.float64)
    out[..., 0] = -d[..., 1] * mag_over_r
    out[..., 1] = d[..., 0] * mag_over_r
    return out


def unwrap_spec(spec: VectorPotentialSpec) -> VectorPotentialSpec:
    """Strip any GaugeShifted layers, returning the underlying base spec."""
    while isinstance(spec, GaugeShifted):
        spec = spec.base
    return spec


def total_flux(spec: VectorPotentialSpec) -> float:
    base = unwrap_spec(spec)
    return base.flux if isinstance(base, IdealSolenoid) else 0.0


def flux_center(spec: VectorPotentialSpec) -> Tuple[float, float]:
    base = unwrap_spec(spec)
    return base.center if isinstance(base, IdealSolenoid) else (0.0, 0.0)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss_nodes(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    # map from [-1, 1] to [0, 1]
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _segment_quad(spec, a, b, order: int, n_sub: int) -> float:
    """Composite Gauss-Legendre quadrature of A . dl over segment a->b."""
    nodes, weights = _gauss_nodes(order)
    t = ((np.arange(n_sub)[:, None] + nodes[None, :]) / n_sub).ravel()
    w = np.tile(weights, n_sub) / n_sub
    d = np.asarray(b, dtype=np.float64) - np.asarray(a, dtype=np.float64)
    pts = np.asarray(a, dtype=np.float64)[None, :] + t[:, None] * d[None, :]
    vals = eval_potential(spec, pts)
    return float(np.sum(w * (vals @ d)))


def line_integral(
    spec: VectorPotentialSpec,
    path: PathSpec,
    order: int = 4,
    n_sub: int = None,
    refine_tol: float = 1e-10,
    max_sub: int = 2**20,
) -> float:
    """Integral of A . dl along ``path`` by composite Gauss-Legendre quadrature.

    With ``n_sub`` given, each segment uses exactly that many subdivisions (for
    convergence studies).  Otherwise subdivisions are doubled until successive
    estimates differ by less than ``refine_tol`` or ``max_sub`` is reached.
    """
    return float(np.sum(line_integral_segments(
        spec, path, order=order, n_sub=n_sub,
        refine_tol=refine_tol, max_sub=max_sub)))


def line_integral_segments(
    spec: VectorPotentialSpec,
    path: PathSpec,
    order: int = 4,
    n_sub: int = None,
    refine_tol: float = 1e-10,
    max_sub: int = 2**20,
) -> np.ndarray:
    """Per-segment contributions to ``line_integral`` (same conventions)."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    segs = path.segments()
    out = np.empty(len(segs), dtype=np.float64)
    for i, (a, b) in enumerate(segs):
        if n_sub is not None:
            out[i] = _segment_quad(spec, a, b, order, n_sub)
            continue
        n = 1
        est = _segment_quad(spec, a, b, order, n)
        while n < max_sub:
            n *= 2
            new = _segment_quad(spec, a, b, order, n)
            if abs(new - est) < refine_tol:
                est = new
                break
            est = new
        out[i] = est
    return out


def edge_integral(spec: VectorPotentialSpec, a, b) -> float:
    """Integral of A . dl over the straight segment a->b, exact where possible.

    Used to build lattice gauge links: for an ideal solenoid the outside form
    integrates in closed form (flux/2pi times the subtended angle), so closed
    plaquettes away from the solenoid pick up exactly zero phase.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if isinstance(spec, UniformVector):
        return float(np.asarray(spec.value) @ (b - a))
    if isinstance(spec, GaugeShifted):
        return edge_integral(spec.base, a, b) + float(spec.chi(b) - spec.chi(a))
    c = np.asarray(spec.center)
    if _segment_point_distance(a, b, c) > spec.radius:
        u, v = a - c, b - c
        dtheta = np.arctan2(u[0] * v[1] - u[1] * v[0], u @ v)
        return float(spec.flux / TWO_PI * dtheta)
    # segment enters the solenoid core: fall back to dense quadrature
    return _segment_quad(spec, a, b, order=8, n_sub=64)


# ---------------------------------------------------------------------------
# Geometric flux oracle
# ---------------------------------------------------------------------------

def winding_number(path: PathSpec, center, tol: float = WINDING_TOL) -> int:
    """Signed encirclement count of ``center`` by a closed path.

    Computed purely geometrically as the summed signed angle increment between
    consecutive vertices; never touches the potential.
    """
    if not path.closed:
        raise PathError("winding number requires a closed path")
    c = np.asarray(center, dtype=np.float64)
    v = path.vertices - c
    nxt = np.roll(v, -1, axis=0)
    dtheta = np.arctan2(
        v[:, 0] * nxt[:, 1] - v[:, 1] * nxt[:, 0],
        np.sum(v * nxt, axis=1),
    )
    w = float(np.sum(dtheta)) / TWO_PI
    if abs(w - round(w)) > tol:
        raise PathError(f"non-integer winding number {w}")
    return int(round(w))


def enclosed_flux(spec: VectorPotentialSpec, loop: PathSpec) -> float:
    """Geometric oracle: winding(loop, solenoid center) times the total flux.

    This is the independent check for ``line_integral`` (Stokes); it never
    evaluates the potential.
    """
    if not loop.closed:
        raise PathError("enclosed flux requires a closed loop")
    base = unwrap_spec(spec)
    if not isinstance(base, IdealSolenoid):
        return 0.0
    if loop.min_distance_to(base.center) <= base.radius:
        raise PathError("loop passes through the solenoid disk")
    return winding_number(loop, base.center) * base.flux


def circle_path(center, radius: float, n: int = 64, ccw: bool = True,
                turns: int = 1) -> PathSpec:
    """Convenience factory: polygonal circle, optionally multiply wound."""
    sign = 1.0 if ccw else -1.0
    t = sign * np.linspace(0.0, TWO_PI * turns, n * abs(turns), endpoint=False)
    c = np.asarray(center, dtype=np.float64)
    pts = c[None, :] + radius * np.stack([np.cos(t), np.sin(t)], axis=1)
    return PathSpec(pts, closed=True)
