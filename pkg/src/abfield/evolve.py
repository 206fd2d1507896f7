"""Leapfrog evolution of the matter field through the slit-plus-solenoid
geometry.

Primary mode evolves the complex field under the minimally coupled
Klein-Gordon equation, discretized with gauge links: each lattice hop is
weighted by exp(-i e int A.dl) along the edge, so lattice gauge invariance is
exact (the property the whole artifact is built to test).  The secondary
"dressed" mode evolves the real amplitude with the site-local squared-mass
term from the dressed potential, for cross-validation.
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .gauge import ComplexField2D, RealDressedPair, to_schrodinger_gauge
from .geometry import GeometryMask
from .potentials import (GaugeShifted, IdealSolenoid, UniformVector,
                         VectorPotentialSpec, _segment_quad, eval_potential,
                         unwrap_spec)


class ConfigError(ValueError):
    pass


class EvolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian packet exp(-(x-x0)^2/4sx^2 - (y-y0)^2/4sy^2) exp(i k.x)."""

    x0: float
    y0: float
    sigma_x: float
    sigma_y: float
    kx: float
    ky: float = 0.0

    @property
    def k0(self) -> float:
        return math.hypot(self.kx, self.ky)

    @property
    def sigma_min(self) -> float:
        return min(self.sigma_x, self.sigma_y)


@dataclass(frozen=True)
class SimulationConfig:
    geometry: GeometryMask
    potential: VectorPotentialSpec
    packet: WavepacketSpec
    dt: float
    steps: int
    m: float = 1.0
    e: float = 1.0
    sponge_strength: float = 0.5
    screen_ix: Optional[int] = None
    output_cadence: int = 200
    boundary: str = "dirichlet"
    check_packet: bool = True

    def __post_init__(self):
        g = self.geometry
        cfl = g.h / math.sqrt(2.0)
        if not (0.0 < self.dt < cfl):
            raise ConfigError(
                f"CFL violation: dt = {self.dt} must satisfy dt < h/sqrt(2) "
                f"= {cfl:.6g} (h = {g.h})")
        if self.boundary not in ("dirichlet", "periodic"):
            raise ConfigError(f"unknown boundary {self.boundary!r}")
        if self.steps < 0:
            raise ConfigError("step count must be nonnegative")
        base = unwrap_spec(self.potential)
        if (isinstance(base, IdealSolenoid) and g.exclusion_center is not None
                and g.exclusion_radius <= base.radius):
            raise ConfigError(
                "exclusion disk must strictly contain the solenoid radius")
        if self.check_packet:
            self._check_packet()

    def _check_packet(self):
        p = self.packet
        g = self.geometry
        k_nyq = math.pi / g.h
        if p.k0 * p.sigma_min < 3.0:
            raise ConfigError(
                f"packet not quasi-monochromatic: k0*sigma = "
                f"{p.k0 * p.sigma_min:.3g} < 3")
        if p.k0 + 3.0 / p.sigma_min > 0.8 * k_nyq:
            raise ConfigError(
                "packet under-resolved: k0 + 3/sigma exceeds 80% of the grid "
                f"Nyquist wavenumber {k_nyq:.3g}")
        # initial overlap with barrier and exclusion disk must be negligible
        amp2 = np.abs(_gaussian_packet(g, p)) ** 2
        total = float(amp2.sum())
        blocked = (self.geometry.interior_mask() == 0.0)
        blocked[0, :] = blocked[-1, :] = False
        blocked[:, 0] = blocked[:, -1] = False
        overlap = float(amp2[blocked].sum()) / total
        if overlap > 1e-8:
            raise ConfigError(
                f"packet overlaps barrier/solenoid region: fraction "
                f"{overlap:.3g} > 1e-8")

    @property
    def omega0(self) -> float:
        return math.sqrt(self.packet.k0**2 + self.m**2)


def _gaussian_packet(g: GeometryMask, p: WavepacketSpec) -> np.ndarray:
    pts = g.site_points()
    dx = pts[..., 0] - p.x0
    dy = pts[..., 1] - p.y0
    env = np.exp(-dx**2 / (4.0 * p.sigma_x**2) - dy**2 / (4.0 * p.sigma_y**2))
    return env * np.exp(1j * (p.kx * pts[..., 0] + p.ky * pts[..., 1]))


# ---------------------------------------------------------------------------
# Gauge links
# ---------------------------------------------------------------------------

def edge_integrals(spec: VectorPotentialSpec, g: GeometryMask):
    """Per-edge integrals of A . dl for the +x and +y lattice hops.

    Returns (ax, ay), each (nx, ny): ax[i, j] is the integral along the
    straight edge from site (i, j) to (i, j) + h*xhat.  Ideal-solenoid edges
    away from the core use the closed form flux/2pi * subtended angle, which
    makes curl-free plaquettes exact to rounding.
    """
    pts = g.site_points()
    ax = _edges_along(spec, pts, np.array([g.h, 0.0]))
    ay = _edges_along(spec, pts, np.array([0.0, g.h]))
    return ax, ay


def _edges_along(spec, a_pts, dvec):
    if isinstance(spec, UniformVector):
        return np.full(a_pts.shape[:2],
                       float(np.asarray(spec.value) @ dvec))
    if isinstance(spec, GaugeShifted):
        base = _edges_along(spec.base, a_pts, dvec)
        return base + (spec.chi(a_pts + dvec) - spec.chi(a_pts))
    # ideal solenoid: closed form where the edge stays outside the core
    c = np.asarray(spec.center)
    u = a_pts - c
    v = u + dvec
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    dot = u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]
    out = spec.flux / (2.0 * np.pi) * np.arctan2(cross, dot)
    # distance from the segment to the center
    dd = float(dvec @ dvec)
    t = np.clip(-(u @ dvec) / dd, 0.0, 1.0)
    nearest = u + t[..., None] * dvec
    dist = np.hypot(nearest[..., 0], nearest[..., 1])
    near = dist <= spec.radius
    if np.any(near):
        for i, j in zip(*np.nonzero(near)):
            a = a_pts[i, j]
            out[i, j] = _segment_quad(spec, a, a + dvec, order=8, n_sub=64)
    return out


def plaquette_field(ax: np.ndarray, ay: np.ndarray, h: float) -> np.ndarray:
    """Lattice magnetic field from plaquette circulation, shape (nx-1, ny-1).

    B[i, j] is the circulation around the cell with lower-left site (i, j)
    divided by the cell area; exactly the flux density the gauge links see.
    """
    circ = ax[:-1, :-1] + ay[1:, :-1] - ax[:-1, 1:] - ay[:-1, :-1]
    return circ / (h * h)


# ---------------------------------------------------------------------------
# Complex-mode evolution
# ---------------------------------------------------------------------------

@dataclass
class EvolutionState:
    cur: np.ndarray
    prev: np.ndarray
    step: int = 0
    charge0: float = 0.0
    diagnostics: List[dict] = field(default_factory=list)
    max_amp_history: List[float] = field(default_factory=list)
    screen: Optional[np.ndarray] = None
    screen_total: float = 0.0
    disk_total: float = 0.0
    snapshots: List[Tuple[int, np.ndarray]] = field(default_factory=list)

    def as_field(self, h, origin, t, dt) -> ComplexField2D:
        return ComplexField2D(values=self.cur.copy(), h=h, origin=origin,
                              t=t, dt=dt, values_prev=self.prev.copy())


class ComplexEvolver:
    """Precomputed stepping context for one SimulationConfig."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        g = config.geometry
        self.h = g.h
        self.inv_h2 = 1.0 / (g.h * g.h)
        ax, ay = edge_integrals(config.potential, g)
        self.ax, self.ay = ax, ay
        self.ux = np.ascontiguousarray(np.exp(-1j * config.e * ax))
        self.uy = np.ascontiguousarray(np.exp(-1j * config.e * ay))
        self.periodic = config.boundary == "periodic"
        if self.periodic:
            self.mask = np.ones((g.nx, g.ny))
        else:
            self.mask = g.interior_mask()
        self.gamma = g.sponge_profile(config.sponge_strength)
        self.exclusion = g.exclusion_mask()
        self._scratch = np.empty((g.nx, g.ny), dtype=np.complex128)

    def set_sponge(self, enabled: bool):
        g = self.config.geometry
        self.gamma = (g.sponge_profile(self.config.sponge_strength)
                      if enabled else np.zeros((g.nx, g.ny)))

    def charge(self, state: EvolutionState) -> float:
        """Discrete conserved charge 2 h^2/dt Im sum(conj(cur) prev)."""
        c = self.config
        return float(2.0 * self.h**2 / c.dt
                     * np.sum(np.imag(np.conj(state.cur) * state.prev)))

    def init_state(self) -> EvolutionState:
        c = self.config
        psi = _gaussian_packet(c.geometry, c.packet) * self.mask
        # previous level one step back in time at the packet's carrier
        # frequency: psi(-dt) = exp(+i omega dt) psi(0)
        prev = psi * np.exp(1j * c.omega0 * c.dt)
        state = EvolutionState(cur=np.ascontiguousarray(psi),
                               prev=np.ascontiguousarray(prev))
        q = self.charge(state)
        norm = math.sqrt(abs(q)) if abs(q) > 1e-300 else math.sqrt(
            float(np.sum(np.abs(psi) ** 2)) * self.h**2)
        if norm == 0.0:
            raise ConfigError("initial packet has no support on the grid")
        state.cur /= norm
        state.prev /= norm
        state.charge0 = self.charge(state)
        if c.screen_ix is not None:
            state.screen = np.zeros(c.geometry.ny)
        return state

    def step(self, state: EvolutionState):
        c = self.config
        kernels.step_complex(state.prev, state.cur, self._scratch,
                             self.ux, self.uy, self.mask, self.gamma,
                             self.inv_h2, c.dt, c.m * c.m, self.periodic)
        state.prev, state.cur, self._scratch = (state.cur, self._scratch,
                                                state.prev)
        state.step += 1
        if c.screen_ix is not None:
            amp2 = np.abs(state.cur[c.screen_ix, :]) ** 2
            state.screen += amp2 * c.dt
            state.screen_total += float(amp2.sum()) * c.dt
        return state

    def reverse(self, state: EvolutionState):
        """Exchange time levels: stepping then walks the trajectory backwards."""
        state.prev, state.cur = state.cur, state.prev
        return state

    def _record(self, state: EvolutionState, keep_snapshot: bool):
        amp = np.abs(state.cur)
        peak = float(amp.max())
        state.max_amp_history.append(peak)
        if not np.isfinite(peak):
            raise EvolutionError(
                f"field overflow at step {state.step}; max-amplitude history: "
                f"{state.max_amp_history}")
        state.diagnostics.append({
            "step": state.step,
            "charge": self.charge(state),
            "max_amp": peak,
            "norm2": float(np.sum(amp**2)) * self.h**2,
        })
        if keep_snapshot:
            state.snapshots.append((state.step, amp))
        if np.any(self.exclusion):
            state.disk_total += float(np.sum(amp[self.exclusion] ** 2))

    def run(self, state: Optional[EvolutionState] = None,
            keep_snapshots: bool = False) -> EvolutionState:
        c = self.config
        if state is None:
            state = self.init_state()
        self._record(state, keep_snapshots)
        for _ in range(c.steps):
            self.step(state)
            if state.step % c.output_cadence == 0:
                self._record(state, keep_snapshots)
        if state.step % c.output_cadence != 0:
            self._record(state, keep_snapshots)
        return state

    def disk_fraction(self, state: EvolutionState) -> float:
        """Time-integrated |psi|^2 inside the exclusion disk over the grid total."""
        total = sum(d["norm2"] for d in state.diagnostics) / self.h**2
        if total == 0.0:
            return 0.0
        return state.disk_total / total


def init_wavepacket(config: SimulationConfig) -> EvolutionState:
    return ComplexEvolver(config).init_state()


def step_complex(state: EvolutionState, config: SimulationConfig,
                 evolver: Optional[ComplexEvolver] = None) -> EvolutionState:
    return (evolver or ComplexEvolver(config)).step(state)


def run(config: SimulationConfig, keep_snapshots: bool = False):
    """Run to completion; returns (state, (screen_y, screen_intensity))."""
    ev = ComplexEvolver(config)
    state = ev.run(keep_snapshots=keep_snapshots)
    ys = config.geometry.y_coords()
    screen = state.screen if state.screen is not None else np.zeros_like(ys)
    return state, (ys, screen)


# ---------------------------------------------------------------------------
# Dressed-mode evolution
# ---------------------------------------------------------------------------

@dataclass
class DressedState:
    phi_cur: np.ndarray
    phi_prev: np.ndarray
    veff: np.ndarray
    defined: np.ndarray
    step: int = 0


def dressed_effective_mass2(pair: RealDressedPair, e: float, m: float,
                            dt: float, h: float) -> np.ndarray:
    """Site-local squared-mass term m^2 + e^2(|Abar|^2 - Abar_t^2).

    Signature (+,-,-,-): the spatial dressed potential raises the local
    effective mass, the time component lowers it.  Undefined sites fall back
    to the bare m^2, and the result is clipped to the leapfrog stability
    window (phase noise at near-node sites would otherwise blow up).
    """
    v = np.full(pair.phi.shape, m * m)
    ok = pair.mask
    spat = pair.abar_x**2 + pair.abar_y**2
    if pair.abar_t is not None:
        t2 = np.where(np.isnan(pair.abar_t), 0.0, pair.abar_t**2)
    else:
        t2 = 0.0
    v = np.where(ok, m * m + e * e * (spat - t2), v)
    v = np.where(np.isnan(v), m * m, v)
    vmax = 0.9 * (4.0 / (dt * dt) - 8.0 / (h * h))
    return np.clip(v, -vmax, vmax)


class DressedEvolver:
    """Leapfrog for the real field with a frozen site-local mass term."""

    def __init__(self, h: float, dt: float, mask: np.ndarray,
                 gamma: Optional[np.ndarray] = None, periodic: bool = False):
        self.h = h
        self.dt = dt
        self.mask = mask
        self.gamma = gamma if gamma is not None else np.zeros_like(mask)
        self.periodic = periodic
        self._scratch = np.empty_like(mask)

    def step(self, state: DressedState):
        kernels.step_real(state.phi_prev, state.phi_cur, self._scratch,
                          state.veff, self.mask, self.gamma,
                          1.0 / (self.h * self.h), self.dt, self.periodic)
        state.phi_prev, state.phi_cur, self._scratch = (
            state.phi_cur, self._scratch, state.phi_prev)
        state.step += 1
        return state


def step_dressed(state: DressedState, config: SimulationConfig,
                 evolver: Optional[DressedEvolver] = None) -> DressedState:
    if evolver is None:
        g = config.geometry
        evolver = DressedEvolver(g.h, config.dt, g.interior_mask(),
                                 g.sponge_profile(config.sponge_strength),
                                 config.boundary == "periodic")
    return evolver.step(state)


def cross_validate_dressed(config: SimulationConfig, n_intervals: int = 10,
                           steps_per_interval: int = 10,
                           eps_node: float = 1e-7,
                           warmup_steps: int = 0) -> List[float]:
    """Complex mode vs dressed mode, re-dressing every interval.

    At the start of each interval the dressed pair is rebuilt from the
    complex state; the real amplitude is then evolved with the frozen mass
    term and compared with |psi| at the interval's end.  Returns the relative
    L2 differences over the defined region, one per interval.
    """
    ev = ComplexEvolver(config)
    state = ev.init_state()
    for _ in range(warmup_steps):
        ev.step(state)
    g = config.geometry
    dev = DressedEvolver(g.h, config.dt, ev.mask, ev.gamma, ev.periodic)
    domain = float(ev.mask.size)
    defined0 = None
    diffs = []
    for _ in range(n_intervals):
        fld = state.as_field(g.h, g.origin, state.step * config.dt, config.dt)
        pair = to_schrodinger_gauge(fld, config.potential, e=config.e,
                                    eps_node=eps_node)
        if defined0 is None:
            defined0 = int(pair.mask.sum())
        elif defined0 - int(pair.mask.sum()) > 0.10 * domain:
            raise EvolutionError("dressed mode unreliable near nodes: masked "
                                 "region grew beyond 10% of the domain")
        veff = dressed_effective_mass2(pair, config.e, config.m, config.dt,
                                       g.h)
        dstate = DressedState(
            phi_cur=np.ascontiguousarray(pair.phi),
            phi_prev=np.ascontiguousarray(np.abs(state.prev)),
            veff=np.ascontiguousarray(veff), defined=pair.mask)
        for _ in range(steps_per_interval):
            ev.step(state)
            dev.step(dstate)
        sel = dstate.defined
        ref = np.abs(state.cur)[sel]
        diff = dstate.phi_cur[sel] - ref
        denom = float(np.sqrt(np.sum(ref**2)))
        diffs.append(float(np.sqrt(np.sum(diff**2))) / denom)
    return diffs
