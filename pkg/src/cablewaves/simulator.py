"""Explicit finite differences for the half-line bilinear Klein-Gordon problem.

    w_tt - v**2 w_xx + gamma(w) w = p_hat,   x in [0, X],
    w(0, t) = phi(t),  w(X, t) = offset,  w(x, 0) = w0(x),  w_t(x, 0) = psi(x),

with ``gamma = k v**2 / L**2`` and ``p_hat = p v**2 / L**2``. The unknown
advanced in time is ``u = w - offset``: the offset is zero for plain runs
and the constant particular solution ``w_p`` for loaded runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .analytic import Substrate, TravelingWave
from .loaded import LoadedWave, extrema

log = logging.getLogger(__name__)

COURANT_MAX = 0.9
SAFETY = 0.9
INSTABILITY_FACTOR = 1e6
DEFAULT_POINTS_PER_WAVELENGTH = 200


class InstabilityError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class WaveTrace:
    """Boundary datum ``phi(t) = W(phase - c v t / L) + epsilon sin(omega1 t)``."""

    wave: TravelingWave | LoadedWave
    phase: float = 0.0
    epsilon: float = 0.0
    omega1: float = 0.0

    def __call__(self, t):
        w = self.wave
        out = w.profile(self.phase - w.c * w.v * np.asarray(t, dtype=float) / w.L)
        if self.epsilon:
            out = out + self.epsilon * np.sin(self.omega1 * np.asarray(t, dtype=float))
        return out


@dataclass(frozen=True)
class DecayingSinusoid:
    """Initial displacement ``eps1 sin(wavenumber x) exp(-decay x)``."""

    epsilon: float
    wavenumber: float = math.sqrt(2.0)
    decay: float = 0.8

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.epsilon * np.sin(self.wavenumber * x) * np.exp(-self.decay * x)


@dataclass(frozen=True)
class SimConfig:
    substrate: Substrate
    dx: float
    dt: float
    t_end: float
    domain_length: float
    v: float = 1.0
    L: float = 1.0
    p: float = 0.0
    boundary: Callable | None = None
    initial: Callable | None = None
    velocity: Callable | None = None
    amplitude: float | None = None
    signal_speed: float | None = None

    @property
    def gamma(self) -> tuple[float, float]:
        s = self.v**2 / self.L**2
        return self.substrate.k1 * s, self.substrate.k2 * s

    @property
    def load(self) -> float:
        return self.p * self.v**2 / self.L**2

    @property
    def courant(self) -> float:
        return self.v * self.dt / self.dx

    @property
    def n_points(self) -> int:
        return int(round(self.domain_length / self.dx)) + 1

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def grid(self) -> np.ndarray:
        return np.arange(self.n_points) * self.dx

    def phi(self, t) -> float:
        return 0.0 if self.boundary is None else float(self.boundary(t))

    def reference_amplitude(self) -> float:
        if self.amplitude is not None:
            return self.amplitude
        ref = abs(self.p) / max(min(self.substrate.k1, self.substrate.k2), 1e-300) \
            if self.p else 0.0
        if self.boundary is not None:
            ts = np.linspace(0.0, min(self.t_end, 10.0), 2001)
            ref = max(ref, float(np.max(np.abs([self.boundary(t) for t in ts]))))
        if self.initial is not None:
            ref = max(ref, float(np.max(np.abs(self.initial(self.grid())))))
        return ref if ref > 0 else 1.0

    def check(self) -> None:
        """Raise ConfigError unless the Courant, reaction and domain bounds hold."""
        for name in ("dx", "dt", "t_end", "domain_length", "v", "L"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ConfigError(f"invalid value: {name} must be finite and > 0, got {val}")
        if self.courant > COURANT_MAX + 1e-12:
            raise ConfigError(f"Courant number {self.courant:.4f} exceeds {COURANT_MAX}")
        gmax = max(self.gamma)
        if gmax > 0 and self.dt > SAFETY * 2.0 / math.sqrt(gmax):
            raise ConfigError(f"dt={self.dt} violates the reaction bound "
                              f"{SAFETY * 2.0 / math.sqrt(gmax):.4g}")
        if self.dt > stable_dt_limit(self.dx, self.v, gmax):
            raise ConfigError("dt violates the combined leapfrog bound "
                              "v^2 dt^2/dx^2 + gamma dt^2/4 <= 1")
        speed = self.signal_speed if self.signal_speed is not None else self.v
        if self.domain_length < 1.1 * speed * self.t_end:
            raise ConfigError(
                f"domain_length={self.domain_length} too short: the signal reaches "
                f"x={speed * self.t_end:.4g} by t_end; need >= {1.1 * speed * self.t_end:.4g}")


def stable_dt_limit(dx: float, v: float, gamma_max: float) -> float:
    """Largest leapfrog step for the linearized scheme with stiffness ``gamma_max``."""
    return 2.0 / math.sqrt(4.0 * v**2 / dx**2 + gamma_max)


def default_dt(dx: float, v: float, gamma_max: float) -> float:
    return SAFETY * stable_dt_limit(dx, v, gamma_max)


def config_for_wave(wave: TravelingWave | LoadedWave, t_end: float, *, dx: float | None = None,
                    dt: float | None = None, domain_length: float | None = None,
                    epsilon: float = 0.0, omega1: float = 0.0, phase: float | None = None,
                    initial: Callable | None = None, amplitude: float | None = None,
                    ) -> SimConfig:
    """Configuration whose boundary datum is the trace of ``wave`` at x = 0.

    Defaults: ``dx = L/200``, ``dt`` at 0.9 of the leapfrog limit, and a domain
    long enough that nothing moving at the phase speed reaches its end. A
    loaded trace starts at the phase where it equals ``w_p`` so that boundary
    and initial data agree at t = 0.
    """
    dx = wave.L / DEFAULT_POINTS_PER_WAVELENGTH if dx is None else dx
    gmax = max(wave.substrate.k1, wave.substrate.k2) * wave.v**2 / wave.L**2
    dt = default_dt(dx, wave.v, gmax) if dt is None else dt
    speed = wave.c * wave.v
    if domain_length is None:
        domain_length = math.ceil(1.1 * speed * t_end / dx + 2) * dx
    p = wave.p if isinstance(wave, LoadedWave) else 0.0
    if amplitude is None:
        if isinstance(wave, LoadedWave):
            amplitude = max(abs(e) for e in extrema(wave, normalized=False))
        else:
            amplitude = max(wave.amplitude, wave.compression_amplitude)
    if phase is None:
        phase = equilibrium_phase(wave) if isinstance(wave, LoadedWave) else 0.0
    trace = WaveTrace(wave, phase, epsilon, omega1)
    return SimConfig(wave.substrate, dx, dt, t_end, domain_length, wave.v, wave.L, p,
                     boundary=trace, initial=initial, amplitude=amplitude,
                     signal_speed=speed)


@dataclass
class SimState:
    t: float
    w_prev: np.ndarray
    w_curr: np.ndarray
    step_index: int
    offset: float = 0.0

    @property
    def w(self) -> np.ndarray:
        """Displacement in the original variable at the current level."""
        return self.w_curr + self.offset


def _reaction(u: np.ndarray, config: SimConfig, offset: float) -> np.ndarray:
    # gamma(w) w - p_hat with w = u + offset; the branch is picked from the current level only.
    g1, g2 = config.gamma
    w = u + offset
    return np.where(w <= 0.0, g1, g2) * w - config.load


def _laplacian(u: np.ndarray) -> np.ndarray:
    return u[2:] - 2.0 * u[1:-1] + u[:-2]


def first_step(config: SimConfig, offset: float = 0.0) -> SimState:
    """Levels t = 0 and t = dt from a second-order Taylor start.

    ``u(dt) = u0 + dt psi + dt**2/2 (v**2 u0'' - gamma(w0) w0 + p_hat)``.
    """
    x = config.grid()
    n = x.size
    u0 = np.zeros(n) if config.initial is None else np.asarray(config.initial(x), float) - offset
    psi = np.zeros(n) if config.velocity is None else np.asarray(config.velocity(x), float)
    u0[0] = config.phi(0.0) - offset
    u0[-1] = 0.0
    dt = config.dt
    u1 = np.empty_like(u0)
    accel = (config.v / config.dx) ** 2 * _laplacian(u0) - _reaction(u0[1:-1], config, offset)
    u1[1:-1] = u0[1:-1] + dt * psi[1:-1] + 0.5 * dt * dt * accel
    u1[0] = config.phi(dt) - offset
    u1[-1] = u0[-1]
    return SimState(dt, u0, u1, 1, offset)


def step(state: SimState, config: SimConfig) -> SimState:
    """Advance one ``dt`` with the three-level central scheme."""
    u, up = state.w_curr, state.w_prev
    dt = config.dt
    nu2 = config.courant**2
    un = np.empty_like(u)
    un[1:-1] = (2.0 * u[1:-1] - up[1:-1] + nu2 * _laplacian(u)
                - dt * dt * _reaction(u[1:-1], config, state.offset))
    t_next = (state.step_index + 1) * dt
    un[0] = config.phi(t_next) - state.offset
    un[-1] = u[-1]
    return SimState(t_next, u, un, state.step_index + 1, state.offset)


@dataclass(frozen=True)
class EnergyReport:
    """Energy at the half level between two consecutive states.

    ``boundary_work`` is the accumulated ``int -v^2 phi' w_x(0) dt`` when the
    report comes from a run; ``balance_residual`` is the per-unit-time mismatch
    against the previous report.
    """

    t: float
    kinetic: float
    potential: float
    total: float
    boundary_flux: float
    balance_residual: float = float("nan")
    boundary_work: float = float("nan")


def _potential_density(ua: np.ndarray, ub: np.ndarray, config: SimConfig,
                       offset: float) -> np.ndarray:
    # Two-level form of Gamma(w) - p_hat w, zero at the equilibrium w = offset;
    # for a linear substrate this is the quantity leapfrog conserves exactly.
    g1, g2 = config.gamma
    wa, wb = ua + offset, ub + offset
    g = np.where(0.5 * (wa + wb) <= 0.0, g1, g2)
    dens = 0.5 * g * wa * wb - 0.5 * config.load * (wa + wb)
    ref = 0.5 * (g1 if offset <= 0.0 else g2) * offset * offset - config.load * offset
    return dens - ref


def boundary_flux(config: SimConfig, u_level: np.ndarray, level: int) -> float:
    """``-v^2 phi'(t_n) w_x(0, t_n)`` in the form the scheme conserves exactly."""
    dt = config.dt
    dphi = (config.phi((level + 1) * dt) - config.phi((level - 1) * dt)) / (2.0 * dt)
    wx = (u_level[1] - u_level[0]) / config.dx
    return -config.v**2 * dphi * wx


def energy_report(prev: SimState, curr: SimState, config: SimConfig,
                  previous: EnergyReport | None = None,
                  boundary_work: float = float("nan")) -> EnergyReport:
    """Kinetic, potential and total energy between levels ``prev`` and ``curr``.

    Uses the discrete energy the leapfrog scheme balances exactly: forward
    velocities on interior nodes, the product of cell gradients at both levels,
    and the two-level substrate potential.
    """
    a, b = prev.w_curr, curr.w_curr
    dx, dt = config.dx, config.dt
    kinetic = 0.5 * dx * float(np.sum(((b[1:-1] - a[1:-1]) / dt) ** 2))
    grad = 0.5 * config.v**2 / dx * float(np.dot(np.diff(a), np.diff(b)))
    sub = dx * float(np.sum(_potential_density(a[1:-1], b[1:-1], config, curr.offset)))
    potential = grad + sub
    total = kinetic + potential
    flux = 0.5 * (boundary_flux(config, a, prev.step_index)
                  + boundary_flux(config, b, curr.step_index))
    t_half = 0.5 * (prev.t + curr.t)
    resid = float("nan")
    if previous is not None and t_half > previous.t:
        gain = total - previous.total
        if math.isfinite(boundary_work) and math.isfinite(previous.boundary_work):
            supplied = boundary_work - previous.boundary_work
        else:
            supplied = 0.5 * (flux + previous.boundary_flux) * (t_half - previous.t)
        resid = abs(gain - supplied) / (t_half - previous.t)
    return EnergyReport(t_half, kinetic, potential, total, flux, resid, boundary_work)


@dataclass
class RunRecord:
    config: SimConfig
    x: np.ndarray
    probe_x: np.ndarray
    times: np.ndarray
    probe_w: np.ndarray
    probe_wdot: np.ndarray
    snapshot_times: list[float] = field(default_factory=list)
    snapshots: list[np.ndarray] = field(default_factory=list)
    energy: list[EnergyReport] = field(default_factory=list)
    offset: float = 0.0
    final: SimState | None = None

    def probe_index(self, x0: float) -> int:
        j = int(np.argmin(np.abs(self.probe_x - x0)))
        if abs(self.probe_x[j] - x0) > self.config.dx:
            raise KeyError(f"no probe recorded at x={x0}")
        return j

    def integrated_balance_residual(self) -> float:
        """max_t |E(t) - E(t0) - (work supplied through x = 0 since t0)|."""
        if len(self.energy) < 2:
            return 0.0
        e0, w0 = self.energy[0].total, self.energy[0].boundary_work
        return max(abs(r.total - e0 - (r.boundary_work - w0)) for r in self.energy)

    def snapshot(self, t: float) -> np.ndarray:
        j = int(np.argmin(np.abs(np.asarray(self.snapshot_times) - t)))
        return self.snapshots[j]


def run(config: SimConfig, probes: Sequence[float] = (), snapshot_times: Sequence[float] = (),
        energy_every: int = 10, offset: float = 0.0, check: bool = True) -> RunRecord:
    """Integrate to ``t_end``; record probes every step and energy every ``energy_every`` steps."""
    if check:
        config.check()
    x = config.grid()
    dt = config.dt
    n_steps = config.n_steps
    idx = np.array([int(round(p / config.dx)) for p in probes], dtype=int)
    for p, i in zip(probes, idx):
        if not 0 <= i < x.size:
            raise ConfigError(f"probe x = {p:g} outside the simulation domain "
                              f"[0, {config.domain_length:g}]")
    snap_steps = {int(round(t / dt)): t for t in snapshot_times}
    limit = INSTABILITY_FACTOR * config.reference_amplitude()

    state = first_step(config, offset)
    series = np.empty((n_steps + 1, idx.size))
    series[0] = state.w_prev[idx] + offset
    series[1] = state.w_curr[idx] + offset
    rec = RunRecord(config, x, x[idx], np.arange(n_steps + 1) * dt, series,
                    np.empty_like(series), offset=offset)
    for s in (0, 1):
        if s in snap_steps:
            rec.snapshot_times.append(s * dt)
            rec.snapshots.append((state.w_prev if s == 0 else state.w_curr) + offset)

    work = 0.0
    prev_report: EnergyReport | None = None
    for n in range(1, n_steps):
        new = step(state, config)
        # Work through x = 0 between half levels n - 1/2 and n + 1/2.
        work += dt * boundary_flux(config, state.w_curr, n)
        if energy_every and n % energy_every == 0:
            prev_report = energy_report(state, new, config, prev_report, work)
            rec.energy.append(prev_report)
        state = new
        series[n + 1] = state.w_curr[idx] + offset
        if n + 1 in snap_steps:
            rec.snapshot_times.append((n + 1) * dt)
            rec.snapshots.append(state.w_curr + offset)
        if n % 50 == 0 or n + 1 == n_steps:
            peak = float(np.max(np.abs(state.w_curr))) + abs(offset)
            if not math.isfinite(peak) or peak > limit:
                raise InstabilityError(
                    f"instability detected at t={state.t:.4g}: max|w|={peak:.3g} exceeds "
                    f"{INSTABILITY_FACTOR:g} x the injected amplitude")

    if n_steps >= 2:
        rec.probe_wdot[1:-1] = (series[2:] - series[:-2]) / (2.0 * dt)
        rec.probe_wdot[0] = (series[1] - series[0]) / dt
        rec.probe_wdot[-1] = (series[-1] - series[-2]) / dt
    else:
        rec.probe_wdot[:] = 0.0
    rec.final = state
    log.debug("run finished: %d steps, %d points", n_steps, x.size)
    return rec


def run_loaded(config: SimConfig, wave: LoadedWave, probes: Sequence[float] = (),
               snapshot_times: Sequence[float] = (), energy_every: int = 10) -> RunRecord:
    """Simulate the shifted unknown ``u = w - w_p`` and report ``w``.

    The far end is held at ``w = w_p``; with no initial datum the cable starts
    at rest in the equilibrium ``w = w_p``.
    """
    if config.p == 0.0:
        raise ConfigError("run_loaded needs a nonzero load p")
    if np.sign(config.p) != np.sign(wave.p):
        raise ConfigError("sign of p in the configuration disagrees with the loaded wave")
    wp = wave.particular
    if config.initial is None:
        config = replace(config, initial=lambda x: np.full(np.shape(x), wp))
    return run(config, probes, snapshot_times, energy_every, offset=wp)


def equilibrium_phase(wave: LoadedWave) -> float:
    """A phase ``xi0`` with ``W(xi0) = w_p``, so a boundary trace can start at rest."""
    wp = wave.particular
    xs = np.linspace(0.0, 1.0, 4001)
    g = wave.profile(xs) - wp
    for i in range(xs.size - 1):
        if g[i] == 0.0:
            return float(xs[i])
        if g[i] * g[i + 1] < 0.0:
            return float(brentq(lambda s: wave.profile(s) - wp, xs[i], xs[i + 1], xtol=1e-14))
    raise ValueError("loaded profile never reaches the particular solution")
