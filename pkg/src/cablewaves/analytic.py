"""Closed-form traveling waves of the unloaded bilinear Klein-Gordon equation.

Nondimensional setting: a wave ``w(x, t) = W(xi)`` with ``xi = (x - c v t) / L``
solves ``(c**2 - 1) W'' + k(W) W = 0`` where ``k = k1`` for ``W <= 0`` and
``k = k2`` for ``W > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np


class DegenerateSubstrateError(ValueError):
    """Raised when a closed-form wave is requested for k1 <= 0 or k2 <= 0."""


@dataclass(frozen=True)
class Substrate:
    """Pair of nondimensional stiffnesses: ``k1`` in compression, ``k2`` in tension."""

    k1: float
    k2: float

    def __post_init__(self):
        for name in ("k1", "k2"):
            val = getattr(self, name)
            if not math.isfinite(val) or val < 0:
                raise ValueError(f"invalid value: {name} must be >= 0, got {val}")

    def stiffness(self, w):
        """k(W): ``k1`` where ``W <= 0``, ``k2`` where ``W > 0``."""
        w = np.asarray(w, dtype=float)
        out = np.where(w <= 0.0, self.k1, self.k2)
        return out if out.ndim else float(out)

    def restoring(self, w):
        """k(W) * W, continuous and piecewise linear."""
        w = np.asarray(w, dtype=float)
        out = np.where(w <= 0.0, self.k1, self.k2) * w
        return out if out.ndim else float(out)

    def primitive(self, w):
        """Gamma(W) = k(W) W**2 / 2, a primitive of k(W) W."""
        w = np.asarray(w, dtype=float)
        out = 0.5 * np.where(w <= 0.0, self.k1, self.k2) * w * w
        return out if out.ndim else float(out)

    def swapped(self) -> "Substrate":
        return Substrate(self.k2, self.k1)

    @property
    def ratio(self) -> float:
        return self.k1 / self.k2


@dataclass(frozen=True)
class TravelingWave:
    """A single (n = 1) or repetitive multiple (n > 1) periodic wave.

    ``alpha`` is the compression fraction of one nondimensional period of the
    repeated cell (so ``alpha < 1/n``) and ``amplitude`` is the tension-side
    amplitude ``c3``.
    """

    substrate: Substrate
    alpha: float
    c: float
    amplitude: float = 1.0
    n: int = 1
    L: float = 1.0
    v: float = 1.0
    # c**2 - 1 kept separately: recomputing it from c cancels digits when c is near 1.
    c2_minus_one: float | None = field(default=None, compare=False)

    @property
    def _c2m1(self) -> float:
        return self.c**2 - 1.0 if self.c2_minus_one is None else self.c2_minus_one

    @property
    def a(self) -> float:
        return math.sqrt(self.substrate.k1 / self._c2m1)

    @property
    def b(self) -> float:
        return math.sqrt(self.substrate.k2 / self._c2m1)

    @property
    def compression_amplitude(self) -> float:
        """Magnitude of the W <= 0 lobe, ``c3 * sqrt(k2/k1)``."""
        return self.amplitude * math.sqrt(self.substrate.k2 / self.substrate.k1)

    @property
    def cell(self) -> float:
        """Nondimensional length of one repeated cell, ``1/n``."""
        return 1.0 / self.n

    @property
    def phase_speed(self) -> float:
        """Dimensional phase speed ``c * v``."""
        return self.c * self.v

    def profile(self, xi):
        return profile(self, xi)

    def slope(self, xi):
        return profile_slope(self, xi)


def solve_single_wave(substrate: Substrate, n: int = 1, amplitude: float = 1.0,
                      L: float = 1.0, v: float = 1.0) -> TravelingWave:
    """Closed-form compression fraction and phase speed for stiffnesses ``k1, k2 > 0``.

    ``alpha = (1/n) / (1 + sqrt(k1/k2))`` and
    ``c**2 = 1 + k1 k2 / ((n pi)**2 (sqrt(k1) + sqrt(k2))**2)``.
    """
    k1, k2 = substrate.k1, substrate.k2
    if k1 <= 0.0 or k2 <= 0.0:
        raise DegenerateSubstrateError(
            f"degenerate substrate (k1={k1}, k2={k2}): both stiffnesses must be "
            "strictly positive; use limit_case for the unilateral limits")
    n = int(n)
    if n < 1:
        raise ValueError(f"invalid value: n must be >= 1, got {n}")
    if amplitude <= 0 or L <= 0 or v <= 0:
        raise ValueError("amplitude, L and v must be positive")
    r1, r2 = math.sqrt(k1), math.sqrt(k2)
    alpha = r2 / (r1 + r2) / n
    c2m1 = k1 * k2 / ((n * math.pi) ** 2 * (r1 + r2) ** 2)
    return TravelingWave(substrate, alpha, math.sqrt(1.0 + c2m1), amplitude, n, L, v,
                         c2_minus_one=c2m1)


def _cell_coordinate(wave: TravelingWave, xi):
    # Half-open reduction to [0, 1/n): the seam belongs to the compression branch.
    return np.mod(np.asarray(xi, dtype=float), wave.cell)


def profile(wave: TravelingWave, xi):
    """W(xi), with ``xi`` reduced modulo the period."""
    s = _cell_coordinate(wave, xi)
    al = wave.alpha
    tension_len = wave.cell - al
    w1 = -wave.compression_amplitude * np.sin(s * np.pi / al)
    w2 = wave.amplitude * np.sin((s - al) * np.pi / tension_len)
    out = np.where(s <= al, w1, w2)
    return out if out.ndim else float(out)


def profile_slope(wave: TravelingWave, xi):
    """dW/dxi; at ``xi = alpha`` the compression branch is used (both agree)."""
    s = _cell_coordinate(wave, xi)
    al = wave.alpha
    tension_len = wave.cell - al
    d1 = -wave.compression_amplitude * np.pi / al * np.cos(s * np.pi / al)
    d2 = wave.amplitude * np.pi / tension_len * np.cos((s - al) * np.pi / tension_len)
    out = np.where(s <= al, d1, d2)
    return out if out.ndim else float(out)


def evaluate_spacetime(wave: TravelingWave, x, t):
    """w(x, t) = W((x - c v t) / L)."""
    xi = (np.asarray(x, dtype=float) - wave.c * wave.v * np.asarray(t, dtype=float)) / wave.L
    return profile(wave, xi)


def period_frequency(wave: TravelingWave) -> tuple[float, float]:
    """Temporal period ``tau = L / (c v)`` and angular frequency ``2 pi / tau``."""
    tau = wave.L / (wave.c * wave.v)
    return tau, 2.0 * math.pi / tau


def junction_residuals(wave: TravelingWave) -> tuple[float, float]:
    """``|a alpha - pi|`` and ``|b (1/n - alpha) - pi|``."""
    return (abs(wave.a * wave.alpha - math.pi),
            abs(wave.b * (wave.cell - wave.alpha) - math.pi))


@dataclass(frozen=True)
class LimitReport:
    which: str
    alpha_limit: float
    c_limit: float
    c2_limit: float
    exists: bool
    note: str


def limit_case(substrate: Substrate,
               which: Literal["unilateral", "unilaterally_rigid"]) -> LimitReport:
    """Limits k2 -> 0 (unilateral) and k2 -> infinity (unilaterally rigid).

    Only ``substrate.k1`` enters the limit values; a finite ``k2`` is ignored.
    Regular waves do not exist in either exact limit because the slope of the
    collapsing lobe oscillates without a limit, so ``exists`` is always False.
    """
    k1 = substrate.k1
    if which == "unilateral":
        return LimitReport(which, 0.0, 1.0, 1.0, False,
                           "compression lobe collapses to a point; slope jump at the seam")
    if which == "unilaterally_rigid":
        c2 = 1.0 + k1 / math.pi**2
        return LimitReport(which, 1.0, math.sqrt(c2), c2, False,
                           "tension lobe collapses to a point; slope jump at xi = 1")
    raise ValueError(f"invalid value: which must be 'unilateral' or "
                     f"'unilaterally_rigid', got {which!r}")
