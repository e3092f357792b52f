"""Traveling waves under a constant transverse load ``p``.

For a chosen compression fraction ``alpha`` the wavenumber-like parameter ``a``
solves the transcendental matching condition

    sqrt(k1/k2) = sin(a alpha)/(cos(a alpha) + 1) * sin(y)/(cos(y) - 1),
    y = b (1 - alpha),  b = a sqrt(k2/k1),

and the speed is ``c = sqrt(1 + k1/a**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .analytic import Substrate, solve_single_wave

SINGULAR_GUARD = 1e-9
CRITICAL_TOL = 1e-6
DEFAULT_A_MAX = 12.0 * math.pi
DEFAULT_GRID = 20_000
ROOT_XTOL = 1e-12


class SingularPointError(ValueError):
    pass


class NoRootError(ValueError):
    pass


class InadmissibleLoadError(ValueError):
    pass


class CriticalAlphaError(ValueError):
    pass


def alpha_critical(substrate: Substrate) -> float:
    """Compression fraction at which the loaded amplitude diverges.

    Equal to the unloaded single-wave fraction for the same stiffnesses.
    """
    return solve_single_wave(substrate).alpha


def _half_angles(substrate: Substrate, alpha, a):
    s = math.sqrt(substrate.k2 / substrate.k1)
    half_a = 0.5 * np.asarray(a, dtype=float) * alpha
    half_b = 0.5 * np.asarray(a, dtype=float) * s * (1.0 - alpha)
    return half_a, half_b


def _residual_unchecked(substrate: Substrate, alpha, a):
    # sin x/(cos x + 1) = tan(x/2) and sin y/(cos y - 1) = -cot(y/2); the
    # half-angle product avoids cancellation next to the poles.
    ha, hb = _half_angles(substrate, alpha, a)
    num = np.sin(ha) * np.cos(hb)
    den = np.cos(ha) * np.sin(hb)
    return math.sqrt(substrate.k1 / substrate.k2) + num / den


def dispersion_residual(substrate: Substrate, alpha: float, a: float) -> float:
    """Left minus right side of the matching condition at ``(alpha, a)``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"invalid value: alpha must lie in (0, 1), got {alpha}")
    if not (math.isfinite(a) and a > 0.0):
        raise ValueError(f"invalid value: a must be finite and > 0, got {a}")
    ha, hb = _half_angles(substrate, alpha, a)
    if abs(math.cos(ha)) < SINGULAR_GUARD or abs(math.sin(hb)) < SINGULAR_GUARD:
        raise SingularPointError(f"singular point at alpha={alpha}, a={a}")
    return float(_residual_unchecked(substrate, alpha, a))


def singularities(substrate: Substrate, alpha: float, a_max: float) -> np.ndarray:
    """Poles of the residual in ``(0, a_max]``.

    They sit at ``a alpha = (2m+1) pi`` and ``b (1 - alpha) = 2 m pi``.
    """
    s = math.sqrt(substrate.k2 / substrate.k1)
    m1 = np.arange(0, int(a_max * alpha / (2 * math.pi)) + 2)
    first = (2 * m1 + 1) * math.pi / alpha
    m2 = np.arange(1, int(a_max * s * (1 - alpha) / (2 * math.pi)) + 2)
    second = 2 * m2 * math.pi / (s * (1.0 - alpha))
    poles = np.concatenate([first, second])
    return np.unique(poles[poles <= a_max])


@dataclass(frozen=True)
class DispersionScan:
    alpha: float
    roots: tuple[float, ...]
    singularities: tuple[float, ...]
    critical: bool = False
    critical_root: float | None = None


def scan_roots(substrate: Substrate, alpha: float, a_max: float = DEFAULT_A_MAX,
               grid: int = DEFAULT_GRID) -> DispersionScan:
    """All roots ``a`` of the matching condition in ``(0, a_max]``, ascending.

    Each pole-free interval is sampled on the shared uniform grid plus two points
    just inside its ends; every sign change is refined by bisection.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"invalid value: alpha must lie in (0, 1), got {alpha}")
    if a_max <= 0:
        raise ValueError("invalid value: a_max must be > 0")
    if grid < 1000:
        raise ValueError("invalid value: grid must have at least 1000 points")

    poles = singularities(substrate, alpha, a_max)
    mesh = np.linspace(0.0, a_max, grid + 1)[1:]
    edges = np.concatenate([[0.0], poles, [a_max]])
    roots: list[float] = []

    def f(a):
        return float(_residual_unchecked(substrate, alpha, a))

    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0.0:
            continue
        nudge = 1e-10 * max(1.0, hi)
        inside = mesh[(mesh > lo + nudge) & (mesh < hi - nudge)]
        pts = np.concatenate([[lo + nudge], inside])
        if hi < a_max or hi in poles:
            pts = np.append(pts, hi - nudge)
        else:
            pts = np.append(pts, hi)
        vals = _residual_unchecked(substrate, alpha, pts)
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
            x0, x1 = pts[i], pts[i + 1]
            if vals[i] == 0.0:
                r = x0
            elif vals[i + 1] == 0.0:
                continue  # picked up as the left end of the next pair
            else:
                r = bisect(f, x0, x1, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps,
                           maxiter=200)
            roots.append(float(r))

    a_cr = alpha_critical(substrate)
    critical = abs(alpha - a_cr) <= CRITICAL_TOL
    if not roots and not critical:
        raise NoRootError(f"no root in range (0, {a_max}] for alpha={alpha}")
    return DispersionScan(alpha, tuple(sorted(set(roots))), tuple(poles.tolist()),
                          critical, math.pi / alpha if critical else None)


@dataclass(frozen=True)
class LoadedWave:
    """Sign-changing traveling wave under load ``p``.

    ``coeffs`` are ``(c1, c2, c3, c4)``:
    ``W1 = c1 sin(a xi) + c2 cos(a xi) + p/k1`` on ``[0, alpha]`` and
    ``W2 = c3 sin(b (xi - alpha)) + c4 cos(b (xi - alpha)) + p/k2`` on ``[alpha, 1]``.
    """

    substrate: Substrate
    p: float
    alpha: float
    a: float
    b: float
    c: float
    coeffs: tuple[float, float, float, float]
    branch_index: int = 0
    L: float = 1.0
    v: float = 1.0

    @property
    def particular(self) -> float:
        """Constant particular solution ``w_p``: p/k1 for p < 0, p/k2 for p > 0."""
        return self.p / (self.substrate.k1 if self.p < 0 else self.substrate.k2)

    @property
    def period(self) -> float:
        return self.L / (self.c * self.v)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    def profile(self, xi):
        return loaded_profile(self, xi)

    def slope(self, xi):
        return loaded_slope(self, xi)


def loaded_coefficients(substrate: Substrate, p: float, alpha: float, a: float):
    k1, k2 = substrate.k1, substrate.k2
    b = a * math.sqrt(k2 / k1)
    ta = a * alpha
    tb = b * (1.0 - alpha)
    c1 = p / k1 * (math.cos(ta) - 1.0) / math.sin(ta)
    c2 = -p / k1
    c3 = p / k2 * (math.cos(tb) - 1.0) / math.sin(tb)
    c4 = -p / k2
    return b, (c1, c2, c3, c4)


def solve_loaded_wave(substrate: Substrate, p: float, alpha: float, branch: int = 0,
                      a_max: float = DEFAULT_A_MAX, grid: int = DEFAULT_GRID,
                      L: float = 1.0, v: float = 1.0) -> LoadedWave:
    """Loaded wave on root ``branch`` (0 = lowest = simple wave) of the matching condition."""
    if p == 0.0 or not math.isfinite(p):
        raise ValueError("invalid value: p must be finite and nonzero")
    if substrate.k1 <= 0 or substrate.k2 <= 0:
        raise ValueError("invalid value: k1 and k2 must be > 0 for loaded waves")
    a_cr = alpha_critical(substrate)
    if abs(alpha - a_cr) <= CRITICAL_TOL:
        raise CriticalAlphaError(
            f"critical alpha: alpha={alpha} is within {CRITICAL_TOL} of alpha_cr={a_cr}")
    scan = scan_roots(substrate, alpha, a_max, grid)
    if branch < 0 or branch >= len(scan.roots):
        raise NoRootError(f"no root for branch {branch}: {len(scan.roots)} roots "
                          f"below a_max={a_max}")
    a = scan.roots[branch]
    b, coeffs = loaded_coefficients(substrate, p, alpha, a)
    if coeffs[0] > 0.0:
        need = "p > 0" if p < 0 else "p < 0"
        raise InadmissibleLoadError(
            f"inadmissible load sign: p={p} gives c1={coeffs[0]:.3g} > 0 at "
            f"alpha={alpha} (alpha_cr={a_cr:.6f}); this branch requires {need}")
    c = math.sqrt(1.0 + substrate.k1 / a**2)
    return LoadedWave(substrate, p, alpha, a, b, c, coeffs, branch, L, v)


def loaded_profile(wave: LoadedWave, xi):
    s = np.mod(np.asarray(xi, dtype=float), 1.0)
    c1, c2, c3, c4 = wave.coeffs
    k1, k2 = wave.substrate.k1, wave.substrate.k2
    w1 = c1 * np.sin(wave.a * s) + c2 * np.cos(wave.a * s) + wave.p / k1
    u = s - wave.alpha
    w2 = c3 * np.sin(wave.b * u) + c4 * np.cos(wave.b * u) + wave.p / k2
    out = np.where(s <= wave.alpha, w1, w2)
    return out if out.ndim else float(out)


def loaded_slope(wave: LoadedWave, xi):
    s = np.mod(np.asarray(xi, dtype=float), 1.0)
    c1, c2, c3, c4 = wave.coeffs
    a, b = wave.a, wave.b
    d1 = a * (c1 * np.cos(a * s) - c2 * np.sin(a * s))
    u = s - wave.alpha
    d2 = b * (c3 * np.cos(b * u) - c4 * np.sin(b * u))
    out = np.where(s <= wave.alpha, d1, d2)
    return out if out.ndim else float(out)


def _harmonic_extreme(cs, cc, omega, offset, lo, hi, want_min):
    # Extreme of cs sin(omega u) + cc cos(omega u) + offset over u in [lo, hi].
    g = lambda u: cs * math.sin(omega * u) + cc * math.cos(omega * u) + offset  # noqa: E731
    cands = [lo, hi]
    phi = math.atan2(cs, cc)  # stationary points: omega u = phi + m pi
    m_lo = math.floor((omega * lo - phi) / math.pi) - 1
    m_hi = math.ceil((omega * hi - phi) / math.pi) + 1
    for m in range(m_lo, m_hi + 1):
        u = (phi + m * math.pi) / omega
        if lo <= u <= hi:
            cands.append(u)
    vals = [g(u) for u in cands]
    return min(vals) if want_min else max(vals)


def extrema(wave: LoadedWave, normalized: bool = True) -> tuple[float, float]:
    """Minimum of W1 and maximum of W2.

    With ``normalized`` the values are scaled by ``k1/p`` and ``k2/p``.
    """
    c1, c2, c3, c4 = wave.coeffs
    k1, k2 = wave.substrate.k1, wave.substrate.k2
    wmin = _harmonic_extreme(c1, c2, wave.a, wave.p / k1, 0.0, wave.alpha, True)
    wmax = _harmonic_extreme(c3, c4, wave.b, wave.p / k2, 0.0, 1.0 - wave.alpha, False)
    if normalized:
        return wmin * k1 / wave.p, wmax * k2 / wave.p
    return wmin, wmax


def zero_wave_exists(substrate: Substrate, p: float, amplitude: float) -> bool:
    """True when an oscillation of this magnitude never reaches W = 0 under load p.

    The offset is ``p/k1`` for ``p < 0`` and ``p/k2`` for ``p > 0``.
    """
    if p == 0.0:
        raise ValueError("invalid value: p must be nonzero")
    k = substrate.k1 if p < 0 else substrate.k2
    return abs(amplitude) < abs(p / k)
