import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cablewaves.analytic import Substrate, solve_single_wave
from cablewaves.loaded import (CriticalAlphaError, InadmissibleLoadError, NoRootError,
                               SingularPointError, alpha_critical, dispersion_residual, extrema,
                               scan_roots, singularities, solve_loaded_wave, zero_wave_exists)
from oracles import brute_force_roots, dense_extrema, full_angle_residual, shoot

S12 = Substrate(1.0, 2.0)
ACR12 = alpha_critical(S12)


def admissible_sign(substrate, alpha):
    return 1.0 if alpha < alpha_critical(substrate) else -1.0


# Stiffness ratio within one decade keeps the lowest root below the default scan limit.
exponents = st.floats(-1.5, 1.5)
loaded_cases = st.tuples(exponents, st.floats(-1.0, 1.0), st.floats(0.05, 0.95),
                         st.floats(1e-3, 1.0))


def _case(e1, de, alpha, p_mag):
    s = Substrate(10.0**e1, 10.0 ** (e1 + de))
    assume(abs(alpha - alpha_critical(s)) > 0.02)
    return s, alpha, admissible_sign(s, alpha) * p_mag


# --- critical alpha ----------------------------------------------------------

def test_alpha_critical_values():
    assert ACR12 == pytest.approx(0.585786, abs=1e-6)
    assert alpha_critical(Substrate(3.0, 3.0)) == 0.5
    assert alpha_critical(Substrate(1.0, 5.0)) == pytest.approx(0.690983, abs=1e-6)
    assert alpha_critical(Substrate(1.0, 5.0)) == solve_single_wave(Substrate(1.0, 5.0)).alpha


# --- residual ----------------------------------------------------------------

@pytest.mark.parametrize("delta", [1e-2, 1e-4, 1e-6, -1e-3])
def test_residual_vanishes_on_path_to_linear_solution(delta):
    # For k1 = k2 every alpha has the root a = 2 pi; approach alpha = 1/2 along it.
    assert abs(dispersion_residual(Substrate(1, 1), 0.5 + delta, 2 * math.pi)) < 1e-9


def test_residual_matches_full_angle_form():
    a = np.linspace(0.1, 30, 997)
    ours = np.array([dispersion_residual(S12, 0.7, x) for x in a])
    ref = full_angle_residual(1, 2, 0.7, a)
    # Near poles the full-angle form cancels (cos - 1) and is itself the less accurate one.
    ok = np.abs(ref) < 1e3
    np.testing.assert_allclose(ours[ok], ref[ok], rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.585, 0.7, 0.95])
def test_residual_positive_as_a_vanishes(alpha):
    assert dispersion_residual(S12, alpha, 1e-4) > 0


def test_residual_singular_point():
    with pytest.raises(SingularPointError, match="singular point"):
        dispersion_residual(S12, 0.7, math.pi / 0.7)
    with pytest.raises(SingularPointError):
        dispersion_residual(S12, 0.7, 2 * math.pi / (math.sqrt(2) * 0.3))


@pytest.mark.parametrize("args", [(0.0, 1.0), (1.0, 1.0), (0.5, -1.0), (0.5, math.nan)])
def test_residual_rejects_bad_input(args):
    with pytest.raises(ValueError):
        dispersion_residual(S12, *args)


# --- scans -------------------------------------------------------------------

@pytest.mark.parametrize("k1,k2,alpha", [(1, 2, 0.7), (1, 2, 0.3), (1, 1, 0.3), (1, 10, 0.2),
                                          (30, 1, 0.5), (1, 2, 1.2 * ACR12)])
def test_scan_matches_brute_force_sign_map(k1, k2, alpha):
    a_max = 12 * math.pi
    scan = scan_roots(Substrate(k1, k2), alpha, a_max)
    ref = brute_force_roots(k1, k2, alpha, a_max)
    assert len(scan.roots) == len(ref)
    np.testing.assert_allclose(scan.roots, ref, atol=1e-9)


def test_scan_structure():
    scan = scan_roots(S12, 0.7)
    assert np.all(np.diff(scan.roots) > 0)
    sing = np.asarray(scan.singularities)
    assert np.all(np.diff(sing) > 0)
    for r in scan.roots:
        assert np.min(np.abs(sing - r)) > 1e-9
    np.testing.assert_allclose(sing, singularities(S12, 0.7, 12 * math.pi))


def test_scan_below_critical_gives_positive_load_wave():
    alpha = 0.8 * ACR12
    scan = scan_roots(S12, alpha)
    assert scan.roots and math.isfinite(scan.roots[0])
    assert solve_loaded_wave(S12, 0.01, alpha).coeffs[0] <= 0


def test_scan_at_critical_alpha():
    scan = scan_roots(S12, ACR12)
    assert scan.critical
    assert scan.critical_root * ACR12 == pytest.approx(math.pi, rel=1e-12)
    with pytest.raises(CriticalAlphaError, match="critical alpha"):
        solve_loaded_wave(S12, -0.01, ACR12)
    with pytest.raises(CriticalAlphaError):
        solve_loaded_wave(S12, -0.01, ACR12 + 5e-7)


def test_symmetric_substrate_singularity_pattern():
    scan = scan_roots(Substrate(1, 1), 0.5)
    # Poles at a = 2 pi (2m + 1) and a = 4 pi m interleave into multiples of 2 pi.
    np.testing.assert_allclose(scan.singularities, 2 * math.pi * np.arange(1, 7), rtol=1e-12)
    assert scan.critical and not scan.roots


def test_scan_no_root_and_bad_grid():
    with pytest.raises(NoRootError, match="no root"):
        scan_roots(S12, 0.7, a_max=0.5)
    with pytest.raises(ValueError):
        scan_roots(S12, 0.7, grid=100)


def test_endpoint_anchors():
    for k1, k2 in [(30, 1), (1, 2), (1, 10)]:
        s = Substrate(k1, k2)
        a_max = max(12 * math.pi, 3 * 2 * math.pi * math.sqrt(k1 / k2))
        lo = scan_roots(s, 1e-3, a_max).roots[0]
        hi = scan_roots(s, 1 - 1e-3, a_max).roots[0]
        assert lo == pytest.approx(2 * math.pi * math.sqrt(k1 / k2), rel=1e-3)
        assert hi == pytest.approx(2 * math.pi, rel=1e-3)


# --- solving -----------------------------------------------------------------

def test_reference_wave():
    w = solve_loaded_wave(S12, -0.01, 1.2 * ACR12)
    assert w.c == pytest.approx(math.sqrt(1 + 1 / w.a**2), rel=1e-15)
    assert w.b == pytest.approx(w.a * math.sqrt(2), rel=1e-15)
    assert w.coeffs[0] <= 0
    assert w.particular == pytest.approx(-0.01)


def test_wrong_load_sign_rejected():
    with pytest.raises(InadmissibleLoadError, match="inadmissible load sign"):
        solve_loaded_wave(S12, 0.01, 1.2 * ACR12)
    with pytest.raises(InadmissibleLoadError):
        solve_loaded_wave(S12, -0.01, 0.5 * ACR12)


def test_zero_load_rejected():
    with pytest.raises(ValueError, match="p must be"):
        solve_loaded_wave(S12, 0.0, 0.7)


def test_higher_branch_and_missing_branch():
    # Admissibility is checked per branch; the second root at alpha = 0.7 needs p > 0.
    roots = scan_roots(S12, 0.7).roots
    assert solve_loaded_wave(S12, 0.01, 0.7, branch=1).a == roots[1]
    with pytest.raises(InadmissibleLoadError):
        solve_loaded_wave(S12, -0.01, 0.7, branch=1)
    with pytest.raises(NoRootError):
        solve_loaded_wave(S12, -0.01, 0.7, branch=50)


def test_profile_matches_shooting_oracle():
    w = solve_loaded_wave(S12, -0.01, 1.2 * ACR12)
    xi = np.array([0.0, w.alpha / 2, w.alpha, (1 + w.alpha) / 2, 1.0])
    ref = shoot(1, 2, w.c**2 - 1, -0.01, w.slope(0.0), xi)
    np.testing.assert_allclose(w.profile(xi), ref[:, 0], atol=1e-12)
    assert w.profile(0.0) == 0.0
    assert abs(w.profile(w.alpha)) < 1e-16


@pytest.mark.parametrize("alpha", [0.3, 0.8])
def test_extrema_match_dense_sampling(alpha):
    w = solve_loaded_wave(S12, admissible_sign(S12, alpha) * 0.01, alpha)
    lo, hi = dense_extrema(w.profile, w.alpha)
    assert extrema(w, normalized=False) == pytest.approx((lo, hi), rel=1e-9, abs=1e-15)
    n_lo, n_hi = extrema(w)
    assert n_lo == pytest.approx(lo * 1 / w.p) and n_hi == pytest.approx(hi * 2 / w.p)


def test_extrema_symmetric_substrate_mirror():
    a = solve_loaded_wave(Substrate(1, 1), 0.001, 0.3)
    b = solve_loaded_wave(Substrate(1, 1), -0.001, 0.7)
    assert extrema(a)[0] == pytest.approx(extrema(b)[1], rel=1e-10)
    assert extrema(a)[1] == pytest.approx(extrema(b)[0], rel=1e-10)


def test_extrema_diverge_at_critical_alpha():
    sizes = []
    for d in (0.1, 0.01, 1e-3, 1e-4):
        below = solve_loaded_wave(S12, 0.01, ACR12 - d)
        above = solve_loaded_wave(S12, -0.01, ACR12 + d)
        sizes.append((max(map(abs, extrema(below))), max(map(abs, extrema(above)))))
    sizes = np.array(sizes)
    assert np.all(np.diff(sizes, axis=0) > 0)
    assert np.all(sizes[-1] > 100 * sizes[0])


def test_zero_wave():
    s = Substrate(1, 1)
    assert zero_wave_exists(s, -0.5, 0.1)
    assert not zero_wave_exists(s, -0.5, 0.6)
    assert not zero_wave_exists(s, -0.5, 0.5)
    assert zero_wave_exists(Substrate(1, 4), 0.5, 0.1)
    assert not zero_wave_exists(Substrate(1, 4), 0.5, 0.2)
    with pytest.raises(ValueError):
        zero_wave_exists(s, 0.0, 0.1)


# --- properties --------------------------------------------------------------

@given(loaded_cases)
def test_solved_wave_invariants(case):
    s, alpha, p = _case(*case)
    w = solve_loaded_wave(s, p, alpha)
    c1, c2, c3, c4 = w.coeffs
    k1, k2 = s.k1, s.k2
    assert abs(dispersion_residual(s, alpha, w.a)) < 1e-10
    # one-sided slopes at xi = alpha and at the seam
    left_a = w.a * (c1 * math.cos(w.a * alpha) - c2 * math.sin(w.a * alpha))
    right_a = w.b * c3
    tb = w.b * (1 - alpha)
    left_seam = w.b * (c3 * math.cos(tb) - c4 * math.sin(tb))
    right_seam = w.a * c1
    scale = max(abs(left_a), abs(right_seam))
    assert abs(left_a - right_a) <= 1e-8 * scale
    assert abs(left_seam - right_seam) <= 1e-8 * scale
    # amplitude identity and sign-changing magnitudes
    assert c1**2 + c2**2 == pytest.approx((p / k1) ** 2 / math.cos(w.a * alpha / 2) ** 2,
                                          rel=1e-12)
    assert c1**2 + c2**2 >= (p / k1) ** 2 and c3**2 + c4**2 >= (p / k2) ** 2
    assert abs(w.a * alpha - math.pi) > 1e-9 and abs(tb - math.pi) > 1e-9


@given(loaded_cases)
def test_sign_partition(case):
    s, alpha, p = _case(*case)
    w = solve_loaded_wave(s, p, alpha)
    xi = np.linspace(0, 1, 10_001)
    vals = w.profile(xi)
    tol = 1e-12 * max(abs(e) for e in extrema(w, normalized=False))
    assert np.all(vals[xi <= alpha] <= tol)
    assert np.all(vals[xi >= alpha] >= -tol)


@given(loaded_cases, st.floats(0, 1))
def test_load_symmetry(case, xi):
    s, alpha, p = _case(*case)
    w = solve_loaded_wave(s, p, alpha)
    m = solve_loaded_wave(s.swapped(), -p, 1 - alpha)
    assert m.c == pytest.approx(w.c, rel=1e-10)
    scale = max(abs(e) for e in extrema(w, normalized=False))
    assert w.profile(xi) == pytest.approx(-m.profile((xi + m.alpha) % 1.0), abs=1e-9 * scale)
