import cmath
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from conftest import TWO_PI, aligo_params, rel
from optospring.dynamics import (
    CharPoly,
    characteristic_polynomial,
    derive_coefficients,
    dynamic_stiffness,
    local_maxima,
    pump_strength,
    susceptibility,
    zero_order_factors,
)
from optospring.errors import DegenerateModeError
from optospring.params import preset
from optospring.stability import solve_roots


def direct_roots(params):
    """Eigenvalues of the linear field + motion system, built without the
    normal-mode reduction.

    State (e+, e-, e+^dag, e-^dag, w, z) with z the scaled antisymmetric
    displacement and w = lam z.  Time is scaled by s = |Gamma_s| so the
    pencil stays well conditioned for kHz-scale systems.
    """
    d = params.r_z * params.delta_arm
    j = pump_strength(params)
    g_w = complex(params.gamma_w, -params.delta_w)
    g_s = complex(params.gamma_s, -params.delta_s)
    xi = 1j * d / g_s
    s = abs(g_s)
    a = np.zeros((6, 6), complex)
    b = np.zeros((6, 6), complex)
    a[0, [0, 1, 5]] = [g_w, -1j * d, -1j * xi]
    a[1, [0, 1, 5]] = [-1j * d, g_s, -1j]
    a[2, [2, 3, 5]] = [g_w.conjugate(), 1j * d, 1j * xi.conjugate()]
    a[3, [2, 3, 5]] = [1j * d, g_s.conjugate(), 1j]
    a[:4] /= s
    a[4, :4] = j / s**2 * np.array([xi.conjugate(), 1, xi, 1])
    a[5, 4] = 1
    b[:4, :4] = np.eye(4)
    b[4, 4] = -1
    b[5, 5] = -1
    b[:4, :4] *= -1
    return s * scipy.linalg.eigvals(a, b)


def match(found, expected):
    expected = list(expected)
    worst = 0.0
    for z in found:
        k = int(np.argmin([abs(z - e) for e in expected]))
        worst = max(worst, abs(z - expected[k]) / abs(expected[k]))
        expected.pop(k)
    return worst


# --- coefficients -------------------------------------------------------------------


def test_zero_detuning_limits():
    c = derive_coefficients(preset("aligo").replace(delta_arm=0.0))
    assert c.kappa == 0 and c.xi == 0 and c.d == 1
    assert c.lambda_plus == -c.gamma_w_cap
    assert c.lambda_minus == -c.gamma_s_cap
    assert c.i2 == 0 and c.i2_alpha2 == 0 and c.alpha2 == 0
    assert c.psi_coef == 0


def test_kappa_alternative_form(any_preset):
    c = derive_coefficients(any_preset)
    other = 1j * c.delta_eff / (c.gamma_w_cap + c.lambda_minus)
    assert abs(c.kappa - other) <= 1e-12 * abs(other)


def test_msi_uses_scaled_detuning_and_pump():
    p = preset("msi")
    c = derive_coefficients(p)
    assert c.delta_eff == pytest.approx(p.r_z * p.delta_arm, rel=1e-15)
    plain = p.wavenumber * p.circ_power / (p.arm_length * p.mass)
    assert c.j_plus == pytest.approx(0.17 * plain, rel=1e-13)


def test_identical_modes_are_degenerate():
    p = preset("aligo").replace(gamma_s=TWO_PI * 1.5, delta_s=TWO_PI * -23.0)
    with pytest.raises(DegenerateModeError):
        derive_coefficients(p)


def test_summary_is_json_ready():
    out = derive_coefficients(preset("aligo")).summary()
    assert out["kappa"][1] == pytest.approx(derive_coefficients(preset("aligo")).kappa.imag)
    assert isinstance(out["i1"], float)


def test_equal_decay_kappa_real_alpha_zero():
    c = derive_coefficients(preset("aligo-equal"))
    assert abs(c.kappa.imag) <= 1e-12 * abs(c.kappa)
    assert c.alpha1 == pytest.approx(0, abs=1e-12) and c.alpha2 == pytest.approx(0, abs=1e-12)
    # xi keeps a phase from delta_s even with equal decay rates
    assert abs(c.xi.imag) > 0.01 * abs(c.xi)


# --- characteristic polynomial -------------------------------------------------------


def test_polynomial_is_real_monic_sextic(any_preset):
    poly = characteristic_polynomial(derive_coefficients(any_preset))
    assert poly.degree == 6
    assert poly.coeffs[-1] == 1.0


# the kHz pencil loses digits in the QZ step (its eigenvalues are not exactly
# conjugate), so the oracle itself is only good to ~1e-6 there
@pytest.mark.parametrize(
    "name, tol", [("aligo", 1e-8), ("aligo-equal", 1e-8), ("msi", 2e-6), ("msi-equal", 2e-6)]
)
def test_roots_match_direct_eigenproblem(name, tol):
    p = preset(name)
    roots = solve_roots(characteristic_polynomial(derive_coefficients(p))).roots
    assert match(roots, direct_roots(p)) < tol


@given(aligo_params(delta_min_hz=0.0))
def test_roots_match_direct_eigenproblem_random(p):
    roots = solve_roots(characteristic_polynomial(derive_coefficients(p))).roots
    assert match(roots, direct_roots(p)) < 1e-7


@given(aligo_params(), st.floats(-3, 3), st.floats(-300, 300))
def test_polynomial_equals_rational_form(p, re, im):
    c = derive_coefficients(p)
    lam = complex(re, im)
    q_s = (lam + c.tg_s) ** 2 + c.td_s**2
    q_w = (lam + c.tg_w) ** 2 + c.td_w**2
    expected = (
        lam**2 * q_s * q_w
        + c.i1 * (1 + c.alpha1 * (lam + c.tg_s)) * q_w
        + c.i2 * (1 + c.alpha2 * (lam + c.tg_w)) * q_s
    )
    got = characteristic_polynomial(c)(lam)
    scale = abs(lam**2 * q_s * q_w) + abs(c.i1 * q_w) + abs(c.i2 * q_s)
    assert abs(got - expected) <= 1e-10 * scale
    assert abs(q_s * q_w * dynamic_stiffness(c, lam) - expected) <= 1e-10 * scale


def test_zero_detuning_factorises():
    c = derive_coefficients(preset("aligo").replace(delta_arm=0.0))
    d1, d2 = zero_order_factors(c)
    full = characteristic_polynomial(c).coeffs
    assert rel(np.polynomial.polynomial.polymul(d1, d2), full) < 1e-12


def test_from_roots():
    poly = CharPoly.from_roots([-1, -2 + 1j, -2 - 1j])
    np.testing.assert_allclose(poly.coeffs, [5, 9, 5, 1])


def test_charpoly_rejects_nonfinite():
    with pytest.raises(ValueError):
        CharPoly([1.0, float("inf")])


# --- susceptibility -------------------------------------------------------------------


def test_static_limit():
    p = preset("aligo")
    c = derive_coefficients(p)
    k_static = c.i1 * (1 + c.alpha1 * c.tg_s) / (c.tg_s**2 + c.td_s**2) + c.i2 * (
        1 + c.alpha2 * c.tg_w
    ) / (c.tg_w**2 + c.td_w**2)
    chi = susceptibility(c, p, [1e-6]).chi[0]
    assert chi == pytest.approx(1 / (p.reduced_mass * k_static), rel=1e-9)


def test_susceptibility_vanishes_at_optical_resonance():
    p = preset("aligo")
    c = derive_coefficients(p)
    curve = susceptibility(c, p, np.linspace(TWO_PI * 30, TWO_PI * 60, 3001))
    i_min = int(np.argmin(curve.chi_abs))
    assert curve.omega[i_min] == pytest.approx(c.td_s, rel=2e-3)


def test_susceptibility_csv_format():
    p = preset("aligo")
    curve = susceptibility(derive_coefficients(p), p, [1.0, 2.0])
    lines = curve.to_csv().splitlines()
    assert lines[0] == "omega_rad_s,chi_re,chi_im,chi_abs"
    assert len(lines) == 3
    w, re, im, ab = map(float, lines[1].split(","))
    assert w == 1.0 and ab == pytest.approx(math.hypot(re, im))
    assert len(curve) == 2 and next(iter(curve)).omega == 1.0


@pytest.mark.parametrize("grid", [[], [0.0, 1.0], [2.0, 1.0], [[1.0, 2.0]]])
def test_susceptibility_rejects_bad_grid(grid):
    p = preset("aligo")
    with pytest.raises(ValueError):
        susceptibility(derive_coefficients(p), p, grid)


def test_susceptibility_flags_poles(monkeypatch):
    # |Q| below the floor must give NaN and a flag, not a huge finite chi
    import optospring.dynamics as dyn

    monkeypatch.setattr(dyn, "dynamic_stiffness", lambda c, lam: np.array([1.0, 0.0, 1e-31j]) + 0 * lam)
    p = preset("aligo")
    curve = dyn.susceptibility(derive_coefficients(p), p, [1.0, 2.0, 3.0])
    assert curve.singular.tolist() == [False, True, True]
    assert cmath.isnan(curve.chi[1])
    assert curve.chi[0] == pytest.approx(1 / p.reduced_mass)


def test_local_maxima():
    assert local_maxima([0, 1, 0, 2, 2, 0, 3, 1]).tolist() == [1, 6]
