import cmath
import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from optospring.dynamics import derive_coefficients
from optospring.errors import ConfigError, SingularityError
from optospring.meanfield import (
    PhysicalConfig,
    aligo_mode_params,
    mean_fields,
    msi_mode_params,
    msi_rates,
    output_power,
    physical_config,
    recycled_mode,
)
from optospring.params import Topology, parse_config_text, preset, wavelength_to_omega

OMEGA0 = wavelength_to_omega(1064.0)


def aligo_cfg(**kw):
    base = dict(
        t_arm=0.01, r_w=0.9, r_s=0.5, phi_w=0.1, phi_s=2.0, arm_length=4000.0,
        recycling_length=10.0, pump_power=100.0, omega0=OMEGA0,
        delta_arm=2 * math.pi * 5, mass=40.0,
    )
    base.update(kw)
    return PhysicalConfig(**base)


def msi_cfg(rz=0.4, **kw):
    theta = math.acos(rz)
    base = dict(
        t_arm=0.1, r_w=0.99, r_s=0.99, phi_w=-theta + 1e-3, phi_s=theta - 2e-3,
        arm_length=0.087, recycling_length=1e-4, pump_power=1.0, omega0=OMEGA0,
        delta_arm=1e4, mass=1e-10, r_z=rz,
    )
    base.update(kw)
    return PhysicalConfig(**base)


def complex_rate(r, phi, gamma_t):
    # Gamma = gamma_T (1 + R Theta^2) / (1 - R Theta^2), Theta^2 = e^{i phi}
    t2 = cmath.exp(1j * phi)
    return gamma_t * (1 + r * t2) / (1 - r * t2)


# --- aLIGO mode parameters ------------------------------------------------------------


def test_no_recycling_mirror_gives_bare_arm():
    cfg = aligo_cfg()
    assert recycled_mode(0.0, 1.234, cfg.gamma_t) == (cfg.gamma_t, 0.0)


def test_resonant_recycling():
    g, d = recycled_mode(0.95, 0.0, 1.0)
    assert g == pytest.approx((1 + 0.95) / (1 - 0.95), rel=1e-12)
    assert d == 0.0


def test_degenerate_cavity_is_singular():
    with pytest.raises(SingularityError):
        recycled_mode(1.0, 0.0, 1.0)


@given(st.floats(0.0, 0.999), st.floats(-math.pi, math.pi))
def test_recycled_mode_matches_complex_oracle(r, phi):
    gamma_t = 3.7
    g, d = recycled_mode(r, phi, gamma_t)
    oracle = complex_rate(r, phi, gamma_t)
    assert g == pytest.approx(oracle.real, rel=1e-10)
    assert d == pytest.approx(-oracle.imag, rel=1e-9, abs=1e-12 * abs(oracle))


def test_aligo_mode_params_example():
    cfg = aligo_cfg()
    p = aligo_mode_params(cfg)
    w = complex_rate(0.9, 0.1, cfg.gamma_t)
    assert p.gamma_w == pytest.approx(w.real, rel=1e-12)
    assert p.delta_w == pytest.approx(-w.imag, rel=1e-12)
    assert p.gamma_w > 0 and p.gamma_s > 0
    assert p.circ_power == pytest.approx(mean_fields(cfg, p).i_plus)
    assert p.topology is Topology.ALIGO and p.mass == 40.0


def test_continuity_in_phase():
    a = aligo_mode_params(aligo_cfg())
    b = aligo_mode_params(aligo_cfg(phi_w=0.1 + 1e-9))
    assert abs(b.gamma_w - a.gamma_w) / a.gamma_w < 1e-7
    assert abs(b.delta_w - a.delta_w) / abs(a.delta_w) < 1e-7


# --- mean fields ----------------------------------------------------------------------


def test_zero_detuning_dark_port():
    cfg = aligo_cfg(delta_arm=0.0)
    mf = mean_fields(cfg, aligo_mode_params(cfg))
    assert mf.e_minus == 0 and mf.i_out == 0


@given(
    st.floats(0.001, 0.2), st.floats(0.0, 0.99), st.floats(0.0, 0.99),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-1e3, 1e3),
)
def test_dark_field_ratio_is_xi(t, rw, rs, pw, ps, delta):
    cfg = aligo_cfg(t_arm=t, r_w=rw, r_s=rs, phi_w=pw, phi_s=ps, delta_arm=delta)
    p = aligo_mode_params(cfg)
    mf = mean_fields(cfg, p)
    xi = 1j * delta / complex(p.gamma_s, -p.delta_s)  # independent of dynamics
    assert abs(mf.e_minus - xi * mf.e_plus) <= 1e-12 * abs(mf.e_plus) * max(abs(xi), 1e-300)


def test_powers_and_output():
    cfg = aligo_cfg()
    p = aligo_mode_params(cfg)
    mf = mean_fields(cfg, p)
    assert mf.i_minus == pytest.approx(abs(derive_coefficients(p).xi) ** 2 * mf.i_plus, rel=1e-12)
    assert mf.i_out == pytest.approx(2 * p.gamma_s * cfg.tau * mf.i_minus, rel=1e-15)
    assert output_power(p) == pytest.approx(mf.i_out, rel=1e-12)


def test_output_power_equal_decay_preset_order_of_magnitude():
    p = preset("aligo-equal")
    xi2 = p.delta_arm**2 / (p.gamma_s**2 + p.delta_s**2)
    assert output_power(p) == pytest.approx(2 * p.gamma_s * p.tau * xi2 * 24e3, rel=1e-12)
    assert 0.003 < output_power(p) < 0.3


def test_recycling_length_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        aligo_cfg(recycling_length=50.0)
    assert any("recycling_length" in str(w.message) for w in caught)


@pytest.mark.parametrize(
    "field, value",
    [("t_arm", 0.0), ("t_arm", 1.0), ("r_w", 1.0), ("r_s", -0.1), ("mass", 0.0),
     ("pump_power", -1.0), ("r_z", 1.5), ("arm_length", 0.0)],
)
def test_physical_config_validation(field, value):
    with pytest.raises(ConfigError) as err:
        aligo_cfg(**{field: value})
    assert err.value.key == field


# --- Michelson-Sagnac -----------------------------------------------------------------


def test_msi_rejects_unit_membrane_reflectivity():
    with pytest.raises(ConfigError):
        msi_mode_params(aligo_cfg())


def test_msi_symmetric_recycling():
    cfg = msi_cfg(rz=math.sqrt(0.17), r_w=0.3, r_s=0.3, phi_w=0.0, phi_s=0.0)
    p = msi_mode_params(cfg)
    assert p.gamma_w == pytest.approx(p.gamma_s, rel=1e-12)
    assert p.topology is Topology.MSI and p.reduced_mass == cfg.mass


def test_msi_unphysical_decay_rejected():
    with pytest.raises(ConfigError) as err:
        msi_mode_params(msi_cfg(phi_w=0.0))
    assert err.value.key == "r_w"


def test_msi_rates_literal_form():
    cfg = msi_cfg()
    t_z = math.sqrt(1 - cfg.r_z**2)
    a = complex(cfg.r_z, t_z)
    rw = cfg.r_w * cmath.exp(1j * cfg.phi_w)
    literal = (1 - rw * a) / (rw * cfg.tau_sagnac * a)
    assert msi_rates(cfg)[0] == pytest.approx(literal, rel=1e-14)


def test_msi_long_wave_against_exact_round_trip():
    # exact round trip r e^{Gamma tau'} = 1 gives Gamma = -ln(r) / tau'
    cfg = msi_cfg()
    for rate, sign in zip(msi_rates(cfg), (1, -1)):
        phi = cfg.phi_w if sign == 1 else cfg.phi_s
        r_eff = (cfg.r_w if sign == 1 else cfg.r_s) * cmath.exp(1j * phi) * complex(cfg.r_z, sign * math.sqrt(1 - cfg.r_z**2))
        exact = -cmath.log(r_eff) / cfg.tau_sagnac
        assert abs(rate.imag) * cfg.tau_sagnac < 1e-2
        assert abs(rate - exact) <= 0.01 * abs(exact)


def test_msi_michelson_limit():
    rz = 1 - 1e-12
    t_z = math.sqrt(1 - rz**2)
    cfg = msi_cfg(rz=rz, phi_w=0.01, phi_s=0.02, r_w=0.9, r_s=0.8)
    p = msi_mode_params(cfg)
    for r, phi, g, d in ((0.9, 0.01, p.gamma_w, p.delta_w), (0.8, 0.02, p.gamma_s, p.delta_s)):
        limit = (1 - r * cmath.exp(1j * phi)) / (r * cmath.exp(1j * phi) * cfg.tau_sagnac)
        # first-order effect of the residual membrane transmission
        bound = 2 * t_z / abs(1 - r * cmath.exp(1j * phi))
        assert abs(g - limit.real) <= bound * abs(limit)
        assert abs(d + limit.imag) <= bound * abs(limit)


def test_msi_mean_fields_ratio_magnitude():
    cfg = msi_cfg()
    p = msi_mode_params(cfg)
    mf = mean_fields(cfg, p)
    assert abs(mf.e_minus / mf.e_plus) == pytest.approx(abs(derive_coefficients(p).xi), rel=1e-12)
    assert mf.i_out == pytest.approx(2 * p.gamma_s * cfg.tau_sagnac * mf.i_minus)


# --- config ---------------------------------------------------------------------------

PHYS = """
t_arm = 0.01
r_w = 0.9
r_s = 0.5
phi_w_rad = 0.1
phi_s_rad = 2.0
recycling_length_m = 10
pump_power_w = 100
arm_length_m = 4000
mass_kg = 40
delta_hz = 5
"""


def test_physical_config_from_text():
    cfg = physical_config(parse_config_text(PHYS))
    assert cfg == aligo_cfg()


def test_physical_config_missing_key():
    with pytest.raises(ConfigError) as err:
        physical_config(parse_config_text(PHYS.replace("r_s = 0.5\n", "")))
    assert err.value.key == "r_s"
