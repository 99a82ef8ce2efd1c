"""Effective partial-mode parameters and mean fields from mirror specs.

The aLIGO path works with the arm input-mirror transmittance and the two
recycling mirrors (long-wave, lossless); the Michelson-Sagnac path folds the
membrane reflectivity into the recycling-mirror reflectivities.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
import warnings

from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar

from optospring.errors import ConfigError, SingularityError
from optospring.params import TWO_PI, ModeParams, Topology, _flag, _number, laser_omega, topology_from

SINGULAR_GUARD = 1e-12


@dataclasses.dataclass(frozen=True)
class PhysicalConfig:
    """Hardware description of a dual-recycled interferometer.

    Attributes
    ----------
    t_arm : float
        Amplitude transmittance T of the arm input mirrors (aLIGO only).
    r_w, r_s : float
        Amplitude reflectivities of the power / signal recycling mirrors.
    phi_w, phi_s : float
        Round-trip phases of the recycling cavities [rad].
    arm_length : float
        L [m].
    recycling_length : float
        Beam splitter to recycling mirror distance [m]; must be << L.
    pump_power : float
        Input laser power |A_p|^2 hbar omega0 [W].
    omega0 : float
        Laser angular frequency [rad/s].
    delta_arm : float
        Arm detuning delta [rad/s].
    mass : float
        Mirror / membrane mass [kg].
    r_z : float
        Membrane amplitude reflectivity (MSI only, < 1).
    membrane_distance : float
        Distance l between the folding mirror and the membrane (MSI) [m].
    """

    t_arm: float
    r_w: float
    r_s: float
    phi_w: float
    phi_s: float
    arm_length: float
    recycling_length: float
    pump_power: float
    omega0: float
    delta_arm: float
    mass: float
    r_z: float = 1.0
    membrane_distance: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.t_arm < 1.0:
            raise ConfigError("t_arm", "must lie in (0, 1)")
        for name in ("r_w", "r_s"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError(name, "must lie in [0, 1)")
        for name in ("arm_length", "omega0", "mass"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be > 0")
        for name in ("recycling_length", "pump_power", "membrane_distance"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be >= 0")
        if not 0.0 < self.r_z <= 1.0:
            raise ConfigError("r_z", "must lie in (0, 1]")
        if self.recycling_length >= self.arm_length / 100:
            warnings.warn(
                "recycling_length is not << arm_length; long-wave formulas lose accuracy",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def tau(self):
        return self.arm_length / SPEED_OF_LIGHT

    @property
    def tau_sagnac(self):
        """Round-trip time 2(L + l)/c of the Michelson-Sagnac arms."""
        return 2 * (self.arm_length + self.membrane_distance) / SPEED_OF_LIGHT

    @property
    def gamma_t(self):
        """Arm-cavity half-width T^2 / (4 tau) [rad/s]."""
        return self.t_arm**2 / (4 * self.tau)

    @property
    def pump_amplitude(self):
        return math.sqrt(self.pump_power / (hbar * self.omega0))


@dataclasses.dataclass(frozen=True)
class MeanFields:
    e_plus: complex
    e_minus: complex
    i_plus: float
    i_minus: float
    i_out: float


def recycled_mode(r, phi, gamma_t):
    """Decay rate and detuning of one recycling-cavity partial mode.

    gamma = gamma_T (1 - R^2) / |1 - R e^{i phi}|^2 and
    delta = -2 gamma_T R sin(phi) / |1 - R e^{i phi}|^2.
    """
    gap = 1.0 - 2.0 * r * math.cos(phi) + r * r  # |1 - R e^{i phi}|^2
    if math.sqrt(gap) < SINGULAR_GUARD:
        raise SingularityError("|1 - R Theta^2| vanishes: degenerate recycling cavity")
    return gamma_t * (1 - r * r) / gap, -2.0 * gamma_t * r * math.sin(phi) / gap


def aligo_mode_params(cfg):
    """:class:`ModeParams` for the aLIGO topology, ``circ_power`` included."""
    gamma_w, delta_w = recycled_mode(cfg.r_w, cfg.phi_w, cfg.gamma_t)
    gamma_s, delta_s = recycled_mode(cfg.r_s, cfg.phi_s, cfg.gamma_t)
    params = ModeParams(
        gamma_w=gamma_w,
        gamma_s=gamma_s,
        delta_w=delta_w,
        delta_s=delta_s,
        delta_arm=cfg.delta_arm,
        mass=cfg.mass,
        arm_length=cfg.arm_length,
        circ_power=0.0,
        omega0=cfg.omega0,
        topology=Topology.ALIGO,
    )
    return params.replace(circ_power=mean_fields(cfg, params).i_plus)


def _sagnac_rate(r_complex, tau):
    if abs(r_complex) < SINGULAR_GUARD:
        raise SingularityError("effective recycling reflectivity vanishes")
    return (1 - r_complex) / (r_complex * tau)


def msi_rates(cfg):
    """Complex Gamma_w, Gamma_s of the Michelson-Sagnac modes (long-wave)."""
    t_z = math.sqrt(1 - cfg.r_z**2)
    r_w = cfg.r_w * cmath.exp(1j * cfg.phi_w) * complex(cfg.r_z, t_z)
    r_s = cfg.r_s * cmath.exp(1j * cfg.phi_s) * complex(cfg.r_z, -t_z)
    return _sagnac_rate(r_w, cfg.tau_sagnac), _sagnac_rate(r_s, cfg.tau_sagnac)


def msi_mode_params(cfg):
    """:class:`ModeParams` for the Michelson-Sagnac topology.

    The arm detuning is stored as given; the r_z scaling happens in the
    dynamics.
    """
    if cfg.r_z >= 1.0:
        raise ConfigError("r_z", "MSI needs r_z < 1; use aligo_mode_params for r_z = 1")
    g_w, g_s = msi_rates(cfg)
    for key, g in (("r_w", g_w), ("r_s", g_s)):
        if g.real <= 0:
            raise ConfigError(key, f"effective decay rate {g.real:.4g} is not positive")
    params = ModeParams(
        gamma_w=g_w.real,
        gamma_s=g_s.real,
        delta_w=-g_w.imag,
        delta_s=-g_s.imag,
        delta_arm=cfg.delta_arm,
        mass=cfg.mass,
        arm_length=cfg.arm_length,
        circ_power=0.0,
        omega0=cfg.omega0,
        r_z=cfg.r_z,
        topology=Topology.MSI,
    )
    return params.replace(circ_power=mean_fields(cfg, params).i_plus)


def _phase(r, phi):
    # e^{i alpha} = Theta |1 - R Theta^2| / (1 - R Theta^2), Theta^2 = e^{i phi}
    theta = cmath.exp(0.5j * phi)
    den = 1 - r * theta**2
    return theta * abs(den) / den


def mean_fields(cfg, params):
    """Mean amplitudes E_+, E_- and powers for a pump through the PRM only.

    ``i_out`` is the power leaving the signal port, 2 gamma_s tau |E_-|^2
    in power units.
    """
    hw = hbar * cfg.omega0
    a_p = cfg.pump_amplitude
    g_w = complex(params.gamma_w, -params.delta_w)
    g_s = complex(params.gamma_s, -params.delta_s)
    if params.topology is Topology.MSI:
        t_z = math.sqrt(1 - cfg.r_z**2)
        tau = cfg.tau_sagnac
        r_eff = cfg.r_w * cmath.exp(1j * cfg.phi_w) * complex(cfg.r_z, t_z)
        coupling = cfg.delta_arm * cfg.r_z / complex(cfg.r_z, t_z)  # d
        den = g_w * g_s + abs(coupling) ** 2
        if abs(den) <= SINGULAR_GUARD * abs(g_w * g_s):
            raise SingularityError("Gamma_s Gamma_w + |d|^2 vanishes")
        source = 1j * cmath.exp(0.5j * cfg.phi_w) * math.sqrt(1 - cfg.r_w**2) * a_p / (tau * r_eff)
        e_plus = source * g_s / den
        e_minus = 1j * coupling.conjugate() * e_plus / g_s
    else:
        tau = cfg.tau
        delta = cfg.delta_arm
        den = g_s * g_w + delta**2
        if abs(den) <= SINGULAR_GUARD * max(abs(g_s * g_w), delta**2):
            raise SingularityError("Gamma_s Gamma_w + delta^2 vanishes")
        pref = math.sqrt(params.gamma_w / tau) * a_p * _phase(cfg.r_w, cfg.phi_w) / den
        e_plus = pref * g_s
        e_minus = pref * 1j * delta
    i_plus = hw * abs(e_plus) ** 2
    i_minus = hw * abs(e_minus) ** 2
    return MeanFields(
        e_plus=complex(e_plus),
        e_minus=complex(e_minus),
        i_plus=i_plus,
        i_minus=i_minus,
        i_out=2 * params.gamma_s * tau * i_minus,
    )


def output_power(params):
    """Signal-port power implied by ``params`` alone.

    Uses |E_-|^2 = |xi|^2 |E_+|^2 with the circulating power I_+ of
    ``params`` and the same output coupling as :func:`mean_fields`.
    """
    delta = params.r_z * params.delta_arm
    xi_sq = delta**2 / (params.gamma_s**2 + params.delta_s**2)
    return 2 * params.gamma_s * params.tau * xi_sq * params.circ_power


PHYSICAL_KEYS = ("t_arm", "r_w", "r_s", "phi_w_rad", "phi_s_rad", "recycling_length_m", "pump_power_w")


def physical_config(doc):
    """:class:`PhysicalConfig` from a parsed config mapping.

    Uses the physical keys plus ``arm_length_m``, ``mass_kg``, ``delta_hz``
    (or rad/s with ``frequencies_are_angular``), optional ``rz``,
    ``membrane_distance_m`` and ``wavelength_nm``.
    """
    required = PHYSICAL_KEYS + ("arm_length_m", "mass_kg", "delta_hz")
    for key in required:
        if key not in doc:
            raise ConfigError(key, "required key is missing")
    scale = 1.0 if _flag(doc, "frequencies_are_angular") else TWO_PI
    topology = topology_from(doc)
    r_z = _number(doc, "rz") if "rz" in doc else 1.0
    if topology is Topology.MSI and r_z >= 1.0:
        raise ConfigError("rz", "MSI topology requires rz < 1")
    if topology is not Topology.MSI and r_z != 1.0:
        raise ConfigError("rz", f"{topology.value} topology requires rz = 1")
    return PhysicalConfig(
        t_arm=_number(doc, "t_arm"),
        r_w=_number(doc, "r_w"),
        r_s=_number(doc, "r_s"),
        phi_w=_number(doc, "phi_w_rad"),
        phi_s=_number(doc, "phi_s_rad"),
        arm_length=_number(doc, "arm_length_m"),
        recycling_length=_number(doc, "recycling_length_m"),
        pump_power=_number(doc, "pump_power_w"),
        omega0=laser_omega(doc),
        delta_arm=scale * _number(doc, "delta_hz"),
        mass=_number(doc, "mass_kg"),
        r_z=r_z,
        membrane_distance=_number(doc, "membrane_distance_m") if "membrane_distance_m" in doc else 0.0,
    )


def mode_params_from_physical(cfg, topology):
    if Topology(topology) is Topology.MSI:
        return msi_mode_params(cfg)
    return aligo_mode_params(cfg)
