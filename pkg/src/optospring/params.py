"""Interferometer mode parameters, presets and the flat config format.

All frequency-like fields of :class:`ModeParams` are angular (rad/s).  The
config format and the presets quote ordinary frequencies in Hz; conversion
(factor 2*pi) happens only at that boundary.  Set
``frequencies_are_angular = true`` in a config to read the ``*_hz`` keys as
rad/s instead.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Mapping
from pathlib import Path

from scipy.constants import c as SPEED_OF_LIGHT

from optospring.errors import ConfigError

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

TWO_PI = 2.0 * math.pi
DEFAULT_WAVELENGTH_NM = 1064.0


def hz_to_rad(f):
    return TWO_PI * f


def rad_to_hz(w):
    return w / TWO_PI


def wavelength_to_omega(wavelength_nm):
    return TWO_PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)


class Topology(str, enum.Enum):
    ALIGO = "aligo"
    MICHELSON = "michelson"
    MSI = "msi"


@dataclasses.dataclass(frozen=True)
class ModeParams:
    """Six-parameter partial-mode model plus the hardware scalars it needs.

    Attributes
    ----------
    gamma_w, gamma_s : float
        Decay rates of the symmetric (power-recycled) and antisymmetric
        (signal-recycled) partial modes [rad/s].
    delta_w, delta_s : float
        Detunings of the two partial modes [rad/s]. Sign is kept as given.
    delta_arm : float
        Arm detuning delta [rad/s]. For MSI this is the physical value; the
        R_z scaling is applied in :func:`optospring.dynamics.derive_coefficients`.
    mass : float
        Mirror (aLIGO) or membrane (MSI) mass [kg].
    arm_length : float
        L [m].
    circ_power : float
        Power circulating in the symmetric mode, I_+ [W].
    omega0 : float
        Laser angular frequency [rad/s].
    r_z : float
        Amplitude reflectivity of the middle membrane; 1 for aLIGO/Michelson.
    topology : Topology
    """

    gamma_w: float
    gamma_s: float
    delta_w: float
    delta_s: float
    delta_arm: float
    mass: float
    arm_length: float
    circ_power: float
    omega0: float = wavelength_to_omega(DEFAULT_WAVELENGTH_NM)
    r_z: float = 1.0
    topology: Topology = Topology.ALIGO

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        for name in dataclasses.fields(self):
            if name.name == "topology":
                continue
            value = getattr(self, name.name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(name.name, f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(name.name, "must be finite")
            object.__setattr__(self, name.name, float(value))
        for name in ("gamma_w", "gamma_s", "mass", "arm_length", "omega0"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be > 0")
        if self.circ_power < 0:
            raise ConfigError("circ_power", "must be >= 0")
        if not 0.0 < self.r_z <= 1.0:
            raise ConfigError("r_z", "must lie in (0, 1]")
        if self.topology is Topology.MSI and self.r_z >= 1.0:
            raise ConfigError("r_z", "MSI topology requires r_z < 1 (use aligo for r_z = 1)")
        if self.topology is not Topology.MSI and self.r_z != 1.0:
            raise ConfigError("r_z", f"{self.topology.value} topology requires r_z = 1")

    @property
    def reduced_mass(self):
        """mu = m/2 for two moving mirrors per arm, m for the MSI membrane."""
        return self.mass if self.topology is Topology.MSI else 0.5 * self.mass

    @property
    def wavenumber(self):
        return self.omega0 / SPEED_OF_LIGHT

    @property
    def tau(self):
        """Single-pass arm time L/c [s]."""
        return self.arm_length / SPEED_OF_LIGHT

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


# --- presets -----------------------------------------------------------------

# Values in Hz / SI exactly as tabulated. "-equal" variants use the bracketed
# entries (equal decay rates and the matching arm detuning).
_PRESET_TABLE = {
    "aligo": dict(
        topology="aligo", gamma_w_hz=1.5, gamma_s_hz=0.3, delta_w_hz=-23.0,
        delta_s_hz=42.4, delta_hz=1.51, mass_kg=40.0, arm_length_m=4000.0,
        circulating_power_w=24e3,
    ),
    "aligo-equal": dict(
        topology="aligo", gamma_w_hz=3.0, gamma_s_hz=3.0, delta_w_hz=-23.0,
        delta_s_hz=42.4, delta_hz=4.6, mass_kg=40.0, arm_length_m=4000.0,
        circulating_power_w=24e3,
    ),
    "msi": dict(
        topology="msi", gamma_w_hz=5e3, gamma_s_hz=1e3, delta_w_hz=-77.2e3,
        delta_s_hz=141.0e3, delta_hz=5e3, mass_kg=1e-10, arm_length_m=0.087,
        circulating_power_w=0.318, rz=math.sqrt(0.17),
    ),
    "msi-equal": dict(
        topology="msi", gamma_w_hz=10e3, gamma_s_hz=10e3, delta_w_hz=-77.2e3,
        delta_s_hz=141.0e3, delta_hz=15e3, mass_kg=1e-10, arm_length_m=0.087,
        circulating_power_w=0.318, rz=math.sqrt(0.17),
    ),
}

PRESET_NAMES = tuple(_PRESET_TABLE)


def preset_table(name):
    """Raw tabulated values (Hz, SI) for preset ``name``."""
    try:
        return dict(_PRESET_TABLE[name])
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None


def preset(name):
    """Return the :class:`ModeParams` for one of :data:`PRESET_NAMES`."""
    return load_config(preset_table(name))


# --- config format -----------------------------------------------------------

MODE_KEYS = (
    "gamma_w_hz", "gamma_s_hz", "delta_w_hz", "delta_s_hz", "delta_hz",
    "mass_kg", "arm_length_m", "circulating_power_w",
)
_FREQ_KEYS = {
    "gamma_w_hz": "gamma_w",
    "gamma_s_hz": "gamma_s",
    "delta_w_hz": "delta_w",
    "delta_s_hz": "delta_s",
    "delta_hz": "delta_arm",
}
_PLAIN_KEYS = {
    "mass_kg": "mass",
    "arm_length_m": "arm_length",
    "circulating_power_w": "circ_power",
    "rz": "r_z",
}
_FIELD_TO_KEY = {**{v: k for k, v in _FREQ_KEYS.items()}, **{v: k for k, v in _PLAIN_KEYS.items()},
                 "omega0": "wavelength_nm"}


def parse_config_text(text):
    """Parse the flat ``key = value`` document into a dict."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"malformed config: {exc}") from None
    for key, value in doc.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(key, "config must be flat key/value pairs")
    return doc


def _number(doc, key):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                pass
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def _flag(doc, key, default=False):
    if key not in doc:
        return default
    value = doc[key]
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise ConfigError(key, f"expected a boolean, got {value!r}")


def topology_from(doc):
    raw = doc.get("topology", "aligo")
    try:
        return Topology(str(raw).lower())
    except ValueError:
        raise ConfigError("topology", f"unknown topology {raw!r}") from None


def laser_omega(doc):
    """Laser angular frequency from ``omega0_rad_s`` or ``wavelength_nm``."""
    if "omega0_rad_s" in doc:
        value = _number(doc, "omega0_rad_s")
        if value <= 0:
            raise ConfigError("omega0_rad_s", "must be > 0")
        return value
    wavelength = _number(doc, "wavelength_nm") if "wavelength_nm" in doc else DEFAULT_WAVELENGTH_NM
    if wavelength <= 0:
        raise ConfigError("wavelength_nm", "must be > 0")
    return wavelength_to_omega(wavelength)


def load_config(source):
    """Build :class:`ModeParams` from a config document.

    Parameters
    ----------
    source : str or Mapping
        TOML text with flat keys, or an already-parsed mapping.

    Raises
    ------
    ConfigError
        Missing key, non-numeric value or violated invariant. ``key`` on the
        exception is the config key, e.g. ``"mass_kg"``.
    """
    doc = parse_config_text(source) if isinstance(source, str) else dict(source)
    missing = [k for k in MODE_KEYS if k not in doc]
    if missing:
        raise ConfigError(missing[0], "required key is missing")
    topology = topology_from(doc)
    angular = _flag(doc, "frequencies_are_angular")
    scale = 1.0 if angular else TWO_PI

    fields = {field: scale * _number(doc, key) for key, field in _FREQ_KEYS.items()}
    for key, field in _PLAIN_KEYS.items():
        if key in doc:
            fields[field] = _number(doc, key)
    if "r_z" not in fields:
        fields["r_z"] = 1.0
    fields["omega0"] = laser_omega(doc)
    try:
        return ModeParams(topology=topology, **fields)
    except ConfigError as exc:
        key = _FIELD_TO_KEY.get(exc.key, exc.key)
        raise ConfigError(key, str(exc).split(": ", 1)[1]) from None


def read_config(path):
    return load_config(Path(path).read_text())


def dump_config(params):
    """Serialise ``params`` to the config format; reloading is exact."""
    lines = [
        f'topology = "{params.topology.value}"',
        "frequencies_are_angular = true",
    ]
    for key, field in _FREQ_KEYS.items():
        lines.append(f"{key} = {getattr(params, field)!r}")
    for key, field in _PLAIN_KEYS.items():
        lines.append(f"{key} = {getattr(params, field)!r}")
    lines.append(f"omega0_rad_s = {params.omega0!r}")
    return "\n".join(lines) + "\n"


def describe(params):
    """User-facing echo of ``params`` with frequencies in Hz."""
    return {
        "topology": params.topology.value,
        "gamma_w_hz": rad_to_hz(params.gamma_w),
        "gamma_s_hz": rad_to_hz(params.gamma_s),
        "delta_w_hz": rad_to_hz(params.delta_w),
        "delta_s_hz": rad_to_hz(params.delta_s),
        "delta_hz": rad_to_hz(params.delta_arm),
        "mass_kg": params.mass,
        "arm_length_m": params.arm_length,
        "circulating_power_w": params.circ_power,
        "wavelength_nm": TWO_PI * SPEED_OF_LIGHT / params.omega0 * 1e9,
        "rz": params.r_z,
    }
