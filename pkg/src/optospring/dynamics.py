"""Coupled-mode coefficients, the degree-6 characteristic polynomial and the
mechanical susceptibility of the antisymmetric mode.

Conventions
-----------
* Partial-mode complex rates are ``G_w = gamma_w - i delta_w`` and
  ``G_s = gamma_s - i delta_s``.
* The normal-mode eigenvalue ``lambda_+`` is paired with the symmetric (w)
  mode and ``lambda_-`` with the antisymmetric (s) mode; at zero arm
  detuning ``lambda_+ = -G_w`` and ``lambda_- = -G_s``.
* For the Michelson-Sagnac topology the arm detuning enters as
  ``r_z * delta`` and the pump strength as ``r_z**2 * J_+``; the reduced
  mass is the membrane mass.
"""

from __future__ import annotations

import dataclasses
import io

import numpy as np
from numpy.polynomial import polynomial as npoly

from optospring.errors import (
    BranchCutError,
    DegenerateModeError,
    InternalConsistencyError,
)

SINGULAR_GUARD = 1e-12
REALNESS_TOL = 1e-8
SUSCEPTIBILITY_FLOOR = 1e-30


@dataclasses.dataclass(frozen=True)
class DerivedCoefficients:
    """Every intermediate symbol of the normal-mode reduction.

    Complex quantities are Python ``complex``; rates are in rad/s.
    ``i1_alpha1`` and ``i2_alpha2`` hold the products I*alpha, which stay
    finite when alpha itself is 0/0 (e.g. psi = 0 at zero arm detuning).
    """

    gamma_plus_cap: complex
    gamma_minus_cap: complex
    big_delta: complex
    kappa: complex
    xi: complex
    d: complex
    lambda_plus: complex
    lambda_minus: complex
    tg_w: float
    tg_s: float
    td_w: float
    td_s: float
    j_plus: float
    phi_coef: complex
    psi_coef: complex
    i1: float
    i2: float
    alpha1: float
    alpha2: float
    i1_alpha1: float
    i2_alpha2: float
    delta_eff: float

    @property
    def gamma_w(self):
        """Bare symmetric-mode decay rate, recovered from Gamma_+ + Gamma_-."""
        return (self.gamma_plus_cap + self.gamma_minus_cap).real

    @property
    def gamma_s(self):
        return (self.gamma_plus_cap - self.gamma_minus_cap).real

    @property
    def gamma_w_cap(self):
        return self.gamma_plus_cap + self.gamma_minus_cap

    @property
    def gamma_s_cap(self):
        return self.gamma_plus_cap - self.gamma_minus_cap

    def summary(self):
        """JSON-friendly dict (complex values split into [re, im])."""
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


def _ratio(num, den):
    # alpha = num/den, with the 0/0 limit taken as 0
    if den != 0.0:
        return num / den
    return 0.0 if num == 0.0 else float("inf") * np.sign(num)


def pump_strength(params):
    """J_+ = k I_+ / (L mu), scaled by r_z**2 for the MSI topology [s^-3]."""
    return params.r_z**2 * params.wavenumber * params.circ_power / (params.arm_length * params.reduced_mass)


def derive_coefficients(params):
    """Compute :class:`DerivedCoefficients` for ``params``.

    Raises
    ------
    DegenerateModeError
        If Gamma_- vanishes (identical partial modes), so Delta is undefined.
    BranchCutError
        If 1 + Delta^2 lies on the negative real axis.
    """
    delta = params.r_z * params.delta_arm
    j_plus = pump_strength(params)

    g_w = complex(params.gamma_w, -params.delta_w)
    g_s = complex(params.gamma_s, -params.delta_s)
    g_plus = 0.5 * (g_w + g_s)
    g_minus = 0.5 * (g_w - g_s)
    if abs(g_minus) <= SINGULAR_GUARD * abs(g_plus):
        raise DegenerateModeError("Gamma_- = 0: symmetric and antisymmetric modes are identical")

    big_delta = 1j * delta / g_minus
    radicand = 1.0 + big_delta**2
    if radicand.real < 0 and abs(radicand.imag) <= SINGULAR_GUARD * abs(radicand):
        raise BranchCutError(f"1 + Delta^2 = {radicand} is on the branch cut of sqrt")
    root = np.sqrt(radicand)

    lam_plus = -(g_plus + g_minus * root)
    lam_minus = -(g_plus - g_minus * root)
    kappa = big_delta / (1.0 + root)
    xi = 1j * delta / g_s
    d = 1.0 + kappa**2
    d_abs2 = abs(d) ** 2
    phi = (1 + xi.conjugate() * kappa) * (1 + kappa * xi) * d.conjugate()
    psi = (xi.conjugate() - kappa) * (xi - kappa) * d.conjugate()

    tg_w, td_w = -lam_plus.real, lam_plus.imag
    tg_s, td_s = -lam_minus.real, lam_minus.imag

    scale = 2.0 * j_plus / d_abs2
    i1 = scale * td_s * phi.real
    i2 = scale * td_w * psi.real
    return DerivedCoefficients(
        gamma_plus_cap=complex(g_plus),
        gamma_minus_cap=complex(g_minus),
        big_delta=complex(big_delta),
        kappa=complex(kappa),
        xi=complex(xi),
        d=complex(d),
        lambda_plus=complex(lam_plus),
        lambda_minus=complex(lam_minus),
        tg_w=float(tg_w),
        tg_s=float(tg_s),
        td_w=float(td_w),
        td_s=float(td_s),
        j_plus=float(j_plus),
        phi_coef=complex(phi),
        psi_coef=complex(psi),
        i1=float(i1),
        i2=float(i2),
        alpha1=float(_ratio(phi.imag, td_s * phi.real)),
        alpha2=float(_ratio(psi.imag, td_w * psi.real)),
        i1_alpha1=float(scale * phi.imag),
        i2_alpha2=float(scale * psi.imag),
        delta_eff=float(delta),
    )


@dataclasses.dataclass(frozen=True)
class CharPoly:
    """Monic real polynomial, coefficients lowest order first (c0 .. c6)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be a finite 1-d array")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return npoly.polyval(lam, self.coeffs)

    @classmethod
    def from_roots(cls, roots):
        # caller supplies a conjugate-closed root set
        return cls(np.real(npoly.polyfromroots(roots)))


def _spring_numerator(i_coef, i_alpha, tg):
    # I [1 + alpha (lam + tg)]  ->  (I + I alpha tg) + (I alpha) lam
    return np.array([i_coef + i_alpha * tg, i_alpha])


def polynomial_pieces(coefs):
    """Return (q_s, q_w, n_1, n_2) as low-first coefficient arrays.

    q_s, q_w are the optical quadratics built from the complex normal-mode
    eigenvalues, n_1, n_2 the spring numerators I_k [1 + alpha_k (lam + tg)].
    """
    q_s = npoly.polyfromroots([coefs.lambda_minus, coefs.lambda_minus.conjugate()])
    q_w = npoly.polyfromroots([coefs.lambda_plus, coefs.lambda_plus.conjugate()])
    n_1 = _spring_numerator(coefs.i1, coefs.i1_alpha1, coefs.tg_s)
    n_2 = _spring_numerator(coefs.i2, coefs.i2_alpha2, coefs.tg_w)
    return q_s, q_w, n_1, n_2


def characteristic_polynomial(coefs):
    """Expand lam^2 q_s q_w + n_1 q_w + n_2 q_s into a monic sextic.

    Raises
    ------
    InternalConsistencyError
        If any coefficient carries an imaginary residue above 1e-8 relative.
    """
    q_s, q_w, n_1, n_2 = polynomial_pieces(coefs)
    full = npoly.polyadd(
        npoly.polyadd(npoly.polymul([0, 0, 1], npoly.polymul(q_s, q_w)), npoly.polymul(n_1, q_w)),
        npoly.polymul(n_2, q_s),
    )
    full = np.asarray(full, dtype=complex)
    mag = np.maximum(np.abs(full), np.finfo(float).tiny)
    if np.any(np.abs(full.imag) > REALNESS_TOL * mag):
        raise InternalConsistencyError(f"characteristic polynomial is not real: {full}")
    c = full.real
    if len(c) != 7 or c[-1] == 0:
        raise InternalConsistencyError("characteristic polynomial is not of degree 6")
    return CharPoly(c / c[-1])


def zero_order_factors(coefs):
    """Low-first coefficients of D1^(0) (quartic) and D2^(0) (quadratic)."""
    q_s, q_w, n_1, _ = polynomial_pieces(coefs)
    d1 = npoly.polyadd(npoly.polymul([0, 0, 1], q_s), n_1).real
    return d1, q_w.real


def dynamic_stiffness(coefs, lam):
    """Q(lam) = lam^2 + n_1/q_s + n_2/q_w, vectorised over ``lam``."""
    q_s, q_w, n_1, n_2 = polynomial_pieces(coefs)
    lam = np.asarray(lam, dtype=complex)
    return (
        lam**2
        + npoly.polyval(lam, n_1.real) / npoly.polyval(lam, q_s.real)
        + npoly.polyval(lam, n_2.real) / npoly.polyval(lam, q_w.real)
    )


@dataclasses.dataclass(frozen=True)
class SusceptibilitySample:
    omega: float
    chi: complex
    chi_abs: float


@dataclasses.dataclass(frozen=True)
class SusceptibilityCurve:
    """chi(Omega) on a grid; ``singular`` marks points where |Q| vanished."""

    omega: np.ndarray
    chi: np.ndarray
    singular: np.ndarray

    @property
    def chi_abs(self):
        return np.abs(self.chi)

    def __len__(self):
        return len(self.omega)

    def __iter__(self):
        for w, x in zip(self.omega, self.chi):
            yield SusceptibilitySample(float(w), complex(x), abs(x))

    def to_csv(self):
        buf = io.StringIO()
        buf.write("omega_rad_s,chi_re,chi_im,chi_abs\n")
        for w, x in zip(self.omega, self.chi):
            buf.write(f"{float(w)!r},{float(x.real)!r},{float(x.imag)!r},{float(abs(x))!r}\n")
        return buf.getvalue()


def susceptibility(coefs, params, omega_grid):
    """Mechanical susceptibility chi(Omega) = 1 / (mu Q(-i Omega)) [m/N].

    Parameters
    ----------
    omega_grid : array_like
        Strictly increasing positive spectral frequencies [rad/s].
    """
    omega = np.asarray(omega_grid, dtype=float)
    if omega.ndim != 1 or omega.size == 0:
        raise ValueError("omega_grid must be a non-empty 1-d array")
    if np.any(omega <= 0) or np.any(np.diff(omega) <= 0):
        raise ValueError("omega_grid must be strictly increasing and positive")
    q = dynamic_stiffness(coefs, -1j * omega)
    singular = ~(np.abs(q) >= SUSCEPTIBILITY_FLOOR)
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = np.where(singular, complex("nan+nanj"), 1.0 / (params.reduced_mass * q))
    return SusceptibilityCurve(omega, chi, singular)


def local_maxima(values):
    """Indices of strict interior local maxima of a 1-d array."""
    v = np.asarray(values)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return np.flatnonzero(inner) + 1
