"""Stability of the characteristic sextic.

Three independent routes are provided: numeric roots (:func:`solve_roots`),
the Routh-Hurwitz tableau (:func:`routh_hurwitz`) and the perturbative
iteration (:func:`zero_order_roots`, :func:`first_order_roots`).  The
minimal-detuning estimate and a bisection for the true boundary sit on top.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq, linear_sum_assignment

from optospring.dynamics import (
    SINGULAR_GUARD,
    CharPoly,
    characteristic_polynomial,
    derive_coefficients,
    zero_order_factors,
)
from optospring.errors import (
    BracketError,
    DoubleResonanceError,
    NumericFailure,
    OptoSpringError,
    OvercriticalPumpError,
    PerturbationError,
    SingularityError,
    TuningError,
)

MAX_ITERATIONS = 500
RESIDUAL_TOL = 1e-8
# |Re| below this fraction of the root scale is reported as exactly 0
MARGINAL_TOL = 1e-12
P_FLOOR = 1e-6
RH_EPS = 1e-30


# --- numeric roots -----------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class RootReport:
    roots: np.ndarray
    residuals: np.ndarray
    max_real: float
    stable: bool
    rh_stable: bool

    def to_json(self):
        return {
            "roots": [{"re": float(z.real), "im": float(z.imag)} for z in self.roots],
            "residuals": [float(r) for r in self.residuals],
            "max_real": float(self.max_real),
            "stable": bool(self.stable),
            "rh_stable": bool(self.rh_stable),
        }


def _scale(c):
    # Fujiwara-type bound on the root modulus of a monic polynomial
    n = len(c) - 1
    bound = max((abs(c[k]) ** (1.0 / (n - k)) for k in range(n) if c[k] != 0), default=1.0)
    return bound if bound > 0 else 1.0


def normalized_residual(c, lam):
    """|P(lam)| / (max(1, |lam|)^n max|c_i|) for low-first coefficients ``c``."""
    n = len(c) - 1
    return abs(npoly.polyval(lam, c)) / (max(1.0, abs(lam)) ** n * np.max(np.abs(c)))


def _polish(a, z, budget):
    """Newton-refine root ``z`` of the low-first polynomial ``a``."""
    da = npoly.polyder(a)
    best, best_res = z, abs(npoly.polyval(z, a))
    used = 0
    while used < budget and best_res > 0:
        used += 1
        deriv = npoly.polyval(z, da)
        if deriv == 0:
            break
        z_new = z - npoly.polyval(z, a) / deriv
        res = abs(npoly.polyval(z_new, a))
        if res >= best_res:
            break
        z, best, best_res = z_new, z_new, res
    return best, used


def _symmetrize(roots, scale):
    """Force exact conjugate pairing; real roots get zero imaginary part."""
    roots = np.asarray(roots, dtype=complex).copy()
    tol = 1e-8 * scale
    real_idx = [i for i, z in enumerate(roots) if abs(z.imag) <= tol]
    upper = [i for i, z in enumerate(roots) if z.imag > tol]
    lower = [i for i, z in enumerate(roots) if z.imag < -tol]
    if len(upper) != len(lower):
        return roots
    out = roots.copy()
    for i in real_idx:
        out[i] = complex(roots[i].real, 0.0)
    free = list(lower)
    for i in upper:
        j = min(free, key=lambda k: abs(roots[k] - roots[i].conjugate()))
        free.remove(j)
        avg = 0.5 * (roots[i] + roots[j].conjugate())
        out[i], out[j] = avg, avg.conjugate()
    return out


def _sort_roots(roots):
    order = sorted(range(len(roots)), key=lambda k: (-roots[k].real, roots[k].imag))
    return np.asarray([roots[k] for k in order], dtype=complex)


def solve_roots(poly):
    """All roots of ``poly`` with residual and stability report.

    Roots come from the companion matrix of the scaled polynomial
    (lam = s u with s a root-modulus bound) and are Newton-polished.

    Raises
    ------
    NumericFailure
        If polishing exhausts :data:`MAX_ITERATIONS` without meeting the
        residual bound.
    """
    c = np.asarray(poly.coeffs if isinstance(poly, CharPoly) else poly, dtype=float)
    if c[-1] == 0:
        raise ValueError("leading coefficient must be non-zero")
    c = c / c[-1]
    n = len(c) - 1
    s = _scale(c)
    a = c / s ** (n - np.arange(n + 1))  # monic polynomial in u = lam / s

    u = np.roots(a[::-1])
    polished, used = [], 0
    for z in u:
        z, k = _polish(a, complex(z), MAX_ITERATIONS - used)
        used += k
        polished.append(z)
    roots = _symmetrize(np.asarray(polished) * s, s)
    mag = max(1.0, float(np.max(np.abs(roots))))
    roots = np.asarray(
        [complex(0.0, z.imag) if abs(z.real) <= MARGINAL_TOL * mag else z for z in roots]
    )
    roots = _sort_roots(roots)
    residuals = np.asarray([normalized_residual(c, z) for z in roots])
    if np.any(residuals >= RESIDUAL_TOL):
        worst = int(np.argmax(residuals))
        raise NumericFailure(
            f"root refinement failed after {used} iterations (residual {residuals[worst]:.3g})",
            best=roots,
        )
    max_real = float(np.max(roots.real))
    return RootReport(
        roots=roots,
        residuals=residuals,
        max_real=max_real,
        stable=max_real < 0.0,
        rh_stable=routh_hurwitz(c).stable,
    )


# --- Routh-Hurwitz -------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class RouthResult:
    stable: bool
    first_failing_row: int | None
    degenerate: bool
    first_column: tuple

    def __iter__(self):
        # allows ``ok, row = routh_hurwitz(p)``
        yield self.stable
        yield self.first_failing_row


def routh_hurwitz(poly):
    """Routh-Hurwitz test on a real polynomial.

    Stable iff every entry of the first Routh column is strictly positive.
    A zero pivot is replaced by 1e-30 * max|c| and flagged ``degenerate``;
    an all-zero row (roots symmetric about the origin) gives an unstable /
    marginal verdict with the flag set.
    """
    c = np.asarray(poly.coeffs if isinstance(poly, CharPoly) else poly, dtype=float)
    if c[-1] < 0:
        c = -c
    if c[-1] == 0:
        raise ValueError("leading coefficient must be non-zero")
    n = len(c) - 1
    # positive rescaling of lam keeps the half-plane and evens out magnitudes
    s = _scale(c / c[-1])
    a = (c / c[-1]) / s ** (n - np.arange(n + 1))
    hi = a[::-1]  # highest power first
    eps = RH_EPS * np.max(np.abs(hi))

    width = n // 2 + 1
    rows = [np.zeros(width), np.zeros(width)]
    rows[0][: len(hi[0::2])] = hi[0::2]
    rows[1][: len(hi[1::2])] = hi[1::2]
    degenerate = False
    for _ in range(n - 1):
        prev, cur = rows[-2], rows[-1]
        if np.all(cur == 0):
            degenerate = True
            first = tuple(float(r[0]) for r in rows)
            return RouthResult(False, len(rows) - 1, True, first)
        if cur[0] == 0 or abs(cur[0]) < eps:
            degenerate = True
            cur = cur.copy()
            cur[0] = eps
            rows[-1] = cur
        nxt = np.zeros(width)
        for j in range(width - 1):
            nxt[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0]
        rows.append(nxt)
    if rows[-1][0] == 0:
        degenerate = True
        rows[-1] = rows[-1].copy()
        rows[-1][0] = eps
    first = tuple(float(r[0]) for r in rows)
    failing = next((i for i, v in enumerate(first) if not v > 0), None)
    return RouthResult(failing is None, failing, degenerate, first)


# --- perturbative roots ----------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PerturbativeRoots:
    """Zero- and (optionally) first-order iteration of the sextic.

    ``zero_order`` holds lambda_1..6^(0) in the order (1, 2, 3, 4, 5, 6).
    ``first_order`` is (lambda_1^(1), lambda_2^(1)) and ``branches`` all four
    sign combinations of the closed-form first-order solution.
    """

    p: float
    beta1: float
    gamma1: float
    delta1: float
    gamma3: float
    delta3: float
    zero_order: np.ndarray
    b: complex | None = None
    first_order: np.ndarray | None = None
    branches: np.ndarray | None = None

    @property
    def first_order_stable(self):
        if self.first_order is None:
            return None
        return bool(np.max(self.first_order.real) < 0)

    def to_json(self):
        def cl(z):
            return {"re": float(z.real), "im": float(z.imag)}

        out = {
            "p": self.p,
            "beta1": self.beta1,
            "gamma1": self.gamma1,
            "delta1": self.delta1,
            "gamma3": self.gamma3,
            "delta3": self.delta3,
            "zero_order": [cl(z) for z in self.zero_order],
        }
        if self.first_order is not None:
            out["b"] = cl(self.b)
            out["first_order"] = [cl(z) for z in self.first_order]
            out["first_order_stable"] = self.first_order_stable
        return out


def zero_order_p_squared(coefs):
    s = coefs.tg_s**2 + coefs.td_s**2
    # I1 (1 + alpha1 tg_s) written with the I*alpha product
    return 1.0 - 4.0 * (coefs.i1 + coefs.i1_alpha1 * coefs.tg_s) / s**2


def zero_order_roots(coefs):
    """Closed-form roots of D1^(0) = 0 plus the bare roots of D2^(0) = 0.

    These are the small-damping expressions; their error relative to the
    exact quartic roots grows as (tg_s / td_s)^2.

    Raises
    ------
    OvercriticalPumpError
        If p^2 < 0.
    DoubleResonanceError
        If p <= 1e-6.
    """
    p2 = zero_order_p_squared(coefs)
    # a rounding-level negative p^2 is the double resonance, not overcritical
    if p2 < -(P_FLOOR**2):
        raise OvercriticalPumpError(f"p^2 = {p2:.6g} < 0: overcritical optical spring")
    p = math.sqrt(max(p2, 0.0))
    if p <= P_FLOOR:
        raise DoubleResonanceError(f"p = {p:.3g}: double-resonance point, closed forms divide by p")
    tg, td = coefs.tg_s, coefs.td_s
    s = tg**2 + td**2
    beta1 = coefs.alpha1 * s / (4.0 * (1.0 + coefs.alpha1 * tg))
    gamma1 = (tg * (1 - p) - (1 - p**2) * beta1) / (2 * p)
    gamma3 = -(tg * (1 + p) - (1 - p**2) * beta1) / (2 * p)
    delta1 = math.sqrt(s * (1 - p) / 2)
    delta3 = math.sqrt(s * (1 + p) / 2)
    zero = np.array(
        [
            complex(gamma1, delta1),
            complex(gamma1, -delta1),
            complex(gamma3, delta3),
            complex(gamma3, -delta3),
            complex(-coefs.tg_w, coefs.td_w),
            complex(-coefs.tg_w, -coefs.td_w),
        ]
    )
    return PerturbativeRoots(p, beta1, gamma1, delta1, gamma3, delta3, zero)


def coupling_constant(coefs, zero):
    """b = -D^(1) / ((lam - gamma3)^2 + delta3^2) at lam = lambda_1^(0)."""
    lam = zero.zero_order[0]
    den = (lam - zero.gamma3) ** 2 + zero.delta3**2
    if abs(den) <= SINGULAR_GUARD * max(zero.delta3**2, abs(lam) ** 2):
        raise SingularityError("(lambda_1 - gamma_3)^2 + delta_3^2 vanishes")
    q_s = (lam + coefs.tg_s) ** 2 + coefs.td_s**2
    spring = coefs.i2 + coefs.i2_alpha2 * (lam + coefs.tg_w)
    return complex(-q_s * spring / den)


def first_order_roots(coefs, zero):
    """Complete ``zero`` with the first-order roots lambda_1,2^(1).

    All four sign branches of the closed form are kept in ``branches``; the
    one nearest lambda_1^(0) is lambda_1^(1) and lambda_2^(1) is its
    conjugate.
    """
    b = coupling_constant(coefs, zero)
    if b != 0 and abs(b.imag) > 0.1 * abs(b.real):
        warnings.warn(f"Im b is not small compared with Re b (b = {b:.4g})", RuntimeWarning, stacklevel=2)
    g1, d1, tgw = zero.gamma1, zero.delta1, coefs.tg_w
    centre = 0.5 * (g1 - tgw)
    base = d1**2 - (0.5 * (g1 + tgw)) ** 2
    inner = np.sqrt(complex(b - d1**2 * (g1 + tgw) ** 2))
    branches = []
    for s_inner in (1, -1):
        outer = np.sqrt(complex(base + s_inner * inner))
        for s_outer in (1, -1):
            branches.append(centre + s_outer * 1j * outer)
    branches = np.asarray(branches, dtype=complex)
    lam1 = branches[np.argmin(np.abs(branches - zero.zero_order[0]))]
    return dataclasses.replace(
        zero, b=b, first_order=np.array([lam1, lam1.conjugate()]), branches=branches
    )


def perturbative_roots(coefs):
    return first_order_roots(coefs, zero_order_roots(coefs))


# --- detuning bound and numeric boundary -----------------------------------------


def _detuning_bound_sq(p, tg_s, tg_w):
    q = math.sqrt(1 - p)
    shape = ((math.sqrt(2) + q) / (2 * math.sqrt(2) + q)) ** 2
    return (tg_s * (1 - p) / (2 * p) + tg_w) ** 2 * shape * 4 * math.sqrt(2) * p / (q * (1 + p) ** 2)


def min_detuning(coefs, params=None, refine=False):
    """Estimated minimal arm detuning for a stable spring [rad/s].

    The estimate uses the bare decay rates in place of the effective ones.
    With ``refine=True`` (requires ``params``) the bound is iterated to a
    fixed point, recomputing p and the effective rates at the candidate
    detuning.  For the MSI topology the bound on the effective detuning
    r_z*delta is converted back to the physical delta.
    """
    p = math.sqrt(max(zero_order_p_squared(coefs), 0.0))
    if not 0.0 < p < 1.0:
        raise PerturbationError(f"p = {p:.6g} outside (0, 1); bound undefined")
    bound = math.sqrt(_detuning_bound_sq(p, coefs.gamma_s, coefs.gamma_w))
    r_z = 1.0 if params is None else params.r_z
    if refine:
        if params is None:
            raise ValueError("refine=True needs params")
        for _ in range(100):
            c = derive_coefficients(params.replace(delta_arm=bound / r_z))
            p = math.sqrt(max(zero_order_p_squared(c), 0.0))
            if not 0.0 < p < 1.0:
                raise PerturbationError(f"p = {p:.6g} outside (0, 1) during refinement")
            new = math.sqrt(_detuning_bound_sq(p, c.tg_s, c.tg_w))
            if abs(new - bound) <= 1e-12 * bound:
                bound = new
                break
            bound = new
    return bound / r_z


def max_real_part(params):
    return solve_roots(characteristic_polynomial(derive_coefficients(params))).max_real


def stability_boundary(params, delta_range, tune_offset=None, rtol=1e-6):
    """Bisection on the arm detuning for the sign change of max Re(lambda).

    Parameters
    ----------
    delta_range : (float, float)
        Bracket [delta_lo, delta_hi] in rad/s with differing verdicts.
    tune_offset : float, optional
        If given, delta_w is re-tuned at every trial detuning so that the
        effective symmetric-mode detuning equals -delta_1 + tune_offset.
    """
    lo, hi = map(float, delta_range)

    def verdict(delta):
        trial = params.replace(delta_arm=delta)
        if tune_offset is not None:
            trial = tune_delta_w(trial, tune_offset)
        return max_real_part(trial) < 0

    v_lo, v_hi = verdict(lo), verdict(hi)
    if v_lo == v_hi:
        raise BracketError(f"same verdict (stable={v_lo}) at both ends of [{lo}, {hi}]")
    while hi - lo > rtol * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if verdict(mid) == v_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def first_stability_change(params, delta_max, samples=64, rtol=1e-6):
    """Smallest arm detuning in (0, ``delta_max``] where the verdict flips.

    The stable set need not be a half-line (it can be a window), so the
    interval is scanned on ``samples`` equal steps before bisecting the
    first step that changes verdict.
    """
    grid = np.linspace(0.0, float(delta_max), samples + 1)
    first = max_real_part(params.replace(delta_arm=grid[0])) < 0
    for lo, hi in zip(grid[:-1], grid[1:]):
        if (max_real_part(params.replace(delta_arm=hi)) < 0) != first:
            return stability_boundary(params, (lo, hi), rtol=rtol)
    raise BracketError(f"verdict stable={first} throughout [0, {delta_max}]")


def tune_delta_w(params, offset=0.0):
    """Return ``params`` with delta_w adjusted so that the effective
    symmetric-mode detuning equals -delta_1 + ``offset`` [rad/s]."""

    def mismatch(delta_w):
        c = derive_coefficients(params.replace(delta_w=delta_w))
        return c.td_w + zero_order_roots(c).delta1 - offset

    try:
        c0 = derive_coefficients(params)
        start = -zero_order_roots(c0).delta1 + offset
    except OptoSpringError as exc:
        raise TuningError(f"cannot start delta_w tuning ({exc}); set delta_w manually") from exc
    width = 0.05 * max(abs(params.delta_s), abs(start), params.gamma_w)
    lo, hi = start - width, start + width
    try:
        for _ in range(20):
            f_lo, f_hi = mismatch(lo), mismatch(hi)
            if f_lo * f_hi <= 0:
                break
            lo, hi = start - 2 * (start - lo), start + 2 * (hi - start)
        else:
            raise TuningError("no sign change found for delta_w tuning; set delta_w manually")
        delta_w = brentq(mismatch, lo, hi, xtol=1e-12 * abs(start) + 1e-300, rtol=1e-14)
    except (OptoSpringError, ValueError) as exc:
        if isinstance(exc, TuningError):
            raise
        raise TuningError(f"delta_w tuning failed ({exc}); set delta_w manually") from exc
    return params.replace(delta_w=delta_w)


# --- root continuation -------------------------------------------------------------


def continued_spring_root(params, steps=400):
    """Exact root that continues the zero-order unstable pair lambda_1^(0).

    At zero arm detuning the sextic factors exactly into D1^(0) D2^(0), so
    lambda_1 is the upper-half-plane root of the quartic D1^(0) with the
    smaller frequency.  The full root set is then followed in ``steps``
    equal increments of the arm detuning with optimal nearest-neighbour
    matching, and the continued root is returned.
    """
    def roots_at(delta):
        c = characteristic_polynomial(derive_coefficients(params.replace(delta_arm=delta)))
        return np.roots(c.coeffs[::-1])

    d1, _ = zero_order_factors(derive_coefficients(params.replace(delta_arm=0.0)))
    quartic = np.roots(d1[::-1])
    upper = [z for z in quartic if z.imag > 0]
    if not upper:
        raise PerturbationError("D1^(0) has no oscillatory root at zero detuning")
    target = min(upper, key=lambda z: z.imag)

    current = roots_at(0.0)
    idx = int(np.argmin(np.abs(current - target)))
    for delta in np.linspace(0.0, params.delta_arm, steps + 1)[1:]:
        nxt = roots_at(delta)
        rows, cols = linear_sum_assignment(np.abs(current[:, None] - nxt[None, :]))
        idx = int(cols[list(rows).index(idx)])
        current = nxt
    return complex(current[idx])
