"""
Prolate-spheroidal mode functions.

Three ways of producing the angular solution G(κ, η) and the radial
solution F(κ, ξ) of the separated field equations:

1. Closed forms valid for separation constant α = 0
2. Direct integration of the spheroidal ODE from the regular focal endpoint
3. The uniform JWKB approximation: the radial equation in canonical form
   u'' + χ(x) u = 0 (x = √(ξ² − 1)) is mapped onto the comparison equation
   ψ'' + Π(σ) ψ = 0, whose regular solution is a Kummer function

All modes are normalized so that G/√(1−η²) and F/√(ξ²−1) tend to C_α·κ at
the focus, with C_α = e^{−πα/8}√((πα/16) csch(πα/4)) (C₀ = 1/2).
"""

import cmath
import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import gamma as complex_gamma, rgamma

from cavity_config import DEFAULTS
from errors import AccuracyError, DomainError, ModeIntegrationError

logger = logging.getLogger(__name__)

# Accuracy demanded from the optimally truncated asymptotic ₁F₁ series
ASYMPTOTIC_ACCURACY = 1e-10


class ModeKind(Enum):
    ANGULAR_G = "AngularG"
    RADIAL_F = "RadialF"


class ModeMethod(Enum):
    EXACT_ALPHA0 = "ExactAlpha0"
    UNIFORM_JWKB = "UniformJWKB"
    ODE_ORACLE = "OdeOracle"


@dataclass(frozen=True)
class SpheroidalParams:
    """Wavenumber κ and separation constant α of one spheroidal mode."""

    kappa: float
    alpha: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")


@dataclass(frozen=True)
class ModeFunction:
    """
    Evaluable mode function with provenance.

    `reduced` returns G/√(1−η²) (angular) or F/√(ξ²−1) (radial), which is
    bounded at the focal endpoint; calling the mode returns G or F itself.
    """

    params: SpheroidalParams
    kind: ModeKind
    method: ModeMethod
    reduced: Callable
    domain: tuple
    grid: Optional[np.ndarray] = field(default=None, compare=False)
    values: Optional[np.ndarray] = field(default=None, compare=False)

    def __call__(self, coord):
        coord = np.asarray(coord, dtype=float)
        self._check_domain(coord)
        return _endpoint_factor(self.kind, coord) * self.reduced(coord)

    def _check_domain(self, coord):
        lo, hi = self.domain
        if np.any(coord <= lo) or np.any(coord > hi):
            raise DomainError(f"{self.kind.value} evaluated outside ({lo}, {hi}]",
                              context={'method': self.method.value})

    def to_frame(self, coords=None):
        """Tabulate the mode as a DataFrame with columns coordinate, value, method."""
        if coords is None:
            if self.grid is None:
                raise DomainError("no grid stored; pass coordinates to tabulate")
            coords, values = self.grid, self.values
        else:
            coords = np.asarray(coords, dtype=float)
            values = self(coords)
        return pd.DataFrame({
            'coordinate': coords,
            'value': values,
            'method': self.method.value,
        })

    def to_csv(self, path, coords=None):
        """Write the mode table as CSV."""
        self.to_frame(coords).to_csv(path, index=False, float_format="%.17g")
        return path


def _endpoint_factor(kind, coord):
    """√(1−η²) or √(ξ²−1), written as products to keep precision near 1."""
    if kind is ModeKind.ANGULAR_G:
        return np.sqrt((1.0 - coord) * (1.0 + coord))
    return np.sqrt((coord - 1.0) * (coord + 1.0))


def _sinc_ratio(kappa, u):
    """sin(κu)/u including u = 0."""
    return kappa * np.sinc(kappa * u / math.pi)


def focal_normalization(alpha):
    """C_α = e^{−πα/8}√((πα/16) csch(πα/4)), equal to 1/2 at α = 0."""
    y = 0.25 * math.pi * alpha
    ratio = 1.0 - y * y / 6.0 if abs(y) < 1e-4 else y / math.sinh(y)
    return 0.5 * math.exp(-0.125 * math.pi * alpha) * math.sqrt(ratio)


# --- closed forms at α = 0 -------------------------------------------------

def exact_G_alpha0(kappa, eta):
    """
    Angular solution sin[κ(1−η)]/√(1−η²) for α = 0.

    Args:
        kappa: wavenumber κ > 0
        eta: η in (−1, 1), scalar or array

    Returns:
        G(κ, η)
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(np.abs(eta) >= 1.0):
        raise DomainError("eta must lie in the open interval (-1, 1)")
    result = np.sin(kappa * (1.0 - eta)) / np.sqrt((1.0 - eta) * (1.0 + eta))
    return float(result) if result.ndim == 0 else result


def exact_G_alpha0_reduced(kappa, eta):
    """G/√(1−η²) for α = 0; equals κ/2 at η = 1."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= -1.0) or np.any(eta > 1.0):
        raise DomainError("eta must lie in (-1, 1]")
    result = _sinc_ratio(kappa, 1.0 - eta) / (1.0 + eta)
    return float(result) if result.ndim == 0 else result


def exact_F_alpha0(kappa, xi):
    """
    Radial solution sin[κ(ξ−1)]/√(ξ²−1) for α = 0.

    Args:
        kappa: wavenumber κ > 0
        xi: ξ > 1, scalar or array

    Returns:
        F(κ, ξ)
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 1.0):
        raise DomainError("xi must exceed 1")
    result = np.sin(kappa * (xi - 1.0)) / np.sqrt((xi - 1.0) * (xi + 1.0))
    return float(result) if result.ndim == 0 else result


def exact_F_alpha0_reduced(kappa, xi):
    """F/√(ξ²−1) for α = 0; equals κ/2 at ξ = 1."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 1.0):
        raise DomainError("xi must be at least 1")
    result = _sinc_ratio(kappa, xi - 1.0) / (1.0 + xi)
    return float(result) if result.ndim == 0 else result


def exact_mode(params, kind):
    """Wrap the α = 0 closed form as a ModeFunction."""
    if params.alpha != 0.0:
        raise DomainError(f"closed form only exists for alpha = 0, got {params.alpha}")
    if kind is ModeKind.ANGULAR_G:
        reduced = lambda eta: exact_G_alpha0_reduced(params.kappa, eta)
        domain = (-1.0, 1.0)
    else:
        reduced = lambda xi: exact_F_alpha0_reduced(params.kappa, xi)
        domain = (1.0, math.inf)
    return ModeFunction(params, kind, ModeMethod.EXACT_ALPHA0, reduced, domain)


# --- direct ODE integration ------------------------------------------------

def _reduced_rhs(v, y, kappa, alpha):
    # (1−v²) g'' − 4v g' + (ακ + κ²(1−v²) − 2) g = 0, shared by η and ξ
    g, dg = y
    one_minus = (1.0 - v) * (1.0 + v)
    return [dg, (4.0 * v * dg - (alpha * kappa + kappa * kappa * one_minus - 2.0) * g) / one_minus]


def _focal_taylor(kappa, alpha):
    """Value and first two derivatives of the regular solution at v = 1."""
    g0 = focal_normalization(alpha) * kappa
    g1 = (alpha * kappa - 2.0) * g0 / 4.0
    g2 = -(2.0 * kappa * kappa * g0 + (6.0 - alpha * kappa) * g1) / 6.0
    return g0, g1, g2


def integrate_spheroidal_ode(params, kind, grid, rtol=None, atol=None):
    """
    Integrate the spheroidal equation from the regular focal endpoint.

    The angular solution starts just below η = 1 and runs towards −1, the
    radial one starts just above ξ = 1 and runs outwards. Initial data come
    from the Taylor expansion at the regular singular point.

    Args:
        params (SpheroidalParams): κ and α
        kind (ModeKind): angular or radial
        grid: abscissae inside the open domain
        rtol, atol: integrator tolerances (DEFAULTS when omitted)

    Returns:
        ModeFunction: OdeOracle mode with the tabulated grid values
    """
    rtol = rtol or DEFAULTS["ode_rtol"]
    atol = atol or DEFAULTS["ode_atol"]
    grid = np.sort(np.asarray(grid, dtype=float))
    kappa, alpha = params.kappa, params.alpha

    if kind is ModeKind.ANGULAR_G:
        if np.any(np.abs(grid) >= 1.0):
            raise DomainError("angular grid must lie inside (-1, 1)")
        direction, far, domain = -1.0, grid[0], (-1.0, 1.0)
    else:
        if np.any(grid <= 1.0):
            raise DomainError("radial grid must lie above xi = 1")
        direction, far, domain = 1.0, grid[-1], (1.0, grid[-1])

    step = min(1e-5, 1e-3 / kappa)
    g0, g1, g2 = _focal_taylor(kappa, alpha)
    delta = direction * step
    start = 1.0 + delta
    y0 = [g0 + g1 * delta + 0.5 * g2 * delta * delta, g1 + g2 * delta]

    def taylor(v):
        dv = v - 1.0
        return g0 + g1 * dv + 0.5 * g2 * dv * dv

    if direction * (far - start) > 0.0:
        solution = solve_ivp(_reduced_rhs, (start, far), y0, method="DOP853",
                             rtol=rtol, atol=atol, dense_output=True,
                             args=(kappa, alpha))
        if not solution.success:
            raise ModeIntegrationError(
                f"spheroidal ODE failed: {solution.message}",
                abscissa=float(solution.t[-1]),
                context={'kappa': kappa, 'alpha': alpha, 'kind': kind.value})
        dense = solution.sol
    else:
        dense = None

    def reduced(v):
        v = np.asarray(v, dtype=float)
        near = np.abs(v - 1.0) <= step
        out = np.empty_like(v)
        out[near] = taylor(v[near])
        if np.any(~near):
            if dense is None:
                raise DomainError("abscissa outside the integrated range")
            out[~near] = dense(v[~near])[0]
        return out

    values = _endpoint_factor(kind, grid) * reduced(grid)
    logger.debug("integrated %s for kappa=%g alpha=%g over %d points",
                 kind.value, kappa, alpha, grid.size)
    return ModeFunction(params, kind, ModeMethod.ODE_ORACLE, reduced, domain,
                        grid=grid, values=values)


# --- Kummer function -------------------------------------------------------

def _kummer_taylor(a, b, z, tol, maxiter):
    total = 1.0 + 0.0j
    compensation = 0.0j
    term = 1.0 + 0.0j
    radius = abs(z)
    for k in range(maxiter):
        term *= (a + k) / (b + k) * z / (k + 1)
        # Kahan summation
        y = term - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        if term == 0 or (k + 1 > radius and abs(term) <= tol * abs(total)):
            return total
    raise AccuracyError("Taylor series for 1F1 did not converge",
                        estimates={'partial_sum': repr(total), 'last_term': abs(term)})


def _kummer_mpmath(a, b, z):
    try:
        with mpmath.workdps(30):
            value = mpmath.hyp1f1(mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z))
    except mpmath.libmp.NoConvergence as e:
        raise AccuracyError(f"mpmath 1F1 did not converge: {e}", estimates={'z': repr(z)})
    return complex(value)


def _asymptotic_series(p, q, w, tol, maxiter):
    """Σ (p)_s (q)_s / s! w^{−s}, truncated at its smallest term."""
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for s in range(maxiter):
        following = term * (p + s) * (q + s) / ((s + 1) * w)
        if s > 0 and abs(following) >= abs(term):
            break
        term = following
        total += term
        if abs(term) <= tol * abs(total):
            break
    return total, abs(term) / max(abs(total), 1e-300)


def _kummer_asymptotic(a, b, z, tol, maxiter):
    log_z = cmath.log(z)
    s1, err1 = _asymptotic_series(1.0 - a, b - a, z, tol, maxiter)
    s2, err2 = _asymptotic_series(a, a - b + 1.0, -z, tol, maxiter)
    if max(err1, err2) > ASYMPTOTIC_ACCURACY:
        raise AccuracyError("asymptotic 1F1 expansion too inaccurate at this |z|",
                            estimates={'smallest_term': max(err1, err2), 'z': repr(z)})
    # Stokes branch: e^{+iπa} for −π/2 < arg z ≤ π
    if cmath.phase(z) > -0.5 * math.pi:
        connection = cmath.exp(1j * math.pi * a)
    else:
        connection = cmath.exp(-1j * math.pi * a)
    growing = cmath.exp(z + (a - b) * log_z) * complex(rgamma(a)) * s1
    recessive = connection * cmath.exp(-a * log_z) * complex(rgamma(b - a)) * s2
    return complex(complex_gamma(b)) * (growing + recessive)


def kummer_1f1(a, b, z, tol=None, maxiter=None):
    """
    Kummer's confluent hypergeometric function ₁F₁(a; b; z).

    Taylor series with compensated summation for small |z|, mpmath in the
    middle band where the float series cancels badly, and the two-branch
    large-|z| expansion beyond DEFAULTS["asymptotic_limit"].

    Args:
        a, b, z: complex parameters; b must not be a non-positive integer
        tol: relative truncation tolerance for the series
        maxiter: iteration cap

    Returns:
        complex: ₁F₁(a; b; z)
    """
    a, b, z = complex(a), complex(b), complex(z)
    tol = tol or DEFAULTS["series_tol"]
    maxiter = maxiter or DEFAULTS["series_maxiter"]
    if b.imag == 0.0 and b.real <= 0.0 and b.real == round(b.real):
        raise DomainError(f"b must not be a non-positive integer, got {b.real:g}")
    if z == 0:
        return 1.0 + 0.0j
    radius = abs(z)
    if radius <= DEFAULTS["taylor_limit"]:
        return _kummer_taylor(a, b, z, tol, maxiter)
    if radius < DEFAULTS["asymptotic_limit"]:
        return _kummer_mpmath(a, b, z)
    return _kummer_asymptotic(a, b, z, tol, maxiter)


# --- comparison equation ---------------------------------------------------

def _kummer_a(alpha):
    return 1.0 - 0.25j * alpha


def comparison_solution(sigma, kappa, alpha=0.0):
    """
    Regular solution e^{−iκσ²/2}·κσ²·₁F₁(1 − iα/4; 2; iκσ²).

    ψ(σ) = f̃(σ)/√σ solves ψ'' + Π(σ)ψ = 0.

    Args:
        sigma: σ ≥ 0, scalar or array
        kappa, alpha: mode parameters

    Returns:
        complex value(s) of f̃
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0.0):
        raise DomainError("sigma must be non-negative")
    a = _kummer_a(alpha)
    out = np.empty(sigma.shape, dtype=complex)
    for index, s in np.ndenumerate(sigma):
        z = 1j * kappa * s * s
        out[index] = cmath.exp(-0.5 * z) * (kappa * s * s) * kummer_1f1(a, 2.0, z)
    return complex(out) if out.ndim == 0 else out


def comparison_derivatives(sigma, kappa, alpha=0.0):
    """
    ψ = f̃/√σ and its first two σ-derivatives from the contiguous relations
    d/dz ₁F₁(a; b; z) = (a/b) ₁F₁(a+1; b+1; z).

    Returns:
        tuple: (ψ, ψ', ψ'') as complex numbers
    """
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    a, b = _kummer_a(alpha), 2.0
    z = 1j * kappa * sigma * sigma
    m0 = kummer_1f1(a, b, z)
    m1 = a / b * kummer_1f1(a + 1.0, b + 1.0, z)
    m2 = a * (a + 1.0) / (b * (b + 1.0)) * kummer_1f1(a + 2.0, b + 2.0, z)

    e = cmath.exp(-0.5 * z)
    r0 = m0 + z * m1 - 0.5 * z * m0
    r1 = 2.0 * m1 + z * m2 - 0.5 * m0 - 0.5 * z * m1
    q0 = e * z * m0
    q1 = e * r0
    q2 = e * (r1 - 0.5 * r0)

    dz = 2j * kappa * sigma
    ddz = 2j * kappa
    f0 = q0
    f1 = q1 * dz
    f2 = q2 * dz * dz + q1 * ddz

    root = math.sqrt(sigma)
    psi = f0 / root
    dpsi = f1 / root - 0.5 * f0 / (root * sigma)
    ddpsi = f2 / root - f1 / (root * sigma) + 0.75 * f0 / (root * sigma * sigma)
    return psi, dpsi, ddpsi


def comparison_residual(sigma, kappa, alpha=0.0):
    """
    |ψ'' + Πψ| relative to the local solution scale (|Π| + 1)·√(|ψ|² + |ψ'|²/(|Π| + 1)).
    """
    psi, dpsi, ddpsi = comparison_derivatives(sigma, kappa, alpha)
    potential = Pi(sigma, kappa, alpha)
    strength = abs(potential) + 1.0
    amplitude = math.sqrt(abs(psi) ** 2 + abs(dpsi) ** 2 / strength)
    return abs(ddpsi + potential * psi) / (strength * max(amplitude, 1e-300))


def chi(x, kappa, alpha=0.0):
    """
    Canonical-form coefficient χ(x) of the radial equation, x = √(ξ²−1).

    χ = [(1+s)(4κ²s² − 4καs) − 6s − 3] / (4s(1+s)²), s = x².
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("chi has a pole at x = 0")
    s = x * x
    value = ((1.0 + s) * (4.0 * kappa * kappa * s * s - 4.0 * kappa * alpha * s) - 6.0 * s - 3.0) \
        / (4.0 * s * (1.0 + s) ** 2)
    return float(value) if value.ndim == 0 else value


def _chi_numerator(s, kappa, alpha):
    return ((4.0 * kappa * kappa * s + 4.0 * kappa * (kappa - alpha)) * s - (4.0 * kappa * alpha + 6.0)) * s - 3.0


def _chi_prime_at_root(x0, kappa, alpha):
    s = x0 * x0
    dnum = 12.0 * kappa * kappa * s * s + 8.0 * kappa * (kappa - alpha) * s - (4.0 * kappa * alpha + 6.0)
    return dnum * 2.0 * x0 / (4.0 * s * (1.0 + s) ** 2)


def Pi(sigma, kappa, alpha=0.0):
    """Comparison potential Π(σ) = κ²σ² − ακ − 3/(4σ²)."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise DomainError("Pi has a pole at sigma = 0")
    value = kappa * kappa * sigma * sigma - alpha * kappa - 0.75 / (sigma * sigma)
    return float(value) if value.ndim == 0 else value


def chi_turning_point(kappa, alpha=0.0):
    """First positive zero x₀ of χ (the positive root of its cubic in x²)."""
    upper = math.sqrt(3.0) / (2.0 * kappa) + abs(alpha) / kappa + 1e-12
    for _ in range(200):
        if _chi_numerator(upper, kappa, alpha) > 0.0:
            break
        upper *= 2.0
    else:
        raise AccuracyError("could not bracket the zero of chi",
                            estimates={'kappa': kappa, 'alpha': alpha})
    s0 = brentq(_chi_numerator, 0.0, upper, args=(kappa, alpha),
                xtol=1e-16 * upper, rtol=4.0 * np.finfo(float).eps)
    return math.sqrt(s0)


def pi_turning_point(kappa, alpha=0.0):
    """First positive zero σ₀ of Π."""
    return math.sqrt((alpha * kappa + kappa * math.sqrt(alpha * alpha + 3.0)) / (2.0 * kappa * kappa))


def _sigma_slope(x, sigma, kappa, alpha):
    return math.sqrt(abs(chi(x, kappa, alpha) / Pi(sigma, kappa, alpha)))


@dataclass
class SigmaMap:
    """
    Monotone map x ↦ σ(x) with dσ/dx = √(χ/Π) and σ(x₀) = σ₀.

    Inner branch (x < x₀) is stored in log-log variables, the outer branch
    in (x, σ). Below x_min σ is continued linearly, above x_max along
    σ² ≈ 2x.
    """

    kappa: float
    alpha: float
    x0: float
    sigma0: float
    slope0: float
    x_min: float
    x_max: float
    window: float
    inner: object
    outer: object

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0):
            raise DomainError("sigma map is defined for x >= 0")
        out = np.zeros_like(x)
        sigma_min = math.exp(self.inner(math.log(self.x_min))[0])
        sigma_max = self.outer(self.x_max)[0]

        tiny = (x > 0.0) & (x < self.x_min)
        inner = (x >= self.x_min) & (x < self.x0 - self.window)
        near = np.abs(x - self.x0) <= self.window
        outer = (x > self.x0 + self.window) & (x <= self.x_max)
        far = x > self.x_max

        out[tiny] = sigma_min * x[tiny] / self.x_min
        if np.any(inner):
            out[inner] = np.exp(self.inner(np.log(x[inner]))[0])
        out[near] = self.sigma0 + self.slope0 * (x[near] - self.x0)
        if np.any(outer):
            out[outer] = self.outer(x[outer])[0]
        out[far] = np.sqrt(sigma_max ** 2 + 2.0 * (x[far] - self.x_max))
        return float(out[0]) if scalar else out

    def derivative(self, x):
        """σ'(x) = (Π/χ)^{−1/2}, with the regularized slope at the turning point."""
        x = np.asarray(x, dtype=float)
        sigma = np.asarray(self(x), dtype=float)
        out = np.empty_like(x)
        for index, xv in np.ndenumerate(x):
            if abs(xv - self.x0) <= 100.0 * self.window:
                out[index] = self.slope0
            elif xv < self.x_min:
                out[index] = self(self.x_min) / self.x_min
            else:
                out[index] = _sigma_slope(xv, float(sigma[index]), self.kappa, self.alpha)
        return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def build_sigma_map(kappa, alpha=0.0, x_max=10.0):
    """
    Integrate the σ-map outward from the turning point in both directions.

    Args:
        kappa, alpha: mode parameters
        x_max: largest x covered by the outer integration

    Returns:
        SigmaMap
    """
    x0 = chi_turning_point(kappa, alpha)
    sigma0 = pi_turning_point(kappa, alpha)
    slope0 = (_chi_prime_at_root(x0, kappa, alpha)
              / (2.0 * kappa * kappa * sigma0 + 1.5 / sigma0 ** 3)) ** (1.0 / 3.0)
    window = 1e-6 * x0
    x_min = 1e-8 * x0
    x_max = max(float(x_max), 2.0 * x0)
    rtol, atol = DEFAULTS["sigma_rtol"], DEFAULTS["sigma_atol"]

    def outer_rhs(x, y):
        return [_sigma_slope(x, y[0], kappa, alpha)]

    def inner_rhs(u, w):
        x, sigma = math.exp(u), math.exp(w[0])
        return [x / sigma * _sigma_slope(x, sigma, kappa, alpha)]

    outer = solve_ivp(outer_rhs, (x0 + window, x_max), [sigma0 + slope0 * window],
                      method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    inner = solve_ivp(inner_rhs, (math.log(x0 - window), math.log(x_min)),
                      [math.log(sigma0 - slope0 * window)],
                      method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    for branch, solution in (("outer", outer), ("inner", inner)):
        if not solution.success:
            abscissa = float(solution.t[-1])
            if branch == "inner":
                abscissa = math.exp(abscissa)
            raise ModeIntegrationError(f"sigma map ({branch} branch) failed: {solution.message}",
                                       abscissa=abscissa)
    logger.debug("sigma map kappa=%g alpha=%g: x0=%.6g sigma0=%.6g slope=%.6g",
                 kappa, alpha, x0, sigma0, slope0)
    return SigmaMap(kappa, alpha, x0, sigma0, slope0, x_min, x_max, window,
                    inner.sol, outer.sol)


def sigma_map(x, kappa, alpha=0.0):
    """Evaluate σ(x) for the given mode parameters."""
    x_arr = np.asarray(x, dtype=float)
    x_max = max(10.0, 1.05 * float(np.max(x_arr))) if x_arr.size else 10.0
    return build_sigma_map(float(kappa), float(alpha), x_max)(x)


# --- uniform JWKB ----------------------------------------------------------

def jwkb_F(kappa, xi, alpha=0.0, mapping=None):
    """
    Uniform JWKB approximation of the radial solution.

    F = (ξ²(ξ²−1))^{−1/4} (Π/χ)^{1/4} ψ(σ(√(ξ²−1))), with
    ψ(σ) = C_α·Re f̃(σ)/√σ.

    Args:
        kappa: wavenumber
        xi: ξ > 1, scalar or array
        alpha: separation constant
        mapping (SigmaMap): prebuilt σ-map, built on demand otherwise

    Returns:
        F(κ, ξ)
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 1.0):
        raise DomainError("xi must exceed 1")
    x = np.sqrt((xi - 1.0) * (xi + 1.0))
    if mapping is None:
        mapping = build_sigma_map(float(kappa), float(alpha), max(10.0, 1.05 * float(np.max(x))))
    sigma = np.asarray(mapping(x), dtype=float)
    slope = np.asarray(mapping.derivative(x), dtype=float)
    if np.any(~np.isfinite(slope)) or np.any(slope <= 0.0):
        raise AccuracyError("sigma map slope could not be regularized",
                            estimates={'kappa': kappa, 'alpha': alpha})
    psi = focal_normalization(alpha) * np.real(comparison_solution(sigma, kappa, alpha)) / np.sqrt(sigma)
    value = (xi * xi * x * x) ** -0.25 / np.sqrt(slope) * psi
    return float(value) if value.ndim == 0 else value


def jwkb_mode(params, xi_max):
    """Uniform JWKB radial mode on (1, xi_max] as a ModeFunction."""
    x_max = math.sqrt((xi_max - 1.0) * (xi_max + 1.0))
    mapping = build_sigma_map(float(params.kappa), float(params.alpha), max(10.0, 1.05 * x_max))

    def reduced(xi):
        xi = np.asarray(xi, dtype=float)
        return jwkb_F(params.kappa, xi, params.alpha, mapping) / np.sqrt((xi - 1.0) * (xi + 1.0))

    return ModeFunction(params, ModeKind.RADIAL_F, ModeMethod.UNIFORM_JWKB, reduced, (1.0, xi_max))


# --- focal couplings -------------------------------------------------------

def focal_coupling(kappa, alpha, n_parity, normalization=None):
    """
    Dipole coupling of a mode at the two foci.

    Focus 1 carries (κ²π/4)·α·csch(πα/4) (→ κ² at α = 0), focus 2 the same
    times (−1)ⁿ.

    Args:
        kappa: wavenumber
        alpha: separation constant
        n_parity (int): angular quantum number n (only its parity matters)
        normalization (float): mode normalization N; omitted means N = 1

    Returns:
        tuple: (g at focus 1, g at focus 2)
    """
    y = 0.25 * math.pi * alpha
    ratio = 1.0 - y * y / 6.0 if abs(y) < 1e-4 else y / math.sinh(y)
    g1 = kappa * kappa * ratio
    if normalization is not None:
        g1 /= normalization
    sign = -1.0 if int(n_parity) % 2 else 1.0
    return g1, sign * g1


def boundary_slope(mode, xi_b, step=1e-6):
    """
    ∂_ξ[√(ξ²−1) F] at the cavity wall, by central differences.

    Vanishes when the radial quantization condition is met.
    """
    if mode.kind is not ModeKind.RADIAL_F:
        raise DomainError("boundary slope is only defined for radial modes")
    lo = xi_b - step
    hi = xi_b + step if xi_b + step <= mode.domain[1] else xi_b
    if hi == xi_b:
        lo = xi_b - 2.0 * step
    f = lambda xi: np.sqrt((xi - 1.0) * (xi + 1.0)) * float(mode(xi))
    return (f(hi) - f(lo)) / (hi - lo)
