"""
Semiclassical quantization, decay rates and photon-path weights.

The α = 0 mode integrals I_G^p = 2∫₀¹ G²η^p dη and I_F^p = ∫₁^{ξ_b} F²ξ^p dξ
fix the linearized quantization functions n₁, n₂ near κ_eg. Poisson
summation over the mode comb then turns the focal couplings into a sum
over photon paths: hop (N1, N2) has delay τ(N1, N2) = N1·2d/c₀ + N2·2f/c₀
and weight A = Γ(−1)^{N2} W(s(N1, N2)).

Half-integer N1 is carried as the doubled index k1 = 2·N1 throughout.
"""

import math
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar
from scipy.special import sici

from cavity_config import DEFAULTS
from errors import AccuracyError, ConfigurationError, DomainError, IndexSetError

logger = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)

# Below this |x| W is evaluated from its even Taylor series
W_SERIES_LIMIT = 0.05

DELAY_SLACK = 1e-12


# --- sine/cosine integral helpers -------------------------------------------

def cin(x):
    """Entire cosine integral Cin(x) = ∫₀ˣ (1 − cos t)/t dt."""
    x = abs(float(x))
    if x < 1.0:
        total, term, k = 0.0, 1.0, 1
        # Σ (−1)^{k+1} x^{2k} / (2k (2k)!)
        while True:
            term *= x * x / ((2 * k - 1) * (2 * k))
            contribution = term / (2 * k) * (1 if k % 2 else -1)
            total += contribution
            if abs(contribution) < 1e-18:
                return total
            k += 1
    _, ci = sici(x)
    return EULER_GAMMA + math.log(x) - float(ci)


def _si_ci(x):
    si, ci = sici(x)
    return float(si), float(ci)


# --- mode integrals --------------------------------------------------------

def _i_g0_closed(kappa):
    si2, ci2 = _si_ci(2.0 * kappa)
    si4, ci4 = _si_ci(4.0 * kappa)
    tail = math.cos(4.0 * kappa) * (ci4 - ci2) + math.sin(4.0 * kappa) * (si4 - si2)
    return 0.5 * (cin(2.0 * kappa) + math.log(2.0) - tail)


def _i_f0_closed(kappa, v_b):
    si_lo, ci_lo = _si_ci(4.0 * kappa)
    si_hi, ci_hi = _si_ci(2.0 * kappa * (v_b + 2.0))
    tail = math.cos(4.0 * kappa) * (ci_hi - ci_lo) + math.sin(4.0 * kappa) * (si_hi - si_lo)
    return 0.25 * (cin(2.0 * kappa * v_b) - math.log((v_b + 2.0) / 2.0) + tail)


def _g_square_shift(kappa):
    """2∫₀¹ sin²(κu) du, the difference I_G⁰ − I_G²."""
    return 1.0 - math.sin(2.0 * kappa) / (2.0 * kappa)


def _f_square_shift(kappa, v_b):
    """∫₀^{v_b} sin²(κv) dv, the difference I_F² − I_F⁰."""
    return 0.5 * v_b - math.sin(2.0 * kappa * v_b) / (4.0 * kappa)


def _quad_checked(func, lo, hi, label):
    value, abserr = quad(func, lo, hi, limit=DEFAULTS["quad_limit"],
                         epsabs=DEFAULTS["quad_epsabs"], epsrel=DEFAULTS["quad_epsrel"])
    if not math.isfinite(value) or abserr > 1e-9 * max(1.0, abs(value)):
        raise AccuracyError(f"quadrature for {label} did not converge",
                            estimates={'value': value, 'abserr': abserr})
    return value


def compute_I(p, kind, kappa_eg, xi_b, method="sici"):
    """
    Mode integral I_G^p or I_F^p at α = 0.

    The default method splits the integrands by partial fractions into
    sine/cosine integrals and elementary terms; method="quad" integrates
    the raw squared closed forms adaptively (moderate κ only).

    Args:
        p (int): 0 or 2
        kind (str): "G" or "F"
        kappa_eg (float): κ_eg
        xi_b (float): boundary coordinate ξ_b (only used for F)
        method (str): "sici" or "quad"

    Returns:
        float: the integral
    """
    if p not in (0, 2):
        raise DomainError(f"p must be 0 or 2, got {p}")
    if kind not in ("G", "F"):
        raise DomainError(f"kind must be 'G' or 'F', got {kind!r}")
    if not kappa_eg > 0.0:
        raise DomainError(f"kappa_eg must be positive, got {kappa_eg}")
    if kind == "F" and not xi_b > 1.0:
        raise DomainError(f"xi_b must exceed 1, got {xi_b}")
    kappa = float(kappa_eg)
    v_b = float(xi_b) - 1.0

    if method == "sici":
        if kind == "G":
            value = _i_g0_closed(kappa)
            return value if p == 0 else value - _g_square_shift(kappa)
        value = _i_f0_closed(kappa, v_b)
        return value if p == 0 else value + _f_square_shift(kappa, v_b)

    if method == "quad":
        def sin_over(u):
            # sin(κu)/u without the removable singularity
            return kappa * np.sinc(kappa * u / math.pi)

        if kind == "G":
            integrand = lambda u: 2.0 * math.sin(kappa * u) * sin_over(u) * (1.0 - u) ** p / (2.0 - u)
            return _quad_checked(integrand, 0.0, 1.0, f"I_G^{p}")
        integrand = lambda v: math.sin(kappa * v) * sin_over(v) * (1.0 + v) ** p / (v + 2.0)
        return _quad_checked(integrand, 0.0, v_b, f"I_F^{p}")

    raise DomainError(f"unknown integration method {method!r}")


# --- angular semiclassics --------------------------------------------------

def _require_kappa(kappa):
    if not kappa > 0.5:
        raise DomainError(f"kappa must exceed 1/2 for a real turning point, got {kappa}")


def semiclassical_potential(eta, kappa, alpha=0.0):
    """V(η) = 1/(4κ²) − (η−1)(η²−1−α/κ)/(1+η)."""
    eta = np.asarray(eta, dtype=float)
    value = 0.25 / (kappa * kappa) - (eta - 1.0) * (eta * eta - 1.0 - alpha / kappa) / (1.0 + eta)
    return float(value) if value.ndim == 0 else value


def turning_point(kappa, alpha=0.0):
    """Zero η_turn of V on [0, 1]; equals 1 − 1/(2κ) at α = 0."""
    _require_kappa(kappa)
    if alpha == 0.0:
        return 1.0 - 0.5 / kappa
    v0 = semiclassical_potential(0.0, kappa, alpha)
    if v0 >= 0.0:
        raise DomainError(f"no classically allowed region on [0, 1] for alpha={alpha}")
    return brentq(semiclassical_potential, 0.0, 1.0, args=(kappa, alpha), xtol=1e-15)


def eikonal(eta, kappa, alpha=0.0):
    """S(η) = κ∫_η^{η_turn} √(−V)/(1−η) dη."""
    eta_t = turning_point(kappa, alpha)
    if not -1.0 < eta <= eta_t:
        raise DomainError(f"eta={eta} outside the allowed region (-1, {eta_t}]")
    integrand = lambda e: math.sqrt(max(-semiclassical_potential(e, kappa, alpha), 0.0)) / (1.0 - e)
    return kappa * _quad_checked(integrand, eta, eta_t, "eikonal")


def semiclassical_n1(kappa, alpha=0.0):
    """Langer-substituted quantization function n₁ = 2S(0)/π − 1/2."""
    return 2.0 * eikonal(0.0, kappa, alpha) / math.pi - 0.5


def langer_G(eta, kappa, alpha=0.0):
    """
    Langer-substituted JWKB angular function
    (V(0)/V(η))^{1/4} (1+η)^{−1/2} sin(S(η) + π/4) in the allowed region.
    """
    eta_arr = np.atleast_1d(np.asarray(eta, dtype=float))
    v0 = semiclassical_potential(0.0, kappa, alpha)
    out = np.empty_like(eta_arr)
    for index, e in np.ndenumerate(eta_arr):
        v = semiclassical_potential(e, kappa, alpha)
        if v >= 0.0:
            raise DomainError(f"eta={e} is not in the classically allowed region")
        out[index] = (v0 / v) ** 0.25 / math.sqrt(1.0 + e) * math.sin(eikonal(e, kappa, alpha) + 0.25 * math.pi)
    return float(out[0]) if np.ndim(eta) == 0 else out


def dn1_dalpha_turning(kappa, alpha=0.0):
    """
    ∂_α n₁ = (1/π)∫₀^{η_turn} dη / (√(−V)(1+η)).

    At α = 0 the substitution 1−η = cosh(t)/(2κ) removes the endpoint
    singularity; otherwise an algebraic-weight quadrature handles it.
    """
    _require_kappa(kappa)
    if alpha == 0.0:
        a = 0.5 / kappa
        upper = math.acosh(2.0 * kappa)
        value = _quad_checked(lambda t: 1.0 / (2.0 - a * math.cosh(t)), 0.0, upper, "dn1/dalpha")
        return value / math.pi
    eta_t = turning_point(kappa, alpha)
    beta = alpha / kappa
    # V'(η_turn), the limit of −V/(η_turn − η) at the endpoint
    slope = -((eta_t * eta_t - 1.0 - beta) + 2.0 * eta_t * (eta_t - 1.0)) / (1.0 + eta_t) \
        + (eta_t - 1.0) * (eta_t * eta_t - 1.0 - beta) / (1.0 + eta_t) ** 2

    def smooth(e):
        gap = eta_t - e
        ratio = slope if gap < 1e-9 else -semiclassical_potential(e, kappa, alpha) / gap
        return 1.0 / (math.sqrt(ratio) * (1.0 + e))

    value, abserr = quad(smooth, 0.0, eta_t, weight="alg", wvar=(0.0, -0.5),
                         limit=DEFAULTS["quad_limit"])
    if abserr > 1e-8 * max(1.0, abs(value)):
        raise AccuracyError("turning-point quadrature did not converge",
                            estimates={'value': value, 'abserr': abserr})
    return value / math.pi


# --- data bundle -----------------------------------------------------------

@dataclass(frozen=True)
class QuantizationData:
    """Mode integrals and derived rates at α = 0, κ = κ_eg."""

    kappa_eg: float
    eps: float
    i_f0: float
    i_f2: float
    i_g0: float
    i_g2: float
    dn1_dalpha: float
    dn1_dalpha_turning: float
    dn2_dalpha: float
    gamma_ratio: float

    def __post_init__(self):
        for name in ('i_f0', 'i_f2', 'i_g0', 'i_g2'):
            if not getattr(self, name) > 0.0:
                raise AccuracyError(f"{name} must be positive", estimates={name: getattr(self, name)})
        if not self.combination > 0.0:
            raise AccuracyError("I_F2*I_G0 - I_F0*I_G2 must be positive",
                                estimates={'combination': self.combination})

    @property
    def root_factor(self):
        """√(1 − 1/(4κ_eg²))."""
        return math.sqrt(1.0 - 0.25 / (self.kappa_eg * self.kappa_eg))

    @property
    def combination(self):
        """I_F²I_G⁰ − I_F⁰I_G², assembled without cancellation."""
        v_b = (1.0 - self.eps) / self.eps
        return (_f_square_shift(self.kappa_eg, v_b) * self.i_g0
                + _g_square_shift(self.kappa_eg) * self.i_f0)

    @property
    def normalization(self):
        """N(κ_eg) = κ√(dπ(I_F²I_G⁰ − I_F⁰I_G²)) with d = 2 in units of d/2."""
        return self.kappa_eg * math.sqrt(2.0 * math.pi * self.combination)

    @property
    def s_diagonal_slope(self):
        """∂s/∂k1 = 2I_G⁰/√(1 − 1/(4κ²))."""
        return 2.0 * self.i_g0 / self.root_factor

    @property
    def s_focal_slope(self):
        """−∂s/∂N2 = 4I_F⁰."""
        return 4.0 * self.i_f0

    def to_dict(self):
        return {
            'kappa_eg': self.kappa_eg,
            'eps': self.eps,
            'I_F0': self.i_f0,
            'I_F2': self.i_f2,
            'I_G0': self.i_g0,
            'I_G2': self.i_g2,
            'dn1_dalpha': self.dn1_dalpha,
            'dn1_dalpha_turning': self.dn1_dalpha_turning,
            'dn2_dalpha': self.dn2_dalpha,
            'gamma_semiclassical_over_free': self.gamma_ratio,
            'normalization': self.normalization,
        }


def dn1_dalpha(kappa_eg, i_g0=None):
    """
    ∂_α n₁ ≈ I_G⁰/(π√(1 − 1/(4κ_eg²))).

    The turning-point integral it approximates is dn1_dalpha_turning; both
    are stored on QuantizationData.
    """
    _require_kappa(kappa_eg)
    if i_g0 is None:
        i_g0 = compute_I(0, "G", kappa_eg, 2.0)
    return i_g0 / (math.pi * math.sqrt(1.0 - 0.25 / (kappa_eg * kappa_eg)))


@lru_cache(maxsize=128)
def quantization_data(kappa_eg, eps, method="sici"):
    """
    Evaluate every α = 0 quantity for one cavity.

    Args:
        kappa_eg (float): κ_eg > 1/2
        eps (float): eccentricity
        method (str): integration method passed to compute_I

    Returns:
        QuantizationData
    """
    _require_kappa(kappa_eg)
    xi_b = 1.0 / eps
    i_g0 = compute_I(0, "G", kappa_eg, xi_b, method)
    i_g2 = compute_I(2, "G", kappa_eg, xi_b, method)
    i_f0 = compute_I(0, "F", kappa_eg, xi_b, method)
    i_f2 = compute_I(2, "F", kappa_eg, xi_b, method)
    approx = dn1_dalpha(kappa_eg, i_g0)
    turning = dn1_dalpha_turning(kappa_eg)

    v_b = (1.0 - eps) / eps
    combination = _f_square_shift(kappa_eg, v_b) * i_g0 + _g_square_shift(kappa_eg) * i_f0
    f_over_d = 0.5 * v_b
    root = math.sqrt(1.0 - 0.25 / (kappa_eg * kappa_eg))
    ratio = (i_f0 + i_g0 * f_over_d / root) / combination

    qd = QuantizationData(kappa_eg, eps, i_f0, i_f2, i_g0, i_g2,
                          approx, turning, -i_f0 / math.pi, ratio)
    logger.debug("quantization data: %s", qd.to_dict())
    return qd


def quantization_n1(alpha, kappa, qd):
    """Linearized n₁ = 2κ/π + ∂_α n₁·α."""
    return 2.0 * kappa / math.pi + qd.dn1_dalpha * alpha


def quantization_n2(alpha, kappa, f_over_d, qd):
    """Linearized n₂ = 2κf/(πd) + 1/2 + ∂_α n₂·α."""
    return 2.0 * kappa * f_over_d / math.pi + 0.5 + qd.dn2_dalpha * alpha


def gamma_rates(qd, kappa_eg=None, f_over_d=None):
    """
    Semiclassical decay rate relative to the free-space rate.

    Γ/Γ_free = (I_F⁰ + I_G⁰(f/d)/√(1 − 1/(4κ²))) / (I_F²I_G⁰ − I_F⁰I_G²).

    Returns:
        tuple: (Γ_semiclassical/Γ_free, Γ_free/Γ_free = 1.0)
    """
    kappa_eg = qd.kappa_eg if kappa_eg is None else kappa_eg
    f_over_d = (1.0 - qd.eps) / (2.0 * qd.eps) if f_over_d is None else f_over_d
    root = math.sqrt(1.0 - 0.25 / (kappa_eg * kappa_eg))
    ratio = (qd.i_f0 + qd.i_g0 * f_over_d / root) / qd.combination
    return ratio, 1.0


# --- weights ---------------------------------------------------------------

def W(x):
    """
    Path weighting function W(x) = 3(x coth x − 1)/sinh² x.

    Even, W(0) = 1, positive, and ~12(|x|−1)e^{−2|x|} for large |x|.
    """
    scalar = np.ndim(x) == 0
    x = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    out = np.empty_like(x)
    small = x < W_SERIES_LIMIT
    y = x[small] ** 2
    out[small] = 1.0 + y * (-0.4 + y * (2.0 / 21.0 - y * 4.0 / 225.0))
    big = x[~small]
    e = np.exp(-2.0 * big)
    one_minus = -np.expm1(-2.0 * big)
    out[~small] = 12.0 * e * (big * (1.0 + e) - one_minus) / one_minus ** 3
    return float(out[0]) if scalar else out


@lru_cache(maxsize=1)
def weight_envelope():
    """
    Numerically located maximum of |W|.

    Returns:
        tuple: (argmax x*, max W)
    """
    result = minimize_scalar(lambda x: -W(x), bounds=(0.0, 5.0), method="bounded",
                             options={'xatol': 1e-10})
    x_star = float(result.x)
    w_max = max(float(W(x_star)), float(W(0.0)))
    if W(0.0) >= w_max:
        x_star = 0.0
    return x_star, w_max


def envelope_threshold(floor):
    """Smallest |s| beyond which W(s) < floor (inf for floor 0)."""
    x_star, w_max = weight_envelope()
    if floor <= 0.0:
        return math.inf
    if floor >= w_max:
        return -math.inf
    upper = max(1.0, x_star + 1.0)
    while W(upper) >= floor:
        upper *= 2.0
    return brentq(lambda x: W(x) - floor, x_star, upper, xtol=1e-12)


def doubled_index(n1):
    """2·N1 as an exact integer, for integer or half-integer N1."""
    k1 = round(2.0 * float(n1))
    if abs(2.0 * float(n1) - k1) > 1e-9 or k1 < 0:
        raise IndexSetError(f"N1 must be a non-negative integer or half-integer, got {n1}")
    return int(k1)


def _check_n2(n2):
    if int(n2) != n2 or n2 < 0:
        raise IndexSetError(f"N2 must be a non-negative integer, got {n2}")
    return int(n2)


def s_alpha(n1, n2, qd, kappa_eg=None):
    """
    s(N1, N2) = N1·4I_G⁰/√(1 − 1/(4κ²)) − 4N2·I_F⁰.

    Args:
        n1: N1, integer or half-integer
        n2: N2, non-negative integer
        qd (QuantizationData): mode integrals
        kappa_eg: overrides qd.kappa_eg in the square-root factor

    Returns:
        float
    """
    k1 = doubled_index(n1)
    n2 = _check_n2(n2)
    slope = qd.s_diagonal_slope
    if kappa_eg is not None:
        slope = 2.0 * qd.i_g0 / math.sqrt(1.0 - 0.25 / (kappa_eg * kappa_eg))
    return k1 * slope - n2 * qd.s_focal_slope


def path_weight(n1, n2, gamma, qd):
    """
    Signed hop weight A = Γ(−1)^{N2} W(s(N1, N2)).

    Integer N1 is a same-atom hop, half-integer N1 a hop to the partner;
    (0, 0) is not part of either index set.
    """
    k1 = doubled_index(n1)
    n2 = _check_n2(n2)
    if k1 == 0 and n2 == 0:
        raise IndexSetError("(N1, N2) = (0, 0) is excluded from the path sum")
    sign = -1.0 if n2 % 2 else 1.0
    return gamma * sign * float(W(s_alpha(n1, n2, qd)))


def eccentricity_log(eps):
    """L(ε) = log((1+ε)/(1−ε))."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    return math.log1p(eps) - math.log1p(-eps)


def short_wavelength_weight(n2, eps):
    """Limit κ_eg → ∞ of A_{N2/2, N2}/Γ: (−1)^{N2} W(N2·L(ε))."""
    n2 = _check_n2(n2)
    sign = -1.0 if n2 % 2 else 1.0
    return sign * float(W(n2 * eccentricity_log(eps)))


@dataclass(frozen=True)
class PathEntry:
    """One admissible hop: doubled index k1 = 2N1, N2, and its data."""

    k1: int
    n2: int
    s: float
    weight_over_gamma: float
    delay: float
    phase: float

    @property
    def n1(self):
        return self.k1 / 2.0

    @property
    def is_cross(self):
        return self.k1 % 2 == 1


@dataclass(frozen=True)
class PathWeightTable:
    """
    Finite set of hops with delay ≤ delay_cutoff and |A|/Γ ≥ weight_floor.

    The same table serves 1→1 and 2→2 (diagonal) as well as 1→2 and 2→1
    (cross) hops.
    """

    cfg: object
    delay_cutoff: float
    weight_floor: float
    diagonal: Tuple[PathEntry, ...]
    cross: Tuple[PathEntry, ...]
    quantization: QuantizationData = field(default=None, compare=False)
    dropped_mass: float = field(default=0.0, compare=False)

    @property
    def gamma(self):
        return self.cfg.gamma

    @property
    def entries(self):
        return self.diagonal + self.cross

    def __len__(self):
        return len(self.diagonal) + len(self.cross)

    def lookup(self, n1, n2):
        """Return the stored entry for (N1, N2) or None."""
        k1, n2 = doubled_index(n1), _check_n2(n2)
        for entry in (self.cross if k1 % 2 else self.diagonal):
            if entry.k1 == k1 and entry.n2 == n2:
                return entry
        return None

    def weight(self, n1, n2):
        """Signed weight A in units of 1/τ (0 when not stored)."""
        entry = self.lookup(n1, n2)
        return 0.0 if entry is None else entry.weight_over_gamma * self.gamma

    @property
    def min_delay(self):
        delays = [e.delay for e in self.entries]
        return min(delays) if delays else math.inf

    def to_frame(self):
        """Weight table as a DataFrame: N1, N2, s_alpha, weight_over_gamma, delay_over_tau."""
        rows = sorted(self.entries, key=lambda e: (e.delay, e.k1, e.n2))
        return pd.DataFrame({
            'N1': [e.n1 for e in rows],
            'N2': [e.n2 for e in rows],
            's_alpha': [e.s for e in rows],
            'weight_over_gamma': [e.weight_over_gamma for e in rows],
            'delay_over_tau': [e.delay for e in rows],
        }, columns=['N1', 'N2', 's_alpha', 'weight_over_gamma', 'delay_over_tau'])

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    def summary(self):
        return {
            'delay_cutoff': self.delay_cutoff,
            'weight_floor': self.weight_floor,
            'diagonal_entries': len(self.diagonal),
            'cross_entries': len(self.cross),
            'dropped_mass': self.dropped_mass,
        }

    @classmethod
    def isolated(cls, cfg, delay_cutoff):
        """Table with every coupling removed: pure spontaneous decay."""
        return cls(cfg, delay_cutoff, math.inf, (), ())


def build_weight_table(cfg, delay_cutoff, weight_floor=None, method="sici"):
    """
    Enumerate all hops with τ ≤ delay_cutoff and |A|/Γ ≥ weight_floor.

    For each N2 only the k1 window where |s| can stay below the envelope
    threshold is scanned, so no dropped entry inside the cutoff exceeds
    the floor.

    Args:
        cfg (CavityConfig): cavity parameters
        delay_cutoff (float): largest hop delay, in units of τ
        weight_floor (float): relative floor on |A|/Γ
        method (str): mode-integral method

    Returns:
        PathWeightTable
    """
    if weight_floor is None:
        weight_floor = DEFAULTS["weight_floor"]
    if not delay_cutoff > 0.0:
        raise ConfigurationError(f"must be positive, got {delay_cutoff}", field="delay_cutoff")
    if weight_floor < 0.0:
        raise ConfigurationError(f"must be non-negative, got {weight_floor}", field="weight_floor")

    qd = quantization_data(cfg.kappa_eg, cfg.eps, method)
    threshold = envelope_threshold(weight_floor)
    slope_k = qd.s_diagonal_slope
    slope_n = qd.s_focal_slope
    limit = delay_cutoff * (1.0 + DELAY_SLACK)

    diagonal, cross = [], []
    dropped = 0.0
    n2_max = int(math.floor(limit / cfg.focal_delay_unit))
    for n2 in range(n2_max + 1):
        budget = limit - n2 * cfg.focal_delay_unit
        k1_max = int(math.floor(budget / cfg.eps + DELAY_SLACK))
        if math.isinf(threshold):
            lo, hi = 0, k1_max
        else:
            if threshold < 0.0:
                break
            centre = n2 * slope_n / slope_k
            width = threshold / slope_k
            lo = max(0, int(math.floor(centre - width)) - 1)
            hi = min(k1_max, int(math.ceil(centre + width)) + 1)
        for k1 in range(lo, hi + 1):
            if k1 == 0 and n2 == 0:
                continue
            delay = cfg.hop_delay(k1, n2)
            if delay > limit:
                continue
            s = k1 * slope_k - n2 * slope_n
            w = (-1.0 if n2 % 2 else 1.0) * float(W(s))
            if abs(w) < weight_floor:
                dropped += abs(w)
                continue
            entry = PathEntry(k1, n2, s, w, delay, cfg.hop_phase(k1, n2))
            (cross if k1 % 2 else diagonal).append(entry)

    if not diagonal and not cross:
        raise ConfigurationError(
            f"no path weights within delay_cutoff={delay_cutoff} above weight_floor={weight_floor}",
            field="delay_cutoff")
    if not math.isinf(threshold):
        # rows decay at least geometrically outside the scanned window
        dropped += 2.0 * (n2_max + 1) * weight_floor / -math.expm1(-slope_k)
    order = lambda e: (e.delay, e.k1, e.n2)
    table = PathWeightTable(cfg, float(delay_cutoff), float(weight_floor),
                            tuple(sorted(diagonal, key=order)), tuple(sorted(cross, key=order)),
                            qd, dropped)
    logger.debug("weight table: %s", table.summary())
    return table
