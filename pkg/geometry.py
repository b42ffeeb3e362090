"""
Dimensionless cavity parameters and prolate-ellipsoidal coordinates.

Lengths are measured in units of d/2 (half the focal distance), so the
foci sit at z = ±1 and the wavenumber variable κ = ωd/(2c₀) is the plain
wavenumber. Times are measured in units of the round-trip time
τ = (2f + d)/c₀, which makes 2d/c₀ = 2ετ and 2f/c₀ = (1 − ε)τ.
"""

import math
import logging
from dataclasses import dataclass, asdict

import numpy as np

from errors import ConfigurationError, DomainError
from cavity_config import MIN_GAMMA_TAU

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Slack allowed on coordinate-domain checks (rounding in caller arithmetic)
DOMAIN_SLACK = 1e-12


def normalize_phase(phase):
    """Reduce an angle to [0, 2π)."""
    reduced = math.fmod(float(phase), TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    if reduced >= TWO_PI:
        reduced = 0.0
    return reduced


@dataclass(frozen=True)
class CavityConfig:
    """
    Cavity and atom parameters in dimensionless form.

    Attributes:
        eps: eccentricity ε = d/(d + 2f), in (0, 1)
        kappa_eg: κ_eg = ω_eg d/(2c₀)
        gamma_tau: free-space decay rate times the round-trip time
        phase_d: ω_eg d/c₀ mod 2π
        phase_f: 2ω_eg f/c₀ mod 2π
    """

    eps: float
    kappa_eg: float
    gamma_tau: float
    phase_d: float = 0.0
    phase_f: float = 0.0

    @property
    def gamma(self):
        """Decay rate in units of 1/τ (numerically equal to Γτ)."""
        return self.gamma_tau

    @property
    def f_over_d(self):
        return (1.0 - self.eps) / (2.0 * self.eps)

    @property
    def xi_boundary(self):
        """Boundary coordinate ξ_b = 2f/d + 1 = 1/ε."""
        return 1.0 / self.eps

    @property
    def v_boundary(self):
        """ξ_b − 1, computed without cancellation."""
        return (1.0 - self.eps) / self.eps

    @property
    def d_over_lambda(self):
        return self.kappa_eg / math.pi

    @property
    def f_over_lambda(self):
        return self.d_over_lambda * self.f_over_d

    @property
    def diagonal_delay_unit(self):
        """2d/c₀ in units of τ."""
        return 2.0 * self.eps

    @property
    def focal_delay_unit(self):
        """2f/c₀ in units of τ."""
        return 1.0 - self.eps

    def hop_delay(self, k1, n2):
        """
        Delay τ(N1, N2) of one hop, in units of τ.

        Args:
            k1 (int): doubled index 2·N1
            n2 (int): N2

        Returns:
            float: N1·2d/c₀ + N2·2f/c₀ = k1·ε + N2·(1 − ε)
        """
        return k1 * self.eps + n2 * (1.0 - self.eps)

    def hop_phase(self, k1, n2):
        """Relative phase ω_eg·τ(N1, N2) mod 2π of one hop."""
        return normalize_phase(k1 * self.phase_d + n2 * self.phase_f)

    def to_dict(self):
        """Convert the configuration (with derived values) to a dictionary."""
        result = asdict(self)
        result.update({
            'f_over_d': self.f_over_d,
            'xi_boundary': self.xi_boundary,
            'd_over_lambda': self.d_over_lambda,
            'f_over_lambda': self.f_over_lambda,
        })
        return result


def make_cavity(eps, kappa_eg, gamma_tau, phase_d=0.0, phase_f=0.0):
    """
    Validate parameters and build a CavityConfig.

    Args:
        eps (float): eccentricity in (0, 1)
        kappa_eg (float): dimensionless atomic wavenumber, > 0
        gamma_tau (float): Γτ, at least 1e-6
        phase_d (float): ω_eg d/c₀, any real (reduced mod 2π)
        phase_f (float): 2ω_eg f/c₀, any real (reduced mod 2π)

    Returns:
        CavityConfig: validated configuration
    """
    values = {'eps': eps, 'kappa_eg': kappa_eg, 'gamma_tau': gamma_tau,
              'phase_d': phase_d, 'phase_f': phase_f}
    for field, value in values.items():
        if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
            raise ConfigurationError(f"must be a finite real number, got {value!r}", field=field)

    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eccentricity must lie in (0, 1), got {eps}", field="eps")
    if not kappa_eg > 0.0:
        raise ConfigurationError(f"must be positive, got {kappa_eg}", field="kappa_eg")
    if not gamma_tau >= MIN_GAMMA_TAU:
        raise ConfigurationError(f"must be at least {MIN_GAMMA_TAU}, got {gamma_tau}", field="gamma_tau")

    cfg = CavityConfig(float(eps), float(kappa_eg), float(gamma_tau),
                       normalize_phase(phase_d), normalize_phase(phase_f))
    logger.debug("cavity: eps=%g f/d=%g d/lambda=%g gamma_tau=%g",
                 cfg.eps, cfg.f_over_d, cfg.d_over_lambda, cfg.gamma_tau)
    return cfg


def omega0_tau_from_gamma_tau(gamma_tau):
    """Single-mode vacuum Rabi frequency Ω₀τ for Γ = τΩ₀²/2."""
    return math.sqrt(2.0 * gamma_tau)


def gamma_tau_from_omega0_tau(omega0_tau):
    """Inverse of omega0_tau_from_gamma_tau."""
    return 0.5 * omega0_tau ** 2


def prolate_to_cartesian(phi, eta, xi, d=2.0):
    """
    Map prolate-ellipsoidal coordinates onto Cartesian ones.

    x = (d/2)√((1−η²)(ξ²−1)) cos φ, y = (d/2)√((1−η²)(ξ²−1)) sin φ,
    z = (d/2) η ξ. The foci are (ξ=1, η=±1).

    Args:
        phi: azimuth in [0, 2π)
        eta: η in [−1, 1]
        xi: ξ ≥ 1
        d: focal distance

    Returns:
        tuple: (x, y, z), scalars or arrays matching the inputs
    """
    phi = np.asarray(phi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any(np.abs(eta) > 1.0 + DOMAIN_SLACK):
        raise DomainError("eta must lie in [-1, 1]", context={'eta': eta.tolist()})
    if np.any(xi < 1.0 - DOMAIN_SLACK):
        raise DomainError("xi must be at least 1", context={'xi': xi.tolist()})
    if np.any((phi < -DOMAIN_SLACK) | (phi > TWO_PI + DOMAIN_SLACK)):
        raise DomainError("phi must lie in [0, 2π)", context={'phi': phi.tolist()})
    if d <= 0.0:
        raise DomainError(f"focal distance must be positive, got {d}")

    half = 0.5 * d
    eta = np.clip(eta, -1.0, 1.0)
    xi = np.maximum(xi, 1.0)
    # (1−η)(1+η) and (ξ−1)(ξ+1) keep precision next to the foci
    rho = half * np.sqrt((1.0 - eta) * (1.0 + eta) * (xi - 1.0) * (xi + 1.0))
    x = rho * np.cos(phi)
    y = rho * np.sin(phi)
    z = half * eta * xi
    if x.ndim == 0:
        return float(x), float(y), float(z)
    return x, y, z


def cartesian_to_prolate(x, y, z, d=2.0):
    """
    Inverse of prolate_to_cartesian.

    Uses the focal distances r± to (0, 0, ±d/2): ξ = (r₊ + r₋)/d and
    η = (r₋ − r₊)/d. On the symmetry axis φ is returned as 0.

    Returns:
        tuple: (phi, eta, xi)
    """
    if d <= 0.0:
        raise DomainError(f"focal distance must be positive, got {d}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    half = 0.5 * d

    rho = np.hypot(x, y)
    r_plus = np.hypot(rho, z - half)
    r_minus = np.hypot(rho, z + half)
    xi = np.maximum((r_plus + r_minus) / d, 1.0)
    eta = np.clip((r_minus - r_plus) / d, -1.0, 1.0)
    phi = np.where(rho > 0.0, np.mod(np.arctan2(y, x), TWO_PI), 0.0)
    phi = np.where(phi >= TWO_PI, 0.0, phi)

    if phi.ndim == 0:
        return float(phi), float(eta), float(xi)
    return phi, eta, xi


def boundary_semi_axes(cfg, d=2.0):
    """
    Semi-axes (a, b) of the cavity wall ξ = ξ_b.

    Returns:
        tuple: a = (d/2)ξ_b along z, b = (d/2)√(ξ_b² − 1) transverse
    """
    xi_b = cfg.xi_boundary
    return 0.5 * d * xi_b, 0.5 * d * math.sqrt((xi_b - 1.0) * (xi_b + 1.0))


def is_inside(cfg, x, y, z, d=2.0):
    """True where a Cartesian point lies inside or on the cavity wall."""
    a, b = boundary_semi_axes(cfg, d)
    x, y, z = (np.asarray(c, dtype=float) for c in (x, y, z))
    return (x * x + y * y) / (b * b) + (z * z) / (a * a) <= 1.0 + DOMAIN_SLACK
