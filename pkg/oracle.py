"""
Frequency-domain reference solution.

The Laplace transform b̃(Λ) = ∫₀^∞ e^{iΛt} b(t) dt of the atomic amplitudes
solves a 2×2 linear system whose entries are the spectral functions

    A_aa(Λ) = Γ/2 + Σ_diagonal A e^{iτ_p Λ}
    A_ab(Λ) = Σ_cross A e^{iτ_p Λ}

evaluated on the upper half plane. Everything here works in the detuning
δ = Λ − ω_eg, so e^{iτ_p Λ} = e^{iΦ_p} e^{iτ_p δ} and the carrier drops out.
The time-domain amplitudes come back through a Bromwich integral along
Im δ = C, with the undisturbed decay i b(0)/(δ + iΓ/2) subtracted before
the quadrature and added back exactly afterwards.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.fft import fft, next_fast_len
from scipy.integrate import solve_ivp

from cavity_config import DEFAULTS, get_thread_count
from errors import AccuracyError, ConfigurationError, DomainError
from models import AmplitudeState, TimeSeries
from quantization import PathWeightTable, build_weight_table

logger = logging.getLogger(__name__)

SQRT_HALF = 1.0 / math.sqrt(2.0)

# spectral samples per vectorized block
BLOCK_SIZE = 4096

# |δ + i(A11 ± A12)| below this is treated as a pole on the contour
POLE_GUARD = 1e-300


@dataclass
class SpectralFunction:
    """
    Truncated spectral sums A11(δ), A12(δ) built from a weight table.

    Attributes:
        cfg: cavity parameters
        table: hop weights entering the sums
        tolerance: target accuracy that fixed the delay cutoff
    """

    cfg: object
    table: PathWeightTable
    tolerance: float = DEFAULTS["spectral_tolerance"]

    def __post_init__(self):
        gamma = self.cfg.gamma
        self._diag_tau = np.array([e.delay for e in self.table.diagonal], dtype=float)
        self._diag_coef = np.array([gamma * e.weight_over_gamma * np.exp(1j * e.phase)
                                    for e in self.table.diagonal], dtype=complex)
        self._cross_tau = np.array([e.delay for e in self.table.cross], dtype=float)
        self._cross_coef = np.array([gamma * e.weight_over_gamma * np.exp(1j * e.phase)
                                     for e in self.table.cross], dtype=complex)

    @property
    def gamma(self):
        return self.cfg.gamma

    @property
    def delay_cutoff(self):
        return self.table.delay_cutoff

    @staticmethod
    def _series(delta, tau, coef):
        if tau.size == 0:
            return np.zeros(delta.shape, dtype=complex)
        out = np.empty(delta.shape, dtype=complex)
        for start in range(0, delta.size, BLOCK_SIZE):
            block = delta[start:start + BLOCK_SIZE]
            out[start:start + BLOCK_SIZE] = np.exp(1j * np.outer(block, tau)) @ coef
        return out

    def evaluate(self, delta):
        """
        Spectral sums at complex detuning(s) δ with Im δ > 0.

        Returns:
            tuple: (A11, A12) with the same shape as δ
        """
        scalar = np.ndim(delta) == 0
        delta = np.atleast_1d(np.asarray(delta, dtype=complex))
        if np.any(delta.imag <= 0.0):
            raise DomainError("spectral sums are defined for Im Λ > 0 only",
                              context={'min_imag': float(delta.imag.min())})
        a11 = 0.5 * self.gamma + self._series(delta, self._diag_tau, self._diag_coef)
        a12 = self._series(delta, self._cross_tau, self._cross_coef)
        if scalar:
            return complex(a11[0]), complex(a12[0])
        return a11, a12

    def spectral_A(self, delta, a, b):
        """A_ab(δ) for atoms a, b ∈ {1, 2}; diagonal and cross sums are label-symmetric."""
        if a not in (1, 2) or b not in (1, 2):
            raise DomainError(f"atom labels must be 1 or 2, got ({a}, {b})")
        a11, a12 = self.evaluate(delta)
        return a11 if a == b else a12

    def truncation_bound(self, imag):
        """
        Heuristic bound on |A_full − A_truncated| along Im δ = imag.

        Hops beyond the cutoff are damped by e^{−τ·imag}; rows beyond the
        cutoff carry at most two weights of order one each, one per unit of
        focal delay.
        """
        if imag <= 0.0:
            raise DomainError("truncation bound needs Im δ > 0")
        unit = self.cfg.focal_delay_unit
        tail = 2.0 * math.exp(-imag * self.delay_cutoff) / -math.expm1(-imag * unit)
        return self.gamma * (self.table.dropped_mass + tail)


def spectral_delay_cutoff(gamma, t_max, contour, tolerance=None):
    """
    Delay cutoff for the spectral sums along Im δ = contour.

    Keeps the neglected tail below tolerance·C²/(2Γ) relative to Γ.
    """
    tolerance = tolerance or DEFAULTS["spectral_tolerance"]
    extra = math.log(2.0 * gamma / (tolerance * contour ** 2)) / contour
    return t_max + max(extra, 0.0)


def resolvent(spectral, delta, initial):
    """
    Laplace-domain amplitudes (b̃¹, b̃²) at detuning(s) δ.

    Solves i·b(0) = (δ + iA)·b̃ in the symmetric/antisymmetric basis, where
    the 2×2 matrix is diagonal.
    """
    a11, a12 = spectral.evaluate(delta)
    b_s = (initial.b1 + initial.b2) * SQRT_HALF
    b_a = (initial.b1 - initial.b2) * SQRT_HALF
    den_s = delta + 1j * (a11 + a12)
    den_a = delta + 1j * (a11 - a12)
    if np.min(np.abs(den_s)) < POLE_GUARD or np.min(np.abs(den_a)) < POLE_GUARD:
        raise AccuracyError("resolvent is singular on the integration contour",
                            estimates={'min_denominator': float(min(np.min(np.abs(den_s)),
                                                                    np.min(np.abs(den_a))))})
    bt_s = 1j * b_s / den_s
    bt_a = 1j * b_a / den_a
    return (bt_s + bt_a) * SQRT_HALF, (bt_s - bt_a) * SQRT_HALF


def neumann_partial_sums(spectral, delta, initial, max_order):
    """
    Partial sums of the resolvent expanded in the delayed part of A.

    Term n is i·R₀(−iT R₀)ⁿ b(0) with R₀ = 1/(δ + iΓ/2) and T the
    delayed spectral matrix; these are the frequency-domain photon paths.

    Returns:
        list: max_order + 1 arrays of shape (2,) + shape(δ)
    """
    a11, a12 = spectral.evaluate(delta)
    r0 = 1.0 / (np.asarray(delta, dtype=complex) + 0.5j * spectral.gamma)
    t11 = a11 - 0.5 * spectral.gamma
    term = np.array([1j * r0 * initial.b1, 1j * r0 * initial.b2])
    total = term.copy()
    sums = [total.copy()]
    for _ in range(max_order):
        term = np.array([-1j * r0 * (t11 * term[0] + a12 * term[1]),
                         -1j * r0 * (a12 * term[0] + t11 * term[1])])
        total = total + term
        sums.append(total.copy())
    return sums


def _remainder(spectral, delta, initial):
    """b̃(δ) minus the free decay i·b(0)/(δ + iΓ/2)."""
    bt1, bt2 = resolvent(spectral, delta, initial)
    free = 1j / (delta + 0.5j * spectral.gamma)
    return bt1 - free * initial.b1, bt2 - free * initial.b2


def _evaluate_remainder(spectral, delta, initial, threads):
    chunks = [c for c in np.array_split(delta, max(1, min(threads, delta.size // BLOCK_SIZE)))
              if c.size]
    if threads == 1 or len(chunks) == 1:
        results = [_remainder(spectral, c, initial) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _remainder(spectral, c, initial), chunks))
    return (np.concatenate([r[0] for r in results]),
            np.concatenate([r[1] for r in results]))


def _is_uniform(grid):
    if grid.size < 2 or grid[0] != 0.0:
        return False
    step = grid[1] - grid[0]
    return step > 0.0 and np.allclose(np.diff(grid), step, rtol=1e-9, atol=1e-12)


def _bromwich(spectral, initial, grid, contour, window, period, threads):
    """
    Trapezoidal Bromwich sum along Im δ = contour over |Re δ| ≤ window.

    period is the aliasing period 2π/Δω; uniform grids starting at zero are
    summed with one FFT, anything else directly in blocks.
    """
    if _is_uniform(grid):
        h = grid[1] - grid[0]
        q = max(1, int(math.ceil(window * h / math.pi)))
        h_fine = h / q
        omega_edge = math.pi / h_fine
        size = next_fast_len(int(math.ceil(period / h_fine)) + 1)
        d_omega = 2.0 * math.pi / (size * h_fine)
        omega = -omega_edge + d_omega * np.arange(size)
        r1, r2 = _evaluate_remainder(spectral, omega + 1j * contour, initial, threads)
        index = q * np.arange(grid.size)
        t_fine = index * h_fine
        scale = np.exp(contour * t_fine + 1j * omega_edge * t_fine) * d_omega / (2.0 * math.pi)
        s1 = scale * fft(r1)[index]
        s2 = scale * fft(r2)[index]
        samples = size
    else:
        d_omega = 2.0 * math.pi / period
        count = 2 * int(math.ceil(window / d_omega)) + 1
        omega = np.linspace(-window, window, count)
        d_omega = omega[1] - omega[0]
        weights = np.full(count, d_omega)
        weights[0] = weights[-1] = 0.5 * d_omega
        r1, r2 = _evaluate_remainder(spectral, omega + 1j * contour, initial, threads)
        s1 = np.empty(grid.shape, dtype=complex)
        s2 = np.empty(grid.shape, dtype=complex)
        rows = max(1, (1 << 22) // count)
        for start in range(0, grid.size, rows):
            t = grid[start:start + rows]
            kernel = np.exp(-1j * np.outer(t, omega)) * weights
            s1[start:start + rows] = kernel @ r1
            s2[start:start + rows] = kernel @ r2
        damping = np.exp(contour * grid) / (2.0 * math.pi)
        s1 *= damping
        s2 *= damping
        samples = count

    decay = np.exp(-0.5 * spectral.gamma * grid)
    b1 = s1 + initial.b1 * decay
    b2 = s2 + initial.b2 * decay
    return b1, b2, samples


def inverse_laplace(spectral, initial, grid, contour=None, window=None, period=None,
                    self_test=True, threads=None):
    """
    Time-domain amplitudes from the Laplace-domain solution.

    Args:
        spectral (SpectralFunction): truncated spectral sums
        initial (AmplitudeState): b(0)
        grid: sorted times in units of τ
        contour (float): Im δ of the Bromwich line (default 1/t_max)
        window (float): half-width in Re δ (default window_factor·Γ + window_floor)
        period (float): aliasing period 2π/Δω (default t_max + alias_margin/C)
        self_test (bool): repeat with doubled window and halved step and
            require agreement to doubling_tolerance

    Returns:
        TimeSeries tagged method="laplace"
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid < 0.0) or np.any(np.diff(grid) < 0.0):
        raise ConfigurationError("time grid must be sorted and non-negative", field="points")
    t_max = float(grid[-1])
    gamma = spectral.gamma
    if t_max == 0.0:
        return TimeSeries(grid, np.full(grid.shape, initial.b1), np.full(grid.shape, initial.b2),
                          "laplace", {'contour': None})

    contour = contour if contour is not None else 1.0 / t_max
    if contour <= 0.0:
        raise DomainError(f"Bromwich contour must lie above the real axis, got C={contour}")
    window = window if window is not None else \
        DEFAULTS["window_factor"] * gamma + DEFAULTS["window_floor"]
    period = period if period is not None else t_max + DEFAULTS["alias_margin"] / contour
    if period < t_max:
        raise ConfigurationError(f"aliasing period {period} is shorter than t_max={t_max}",
                                 field="t_max")
    threads = threads or get_thread_count()

    b1, b2, samples = _bromwich(spectral, initial, grid, contour, window, period, threads)
    metadata = {
        'contour': contour,
        'window': window,
        'period': period,
        'samples': samples,
        'spectral_delay_cutoff': spectral.delay_cutoff,
        'spectral_truncation_bound': spectral.truncation_bound(contour),
        'table': spectral.table.summary(),
    }
    if self_test:
        f1, f2, fine_samples = _bromwich(spectral, initial, grid, contour, 2.0 * window,
                                         2.0 * period, threads)
        delta = float(max(np.max(np.abs(np.abs(f1) ** 2 - np.abs(b1) ** 2)),
                          np.max(np.abs(np.abs(f2) ** 2 - np.abs(b2) ** 2))))
        metadata['doubling_delta'] = delta
        metadata['samples'] = fine_samples
        if delta > DEFAULTS["doubling_tolerance"]:
            raise AccuracyError(
                f"Bromwich inversion not converged: doubling changed P by {delta:.3g}",
                estimates={'coarse': {'P1': np.abs(b1) ** 2, 'P2': np.abs(b2) ** 2},
                           'fine': {'P1': np.abs(f1) ** 2, 'P2': np.abs(f2) ** 2},
                           'delta': delta})
        b1, b2 = f1, f2

    logger.debug("laplace: C=%.4g window=%.4g period=%.4g samples=%d",
                 contour, window, period, metadata['samples'])
    return TimeSeries(grid, b1, b2, "laplace", metadata)


def simulate_laplace(cfg, initial, grid, weight_floor=None, contour=None, window=None,
                     tolerance=None, isolated=False, self_test=True, threads=None):
    """
    Atomic amplitudes from the Laplace-domain solution.

    Builds a weight table long enough that the neglected spectral tail stays
    below tolerance on the contour, then inverts.
    """
    grid = np.asarray(grid, dtype=float)
    t_max = float(grid[-1]) if grid.size else 0.0
    weight_floor = DEFAULTS["weight_floor"] if weight_floor is None else weight_floor
    c = contour if contour is not None else (1.0 / t_max if t_max > 0.0 else 1.0)
    cutoff = spectral_delay_cutoff(cfg.gamma, max(t_max, cfg.eps), c, tolerance)
    if isolated:
        table = PathWeightTable.isolated(cfg, cutoff)
    else:
        table = build_weight_table(cfg, cutoff, weight_floor)
    spectral = SpectralFunction(cfg, table, tolerance or DEFAULTS["spectral_tolerance"])
    return inverse_laplace(spectral, initial, grid, contour, window,
                           self_test=self_test, threads=threads)


def single_mode_amplitudes(omega0, t, initial):
    """
    Resonant two-atom single-mode amplitudes.

    The symmetric combination exchanges its excitation with the mode at
    Ω₀/√2; the antisymmetric combination is dark.
    """
    t = np.asarray(t, dtype=float)
    b_s = (initial.b1 + initial.b2) * SQRT_HALF * np.cos(omega0 * t * SQRT_HALF)
    b_a = (initial.b1 - initial.b2) * SQRT_HALF * np.ones_like(t)
    return (b_s + b_a) * SQRT_HALF, (b_s - b_a) * SQRT_HALF


def single_mode_reference(omega0, t, initial=None):
    """
    Excitation probabilities of two atoms on resonance with one lossless mode.

    For atom 1 initially excited P1 = cos⁴(Ω₀t/(2√2)) and P2 = sin⁴(Ω₀t/(2√2)).

    Returns:
        tuple: (P1, P2) arrays
    """
    initial = initial or AmplitudeState.excited(1)
    b1, b2 = single_mode_amplitudes(omega0, t, initial)
    return np.abs(b1) ** 2, np.abs(b2) ** 2


def three_state_reference(omega0, t, initial=None, rtol=None, atol=None):
    """
    Direct integration of |e,g,0⟩, |g,e,0⟩, |g,g,1⟩ with coupling Ω₀/2 per atom.

    Returns:
        tuple: (P1, P2) arrays on t
    """
    initial = initial or AmplitudeState.excited(1)
    t = np.asarray(t, dtype=float)
    g = 0.5 * omega0
    hamiltonian = np.array([[0.0, 0.0, g], [0.0, 0.0, g], [g, g, 0.0]], dtype=complex)

    def rhs(_, c):
        return -1j * (hamiltonian @ c)

    start = np.array([initial.b1, initial.b2, 0.0], dtype=complex)
    solution = solve_ivp(rhs, (0.0, float(t[-1])), start, t_eval=t, method="DOP853",
                         rtol=rtol or DEFAULTS["ode_rtol"], atol=atol or DEFAULTS["ode_atol"])
    if not solution.success:
        raise AccuracyError(f"three-state integration failed: {solution.message}")
    return np.abs(solution.y[0]) ** 2, np.abs(solution.y[1]) ** 2


def reference_series(omega0, grid, initial=None):
    """Single-mode amplitudes as a TimeSeries tagged method="reference"."""
    initial = initial or AmplitudeState.excited(1)
    b1, b2 = single_mode_amplitudes(omega0, grid, initial)
    return TimeSeries(grid, b1, b2, "reference", {'omega0_tau': omega0})
