"""
Data records for simulation results.

This file defines:
1. AmplitudeState - the normalized initial excitation amplitudes of the two atoms
2. TimeSeries - atomic amplitudes and probabilities on a time grid, with
   truncation metadata and CSV/JSON export
"""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from errors import ConfigurationError, DomainError

CSV_COLUMNS = ['t_over_tau', 'P1', 'P2', 'reB1', 'imB1', 'reB2', 'imB2']

# Allowed deviation of |b1|² + |b2|² from 1
NORM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AmplitudeState:
    """Initial amplitudes b¹(0), b²(0) with |b¹|² + |b²|² = 1."""

    b1: complex
    b2: complex

    def __post_init__(self):
        norm = abs(self.b1) ** 2 + abs(self.b2) ** 2
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise DomainError(f"initial state must be normalized, |b1|²+|b2|² = {norm!r}")

    @classmethod
    def from_components(cls, re1, im1, re2, im2, normalize=True):
        """
        Build a state from four real components.

        Args:
            re1, im1, re2, im2 (float): real and imaginary parts
            normalize (bool): rescale to unit norm instead of rejecting

        Returns:
            AmplitudeState
        """
        b1, b2 = complex(re1, im1), complex(re2, im2)
        norm = math.sqrt(abs(b1) ** 2 + abs(b2) ** 2)
        if norm == 0.0:
            raise ConfigurationError("initial state must not be the zero vector", field="init")
        if normalize:
            b1, b2 = b1 / norm, b2 / norm
        return cls(b1, b2)

    @classmethod
    def excited(cls, atom=1):
        """Atom `atom` excited, the other in its ground state."""
        return cls(1.0 + 0j, 0j) if atom == 1 else cls(0j, 1.0 + 0j)

    @classmethod
    def symmetric(cls, sign=1):
        """(1, ±1)/√2."""
        root = 1.0 / math.sqrt(2.0)
        return cls(complex(root), complex(sign * root))

    def swapped(self):
        """Same state with the atom labels exchanged."""
        return AmplitudeState(self.b2, self.b1)

    def to_dict(self):
        return {
            'b1': [self.b1.real, self.b1.imag],
            'b2': [self.b2.real, self.b2.imag],
        }


@dataclass
class TimeSeries:
    """
    Atomic amplitudes on a time grid (global phase e^{−iω_eg t} removed).

    Attributes:
        t: grid in units of τ, sorted, non-negative
        b1, b2: complex amplitudes
        method: "pathsum", "laplace" or "reference"
        metadata: truncation diagnostics and configuration echo
    """

    t: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.b1 = np.asarray(self.b1, dtype=complex)
        self.b2 = np.asarray(self.b2, dtype=complex)
        if not (self.t.shape == self.b1.shape == self.b2.shape):
            raise DomainError("time grid and amplitude arrays must have equal length")

    @property
    def P1(self):
        return np.abs(self.b1) ** 2

    @property
    def P2(self):
        return np.abs(self.b2) ** 2

    def probability_excess(self):
        """max_t (P1 + P2) − 1; positive values break the probability bound."""
        return float(np.max(self.P1 + self.P2) - 1.0)

    def max_discrepancy(self, other):
        """
        Sup-norm distance of the probabilities to another series on the same grid.

        Returns:
            dict: {'P1': ..., 'P2': ..., 'max': ...}
        """
        if self.t.shape != other.t.shape or np.max(np.abs(self.t - other.t)) > 1e-12:
            raise DomainError("time series are on different grids")
        d1 = float(np.max(np.abs(self.P1 - other.P1)))
        d2 = float(np.max(np.abs(self.P2 - other.P2)))
        return {'P1': d1, 'P2': d2, 'max': max(d1, d2)}

    def to_frame(self):
        """Convert the series to a DataFrame with the CSV column layout."""
        return pd.DataFrame({
            't_over_tau': self.t,
            'P1': self.P1,
            'P2': self.P2,
            'reB1': self.b1.real,
            'imB1': self.b1.imag,
            'reB2': self.b2.real,
            'imB2': self.b2.imag,
        }, columns=CSV_COLUMNS)

    def to_csv(self, path):
        """Write the CSV: '.' decimals, '\\n' line ends, 17 significant digits."""
        self.to_frame().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return path

    def to_dict(self):
        """Metadata record for JSON sidecars (no sample arrays)."""
        return {
            'method': self.method,
            'points': int(self.t.size),
            't_max': float(self.t[-1]) if self.t.size else 0.0,
            'max_P1_plus_P2': float(np.max(self.P1 + self.P2)) if self.t.size else 0.0,
            'metadata': self.metadata,
        }


def json_default(value):
    """json.dump fallback for numpy scalars/arrays, complex numbers and records."""
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    return str(value)
