"""Optical pulse to qubit transduction channel.

The channel is phenomenological: the received coherent amplitude is
attenuated by ``sqrt(efficiency)``, the microwave mode carries a thermal
background of mean occupancy ``thermal_occupancy``, and a resonant
Jaynes-Cummings interaction writes the field into a qubit that starts in
its ground state. The field is then discarded.

Basis conventions: the qubit ground state ``|g>`` is index 0 (Bloch vector
``(0, 0, 1)``), the excited state ``|e>`` is index 1, and joint operators
are ordered field ⊗ qubit.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy import constants

from .exceptions import CutoffTooSmall, DimensionMismatch, TruncationRisk
from .qmath import PAULI_X, PAULI_Y, PAULI_Z, expm_unitary, hermitian_part, partial_trace
from .validation import check_density_matrix

THERMAL_DEFICIT_MAX = 1e-6
DEFAULT_FOCK_CUTOFF = 40
DEFAULT_COUPLING_TIME = math.pi / 2
DEFAULT_FREQUENCY_HZ = 10e9

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g|
SIGMA_MINUS = SIGMA_PLUS.T.copy()
GROUND = np.array([[1, 0], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class CoherentPulse:
    """Received optical pulse ``|magnitude * exp(i phase)>``."""

    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.magnitude) and self.magnitude >= 0):
            raise ValueError(f"magnitude must be finite and >= 0, got {self.magnitude}")
        if not math.isfinite(self.phase):
            raise ValueError(f"phase must be finite, got {self.phase}")
        object.__setattr__(self, "magnitude", float(self.magnitude))
        object.__setattr__(self, "phase", float(self.phase) % (2 * math.pi))

    @property
    def amplitude(self):
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class TransductionParams:
    efficiency: float = 1.0
    thermal_occupancy: float = 0.0
    fock_cutoff: int = DEFAULT_FOCK_CUTOFF
    coupling_time: float = DEFAULT_COUPLING_TIME

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency}")
        if not (math.isfinite(self.thermal_occupancy) and self.thermal_occupancy >= 0):
            raise ValueError(f"thermal_occupancy must be >= 0, got {self.thermal_occupancy}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 2:
            raise ValueError(f"fock_cutoff must be an integer >= 2, got {self.fock_cutoff}")
        if not (math.isfinite(self.coupling_time) and self.coupling_time > 0):
            raise ValueError(f"coupling_time must be > 0, got {self.coupling_time}")
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))


def nbar_from_temperature(temperature_kelvin, frequency_hz=DEFAULT_FREQUENCY_HZ):
    """Bose-Einstein occupancy of a mode at ``frequency_hz`` and temperature."""
    if not temperature_kelvin > 0 or not frequency_hz > 0:
        raise ValueError("temperature and frequency must be strictly positive")
    x = constants.h * frequency_hz / (constants.k * temperature_kelvin)
    if x > 700:
        return 0.0
    return float(1.0 / math.expm1(x))


def thermal_trace_deficit(nbar, n_max):
    """Probability mass of a thermal state above Fock level ``n_max``."""
    if nbar == 0:
        return 0.0
    return float((nbar / (1.0 + nbar)) ** (n_max + 1))


def thermal_populations(nbar, n_max):
    n = np.arange(n_max + 1)
    if nbar == 0:
        return (n == 0).astype(float)
    return (1.0 / (1.0 + nbar)) * (nbar / (1.0 + nbar)) ** n


def thermal_state(nbar, n_max):
    """Thermal state truncated to Fock levels ``0..n_max``.

    Raises
    ------
    CutoffTooSmall
        If the discarded tail ``(nbar / (1 + nbar)) ** (n_max + 1)`` is at
        least ``1e-6``.
    """
    if not nbar >= 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    deficit = thermal_trace_deficit(nbar, n_max)
    if deficit >= THERMAL_DEFICIT_MAX:
        raise CutoffTooSmall(
            f"thermal state with nbar={nbar} loses {deficit:.3e} of its trace above "
            f"Fock level {n_max}; raise fock_cutoff"
        )
    return np.diag(thermal_populations(nbar, n_max)).astype(complex)


def annihilation(n_max):
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def displacement_operator(beta, n_max):
    """Truncated displacement ``exp(beta a^† - beta^* a)``.

    Built as ``expm_unitary`` of the Hermitian generator
    ``i (beta a^† - beta^* a)`` at unit time. ``|beta|**2`` may not exceed
    ``n_max / 4``.
    """
    beta = complex(beta)
    if abs(beta) ** 2 > n_max / 4:
        raise TruncationRisk(
            f"|beta|^2 = {abs(beta) ** 2:.4g} exceeds n_max/4 = {n_max / 4:.4g}; raise fock_cutoff"
        )
    a = annihilation(n_max)
    gen = 1j * (beta * a.conj().T - beta.conjugate() * a)
    return expm_unitary(hermitian_part(gen), 1.0)


def jaynes_cummings_hamiltonian(n_max):
    """``a σ+ + a^† σ-`` on field ⊗ qubit with unit coupling."""
    a = annihilation(n_max)
    return np.kron(a, SIGMA_PLUS) + np.kron(a.conj().T, SIGMA_MINUS)


@lru_cache(maxsize=16)
def _jc_propagator(n_max, coupling_time):
    u = expm_unitary(jaynes_cummings_hamiltonian(n_max), coupling_time)
    u.setflags(write=False)
    return u


def field_state(pulse, params):
    """Attenuated, heated field state in the truncated Fock basis."""
    beta = math.sqrt(params.efficiency) * pulse.amplitude
    n_max = params.fock_cutoff
    disp = displacement_operator(beta, n_max)
    thermal = thermal_state(params.thermal_occupancy, n_max)
    return disp @ thermal @ disp.conj().T


def transduce_pulse(pulse, params):
    """Map a received pulse to the qubit state left by the channel.

    The qubit state is renormalised to unit trace; the pre-normalisation
    deficit is bounded by the thermal tail check (< 1e-6) plus the
    displacement truncation error.
    """
    rho_f = field_state(pulse, params)
    joint = np.kron(rho_f, GROUND)
    u = _jc_propagator(params.fock_cutoff, float(params.coupling_time))
    joint = u @ joint @ u.conj().T
    qubit = partial_trace(joint, [params.fock_cutoff + 1, 2], keep=[1])
    qubit = hermitian_part(qubit)
    qubit /= np.trace(qubit).real
    return qubit


def bloch_vector(rho):
    """``(Tr ρσx, Tr ρσy, Tr ρσz)`` of a single-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DimensionMismatch(f"Bloch vector needs a 2x2 state, got shape {rho.shape}")
    rho = check_density_matrix(rho, dim=2)
    return tuple(float(np.trace(rho @ p).real) for p in (PAULI_X, PAULI_Y, PAULI_Z))


def azimuth(rho):
    x, y, _ = bloch_vector(rho)
    return math.atan2(y, x) % (2 * math.pi)
