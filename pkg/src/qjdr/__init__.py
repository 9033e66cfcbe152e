"""Quantum joint-detection receiver workbench.

Coherent BPSK pulses are transduced into qubit states through a lossy,
thermal Jaynes-Cummings channel and decoded jointly, either by an exact
minimum-error POVM or by a trained variational circuit.
"""

__version__ = "0.1.0"

from .codebook import Codebook, codeword_state, ensemble, load_codebook, parity_code_3_2
from .discrimination import (
    DiscriminationResult,
    Povm,
    classical_codeword_baseline,
    helstrom_binary,
    helstrom_bpsk_optical,
    optimal_povm,
    povm_error_prob,
    pretty_good_measurement,
)
from .estimators import OptimalReceiver, PrettyGoodReceiver, PulseTransducer, VariationalReceiver
from .transduction import (
    CoherentPulse,
    TransductionParams,
    bloch_vector,
    nbar_from_temperature,
    thermal_state,
    transduce_pulse,
)
from .vqc import AnsatzSpec, TrainConfig, TrainResult, loss_p_err, train

__all__ = [
    "AnsatzSpec",
    "Codebook",
    "CoherentPulse",
    "DiscriminationResult",
    "OptimalReceiver",
    "Povm",
    "PrettyGoodReceiver",
    "PulseTransducer",
    "TrainConfig",
    "TrainResult",
    "TransductionParams",
    "VariationalReceiver",
    "bloch_vector",
    "classical_codeword_baseline",
    "codeword_state",
    "ensemble",
    "helstrom_binary",
    "helstrom_bpsk_optical",
    "load_codebook",
    "loss_p_err",
    "nbar_from_temperature",
    "optimal_povm",
    "parity_code_3_2",
    "povm_error_prob",
    "pretty_good_measurement",
    "thermal_state",
    "train",
    "transduce_pulse",
]
