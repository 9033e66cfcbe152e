"""scikit-learn style wrappers around the channel and the receivers.

Receivers follow the classifier protocol with density matrices as
samples: ``X`` has shape ``(n_samples, d, d)``, ``y`` holds codeword
labels and ``sample_weight`` carries priors. Samples that share a label
are mixed (weighted by ``sample_weight``) into one class state, and the
class priors are the normalised label weights. ``predict_proba`` returns
the probability of each decision given a state, and ``score`` returns the
average success probability, ``1 - p_err``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .discrimination import optimal_povm, pretty_good_measurement
from .exceptions import DimensionMismatch
from .transduction import (
    DEFAULT_COUPLING_TIME,
    DEFAULT_FOCK_CUTOFF,
    CoherentPulse,
    TransductionParams,
    bloch_vector,
    transduce_pulse,
)
from .validation import check_density_matrix
from . import vqc


def check_states(X, *, dim=None):
    """Validate a stack of density matrices, returning ``(n, d, d)`` complex."""
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise DimensionMismatch(f"expected states of shape (n_samples, d, d), got {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("no states given")
    if dim is not None and X.shape[1] != dim:
        raise DimensionMismatch(f"states have dimension {X.shape[1]}, estimator was fit on {dim}")
    for i, rho in enumerate(X):
        check_density_matrix(rho, name=f"X[{i}]")
    return X


def check_pulses(X):
    """Validate an ``(n, 2)`` array of ``(magnitude, phase)`` rows."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None]
    if X.ndim != 2 or X.shape[1] != 2:
        raise DimensionMismatch(f"expected pulses of shape (n_samples, 2), got {X.shape}")
    if not np.all(np.isfinite(X)) or np.any(X[:, 0] < 0):
        raise ValueError("pulse magnitudes must be finite and non-negative")
    return X


def ensemble_to_dataset(ensemble):
    """``(prior, rho)`` pairs to ``(X, y, sample_weight)``."""
    pairs = list(ensemble)
    X = np.stack([np.asarray(r, dtype=complex) for _, r in pairs])
    return X, np.arange(len(pairs)), np.array([float(p) for p, _ in pairs])


def _class_ensemble(X, y, sample_weight):
    X = check_states(X)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({X.shape[0]},)")
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    if w.shape != y.shape or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("sample_weight must be non-negative, match y and have a positive sum")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("need at least two distinct labels")
    pairs = []
    for c in classes:
        mask = y == c
        wc = w[mask].sum()
        state = np.tensordot(w[mask], X[mask], axes=1) / wc if wc > 0 else X[mask].mean(axis=0)
        pairs.append((wc / w.sum(), state))
    return classes, pairs


class PulseTransducer(TransformerMixin, BaseEstimator):
    """Map ``(magnitude, phase)`` pulses through the transduction channel.

    ``transform`` returns ``(n, 2, 2)`` qubit density matrices, or
    ``(n, 3)`` Bloch vectors when ``output="bloch"``.
    """

    def __init__(self, efficiency=1.0, thermal_occupancy=0.0, fock_cutoff=DEFAULT_FOCK_CUTOFF,
                 coupling_time=DEFAULT_COUPLING_TIME, output="density"):
        self.efficiency = efficiency
        self.thermal_occupancy = thermal_occupancy
        self.fock_cutoff = fock_cutoff
        self.coupling_time = coupling_time
        self.output = output

    def fit(self, X=None, y=None):
        if self.output not in ("density", "bloch"):
            raise ValueError(f"output must be 'density' or 'bloch', got {self.output!r}")
        if X is not None:
            check_pulses(X)
        self.params_ = TransductionParams(
            self.efficiency, self.thermal_occupancy, self.fock_cutoff, self.coupling_time
        )
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_pulses(X)
        states = np.stack([transduce_pulse(CoherentPulse(m, ph), self.params_) for m, ph in X])
        if self.output == "bloch":
            return np.array([bloch_vector(r) for r in states])
        return states


class _Receiver(ClassifierMixin, BaseEstimator):
    def _prepare(self, X, y, sample_weight):
        self.classes_, pairs = _class_ensemble(X, y, sample_weight)
        self.priors_ = np.array([p for p, _ in pairs])
        self.dim_ = pairs[0][1].shape[0]
        return pairs

    def predict_proba(self, X):
        """Probability of each decision, shape ``(n_samples, n_classes)``."""
        check_is_fitted(self, "classes_")
        X = check_states(X, dim=self.dim_)
        return self._decision_probabilities(X)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def score(self, X, y, sample_weight=None):
        """Weighted average probability of decoding the true label."""
        proba = self.predict_proba(X)
        y = np.asarray(y)
        index = np.searchsorted(self.classes_, y)
        if np.any(index >= len(self.classes_)) or np.any(self.classes_[index] != y):
            raise ValueError("y contains labels not seen during fit")
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        return float(np.sum(w * proba[np.arange(len(y)), index]) / w.sum())


class _PovmReceiver(_Receiver):
    def _decision_probabilities(self, X):
        probs = np.einsum("mij,nji->nm", self.povm_.elements, X).real
        return np.clip(probs, 0.0, 1.0)


class PrettyGoodReceiver(_PovmReceiver):
    """Square-root measurement receiver."""

    def fit(self, X, y, sample_weight=None):
        pairs = self._prepare(X, y, sample_weight)
        self.povm_ = pretty_good_measurement(pairs)
        p = self._decision_probabilities(np.stack([r for _, r in pairs]))
        self.p_err_ = float(1.0 - np.sum(self.priors_ * np.diag(p)))
        return self


class OptimalReceiver(_PovmReceiver):
    """Minimum-error POVM receiver with a YKL optimality certificate."""

    def __init__(self, tol=1e-12, max_iter=10000, shift=1e-3):
        self.tol = tol
        self.max_iter = max_iter
        self.shift = shift

    def fit(self, X, y, sample_weight=None):
        pairs = self._prepare(X, y, sample_weight)
        result = optimal_povm(pairs, tol=self.tol, max_iter=self.max_iter, shift=self.shift)
        self.result_ = result
        self.povm_ = result.povm
        self.p_err_ = result.p_err
        self.ykl_residual_ = result.ykl_residual
        self.n_iter_ = result.iterations
        return self


class VariationalReceiver(_Receiver):
    """Trained circuit plus computational-basis readout and ML decoding."""

    def __init__(self, num_layers=3, restarts=8, max_outer_iters=200,
                 optimizer="gradient_parameter_shift", step_size=0.1, seed=0,
                 convergence_tol=1e-7, inner_steps=20):
        self.num_layers = num_layers
        self.restarts = restarts
        self.max_outer_iters = max_outer_iters
        self.optimizer = optimizer
        self.step_size = step_size
        self.seed = seed
        self.convergence_tol = convergence_tol
        self.inner_steps = inner_steps

    def train_config(self):
        return vqc.TrainConfig(
            restarts=self.restarts,
            max_outer_iters=self.max_outer_iters,
            optimizer=self.optimizer,
            step_size=self.step_size,
            seed=self.seed,
            convergence_tol=self.convergence_tol,
            inner_steps=self.inner_steps,
        )

    def fit(self, X, y, sample_weight=None):
        pairs = self._prepare(X, y, sample_weight)
        n = int(round(np.log2(self.dim_)))
        if 2**n != self.dim_:
            raise DimensionMismatch(f"state dimension {self.dim_} is not a power of two")
        self.ansatz_ = vqc.AnsatzSpec(n, self.num_layers)
        result = vqc.train(self.ansatz_, pairs, self.train_config())
        self.result_ = result
        self.params_ = result.best_params
        self.assignment_ = result.assignment
        self.p_err_ = result.p_err
        self.trajectory_ = result.trajectory
        self.n_iter_ = result.iterations
        return self

    def _decision_probabilities(self, X):
        u = vqc.circuit_unitary(self.ansatz_, self.params_)
        outcomes = np.einsum("oi,nij,oj->no", u, X, u.conj()).real
        onehot = self.assignment_[:, None] == np.arange(len(self.classes_))[None, :]
        return np.clip(outcomes, 0.0, None) @ onehot
