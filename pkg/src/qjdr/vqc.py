"""Variational joint-detection receiver.

A hardware-efficient circuit (Ry·Rz on every qubit, then ``L`` rounds of a
CZ ring followed by another Ry·Rz layer) is applied to each codeword
state, the register is read out in the computational basis, and outcomes
are mapped to codewords by maximum likelihood. Parameters are trained to
minimise the resulting error probability.

Parameter layout: the rotation pair for qubit ``q`` in rotation layer
``k`` sits at ``2 * (k * n + q)`` (Ry angle) and ``2 * (k * n + q) + 1``
(Rz angle). Qubit 0 is the most significant bit of an outcome index.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .exceptions import DimensionMismatch, ParamLengthMismatch
from .validation import check_ensemble

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class AnsatzSpec:
    num_qubits: int = 3
    num_layers: int = 3

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be >= 1, got {self.num_qubits}")
        if self.num_layers < 0:
            raise ValueError(f"num_layers must be >= 0, got {self.num_layers}")

    @property
    def parameter_count(self):
        return 2 * self.num_qubits * (self.num_layers + 1)

    @property
    def dim(self):
        return 2**self.num_qubits

    def cz_pairs(self):
        """Ring of CZ pairs ``(i, i+1 mod n)`` without repeats."""
        n = self.num_qubits
        if n == 1:
            return []
        if n == 2:
            return [(0, 1)]
        return [(i, (i + 1) % n) for i in range(n)]


class Optimizer(str, Enum):
    GRADIENT_PARAMETER_SHIFT = "gradient_parameter_shift"
    SPSA = "spsa"


@dataclass(frozen=True)
class TrainConfig:
    restarts: int = 8
    max_outer_iters: int = 200
    optimizer: Optimizer = Optimizer.GRADIENT_PARAMETER_SHIFT
    step_size: float = 0.1
    seed: int = 0
    convergence_tol: float = 1e-7
    inner_steps: int = 20
    spsa_a: float = 0.15
    spsa_c: float = 0.1
    spsa_alpha: float = 0.602
    spsa_gamma: float = 0.101

    def __post_init__(self):
        object.__setattr__(self, "optimizer", Optimizer(self.optimizer))
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_outer_iters < 0:
            raise ValueError(f"max_outer_iters must be >= 0, got {self.max_outer_iters}")
        if self.inner_steps < 1:
            raise ValueError(f"inner_steps must be >= 1, got {self.inner_steps}")
        if not self.step_size > 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if not self.convergence_tol > 0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class TrainResult:
    best_params: np.ndarray
    p_err: float
    trajectory: list
    assignment: np.ndarray
    iterations: int = 0
    restart_p_errs: list = field(default_factory=list)


def _check_params(spec, params):
    params = np.asarray(params, dtype=float)
    if params.shape[-1] != spec.parameter_count:
        raise ParamLengthMismatch(
            f"ansatz with {spec.num_qubits} qubits and {spec.num_layers} layers takes "
            f"{spec.parameter_count} parameters, got {params.shape[-1]}"
        )
    if not np.all(np.isfinite(params)):
        raise ValueError("circuit parameters must be finite")
    return params


def _cz_diagonal(spec):
    n = spec.num_qubits
    idx = np.arange(spec.dim)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    sign = np.ones(spec.dim)
    for i, j in spec.cz_pairs():
        sign = sign * np.where(bits[:, i] & bits[:, j], -1.0, 1.0)
    return sign


def _rotation_layers(angles):
    """Batched ``⊗_q Rz(φ_q) Ry(θ_q)`` for angles of shape (..., n, 2)."""
    half = 0.5 * angles
    c, s = np.cos(half[..., 0]), np.sin(half[..., 0])
    ez = np.exp(-1j * half[..., 1])
    # Rz(φ) Ry(θ) = [[e^{-iφ/2} c, -e^{-iφ/2} s], [e^{iφ/2} s, e^{iφ/2} c]]
    gates = np.stack([np.stack([ez * c, -ez * s], -1), np.stack([ez.conj() * s, ez.conj() * c], -1)], -2)
    out = gates[..., 0, :, :]
    lead = out.shape[:-2]
    for q in range(1, angles.shape[-2]):
        d = out.shape[-1]
        g = gates[..., q, :, :]
        out = (out[..., :, None, :, None] * g[..., None, :, None, :]).reshape(lead + (2 * d, 2 * d))
    return out


def circuit_unitaries(spec, params):
    """Circuit unitaries for a batch of parameter vectors, shape (B, 2^n, 2^n)."""
    params = _check_params(spec, np.atleast_2d(params))
    n = spec.num_qubits
    layers = _rotation_layers(params.reshape(params.shape[0], spec.num_layers + 1, n, 2))
    cz = _cz_diagonal(spec)[None, :, None]
    u = layers[:, 0]
    for k in range(1, spec.num_layers + 1):
        u = layers[:, k] @ (cz * u)
    return u


def circuit_unitary(spec, params):
    return circuit_unitaries(spec, params)[0]


def _check_state_dim(spec, rho):
    if rho.shape[-2:] != (spec.dim, spec.dim):
        raise DimensionMismatch(
            f"{spec.num_qubits}-qubit circuit needs {spec.dim}x{spec.dim} states, got {rho.shape[-2:]}"
        )


def apply_circuit(spec, params, rho):
    """``U ρ U^†`` for the ansatz unitary ``U(params)``."""
    rho = np.asarray(rho, dtype=complex)
    _check_state_dim(spec, rho)
    u = circuit_unitary(spec, params)
    return u @ rho @ u.conj().T


def measurement_distribution(rho):
    """Computational-basis outcome probabilities of a ``2**n``-dim state."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[-1]
    if rho.ndim != 2 or rho.shape[0] != d or d & (d - 1):
        raise DimensionMismatch(f"expected a 2^n x 2^n state, got shape {rho.shape}")
    probs = np.diagonal(rho).real.copy()
    if probs.min() < -1e-9:
        raise ValueError(f"state has negative population {probs.min():.3e}")
    probs[probs < 0] = 0.0
    return probs


def _distributions(unitaries, states):
    # P[b, m, o] = <o| U_b ρ_m U_b^† |o>
    rotated = unitaries[:, None] @ states[None]
    probs = np.einsum("bmoj,boj->bmo", rotated, unitaries.conj()).real
    return np.clip(probs, 0.0, None)


def ml_assignment(distributions, priors):
    """Maximum-likelihood decision rule for outcome distributions.

    Parameters
    ----------
    distributions : array_like, shape (M, K)
        ``P(o | m)`` for each codeword ``m`` and outcome ``o``.
    priors : array_like, shape (M,)

    Returns
    -------
    assignment : ndarray of int, shape (K,)
        Codeword chosen for each outcome; ties go to the lowest index.
    p_err : float
        ``1 - Σ_o max_m p_m P(o | m)``.
    """
    distributions = np.asarray(distributions, dtype=float)
    priors = np.asarray(priors, dtype=float)
    if distributions.ndim != 2 or distributions.shape[0] < 2:
        raise ValueError(f"need an (M >= 2, K) array of distributions, got shape {distributions.shape}")
    if priors.shape != (distributions.shape[0],):
        raise DimensionMismatch(f"{priors.shape[0]} priors for {distributions.shape[0]} distributions")
    joint = priors[:, None] * distributions
    assignment = np.argmax(joint, axis=0)
    p_err = 1.0 - float(joint.max(axis=0).sum())
    return assignment, min(max(p_err, 0.0), 1.0)


def fixed_assignment_error(distributions, priors, assignment):
    """Error of a fixed outcome-to-codeword map; works on batched distributions."""
    distributions = np.asarray(distributions, dtype=float)
    m = distributions.shape[-2]
    onehot = np.asarray(assignment)[None, :] == np.arange(m)[:, None]
    return 1.0 - np.einsum("m,...mo,mo->...", np.asarray(priors, dtype=float), distributions, onehot)


def _ensemble_arrays(spec, ensemble):
    priors, states = check_ensemble(ensemble, min_size=2)
    _check_state_dim(spec, states)
    return priors, states


def loss_p_err(spec, params, ensemble):
    """Error probability of the circuit followed by ML outcome assignment."""
    priors, states = _ensemble_arrays(spec, ensemble)
    dists = _distributions(circuit_unitaries(spec, params), states)[0]
    return ml_assignment(dists, priors)[1]


def _shift_batch(params):
    p = params.size
    shifts = HALF_PI * np.eye(p)
    return np.concatenate([params + shifts, params - shifts])


def _fixed_loss(spec, params, priors, states, assignment):
    # success = Σ_o <o| U p_a(o) ρ_a(o) U^† |o>, one operator per outcome
    u = circuit_unitaries(spec, params)
    targets = priors[assignment, None, None] * states[assignment]
    rows = np.einsum("boi,oij->boj", u, targets)
    return 1.0 - np.einsum("boj,boj->b", rows, u.conj()).real


def _shift_grad(spec, params, priors, states, assignment):
    losses = _fixed_loss(spec, _shift_batch(params), priors, states, assignment)
    p = params.size
    return 0.5 * (losses[:p] - losses[p:])


def parameter_shift_grad(spec, params, ensemble, assignment):
    """Gradient of the fixed-assignment error by the parameter-shift rule.

    Each component is ``(L(θ_j + π/2) - L(θ_j - π/2)) / 2``, exact for
    Ry/Rz-generated parameters.
    """
    params = _check_params(spec, params)
    priors, states = _ensemble_arrays(spec, ensemble)
    return _shift_grad(spec, params, priors, states, np.asarray(assignment))


def _ml_loss(spec, params, priors, states):
    dists = _distributions(circuit_unitaries(spec, params), states)[0]
    return ml_assignment(dists, priors)


def _train_restart(spec, priors, states, config, rng):
    params = rng.uniform(0.0, 2 * math.pi, spec.parameter_count)
    assignment, loss = _ml_loss(spec, params, priors, states)
    best_params, best_loss, best_assign = params.copy(), loss, assignment
    history = [loss]
    k = 0
    outer = 0
    for outer in range(1, config.max_outer_iters + 1):
        for _ in range(config.inner_steps):
            if config.optimizer is Optimizer.SPSA:
                a_k = config.spsa_a / (k + 1) ** config.spsa_alpha
                c_k = config.spsa_c / (k + 1) ** config.spsa_gamma
                delta = rng.choice([-1.0, 1.0], size=params.size)
                pair = _fixed_loss(spec, np.stack([params + c_k * delta, params - c_k * delta]),
                                   priors, states, assignment)
                params = params - a_k * (pair[0] - pair[1]) / (2 * c_k) * delta
            else:
                params = params - config.step_size * _shift_grad(spec, params, priors, states, assignment)
            k += 1
        assignment, new_loss = _ml_loss(spec, params, priors, states)
        history.append(new_loss)
        if new_loss < best_loss:
            best_params, best_loss, best_assign = params.copy(), new_loss, assignment
        improved = loss - new_loss
        loss = new_loss
        if improved < config.convergence_tol:
            break
    return best_params, best_loss, best_assign, history, outer


def train(spec, ensemble, config=None):
    """Train the circuit from ``config.restarts`` seeded random starts.

    Each restart draws its initial angles from a generator seeded by
    ``(config.seed, restart)``, so results do not depend on execution
    order. The outer loop refreshes the ML assignment; between refreshes
    ``inner_steps`` optimizer steps run with the assignment frozen. A
    restart stops once an outer iteration improves the loss by less than
    ``convergence_tol``.

    The trajectory records ``(step, best_p_err_so_far)`` for every ML
    loss evaluation (one per outer iteration plus the initial point of
    each restart), numbered consecutively across restarts.
    """
    config = config or TrainConfig()
    priors, states = _ensemble_arrays(spec, ensemble)
    best = None
    trajectory = []
    restart_errs = []
    total = 0
    for r in range(config.restarts):
        rng = np.random.default_rng([config.seed, r])
        params, loss, assignment, history, outer = _train_restart(spec, priors, states, config, rng)
        restart_errs.append(loss)
        for value in history:
            so_far = value if not trajectory else min(trajectory[-1][1], value)
            trajectory.append((len(trajectory), so_far))
        total += outer
        if best is None or loss < best[1]:
            best = (params, loss, assignment)
    params, loss, assignment = best
    return TrainResult(
        best_params=params,
        p_err=float(loss),
        trajectory=trajectory,
        assignment=assignment,
        iterations=total,
        restart_p_errs=restart_errs,
    )
