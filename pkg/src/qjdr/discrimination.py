"""Minimum-error discrimination: closed forms, POVMs and certificates.

Ensembles are sequences of ``(prior, rho)`` pairs.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import DegenerateEnsemble, DimensionMismatch, ElementCountMismatch
from .qmath import as_matrix, eigvalsh, hermitian_part, psd_inv_sqrt, trace_norm
from .validation import check_ensemble, check_povm

SUPPORT_CUTOFF = 1e-12
YKL_CERTIFIED = 1e-6


@dataclass(frozen=True, eq=False)
class Povm:
    """Complete set of positive operators, stored as a ``(M, d, d)`` array."""

    elements: np.ndarray

    def __post_init__(self):
        elements = check_povm(self.elements)
        elements.setflags(write=False)
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self):
        return self.elements.shape[1]

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    def probabilities(self, rho):
        """Outcome distribution ``Tr(Π_m ρ)`` for one state."""
        return np.einsum("mij,ji->m", self.elements, rho).real


@dataclass(frozen=True, eq=False)
class DiscriminationResult:
    p_err: float
    povm: Povm
    ykl_residual: float
    iterations: int
    converged: bool = True
    success_history: list = field(default_factory=list, repr=False)

    @property
    def certified(self):
        return self.ykl_residual <= YKL_CERTIFIED


def _success(weighted, elements):
    return float(np.einsum("mij,mji->", elements, weighted).real)


def povm_error_prob(ensemble, povm):
    """Average error ``1 - Σ p_m Tr(Π_m ρ_m)``, clamped to ``[0, 1]``."""
    priors, states = check_ensemble(ensemble)
    elements = povm.elements if isinstance(povm, Povm) else np.asarray(povm, dtype=complex)
    if len(elements) != len(priors):
        raise ElementCountMismatch(f"{len(elements)} POVM elements for {len(priors)} states")
    if elements.shape[1:] != states.shape[1:]:
        raise DimensionMismatch(f"POVM dimension {elements.shape[1]} != state dimension {states.shape[1]}")
    raw = 1.0 - _success(priors[:, None, None] * states, elements)
    if not -1e-9 <= raw <= 1.0 + 1e-9:
        raise ValueError(f"error probability {raw} outside [0, 1]; inputs are not valid states/POVM")
    return min(max(raw, 0.0), 1.0)


def helstrom_binary(rho0, rho1, p0=0.5):
    """Helstrom error ``(1 - ||p0 ρ0 - p1 ρ1||_1) / 2`` for two states."""
    rho0 = as_matrix(rho0, "rho0")
    rho1 = as_matrix(rho1, "rho1")
    if rho0.shape != rho1.shape:
        raise DimensionMismatch(f"state shapes differ: {rho0.shape} vs {rho1.shape}")
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must lie in [0, 1], got {p0}")
    gamma = hermitian_part(p0 * rho0 - (1.0 - p0) * rho1)
    return min(max(0.5 * (1.0 - trace_norm(gamma)), 0.0), 0.5)


def helstrom_bpsk_optical(magnitude):
    """Optimal single-pulse error for equiprobable ``|α>`` vs ``|-α>``.

    Uses ``|<-α|α>|**2 = exp(-4|α|**2)``.
    """
    if magnitude < 0:
        raise ValueError(f"magnitude must be >= 0, got {magnitude}")
    # -expm1(-x) keeps precision where 1 - exp(-x) cancels
    return 0.5 * (1.0 - math.sqrt(-math.expm1(-4.0 * magnitude**2)))


def classical_codeword_baseline(magnitude, info_pulses=2):
    """Codeword error when ``info_pulses`` pulses are decoded independently."""
    if info_pulses < 1:
        raise ValueError(f"info_pulses must be >= 1, got {info_pulses}")
    p = helstrom_bpsk_optical(magnitude)
    return 1.0 - (1.0 - p) ** info_pulses


def _complete(root, kernel, weighted_ops):
    m = len(weighted_ops)
    elements = root @ weighted_ops @ root + kernel / m
    return hermitian_part(elements)


def pretty_good_measurement(ensemble):
    """Square-root measurement ``S^{-1/2} p_m ρ_m S^{-1/2}``.

    The kernel of ``S = Σ p_m ρ_m`` is shared equally among the elements.
    """
    priors, states = check_ensemble(ensemble, min_size=2)
    weighted = priors[:, None, None] * states
    s = hermitian_part(weighted.sum(axis=0))
    if np.max(np.abs(s)) <= SUPPORT_CUTOFF:
        raise DegenerateEnsemble("average state is zero")
    root, kernel = psd_inv_sqrt(s, SUPPORT_CUTOFF)
    return Povm(_complete(root, kernel, weighted))


def ykl_residual(weighted, elements):
    """Largest violation of ``Y - p_m ρ_m >= 0`` with ``Y = Σ p_m ρ_m Π_m``."""
    y = hermitian_part(np.einsum("mij,mjk->ik", weighted, elements))
    worst = 0.0
    for w in weighted:
        worst = max(worst, -eigvalsh(hermitian_part(y - w))[-1])
    return max(worst, 0.0)


def optimal_povm(ensemble, tol=1e-12, max_iter=10000, shift=1e-3):
    """Minimum-error POVM by the Ježek-Řeháček-Fiurášek fixed point.

    Starting from the pretty-good measurement, iterates
    ``Π_m <- Λ^{-1/2} ρ̃_m Π_m ρ̃_m Λ^{-1/2}`` with ``ρ̃_m = p_m ρ_m`` and
    ``Λ = Σ ρ̃_m Π_m ρ̃_m`` until the success probability changes by less
    than ``tol``.

    With ``shift > 0`` the update uses ``ρ̃_m + μ I`` where ``μ`` is
    ``shift`` times the largest eigenvalue of ``Σ ρ̃_m``. Adding the same
    multiple of the identity to every operator moves the success
    probability by the constant ``μ d`` and leaves the stationarity
    conditions unchanged, while keeping ``Λ`` well conditioned for
    nearly pure states. ``shift=0`` runs the unshifted iteration.

    Returns
    -------
    DiscriminationResult
        ``converged`` is False when ``max_iter`` was reached with a YKL
        residual above ``100 * tol``; the result is returned regardless.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    priors, states = check_ensemble(ensemble, min_size=2)
    if shift < 0:
        raise ValueError(f"shift must be >= 0, got {shift}")
    weighted = priors[:, None, None] * states
    mu = shift * eigvalsh(hermitian_part(weighted.sum(axis=0)))[0]
    shifted = weighted + mu * np.eye(weighted.shape[1])
    elements = np.array(pretty_good_measurement(ensemble).elements)
    success = _success(weighted, elements)
    history = [success]
    it = 0
    stalled = False
    while it < max_iter:
        it += 1
        sandwiched = shifted @ elements @ shifted
        lam = hermitian_part(sandwiched.sum(axis=0))
        root, kernel = psd_inv_sqrt(lam, SUPPORT_CUTOFF)
        elements = _complete(root, kernel, sandwiched)
        new = _success(weighted, elements)
        history.append(new)
        stalled = abs(new - success) < tol
        success = new
        if stalled:
            break
    residual = ykl_residual(weighted, elements)
    converged = stalled or residual <= 100 * tol
    p_err = min(max(1.0 - success, 0.0), 1.0)
    return DiscriminationResult(
        p_err=p_err,
        povm=Povm(elements),
        ykl_residual=residual,
        iterations=it,
        converged=converged,
        success_history=history,
    )


def random_povm(dim, num_elements, rng):
    """Random POVM from normalised Wishart-like positive operators."""
    g = rng.normal(size=(num_elements, dim, dim)) + 1j * rng.normal(size=(num_elements, dim, dim))
    ops = g @ np.conj(np.swapaxes(g, -1, -2))
    root, _ = psd_inv_sqrt(hermitian_part(ops.sum(axis=0)))
    return Povm(hermitian_part(root @ ops @ root))
