"""Input validation helpers for states, ensembles and measurements."""

import numpy as np

from .exceptions import DimensionMismatch, ElementCountMismatch, InvalidState
from .qmath import HERMITIAN_ATOL, as_matrix, check_hermitian, eigvalsh

TRACE_ATOL = 1e-9
PSD_ATOL = 1e-9
COMPLETENESS_ATOL = 1e-8


def check_density_matrix(rho, *, dim=None, trace_atol=TRACE_ATOL, name="rho"):
    """Validate a density matrix and return it as a complex array.

    Checks Hermiticity (``HERMITIAN_ATOL``), unit trace within
    ``trace_atol`` and a minimum eigenvalue of at least ``-PSD_ATOL``.
    """
    rho = check_hermitian(as_matrix(rho, name), HERMITIAN_ATOL, name)
    if dim is not None and rho.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {rho.shape[0]}, expected {dim}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_atol:
        raise InvalidState(f"{name} has trace {tr:.12g}, expected 1 within {trace_atol:.0e}")
    lam_min = eigvalsh(rho)[-1]
    if lam_min < -PSD_ATOL:
        raise InvalidState(f"{name} has negative eigenvalue {lam_min:.3e}")
    return rho


def is_density_matrix(rho, **kwargs):
    try:
        check_density_matrix(rho, **kwargs)
    except (InvalidState, ValueError):
        return False
    return True


def check_povm(elements, *, dim=None, atol=COMPLETENESS_ATOL):
    """Validate POVM elements, returning a ``(M, d, d)`` complex array."""
    elements = np.asarray(elements, dtype=complex)
    if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
        raise DimensionMismatch(f"POVM elements must have shape (M, d, d), got {elements.shape}")
    d = elements.shape[1]
    if dim is not None and d != dim:
        raise DimensionMismatch(f"POVM acts on dimension {d}, expected {dim}")
    for m, el in enumerate(elements):
        check_hermitian(el, HERMITIAN_ATOL, f"POVM element {m}")
        lam = eigvalsh(el)[-1]
        if lam < -PSD_ATOL:
            raise InvalidState(f"POVM element {m} has negative eigenvalue {lam:.3e}")
    dev = np.max(np.abs(elements.sum(axis=0) - np.eye(d)))
    if dev > atol:
        raise InvalidState(f"POVM elements sum to identity only within {dev:.3e}")
    return elements


def check_ensemble(ensemble, *, min_size=1):
    """Split a sequence of ``(prior, rho)`` pairs into arrays.

    Returns
    -------
    priors : ndarray, shape (M,)
    states : ndarray, shape (M, d, d)
    """
    pairs = list(ensemble)
    if len(pairs) < min_size:
        raise ElementCountMismatch(f"ensemble needs at least {min_size} members, got {len(pairs)}")
    priors = np.array([float(p) for p, _ in pairs])
    if np.any(priors < 0) or abs(priors.sum() - 1.0) > 1e-9:
        raise InvalidState(f"priors must be non-negative and sum to 1, got {priors}")
    states = [as_matrix(r, f"state {m}") for m, (_, r) in enumerate(pairs)]
    d = states[0].shape[0]
    for m, r in enumerate(states):
        if r.shape != (d, d):
            raise DimensionMismatch(f"state {m} has shape {r.shape}, expected {(d, d)}")
    return priors, np.stack(states)
