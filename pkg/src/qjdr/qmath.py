"""Dense complex matrix kernel.

Every operator in the package is a plain ``numpy`` complex array. Matrices
stay small (at most a few hundred rows), so all routines are dense and
built on a single Hermitian eigendecomposition.
"""

import numpy as np

from .exceptions import DimensionMismatch, NoConvergence, NotHermitian

HERMITIAN_ATOL = 1e-9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a, name="matrix"):
    """Coerce ``a`` to a finite 2-D complex array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def dag(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(a):
    return 0.5 * (a + dag(a))


def check_hermitian(a, atol=HERMITIAN_ATOL, name="matrix"):
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > atol:
        raise NotHermitian(f"{name} deviates from Hermitian by {dev:.3e} > {atol:.0e}")
    return a


def kron(a, b):
    """Kronecker product ``a ⊗ b``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _fix_phases(vecs):
    # first component above round-off made real and positive, per column
    scale = np.max(np.abs(vecs), axis=0, keepdims=True)
    mask = np.abs(vecs) > 1e-10 * np.maximum(scale, 1e-300)
    first = np.argmax(mask, axis=0)
    pivots = vecs[first, np.arange(vecs.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return vecs / phases


def herm_eig(a, atol=HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    a : array_like, shape (d, d)
        Hermitian matrix; entry-wise deviation from ``a^†`` must not
        exceed ``atol``.

    Returns
    -------
    evals : ndarray, shape (d,)
        Real eigenvalues in descending order.
    evecs : ndarray, shape (d, d)
        Orthonormal eigenvectors as columns. Each column is scaled so its
        first non-negligible component is real and positive.

    Raises
    ------
    NotHermitian
        If ``a`` is not Hermitian within ``atol``.
    NoConvergence
        If LAPACK fails to converge.
    """
    a = check_hermitian(a, atol)
    try:
        evals, evecs = np.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Hermitian eigensolver failed: {exc}") from exc
    order = np.argsort(-evals, kind="stable")
    return evals[order], _fix_phases(evecs[:, order])


def eigvalsh(a, atol=HERMITIAN_ATOL):
    a = check_hermitian(a, atol)
    try:
        return np.linalg.eigvalsh(hermitian_part(a))[::-1]
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Hermitian eigensolver failed: {exc}") from exc


def trace_norm(a, atol=HERMITIAN_ATOL):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(a, atol))))


def expm_unitary(h, t=1.0):
    """``exp(-i h t)`` for Hermitian ``h``, via eigendecomposition."""
    evals, evecs = herm_eig(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def psd_inv_sqrt(a, cutoff=1e-12):
    """Inverse square root of a PSD matrix restricted to its support.

    Eigenvalues ``<= cutoff`` are treated as kernel. Returns the pseudo
    inverse square root and the orthogonal projector onto the kernel.
    """
    evals, evecs = herm_eig(a)
    support = evals > cutoff
    inv = np.zeros_like(evals)
    inv[support] = 1.0 / np.sqrt(evals[support])
    root = (evecs * inv) @ evecs.conj().T
    ker = evecs[:, ~support]
    return root, ker @ ker.conj().T


def partial_trace(rho, dims, keep):
    """Reduce ``rho`` onto the subsystems listed in ``keep``.

    Parameters
    ----------
    rho : array_like, shape (D, D)
        Operator on the tensor product of subsystems with sizes ``dims``
        (first subsystem most significant).
    dims : sequence of int
        Subsystem dimensions; their product must equal ``D``.
    keep : iterable of int
        Indices of subsystems to retain. Output ordering follows
        ascending index regardless of the order given.
    """
    rho = as_matrix(rho, "rho")
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionMismatch(f"subsystem dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionMismatch(
            f"rho has shape {rho.shape} but subsystem dims {dims} multiply to {total}"
        )
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionMismatch(f"keep={keep} is not a non-empty subset of 0..{len(dims) - 1}")

    n = len(dims)
    tensor = rho.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # einsum labels: row index i, column index n+i; traced pairs share a label
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    for i in traced:
        letters[n + i] = letters[i]
    out = "".join(letters[i] for i in keep) + "".join(letters[n + i] for i in keep)
    reduced = np.einsum("".join(letters) + "->" + out, tensor)
    kd = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(kd, kd)
