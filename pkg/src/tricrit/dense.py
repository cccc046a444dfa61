"""Dense density-matrix kernel.

States are plain ``(d, d)`` complex numpy arrays; :func:`check_density`
enforces the invariants where inputs enter the package.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from .clifford import CliffordCircuit
from .errors import DimensionError, ValidationError

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9


def n_qubits(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = d.bit_length() - 1
    if (1 << n) != d:
        raise DimensionError(f"dimension {d} is not a power of two")
    return n


def check_density(rho, name: str = "state") -> np.ndarray:
    """Return ``rho`` as a complex array or raise naming the failed invariant."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"{name}: not a square matrix, shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERM_TOL:
        raise ValidationError(f"{name}: not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise ValidationError(f"{name}: trace is {tr:.12g}, expected 1")
    lmin = np.linalg.eigvalsh(rho).min()
    if lmin < PSD_TOL:
        raise ValidationError(f"{name}: not positive semidefinite (min eigenvalue {lmin:.3g})")
    return rho


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bloch_to_dm(x: float, y: float, z: float) -> np.ndarray:
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionError("Bloch vector needs a single-qubit state")
    return np.array([2 * rho[1, 0].real, 2 * rho[1, 0].imag, (rho[0, 0] - rho[1, 1]).real])


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.vdot(rho, rho).real)


def tensor(*rhos) -> np.ndarray:
    return reduce(np.kron, rhos)


def partial_trace(rho, keep, n: int | None = None) -> np.ndarray:
    """Reduce to the qubits in ``keep`` (order preserved as given)."""
    rho = np.asarray(rho)
    n = n_qubits(rho) if n is None else n
    keep = list(keep)
    if any(not 0 <= q < n for q in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"bad keep-set {keep} for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    # move kept to the front, then trace dropped pairs
    perm = keep + drop
    t = t.transpose(perm + [n + q for q in perm])
    k, m = len(keep), len(drop)
    t = t.reshape(1 << k, 1 << m, 1 << k, 1 << m)
    return np.einsum("ajbj->ab", t)


def partial_trace_dims(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace on a bipartite ``dims = (dA, dB)`` space; ``keep`` is 0 or 1."""
    da, db = dims
    t = np.asarray(rho).reshape(da, db, da, db)
    return np.einsum("ajbj->ab", t) if keep == 0 else np.einsum("iaib->ab", t)


def postselect(rho, qubits, outcome, n: int | None = None):
    """Project ``qubits`` onto computational ``outcome`` bits and trace them out.

    Returns ``(state, probability)``; a zero-probability branch gives
    ``(None, 0.0)`` instead of raising.
    """
    rho = np.asarray(rho)
    n = n_qubits(rho) if n is None else n
    qubits, outcome = list(qubits), list(outcome)
    if len(qubits) != len(outcome) or any(not 0 <= q < n for q in qubits):
        raise DimensionError(f"bad post-selection {qubits} -> {outcome}")
    rest = [q for q in range(n) if q not in qubits]
    t = rho.reshape([2] * (2 * n))
    index = [slice(None)] * (2 * n)
    for q, b in zip(qubits, outcome):
        index[q] = index[n + q] = int(b)
    block = t[tuple(index)].reshape(1 << len(rest), 1 << len(rest))
    p = float(np.trace(block).real)
    if p <= 1e-15:
        return None, 0.0
    return block / p, p


def apply_circuit(rho, circ: CliffordCircuit) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape[0] != 1 << circ.n:
        raise DimensionError("state and circuit sizes differ")
    u = circ.unitary()
    return u @ rho @ u.conj().T


def apply_unitary(rho, u) -> np.ndarray:
    return u @ rho @ u.conj().T


def eigen_max(rho) -> float:
    """Largest eigenvalue of a Hermitian matrix (LAPACK ``eigvalsh``)."""
    return float(np.linalg.eigvalsh(np.asarray(rho))[-1])


def eigen_min(rho) -> float:
    return float(np.linalg.eigvalsh(np.asarray(rho))[0])


# -- random states -------------------------------------------------------


def ginibre(d: int, k: int, rng: np.random.Generator, size=None) -> np.ndarray:
    shape = (d, k) if size is None else (size, d, k)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def sample_induced(d: int, k: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw from the induced measure: partial trace of a Haar pure state on ``d*k``.

    Implemented as ``G G^dagger / Tr(G G^dagger)`` with ``G`` a ``d x k``
    standard complex Gaussian matrix.  With ``size`` a stack is returned.
    """
    if d < 1 or k < 1:
        raise ValidationError("d and k must be positive")
    g = ginibre(d, k, rng, size)
    w = g @ np.swapaxes(g.conj(), -1, -2)
    tr = np.trace(w, axis1=-2, axis2=-1).real
    return w / (tr[..., None, None] if size is not None else tr)


def haar_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(d, 1, rng)[:, 0]
    return v / np.linalg.norm(v)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR with the diagonal phase fix."""
    q, r = np.linalg.qr(ginibre(d, d, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def seed_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent per-task generators so parallel runs are reproducible."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]
