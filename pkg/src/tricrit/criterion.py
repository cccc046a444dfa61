"""Triangle witnesses, detection scans, Triangle Negativity and reduction.

A witness is a neighbouring triple with one member marked as subtracted;
its value on ``rho`` is ``F_i + F_j - F_k`` with ``F_s = Tr(rho psi_s)``, so
a negative value certifies magic.  Scans evaluate the fidelity vector once
and then combine it over the integer triple table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dense
from .errors import DimensionError, ValidationError
from .stabilizer import (
    StabilizerTriple,
    canonicalize_triple,
    check_capacity,
    enumerate_stabilizer_states,
    triple_array,
)

DEFAULT_TOL = 1e-9
LOG_BASE = 2
ORIENTATION = "value = F_i + F_j - F_k; detected when value < -tolerance"


@dataclass(frozen=True)
class TriangleWitness:
    triple: StabilizerTriple
    orientation: int  # position (0, 1, 2) of the subtracted state

    def __post_init__(self):
        if self.orientation not in (0, 1, 2):
            raise ValidationError("orientation must be 0, 1 or 2")

    @property
    def n(self) -> int:
        return self.triple.n

    @property
    def subtracted(self) -> int:
        return self.triple.indices[self.orientation]

    @property
    def added(self) -> tuple[int, int]:
        t = self.triple.indices
        return tuple(t[i] for i in range(3) if i != self.orientation)

    def operator(self) -> np.ndarray:
        st = enumerate_stabilizer_states(self.n)
        i, j = self.added
        return st[i].projector() + st[j].projector() - st[self.subtracted].projector()

    def to_dict(self) -> dict:
        return {"state_indices": list(self.triple.indices), "orientation": self.orientation,
                "subtracted": self.subtracted}


@dataclass
class DetectionReport:
    n: int
    witness_count: int
    min_value: float
    argmin: TriangleWitness
    detected: bool
    tolerance: float
    negativity: float | None = None
    log_base: int = LOG_BASE
    extra: dict = field(default_factory=dict)

    @property
    def boundary(self) -> bool:
        return not self.detected and self.min_value <= 0

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "witness_count": self.witness_count,
            "min_value": self.min_value,
            "detected": self.detected,
            "boundary": self.boundary,
            "tolerance": self.tolerance,
            "argmin": self.argmin.to_dict(),
            "negativity": self.negativity,
            "log_base": self.log_base,
            "orientation": ORIENTATION,
        }
        out.update(self.extra)
        return out


def _n_of(rho) -> int:
    return dense.n_qubits(np.asarray(rho))


def witness_values(rho) -> np.ndarray:
    """All oriented witness values, shape ``(M, 3)``; column ``o`` subtracts member ``o``."""
    n = _n_of(rho)
    check_capacity(n)
    f = enumerate_stabilizer_states(n).fidelities(rho)
    return _values_from_fidelities(f, triple_array(n))


def _values_from_fidelities(f: np.ndarray, tri: np.ndarray) -> np.ndarray:
    ft = f[tri]
    return ft.sum(axis=1, keepdims=True) - 2 * ft


def witness_value(rho, w: TriangleWitness) -> float:
    rho = np.asarray(rho)
    if rho.shape[0] != 1 << w.n:
        raise DimensionError("state and witness sizes differ")
    st = enumerate_stabilizer_states(w.n)
    i, j = w.added
    v = st.vectors
    vals = [np.vdot(v[s], rho @ v[s]).real for s in (i, j, w.subtracted)]
    return float(vals[0] + vals[1] - vals[2])


def detect(rho, tol: float = DEFAULT_TOL, with_negativity: bool = False) -> DetectionReport:
    """Scan every oriented Triangle witness."""
    rho = np.asarray(rho)
    n = _n_of(rho)
    check_capacity(n)
    vals = witness_values(rho)
    flat = int(np.argmin(vals))
    m, o = divmod(flat, 3)
    a, b, c = (int(x) for x in triple_array(n)[m])
    w = TriangleWitness(StabilizerTriple(n, a, b, c), o)
    vmin = float(vals[m, o])
    neg = _negativity_from_values(n, vals) if with_negativity else None
    return DetectionReport(n, vals.size, vmin, w, vmin < -tol, tol, neg)


def detect_single_qubit(rho) -> tuple[bool, float]:
    """Closed-form octahedron test: magic iff ``|x| + |y| + |z| > 1``."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionError("single-qubit test needs a 2x2 state")
    margin = float(np.abs(dense.bloch_vector(rho)).sum() - 1)
    return margin > 0, margin


def negativity_denominator(n: int) -> int:
    return 4 * ((1 << n) - 1) * math.prod((1 << l) + 1 for l in range(1, n + 1))


def _negativity_from_values(n: int, vals: np.ndarray) -> float:
    return math.log(math.fsum(np.abs(vals).ravel()) / negativity_denominator(n), LOG_BASE)


def triangle_negativity(rho) -> float:
    """Base-2 log of the normalized sum of absolute witness values."""
    return _negativity_from_values(_n_of(rho), witness_values(rho))


def reduce_to_single_qubit(rho, w: TriangleWitness):
    """Rotate the witness to canonical form and project qubits 1..n-1 onto ``|0>``.

    Returns ``(sigma, probability, circuit)``; ``sigma`` is ``None`` when the
    projection has zero weight.  ``witness_value(rho, w)`` equals
    ``probability * (1 + x + y - z) / 2`` for the Bloch vector of ``sigma``.
    """
    rho = np.asarray(rho)
    n = w.n
    if rho.shape[0] != 1 << n:
        raise DimensionError("state and witness sizes differ")
    circ = canonicalize_triple(w.triple, apex=w.subtracted)
    r = dense.apply_circuit(rho, circ)
    if n == 1:
        return r, 1.0, circ
    sigma, p = dense.postselect(r, range(1, n), [0] * (n - 1))
    return sigma, p, circ


def canonical_facet_value(sigma) -> float:
    """``Tr[(|+><+| + |+i><+i| - |0><0|) sigma] = (1 + x + y - z)/2``."""
    x, y, z = dense.bloch_vector(sigma)
    return float((1 + x + y - z) / 2)


def detect_two_copies(rho, tol: float = DEFAULT_TOL) -> DetectionReport:
    """Full four-qubit scan of ``rho (x) rho`` for a two-qubit ``rho``."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise DimensionError("two-copy test needs a two-qubit state")
    return detect(np.kron(rho, rho), tol)


__all__ = [
    "TriangleWitness",
    "DetectionReport",
    "witness_value",
    "witness_values",
    "detect",
    "detect_single_qubit",
    "triangle_negativity",
    "reduce_to_single_qubit",
    "detect_two_copies",
    "canonical_facet_value",
    "negativity_denominator",
]
