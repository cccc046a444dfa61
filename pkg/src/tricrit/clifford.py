"""Clifford circuits over {H, S, CNOT, X, Y, Z}.

A circuit acts three ways: by conjugation on :class:`PauliString`, on exact
kets (Gaussian-integer amplitudes with a shared ``2**(-k/2)`` scale), and as
a dense unitary on density matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionError, ValidationError
from .pauli import PauliString

ONE_QUBIT = ("H", "S", "X", "Y", "Z")
GATE_KINDS = ONE_QUBIT + ("CNOT",)

_MATS = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1.0]),
}


@dataclass(frozen=True)
class ExactKet:
    """State vector ``amps * 2**(-k/2)`` with Gaussian-integer ``amps``."""

    amps: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return self.amps.shape[0].bit_length() - 1

    def vector(self) -> np.ndarray:
        return self.amps * 2.0 ** (-self.k / 2)

    def norm2(self) -> tuple[int, int]:
        """Exact squared norm as ``(numerator, 2**k)``."""
        re, im = _int_parts(self.amps)
        return int(sum(re * re + im * im)), 1 << self.k

    def inner(self, other: "ExactKet") -> tuple[complex, int]:
        """``<self|other>`` as a Gaussian integer over ``2**((k1+k2)/2)``."""
        return complex(np.vdot(self.amps, other.amps)), self.k + other.k

    def same_ray(self, other: "ExactKet") -> bool:
        """Exact test that both kets give the same projector."""
        s, k = self.inner(other)
        a, b = int(round(s.real)), int(round(s.imag))
        return a * a + b * b == 1 << k

    def reduced(self) -> "ExactKet":
        """Divide out common factors of (1+i) so amplitudes stay small.

        The ray is unchanged; the global phase moves by a multiple of pi/4.
        """
        amps, k = self.amps, self.k
        while k >= 1:
            re, im = _int_parts(amps)
            if np.any((re + im) % 2):
                break
            # (a+bi)/(1+i) = ((a+b) + (b-a)i)/2
            amps = ((re + im) // 2) + 1j * ((im - re) // 2)
            k -= 1
        return ExactKet(np.asarray(amps, dtype=complex), k)


def _int_parts(amps):
    re = np.rint(amps.real).astype(np.int64)
    im = np.rint(amps.imag).astype(np.int64)
    return re, im


def basis_ket(n: int, index: int = 0) -> ExactKet:
    a = np.zeros(1 << n, dtype=complex)
    a[index] = 1
    return ExactKet(a, 0)


@dataclass
class CliffordCircuit:
    """Ordered gate list; ``gates[0]`` is applied first."""

    n: int
    gates: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    def __post_init__(self):
        self.gates = [(g, tuple(q)) for g, q in self.gates]
        for g, qs in self.gates:
            self._check_gate(g, qs)

    def _check_gate(self, g, qs):
        if g not in GATE_KINDS:
            raise ValidationError(f"unknown gate {g!r}")
        want = 2 if g == "CNOT" else 1
        if len(qs) != want or any(not 0 <= q < self.n for q in qs) or len(set(qs)) != want:
            raise ValidationError(f"bad targets {qs} for {g} on {self.n} qubits")

    def append(self, g: str, *qs: int) -> "CliffordCircuit":
        self._check_gate(g, qs)
        self.gates.append((g, tuple(qs)))
        return self

    def extend(self, other: "CliffordCircuit") -> "CliffordCircuit":
        if other.n != self.n:
            raise DimensionError("circuits act on different qubit counts")
        self.gates.extend(other.gates)
        return self

    def __len__(self):
        return len(self.gates)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g, _ in self.gates:
            out[g] = out.get(g, 0) + 1
        return out

    def inverse(self) -> "CliffordCircuit":
        inv = []
        for g, qs in reversed(self.gates):
            if g == "S":
                inv.extend([("S", qs)] * 3)
            else:
                inv.append((g, qs))
        return CliffordCircuit(self.n, inv)

    # -- actions -----------------------------------------------------------
    def conjugate(self, p: PauliString) -> PauliString:
        """Return ``U p U^dagger``."""
        if p.n != self.n:
            raise DimensionError("Pauli and circuit act on different qubit counts")
        x, z, ph = list(p.x), list(p.z), p.phase
        for g, qs in self.gates:
            ph += 2 * _conj_gate(g, qs, x, z)
        return PauliString(self.n, tuple(x), tuple(z), ph)

    def apply_ket(self, ket: ExactKet) -> ExactKet:
        if ket.n != self.n:
            raise DimensionError("ket and circuit act on different qubit counts")
        amps, k = ket.amps.copy(), ket.k
        for g, qs in self.gates:
            amps, k = _ket_gate(self.n, g, qs, amps, k)
            if g == "H":
                r = ExactKet(amps, k).reduced()
                amps, k = r.amps, r.k
        return ExactKet(amps, k)

    def unitary(self) -> np.ndarray:
        d = 1 << self.n
        u = np.eye(d, dtype=complex)
        for g, qs in self.gates:
            u = gate_matrix(self.n, g, qs) @ u
        return u

    def to_list(self) -> list[list]:
        return [[g, list(qs)] for g, qs in self.gates]

    @classmethod
    def from_list(cls, n: int, data) -> "CliffordCircuit":
        return cls(n, [(g, tuple(qs)) for g, qs in data])


def _conj_gate(g, qs, x, z) -> int:
    """Update bits in place; return 1 if the Hermitian sign flips."""
    if g == "CNOT":
        c, t = qs
        r = x[c] & z[t] & (x[t] ^ z[c] ^ 1)
        x[t] ^= x[c]
        z[c] ^= z[t]
        return r
    (q,) = qs
    if g == "H":
        r = x[q] & z[q]
        x[q], z[q] = z[q], x[q]
        return r
    if g == "S":
        r = x[q] & z[q]
        z[q] ^= x[q]
        return r
    if g == "X":
        return z[q]
    if g == "Z":
        return x[q]
    return x[q] ^ z[q]  # Y


def _bit(n, q):
    return 1 << (n - 1 - q)


def _ket_gate(n, g, qs, amps, k):
    idx = np.arange(1 << n)
    if g == "CNOT":
        c, t = qs
        src = np.where(idx & _bit(n, c), idx ^ _bit(n, t), idx)
        return amps[src], k
    (q,) = qs
    b = _bit(n, q)
    one = (idx & b) != 0
    if g == "X":
        return amps[idx ^ b], k
    if g == "Z":
        return np.where(one, -amps, amps), k
    if g == "S":
        return np.where(one, 1j * amps, amps), k
    if g == "Y":
        flipped = amps[idx ^ b]
        return np.where(one, 1j * flipped, -1j * flipped), k
    # H
    a0 = amps[idx & ~b]
    a1 = amps[idx | b]
    return np.where(one, a0 - a1, a0 + a1), k + 1


def gate_matrix(n: int, g: str, qs) -> np.ndarray:
    """Dense ``2**n`` unitary for one gate."""
    if g == "CNOT":
        d = 1 << n
        c, t = qs
        idx = np.arange(d)
        dst = np.where(idx & _bit(n, c), idx ^ _bit(n, t), idx)
        m = np.zeros((d, d), dtype=complex)
        m[dst, idx] = 1
        return m
    (q,) = qs
    ops = [np.eye(2)] * n
    ops[q] = _MATS[g]
    return reduce(np.kron, ops)


def sample_clifford(n: int, rng: np.random.Generator, length: int | None = None) -> CliffordCircuit:
    """Random word in H, S, CNOT.

    Long words mix well but the result is only approximately uniform over the
    Clifford group.
    """
    if length is None:
        length = 10 * n * n + 20
    circ = CliffordCircuit(n)
    for _ in range(length):
        r = rng.random()
        if n > 1 and r < 0.4:
            c, t = rng.choice(n, size=2, replace=False)
            circ.append("CNOT", int(c), int(t))
        elif r < 0.7:
            circ.append("H", int(rng.integers(n)))
        else:
            circ.append("S", int(rng.integers(n)))
    return circ
