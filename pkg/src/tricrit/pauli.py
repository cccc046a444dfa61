"""Pauli strings in symplectic form.

A ``PauliString`` holds ``i**phase`` times a tensor product of the Hermitian
single-qubit Paulis, with qubit 0 as the leftmost tensor factor (most
significant bit of a computational-basis index).  ``x = z = 1`` on a qubit
means ``Y`` itself, so ``phase`` is 0 or 2 exactly when the operator is
Hermitian.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionError, ValidationError

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}


def _g(x1, z1, x2, z2):
    """Exponent of i picked up by one qubit of a Hermitian-form product."""
    if x1 == 0 and z1 == 0:
        return 0
    if x1 == 1 and z1 == 1:
        return z2 - x2
    if x1 == 1:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


@dataclass(frozen=True)
class PauliString:
    n: int
    x: tuple[int, ...]
    z: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if len(self.x) != self.n or len(self.z) != self.n:
            raise ValidationError("bit vectors must have length n")
        if not all(b in (0, 1) for b in self.x + self.z):
            raise ValidationError("bit vectors must be binary")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, (0,) * n, (0,) * n, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels like ``"XIZ"``, ``"-YY"`` or ``"iXZ"``."""
        phase = 0
        s = label.strip()
        if s.startswith("+"):
            s = s[1:]
        elif s.startswith("-"):
            phase, s = 2, s[1:]
        if s.startswith("i"):
            phase, s = phase + 1, s[1:]
        try:
            bits = [_BITS[c] for c in s.upper()]
        except KeyError as exc:
            raise ValidationError(f"bad Pauli label {label!r}") from exc
        return cls(len(bits), tuple(b[0] for b in bits), tuple(b[1] for b in bits), phase)

    @classmethod
    def from_code(cls, n: int, xb: int, zb: int, phase: int = 0) -> "PauliString":
        """Build from integer bit masks (qubit 0 is the most significant bit)."""
        x = tuple((xb >> (n - 1 - q)) & 1 for q in range(n))
        z = tuple((zb >> (n - 1 - q)) & 1 for q in range(n))
        return cls(n, x, z, phase)

    @property
    def code(self) -> tuple[int, int]:
        xb = zb = 0
        for q in range(self.n):
            xb = (xb << 1) | self.x[q]
            zb = (zb << 1) | self.z[q]
        return xb, zb

    @property
    def letters(self) -> str:
        return "".join(_LETTERS[(a, b)] for a, b in zip(self.x, self.z))

    @property
    def label(self) -> str:
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase]
        return prefix + self.letters

    @property
    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValidationError(f"{self.label} is not Hermitian")
        return 1 if self.phase == 0 else -1

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, 0)

    def commutes(self, other: "PauliString") -> bool:
        _check_n(self, other)
        s = sum(a * d + b * c for a, b, c, d in zip(self.x, self.z, other.x, other.z))
        return s % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def to_matrix(self) -> np.ndarray:
        xb, zb = self.code
        d = 1 << self.n
        idx = np.arange(d)
        m = np.zeros((d, d), dtype=complex)
        m[idx ^ xb, idx] = _column_phases(self.n, xb, zb)
        return (1j ** self.phase) * m

    def __str__(self):
        return self.label


def _check_n(a: PauliString, b: PauliString):
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a @ b`` with exact power-of-i phase."""
    _check_n(a, b)
    ph = a.phase + b.phase
    for x1, z1, x2, z2 in zip(a.x, a.z, b.x, b.z):
        ph += _g(x1, z1, x2, z2)
    x = tuple(p ^ q for p, q in zip(a.x, b.x))
    z = tuple(p ^ q for p, q in zip(a.z, b.z))
    return PauliString(a.n, x, z, ph)


def popcount(v):
    """Bit count for ints or integer numpy arrays."""
    if isinstance(v, (int, np.integer)):
        return int(v).bit_count()
    v = np.asarray(v, dtype=np.int64)
    c = np.zeros_like(v)
    while np.any(v):
        c += v & 1
        v = v >> 1
    return c


def _column_phases(n: int, xb: int, zb: int) -> np.ndarray:
    """``c[x]`` with ``P|x> = c[x] |x ^ xb>`` for the Hermitian-form Pauli."""
    idx = np.arange(1 << n)
    signs = 1 - 2 * (popcount(idx & zb) & 1)
    return (1j ** popcount(xb & zb)) * signs


def all_pauli_codes(n: int):
    """Yield ``(xb, zb)`` over all 4**n Paulis, identity first."""
    for xb, zb in product(range(1 << n), repeat=2):
        yield xb, zb


def pauli_letters(n: int, xb: int, zb: int) -> str:
    return PauliString.from_code(n, xb, zb).letters


@dataclass
class PauliDecomposition:
    """``rho = I/d + (1/d) * sum_P coeffs[P] * P`` with ``coeffs[P] = Tr(rho P)``."""

    n: int
    identity: float
    coeffs: dict[str, float]

    def reconstruct(self) -> np.ndarray:
        d = 1 << self.n
        rho = self.identity * np.eye(d, dtype=complex)
        for lab, t in self.coeffs.items():
            rho = rho + t * PauliString.from_label(lab).to_matrix()
        return rho / d

    def l1_norm(self) -> float:
        return float(sum(abs(t) for t in self.coeffs.values()))

    def vector(self) -> np.ndarray:
        """Coefficients in ``all_pauli_codes`` order, identity excluded."""
        return np.array(list(self.coeffs.values()))


def pauli_expectations(rho: np.ndarray) -> np.ndarray:
    """Array ``E[xb, zb] = Tr(rho P_{xb,zb})`` for every Pauli.

    Uses the per-``xb`` off-diagonal band plus a Walsh-Hadamard sum over
    ``zb``; cost is ``O(d^2 log d)``.
    """
    rho = np.asarray(rho)
    d = rho.shape[0]
    n = d.bit_length() - 1
    if rho.shape != (d, d) or (1 << n) != d:
        raise DimensionError("expected a square matrix of size 2**n")
    idx = np.arange(d)
    out = np.empty((d, d), dtype=complex)
    for xb in range(d):
        # Tr(rho P) = sum_x c_x rho[x, x ^ xb], c_x = i^{|xb&zb|} (-1)^{zb.x}
        band = rho[idx, idx ^ xb]
        out[xb] = _walsh(band)
        out[xb] *= 1j ** popcount(xb & idx)
    return out


def _walsh(v: np.ndarray) -> np.ndarray:
    """``w[zb] = sum_x (-1)^{popcount(zb & x)} v[x]``."""
    w = np.array(v, dtype=complex)
    h = 1
    d = w.shape[0]
    while h < d:
        w = w.reshape(-1, 2, h)
        a = w[:, 0, :].copy()
        b = w[:, 1, :]
        w = np.stack([a + b, a - b], axis=1).reshape(d)
        h *= 2
    return w


def pauli_decompose(rho: np.ndarray, atol: float = 1e-10) -> PauliDecomposition:
    """Real Pauli coefficients of a Hermitian unit-trace matrix."""
    rho = np.asarray(rho, dtype=complex)
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValidationError("matrix is not Hermitian")
    d = rho.shape[0]
    n = d.bit_length() - 1
    e = pauli_expectations(rho)
    if abs(e[0, 0] - 1) > atol:
        raise ValidationError(f"trace is {e[0, 0].real:.6g}, expected 1")
    coeffs = {}
    for xb, zb in all_pauli_codes(n):
        if xb == 0 and zb == 0:
            continue
        coeffs[pauli_letters(n, xb, zb)] = float(e[xb, zb].real)
    return PauliDecomposition(n, float(e[0, 0].real), coeffs)


def state_from_pauli(n: int, coeffs: dict[str, float]) -> np.ndarray:
    """Inverse of :func:`pauli_decompose` with identity coefficient fixed to 1."""
    d = 1 << n
    rho = np.eye(d, dtype=complex)
    for lab, c in coeffs.items():
        p = PauliString.from_label(lab)
        if p.n != n:
            raise DimensionError(f"label {lab!r} is not on {n} qubits")
        if p.is_identity:
            if abs(c - 1) > 1e-12:
                raise ValidationError("identity coefficient must be 1")
            continue
        rho = rho + c * p.to_matrix()
    return rho / d
