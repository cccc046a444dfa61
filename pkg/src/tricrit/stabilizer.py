"""Exhaustive n-qubit stabilizer states and their neighbouring triples.

Every stabilizer state is, up to global phase,
``sum_{y in F_2^k} i^{l.y} (-1)^{q(y)} |t + yB>`` with ``B`` a reduced
row-echelon basis of a ``k``-dimensional subspace, ``t`` a coset
representative vanishing on the pivot columns, ``l`` a 0/1 vector and ``q`` a
quadratic form without constant term.  Looping over these normal forms
yields each state exactly once in a fixed order, so no floating-point
deduplication is needed.  Amplitudes are kept as Gaussian integers with the
scale ``2**(-k/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product

import numpy as np

from .clifford import CliffordCircuit, ExactKet, basis_ket
from .errors import CapacityError, DimensionError, ValidationError
from .pauli import PauliString, all_pauli_codes, popcount

MAX_QUBITS = 4


def state_count(n: int) -> int:
    """``2**n * prod_{l=1..n} (2**l + 1)``."""
    return (1 << n) * math.prod((1 << l) + 1 for l in range(1, n + 1))


def triple_count(n: int) -> int:
    return 4 * ((1 << n) - 1) * state_count(n) // 3


def witness_count(n: int) -> int:
    return 3 * triple_count(n)


def check_capacity(n: int, cap: int = MAX_QUBITS):
    if not 1 <= n <= cap:
        raise CapacityError(f"n={n} outside supported range 1..{cap}")


# -- enumeration ---------------------------------------------------------


def _rref_subspaces(n: int, k: int):
    """Yield ``(pivots, rows)`` for all k-dim subspaces of F_2^n in RREF.

    Rows are n-bit ints, qubit 0 as the most significant bit.
    """
    for pivots in combinations(range(n), k):
        free = []  # (row, col) positions that may be set
        for r, p in enumerate(pivots):
            for c in range(p + 1, n):
                if c not in pivots:
                    free.append((r, c))
        for bits in product((0, 1), repeat=len(free)):
            rows = [1 << (n - 1 - p) for p in pivots]
            for (r, c), b in zip(free, bits):
                if b:
                    rows[r] |= 1 << (n - 1 - c)
            yield pivots, rows


def _normal_forms(n: int):
    """Yield ``(k, support_indices, phase_exponents)`` in canonical order.

    ``phase_exponents[j]`` is the power of ``i`` on ``support_indices[j]``.
    """
    for k in range(n + 1):
        ys = list(product((0, 1), repeat=k))
        pairs = list(combinations(range(k), 2))
        for pivots, rows in _rref_subspaces(n, k):
            nonpiv = [c for c in range(n) if c not in pivots]
            span = []
            for y in ys:
                v = 0
                for yi, row in zip(y, rows):
                    if yi:
                        v ^= row
                span.append(v)
            for tbits in product((0, 1), repeat=len(nonpiv)):
                t = 0
                for c, b in zip(nonpiv, tbits):
                    if b:
                        t |= 1 << (n - 1 - c)
                support = [t ^ v for v in span]
                for quad in product((0, 1), repeat=len(pairs)):
                    for lin in product((0, 1), repeat=k):
                        for imag in product((0, 1), repeat=k):
                            ph = []
                            for y in ys:
                                q = sum(a * y[i] * y[j] for a, (i, j) in zip(quad, pairs))
                                q += sum(b * yi for b, yi in zip(lin, y))
                                e = 2 * (q % 2) + sum(m * yi for m, yi in zip(imag, y))
                                ph.append(e % 4)
                            yield k, support, ph


_UNITS = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True)
class StabilizerState:
    """One enumerated state; ``amplitudes * 2**(-k/2)`` is the normalized ket."""

    index: int
    n: int
    k: int
    amplitudes: np.ndarray
    tableau: tuple[PauliString, ...]

    @property
    def ket(self) -> ExactKet:
        return ExactKet(self.amplitudes, self.k)

    def vector(self) -> np.ndarray:
        return self.amplitudes * 2.0 ** (-self.k / 2)

    def projector(self) -> np.ndarray:
        v = self.vector()
        return np.outer(v, v.conj())


class StabilizerSet:
    """All stabilizer states of ``n`` qubits as packed arrays.

    ``amps`` holds Gaussian-integer amplitudes (one row per state),
    ``levels`` the per-state ``k`` (support size is ``2**k``).
    """

    def __init__(self, n: int, amps: np.ndarray, levels: np.ndarray):
        self.n = n
        self.amps = amps
        self.levels = levels
        self._vectors = None

    def __len__(self):
        return self.amps.shape[0]

    @property
    def d(self) -> int:
        return 1 << self.n

    @property
    def vectors(self) -> np.ndarray:
        """Normalized kets, shape ``(N, d)``."""
        if self._vectors is None:
            self._vectors = self.amps * (2.0 ** (-self.levels / 2))[:, None]
        return self._vectors

    def __getitem__(self, i: int) -> StabilizerState:
        i = int(i)
        return StabilizerState(i, self.n, int(self.levels[i]), self.amps[i].copy(), self.tableaux[i])

    @cached_property
    def keys(self) -> np.ndarray:
        return ray_keys(self.amps)

    @cached_property
    def _key_order(self):
        return np.argsort(self.keys)

    def lookup(self, amps: np.ndarray) -> np.ndarray:
        """Indices of the states whose rays match rows of ``amps``."""
        keys = ray_keys(amps)
        order = self._key_order
        sk = self.keys[order]
        pos = np.searchsorted(sk, keys)
        pos = np.minimum(pos, len(sk) - 1)
        hit = sk[pos] == keys
        if not np.all(hit):
            raise ValidationError("vector is not an enumerated stabilizer state")
        return order[pos]

    @cached_property
    def expectations(self) -> np.ndarray:
        """``E[s, xb, zb] = <psi_s|P|psi_s>`` as int8 values in {-1, 0, 1}."""
        n, d = self.n, self.d
        out = np.zeros((len(self), d, d), dtype=np.int8)
        idx = np.arange(d)
        scale = 2.0 ** self.levels
        for xb, zb in all_pauli_codes(n):
            c = (1j ** popcount(xb & zb)) * (1 - 2 * (popcount(idx & zb) & 1))
            # (P psi)[x ^ xb] = c[x] psi[x]  =>  <psi|P psi> = sum_x conj(psi[x ^ xb]) c[x] psi[x]
            val = np.einsum("sx,sx->s", self.amps[:, idx ^ xb].conj(), self.amps * c) / scale
            out[:, xb, zb] = np.rint(val.real).astype(np.int8)
        return out

    @cached_property
    def tableaux(self) -> list[tuple[PauliString, ...]]:
        """Canonical generators: row-reduced stabilizer group with signs."""
        n = self.n
        exp = self.expectations.reshape(len(self), -1)
        d = self.d
        out = []
        for s in range(len(self)):
            nz = np.flatnonzero(exp[s])
            elems = {(int(c) // d, int(c) % d): int(exp[s, c]) for c in nz}
            out.append(_canonical_generators(n, elems))
        return out

    @cached_property
    def group_codes(self) -> np.ndarray:
        """Symplectic codes ``(xb << n) | zb`` of each stabilizer group, shape (N, 2**n)."""
        exp = self.expectations.reshape(len(self), -1)
        codes = np.nonzero(exp)[1].reshape(len(self), self.d)
        # flat index is xb * d + zb == (xb << n) | zb
        return codes.astype(np.int64)

    def fidelities(self, rho: np.ndarray) -> np.ndarray:
        """``Tr(rho psi_s)`` for every state."""
        rho = np.asarray(rho)
        if rho.shape != (self.d, self.d):
            raise DimensionError(f"state has shape {rho.shape}, expected {(self.d, self.d)}")
        # integer amplitudes keep dyadic inputs exact; scale applied last
        a = self.amps
        raw = np.einsum("sx,xy,sy->s", a.conj(), rho, a, optimize=True).real
        return raw / (2.0 ** self.levels)

    def fidelities_pure(self, psi: np.ndarray) -> np.ndarray:
        return np.abs(self.vectors.conj() @ np.asarray(psi)) ** 2


def _canonical_generators(n, elems: dict) -> tuple[PauliString, ...]:
    """Row-reduce the group's symplectic vectors; attach exact signs."""
    vecs = sorted(((xb << n) | zb for (xb, zb) in elems), reverse=True)
    basis: list[int] = []
    for v in vecs:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    # full reduction: clear each pivot bit from the other rows
    for i, b in enumerate(basis):
        top = b.bit_length() - 1
        for j in range(len(basis)):
            if j != i and (basis[j] >> top) & 1:
                basis[j] ^= b
    basis.sort(reverse=True)
    if len(basis) != n:
        raise ValidationError("stabilizer group has wrong rank")
    mask = (1 << n) - 1
    gens = []
    for v in basis:
        xb, zb = v >> n, v & mask
        gens.append(PauliString.from_code(n, xb, zb, 0 if elems[(xb, zb)] > 0 else 2))
    return tuple(gens)


def ray_keys(amps: np.ndarray) -> np.ndarray:
    """Phase-free integer key for rows of stabilizer amplitudes.

    Each entry is divided by the first nonzero entry, giving a value in
    {0, 1, i, -1, -i}, and the results are read as base-5 digits.
    """
    amps = np.atleast_2d(amps)
    nz = np.abs(amps) > 0.5
    first = np.argmax(nz, axis=1)
    ref = amps[np.arange(amps.shape[0]), first]
    ratio = amps / ref[:, None]
    power = np.rint(np.angle(ratio) / (np.pi / 2)).astype(np.int64) % 4
    digit = np.where(nz, power + 1, 0)
    weights = 5 ** np.arange(amps.shape[1], dtype=np.int64)
    return digit @ weights


@lru_cache(maxsize=None)
def enumerate_stabilizer_states(n: int) -> StabilizerSet:
    """All ``state_count(n)`` stabilizer states in canonical order."""
    check_capacity(n)
    d = 1 << n
    rows, levels = [], []
    for k, support, ph in _normal_forms(n):
        a = np.zeros(d, dtype=complex)
        a[support] = _UNITS[ph]
        rows.append(a)
        levels.append(k)
    amps = np.array(rows)
    st = StabilizerSet(n, amps, np.array(levels, dtype=np.int64))
    if len(st) != state_count(n):
        raise ValidationError(f"enumerated {len(st)} states, expected {state_count(n)}")
    return st


def stab_overlap2(a: StabilizerState, b: StabilizerState) -> Fraction:
    """Exact ``|<a|b>|**2``."""
    if a.n != b.n:
        raise DimensionError("states on different qubit counts")
    s = complex(np.vdot(a.amplitudes, b.amplitudes))
    re, im = int(round(s.real)), int(round(s.imag))
    return Fraction(re * re + im * im, 1 << (a.k + b.k))


# -- triples -------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerTriple:
    """Unordered neighbouring triple; ``a`` is the reference apex."""

    n: int
    a: int
    b: int
    c: int

    @property
    def indices(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def structure(self) -> tuple[int, complex, complex]:
        """``(x, alpha, alpha')`` in a frame where state ``a`` is ``|0^n>``."""
        states = enumerate_stabilizer_states(self.n)
        u1 = clifford_to_zero(states[self.a].tableau)
        kb = u1.apply_ket(states[self.b].ket)
        kc = u1.apply_ket(states[self.c].ket)
        xb, al = _frame_form(kb)
        xc, alc = _frame_form(kc)
        if xb != xc or abs(al * alc - 1j) > 1e-9 and abs(al * alc + 1j) > 1e-9:
            raise ValidationError(f"triple {self.indices} violates the neighbour structure")
        return xb, al, alc


def _frame_form(ket: ExactKet) -> tuple[int, complex]:
    """Decompose ``(|0> + alpha |x>)/sqrt(2)`` (up to phase) into ``(x, alpha)``."""
    a = ket.amps
    nz = np.flatnonzero(np.abs(a) > 0.5)
    if len(nz) != 2 or nz[0] != 0:
        raise ValidationError("ket is not of the form (|0> + alpha|x>)/sqrt(2)")
    alpha = a[nz[1]] / a[0]
    return int(nz[1]), complex(np.round(alpha.real) + 1j * np.round(alpha.imag))


def _coset_reps(st: StabilizerSet, code: int) -> np.ndarray:
    """Mask of states for which Pauli ``code`` is the minimal representative
    of a nontrivial coset of the state's stabilizer group."""
    g = st.group_codes
    coset = g ^ code
    in_group = np.any(g == code, axis=1)
    return (~in_group) & (coset.min(axis=1) == code)


@lru_cache(maxsize=None)
def triple_array(n: int) -> np.ndarray:
    """Sorted ``(M, 3)`` int array of all neighbouring triples.

    Neighbours of ``psi`` are ``(psi + alpha P psi)/sqrt(2)`` for ``P`` in a
    nontrivial coset of the stabilizer group and ``alpha`` in {1, i, -1, -i};
    two of them form a triple with ``psi`` exactly when they share the coset
    and their phases differ by a factor of ``+-i``.
    """
    check_capacity(n)
    st = enumerate_stabilizer_states(n)
    d = st.d
    idx = np.arange(d)
    found = []
    for xb, zb in all_pauli_codes(n):
        code = (xb << n) | zb
        if code == 0:
            continue
        mask = _coset_reps(st, code)
        if not np.any(mask):
            continue
        src = np.flatnonzero(mask)
        psi = st.amps[src]
        c = (1j ** popcount(xb & zb)) * (1 - 2 * (popcount(idx & zb) & 1))
        ppsi = np.empty_like(psi)
        ppsi[:, idx ^ xb] = psi * c
        nb = [st.lookup(psi + ph * ppsi) for ph in (1, 1j, -1, -1j)]
        for j in range(4):
            tri = np.stack([src, nb[j], nb[(j + 1) % 4]], axis=1)
            found.append(np.sort(tri, axis=1))
    allt = np.concatenate(found)
    n_states = len(st)
    enc = (allt[:, 0] * n_states + allt[:, 1]) * n_states + allt[:, 2]
    enc = np.unique(enc)
    out = np.stack([enc // (n_states * n_states), (enc // n_states) % n_states, enc % n_states], axis=1)
    if len(out) != triple_count(n):
        raise ValidationError(f"found {len(out)} triples, expected {triple_count(n)}")
    return out


def enumerate_triples(n: int) -> list[StabilizerTriple]:
    return [StabilizerTriple(n, int(a), int(b), int(c)) for a, b, c in triple_array(n)]


def brute_force_triples(n: int) -> np.ndarray:
    """All-pairs exact-overlap search; the cross-check oracle for small n."""
    st = enumerate_stabilizer_states(n)
    states = [st[i] for i in range(len(st))]
    half = Fraction(1, 2)
    nbr = {i: set() for i in range(len(states))}
    for i, j in combinations(range(len(states)), 2):
        if stab_overlap2(states[i], states[j]) == half:
            nbr[i].add(j)
            nbr[j].add(i)
    out = set()
    for i in nbr:
        for j in nbr[i]:
            if j > i:
                for k in nbr[i] & nbr[j]:
                    if k > j:
                        out.add((i, j, k))
    return np.array(sorted(out))


# -- canonicalization ----------------------------------------------------


def clifford_to_zero(tableau) -> CliffordCircuit:
    """Circuit ``V`` with ``V|psi> = |0^n>`` for the state stabilized by ``tableau``."""
    gens = list(tableau)
    n = gens[0].n
    circ = CliffordCircuit(n)

    def push(g, *qs):
        nonlocal gens
        step = CliffordCircuit(n, [(g, qs)])
        gens = [step.conjugate(p) for p in gens]
        circ.append(g, *qs)

    # Hadamards that make the X block invertible
    for subset in product((0, 1), repeat=n):
        xm = np.array([[p.z[q] if subset[q] else p.x[q] for q in range(n)] for p in gens])
        if _gf2_rank(xm) == n:
            break
    else:  # pragma: no cover - a Lagrangian subspace always admits one
        raise ValidationError("no Hadamard pattern makes the X block invertible")
    for q in range(n):
        if subset[q]:
            push("H", q)
    gens = _reduce_x_block(gens)
    for i, j in combinations(range(n), 2):
        if gens[i].z[j]:
            push("H", j)
            push("CNOT", i, j)
            push("H", j)
    for i in range(n):
        if gens[i].z[i]:
            push("S", i)
    gens = _reduce_x_block(gens)
    for q in range(n):
        push("H", q)
    for i in range(n):
        if gens[i].sign < 0:
            push("X", i)
    for i, g in enumerate(gens):
        if g.phase or any(g.x) or g.z != tuple(int(q == i) for q in range(n)):
            raise ValidationError("synthesized circuit does not reach |0^n>")
    return circ


def _gf2_rank(m: np.ndarray) -> int:
    m = m.copy() % 2
    r = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = [i for i in range(r, rows) if m[i, c]]
        if not piv:
            continue
        m[[r, piv[0]]] = m[[piv[0], r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


def _reduce_x_block(gens):
    """Row operations (Pauli products) turning the X block into the identity."""
    gens = list(gens)
    n = len(gens)
    for c in range(n):
        piv = next(i for i in range(c, n) if gens[i].x[c])
        gens[c], gens[piv] = gens[piv], gens[c]
        for i in range(n):
            if i != c and gens[i].x[c]:
                gens[i] = gens[i] * gens[c]
    return gens


def canonicalize_triple(t: StabilizerTriple, apex: int | None = None) -> CliffordCircuit:
    """Clifford circuit sending the apex to ``|0^n>`` and the other two
    members to ``{|+>|0^{n-1}>, |+i>|0^{n-1}>}``.

    ``apex`` defaults to ``t.a`` and must be one of the triple's indices.
    """
    n = t.n
    st = enumerate_stabilizer_states(n)
    apex = t.a if apex is None else apex
    if apex not in t.indices:
        raise ValidationError(f"apex {apex} not in triple {t.indices}")
    others = [i for i in t.indices if i != apex]
    u = clifford_to_zero(st[apex].tableau)
    kb = u.apply_ket(st[others[0]].ket)
    kc = u.apply_ket(st[others[1]].ket)
    xb, al = _frame_form(kb)
    xc, alc = _frame_form(kc)
    if xb != xc or min(abs(al * alc - 1j), abs(al * alc + 1j)) > 1e-9:
        raise ValidationError(f"triple {t.indices} violates the neighbour structure")
    # CNOTs: x -> 10...0 keeping |0^n> fixed
    bits = [q for q in range(n) if (xb >> (n - 1 - q)) & 1]
    p = bits[0]
    for q in bits[1:]:
        u.append("CNOT", p, q)
    if p != 0:
        u.append("CNOT", p, 0)
        u.append("CNOT", 0, p)
    # S^m on qubit 0 sends {alpha, alpha'} to {1, i}
    for m in range(4):
        pair = {_round_unit(al * 1j**m), _round_unit(alc * 1j**m)}
        if pair == {1, 1j}:
            break
    for _ in range(m):
        u.append("S", 0)
    if not verify_canonical(t, u, apex):
        raise ValidationError("canonicalization image check failed")
    return u


def _round_unit(z: complex) -> complex:
    return complex(round(z.real), round(z.imag))


def canonical_kets(n: int) -> tuple[ExactKet, ExactKet, ExactKet]:
    """``|0^n>``, ``|+>|0^{n-1}>``, ``|+i>|0^{n-1}>``."""
    d = 1 << n
    zero = basis_ket(n)
    plus = np.zeros(d, dtype=complex)
    plus[0], plus[d // 2] = 1, 1
    plus_i = plus.copy()
    plus_i[d // 2] = 1j
    return zero, ExactKet(plus, 1), ExactKet(plus_i, 1)


def canonical_triple(n: int) -> StabilizerTriple:
    """The triple ``(|0^n>, |+>|0^{n-1}>, |+i>|0^{n-1}>)`` with apex ``|0^n>``."""
    st = enumerate_stabilizer_states(n)
    zero, plus, plus_i = canonical_kets(n)
    a, b, c = (int(st.lookup(k.amps[None, :])[0]) for k in (zero, plus, plus_i))
    return StabilizerTriple(n, a, b, c)


def verify_canonical(t: StabilizerTriple, circ: CliffordCircuit, apex: int | None = None) -> bool:
    """Exact amplitude check of the canonical-image contract."""
    st = enumerate_stabilizer_states(t.n)
    apex = t.a if apex is None else apex
    others = [i for i in t.indices if i != apex]
    zero, plus, plus_i = canonical_kets(t.n)
    img_a = circ.apply_ket(st[apex].ket)
    img = [circ.apply_ket(st[i].ket) for i in others]
    if not img_a.same_ray(zero):
        return False
    direct = img[0].same_ray(plus) and img[1].same_ray(plus_i)
    swapped = img[0].same_ray(plus_i) and img[1].same_ray(plus)
    return direct or swapped
