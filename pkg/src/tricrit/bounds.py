"""Purity thresholds, stabilizer-mixture certificates and polytope membership.

Coordinates for convex geometry are Pauli expectations ``t_P = Tr(rho P)``
over the non-identity Paulis, so each stabilizer state is a {-1, 0, 1}
vertex and the stabilizer polytope is their convex hull.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dense
from .criterion import DEFAULT_TOL, detect
from .errors import DimensionError, ValidationError
from .pauli import PauliString, all_pauli_codes, pauli_expectations
from .stabilizer import check_capacity, enumerate_stabilizer_states

BOUNDARY_TOL = 1e-10
PUSH = 1e-4


def purity_lower_threshold(d: int) -> float:
    """Below this purity every state is a stabilizer mixture."""
    if d < 2:
        raise ValidationError("d must be at least 2")
    return 1 / (d - 1 / d)


def minimal_purity_purity(d: int) -> float:
    return 1 / (d - 0.5)


def minimal_purity_state(n: int) -> np.ndarray:
    """Magic-boundary state of purity ``1/(d - 1/2)``.

    Built as ``(2 I + W (x) |0..0><0..0|) / (2d - 1)`` with
    ``W = |0><0| + |+><+| + |+i><+i| - 2I``.
    """
    check_capacity(n)
    if n < 1:
        raise ValidationError("need at least one qubit")
    d = 1 << n
    w = dense.ket_to_dm([1, 0]) + dense.ket_to_dm([1, 1]) + dense.ket_to_dm([1, 1j]) - 2 * np.eye(2)
    tail = np.zeros((d >> 1, d >> 1), dtype=complex)
    tail[0, 0] = 1
    return (2 * np.eye(d) + np.kron(w, tail)) / (2 * d - 1)


def boundary_check(rho, n: int | None = None, atol: float = BOUNDARY_TOL):
    """``max_s Tr(rho psi_s)`` and all maximizing state indices."""
    rho = np.asarray(rho)
    n = dense.n_qubits(rho) if n is None else n
    check_capacity(n)
    f = enumerate_stabilizer_states(n).fidelities(rho)
    top = float(f.max())
    return top, [int(i) for i in np.flatnonzero(f >= top - atol)]


def lifted_purity(r: float, n: int, m: int) -> float:
    return r / (((1 << m) - (1 << n)) * r + 1)


@dataclass
class LiftResult:
    state: np.ndarray
    purity: float
    expected_purity: float
    input_on_boundary: bool
    warning: str | None = None


def lift_boundary_state(rho_n, m: int) -> LiftResult:
    """Embed a boundary state of ``n`` qubits into ``m > n`` qubits.

    ``rho_m = lam rho_n (x) |0><0| + (1 - lam) (I - Pi)/(2^m - 2^n)`` where
    ``Pi`` projects onto the embedded block and ``lam = 1/(1 + r (2^m - 2^n))``.
    This keeps equality between the maximal stabilizer overlap and purity.
    """
    rho_n = dense.check_density(rho_n, "input")
    n = dense.n_qubits(rho_n)
    check_capacity(m)
    if not n < m:
        raise ValidationError(f"lift target {m} must exceed source {n}")
    r = dense.purity(rho_n)
    top, _ = boundary_check(rho_n, n)
    on_boundary = abs(top - r) <= 1e-9
    d, big = 1 << n, 1 << m
    lam = 1 / (1 + r * (big - d))
    tail = np.zeros((big // d, big // d))
    tail[0, 0] = 1
    pi = np.kron(np.eye(d), tail)
    out = lam * np.kron(rho_n, tail) + (1 - lam) * (np.eye(big) - pi) / (big - d)
    warn = None if on_boundary else f"input is not on the boundary (max overlap {top:.6g} vs purity {r:.6g})"
    return LiftResult(out, dense.purity(out), lifted_purity(r, n, m), on_boundary, warn)


# -- Pauli l1 certificate ------------------------------------------------


@dataclass
class StabilizerMixtureCertificate:
    components: list[tuple[float, str, np.ndarray]]  # (weight, label, state)
    residual: float

    def to_dict(self) -> dict:
        return {"components": [{"weight": w, "label": lab} for w, lab, _ in self.components],
                "residual": self.residual}


def pauli_l1_certificate(rho) -> StabilizerMixtureCertificate | None:
    """Mixture over ``I/d`` and ``(I + sign(t_P) P)/d`` when ``sum |t_P| <= 1``."""
    rho = np.asarray(rho, dtype=complex)
    n = dense.n_qubits(rho)
    d = 1 << n
    e = pauli_expectations(rho)
    codes = list(all_pauli_codes(n))[1:]
    t = np.array([e[xb, zb].real for xb, zb in codes])
    l1 = math.fsum(np.abs(t))
    if l1 > 1:
        return None
    comps = [(1 - l1, "I", np.eye(d, dtype=complex) / d)]
    for (xb, zb), v in zip(codes, t):
        if v == 0:
            continue
        p = PauliString.from_code(n, xb, zb)
        s = 1 if v > 0 else -1
        if s < 0:
            p = -p
        comps.append((abs(float(v)), p.label, (np.eye(d) + p.to_matrix()) / d))
    recon = sum(w * c for w, _, c in comps)
    return StabilizerMixtureCertificate(comps, float(np.abs(recon - rho).max()))


# -- polytope membership -------------------------------------------------


def pauli_vector(rho) -> np.ndarray:
    """Non-identity Pauli expectations, ordered by code with ``xb`` major."""
    e = pauli_expectations(np.asarray(rho))
    return e.real.ravel()[1:]


def _vertex_matrix(n: int) -> np.ndarray:
    st = enumerate_stabilizer_states(n)
    return st.expectations.reshape(len(st), -1)[:, 1:].astype(float)


@dataclass
class MembershipVerdict:
    status: str  # inside | outside | boundary | inconclusive
    distance: float
    weights: dict[int, float] | None = None
    witness: np.ndarray | None = None  # Pauli coefficients of the separating functional
    witness_margin: float | None = None
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def member(self) -> bool:
        return self.status in ("inside", "boundary")

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "distance": self.distance,
            "iterations": self.iterations,
            "weights": None if self.weights is None else {str(k): v for k, v in self.weights.items()},
            "witness_margin": self.witness_margin,
            "witness": None if self.witness is None else self.witness.tolist(),
            **self.extra,
        }


def min_norm_point(y: np.ndarray, max_iters: int = 5000, tol: float = 1e-14):
    """Wolfe's minimum-norm-point algorithm on the hull of the rows of ``y``.

    Returns ``(x, support, weights, iterations, converged)``.
    """
    norms = np.einsum("ij,ij->i", y, y)
    s = [int(np.argmin(norms))]
    lam = np.array([1.0])
    x = y[s[0]].copy()
    scale = max(1.0, float(norms.max()))
    it = 0
    for it in range(1, max_iters + 1):
        j = int(np.argmin(y @ x))
        if x @ x - y[j] @ x <= tol * scale or j in s:
            return x, s, lam, it, True
        s.append(j)
        lam = np.append(lam, 0.0)
        while True:
            ys = y[s]
            g = ys @ ys.T
            k = len(s)
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = g
            kkt[:k, k] = kkt[k, :k] = 1
            rhs = np.zeros(k + 1)
            rhs[k] = 1
            alpha = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
            if np.all(alpha > 1e-12):
                lam = alpha
                break
            neg = alpha <= 1e-12
            theta = np.min(lam[neg] / (lam[neg] - alpha[neg]))
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-12
            s = [v for v, kp in zip(s, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ y[s]
    return x, s, lam, it, False


def _raw_membership(t: np.ndarray, verts: np.ndarray, eps: float, max_iters: int) -> MembershipVerdict:
    y = verts - t
    x, s, lam, it, ok = min_norm_point(y, max_iters)
    dist = float(np.linalg.norm(x))
    if dist <= eps:
        return MembershipVerdict("inside", dist, {int(i): float(w) for i, w in zip(s, lam)}, iterations=it)
    h = x / dist
    # functional f(v) = -<h, v>; compare its value at t with all vertices
    f_t = -h @ t
    f_max = float(np.max(-verts @ h))
    margin = float(f_t - f_max)
    status = "outside" if margin > eps else "inconclusive"
    return MembershipVerdict(status, dist, witness=-h, witness_margin=margin, iterations=it,
                             extra={} if ok else {"budget_exhausted": True})


def polytope_membership(rho, n: int | None = None, eps: float = 1e-7, max_iters: int = 5000,
                        push: float = PUSH) -> MembershipVerdict:
    """Decide whether ``rho`` lies in the stabilizer polytope.

    Inside verdicts carry convex weights over state indices; outside verdicts
    carry a unit-normal Pauli functional whose value on ``rho`` exceeds its
    maximum over every vertex by ``witness_margin``.  A member that leaves the
    polytope after a radial push by ``push`` away from ``I/d`` is reported as
    ``boundary``.
    """
    rho = np.asarray(rho)
    n = dense.n_qubits(rho) if n is None else n
    if n > 3:
        raise DimensionError("membership is limited to n <= 3")
    verts = _vertex_matrix(n)
    t = pauli_vector(rho)
    v = _raw_membership(t, verts, eps, max_iters)
    if v.status == "inside" and push > 0:
        pushed = _raw_membership((1 + push) * t, verts, eps, max_iters)
        if pushed.status != "inside":
            v.status = "boundary"
            v.extra["pushed_distance"] = pushed.distance
    if v.weights is not None:
        recon = sum(w * verts[i] for i, w in v.weights.items())
        v.extra["reconstruction_error"] = float(np.linalg.norm(recon - t))
    return v


# -- conjecture scan -----------------------------------------------------


def rescale_to_purity(rho, target: float) -> np.ndarray | None:
    """Move ``rho`` radially toward ``I/d`` to the given purity (``None`` if it would leave PSD)."""
    d = rho.shape[0]
    if target < 1 / d:
        raise ValidationError(f"purity {target:.6g} is below 1/d")
    p = dense.purity(rho)
    if p <= 1 / d:
        return None
    s = math.sqrt((target - 1 / d) / (p - 1 / d))
    out = np.eye(d) / d + s * (rho - np.eye(d) / d)
    if s > 1 and dense.eigen_min(out) < 0:
        return None
    return out


@dataclass
class ConjectureReport:
    n: int
    trials: int
    mode: str
    target_purity: float
    counterexamples: list[dict]
    statuses: dict[str, int]

    def to_dict(self) -> dict:
        return {"n": self.n, "trials": self.trials, "mode": self.mode, "target_purity": self.target_purity,
                "counterexample_count": len(self.counterexamples), "counterexamples": self.counterexamples,
                "statuses": self.statuses}


def conjecture_scan(n: int, trials: int, rng: np.random.Generator, mode: str = "membership",
                    tol: float = DEFAULT_TOL) -> ConjectureReport:
    """Sample states on the purity shell ``1/(d - 1/2)`` and look for magic.

    ``membership`` (n <= 3) runs the exact polytope test; ``criterion``
    (n <= 4) runs the Triangle scan, which is only a necessary check.
    """
    if mode not in ("membership", "criterion"):
        raise ValidationError(f"unknown mode {mode!r}")
    if mode == "membership" and n > 3:
        raise DimensionError("membership mode is limited to n <= 3")
    check_capacity(n)
    d = 1 << n
    target = minimal_purity_purity(d)
    found, statuses = [], {}
    done = 0
    while done < trials:
        rho = rescale_to_purity(dense.sample_induced(d, d, rng), target)
        if rho is None:
            continue
        done += 1
        if mode == "membership":
            v = polytope_membership(rho, n)
            statuses[v.status] = statuses.get(v.status, 0) + 1
            if v.status == "outside":
                found.append({"state": rho.tolist(), "certificate": v.to_dict()})
        else:
            rep = detect(rho, tol)
            key = "detected" if rep.detected else "undetected"
            statuses[key] = statuses.get(key, 0) + 1
            if rep.detected:
                found.append({"state": rho.tolist(), "report": rep.to_dict()})
    return ConjectureReport(n, trials, mode, target, found, statuses)


# -- absolute stabilizer ball --------------------------------------------


@dataclass
class ReductionRecord:
    """One post-selection: ``rho_S`` is the block on ``C^{d_A} (x) |phi>``, ``rho_R`` its complement."""

    trial: int
    q: float  # Tr(rho_S), the success probability
    p_s: float  # Tr(rho_S^2)
    p_r: float  # Tr(rho_R^2)
    bound: float

    @property
    def reduced_purity(self) -> float:
        return self.p_s / self.q ** 2

    @property
    def violation(self) -> bool:
        return self.reduced_purity > self.bound + 1e-9


@dataclass
class BallReport:
    c: float
    bound: float
    max_reduced_purity: float
    records: list[ReductionRecord]
    saturating_purity: float
    saturating_state: np.ndarray

    @property
    def violations(self) -> int:
        return sum(r.violation for r in self.records)

    def to_dict(self) -> dict:
        return {"c": self.c, "bound": self.bound, "max_reduced_purity": self.max_reduced_purity,
                "trials": len(self.records), "violations": self.violations,
                "saturating_reduced_purity": self.saturating_purity}


def ball_parameter(rho, d_a: int) -> float:
    """``c = d - 1/Tr(rho^2)``, validated against ``[0, d_A - 1]``."""
    d = rho.shape[0]
    c = d - 1 / dense.purity(rho)
    if c < -1e-9 or c > d_a - 1 + 1e-9:
        raise ValidationError(f"purity parameter c = {c:.6g} outside [0, {d_a - 1}]")
    return min(max(c, 0.0), d_a - 1.0)


def saturating_instance(d: int, d_a: int, c: float) -> np.ndarray:
    """Block state of purity ``1/(d - c)`` whose post-selection on ``|0>_B``
    has purity ``1/(d_A - c)``.  Weight ``q = (d_A - c)/(d - c)`` sits on
    ``C^{d_A} (x) |0>``, the rest is flat on the complement.
    """
    if d % d_a or d_a < 2:
        raise ValidationError("d_A must divide d and be at least 2")
    d_b = d // d_a
    q = (d_a - c) / (d - c)
    s = math.sqrt((1 / (d_a - c) - 1 / d_a) / (1 - 1 / d_a))
    tau = (1 - s) * np.eye(d_a) / d_a
    tau[0, 0] += s
    block = np.arange(d_a) * d_b
    rho = np.zeros((d, d), dtype=complex)
    if d > d_a:
        rho += (1 - q) / (d - d_a) * np.eye(d)
        rho[block, block] = 0
    rho[np.ix_(block, block)] += q * tau
    return rho


def split_blocks(rho, d_a: int, phi) -> tuple[np.ndarray, np.ndarray]:
    """``(rho_S, rho_R)`` for the projector ``I_A (x) |phi><phi|`` and its complement."""
    d = rho.shape[0]
    phi = np.asarray(phi) / np.linalg.norm(phi)
    proj = np.kron(np.eye(d_a), np.outer(phi, phi.conj()))
    comp = np.eye(d) - proj
    return proj @ rho @ proj, comp @ rho @ comp


def postselect_b(rho, d_a: int, phi) -> tuple[np.ndarray | None, float]:
    """Project subsystem B onto ``|phi>`` and return the normalized A state."""
    d = rho.shape[0]
    d_b = d // d_a
    t = np.asarray(rho).reshape(d_a, d_b, d_a, d_b)
    blk = np.einsum("j,ajbk,k->ab", np.conj(phi), t, phi)
    p = float(np.trace(blk).real)
    if p <= 1e-15:
        return None, 0.0
    return blk / p, p


def absolute_ball_reduction(rho_ab, d_a: int, trials: int, rng: np.random.Generator) -> BallReport:
    """Random global unitaries plus rank-one post-selection on B."""
    rho = dense.check_density(rho_ab, "rho_AB")
    d = rho.shape[0]
    if d % d_a:
        raise DimensionError(f"d_A = {d_a} does not divide d = {d}")
    c = ball_parameter(rho, d_a)
    bound = 1 / (d_a - c)
    records = []
    for i in range(trials):
        u = dense.haar_unitary(d, rng)
        phi = dense.haar_ket(d // d_a, rng)
        rs, rr = split_blocks(u @ rho @ u.conj().T, d_a, phi)
        q = float(np.trace(rs).real)
        if q <= 1e-15:
            continue
        records.append(ReductionRecord(i, q, dense.purity(rs), dense.purity(rr), bound))
    sat = saturating_instance(d, d_a, c)
    zero = np.zeros(d // d_a)
    zero[0] = 1
    sigma, _ = postselect_b(sat, d_a, zero)
    top = max((r.reduced_purity for r in records), default=0.0)
    return BallReport(c, bound, top, records, dense.purity(sigma), sat)


# -- unfaithfulness ------------------------------------------------------


def fidelity_alpha_bound(d: int) -> float:
    """Lower bound ``3/(d+2)`` on ``max_s |<s|psi>|^2`` over stabilizer ``s``."""
    return 3 / (d + 2)


def max_stab_fidelity(psi, n: int | None = None) -> float:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    n = psi.size.bit_length() - 1 if n is None else n
    return float(enumerate_stabilizer_states(n).fidelities_pure(psi).max())


def design_moments(d: int) -> tuple[Fraction, Fraction, Fraction]:
    """Haar values of ``E|<s|psi>|^{2t}`` for t = 1, 2, 3."""
    return Fraction(1, d), Fraction(2, d * (d + 1)), Fraction(6, d * (d + 1) * (d + 2))


def stab_design_moments(psi, n: int | None = None, exact: bool = False):
    """Averages of ``|<s|psi>|^{2t}`` over all stabilizer states, t = 1, 2, 3.

    With ``exact=True`` the entries of ``psi`` must be Gaussian integers
    (normalization is handled exactly) and Fractions are returned.
    """
    psi = np.asarray(psi, dtype=complex)
    n = psi.size.bit_length() - 1 if n is None else n
    st = enumerate_stabilizer_states(n)
    if not exact:
        f = st.fidelities_pure(psi / np.linalg.norm(psi))
        return tuple(math.fsum(f ** t) / len(st) for t in (1, 2, 3))
    re, im = np.rint(psi.real).astype(np.int64), np.rint(psi.imag).astype(np.int64)
    if np.any(re != psi.real) or np.any(im != psi.imag):
        raise ValidationError("exact moments need Gaussian-integer amplitudes")
    norm = int((re * re + im * im).sum())
    ov = st.amps.conj() @ (re + 1j * im)
    ar, ai = np.rint(ov.real).astype(object), np.rint(ov.imag).astype(object)
    sums = [Fraction(0)] * 3
    for a, b, k in zip(ar, ai, st.levels):
        f = Fraction(int(a) ** 2 + int(b) ** 2, norm << int(k))
        sums[0] += f
        sums[1] += f ** 2
        sums[2] += f ** 3
    return tuple(s / len(st) for s in sums)


def unfaithful_bound(d: int) -> float:
    return 1 / d + 0.5 * math.sqrt(1 / (d * (d - 0.5)))


def unfaithful_check(rho) -> tuple[bool, float]:
    """True when the top eigenvalue sits below every fidelity witness threshold.

    Returns ``(verdict, slack)`` with ``slack = 3/(d+2) - eigen_max``.
    """
    rho = np.asarray(rho)
    d = rho.shape[0]
    lmax = dense.eigen_max(rho)
    b = unfaithful_bound(d)
    return bool(lmax <= b and b < fidelity_alpha_bound(d)), fidelity_alpha_bound(d) - lmax
