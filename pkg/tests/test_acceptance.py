"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import functools
import itertools
import math
import time

import numpy as np
import pytest

from conftest import random_mixture
from tricrit import bounds, dense, stats
from tricrit.clifford import sample_clifford
from tricrit.criterion import detect, detect_single_qubit, detect_two_copies, triangle_negativity
from tricrit.distill import H_THRESHOLD, run_two_copy_distill
from tricrit.files import bundled_path, parse_state_file
from tricrit.stabilizer import enumerate_stabilizer_states, triple_array

RESULTS: dict[int, tuple[bool, str, str]] = {}


def criterion(num, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*a, **kw):
            try:
                ok, detail = fn(*a, **kw)
            except Exception as exc:
                RESULTS[num] = (False, title, f"error: {exc!r}")
                print(f"[FAIL] criterion {num}: {title}")
                raise
            RESULTS[num] = (ok, title, detail)
            print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} ({detail})")
            assert ok, detail
        return run
    return wrap


@criterion(1, "state and triple counts")
def test_counts():
    t0 = time.perf_counter()
    st4 = enumerate_stabilizer_states.__wrapped__(4)
    dt = time.perf_counter() - t0
    states = [len(enumerate_stabilizer_states(n)) for n in (1, 2, 3)] + [len(st4)]
    formula = [2**n * math.prod(2**l + 1 for l in range(1, n + 1)) for n in (1, 2, 3, 4)]
    triples = [triple_array(n).shape[0] for n in (1, 2, 3)]
    want_t = [4 * (2**n - 1) * formula[n - 1] // 3 for n in (1, 2, 3)]
    ok = states == formula == [6, 60, 1080, 36720] and triples == want_t == [8, 240, 10080] and dt < 300
    return ok, f"states {states}, triples {triples}, n=4 enumeration {dt:.1f}s"


@criterion(2, "single-qubit completeness")
def test_single_qubit_completeness():
    rng = np.random.default_rng(2)
    bad = 0
    for i in range(10_000):
        if i % 2:
            rho = dense.sample_induced(2, int(rng.integers(1, 4)), rng)
        else:
            # concentrate near the octahedron facets
            r = rng.standard_normal(3)
            r *= rng.uniform(0.9, 1.1) / np.abs(r).sum()
            if np.linalg.norm(r) > 1:
                r /= np.linalg.norm(r)
            rho = dense.bloch_to_dm(*r)
        bad += detect(rho, 1e-9).detected != (detect_single_qubit(rho)[1] > 1e-9)
    return bad == 0, f"{bad} disagreements over 10^4 states"


@criterion(3, "two-copy activation of the bundled state")
def test_activation():
    rho = parse_state_file(bundled_path())
    one = detect(rho)
    t0 = time.perf_counter()
    two = detect_two_copies(rho)
    dt = time.perf_counter() - t0
    out = run_two_copy_distill(rho)
    bloch_ok = all(abs(g - w) <= 0.002 for g, w in zip(out.bloch, (0.1844, 0.3334, 0.6544)))
    ok = (one.witness_count == 720 and one.min_value >= -1e-9 and two.detected
          and abs(out.success_probability - 0.129) <= 0.002 and bloch_ok
          and abs(out.l1_norm - 1.172) <= 0.004 and out.l1_norm > H_THRESHOLD and dt < 600)
    return ok, (f"one-copy min {one.min_value:.3e}, two-copy min {two.min_value:.5f}, "
                f"P {out.success_probability:.5f}, Bloch {np.round(out.bloch, 4).tolist()}, "
                f"l1 {out.l1_norm:.4f}, scan {dt:.1f}s")


@criterion(4, "minimal-purity construction")
def test_minimal_purity():
    details, ok = [], True
    for n, p in zip((1, 2, 3, 4), (2 / 3, 2 / 7, 2 / 15, 2 / 31)):
        rho = bounds.minimal_purity_state(n)
        d = 1 << n
        top, _ = bounds.boundary_check(rho, n)
        out = np.eye(d) / d + (1 + 1e-4) * (rho - np.eye(d) / d)
        rep = detect(out)
        ok &= (abs(dense.purity(rho) - p) <= 1e-12 and abs(top - dense.purity(rho)) <= 1e-12
               and dense.eigen_min(out) >= 0 and rep.detected)
        details.append(f"n={n} pushed min {rep.min_value:.2e}")
    return ok, "; ".join(details)


@criterion(5, "lift purity relation")
def test_lift():
    ok, chains = True, 0
    for n in (1, 2, 3):
        r = dense.purity(bounds.minimal_purity_state(n))
        prev_a = (1 << n) - 1 / r
        for m in range(n + 1, 5):
            res = bounds.lift_boundary_state(bounds.minimal_purity_state(n), m)
            want = r / (((1 << m) - (1 << n)) * r + 1)
            a = (1 << m) - 1 / res.purity
            ok &= abs(res.purity - want) <= 1e-12 and a <= prev_a + 1e-9
            prev_a = a
            chains += 1
    return ok, f"{chains} lifts checked"


@criterion(6, "Pauli l1 certificates below 1/(d-1/d)")
def test_certificates():
    rng = np.random.default_rng(6)
    worst, missing = 0.0, 0
    for d in (2, 4):
        lo, hi = 1 / d, bounds.purity_lower_threshold(d)
        for _ in range(10_000):
            rho = dense.sample_induced(d, int(rng.integers(1, d + 2)), rng)
            rho = bounds.rescale_to_purity(rho, lo + rng.uniform(0, 1 - 1e-9) * (hi - lo))
            cert = bounds.pauli_l1_certificate(rho)
            if cert is None:
                missing += 1
                continue
            worst = max(worst, cert.residual)
    return missing == 0 and worst < 1e-10, f"{missing} missing, worst residual {worst:.1e}"


@criterion(7, "absolute stabilizer ball")
def test_ball():
    rng = np.random.default_rng(7)
    ok, parts = True, []
    for c in (0.0, 0.5, 1.0):
        target = 1 / (4 - c)
        rho = np.eye(4) / 4 if c == 0 else bounds.rescale_to_purity(dense.sample_induced(4, 4, rng), target)
        rep = bounds.absolute_ball_reduction(rho, 2, 1000, rng)
        sat = bounds.absolute_ball_reduction(bounds.saturating_instance(4, 2, c), 2, 1000, rng)
        ok &= (len(rep.records) >= 1000 and rep.max_reduced_purity <= rep.bound + 1e-9
               and sat.max_reduced_purity <= sat.bound + 1e-9 and abs(sat.saturating_purity - sat.bound) <= 1e-9)
        parts.append(f"c={c}: max {max(rep.max_reduced_purity, sat.max_reduced_purity):.4f} <= {rep.bound:.4f}")
    return ok, "; ".join(parts)


@criterion(8, "3-design moments and unfaithfulness")
def test_unfaithful():
    rng = np.random.default_rng(8)
    worst = 0.0
    exact_ok = True
    for n in (1, 2):
        d = 1 << n
        want = bounds.design_moments(d)
        for _ in range(20):
            psi = dense.haar_ket(d, rng)
            got = bounds.stab_design_moments(psi, n)
            worst = max(worst, max(abs(a - float(b)) for a, b in zip(got, want)))
            gi = rng.integers(-3, 4, d) + 1j * rng.integers(-3, 4, d)
            if np.any(gi):
                exact_ok &= bounds.stab_design_moments(gi, n, exact=True) == want
    lmax = dense.eigen_max(bounds.minimal_purity_state(2))
    verdict, _ = bounds.unfaithful_check(bounds.minimal_purity_state(2))
    ok = worst <= 1e-12 and exact_ok and lmax <= 0.38364 < 0.5 == bounds.fidelity_alpha_bound(4) and verdict
    return ok, f"moment error {worst:.1e}, exact rational match {exact_ok}, eigen_max {lmax:.5f}"


@criterion(9, "Triangle Negativity")
def test_negativity():
    t_state = dense.bloch_to_dm(1 / math.sqrt(2), 1 / math.sqrt(2), 0)
    zero = [triangle_negativity(np.eye(d) / d) for d in (2, 4)]
    t_err = abs(triangle_negativity(t_state) - math.log2((1 + math.sqrt(2)) / 2))
    rng = np.random.default_rng(9)
    rho = dense.sample_induced(4, 2, rng)
    base = triangle_negativity(rho)
    drift = 0.0
    for _ in range(100):
        u = sample_clifford(2, rng).unitary()
        drift = max(drift, abs(triangle_negativity(u @ rho @ u.conj().T) - base))
    ok = zero == [0.0, 0.0] and t_err <= 1e-10 and drift <= 1e-10
    return ok, f"T(I/d) {zero}, T-state error {t_err:.1e}, Clifford drift {drift:.1e}"


@criterion(10, "detection statistics under the induced measure")
def test_detection_stats():
    ks = [1, 2, 4, 8, 16]
    t0 = time.perf_counter()
    cells = {(n, k): stats.monte_carlo_detection(n, k, 10_000, 10) for n in (2, 3) for k in ks}
    dt = time.perf_counter() - t0
    dominated = all(e.estimate <= e.bound for e in cells.values())
    fits = {n: stats.log_linear_fit(ks, [cells[n, k].estimate for k in ks]) for n in (2, 3)}
    decay = all(s < 0 and r2 > 0.9 for s, _, r2 in fits.values())
    overlap = all(cells[2, k].ci_low <= cells[3, k].ci_high and cells[3, k].ci_low <= cells[2, k].ci_high
                  for k in ks)
    ok = dominated and decay and overlap and dt < 900
    fit_txt = ", ".join(f"n={n} slope {s:.3f} R2 {r2:.3f}" for n, (s, _, r2) in fits.items())
    return ok, f"bounds hold {dominated}, {fit_txt}, CIs overlap {overlap}, {dt:.1f}s"


@criterion(11, "soundness on stabilizer mixtures")
def test_soundness():
    rng = np.random.default_rng(11)
    detected = not_inside = 0
    for n in (1, 2, 3):
        for _ in range(1000):
            comps = None if rng.random() < 0.5 else int(rng.integers(1, 7))
            detected += detect(random_mixture(n, rng, comps)).detected
    for n in (1, 2):
        for _ in range(1000):
            v = bounds.polytope_membership(random_mixture(n, rng))
            not_inside += v.status != "inside"
    return detected == 0 and not_inside == 0, f"{detected} detected of 3000, {not_inside} not inside of 2000"
