import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_mixture
from tricrit import bounds, dense
from tricrit.criterion import detect
from tricrit.errors import ValidationError


@pytest.mark.parametrize("n,p", [(1, Fraction(2, 3)), (2, Fraction(2, 7)), (3, Fraction(2, 15)), (4, Fraction(2, 31))])
def test_minimal_purity(n, p):
    rho = bounds.minimal_purity_state(n)
    dense.check_density(rho)
    assert dense.purity(rho) == pytest.approx(float(p), abs=1e-12)
    assert dense.eigen_min(rho) > 0
    top, _ = bounds.boundary_check(rho, n)
    assert top == pytest.approx(dense.purity(rho), abs=1e-12)


def test_single_qubit_minimal_state():
    rho = bounds.minimal_purity_state(1)
    assert np.allclose(dense.bloch_vector(rho), 1 / 3)
    top, arg = bounds.boundary_check(rho, 1)
    st = __import__("tricrit.stabilizer", fromlist=["x"]).enumerate_stabilizer_states(1)
    want = sorted(int(st.lookup(np.array([v]))[0]) for v in ([1, 0], [1, 1], [1, 1j]))
    assert top == pytest.approx(2 / 3) and sorted(arg) == want


def test_boundary_check_mixed():
    top, arg = bounds.boundary_check(np.eye(4) / 4)
    assert top == pytest.approx(0.25) and len(arg) == 60


@pytest.mark.parametrize("n", [1, 2, 3])
def test_outward_push_detected(n):
    rho = bounds.minimal_purity_state(n)
    d = 1 << n
    for delta in (1e-4, 1e-3):
        out = np.eye(d) / d + (1 + delta) * (rho - np.eye(d) / d)
        assert dense.eigen_min(out) > 0
        assert detect(out).detected


def test_thresholds():
    assert bounds.purity_lower_threshold(2) == pytest.approx(2 / 3)
    assert bounds.purity_lower_threshold(4) == pytest.approx(4 / 15)
    for d in range(2, 40):
        assert bounds.purity_lower_threshold(d) <= bounds.minimal_purity_purity(d)
    with pytest.raises(ValidationError):
        bounds.purity_lower_threshold(1)


@pytest.mark.parametrize("n,m", [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
def test_lift_purity_and_boundary(n, m):
    res = bounds.lift_boundary_state(bounds.minimal_purity_state(n), m)
    dense.check_density(res.state)
    assert res.input_on_boundary and res.warning is None
    assert res.purity == pytest.approx(res.expected_purity, abs=1e-12)
    r = dense.purity(bounds.minimal_purity_state(n))
    assert (1 << m) - 1 / res.purity <= (1 << n) - 1 / r + 1e-9
    if m <= 3:
        top, _ = bounds.boundary_check(res.state, m)
        assert top == pytest.approx(res.purity, abs=1e-12)


def test_lift_first_step_value():
    assert bounds.lifted_purity(2 / 3, 1, 2) == pytest.approx(2 / 7)


def test_lift_warns_off_boundary():
    res = bounds.lift_boundary_state(np.eye(2) / 2 * 0.5 + 0.5 * dense.ket_to_dm([1, 0]), 2)
    assert not res.input_on_boundary and res.warning


def test_certificate_examples():
    c = bounds.pauli_l1_certificate(np.eye(2) / 2)
    assert c.components[0][0] == 1 and len(c.components) == 1
    c = bounds.pauli_l1_certificate(dense.ket_to_dm([1, 1]))
    kept = [(w, lab) for w, lab, _ in c.components if w > 1e-12]
    assert len(kept) == 1 and kept[0][1] == "X" and kept[0][0] == pytest.approx(1)
    assert bounds.pauli_l1_certificate(dense.bloch_to_dm(0.7, 0.7, 0)) is None


@given(st.integers(0, 2**31), st.sampled_from([2, 4]))
def test_low_purity_states_certified(seed, d):
    r = np.random.default_rng(seed)
    rho = dense.sample_induced(d, d, r)
    lo = 1 / d
    rho = bounds.rescale_to_purity(rho, lo + r.uniform(0, 0.999) * (bounds.purity_lower_threshold(d) - lo))
    cert = bounds.pauli_l1_certificate(rho)
    assert cert is not None and cert.residual < 1e-10
    ws = [w for w, _, _ in cert.components]
    assert min(ws) >= 0 and sum(ws) == pytest.approx(1)


def test_certificate_components_are_members(rng):
    for d in (2, 4):
        target = 1 / d + 0.9 * (bounds.purity_lower_threshold(d) - 1 / d)
        rho = bounds.rescale_to_purity(dense.sample_induced(d, d, rng), target)
        for w, _, comp in bounds.pauli_l1_certificate(rho).components:
            dense.check_density(comp)
            assert bounds.polytope_membership(comp).member


def test_membership_mixture_inside(rng):
    for n in (1, 2):
        rho = random_mixture(n, rng)
        v = bounds.polytope_membership(rho)
        assert v.status == "inside"
        assert v.extra["reconstruction_error"] <= 1e-7
        assert all(w >= 0 for w in v.weights.values()) and sum(v.weights.values()) == pytest.approx(1)


def test_membership_t_state_outside(t_state):
    v = bounds.polytope_membership(t_state)
    assert v.status == "outside"
    # re-verify: value on rho exceeds every vertex value
    verts = bounds._vertex_matrix(1)
    t = bounds.pauli_vector(t_state)
    assert v.witness @ t - (verts @ v.witness).max() > 1e-7


@pytest.mark.parametrize("n", [1, 2, 3])
def test_membership_minimal_state_boundary(n):
    v = bounds.polytope_membership(bounds.minimal_purity_state(n))
    assert v.status == "boundary" and v.distance <= 1e-7


def test_membership_budget_inconclusive(t_state):
    v = bounds.polytope_membership(dense.ket_to_dm([np.cos(0.4), np.sin(0.4) * np.exp(0.3j)]), max_iters=1)
    assert v.status in ("inconclusive", "outside")


@pytest.mark.parametrize("n,trials,mode", [(1, 2000, "membership"), (2, 100, "membership"), (2, 200, "criterion"),
                                           (3, 10, "membership")])
def test_conjecture_scan_no_counterexamples(n, trials, mode, rng):
    rep = bounds.conjecture_scan(n, trials, rng, mode)
    assert rep.counterexamples == [] and sum(rep.statuses.values()) == trials


def test_conjecture_scan_mode_checks(rng):
    with pytest.raises(Exception):
        bounds.conjecture_scan(4, 1, rng, "membership")


@pytest.mark.parametrize("c", [0.0, 0.5, 1.0])
def test_ball_no_violations(c, rng):
    rho = bounds.saturating_instance(4, 2, c)
    rep = bounds.absolute_ball_reduction(rho, 2, 300, rng)
    assert rep.c == pytest.approx(c, abs=1e-9)
    assert rep.violations == 0 and rep.max_reduced_purity <= 1 / (2 - c) + 1e-9
    assert rep.saturating_purity == pytest.approx(1 / (2 - c), abs=1e-9)
    for r in rep.records:
        assert 0 <= r.q <= 1 and r.p_s <= r.q**2 + 1e-12 and r.p_r <= (1 - r.q) ** 2 + 1e-12


def test_ball_examples(rng):
    assert bounds.absolute_ball_reduction(np.eye(4) / 4, 2, 50, rng).max_reduced_purity == pytest.approx(0.5)
    rep = bounds.absolute_ball_reduction(bounds.minimal_purity_state(2), 2, 100, rng)
    assert rep.bound == pytest.approx(2 / 3)
    with pytest.raises(ValidationError):
        bounds.absolute_ball_reduction(dense.ket_to_dm([1, 0, 0, 0]), 2, 1, rng)


def test_alpha_and_unfaithful():
    assert bounds.fidelity_alpha_bound(4) == pytest.approx(0.5)
    rho = bounds.minimal_purity_state(2)
    assert bounds.unfaithful_bound(4) == pytest.approx(0.25 + 0.5 * math.sqrt(1 / 14))
    assert dense.eigen_max(rho) <= 0.38364
    ok, slack = bounds.unfaithful_check(rho)
    assert ok and slack > 0
    assert not bounds.unfaithful_check(dense.ket_to_dm([1, 0, 0, 0]))[0]


def test_max_fidelity_t_state():
    psi = np.array([1, np.exp(1j * np.pi / 4)]) / math.sqrt(2)
    f = bounds.max_stab_fidelity(psi)
    assert f == pytest.approx((2 + math.sqrt(2)) / 4) and f >= bounds.fidelity_alpha_bound(2)


@pytest.mark.parametrize("n", [1, 2])
def test_design_moments_exact(n, rng):
    want = bounds.design_moments(1 << n)
    for _ in range(20):
        psi = rng.integers(-4, 5, 1 << n) + 1j * rng.integers(-4, 5, 1 << n)
        if not np.any(psi):
            continue
        assert bounds.stab_design_moments(psi, n, exact=True) == want
        approx = bounds.stab_design_moments(psi, n)
        assert all(abs(a - float(b)) < 1e-12 for a, b in zip(approx, want))


def test_single_qubit_moment_values():
    assert bounds.design_moments(2) == (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))
