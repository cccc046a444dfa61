import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tricrit import dense
from tricrit.clifford import CliffordCircuit, sample_clifford
from tricrit.errors import DimensionError, ValidationError

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_purity_basics():
    assert dense.purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert dense.purity(dense.ket_to_dm([1, 1j])) == pytest.approx(1)


def test_tensor_partial_trace():
    assert np.allclose(dense.tensor(np.eye(2) / 2, np.eye(2) / 2), np.eye(4) / 4)
    bell = dense.ket_to_dm(BELL)
    assert np.allclose(dense.partial_trace(bell, [0]), np.eye(2) / 2)
    assert np.allclose(dense.partial_trace_dims(bell, (2, 2), 1), np.eye(2) / 2)
    with pytest.raises(DimensionError):
        dense.partial_trace(bell, [2])


@given(st.integers(0, 2**31), st.integers(1, 2), st.integers(1, 2))
def test_partial_trace_inverts_tensor(seed, na, nb):
    r = np.random.default_rng(seed)
    a = dense.sample_induced(1 << na, 3, r)
    b = dense.sample_induced(1 << nb, 2, r)
    ab = dense.tensor(a, b)
    assert np.abs(dense.partial_trace(ab, range(na)) - a).max() < 1e-12
    assert dense.purity(ab) == pytest.approx(dense.purity(a) * dense.purity(b), abs=1e-12)


def test_postselect_examples():
    zz = dense.ket_to_dm([1, 0, 0, 0])
    s, p = dense.postselect(zz, [1], [0])
    assert p == pytest.approx(1) and np.allclose(s, dense.ket_to_dm([1, 0]))
    pp = dense.tensor(dense.ket_to_dm([1, 1]), dense.ket_to_dm([1, 1]))
    s, p = dense.postselect(pp, [1], [0])
    assert p == pytest.approx(0.5) and np.allclose(s, dense.ket_to_dm([1, 1]))
    s, p = dense.postselect(dense.ket_to_dm([0, 1, 0, 0]), [1], [0])
    assert s is None and p == 0.0


def test_postselect_complete_outcomes(rng):
    rho = dense.sample_induced(8, 3, rng)
    tot = sum(dense.postselect(rho, [0, 2], [a, b])[1] for a in (0, 1) for b in (0, 1))
    assert tot == pytest.approx(1, abs=1e-10)


def test_apply_circuit_examples(rng):
    plus = dense.apply_circuit(dense.ket_to_dm([1, 0]), CliffordCircuit(1, [("H", (0,))]))
    assert np.allclose(plus, dense.ket_to_dm([1, 1]))
    bell = dense.apply_circuit(dense.ket_to_dm([1, 0, 1, 0]), CliffordCircuit(2, [("CNOT", (0, 1))]))
    assert np.allclose(bell, dense.ket_to_dm(BELL))
    rho = dense.sample_induced(8, 2, rng)
    out = dense.apply_circuit(rho, sample_clifford(3, rng))
    assert dense.purity(out) == pytest.approx(dense.purity(rho), abs=1e-12)


def test_eigen_extremes():
    assert dense.eigen_max(np.eye(4) / 4) == pytest.approx(0.25)
    assert dense.eigen_max(dense.ket_to_dm([1, 1])) == pytest.approx(1)
    assert dense.eigen_min(np.eye(2) / 2) == pytest.approx(0.5)


def test_check_density_names_invariant():
    with pytest.raises(ValidationError, match="Hermitian"):
        dense.check_density(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ValidationError, match="trace"):
        dense.check_density(np.eye(2))
    with pytest.raises(ValidationError, match="semidefinite"):
        dense.check_density(np.diag([1.5, -0.5]))


def test_induced_pure_for_k1_and_valid(rng):
    for d, k in ((2, 1), (4, 1), (8, 3), (3, 5)):
        for _ in range(20):
            rho = dense.sample_induced(d, k, rng)
            dense.check_density(rho)
            if k == 1:
                assert dense.purity(rho) == pytest.approx(1, abs=1e-10)


def test_induced_mean_purity():
    # E[Tr rho^2] = (d + k) / (d k + 1) for the induced measure
    for seed in (1, 2):
        s = dense.sample_induced(2, 2, np.random.default_rng(seed), size=100_000)
        pur = np.einsum("tij,tji->t", s, s).real
        se = pur.std() / np.sqrt(pur.size)
        assert abs(pur.mean() - 4 / 5) < 3 * se + 1e-12
    means = []
    r = np.random.default_rng(3)
    for k in (1, 2, 4, 8):
        s = dense.sample_induced(4, k, r, size=10_000)
        means.append(np.einsum("tij,tji->t", s, s).real.mean())
    assert all(a > b for a, b in zip(means, means[1:]))


def test_haar_ket_mean_bloch(rng):
    b = np.array([dense.bloch_vector(dense.ket_to_dm(dense.haar_ket(2, rng))) for _ in range(10_000)])
    assert np.linalg.norm(b.mean(axis=0)) < 0.05


def test_haar_unitary_is_unitary(rng):
    u = dense.haar_unitary(5, rng)
    assert np.allclose(u @ u.conj().T, np.eye(5))


def test_seed_streams_reproducible():
    a = [g.random() for g in dense.seed_streams(7, 3)]
    b = [g.random() for g in dense.seed_streams(7, 3)]
    assert a == b and len(set(a)) == 3
