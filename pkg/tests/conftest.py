import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

T_BLOCH = (1 / np.sqrt(2), 1 / np.sqrt(2), 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def t_state():
    from tricrit.dense import bloch_to_dm

    return bloch_to_dm(*T_BLOCH)


def random_mixture(n, rng, components=None):
    """Dirichlet mixture of enumerated stabilizer projectors (all of them by default)."""
    from tricrit.stabilizer import enumerate_stabilizer_states

    st = enumerate_stabilizer_states(n)
    v = st.vectors
    idx = np.arange(len(st)) if components is None else rng.choice(len(st), components, replace=False)
    w = rng.dirichlet(np.ones(len(idx)))
    return np.einsum("s,sx,sy->xy", w, v[idx], v[idx].conj())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        ok, title, detail = results[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} ({detail})")
