"""Detection probabilities for random mixed states: closed-form bounds and Monte Carlo."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special, stats

from . import dense
from .criterion import DEFAULT_TOL, detect, negativity_denominator
from .errors import DimensionError, ValidationError
from .stabilizer import canonical_kets, check_capacity

SINGLE_RATE = math.sqrt(1 + 1 / math.sqrt(2)) - 1
LINEAR_RATE = (math.sqrt(0.5 + 1 / math.sqrt(2)) - 1) ** 2
MODES = ("single-witness", "full-criterion")
CSV_FIELDS = ["n", "k", "trials", "seed", "mode", "detected", "estimate", "ci_low", "ci_high", "bound"]
BATCH = 1000


def single_witness_bound(k: float) -> float:
    if k < 0:
        raise ValidationError("k must be nonnegative")
    return 2 * math.exp(-SINGLE_RATE * k)


def criterion_witness_count(n: int) -> int:
    """``4 (2^n - 1) 2^n prod_l (2^l + 1)``; counting only, so any ``n`` is accepted."""
    return negativity_denominator(n) << n


def criterion_union_bound(n: int, k: float) -> float:
    return min(1.0, criterion_witness_count(n) * single_witness_bound(k))


def linear_method_bound(m: int, k: float, d: int) -> float:
    if m < 1 or d < 2 or k < 0:
        raise ValidationError("need M >= 1, d >= 2, k >= 0")
    return 2 * math.exp(m * math.log(4 * math.sqrt(m) * d) - LINEAR_RATE * k)


def exact_single_witness_probability(k: int) -> float:
    """Closed form for the canonical witness under the induced measure.

    The witness has two nonzero eigenvalues ``(1 +- sqrt 3)/2``, so its sign
    is set by the ratio of two independent Gamma(k) weights and the
    probability is the regularized incomplete beta ``I_x(k, k)`` at
    ``x = r/(1+r)``, ``r = 2 - sqrt 3``, for every qubit count.
    """
    r = 2 - math.sqrt(3)
    return float(special.betainc(k, k, r / (1 + r)))


def wilson_interval(x: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Two-sided Wilson interval; for zero counts a one-sided exact upper limit."""
    if n <= 0:
        raise ValidationError("need at least one trial")
    if x == 0:
        return 0.0, float(stats.binomtest(0, n, alternative="less").proportion_ci(level, "exact").high)
    ci = stats.binomtest(x, n).proportion_ci(level, "wilson")
    return float(ci.low), float(ci.high)


def clopper_pearson(x: int, n: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(x, n).proportion_ci(level, "exact")
    return float(ci.low), float(ci.high)


@dataclass
class DetectionExperiment:
    n: int
    k: int
    trials: int
    seed: int
    mode: str
    detected: int
    estimate: float
    ci_low: float
    ci_high: float
    bound: float

    def row(self) -> dict:
        return asdict(self)


def _canonical_witness_rows(n: int) -> tuple[np.ndarray, np.ndarray]:
    zero, plus, plus_i = canonical_kets(n)
    kets = np.array([plus.vector(), plus_i.vector(), zero.vector()])
    return kets, np.array([1.0, 1.0, -1.0])


def _batch_sizes(trials: int):
    full, rest = divmod(trials, BATCH)
    return [BATCH] * full + ([rest] if rest else [])


def monte_carlo_detection(n: int, k: int, trials: int, seed: int, mode: str = "single-witness",
                          tol: float = DEFAULT_TOL, witness_kets: np.ndarray | None = None) -> DetectionExperiment:
    """Fraction of induced-measure states ``pi_{2^n, k}`` that are detected.

    Batches draw from independent streams spawned from ``seed`` so counts do
    not depend on how batches are scheduled.  ``witness_kets`` replaces the
    canonical witness (rows ``psi_i, psi_j, psi_k``, the last subtracted).
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}")
    if k < 1 or trials < 1:
        raise ValidationError("k and trials must be positive")
    check_capacity(n)
    if mode == "full-criterion" and n > 3:
        raise DimensionError("full-criterion sampling is limited to n <= 3")
    d = 1 << n
    sizes = _batch_sizes(trials)
    # each (n, k, mode) cell gets its own entropy so cells are uncorrelated
    root = np.random.SeedSequence([seed, n, k, MODES.index(mode)])
    streams = [np.random.default_rng(s) for s in root.spawn(len(sizes))]
    if witness_kets is None:
        kets, signs = _canonical_witness_rows(n)
    else:
        kets, signs = np.asarray(witness_kets), np.array([1.0, 1.0, -1.0])
    hits = 0
    for size, rng in zip(sizes, streams):
        g = dense.ginibre(d, k, rng, size)
        if mode == "single-witness":
            # Tr(W G G^dagger) = sum_s sign_s |psi_s^dagger G|^2
            amp = np.einsum("sx,txk->tsk", kets.conj(), g)
            num = np.einsum("tsk,s->t", np.abs(amp) ** 2, signs)
            norm = np.einsum("txk,txk->t", g.conj(), g).real
            hits += int(np.count_nonzero(num / norm < -tol))
        else:
            w = g @ np.swapaxes(g.conj(), -1, -2)
            w /= np.trace(w, axis1=1, axis2=2).real[:, None, None]
            hits += sum(detect(r, tol).detected for r in w)
    lo, hi = wilson_interval(hits, trials)
    bound = single_witness_bound(k) if mode == "single-witness" else criterion_union_bound(n, k)
    return DetectionExperiment(n, k, trials, seed, mode, hits, hits / trials, lo, hi, bound)


def sweep(ns, ks, trials: int, seed: int, mode: str = "single-witness") -> list[DetectionExperiment]:
    return [monte_carlo_detection(n, k, trials, seed, mode) for n in ns for k in ks]


def to_csv(rows: list[DetectionExperiment]) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow(r.row())
    return buf.getvalue()


def log_linear_fit(ks, estimates) -> tuple[float, float, float]:
    """Least-squares ``log p = a + b k`` over nonzero cells; returns (slope, intercept, R^2)."""
    ks = np.asarray(ks, dtype=float)
    p = np.asarray(estimates, dtype=float)
    keep = p > 0
    if keep.sum() < 2:
        raise ValidationError("need at least two nonzero estimates")
    res = stats.linregress(ks[keep], np.log(p[keep]))
    return float(res.slope), float(res.intercept), float(res.rvalue ** 2)
