"""Seeded Monte Carlo estimators and goodness-of-fit comparisons.

Replicates are split into fixed blocks of ``BLOCK`` draws; block b uses a
Philox stream keyed by (seed, b).  The partition never depends on the
number of worker threads, so results are bit-identical however many
workers run (SKELLAMK_THREADS caps the count).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .processes import ProcessSpec
from .subordinators import sample_increment
from .trajectories import sample_terminal

__all__ = [
    "BLOCK",
    "CoverageError",
    "EmpiricalDist",
    "Comparison",
    "block_rng",
    "run_blocks",
    "worker_count",
    "estimate_pmf",
    "estimate_moments",
    "estimate_transition",
    "estimate_laplace",
    "compare",
    "ks_two_sample",
    "ks_uniform",
]

BLOCK = 1 << 15


class CoverageError(ValueError):
    pass


def worker_count():
    env = os.environ.get("SKELLAMK_THREADS")
    n = os.cpu_count() or 1
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            raise ValueError(f"SKELLAMK_THREADS must be an integer, got {env!r}") from None
    return n


def block_rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def run_blocks(draw, n, seed, threads=None):
    """Concatenate draw(rng, size) over the fixed blocks covering n replicates."""
    if n < 1:
        raise ValueError("need at least one replicate")
    sizes = [BLOCK] * (n // BLOCK) + ([n % BLOCK] if n % BLOCK else [])

    def one(b):
        return np.asarray(draw(block_rng(seed, b), sizes[b]))

    workers = threads or worker_count()
    if workers == 1 or len(sizes) == 1:
        parts = [one(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(sizes))) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    return np.concatenate(parts)


@dataclass(frozen=True)
class EmpiricalDist:
    counts: dict
    n_samples: int
    seed: int
    spec: ProcessSpec | None = None
    t: float | None = None

    def __post_init__(self):
        counts = {int(k): int(v) for k, v in sorted(self.counts.items()) if v}
        if sum(counts.values()) != self.n_samples:
            raise ValueError("counts must add up to n_samples")
        object.__setattr__(self, "counts", counts)

    def freq(self, m):
        return self.counts.get(int(m), 0) / self.n_samples

    def se(self, m):
        p = self.freq(m)
        return math.sqrt(p * (1 - p) / self.n_samples)

    @property
    def support(self):
        return min(self.counts), max(self.counts)

    def mean(self):
        return math.fsum(k * v for k, v in self.counts.items()) / self.n_samples

    def to_dict(self):
        return {
            "spec": None if self.spec is None else self.spec.to_dict(),
            "t": self.t,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "counts": {str(k): v for k, v in self.counts.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        spec = None if d.get("spec") is None else ProcessSpec.from_dict(d["spec"])
        t = None if d.get("t") is None else float(d["t"])
        return cls({int(k): int(v) for k, v in d["counts"].items()}, int(d["n_samples"]), int(d["seed"]), spec, t)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_samples(cls, x, seed, spec=None, t=None):
        vals, cnt = np.unique(np.asarray(x, dtype=np.int64), return_counts=True)
        return cls(dict(zip(vals.tolist(), cnt.tolist())), int(cnt.sum()), seed, spec, t)


def _terminal_draw(spec, t):
    return lambda rng, size: sample_terminal(spec, t, size, rng)


def estimate_pmf(spec, t, n_samples, seed, threads=None):
    if not spec.lattice:
        raise ValueError(f"{spec.family} is continuous; use estimate_moments")
    x = run_blocks(_terminal_draw(spec, t), n_samples, seed, threads)
    return EmpiricalDist.from_samples(x, seed, spec, t)


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    var: float
    se_mean: float
    se_var: float
    n: int


def moment_estimate(x):
    x = np.asarray(x, dtype=float)
    n = x.size
    m = x.mean()
    d = x - m
    v = float(np.mean(d * d)) * n / (n - 1)
    m4 = float(np.mean(d**4))
    return MomentEstimate(float(m), v, math.sqrt(v / n), math.sqrt(max(m4 - v * v, 0.0) / n), n)


def estimate_moments(spec, t, n_samples, seed, threads=None):
    return moment_estimate(run_blocks(_terminal_draw(spec, t), n_samples, seed, threads))


def estimate_transition(spec, t, delta, n_samples, seed, threads=None):
    """Frequencies of X(t + delta) - X(t) with standard errors.

    Increments are stationary and independent of the past, so the law of
    the move from any state at any t is that of X(delta); ``t`` only labels
    the run.
    """
    if spec.family not in ("skellam", "spok", "ppok"):
        raise ValueError("transition checks are for Skellam-type processes")
    if not delta > 0:
        raise ValueError("delta must be positive")
    emp = estimate_pmf(spec, delta, n_samples, seed, threads)
    return {m: (emp.freq(m), emp.se(m)) for m in emp.counts}


def estimate_laplace(sub, dt, s, n_samples, seed, threads=None, stats=None):
    """(mean, standard error) of exp(-s D(dt))."""
    x = run_blocks(lambda rng, size: np.exp(-s * sample_increment(sub, dt, rng, size=size, stats=stats)), n_samples, seed, threads)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


# --- comparisons ----------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    tv_distance: float
    chi2_stat: float
    chi2_pvalue: float
    dof: int

    def __iter__(self):
        return iter((self.tv_distance, self.chi2_stat, self.chi2_pvalue))


def _pool(expected, observed, threshold=5.0):
    """Merge adjacent cells left to right until each expects >= threshold."""
    e_out, o_out = [], []
    e_acc = o_acc = 0.0
    for e, o in zip(expected, observed):
        e_acc += e
        o_acc += o
        if e_acc >= threshold:
            e_out.append(e_acc)
            o_out.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc or o_acc:
        if e_out:
            e_out[-1] += e_acc
            o_out[-1] += o_acc
        else:
            e_out.append(e_acc)
            o_out.append(o_acc)
    return np.array(e_out), np.array(o_out)


def compare(emp, table, threshold=5.0, max_bound=1e-3):
    """TV distance and pooled chi-square test of ``emp`` against ``table``.

    Mass outside the table window gets its own cell when it is expected
    often enough; otherwise outside observations join the edge cells and
    the window probabilities are renormalized.
    """
    from scipy.stats import chi2

    if table.truncation_bound > max_bound:
        raise CoverageError(f"table misses up to {table.truncation_bound:.2e} of the mass")
    n = emp.n_samples
    lo, hi = table.m_lo, table.m_hi
    keys = set(emp.counts) | set(range(lo, hi + 1))
    tv = 0.5 * math.fsum(abs(emp.freq(m) - table.prob(m)) for m in keys)

    p = np.asarray(table.probs, dtype=float)
    obs = np.zeros(p.size)
    outside = 0
    for m, c in emp.counts.items():
        if lo <= m <= hi:
            obs[m - lo] += c
        else:
            outside += c
    rest = max(1.0 - math.fsum(p), 0.0)
    if n * rest >= threshold:
        # enough expected mass off the window for a cell of its own
        e, o = _pool(n * p, obs, threshold)
        e, o = np.append(e, n * rest), np.append(o, outside)
    else:
        obs[0] += sum(c for m, c in emp.counts.items() if m < lo)
        obs[-1] += sum(c for m, c in emp.counts.items() if m > hi)
        e, o = _pool(n * p / p.sum(), obs, threshold)
    if e.size < 2:
        return Comparison(tv, 0.0, 1.0, 0)
    stat = float(np.sum((o - e) ** 2 / e))
    dof = e.size - 1
    return Comparison(tv, stat, float(chi2.sf(stat, dof)), dof)


def ks_two_sample(x, y):
    from scipy.stats import ks_2samp

    return float(ks_2samp(x, y).pvalue)


def ks_uniform(p_values):
    from scipy.stats import kstest

    return float(kstest(p_values, "uniform").pvalue)
