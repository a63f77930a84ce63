"""Sample paths: exact jump simulation, running averages and time changes.

Paths are right-continuous step functions stored as jump epochs and the
post-jump values.  Batch samplers (``sample_terminal`` and friends) draw
only the time-t marginal and are what the Monte Carlo harness uses.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .processes import ProcessSpec
from .subordinators import SubordinatorSpec, sample_increment

__all__ = [
    "Trajectory",
    "simulate_ppok",
    "simulate_skellam_type",
    "simulate_time_changed",
    "simulate",
    "running_average",
    "running_average_path",
    "simulate_running_avg_compound",
    "sample_terminal",
    "sample_running_average",
    "sample_running_avg_compound",
    "poisson_large",
    "default_subordinator",
    "STEPS_PER_UNIT",
]

STEPS_PER_UNIT = 1000
# numpy's Poisson sampler refuses means beyond ~9e18; far below that the
# normal approximation is exact to double precision anyway
_POISSON_NORMAL = 1e15
_INT_CAP = 2**62


@dataclass(frozen=True, eq=False)
class Trajectory:
    T: float
    epochs: np.ndarray
    values: np.ndarray
    initial_value: float = 0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("horizon must be positive")
        ep = np.asarray(self.epochs, dtype=float)
        vals = np.asarray(self.values)
        if ep.shape != vals.shape or ep.ndim != 1:
            raise ValueError("epochs and values must be 1-d and the same length")
        if ep.size and (ep[0] <= 0 or ep[-1] > self.T or np.any(np.diff(ep) <= 0)):
            raise ValueError("epochs must be strictly increasing inside (0, T]")
        ep.setflags(write=False)
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "epochs", ep)
        object.__setattr__(self, "values", vals)

    @property
    def n_jumps(self):
        return self.epochs.size

    @property
    def terminal(self):
        return self.values[-1] if self.values.size else self.initial_value

    def value_at(self, t):
        i = np.searchsorted(self.epochs, t, side="right")
        return self.values[i - 1] if i else self.initial_value

    def increments(self):
        return np.diff(self.values, prepend=self.initial_value)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.T == other.T
            and self.initial_value == other.initial_value
            and np.array_equal(self.epochs, other.epochs)
            and np.array_equal(self.values, other.values)
            and self.values.dtype.kind == other.values.dtype.kind
        )

    # CSV: header t,value; a row at 0, one per epoch, a row at T
    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write("t,value\n")
        fmt = _fmt
        buf.write(f"{fmt(0.0)},{fmt(self.initial_value)}\n")
        for e, v in zip(self.epochs, self.values):
            buf.write(f"{fmt(e)},{fmt(v)}\n")
        buf.write(f"{fmt(self.T)},{fmt(self.terminal)}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source):
        """Read from a path or from CSV text."""
        if "\n" not in str(source):
            with open(source, newline="") as fh:
                source = fh.read()
        rows = list(csv.reader(io.StringIO(source)))
        if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
            raise ValueError("expected header t,value")
        rows = rows[1:]
        if len(rows) < 2:
            raise ValueError("need at least the rows at 0 and T")
        vals = [_parse(v) for _, v in rows]
        integer = all(isinstance(v, int) for v in vals)
        dtype = np.int64 if integer else float
        mid = rows[1:-1]
        return cls(
            float(rows[-1][0]),
            np.array([float(r[0]) for r in mid]),
            np.array(vals[1:-1], dtype=dtype),
            vals[0],
        )


def _fmt(x):
    # repr of a Python float is the shortest string that round-trips
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _parse(s):
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        return float(s)


# --- exact jump paths -------------------------------------------------------


def _arrivals(rate, T, rng):
    """Epochs of a rate-``rate`` Poisson stream on (0, T] by inverse-CDF exponentials."""
    if rate <= 0:
        return np.empty(0)
    out = []
    t = 0.0
    chunk = max(16, int(rate * T * 1.1) + 16)
    while True:
        gaps = -np.log1p(-rng.random(chunk)) / rate
        times = t + np.cumsum(gaps)
        keep = times[times <= T]
        out.append(keep)
        if keep.size < chunk:
            break
        t = times[-1]
    return np.concatenate(out)


def simulate_ppok(k, lam, T, rng):
    """PPoK path: total rate k lam, jump sizes uniform on 1..k."""
    if k < 1 or not lam > 0 or not T > 0:
        raise ValueError("need k >= 1, lam > 0, T > 0")
    epochs = _arrivals(k * lam, T, rng)
    sizes = 1 + np.floor(k * rng.random(epochs.size)).astype(np.int64)
    sizes = np.minimum(sizes, k)
    return Trajectory(T, epochs, np.cumsum(sizes), 0)


def simulate_skellam_type(spec, T, rng):
    """Skellam / SPoK path as the difference of two independent PPoK paths."""
    if spec.family not in ("skellam", "spok", "ppok"):
        raise ValueError("expected a skellam, spok or ppok spec")
    k = 1 if spec.family == "skellam" else spec.k
    up = simulate_ppok(k, spec.l1, T, rng)
    if spec.family == "ppok" or spec.l2 == 0:
        return up
    down = simulate_ppok(k, spec.l2, T, rng)
    epochs = np.concatenate([up.epochs, down.epochs])
    jumps = np.concatenate([up.increments(), -down.increments()])
    order = np.argsort(epochs, kind="stable")
    return Trajectory(T, epochs[order], np.cumsum(jumps[order]), 0)


def running_average(traj, t):
    """(1/t) int_0^t X(s) ds, summed exactly over the constant pieces."""
    if not 0 < t <= traj.T:
        raise ValueError(f"t must lie in (0, {traj.T}]")
    ep = traj.epochs
    n = np.searchsorted(ep, t, side="right")
    starts = np.concatenate([[0.0], ep[:n]])
    ends = np.concatenate([ep[:n], [t]])
    vals = np.concatenate([[traj.initial_value], traj.values[:n]]).astype(float)
    return math.fsum(vals * (ends - starts)) / t


def running_average_path(traj, n_points=200):
    """Running average sampled on a uniform grid of (0, T] as a Trajectory."""
    grid = traj.T * np.arange(1, n_points + 1) / n_points
    vals = np.array([running_average(traj, g) for g in grid])
    return Trajectory(traj.T, grid, vals, 0.0)


# --- time-changed paths -------------------------------------------------------


def poisson_large(rng, mean):
    """Poisson draws that stay valid for means beyond numpy's range."""
    mean = np.asarray(mean, dtype=float)
    small = mean < _POISSON_NORMAL
    out = np.empty(mean.shape, dtype=np.int64)
    out[small] = rng.poisson(mean[small])
    if not small.all():
        big = mean[~small]
        z = rng.standard_normal(big.shape)
        out[~small] = np.minimum(np.rint(big + np.sqrt(big) * z), _INT_CAP).astype(np.int64)
    return out


def _ppok_at(rng, k, lam, y):
    """PPoK evaluated over operational-time lengths y (vector): sum_j j Poisson(lam y)."""
    out = np.zeros(np.shape(y), dtype=np.int64)
    for j in range(1, k + 1):
        out += j * poisson_large(rng, lam * np.asarray(y))
    return out


def _inner_increments(inner, dD, rng, dD2=None):
    fam = inner.family
    if fam in ("skellam", "ppok", "spok"):
        k = 1 if fam == "skellam" else inner.k
        up = _ppok_at(rng, k, inner.l1, dD)
        if fam == "ppok" or inner.l2 == 0:
            return up
        return up - _ppok_at(rng, k, inner.l2, dD if dD2 is None else dD2)
    raise ValueError(f"cannot time-change {fam}")


def simulate_time_changed(inner, sub, T, n_steps, rng, sub2=None, stats=None):
    """inner(D(t)) on the grid t_i = i T / n_steps.

    Operational time is the cumulative sum of exact subordinator increments;
    the inner process is advanced by its exact law over each slice.  With
    ``sub2`` the negative component of a Skellam-type inner process runs on
    its own independent clock (the SFSP / TSFSP construction).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not T > 0:
        raise ValueError("T must be positive")
    dt = T / n_steps
    dD = _increment(sub, dt, rng, n_steps, stats)
    dD2 = None if sub2 is None else _increment(sub2, dt, rng, n_steps, stats)
    inc = _inner_increments(inner, dD, rng, dD2)
    grid = dt * np.arange(1, n_steps + 1)
    grid[-1] = T
    jumped = inc != 0
    return Trajectory(T, grid[jumped], np.cumsum(inc)[jumped], 0)


def default_subordinator(alpha, mu=None):
    if mu is None:
        return SubordinatorSpec.stable(alpha)
    return SubordinatorSpec.tempered_stable(alpha, mu)


def simulate(spec, T, rng, n_steps=None, stats=None):
    """Path of any family; subordinated families use a time grid
    (default STEPS_PER_UNIT steps per unit time)."""
    fam = spec.family
    if n_steps is None:
        n_steps = max(1, int(math.ceil(STEPS_PER_UNIT * T)))
    if fam in ("skellam", "ppok", "spok"):
        if fam == "ppok":
            return simulate_ppok(spec.k, spec.l1, T, rng)
        return simulate_skellam_type(spec, T, rng)
    if fam in ("ra_ppok", "ra_spok"):
        base = ProcessSpec.ppok(spec.k, spec.l1) if fam == "ra_ppok" else ProcessSpec.spok(spec.k, spec.l1, spec.l2)
        return running_average_path(simulate(base, T, rng), n_steps)
    if fam in ("sfpp", "tsfpp"):
        if spec.alpha1 == 1:
            return simulate_ppok(1, spec.l1, T, rng)
        sub = default_subordinator(spec.alpha1, spec.mu1 if fam == "tsfpp" else None)
        return simulate_time_changed(ProcessSpec.ppok(1, spec.l1), sub, T, n_steps, rng, stats=stats)
    if fam in ("sfsp", "tsfsp"):
        tempered = fam == "tsfsp"
        if spec.alpha1 == 1 and spec.alpha2 == 1:
            return simulate_skellam_type(ProcessSpec.skellam(spec.l1, spec.l2), T, rng)
        s1 = _clock(spec.alpha1, spec.mu1 if tempered else None)
        s2 = _clock(spec.alpha2, spec.mu2 if tempered else None)
        inner = ProcessSpec.skellam(spec.l1, spec.l2)
        return simulate_time_changed(inner, s1, T, n_steps, rng, sub2=s2, stats=stats)
    if fam == "tcspok":
        inner = ProcessSpec.spok(spec.k, spec.l1, spec.l2)
        return simulate_time_changed(inner, spec.sub, T, n_steps, rng, stats=stats)
    raise ValueError(fam)


class _Identity:
    """Deterministic clock D(t) = t, used when a component has alpha = 1."""

    family = "identity"


def _clock(alpha, mu):
    if alpha == 1:
        return _IDENTITY
    return default_subordinator(alpha, mu)


_IDENTITY = _Identity()


def _increment(sub, dt, rng, size, stats=None):
    if sub is _IDENTITY:
        return np.full(size, dt)
    return np.atleast_1d(sample_increment(sub, dt, rng, size=size, stats=stats))


# --- batch samplers of the time-t marginal --------------------------------------


def _clock_at(rng, alpha, mu, t, size, stats=None):
    if alpha == 1:
        return np.full(size, float(t))
    return _increment(default_subordinator(alpha, mu), t, rng, size, stats)


def sample_terminal(spec, t, size, rng, stats=None):
    """``size`` independent draws of X(t) from its exact law.

    Subordinated families draw D(t) in one piece (no grid is needed for the
    marginal) and then the inner process at that operational time.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    fam = spec.family
    if fam in ("skellam", "ppok", "spok"):
        k = 1 if fam == "skellam" else spec.k
        up = _ppok_at(rng, k, spec.l1, np.full(size, float(t)))
        if fam == "ppok" or spec.l2 == 0:
            return up
        return up - _ppok_at(rng, k, spec.l2, np.full(size, float(t)))
    if fam in ("sfpp", "tsfpp"):
        mu = spec.mu1 if fam == "tsfpp" else None
        d = _clock_at(rng, spec.alpha1, mu, t, size, stats)
        return poisson_large(rng, spec.l1 * d)
    if fam in ("sfsp", "tsfsp"):
        tempered = fam == "tsfsp"
        d1 = _clock_at(rng, spec.alpha1, spec.mu1 if tempered else None, t, size, stats)
        d2 = _clock_at(rng, spec.alpha2, spec.mu2 if tempered else None, t, size, stats)
        return poisson_large(rng, spec.l1 * d1) - poisson_large(rng, spec.l2 * d2)
    if fam == "tcspok":
        d = np.atleast_1d(sample_increment(spec.sub, t, rng, size=size, stats=stats))
        return _ppok_at(rng, spec.k, spec.l1, d) - _ppok_at(rng, spec.k, spec.l2, d)
    if fam in ("ra_ppok", "ra_spok"):
        return sample_running_average(spec, t, size, rng)
    raise ValueError(fam)


def _sum_by_owner(owner, vals, size):
    return np.bincount(owner, weights=vals, minlength=size)


def sample_running_average(spec, t, size, rng):
    """Exact path integrals (1/t) int_0^t X(s) ds of the underlying PPoK/SPoK.

    Given the number of jumps on [0, t], the epochs are iid uniform, and a
    jump of size j at epoch tau contributes j (t - tau) / t.
    """
    if spec.family not in ("ra_ppok", "ra_spok", "ppok", "spok"):
        raise ValueError("expected a PPoK or SPoK running average")
    k = spec.k
    l2 = spec.l2 if spec.family in ("ra_spok", "spok") else 0.0
    rate = k * (spec.l1 + l2)
    n = rng.poisson(rate * t, size)
    owner = np.repeat(np.arange(size), n)
    m = owner.size
    sizes = np.minimum(1 + np.floor(k * rng.random(m)), k)
    if l2 > 0:
        sign = np.where(rng.random(m) < spec.l1 / (spec.l1 + l2), 1.0, -1.0)
        sizes = sizes * sign
    tau = t * rng.random(m)
    return _sum_by_owner(owner, sizes * (t - tau) / t, size)


def sample_running_avg_compound(spec, t, size, rng):
    """Compound-Poisson representation: Poisson(k(l1+l2)t) jumps, each drawn
    from the mixed double-uniform law (1/i)[(1-w) 1_[-i,0] + w 1_[0,i]]
    with i uniform on 1..k and w = l1 / (l1 + l2)."""
    if spec.family not in ("ra_ppok", "ra_spok"):
        raise ValueError("expected a running-average spec")
    k = spec.k
    l2 = spec.l2 if spec.family == "ra_spok" else 0.0
    w = spec.l1 / (spec.l1 + l2)
    n = rng.poisson(k * (spec.l1 + l2) * t, size)
    owner = np.repeat(np.arange(size), n)
    m = owner.size
    i = np.minimum(1 + np.floor(k * rng.random(m)), k)
    u = rng.random(m)
    sign = np.where(rng.random(m) < w, 1.0, -1.0) if l2 > 0 else 1.0
    return _sum_by_owner(owner, sign * i * u, size)


def simulate_running_avg_compound(spec, t, rng):
    """One draw of the running average at time t from the compound representation."""
    if not t > 0:
        raise ValueError("t must be positive")
    return float(sample_running_avg_compound(spec, t, 1, rng)[0])
