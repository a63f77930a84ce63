"""Finite probability tables with a truncation bound on the omitted mass."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..processes import ProcessSpec
from .pmf import (
    clamp_negative,
    mixed_poisson_weights,
    poisson_vector,
    ppok_pmf_vector,
    sfpp_pmf_vector,
    sfpp_tail_vector,
    skellam_pmf,
    tsfpp_pmf_vector,
)

__all__ = [
    "PmfTable",
    "pmf_table",
    "chernoff_upper",
    "ppok_upper_tail",
    "tsfpp_upper_tail",
    "HEAVY_CAP",
]

# largest support computed for heavy-tailed (stable-subordinated) families
HEAVY_CAP = 4096
# convolutions above this many multiply-adds go through the FFT
_FFT_WORK = 4e7


@dataclass(frozen=True, eq=False)
class PmfTable:
    """Probabilities on the integer window [m_lo, m_hi].

    ``truncation_bound`` bounds the probability mass outside the window
    (plus any mass lost to series truncation).  ``clamped`` is the largest
    round-off negative that was set to zero while building the table.
    """

    spec: ProcessSpec
    t: float
    m_lo: int
    m_hi: int
    probs: np.ndarray
    truncation_bound: float
    variant: str = "conv"
    clamped: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.size != self.m_hi - self.m_lo + 1:
            raise ValueError("probs length does not match the support window")
        if self.truncation_bound < 0:
            raise ValueError("truncation_bound must be non-negative")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def support(self):
        return range(self.m_lo, self.m_hi + 1)

    def prob(self, m):
        m = int(m)
        if m < self.m_lo or m > self.m_hi:
            return 0.0
        return float(self.probs[m - self.m_lo])

    def __getitem__(self, m):
        return self.prob(m)

    def total(self):
        return math.fsum(self.probs)

    def mean(self):
        return float(np.dot(np.arange(self.m_lo, self.m_hi + 1), self.probs))

    def restrict(self, lo, hi):
        """Sub-window; dropped mass is added to the truncation bound."""
        lo, hi = max(int(lo), self.m_lo), min(int(hi), self.m_hi)
        if lo > hi:
            raise ValueError("empty window")
        keep = self.probs[lo - self.m_lo : hi - self.m_lo + 1]
        dropped = self.total() - math.fsum(keep)
        return PmfTable(
            self.spec,
            self.t,
            lo,
            hi,
            keep,
            self.truncation_bound + max(dropped, 0.0),
            self.variant,
            self.clamped,
        )

    def trim(self, eps=0.0):
        """Drop leading and trailing entries <= eps (mass moved to the bound)."""
        nz = np.nonzero(self.probs > eps)[0]
        if nz.size == 0:
            return self
        return self.restrict(self.m_lo + nz[0], self.m_lo + nz[-1])

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "t": self.t,
            "variant": self.variant,
            "m_lo": self.m_lo,
            "m_hi": self.m_hi,
            "probs": [float(x) for x in self.probs],
            "truncation_bound": self.truncation_bound,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            ProcessSpec.from_dict(d["spec"]),
            float(d["t"]),
            int(d["m_lo"]),
            int(d["m_hi"]),
            np.asarray(d["probs"], dtype=float),
            float(d["truncation_bound"]),
            d.get("variant", "conv"),
        )

    def __eq__(self, other):
        if not isinstance(other, PmfTable):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.t == other.t
            and self.variant == other.variant
            and (self.m_lo, self.m_hi) == (other.m_lo, other.m_hi)
            and np.array_equal(self.probs, other.probs)
            and self.truncation_bound == other.truncation_bound
        )


# --- tail bounds ------------------------------------------------------------


def chernoff_upper(kappa, t, x, theta_max):
    """min over 0 < theta < theta_max of exp(t kappa(theta) - theta x).

    A rigorous bound on P(X(t) >= x) for a Levy process with cumulant
    function kappa.  Returns 1.0 when the bound is vacuous.
    """
    from scipy.optimize import minimize_scalar

    def f(th):
        v = t * kappa(th) - th * x
        return v if math.isfinite(v) else 1e300

    res = minimize_scalar(f, bounds=(1e-12, theta_max), method="bounded", options={"xatol": 1e-10})
    return min(1.0, math.exp(min(res.fun, 0.0)))


def ppok_upper_tail(k, lam, t, n):
    """Bound on P(N^k(t) > n)."""

    def kappa(th):
        return lam * sum(math.expm1(j * th) for j in range(1, k + 1))

    return chernoff_upper(kappa, t, n + 1, min(50.0, 600.0 / k))


def tsfpp_upper_tail(alpha, mu, lam, t, n):
    """Bound on P(N_{alpha,mu}(t) > n); the MGF is finite for e^theta < 1 + mu/lam."""
    if alpha == 1:
        return ppok_upper_tail(1, lam, t, n)

    def kappa(th):
        return mu**alpha - (mu + lam * (1 - math.exp(th))) ** alpha

    return chernoff_upper(kappa, t, n + 1, math.log1p(mu / lam) * (1 - 1e-9))


def _grow(n_start, tail_fn, tol, cap):
    n = max(int(n_start), 16)
    while True:
        b = tail_fn(n)
        if b < tol or n >= cap:
            return n, b
        n = min(2 * n, cap)


# --- one-sided tables -------------------------------------------------------


def _one_sided(spec, t, tol, cap):
    """(probs on 0..n, bound on omitted upper mass, clamped) for one-sided families."""
    fam = spec.family
    if fam in ("ppok", "skellam", "spok"):
        k = 1 if fam == "skellam" else spec.k
        lam = spec.l1
        mean = k * (k + 1) / 2 * lam * t
        sd = math.sqrt(k * (k + 1) * (2 * k + 1) / 6 * lam * t)
        n, b = _grow(mean + 8 * sd + 10, lambda n: ppok_upper_tail(k, lam, t, n), tol, 1 << 20)
        p = poisson_vector(lam * t, n) if k == 1 else ppok_pmf_vector(k, lam, t, n)
        return p, b, 0.0
    if fam == "sfpp":
        alpha, lam = spec.alpha1, spec.l1
        if alpha == 1:
            return _one_sided(ProcessSpec.ppok(1, lam), t, tol, cap)
        n = 64
        while True:
            tail = sfpp_tail_vector(alpha, lam, t, n)
            if tail[-1] < tol or n >= cap:
                break
            n = min(4 * n, cap)
        p, worst = clamp_negative(sfpp_pmf_vector(alpha, lam, t, n), "sfpp table")
        return p, max(float(tail[-1]), 0.0), worst
    if fam == "tsfpp":
        alpha, mu, lam = spec.alpha1, spec.mu1, spec.l1
        if alpha == 1:
            return _one_sided(ProcessSpec.ppok(1, lam), t, tol, cap)
        mean = lam * alpha * mu ** (alpha - 1) * t
        var = mean + lam**2 * alpha * (1 - alpha) * mu ** (alpha - 2) * t
        n, b = _grow(
            mean + 8 * math.sqrt(var) + 10,
            lambda n: tsfpp_upper_tail(alpha, mu, lam, t, n),
            tol,
            1 << 16,
        )
        p, worst = clamp_negative(tsfpp_pmf_vector(alpha, mu, lam, t, n), "tsfpp table")
        return p, b, worst
    raise ValueError(f"{fam} is not one-sided")


def _difference(p1, p2):
    """Law of X1 - X2 for X1 ~ p1 on 0..n1, X2 ~ p2 on 0..n2; index 0 is -n2."""
    work = p1.size * p2.size
    if work > _FFT_WORK:
        from scipy.signal import fftconvolve

        out = fftconvolve(p1, p2[::-1])
        return np.where(out < 0, 0.0, out)
    return np.convolve(p1, p2[::-1])


# --- time-changed SPoK -------------------------------------------------------


def _tcspok(spec, t, tol, variant, cap):
    k, l1, l2 = spec.k, spec.l1, spec.l2
    c = k * (l1 + l2)
    n = 64
    while True:
        w = mixed_poisson_weights(spec.sub, c, t, n)
        rest = 1.0 - math.fsum(w)
        if rest < tol or n >= cap:
            break
        n *= 2
    w, worst = clamp_negative(w, "mixture weights")
    # one-jump law on -k..k (index k is 0)
    if variant == "closed":
        q = np.zeros(3)
        q[2], q[0] = l1 / (l1 + l2), l2 / (l1 + l2)
        step = 1
    else:
        q = np.zeros(2 * k + 1)
        q[k + 1 :] = l1 / c
        q[:k] = l2 / c
        step = k
    # sum_n w_n q^{*n}, all powers centred at zero
    out = np.zeros(2 * step * n + 1)
    centre = step * n
    power = np.ones(1)
    for j in range(n + 1):
        if j:
            power = np.convolve(power, q)
        half = step * j
        out[centre - half : centre + half + 1] += w[j] * power
        if w[j:].sum() < 1e-300:
            break
    bound = max(rest, 0.0) + 1e-15 * (n + 1)
    return out, -centre, bound, worst


# --- entry point --------------------------------------------------------------


def pmf_table(spec, t, tol=1e-12, window=None, variant="conv", n_max_cap=HEAVY_CAP):
    """Tabulate P(X(t) = m) for an integer-valued family.

    The table covers every integer that carries more than round-off mass;
    ``window=(lo, hi)`` restricts it (dropped mass joins the bound).  For
    the stable-subordinated families the tail is polynomial, so the support
    stops at ``n_max_cap`` per component and the bound is the exact tail
    there rather than ``tol``.  ``variant="closed"`` tabulates the SPoK
    closed-form law Skellam(k l1, k l2) (and its subordinated version).
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if variant not in ("conv", "closed"):
        raise ValueError("variant must be 'conv' or 'closed'")
    fam = spec.family
    if not spec.lattice:
        raise ValueError(f"{fam} has a continuous marginal; no probability table")
    worst = 0.0
    if fam == "tcspok":
        probs, lo, bound, worst = _tcspok(spec, t, tol, variant, 1 << 12)
    elif fam == "spok" and variant == "closed":
        if spec.l2 == 0:
            raise ValueError("closed form degenerates at l2 = 0")
        sk = ProcessSpec.skellam(spec.k * spec.l1, spec.k * spec.l2)
        tab = pmf_table(sk, t, tol, window)
        return PmfTable(spec, t, tab.m_lo, tab.m_hi, tab.probs, tab.truncation_bound, "closed")
    elif spec.one_sided:
        probs, bound, worst = _one_sided(spec, t, tol, n_max_cap)
        lo = 0
    else:
        a, b = spec.components()
        p1, b1, w1 = _one_sided(a, t, tol / 2, n_max_cap)
        p2, b2, w2 = _one_sided(b, t, tol / 2, n_max_cap)
        probs = _difference(p1, p2)
        lo, bound, worst = -(p2.size - 1), b1 + b2, max(w1, w2)
    tab = PmfTable(spec, t, lo, lo + probs.size - 1, probs, bound, variant, worst)
    if fam == "skellam" and spec.l2 > 0:
        # Bessel form entry by entry; the convolution only fixes the window
        vals = [skellam_pmf(spec.l1, spec.l2, t, m) for m in tab.support]
        tab = PmfTable(spec, t, tab.m_lo, tab.m_hi, vals, bound, variant)
    tab = tab.trim(0.0)
    if window is not None:
        tab = tab.restrict(*window)
    return tab
