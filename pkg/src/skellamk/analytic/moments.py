"""Means, variances, covariances and correlation decay.

Running averages A(t) = (1/t) int_0^t X(u) du of a process with
Cov(X(u), X(v)) = sigma^2 min(u, v) have, for s <= t,

    Cov(A(s), A(t)) = sigma^2 s (3t - s) / (6t),

so Var A(t) = sigma^2 t / 3.  The ``form="printed"`` options return the
commonly quoted closed forms for the running-average covariance and
correlation, which do not agree with this (they are kept for comparison).
"""

from __future__ import annotations

import math

from ..subordinators import UnsupportedFamilyError, subordinator_moments

__all__ = ["moments", "covariance", "correlation", "lrd_limit", "jump_rates"]


def jump_rates(spec, variant="conv"):
    """(drift per unit time, variance per unit time) of the Levy families
    with finite second moments."""
    fam = spec.family
    k, l1, l2 = spec.k, spec.l1, spec.l2
    if fam in ("ppok", "ra_ppok"):
        l2 = 0.0
    if fam == "skellam":
        k = 1
    if fam in ("skellam", "ppok", "spok", "ra_ppok", "ra_spok", "tcspok"):
        if variant == "closed" and fam in ("spok", "tcspok"):
            return k * (l1 - l2), k * (l1 + l2)
        return k * (k + 1) / 2 * (l1 - l2), k * (k + 1) * (2 * k + 1) / 6 * (l1 + l2)
    if fam in ("tsfpp", "tsfsp"):
        def one(a, mu, lam):
            m = lam * a * mu ** (a - 1)
            return m, m + lam**2 * a * (1 - a) * mu ** (a - 2)

        if fam == "tsfpp":
            if spec.alpha1 == 1:
                return l1, l1
            return one(spec.alpha1, spec.mu1, l1)
        m1, v1 = one(spec.alpha1, spec.mu1, l1) if spec.alpha1 < 1 else (l1, l1)
        m2, v2 = one(spec.alpha2, spec.mu2, l2) if spec.alpha2 < 1 else (l2, l2)
        return m1 - m2, v1 + v2
    if fam in ("sfpp", "sfsp"):
        if fam == "sfpp" and spec.alpha1 == 1:
            return l1, l1
        if fam == "sfsp" and spec.alpha1 == 1 and spec.alpha2 == 1:
            return l1 - l2, l1 + l2
        raise UnsupportedFamilyError(f"{fam} has infinite mean (stable time change)")
    raise UnsupportedFamilyError(f"no moment formulas for {fam}")


def moments(spec, t, variant="conv"):
    """(mean, variance) of X(t)."""
    if not t > 0:
        raise ValueError("t must be positive")
    fam = spec.family
    if fam == "tcspok":
        m, v = jump_rates(spec, variant)
        ed, vd = subordinator_moments(spec.sub, t)
        return m * ed, v * ed + m * m * vd
    m, v = jump_rates(spec, variant)
    if fam.startswith("ra_"):
        return m * t / 2, v * t / 3
    return m * t, v * t


def covariance(spec, s, t, form="exact", variant="conv"):
    """Cov(X(s), X(t)); symmetric in (s, t)."""
    if not (s > 0 and t > 0):
        raise ValueError("s and t must be positive")
    s, t = min(s, t), max(s, t)
    fam = spec.family
    if fam.startswith("ra_"):
        m, v = jump_rates(spec)
        if form == "printed":
            k = spec.k
            d = spec.l1 - (spec.l2 if fam == "ra_spok" else 0.0)
            lin = d if fam == "ra_spok" else spec.l1
            return k * (k + 1) * (2 * k + 1) / 18 * lin * s - (k * (k + 1)) ** 2 / 16 * d * d * s * s
        return v * s * (3 * t - s) / (6 * t)
    # independent increments: the covariance is the variance at the earlier time
    return moments(spec, s, variant)[1]


def correlation(spec, s, t, form="exact"):
    """Cor(X(s), X(t)) for 0 < s < t."""
    if not 0 < s < t:
        raise ValueError("need 0 < s < t")
    fam = spec.family
    if fam.startswith("ra_") and form == "printed":
        if fam != "ra_ppok":
            raise ValueError("printed correlation is only stated for the PPoK running average")
        k, lam = spec.k, spec.l1
        return (8 * (2 * k + 1) - 9 * (k + 1) * k * lam * s) * math.sqrt(s / t) / (8 * (2 * k + 1))
    vs = covariance(spec, s, s)
    vt = covariance(spec, t, t)
    return covariance(spec, s, t) / math.sqrt(vs * vt)


def lrd_limit(spec, s, d=0.5, form="printed"):
    """c(s) = lim_{t->oo} t^d Cor(X(s), X(t)).

    Both SPoK and the running averages decay like t^{-1/2}: the limit is 0
    for d < 1/2 and infinite for d > 1/2.  At d = 1/2 SPoK gives sqrt(s);
    the running averages give 1.5 sqrt(s) (``form="exact"``) while
    ``form="printed"`` returns the usual PPoK running-average expression
    (8(2k+1) - 9k(k+1) lam s) sqrt(s) / (8(2k+1)).
    """
    if not s > 0:
        raise ValueError("s must be positive")
    fam = spec.family
    if fam not in ("spok", "skellam", "ppok", "ra_ppok", "ra_spok"):
        raise ValueError(f"no LRD limit for {fam}")
    if d < 0.5:
        return 0.0
    if d > 0.5:
        return math.inf
    if not fam.startswith("ra_"):
        return math.sqrt(s)
    if form == "printed":
        if fam != "ra_ppok":
            raise ValueError("printed c(s) is only stated for the PPoK running average")
        k, lam = spec.k, spec.l1
        return (8 * (2 * k + 1) - 9 * (k + 1) * k * lam * s) * math.sqrt(s) / (8 * (2 * k + 1))
    return 1.5 * math.sqrt(s)
