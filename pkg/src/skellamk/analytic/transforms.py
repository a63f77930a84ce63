"""Characteristic exponents, log-MGFs and generating functions."""

from __future__ import annotations

import cmath
import math


from ..subordinators import bernstein

__all__ = [
    "char_exponent",
    "char_function",
    "log_mgf",
    "mgf",
    "pgf",
    "LEVY_FAMILIES",
    "sinc_mean",
]

# families that are Levy processes with atomic Levy measures
LEVY_FAMILIES = ("skellam", "ppok", "spok", "sfpp", "tsfpp", "sfsp", "tsfsp", "tcspok")


def _cpow(z, a):
    """Principal branch z**a with z = 0 handled."""
    return 0j if z == 0 else cmath.exp(a * cmath.log(z))


def sinc_mean(v):
    """(e^{iv} - 1)/(iv): the CF of Uniform(0,1) at v, equal to 1 at v = 0."""
    if v == 0:
        return 1.0 + 0j
    return (cmath.exp(1j * v) - 1) / (1j * v)


def _spok_exponent(k, l1, l2, th):
    js = range(1, k + 1)
    return l1 * sum(1 - cmath.exp(1j * j * th) for j in js) + l2 * sum(
        1 - cmath.exp(-1j * j * th) for j in js
    )


def char_exponent(spec, theta, variant="conv"):
    """psi(theta) with E[exp(i theta X)] = exp(-t psi(theta)) at time t.

    For running averages this is the exponent of the time-t law (which is
    compound Poisson), so the same identity holds with theta unscaled.
    ``variant="closed"`` selects the SPoK closed-form law Skellam(k l1, k l2).
    """
    fam = spec.family
    th = float(theta)
    e = cmath.exp(1j * th)
    if fam == "skellam":
        return spec.l1 * (1 - e) + spec.l2 * (1 - 1 / e)
    if fam == "ppok":
        return _spok_exponent(spec.k, spec.l1, 0.0, th)
    if fam == "spok":
        if variant == "closed":
            return spec.k * (spec.l1 * (1 - e) + spec.l2 * (1 - 1 / e))
        return _spok_exponent(spec.k, spec.l1, spec.l2, th)
    if fam == "sfpp":
        return spec.l1**spec.alpha1 * _cpow(1 - e, spec.alpha1)
    if fam == "tsfpp":
        return _cpow(spec.mu1 + spec.l1 * (1 - e), spec.alpha1) - spec.mu1**spec.alpha1
    if fam == "sfsp":
        return spec.l1**spec.alpha1 * _cpow(1 - e, spec.alpha1) + spec.l2**spec.alpha2 * _cpow(
            1 - 1 / e, spec.alpha2
        )
    if fam == "tsfsp":
        return (
            _cpow(spec.mu1 + spec.l1 * (1 - e), spec.alpha1)
            - spec.mu1**spec.alpha1
            + _cpow(spec.mu2 + spec.l2 * (1 - 1 / e), spec.alpha2)
            - spec.mu2**spec.alpha2
        )
    if fam == "tcspok":
        if variant == "closed":
            inner = spec.k * (spec.l1 * (1 - e) + spec.l2 * (1 - 1 / e))
        else:
            inner = _spok_exponent(spec.k, spec.l1, spec.l2, th)
        return complex(bernstein(spec.sub, complex(inner)))
    if fam in ("ra_ppok", "ra_spok"):
        k = spec.k
        l2 = spec.l2 if fam == "ra_spok" else 0.0
        out = 0j
        for j in range(1, k + 1):
            out += spec.l1 * (1 - sinc_mean(th * j)) + l2 * (1 - sinc_mean(-th * j))
        return out
    raise ValueError(f"no characteristic exponent for {fam}")


def char_function(spec, theta, t, variant="conv"):
    return cmath.exp(-t * char_exponent(spec, theta, variant))


def log_mgf(spec, theta, variant="conv"):
    """Cumulant function kappa(theta) with E[exp(theta X(t))] = exp(t kappa(theta)).

    Returns +inf where the MGF diverges.
    """
    fam = spec.family
    th = float(theta)
    if fam in ("skellam", "ppok", "spok") or (fam == "tcspok"):
        k = 1 if fam == "skellam" else spec.k
        l2 = 0.0 if fam == "ppok" else spec.l2
        if variant == "closed" and fam in ("spok", "tcspok"):
            inner = k * spec.l1 * (math.exp(th) - 1) + k * l2 * (math.exp(-th) - 1)
        else:
            inner = sum(
                spec.l1 * (math.exp(j * th) - 1) + l2 * (math.exp(-j * th) - 1)
                for j in range(1, k + 1)
            )
        if fam != "tcspok":
            return inner
        arg = -inner  # Laplace argument of the subordinator
        if arg <= spec.sub.domain_lower:
            return math.inf
        return -float(bernstein(spec.sub, arg))
    if fam == "tsfpp":
        if spec.alpha1 == 1:
            return spec.l1 * (math.exp(th) - 1)
        base = spec.mu1 + spec.l1 * (1 - math.exp(th))
        if base < 0:
            return math.inf
        return -(base**spec.alpha1 - spec.mu1**spec.alpha1)
    if fam == "sfpp":
        if spec.alpha1 == 1:
            return spec.l1 * (math.exp(th) - 1)
        if th > 0:
            return math.inf
        return -(spec.l1**spec.alpha1) * (1 - math.exp(th)) ** spec.alpha1
    if fam in ("sfsp", "tsfsp"):
        a, b = spec.components()
        return log_mgf(a, th) + log_mgf(b, -th)
    raise ValueError(f"no log-MGF for {fam}")


def mgf(spec, theta, t, variant="conv"):
    """Analytic continuation of E[exp(theta X(t))] using principal branches.

    For real theta outside the convergence region of the true MGF the value
    is complex; only the closed form is meaningful there.
    """
    if spec.family in ("sfsp",):
        z1 = _cpow(1 - cmath.exp(theta), spec.alpha1)
        z2 = _cpow(1 - cmath.exp(-theta), spec.alpha2)
        return cmath.exp(-t * (spec.l1**spec.alpha1 * z1 + spec.l2**spec.alpha2 * z2))
    if spec.family == "tsfsp":
        e = cmath.exp(theta)
        k1 = _cpow(spec.mu1 + spec.l1 * (1 - e), spec.alpha1) - spec.mu1**spec.alpha1
        k2 = _cpow(spec.mu2 + spec.l2 * (1 - 1 / e), spec.alpha2) - spec.mu2**spec.alpha2
        return cmath.exp(-t * (k1 + k2))
    return cmath.exp(t * log_mgf(spec, theta, variant))


def pgf(spec, s, t, variant="conv"):
    """E[s^X(t)] for s > 0 (Laurent sense for two-sided families)."""
    return mgf(spec, math.log(s), t, variant).real
