"""Point probabilities for every integer-valued family.

Scalar functions follow the closed forms one-to-one; the ``*_vector``
helpers compute whole supports at once and are what the tables use.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..specfun import (
    KahanSum,
    NonConvergenceError,
    bessel_i,
    fox_wright_1psi1,
    gen_binomial,
    signed_binomial_table,
)
from ..subordinators import bernstein_taylor

log = logging.getLogger(__name__)

NEG_SLACK = 1e-12


def _check_t(t):
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")


def poisson_pmf(mean, n):
    if n < 0:
        return 0.0
    if mean == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-mean + n * math.log(mean) - math.lgamma(n + 1))


def poisson_vector(mean, n_max):
    n = np.arange(n_max + 1)
    if mean == 0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    from scipy.special import gammaln

    return np.exp(-mean + n * math.log(mean) - gammaln(n + 1))


def clamp_negative(p, where=""):
    """Zero out round-off negatives; anything below -NEG_SLACK is an error.

    Returns (clamped array, largest clamped magnitude).
    """
    worst = float(-p.min()) if p.size and p.min() < 0 else 0.0
    if worst > NEG_SLACK:
        raise ArithmeticError(f"negative probability {-worst:.3e} in {where}")
    if worst > 0:
        log.debug("clamped negative probabilities down to %.2e in %s", -worst, where)
        p = np.where(p < 0, 0.0, p)
    return p, worst


# --- Skellam ---------------------------------------------------------------


def skellam_pmf(l1, l2, t, m, tol=1e-16):
    """P(N1(t) - N2(t) = m) through the modified Bessel function."""
    _check_t(t)
    if l1 <= 0 or l2 < 0:
        raise ValueError("need l1 > 0 and l2 >= 0")
    m = int(m)
    if l2 == 0:
        return poisson_pmf(l1 * t, m)
    x = t * (l1 + l2)
    z = 2 * t * math.sqrt(l1 * l2)
    # fold exp(-x) and the (l1/l2)^(m/2) factor into the series scale
    log_scale = x - 0.5 * m * math.log(l1 / l2)
    return bessel_i(abs(m), z, tol, log_scale=log_scale).value


# --- Poisson process of order k --------------------------------------------


def ppok_pmf_vector(k, lam, t, n_max):
    """p_0..p_{n_max} via p_n = (lam t / n) sum_{j<=min(k,n)} j p_{n-j}."""
    _check_t(t)
    if k * lam * t > 700:
        raise OverflowError("k*lam*t too large: p_0 underflows")
    p = np.zeros(n_max + 1)
    p[0] = math.exp(-k * lam * t)
    lt = lam * t
    js = np.arange(1, k + 1, dtype=float)
    for n in range(1, n_max + 1):
        jj = min(k, n)
        p[n] = lt / n * np.dot(js[:jj], p[n - jj : n][::-1])
    return p


def ppok_pmf(k, lam, t, n):
    if n < 0:
        return 0.0
    return float(ppok_pmf_vector(k, lam, t, int(n))[-1])


def _compositions(k, n):
    """All (x_1..x_k) with x_1 + 2 x_2 + ... + k x_k = n."""
    if k == 1:
        yield (n,)
        return
    for xk in range(n // k + 1):
        for rest in _compositions(k - 1, n - k * xk):
            yield rest + (xk,)


def ppok_pmf_enumerate(k, lam, t, n):
    """Direct sum over Omega(k, n); combinatorial oracle for small k, n."""
    if n > 30 or k > 6:
        raise ValueError("enumeration oracle limited to n <= 30, k <= 6")
    _check_t(t)
    lt = lam * t
    acc = KahanSum()
    for x in _compositions(k, n):
        zeta = sum(x)
        log_term = zeta * math.log(lt) - sum(math.lgamma(xi + 1) for xi in x)
        acc.add(math.exp(log_term))
    return math.exp(-k * lt) * acc.value


# --- Skellam process of order k --------------------------------------------


def spok_pmf_conv(k, l1, l2, t, m, tol=1e-14):
    """Definition-faithful P(N1^k(t) - N2^k(t) = m) by convolution."""
    _check_t(t)
    m = int(m)
    if l2 == 0:
        return ppok_pmf(k, l1, t, m)
    if m < 0:
        return spok_pmf_conv(k, l2, l1, t, -m, tol)
    from .tables import ppok_upper_tail

    n = 16
    while ppok_upper_tail(k, l2, t, n) >= tol:
        n *= 2
    p1 = ppok_pmf_vector(k, l1, t, n + m)
    p2 = ppok_pmf_vector(k, l2, t, n)
    return math.fsum(p1[m:] * p2)


def spok_pmf_closedform(k, l1, l2, t, m):
    """Printed closed form exp(-kt(l1+l2)) (l1/l2)^(m/2) I_|m|(2tk sqrt(l1 l2)).

    This is the law of a Skellam(k l1, k l2) variable and disagrees with
    ``spok_pmf_conv`` for k >= 2.
    """
    if l2 <= 0:
        raise ValueError("closed form degenerates at l2 = 0")
    return skellam_pmf(k * l1, k * l2, t, m)


# --- space-fractional and tempered Poisson ---------------------------------


def _binomial_series(c, alpha, n_max, shift=0.0, r_start=0):
    """sum_{r >= r_start} (-c)^r / r! * (-1)^n C(alpha r + shift, n), n = 0..n_max.

    Rows are added until a whole row is negligible next to the running sum.
    Returns (values, rows used).
    """
    total = np.zeros(n_max + 1)
    comp = np.zeros(n_max + 1)
    r = r_start
    log_c = math.log(c) if c > 0 else -math.inf
    while True:
        w = math.exp(r * log_c - math.lgamma(r + 1)) if c > 0 else float(r == 0)
        w = -w if r % 2 else w
        row = w * signed_binomial_table([alpha * r + shift], n_max)[0]
        t_new = total + row
        big = np.abs(total) >= np.abs(row)
        comp += np.where(big, (total - t_new) + row, (row - t_new) + total)
        total = t_new
        r += 1
        if r > c and np.all(np.abs(row) <= 1e-17 * np.abs(total) + 1e-300):
            break
        if r > 5000:
            raise NonConvergenceError("binomial series", r, float(np.abs(row).max()))
    return total + comp, r


def sfpp_pmf_vector(alpha, lam, t, n_max):
    """P(N_alpha(t) = n), n = 0..n_max, via (-1)^n C(r alpha, n) = (-1)^n
    Gamma(r alpha + 1) / (n! Gamma(r alpha - n + 1))."""
    _check_t(t)
    if alpha == 1:
        return poisson_vector(lam * t, n_max)
    vals, _ = _binomial_series(lam**alpha * t, alpha, n_max)
    return vals


def sfpp_tail_vector(alpha, lam, t, n_max):
    """P(N_alpha(t) > n) for n = 0..n_max as the coefficients of
    (1 - G(u)) / (1 - u) with G(u) = exp(-lam^alpha t (1-u)^alpha)."""
    _check_t(t)
    if alpha == 1:
        return np.maximum(1.0 - np.cumsum(poisson_vector(lam * t, n_max)), 0.0)
    vals, _ = _binomial_series(lam**alpha * t, alpha, n_max, shift=-1.0, r_start=1)
    return -vals


def sfpp_pmf(alpha, lam, t, n, tol=1e-15):
    """((-1)^n / n!) 1psi1[(1, alpha); (1 - n, alpha)](-lam^alpha t)."""
    _check_t(t)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if n < 0:
        return 0.0
    if alpha == 1:
        return poisson_pmf(lam * t, n)
    if n > 100:
        # 1/Gamma(1 - n + r alpha) overflows; same series with the n! folded in
        return float(sfpp_pmf_vector(alpha, lam, t, n)[n])
    fw = fox_wright_1psi1(1.0, alpha, 1.0 - n, alpha, -(lam**alpha) * t, tol)
    sign = -1.0 if n % 2 else 1.0
    return sign * fw.value / math.factorial(n)


def tsfpp_pmf_vector(alpha, mu, lam, t, n_max):
    """TSFPP point probabilities, n = 0..n_max, from the resummed series

    P(n) = e^{t mu^alpha} y^n sum_r (-t (lam+mu)^alpha)^r / r! (-1)^n C(alpha r, n),
    y = lam / (lam + mu).
    """
    _check_t(t)
    if alpha == 1:
        return poisson_vector(lam * t, n_max)
    y = lam / (lam + mu)
    vals, _ = _binomial_series(t * (lam + mu) ** alpha, alpha, n_max)
    n = np.arange(n_max + 1)
    return math.exp(t * mu**alpha) * np.exp(n * math.log(y)) * vals


def tsfpp_pmf(alpha, mu, lam, t, n, tol=1e-15):
    if not 0 < alpha <= 1 or mu <= 0:
        raise ValueError("need 0 < alpha <= 1 and mu > 0")
    if n < 0:
        return 0.0
    if alpha == 1:
        return poisson_pmf(lam * t, n)
    return float(tsfpp_pmf_vector(alpha, mu, lam, t, int(n))[n])


def tsfpp_pmf_double_series(alpha, mu, lam, t, n, tol=1e-14, max_m=100_000):
    """The double series in (m, r) exactly as it is usually printed:

    (-1)^n e^{t mu^alpha} sum_m mu^m sum_r (-t)^r / r! lam^(alpha r - m)
        C(alpha r, m) C(alpha r - m, n).

    The m-sum is a binomial series in mu/lam and only converges for mu < lam.
    """
    _check_t(t)
    if mu >= lam:
        raise NonConvergenceError(
            f"double series diverges for mu >= lam (mu={mu}, lam={lam})", 0, float("inf")
        )
    x = mu / lam
    total = KahanSum()
    # inner r-sum for a fixed m: (-t)^r/r! lam^(alpha r) C(alpha r, m) C(alpha r - m, n)
    c = t * lam**alpha
    last = 0.0
    for m in range(max_m):
        inner = KahanSum()
        r = 0
        while True:
            a = alpha * r
            scale = math.exp(r * math.log(c) - math.lgamma(r + 1)) if r else 1.0
            b = gen_binomial(a, m) * gen_binomial(a - m, n)
            inner.add((-1) ** r * scale * b)
            r += 1
            # C(alpha r, m) vanishes whenever alpha r is a small integer, so
            # stop on the size envelope rather than on a single zero term
            if r > c + 5 and scale * max(abs(b), 1.0) * (r + m + n) ** (m + n + 1) < 1e-18 * max(abs(inner.value), 1e-300):
                break
            if r > 2000:
                raise NonConvergenceError("tsfpp inner series", r, abs(scale * b))
        contrib = x**m * inner.value
        total.add(contrib)
        if m > 5 and abs(contrib) < tol * max(abs(total.value), 1e-300) and abs(last) < tol:
            sign = -1.0 if n % 2 else 1.0
            return sign * math.exp(t * mu**alpha) * total.value
        last = contrib
    raise NonConvergenceError("tsfpp double series", max_m, abs(last))


# --- fractional Skellam differences -----------------------------------------


def sfsp_pmf(alpha1, alpha2, l1, l2, t, m, tol=1e-12):
    from ..processes import ProcessSpec
    from .tables import pmf_table

    return pmf_table(ProcessSpec.sfsp(alpha1, alpha2, l1, l2), t, tol).prob(m)


def tsfsp_pmf(alpha1, mu1, alpha2, mu2, l1, l2, t, m, tol=1e-12):
    from ..processes import ProcessSpec
    from .tables import pmf_table

    return pmf_table(ProcessSpec.tsfsp(alpha1, mu1, alpha2, mu2, l1, l2), t, tol).prob(m)


def sfsp_pmf_series(alpha1, alpha2, l1, l2, t, m, n_terms):
    """Partial sum (n < n_terms) of the nested Fox-Wright product series

    sum_n (-1)^|m| / (n! (n+|m|)!) psi_a(n + |m|) psi_b(n)

    where the larger index sits on the first process for m >= 0 and on the
    second for m < 0.
    """
    z1, z2 = -(l1**alpha1) * t, -(l2**alpha2) * t
    am = abs(m)
    acc = KahanSum()
    for n in range(n_terms):
        if m >= 0:
            f1 = fox_wright_1psi1(1.0, alpha1, 1.0 - n - am, alpha1, z1).value
            f2 = fox_wright_1psi1(1.0, alpha2, 1.0 - n, alpha2, z2).value
        else:
            f1 = fox_wright_1psi1(1.0, alpha1, 1.0 - n, alpha1, z1).value
            f2 = fox_wright_1psi1(1.0, alpha2, 1.0 - n - am, alpha2, z2).value
        sign = -1.0 if am % 2 else 1.0
        acc.add(sign * f1 * f2 / (math.factorial(n) * math.factorial(n + am)))
    return acc.value


# --- time-changed SPoK --------------------------------------------------------


def mixed_poisson_weights(sub, c, t, n_max):
    """P(M = n), n = 0..n_max, for M ~ Poisson(c D(t)) mixed over the subordinator.

    Equals c^n E[exp(-c D(t)) D(t)^n] / n!; computed by the Taylor recursion
    with rescaled coefficients so nothing overflows.
    """
    b = bernstein_taylor(sub, c, max(n_max, 1), scale=c)
    beta = np.arange(1, n_max + 1) * b[1 : n_max + 1]
    w = np.empty(n_max + 1)
    w[0] = math.exp(-t * b[0])
    for n in range(n_max):
        w[n + 1] = t / (n + 1) * np.dot(beta[: n + 1], w[n::-1])
    return w


def _mixture_terms_needed(sub, c, t, tol, start=64):
    n = start
    while True:
        w = mixed_poisson_weights(sub, c, t, n)
        rest = 1.0 - math.fsum(w)
        if rest < tol or n >= 1 << 14:
            return w, max(rest, 0.0)
        n *= 2


def tcspok_pmf(k, l1, l2, sub, t, m, tol=1e-12, printed_exponent=False):
    """P(S^k(D(t)) = m) from the series

    sum_{x >= max(0,-m)} (k l1)^(m+x) (k l2)^x / ((m+x)! x!) E[e^{-k(l1+l2)D} D^(m+2x)]

    i.e. the closed-form SPoK marginal mixed over D(t).  With
    ``printed_exponent=True`` the moment order is taken as 2m + x instead,
    which is how the series is sometimes printed; that variant is not a
    probability distribution and is kept only to demonstrate it.
    """
    _check_t(t)
    if sub.family == "stable":
        from ..subordinators import UnsupportedFamilyError

        raise UnsupportedFamilyError("stable subordinator not allowed")
    m = int(m)
    c = k * (l1 + l2)
    w, rest = _mixture_terms_needed(sub, c, t, tol)
    n_max = w.size - 1
    acc = KahanSum()
    x = max(0, -m)
    while True:
        order = 2 * m + x if printed_exponent else m + 2 * x
        if order > n_max:
            break
        if order >= 0 and w[order] > 0:
            # (k l1)^(m+x) (k l2)^x order! / ((m+x)! x! c^order) * w[order]
            log_coef = (
                (m + x) * math.log(k * l1)
                + x * math.log(k * l2)
                + math.lgamma(order + 1)
                - math.lgamma(m + x + 1)
                - math.lgamma(x + 1)
                - order * math.log(c)
            )
            acc.add(math.exp(log_coef) * w[order])
        x += 1
    return acc.value
