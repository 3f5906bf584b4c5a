"""Regularized incomplete gamma functions and the subaveraging constant kappa_d."""
from __future__ import annotations

import math

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling_tail(a: float) -> float:
    a2 = a * a
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - 1.0 / (1680 * a2)) / a2) / a2) / a


def _prefactor(a: float, x: float) -> float:
    """exp(-x) * x**a / Gamma(a), without forming the large logs separately."""
    if x <= 0:
        return 0.0
    if a < 30.0:
        return math.exp(-x + a * math.log(x) - math.lgamma(a))
    t = (x - a) / a
    if abs(t) < 0.1:
        # t - log1p(t) = sum_{k>=2} (-t)**k / k
        s, power, k = 0.0, t * t, 2
        while True:
            term = power / k
            s += term
            if abs(term) <= 1e-17 * abs(s):
                break
            power *= -t
            k += 1
        core = -a * s
    elif t < -0.5:
        # log1p(t) loses x entirely once x/a is below the rounding of t
        core = -a * t + a * (math.log(x) - math.log(a))
    else:
        core = -a * (t - math.log1p(t))
    return math.exp(core + 0.5 * math.log(a) - _HALF_LOG_2PI - _stirling_tail(a))


def _series(a: float, x: float) -> float:
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * _prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma series failed for a={a}, x={x}")


def _continued_fraction(a: float, x: float) -> float:
    # modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * _prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma continued fraction failed for a={a}, x={x}")


def gammainc_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x <= 0:
        return 0.0
    if x < a + 1.0:
        return _series(a, x)
    return 1.0 - _continued_fraction(a, x)


def gammainc_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _series(a, x)
    return _continued_fraction(a, x)


def gammainc_between(a: float, lo: float, hi: float) -> float:
    """P(a, hi) - P(a, lo), evaluated on the side that avoids cancellation."""
    if hi <= lo:
        return 0.0
    if lo >= a + 1.0:
        return gammainc_q(a, lo) - gammainc_q(a, hi)
    return gammainc_p(a, hi) - gammainc_p(a, lo)


def lower_tail(d: int, x: float) -> float:
    """1 - exp(-x) * sum_{j<d} x**j / j!, i.e. P(d, x) for integer d."""
    if x <= 0:
        return 0.0
    if x < 1.0:
        # exp(-x) * sum_{j>=d} x**j/j!, termwise
        term = x**d / math.factorial(d)
        total = term
        j = d
        while term > total * _EPS:
            j += 1
            term *= x / j
            total += term
        return math.exp(-x) * total
    return gammainc_p(float(d), x)


def kappa(d: int, x: float) -> float:
    """kappa_d(x) = (x**d / d!) / (1 - exp(-x) * sum_{j<d} x**j/j!).

    Increases from 1 (as x -> 0+) to infinity.
    """
    if int(d) != d or d < 1:
        raise ValueError("d must be a positive integer")
    if not x > 0:
        raise ValueError(f"kappa is defined for x > 0, got {x}")
    if x < 1e-3:
        # ratio form: 1 / (exp(-x) * sum_{k>=0} x**k d!/(d+k)!)
        term = total = 1.0
        k = 0
        while term > _EPS:
            k += 1
            term *= x / (d + k)
            total += term
        return math.exp(x) / total
    return (x**d / math.factorial(d)) / lower_tail(d, x)
