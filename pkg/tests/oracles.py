"""Independent reference computations used by the tests.

Each oracle takes a different route from the library code: brute-force
digit enumeration, dense grids, scipy special functions or plain numerical
integration.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy import integrate, special


def digit_intervals(M, alphabet, n, L):
    """All cells L*M**-n [k, k+1] from explicit digit strings, unmerged, as Fractions."""
    cell = Fraction(L) / M**n
    out = []
    for digits in itertools.product(alphabet, repeat=n):
        k = sum(a * M ** (n - 1 - j) for j, a in enumerate(digits))
        out.append((k * cell, (k + 1) * cell))
    return sorted(out)


def digit_measure(M, alphabet, n, L):
    return sum((b - a for a, b in digit_intervals(M, alphabet, n, L)), Fraction(0))


def measure_up_to(intervals, x):
    return sum(max(0, min(b, x) - a) for a, b in intervals)


def sliding_window_rho(arr: np.ndarray, window: float, step: float) -> float:
    """max over a grid of window starts of |S cap [t, t + window]|."""
    lo = arr[0, 0] - window - step
    hi = arr[-1, 1] + step
    starts = lo + step * np.arange(int(math.ceil((hi - lo) / step)) + 1)
    best = 0.0
    for chunk in np.array_split(starts, max(1, len(starts) // 4096)):
        ov = np.clip(np.minimum(arr[None, :, 1], chunk[:, None] + window) - np.maximum(arr[None, :, 0], chunk[:, None]), 0, None)
        best = max(best, float(ov.sum(axis=1).max()))
    return best


def largest_free_ball(arr: np.ndarray, x: float, r: float) -> float:
    """Radius of the largest ball inside [x - r, x + r] missing the closed union."""
    edges = np.concatenate([[-np.inf], arr.ravel(), [np.inf]]).reshape(-1, 2)
    lo = np.maximum(edges[:, 0], x - r)
    hi = np.minimum(edges[:, 1], x + r)
    return float(np.max(np.clip(hi - lo, 0, None))) / 2


def kappa_scipy(d: int, x: float) -> float:
    return x**d / math.factorial(d) / special.gammainc(d, x)


def radial_eigenvalues_scipy(arr_t: np.ndarray, K: int) -> np.ndarray:
    """lambda_k = sum over t-intervals of P(k+1, pi b) - P(k+1, pi a), via scipy."""
    a = math.pi * arr_t[:, 0]
    b = math.pi * arr_t[:, 1]
    return np.array([np.sum(special.gammainc(k + 1, b) - special.gammainc(k + 1, a)) for k in range(K + 1)])


def gauss_inner_quadrature(lam, mu) -> complex:
    """<pi(lam) phi0, pi(mu) phi0> on the line by adaptive quadrature (d = 1)."""
    (x1, w1), (x2, w2) = lam, mu

    def integrand(t, part):
        v = 2**0.5 * np.exp(-math.pi * ((t - x1) ** 2 + (t - x2) ** 2)) * np.exp(2j * math.pi * (w1 - w2) * t)
        return v.real if part == 0 else v.imag

    re = integrate.quad(integrand, -12, 12, args=(0,), limit=400, epsabs=1e-14)[0]
    im = integrate.quad(integrand, -12, 12, args=(1,), limit=400, epsabs=1e-14)[0]
    return complex(re, im)


def stft_hermite_quadrature(k: int, x: float, w: float) -> complex:
    """V_phi0 h_k(x, w) by adaptive quadrature with scipy's Hermite polynomials."""
    norm = (2**0.25) / math.sqrt(2.0**k * math.factorial(k))
    herm = special.eval_hermite

    def h(t):
        u = math.sqrt(2 * math.pi) * t
        return norm * herm(k, u) * np.exp(-math.pi * t * t)

    def part(t, p):
        v = h(t) * 2**0.25 * np.exp(-math.pi * (t - x) ** 2 - 2j * math.pi * w * t)
        return v.real if p == 0 else v.imag

    re = integrate.quad(part, -10, 10, args=(0,), limit=400, epsabs=1e-14)[0]
    im = integrate.quad(part, -10, 10, args=(1,), limit=400, epsabs=1e-14)[0]
    return complex(re, im)
