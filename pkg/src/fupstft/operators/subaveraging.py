"""Quadrature check of the Fock-space subaveraging inequality for monomials.

For F(xi) = prod_j xi_j**k_j the ball integral over B_R(z) in C^d is taken
in polar coordinates around each z_j.  Writing u_j = rho_j**2, the volume
element is prod_j (1/2) du_j dtheta_j and the domain is the simplex
sum_j u_j <= R**2.  The circle averages are entire and periodic, so the
trapezoid rule in theta converges geometrically; u is handled by
Gauss-Legendre (nested for d = 2), split where a circle passes through
the origin since |xi|**(p k) is not smooth there for odd p k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..special import lower_tail


@dataclass
class SubaveragingResult:
    status: str  # "pass" | "fail" | "inconclusive"
    lhs: float
    rhs: float
    error: float

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _log_abs_power(xi: np.ndarray, k: int, p: float) -> np.ndarray:
    """log(|xi|**(p k) exp(-(p/2) pi |xi|**2))."""
    r2 = xi.real**2 + xi.imag**2
    with np.errstate(divide="ignore"):
        base = 0.5 * p * k * np.log(r2) if k else np.zeros_like(r2)
    return base - 0.5 * p * math.pi * r2


def _circle_average(zj: complex, k: int, p: float, rho: np.ndarray, m: int) -> np.ndarray:
    """int_0^{2 pi} |F_j|^p weight over the circle |xi - z_j| = rho, for each rho."""
    theta = 2 * math.pi * np.arange(m) / m
    xi = zj + rho[:, None] * np.exp(1j * theta)[None, :]
    return np.exp(_log_abs_power(xi, k, p)).sum(axis=1) * (2 * math.pi / m)


def _split_rule(a: float, b: float, kink: float, n: int):
    """Gauss-Legendre nodes on [a, b], split where the circle passes through 0."""
    g, w = np.polynomial.legendre.leggauss(n)
    cuts = [a] + ([kink] if a < kink < b else []) + [b]
    xs, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        xs.append(0.5 * (hi - lo) * (g + 1) + lo)
        ws.append(0.5 * (hi - lo) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _ball_integral(z, ks, R, p, n_u, m) -> float:
    R2 = R * R
    kinks = [abs(zj) ** 2 for zj in z]
    u1, w1 = _split_rule(0.0, R2, kinks[0], n_u)
    g1 = _circle_average(z[0], ks[0], p, np.sqrt(u1), m)
    if len(z) == 1:
        return float(0.5 * np.sum(w1 * g1))
    total = 0.0
    for a, wa, ga in zip(u1, w1, g1):
        u2, w2 = _split_rule(0.0, R2 - a, kinks[1], n_u)
        g2 = _circle_average(z[1], ks[1], p, np.sqrt(u2), m)
        total += wa * ga * float(np.sum(w2 * g2))
    return 0.25 * total


def check_subaveraging(
    k,
    z,
    R: float,
    p: float = 2.0,
    d: int | None = None,
    budget: float = 1e-6,
    max_angles: int | None = None,
) -> SubaveragingResult:
    """|F(z)|^p e^{-(p/2) pi |z|^2} <= (p/2)^d / P(d, (p/2) pi R^2) int_{B_R(z)} |F|^p e^{-(p/2) pi |xi|^2}.

    The ball integral is refined by doubling nodes and angles until two
    levels agree within ``budget`` relative to the larger side.  If that
    never happens the result is inconclusive; otherwise it passes when the
    inequality holds up to the budget.
    """
    ks = (int(k),) if np.isscalar(k) else tuple(int(v) for v in k)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    d = len(ks) if d is None else d
    if d not in (1, 2) or len(ks) != d or len(zs) != d:
        raise ValueError("d must be 1 or 2 with matching order and point")
    if not R > 0 or p < 1:
        raise ValueError("need R > 0 and p >= 1")
    if max_angles is None:
        max_angles = 8192 if d == 1 else 1024
    lhs = math.exp(sum(float(_log_abs_power(np.array([zz]), kk, p)[0]) for zz, kk in zip(zs, ks)))
    factor = (p / 2) ** d / lower_tail(d, 0.5 * p * math.pi * R * R)
    nodes, angles = 16, 64
    prev = factor * _ball_integral(zs, ks, R, p, nodes, angles)
    err = math.inf
    while angles < max_angles:
        nodes, angles = min(2 * nodes, 128), 2 * angles
        value = factor * _ball_integral(zs, ks, R, p, nodes, angles)
        err = abs(value - prev)
        prev = value
        scale = max(abs(value), lhs, 1e-300)
        if err <= budget * scale:
            status = "pass" if lhs <= value + budget * scale else "fail"
            return SubaveragingResult(status, lhs, value, err)
    return SubaveragingResult("inconclusive", lhs, prev, err)
