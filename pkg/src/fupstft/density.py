"""Maximal Nyquist densities rho(Omega, r) = sup_z |Omega cap B_r(z)|.

Exact values on the line, constructive upper bounds for products and radial
Cantor sets, a quasi-Monte-Carlo lower bound, and the Cantor-function
subadditivity checks those bounds rest on.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .cantor import (
    CantorSpec,
    GrowthCondition,
    IntervalUnion,
    ProductCantor,
    RadialCantorSpec,
    build_iterate,
    cantor_function,
    check_growth,
    measure_below,
)


@dataclass
class DensityResult:
    value: float
    kind: str  # "exact" | "upperBound" | "monteCarloLowerBound"
    window_radius: float
    argmax: object = None
    uncapped: float | None = None

    def to_json(self) -> dict:
        argmax = self.argmax
        if argmax is not None:
            argmax = np.asarray(argmax, dtype=float).tolist()
        return {
            "value": float(self.value),
            "kind": self.kind,
            "window_radius": float(self.window_radius),
            "argmax": argmax,
            "uncapped": None if self.uncapped is None else float(self.uncapped),
        }


def ball_volume(r: float, dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * r**dim


def _cumulative(arr: np.ndarray, t: np.ndarray) -> np.ndarray:
    """|S cap (-inf, t]| for a sorted disjoint interval array."""
    if len(arr) == 0:
        return np.zeros_like(t)
    lengths = arr[:, 1] - arr[:, 0]
    before = np.concatenate([[0.0], np.cumsum(lengths)])
    i = np.searchsorted(arr[:, 0], t, side="right") - 1
    ic = np.clip(i, 0, None)
    partial = np.clip(np.minimum(t, arr[ic, 1]) - arr[ic, 0], 0.0, None)
    return np.where(i >= 0, before[ic] + partial, 0.0)


def rho_exact_1d(s: IntervalUnion, window_length: float) -> DensityResult:
    """sup_a |S cap [a, a + x]|, attained where a window end meets an endpoint."""
    if not window_length > 0:
        raise ValueError("window length must be positive")
    arr = s.as_array()
    if len(arr) == 0:
        return DensityResult(0.0, "exact", window_length / 2, None)
    ends = arr.ravel()
    starts = np.concatenate([ends, ends - window_length])
    cover = _cumulative(arr, starts + window_length) - _cumulative(arr, starts)
    best = float(np.max(cover))
    # ties up to rounding resolve to the leftmost window
    near = np.flatnonzero(cover >= best - 1e-12 * max(best, 1.0))
    i = int(near[np.argmin(starts[near])])
    return DensityResult(best, "exact", window_length / 2, float(starts[i]))


def rho_product_bound(s: ProductCantor | Sequence[IntervalUnion], r: float) -> DensityResult:
    """Box bound prod_j rho_1d(axis_j, 2r), capped by |Omega| and |B_r|."""
    if not r > 0:
        raise ValueError("window radius must be positive")
    axes = s.axes() if isinstance(s, ProductCantor) else list(s)
    box = math.prod(rho_exact_1d(a, 2 * r).value for a in axes)
    total = math.prod(float(a.measure) for a in axes)
    value = min(box, total, ball_volume(r, len(axes)))
    return DensityResult(value, "upperBound", r, None, uncapped=box)


@functools.lru_cache(maxsize=None)
def surface_quotient_alpha(N: float, d: int) -> float:
    """Smallest alpha with |S_eta cap B_r(a)| / |S_eta| <= alpha (r/|a|)**(2d-1) for |a| >= N r.

    For fixed |a| = s r the widest cap over eta in [|a|-r, |a|+r] has angular
    radius arcsin(1/s); its surface fraction is a 1-D integral of
    sin**(2d-2).
    """
    if N <= 1:
        raise ValueError("cutoff N must exceed 1")
    k = 2 * d - 2
    whole = integrate.quad(lambda t: math.sin(t) ** k, 0.0, math.pi)[0]

    def scaled_fraction(s: float) -> float:
        theta = math.asin(1.0 / s)
        cap = integrate.quad(lambda t: math.sin(t) ** k, 0.0, theta, epsabs=0, epsrel=1e-13)[0]
        return cap / whole * s ** (2 * d - 1)

    grid = np.geomspace(N, N * 1e4, 400)
    return max(scaled_fraction(float(s)) for s in grid)


def rho_radial_bound(spec: RadialCantorSpec, r: float, N: float = 4.0, alpha: float | None = None) -> DensityResult:
    """Upper bound on rho for a radial Cantor iterate.

    Balls near the origin (|a| <= N r') sit inside B_{(N+1) r'}(0); balls
    further out sit in an annulus whose Cantor content is controlled by
    subadditivity of the compressed-alphabet Cantor function and scaled by
    the surface quotient alpha.  Here r' = max(r, 1), which is allowed since
    rho is monotone in r; the result is finally capped by |Omega| and |B_r|.
    """
    if N <= 1:
        raise ValueError("cutoff N must exceed 1")
    if not r > 0:
        raise ValueError("window radius must be positive")
    d = spec.d
    D = 2 * d
    if alpha is None:
        alpha = surface_quotient_alpha(float(N), d)
    unit = math.pi**d / math.factorial(d)
    rr = max(r, 1.0)
    T = spec.tdomain
    near = unit * float(measure_below(T, ((N + 1) * rr) ** D))
    width = (1 + rr) ** D - (1 - rr) ** D
    far_cantor = unit * float(measure_below(T.canonical(), width))
    far = alpha * rr ** (D - 1) * (1 + (N * rr) ** (1 - D)) * far_cantor
    raw = max(near, far)
    value = min(raw, spec.volume, ball_volume(r, D))
    return DensityResult(value, "upperBound", r, None, uncapped=raw)


def rho_monte_carlo(
    membership: Callable[[np.ndarray], np.ndarray],
    r: float,
    search_box: tuple[Sequence[float], Sequence[float]],
    trials: int = 256,
    seed: int = 0,
    samples: int = 4096,
) -> DensityResult:
    """Quasi-Monte-Carlo lower estimate of rho.

    Ball centers come from a scrambled Sobol sequence over ``search_box``
    (plus its midpoint); each ball content is estimated from a shared set of
    Sobol points in the bounding cube of the ball.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    lo = np.asarray(search_box[0], dtype=float)
    hi = np.asarray(search_box[1], dtype=float)
    dim = len(lo)
    centers = qmc.Sobol(dim, scramble=True, seed=seed).random(trials)
    centers = np.vstack([(lo + hi) / 2, lo + centers * (hi - lo)])
    offsets = qmc.Sobol(dim, scramble=True, seed=seed + 1).random(samples)
    offsets = (2 * offsets - 1) * r
    in_ball = np.sum(offsets**2, axis=1) <= r * r
    offsets = offsets[in_ball]
    cube = (2 * r) ** dim
    best, arg = 0.0, None
    for c in centers:
        hits = np.count_nonzero(membership(c + offsets))
        est = cube * hits / samples
        if est > best:
            best, arg = est, c
    return DensityResult(best, "monteCarloLowerBound", r, arg)


def rho_porous_bound(nu: float, r: float, d: int) -> float:
    """(1 - nu**(2d)) |B_r| in R^(2d)."""
    if not 0 < nu < 1:
        raise ValueError("porosity constant must lie in (0, 1)")
    if not r > 0:
        raise ValueError("radius must be positive")
    return (1 - nu ** (2 * d)) * (math.pi * r * r) ** d / math.factorial(d)


@dataclass
class SubadditivityCheck:
    ok: bool
    checked: int
    violation: tuple | None = None  # (x, y, lhs, rhs)

    def __bool__(self):
        return self.ok


def check_weak_subadditivity(
    spec: CantorSpec,
    pairs: Iterable[tuple[float, float]],
    canonical: CantorSpec | None = None,
    tol: float = 1e-12,
) -> SubadditivityCheck:
    """G_A(y) - G_A(x) <= G_canon(y - x) for each pair (x, y in the same units as L)."""
    canon = spec.canonical() if canonical is None else canonical
    count = 0
    for x, y in pairs:
        if x > y:
            raise ValueError(f"pair ({x}, {y}) is not ordered")
        lhs = cantor_function(spec, y) - cantor_function(spec, x)
        rhs = cantor_function(canon, y - x)
        count += 1
        if lhs > rhs + tol:
            return SubadditivityCheck(False, count, (x, y, float(lhs), float(rhs)))
    return SubadditivityCheck(True, count)


def check_scaled_subadditivity(
    spec: CantorSpec,
    cases: Iterable[tuple[float, float]],
    tol: float = 1e-12,
) -> SubadditivityCheck:
    """G(m x) <= (m + 1) G(x) for the canonical alphabet, each case being (m, x) with m > 0.

    Follows from subadditivity by splitting m x into ceil(m) <= m + 1 pieces of length at most x.
    """
    canon = spec.canonical()
    count = 0
    for m, x in cases:
        if not m > 0 or x < 0:
            raise ValueError(f"need m > 0 and x >= 0, got ({m}, {x})")
        lhs = cantor_function(canon, m * x)
        rhs = (m + 1) * cantor_function(canon, x)
        count += 1
        if lhs > rhs + tol:
            return SubadditivityCheck(False, count, (m, x, float(lhs), float(rhs)))
    return SubadditivityCheck(True, count)


@dataclass
class DecayCheck:
    ok: bool
    gamma: float
    ratios: list
    slope: float


def check_density_decay(
    M: int,
    alphabet: Sequence[int],
    ns: Sequence[int],
    length_rule: Callable[[int], float],
    x: float,
    cond: GrowthCondition,
    slope_tol: float = 1e-9,
) -> DecayCheck:
    """|C_n(L(n)) cap [0, x]| / (|A|/M)**(n/2) must stay bounded.

    gamma is the largest observed ratio; the check passes when the
    least-squares slope of log(ratio) against n is not positive.
    """
    growth = check_growth(cond, [(n, length_rule(n)) for n in ns])
    if not growth:
        raise ValueError(f"length rule violates {cond.kind} at n={growth.violation[0]}")
    q = len(alphabet) / M
    ratios = []
    for n in ns:
        spec = CantorSpec(M, tuple(alphabet), n, length_rule(n))
        ratios.append(float(measure_below(spec, x)) / q ** (n / 2))
    gamma = max(ratios)
    positive = [(n, v) for n, v in zip(ns, ratios) if v > 0]
    slope = 0.0
    if len(positive) >= 2:
        nn, vv = zip(*positive)
        slope = float(np.polyfit(np.asarray(nn, float), np.log(vv), 1)[0])
    return DecayCheck(slope <= slope_tol, gamma, ratios, slope)

