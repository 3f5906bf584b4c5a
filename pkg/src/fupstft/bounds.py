"""Explicit constants of the Fock-space uncertainty bounds.

The single-step density bound, the porous step factor, the thickening
schedule that turns a porous family into a power law in h, and bound tables
for Cantor families under their growth conditions.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .cantor import (
    CantorSpec,
    GrowthCondition,
    ProductCantor,
    RadialCantorSpec,
    check_growth,
    square_product,
)
from .density import rho_product_bound, rho_radial_bound
from .special import kappa, lower_tail

__all__ = [
    "kappa",
    "local_density_bound",
    "best_local_density_bound",
    "porous_step_factor",
    "ThickeningSchedule",
    "build_schedule",
    "RadialFamily",
    "ProductFamily",
    "BoundRow",
    "cantor_fup_table",
    "check_improvement",
]


def local_density_bound(rho: float, R: float, d: int, p: float = 2.0, optimized: bool = False) -> float:
    """Bound on ||F chi_Omega||_p^p / ||F||_p^p from a Nyquist density rho(Omega, R).

    The default form is (p/2)**d rho / P(d, (p/2) pi R**2).  ``optimized``
    gives the p-independent form 2**-d rho / P(d, pi R**2 / 2), which is only
    guaranteed for p = 1 (see the tests for a p = 2 counterexample).
    """
    if rho < 0 or not R > 0:
        raise ValueError("need rho >= 0 and R > 0")
    if p < 1:
        raise ValueError("p must be at least 1")
    if rho == 0:
        return 0.0
    q = 0.5 if optimized else p / 2.0
    return q**d * rho / lower_tail(d, q * math.pi * R * R)


def best_local_density_bound(
    rho_of_R: Callable[[float], float],
    radii: Iterable[float],
    d: int,
    p: float = 2.0,
    optimized: bool = False,
) -> tuple[float, float]:
    """(min bound, argmin R) of ``local_density_bound`` over a grid of radii."""
    best, arg = math.inf, None
    for R in radii:
        value = local_density_bound(rho_of_R(R), R, d, p, optimized)
        if value < best:
            best, arg = value, float(R)
    if arg is None:
        raise ValueError("empty radius grid")
    return best, arg


def porous_step_factor(nu: float, R: float, d: int, p: float = 2.0) -> float:
    """kappa_d((p/2) pi R**2) (1 - nu**(2d))."""
    if not 0 < nu < 1:
        raise ValueError("porosity constant must lie in (0, 1)")
    if not R > 0:
        raise ValueError("radius must be positive")
    return kappa(d, p / 2 * math.pi * R * R) * (1 - nu ** (2 * d))


@dataclass
class ThickeningSchedule:
    nu: float
    h: float
    d: int
    p: float
    c: float
    radii: list
    porosities: list
    n: int
    n0: int
    r_root: float
    r0: float
    eps: float
    step_factors: list
    product_bound: float
    beta: float
    C: float
    below_threshold: bool
    r0_fraction: float = 0.9

    @property
    def asymptotic_bound(self) -> float:
        return self.C * self.h**self.beta

    def to_json(self) -> dict:
        out = asdict(self)
        out["asymptotic_bound"] = self.asymptotic_bound
        return out


def _bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def critical_radius(nu: float, d: int, p: float = 2.0) -> float:
    """The r solving kappa_d((p/2) pi r**2) (1 - (nu/2)**(2d)) = 1."""
    keep = 1 - (nu / 2) ** (2 * d)
    f = lambda r: kappa(d, p / 2 * math.pi * r * r) * keep - 1.0
    hi = 1.0
    while f(hi) <= 0:
        hi *= 2
    return _bisect(f, 1e-12, hi)


def build_schedule(nu: float, h: float, d: int = 1, p: float = 2.0, r0_fraction: float = 0.9) -> ThickeningSchedule:
    """Radii R_j = c (3/nu)**j with R_1 = h, the thickened porosities and step factors.

    Steps with R_j <= r0 contract by at least 1 - eps; the first n - n0 of
    them give ``product_bound``.  When no step is available the schedule is
    flagged ``below_threshold`` and the product is the trivial 1.
    """
    if not 0 < nu < 1:
        raise ValueError("porosity constant must lie in (0, 1)")
    if not 0 < h <= 1:
        raise ValueError("h must lie in (0, 1]")
    if not 0 < r0_fraction < 1:
        raise ValueError("r0 fraction must lie in (0, 1)")
    if p < 1 or int(d) != d or d < 1:
        raise ValueError("need p >= 1 and a positive integer d")
    growth = 3.0 / nu
    c = h / growth
    n = 0
    while c * growth ** (n + 1) <= 1.0 * (1 + 1e-14):
        n += 1
    radii = [c * growth**j for j in range(1, n + 1)]
    porosities, partial = [], 0.0
    for j in range(n):
        porosities.append(nu - partial / radii[j])
        partial += radii[j]
    steps = [porous_step_factor(porosities[j], radii[j], d, p) for j in range(n)]

    r_root = critical_radius(nu, d, p)
    r0 = r0_fraction * r_root
    n0 = 0
    if n:
        while radii[-1] * (nu / 3) ** n0 > r0:
            n0 += 1
    else:
        n0 = 0
    one_minus_eps = kappa(d, p / 2 * math.pi * r0 * r0) * (1 - (nu / 2) ** (2 * d))
    eps = 1 - one_minus_eps
    beta = -math.log(one_minus_eps) / math.log(growth)
    C = one_minus_eps ** (-(n0 + 1))
    below = n - n0 <= 0
    product = math.prod(steps[: n - n0]) if not below else 1.0
    sched = ThickeningSchedule(
        nu, h, d, p, c, radii, porosities, n, n0, r_root, r0, eps, steps, product, beta, C, below, r0_fraction
    )
    if not below and product > sched.asymptotic_bound * (1 + 1e-12):
        raise ArithmeticError("product bound exceeds C h**beta; schedule invariants broken")
    return sched


@dataclass(frozen=True)
class RadialFamily:
    """Radial iterates in R^(2d) with radius R(n)."""

    d: int
    M: int
    alphabet: tuple
    radius_rule: Callable[[int], float]

    kind = "D_M"

    def spec(self, n: int) -> RadialCantorSpec:
        return RadialCantorSpec(self.d, self.radius_rule(n), self.M, self.alphabet, n)

    def growth_samples(self, ns):
        return [(n, self.radius_rule(n) ** (2 * self.d)) for n in ns]

    def rho(self, n: int, r: float) -> float:
        return rho_radial_bound(self.spec(n), r).value

    def asymptote(self, n: int) -> float:
        return (len(self.alphabet) / self.M) ** (n / 2)

    def scale(self, n: int) -> float:
        return self.radius_rule(n) ** (2 * self.d) * float(self.M) ** (-n)


@dataclass(frozen=True)
class ProductFamily:
    """C_n(L(n), M, A)**(2d)."""

    d: int
    M: int
    alphabet: tuple
    length_rule: Callable[[int], float]

    kind = "I_M"

    def spec(self, n: int) -> ProductCantor:
        return square_product(CantorSpec(self.M, self.alphabet, n, self.length_rule(n)), 2 * self.d)

    def growth_samples(self, ns):
        return [(n, self.length_rule(n)) for n in ns]

    def rho(self, n: int, r: float) -> float:
        return rho_product_bound(self.spec(n), r).value

    def asymptote(self, n: int) -> float:
        return (len(self.alphabet) / self.M) ** (n * self.d)

    def scale(self, n: int) -> float:
        return self.length_rule(n) * float(self.M) ** (-n)


@dataclass
class BoundRow:
    n: int
    h: float
    rho: float
    prefactor: float
    bound: float
    asymptote: float
    R: float
    measured_norm: float | None = None
    passed: bool | None = None

    def to_json(self) -> dict:
        return asdict(self)


def cantor_fup_table(
    family: RadialFamily | ProductFamily,
    cond: GrowthCondition,
    radii: float | Sequence[float],
    ns: Sequence[int],
    p: float = 2.0,
    optimized: bool = True,
) -> tuple[list[BoundRow], float]:
    """Per-n density bounds for a Cantor family and the constant gamma.

    Each row minimizes the local density bound over ``radii``; gamma is the
    largest bound(n) / asymptote(n).
    """
    if cond.kind != family.kind:
        raise ValueError(f"family needs condition ({family.kind}), got ({cond.kind})")
    growth = check_growth(cond, family.growth_samples(ns))
    if not growth:
        raise ValueError(f"growth condition ({cond.kind}) violated at n={growth.violation[0]}")
    grid = [float(radii)] if np.isscalar(radii) else [float(r) for r in radii]
    rows = []
    for n in ns:
        best = None
        for R in grid:
            rho = family.rho(n, R)
            value = local_density_bound(rho, R, family.d, p, optimized)
            if best is None or value < best[2]:
                best = (rho, R, value)
        rho, R, value = best
        rows.append(BoundRow(n, family.scale(n), rho, value / rho if rho else 0.0, value, family.asymptote(n), R))
    gamma = max(r.bound / r.asymptote for r in rows)
    return rows, gamma


@dataclass
class ImprovementCheck:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_improvement(radii: Iterable[float]) -> ImprovementCheck:
    """0.5 / (1 - exp(-pi R**2 / 2)) <= 1 / (1 - exp(-pi R**2)) at every R."""
    bad = []
    for R in radii:
        if not R > 0:
            raise ValueError("radii must be positive")
        x = math.pi * R * R
        left = 0.5 / -math.expm1(-x / 2)
        right = 1.0 / -math.expm1(-x)
        if left > right:
            bad.append((float(R), left, right))
    return ImprovementCheck(not bad, bad)
