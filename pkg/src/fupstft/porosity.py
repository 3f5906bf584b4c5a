"""Porosity certificates for interval unions and their Cartesian products.

A closed set is nu-porous at scale r when every ball of radius r contains a
ball of radius nu*r meeting the set in measure zero.  On the line the check
is exact per scale: a window [x - r, x + r] holds a free sub-interval of
length s = 2*nu*r iff some complementary gap (p, q) with q - p >= s has
x in [p + s - r, q - s + r].  The set is porous at r iff these intervals
cover the real line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cantor import CantorSpec, IntervalUnion, ProductCantor, build_iterate

GRID_RATIO = 1.05


class InvalidParameterError(ValueError):
    pass


@dataclass
class PorosityWitness:
    nu: float
    alpha_min: float
    alpha_max: float
    status: str  # "verified" | "refuted"
    counterexample: tuple | None = None  # (center, radius)
    scales_checked: list = field(default_factory=list)
    trials: int | None = None
    seed: int | None = None
    method: str = "exact-1d"

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def to_json(self) -> dict:
        cx = None
        if self.counterexample is not None:
            center, radius = self.counterexample
            center = [float(c) for c in np.atleast_1d(center)]
            cx = {"center": center if len(center) > 1 else center[0], "radius": float(radius)}
        return {
            "status": self.status,
            "nu": float(self.nu),
            "alpha_min": float(self.alpha_min),
            "alpha_max": None if math.isinf(self.alpha_max) else float(self.alpha_max),
            "counterexample": cx,
            "scales_checked": len(self.scales_checked),
            "trials": self.trials,
            "seed": self.seed,
            "method": self.method,
        }


def _check_nu(nu):
    if not 0 < nu < 1:
        raise InvalidParameterError(f"porosity constant must lie in (0, 1), got {nu}")


def geometric_grid(lo: float, hi: float, ratio: float = GRID_RATIO) -> np.ndarray:
    if lo <= 0:
        raise InvalidParameterError("scale grid needs a positive lower end")
    if hi <= lo:
        return np.array([float(lo)])
    steps = math.ceil(math.log(hi / lo) / math.log(ratio))
    return np.geomspace(lo, hi, steps + 1)


def _gap_array(arr: np.ndarray) -> np.ndarray:
    """Complementary gaps of a sorted interval array, including the two rays."""
    inner = np.column_stack([arr[:-1, 1], arr[1:, 0]]) if len(arr) > 1 else np.empty((0, 2))
    rays = np.array([[-np.inf, arr[0, 0]], [arr[-1, 1], np.inf]])
    return np.vstack([rays[:1], inner, rays[1:]])


def uncovered_center(arr: np.ndarray, nu: float, r: float, strict: bool = False, tol: float = 1e-12):
    """A window center x whose radius-r window has no free sub-interval of length 2*nu*r.

    Returns None when every center is good.  With ``strict`` only gaps
    strictly longer than 2*nu*r count, which gives the limit from the right
    at a critical scale.
    """
    s = 2.0 * nu * r
    gaps = _gap_array(arr)
    length = gaps[:, 1] - gaps[:, 0]
    slack = tol * max(r, 1.0)
    usable = length > s + slack if strict else length >= s - slack
    gaps = gaps[usable]
    lo = gaps[:, 0] + s - r
    hi = gaps[:, 1] - s + r
    order = np.argsort(lo)
    lo, hi = lo[order], hi[order]
    # the left ray is always usable and yields lo = -inf
    reach = hi[0]
    for a, b in zip(lo[1:], hi[1:]):
        if a > reach + slack:
            return 0.5 * (reach + a)
        reach = max(reach, b)
    if math.isinf(reach):
        return None
    return reach + 1.0


def critical_scales(arr: np.ndarray, nu: float, lo: float, hi: float) -> np.ndarray:
    """Scales where the set of usable gaps changes, plus pairwise-endpoint radii."""
    gaps = _gap_array(arr)[1:-1]
    length = gaps[:, 1] - gaps[:, 0]
    cands = [length / (2.0 * nu)]
    ends = np.unique(arr.ravel())
    if len(ends) <= 600:
        diffs = np.abs(ends[:, None] - ends[None, :])[np.triu_indices(len(ends), 1)]
        cands.append(0.5 * diffs)
    c = np.unique(np.concatenate(cands)) if cands else np.empty(0)
    return c[(c >= lo) & (c <= hi)]


def verify_porosity_1d(s: IntervalUnion, nu: float, alpha_min: float, alpha_max: float) -> PorosityWitness:
    _check_nu(nu)
    if alpha_min > alpha_max:
        raise InvalidParameterError("alpha_min must not exceed alpha_max")
    if math.isinf(alpha_max):
        raise InvalidParameterError("clamp alpha_max to a finite value before checking")
    if not s:
        return PorosityWitness(nu, alpha_min, alpha_max, "verified", scales_checked=[])
    arr = s.as_array()
    lo = max(float(alpha_min), 1e-300)
    grid = geometric_grid(lo, float(alpha_max))
    crit = critical_scales(arr, nu, lo, float(alpha_max))
    scales = np.unique(np.concatenate([grid, crit]))
    checked = []
    for r in scales:
        checked.append(float(r))
        x = uncovered_center(arr, nu, r)
        if x is not None:
            return PorosityWitness(nu, alpha_min, alpha_max, "refuted", (x, float(r)), checked)
    # right-limits at gap thresholds: between thresholds coverage only improves with r
    thresholds = critical_scales(arr, nu, lo, float(alpha_max))
    for r in thresholds:
        if r >= alpha_max:
            continue
        x = uncovered_center(arr, nu, r, strict=True)
        if x is not None:
            r_plus = min(float(alpha_max), r * (1 + 1e-9))
            if uncovered_center(arr, nu, r_plus) is not None:
                return PorosityWitness(nu, alpha_min, alpha_max, "refuted", (x, r_plus), checked)
    return PorosityWitness(nu, alpha_min, alpha_max, "verified", scales_checked=checked)


def cantor_porosity_constants(spec: CantorSpec) -> tuple[float, float]:
    """(nu, alpha_min) = (M**-2, L*M**(1-n)) for an iterate with |A| < M."""
    return 1.0 / spec.M**2, float(spec.L) * float(spec.M) ** (1 - spec.n)


def certify_cantor_porosity(spec: CantorSpec, cross_check: bool = True) -> PorosityWitness:
    """Certificate for an iterate; optionally cross-checked by the exact sweep.

    Above L*M the set fits in a tenth of any window, so the cross-check stops
    there.
    """
    nu, a_min = cantor_porosity_constants(spec)
    witness = PorosityWitness(nu, a_min, math.inf, "verified", method="certificate")
    if cross_check:
        a_top = float(spec.L) * spec.M
        check = verify_porosity_1d(build_iterate(spec), nu, a_min, max(a_top, a_min))
        witness.scales_checked = check.scales_checked
        if not check.verified:
            witness.status = "refuted"
            witness.counterexample = check.counterexample
    return witness


def thicken_1d(s: IntervalUnion, r) -> IntervalUnion:
    if r < 0:
        raise InvalidParameterError("thickening radius must be non-negative")
    return IntervalUnion(tuple((a - r, b + r) for a, b in s.intervals))


def thickened_porosity(nu: float, r: float, R: float, alpha_max: float) -> tuple[float, tuple[float, float]]:
    """Porosity constant and scale range after an r-thickening.

    The thickened set is (nu - r/R)-porous on scales R to alpha_max.
    """
    _check_nu(nu)
    if not 0 <= r < nu * alpha_max:
        raise InvalidParameterError(f"need 0 <= r < nu*alpha_max, got r={r}")
    if not r / nu < R:
        raise InvalidParameterError(f"need r/nu < R, got r/nu={r / nu} and R={R}")
    if R > alpha_max:
        raise InvalidParameterError("R must not exceed alpha_max")
    return nu - r / R, (R, alpha_max)


def _max_free_gap(arr: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Longest stretch of [lo_i, hi_i] outside the sorted closed intervals ``arr``."""
    gaps = _gap_array(arr)
    a = np.maximum(gaps[None, :, 0], lo[:, None])
    b = np.minimum(gaps[None, :, 1], hi[:, None])
    return np.max(np.clip(b - a, 0.0, None), axis=1)


def _product_distance(axes: Sequence[IntervalUnion], points: np.ndarray) -> np.ndarray:
    sq = np.zeros(points.shape[0])
    for k, axis in enumerate(axes):
        sq += axis.distance_array(points[:, k]) ** 2
    return np.sqrt(sq)


def _grid_refute(axes, center, r, nu, resolution: int) -> bool:
    """Certify that no ball of radius nu*r inside B_r(center) avoids the set.

    Distance to the product set is 1-Lipschitz, so a grid maximum plus the
    grid covering radius bounds the true maximum over the admissible centers.
    """
    dim = len(axes)
    inner = (1 - nu) * r
    ticks = np.linspace(-inner, inner, resolution)
    mesh = np.stack(np.meshgrid(*([ticks] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    mesh = mesh[np.linalg.norm(mesh, axis=1) <= inner + 1e-15]
    step = ticks[1] - ticks[0] if resolution > 1 else 0.0
    cover = 0.5 * step * math.sqrt(dim)
    best = float(np.max(_product_distance(axes, center[None, :] + mesh))) if len(mesh) else 0.0
    return best + cover < nu * r


def sample_porosity_product(
    s: ProductCantor | Sequence[IntervalUnion],
    nu: float,
    alpha_min: float,
    alpha_max: float,
    trials: int = 1000,
    seed: int = 0,
    resolution: int = 41,
) -> PorosityWitness:
    """Monte-Carlo porosity check for products of interval unions.

    A free gap along one axis yields an empty slab, and a ball of radius
    half the clipped gap fits inside the window along that axis.  Windows
    where no axis works are refuted only after a Lipschitz-certified grid
    search; otherwise they are counted as inconclusive and skipped.
    """
    _check_nu(nu)
    if trials < 1:
        raise InvalidParameterError("need at least one trial")
    axes = s.axes() if isinstance(s, ProductCantor) else list(s)
    arrays = [a.as_array() for a in axes]
    dim = len(axes)
    rng = np.random.default_rng(seed)
    if alpha_max > alpha_min:
        radii = np.exp(rng.uniform(math.log(alpha_min), math.log(alpha_max), trials))
    else:
        radii = np.full(trials, float(alpha_min))
    lows = np.array([arr[0, 0] if len(arr) else 0.0 for arr in arrays])
    highs = np.array([arr[-1, 1] if len(arr) else 0.0 for arr in arrays])
    u = rng.uniform(size=(trials, dim))
    centers = lows - radii[:, None] + u * (highs - lows + 2 * radii[:, None])
    witness = PorosityWitness(nu, alpha_min, alpha_max, "verified", trials=trials, seed=seed, method="monte-carlo")
    best = np.zeros(trials)
    for k, arr in enumerate(arrays):
        if len(arr) == 0:
            best[:] = np.inf
            break
        best = np.maximum(best, 0.5 * _max_free_gap(arr, centers[:, k] - radii, centers[:, k] + radii))
    failing = np.nonzero(best < nu * radii * (1 - 1e-12))[0]
    witness.scales_checked = sorted(set(radii.tolist()))
    inconclusive = 0
    for i in failing:
        if _grid_refute(axes, centers[i], radii[i], nu, resolution):
            witness.status = "refuted"
            witness.counterexample = (centers[i].copy(), float(radii[i]))
            return witness
        inconclusive += 1
    witness.method = f"monte-carlo ({inconclusive} inconclusive)" if inconclusive else "monte-carlo"
    return witness
