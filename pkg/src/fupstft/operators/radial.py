"""Spectra of localization operators on radial sets in the time-frequency plane.

For Omega = {z in R^2 : |z|**2 in T} the Hermite functions diagonalize the
localization operator with the Gaussian window, and the k-th eigenvalue is
the Poisson-type integral of s**k e**-s / k! over pi*T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cantor import RadialCantorSpec, build_iterate
from ..special import gammainc_between, gammainc_p

TAIL_TOL = 1e-12


@dataclass
class Spectrum:
    """Eigenvalues in descending order, with the cutoff and a bound on what was dropped."""

    eigenvalues: np.ndarray
    cutoff: int | None = None
    tail_bound: float = 0.0
    indices: np.ndarray | None = None
    error: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        order = np.argsort(-vals, kind="stable")
        self.eigenvalues = vals[order]
        if self.indices is not None:
            self.indices = np.asarray(self.indices)[order]

    @property
    def norm(self) -> float:
        return float(self.eigenvalues[0]) if len(self.eigenvalues) else 0.0

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))

    def to_json(self, limit: int | None = 32) -> dict:
        vals = self.eigenvalues if limit is None else self.eigenvalues[:limit]
        return {
            "norm": self.norm,
            "eigenvalues": [float(v) for v in vals],
            "count": int(len(self.eigenvalues)),
            "cutoff": self.cutoff,
            "tail_bound": float(self.tail_bound),
            "error": float(self.error),
            **self.meta,
        }


def _t_intervals(spec: RadialCantorSpec) -> np.ndarray:
    """The iterate in s = pi |z|**2 units."""
    if spec.d != 1:
        raise NotImplementedError("radial spectra are available for d = 1 only")
    return math.pi * build_iterate(spec.tdomain).as_array()


def choose_cutoff(s_max: float, tol: float = TAIL_TOL) -> int:
    """Smallest K with P(K + 1, s_max) < tol, so every dropped eigenvalue is below tol."""
    K = max(0, int(s_max))
    while gammainc_p(K + 1.0, s_max) >= tol:
        K += max(1, int(math.sqrt(s_max + 1)))
    while K > 0 and gammainc_p(float(K), s_max) < tol:
        K -= 1
    return K


def tail_sum_bound(K: int, s_max: float) -> float:
    """Upper bound on sum_{k > K} P(k + 1, s_max).

    Uses P(a, x) <= x**a e**-x / Gamma(a + 1) / (1 - x/(a + 1)) for
    x < a + 1 and sums the resulting geometric series.
    """
    a = K + 2.0
    if s_max >= a:
        raise ValueError("cutoff too small for a tail estimate")
    first = math.exp(a * math.log(s_max) - s_max - math.lgamma(a + 1)) if s_max > 0 else 0.0
    q = s_max / (a + 1)
    return first / (1 - q) / (1 - q)


def daubechies_radial_spectrum(spec: RadialCantorSpec, K: int | None = None, tol: float = TAIL_TOL) -> Spectrum:
    """lambda_k = sum over intervals [a, b] of P(k + 1, pi b) - P(k + 1, pi a), k = 0..K."""
    arr = _t_intervals(spec)
    s_max = float(arr[-1, 1])
    if K is None:
        K = choose_cutoff(s_max, tol)
    elif gammainc_p(K + 1.0, s_max) >= tol:
        raise ValueError(f"cutoff K={K} leaves eigenvalues above {tol}")
    lams = np.empty(K + 1)
    for k in range(K + 1):
        a = k + 1.0
        lams[k] = math.fsum(gammainc_between(a, lo, hi) for lo, hi in arr)
    lams = np.clip(lams, 0.0, 1.0)
    tail = tail_sum_bound(K, s_max)
    return Spectrum(
        lams,
        cutoff=K,
        tail_bound=tail,
        indices=np.arange(K + 1),
        meta={"t_measure": float(np.sum(arr[:, 1] - arr[:, 0]))},
    )


def radial_spectrum_recurrence(spec: RadialCantorSpec, K: int) -> np.ndarray:
    """Second route: lambda_k = lambda_{k-1} - sum over intervals of the Poisson mass at k."""
    arr = _t_intervals(spec)
    lo, hi = arr[:, 0], arr[:, 1]
    lams = np.empty(K + 1)
    lams[0] = float(np.sum(np.exp(-lo) - np.exp(-hi)))
    log_lo = np.where(lo > 0, np.log(np.where(lo > 0, lo, 1.0)), -np.inf)
    log_hi = np.log(hi)
    for k in range(1, K + 1):
        lg = math.lgamma(k + 1)
        mass_hi = np.exp(k * log_hi - hi - lg)
        mass_lo = np.where(lo > 0, np.exp(k * log_lo - lo - lg), 0.0)
        lams[k] = lams[k - 1] - float(np.sum(mass_hi - mass_lo))
    return lams
