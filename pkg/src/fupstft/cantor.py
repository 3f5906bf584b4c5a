"""Cantor iterates on the line, their products and radial versions.

An iterate with base ``M``, alphabet ``A`` and ``n`` digits, scaled into
``[0, L]``, is the union of the intervals ``L*M**-n * (k + [0, 1])`` where
``k`` runs over all integers whose base-``M`` digits (``n`` of them) lie in
``A``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

#: Above this many digits endpoints are produced as floats even for rational L.
EXACT_CAP = 16

# Largest M**n we are willing to materialise as a machine integer.
_MAX_INDEX = 2**62


class InvalidSpecError(ValueError):
    pass


def _is_rational(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


@dataclass(frozen=True)
class CantorSpec:
    M: int
    alphabet: tuple[int, ...]
    n: int
    L: float | Fraction | int = 1

    def __post_init__(self):
        alphabet = tuple(sorted(set(int(a) for a in self.alphabet)))
        object.__setattr__(self, "alphabet", alphabet)
        if int(self.M) != self.M or self.M < 2:
            raise InvalidSpecError(f"base must be an integer > 1, got {self.M!r}")
        if not alphabet:
            raise InvalidSpecError("alphabet is empty")
        if alphabet[0] < 0 or alphabet[-1] > self.M - 1:
            raise InvalidSpecError(f"digits must lie in [0, {self.M - 1}]")
        if len(alphabet) == self.M:
            raise InvalidSpecError("alphabet must be a proper subset of the digits")
        if int(self.n) != self.n or self.n < 0:
            raise InvalidSpecError(f"iterate must be a non-negative integer, got {self.n!r}")
        if not self.L > 0:
            raise InvalidSpecError(f"length must be positive, got {self.L!r}")

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.alphabet), self.M)

    @property
    def exact(self) -> bool:
        return _is_rational(self.L) and self.n <= EXACT_CAP

    @property
    def measure(self):
        """(|A|/M)**n * L, exact when L is rational."""
        if _is_rational(self.L):
            return self.ratio**self.n * Fraction(self.L)
        return float(self.ratio) ** self.n * float(self.L)

    @property
    def cell(self):
        """Length L*M**-n of the constituent intervals."""
        if _is_rational(self.L):
            return Fraction(self.L) / self.M**self.n
        return float(self.L) / float(self.M) ** self.n

    def with_(self, **changes) -> "CantorSpec":
        values = dict(M=self.M, alphabet=self.alphabet, n=self.n, L=self.L)
        values.update(changes)
        return CantorSpec(**values)

    def canonical(self) -> "CantorSpec":
        """Same spec with the compressed alphabet {0, ..., |A|-1}."""
        return self.with_(alphabet=tuple(range(len(self.alphabet))))

    def to_json(self) -> dict:
        L = self.L
        if isinstance(L, Fraction):
            L = float(L) if L.denominator != 1 else int(L)
        return {"M": self.M, "alphabet": list(self.alphabet), "n": self.n, "L": L}

    @classmethod
    def from_json(cls, data: dict) -> "CantorSpec":
        L = data.get("L", 1)
        if isinstance(L, str):
            L = Fraction(L)
        return cls(M=int(data["M"]), alphabet=tuple(data["alphabet"]), n=int(data["n"]), L=L)


class IntervalUnion:
    """Finite union of disjoint closed intervals, kept sorted and merged.

    Iterates are stored as runs of integer cell indices times a common cell
    length; endpoints are materialized only when asked for.
    """

    __slots__ = ("_intervals", "_grid")

    def __init__(self, intervals: Iterable[Sequence] = ()):
        self._intervals = _normalise(intervals)
        self._grid = None

    @classmethod
    def _on_grid(cls, starts: np.ndarray, ends: np.ndarray, cell) -> "IntervalUnion":
        """Merged, sorted integer runs [starts, ends); ``cell`` is a Fraction or (L, M**n) floats."""
        obj = cls.__new__(cls)
        obj._intervals = None
        obj._grid = (starts, ends, cell)
        return obj

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence]) -> "IntervalUnion":
        return cls(tuple((a, b) for a, b in pairs))

    @property
    def intervals(self) -> tuple:
        if self._intervals is None:
            starts, ends, cell = self._grid
            if isinstance(cell, Fraction):
                self._intervals = tuple((int(a) * cell, int(b) * cell) for a, b in zip(starts, ends))
            else:
                arr = self.as_array()
                self._intervals = tuple((float(a), float(b)) for a, b in arr)
        return self._intervals

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        return f"IntervalUnion({self.intervals!r})"

    def __len__(self):
        return len(self._intervals) if self._grid is None else len(self._grid[0])

    def __iter__(self):
        return iter(self.intervals)

    def __bool__(self):
        return len(self) > 0

    @property
    def measure(self):
        if self._grid is not None:
            starts, ends, cell = self._grid
            count = int(np.sum(ends - starts))
            if isinstance(cell, Fraction):
                return count * cell
            L, scale = cell
            return count * L / scale
        return sum((b - a for a, b in self._intervals), 0)

    @property
    def span(self) -> tuple:
        if not self.intervals:
            raise ValueError("empty interval union has no span")
        return self.intervals[0][0], self.intervals[-1][1]

    def as_array(self) -> np.ndarray:
        if self._grid is not None:
            starts, ends, cell = self._grid
            ks = np.stack([starts, ends], axis=1)
            if isinstance(cell, Fraction):
                num, den = cell.numerator, cell.denominator
                if len(ks) and int(ks.max()) * num >= 2**53:
                    return np.array([[float(a), float(b)] for a, b in self.intervals], dtype=float).reshape(-1, 2)
                # k * num is exact, so one division gives the correctly rounded endpoint
                return ks.astype(float) * num / den
            L, scale = cell
            return ks.astype(float) * L / scale
        return np.array([[float(a), float(b)] for a, b in self._intervals], dtype=float).reshape(-1, 2)

    def contains(self, x) -> bool:
        starts = [a for a, _ in self.intervals]
        i = bisect.bisect_right(starts, x) - 1
        return i >= 0 and x <= self.intervals[i][1]

    def contains_array(self, x: np.ndarray) -> np.ndarray:
        arr = self.as_array()
        x = np.asarray(x, dtype=float)
        if arr.size == 0:
            return np.zeros(x.shape, dtype=bool)
        i = np.searchsorted(arr[:, 0], x, side="right") - 1
        ok = i >= 0
        ic = np.clip(i, 0, None)
        return ok & (x <= arr[ic, 1])

    def distance_array(self, x: np.ndarray) -> np.ndarray:
        """Euclidean distance from each x to the union (0 inside)."""
        arr = self.as_array()
        x = np.asarray(x, dtype=float)
        if arr.size == 0:
            return np.full(x.shape, np.inf)
        i = np.searchsorted(arr[:, 0], x, side="right") - 1
        left = np.clip(i, 0, len(arr) - 1)
        right = np.clip(i + 1, 0, len(arr) - 1)
        d_left = np.where(i >= 0, np.maximum(x - arr[left, 1], 0.0), np.inf)
        d_right = np.where(i + 1 < len(arr), np.maximum(arr[right, 0] - x, 0.0), np.inf)
        return np.minimum(d_left, d_right)

    def intersect(self, lo, hi) -> "IntervalUnion":
        out = []
        for a, b in self.intervals:
            a2, b2 = max(a, lo), min(b, hi)
            if a2 < b2:
                out.append((a2, b2))
        return IntervalUnion(tuple(out))

    def measure_in(self, lo, hi):
        """Lebesgue measure of the union inside [lo, hi]."""
        return sum((min(b, hi) - max(a, lo) for a, b in self.intervals if min(b, hi) > max(a, lo)), 0)

    def shift(self, t) -> "IntervalUnion":
        return IntervalUnion(tuple((a + t, b + t) for a, b in self.intervals))

    def scale(self, s) -> "IntervalUnion":
        return IntervalUnion(tuple((a * s, b * s) for a, b in self.intervals))

    def issubset(self, other: "IntervalUnion", tol: float = 0.0) -> bool:
        starts = [a for a, _ in other.intervals]
        for a, b in self.intervals:
            # adding a float 0.0 would round exact endpoints
            lo, hi = (a + tol, b - tol) if tol else (a, b)
            i = bisect.bisect_right(starts, lo) - 1
            if i < 0 or other.intervals[i][1] < hi:
                return False
        return True

    def gaps(self) -> list[tuple]:
        """Bounded complementary gaps (b_i, a_{i+1})."""
        return [(self.intervals[i][1], self.intervals[i + 1][0]) for i in range(len(self.intervals) - 1)]

    def to_json(self) -> list:
        return [[_json_number(a), _json_number(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalUnion":
        return cls.from_pairs(data)


def _json_number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def _normalise(pairs) -> tuple:
    cleaned = []
    for a, b in pairs:
        if b < a:
            raise ValueError(f"interval [{a}, {b}] has negative length")
        if a < b:
            cleaned.append((a, b))
    cleaned.sort()
    merged: list[list] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1][1] = b
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


def _discrete_array(spec: CantorSpec) -> np.ndarray:
    if spec.M**spec.n > _MAX_INDEX:
        raise OverflowError(f"M**n = {spec.M}**{spec.n} does not fit the index range")
    values = np.zeros(1, dtype=np.int64)
    digits = np.asarray(spec.alphabet, dtype=np.int64)
    for j in range(spec.n):
        values = (values[None, :] + digits[:, None] * spec.M**j).ravel()
    return np.sort(values)


def discrete_iterate(spec: CantorSpec) -> list[int]:
    """Sorted integers sum_j a_j M**j with every digit a_j in the alphabet."""
    return [int(v) for v in _discrete_array(spec)]


def build_iterate(spec: CantorSpec) -> IntervalUnion:
    """Union of L M**-n [k, k+1] over the discrete iterate, with touching cells merged."""
    ks = _discrete_array(spec)
    new_run = np.concatenate([[True], np.diff(ks) > 1])
    starts = ks[new_run]
    last = np.concatenate([new_run[1:], [True]])
    ends = ks[last] + 1
    if spec.exact:
        cell = Fraction(spec.L) / spec.M**spec.n
    else:
        cell = (float(spec.L), float(spec.M) ** spec.n)
    return IntervalUnion._on_grid(starts, ends, cell)


def cantor_function(spec: CantorSpec, x):
    """Normalised cumulative measure |C_n cap [0, x]| / |C_n| of the iterate.

    Digit-greedy in O(n); exact for rational ``x`` and ``L``.
    """
    if x <= 0:
        return 0
    if x >= spec.L:
        return 1
    if _is_rational(x) and _is_rational(spec.L):
        t = Fraction(x) / Fraction(spec.L)
        k = len(spec.alphabet)
        weight = Fraction(1)
    else:
        t = float(x) / float(spec.L)
        k = len(spec.alphabet)
        weight = 1.0
    digits = spec.alphabet
    g = 0 * weight
    for _ in range(spec.n):
        t = t * spec.M
        d = math.floor(t)
        below = bisect.bisect_left(digits, d)
        g += weight * below / k
        if below < k and digits[below] == d:
            weight = weight / k
            t = t - d
        else:
            return g
    return g + weight * t


def measure_below(spec: CantorSpec, x):
    """|C_n(L, M, A) cap [0, x]|."""
    return cantor_function(spec, x) * spec.measure


@dataclass(frozen=True)
class ProductCantor:
    factors: tuple[CantorSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidSpecError("product needs at least one factor")

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def measure(self):
        return math.prod((f.measure for f in self.factors), start=1)

    def axes(self) -> list[IntervalUnion]:
        return [build_iterate(f) for f in self.factors]

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        inside = np.ones(points.shape[0], dtype=bool)
        for k, axis in enumerate(self.axes()):
            inside &= axis.contains_array(points[:, k])
        return inside

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}


def square_product(spec: CantorSpec, dim: int = 2) -> ProductCantor:
    return ProductCantor(tuple(spec for _ in range(dim)))


@dataclass(frozen=True)
class RadialCantorSpec:
    """Points x in R^(2d) with (|x|^2)^d inside C_n(R^(2d), M, A)."""

    d: int
    R: float
    M: int
    alphabet: tuple[int, ...]
    n: int
    tdomain: CantorSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InvalidSpecError("half-dimension d must be an integer >= 1")
        if not self.R > 0:
            raise InvalidSpecError("radius must be positive")
        object.__setattr__(self, "alphabet", tuple(sorted(set(self.alphabet))))
        length = self.R ** (2 * self.d)
        object.__setattr__(self, "tdomain", CantorSpec(self.M, self.alphabet, self.n, length))

    @property
    def volume(self) -> float:
        unit = math.pi**self.d / math.factorial(self.d)
        return float(self.tdomain.measure) * unit

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        t = np.sum(points**2, axis=1) ** self.d
        return radial_slice(self).contains_array(t)


def radial_slice(spec: RadialCantorSpec) -> IntervalUnion:
    """t-domain iterate C_n(R^(2d), M, A) defining the radial set."""
    return build_iterate(spec.tdomain)


def radial_volume(spec: RadialCantorSpec) -> float:
    return spec.volume


@dataclass(frozen=True)
class GrowthCondition:
    """c1 * M**(n/2) <= value(n) <= c2 * M**(n/2).

    For kind ``"I_M"`` the value is the length L(n); for ``"D_M"`` it is
    R(n)**(2d).
    """

    kind: str
    c1: float
    c2: float
    M: int

    def __post_init__(self):
        if self.kind not in ("I_M", "D_M"):
            raise ValueError(f"unknown growth condition {self.kind!r}")
        if not (0 < self.c1 <= self.c2 < math.inf):
            raise ValueError("need 0 < c1 <= c2 < inf")

    def bounds(self, n: int) -> tuple[float, float]:
        s = self.M ** (n / 2)
        return self.c1 * s, self.c2 * s


@dataclass(frozen=True)
class GrowthCheck:
    ok: bool
    violation: tuple | None = None

    def __bool__(self):
        return self.ok


def check_growth(cond: GrowthCondition, samples: Iterable[tuple[int, float]], rtol: float = 1e-12) -> GrowthCheck:
    samples = list(samples)
    if not samples:
        raise ValueError("no samples to check")
    for n, value in samples:
        lo, hi = cond.bounds(n)
        if value < lo * (1 - rtol) or value > hi * (1 + rtol):
            return GrowthCheck(False, (n, value))
    return GrowthCheck(True)


def iterate_specs(M: int, alphabet: Sequence[int], ns: Iterable[int], length_rule) -> list[CantorSpec]:
    return [CantorSpec(M, tuple(alphabet), n, length_rule(n)) for n in ns]
