"""Gaussian Gabor multipliers on lattice restrictions.

The multiplier |A| sum_{lam in Lam_Omega} <f, pi(lam)phi0> pi(lam)phi0 has
operator norm |A| * lambda_max(G) where G is the Gram matrix of the
restricted system, so everything reduces to finite Hermitian matrices.
"""
from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.stats import qmc

from ..cantor import IntervalUnion, ProductCantor
from .bargmann import gauss_tf_inner
from .radial import Spectrum

MATRIX_CAP = 4096
DROP_TOL = 1e-16
_MAGIC = b"FUPGRAM1"


class MatrixCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class Lattice2d:
    """Rectangular lattice offset + (a_k Z)^d x (b_k Z)^d with a centred box as fundamental region."""

    a: tuple
    b: tuple
    offset: tuple | None = None

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(self.a))
        b = tuple(float(v) for v in np.atleast_1d(self.b))
        if len(a) != len(b) or not a:
            raise ValueError("need as many frequency spacings as time spacings")
        if min(a + b) <= 0:
            raise ValueError("spacings must be positive")
        off = (0.0,) * (2 * len(a)) if self.offset is None else tuple(float(v) for v in self.offset)
        if len(off) != 2 * len(a):
            raise ValueError("offset must have 2d entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "offset", off)

    @classmethod
    def square(cls, spacing: float, d: int = 1, centered_cells: bool = False) -> "Lattice2d":
        off = (spacing / 2,) * (2 * d) if centered_cells else None
        return cls((spacing,) * d, (spacing,) * d, off)

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def spacings(self) -> tuple:
        return self.a + self.b

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacings)

    @property
    def half_diagonal(self) -> float:
        return 0.5 * math.sqrt(sum(s * s for s in self.spacings))

    def point(self, index) -> np.ndarray:
        return np.asarray(self.offset) + np.asarray(index, dtype=float) * np.asarray(self.spacings)


@dataclass
class LatticeRestriction:
    lattice: Lattice2d
    points: np.ndarray
    source: str
    approximate: bool = False
    indices: np.ndarray | None = None

    def __len__(self):
        return len(self.points)


def _axis_indices(axis: IntervalUnion, spacing: float, offset: float, tol: float) -> list[int]:
    """k with |axis cap (offset + k*spacing + [-spacing/2, spacing/2])| > tol * spacing."""
    arr = axis.as_array()
    if len(arr) == 0:
        return []
    out = set()
    for lo, hi in arr:
        k0 = math.floor((lo - offset) / spacing + 0.5) - 1
        k1 = math.ceil((hi - offset) / spacing - 0.5) + 1
        for k in range(k0, k1 + 1):
            c = offset + k * spacing
            if min(hi, c + spacing / 2) - max(lo, c - spacing / 2) > tol * spacing:
                out.add(k)
    return sorted(out)


def lattice_restriction(
    lattice: Lattice2d,
    omega,
    bbox: tuple | None = None,
    samples: int = 256,
    seed: int = 0,
    tol: float = 1e-9,
) -> LatticeRestriction:
    """Lattice points whose cell meets Omega in positive measure.

    Products (a ProductCantor or 2d interval unions) are handled exactly axis
    by axis.  A membership predicate needs a bounding box and is resolved by
    quasi-random sampling inside each candidate cell; the result is flagged
    approximate.
    """
    dim = 2 * lattice.d
    if isinstance(omega, ProductCantor) or (isinstance(omega, (list, tuple)) and omega and isinstance(omega[0], IntervalUnion)):
        axes = omega.axes() if isinstance(omega, ProductCantor) else list(omega)
        if len(axes) != dim:
            raise ValueError(f"need {dim} axes, got {len(axes)}")
        per_axis = [_axis_indices(ax, s, o, tol) for ax, s, o in zip(axes, lattice.spacings, lattice.offset)]
        idx = np.array(list(itertools.product(*per_axis)), dtype=np.int64).reshape(-1, dim)
        pts = lattice.offset + idx * np.asarray(lattice.spacings)
        return LatticeRestriction(lattice, pts, "product", False, idx)
    if not callable(omega):
        raise TypeError("omega must be a product of interval unions or a membership predicate")
    if bbox is None:
        raise ValueError("a predicate needs a bounding box")
    lo = np.asarray(bbox[0], dtype=float)
    hi = np.asarray(bbox[1], dtype=float)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("Omega must be bounded")
    sp = np.asarray(lattice.spacings)
    off = np.asarray(lattice.offset)
    k_lo = np.floor((lo - off) / sp + 0.5).astype(int) - 1
    k_hi = np.ceil((hi - off) / sp - 0.5).astype(int) + 1
    unit = qmc.Sobol(dim, scramble=True, seed=seed).random(samples) - 0.5
    keep = []
    for idx in itertools.product(*[range(a, b + 1) for a, b in zip(k_lo, k_hi)]):
        centre = off + np.asarray(idx) * sp
        if np.any(np.asarray(omega(centre + unit * sp))):
            keep.append(idx)
    idx = np.array(keep, dtype=np.int64).reshape(-1, dim)
    return LatticeRestriction(lattice, off + idx * sp, "predicate", True, idx)


def gram_matrix(points: np.ndarray) -> np.ndarray:
    """G[l, m] = <pi(m) phi0, pi(l) phi0> (Hermitian, unit diagonal)."""
    pts = np.asarray(points, dtype=float)
    return gauss_tf_inner(pts[None, :, :], pts[:, None, :])


def power_iteration(
    matvec: Callable,
    size: int,
    tol: float = 1e-10,
    max_iter: int = 20_000,
    seed: int = 0,
    block: int = 32,
):
    """Largest eigenvalue of a Hermitian positive semidefinite operator.

    Block power iteration with a Rayleigh-Ritz step, so clusters of nearly
    equal top eigenvalues (common for symmetric sets) do not stall it.
    Stops when the top Ritz residual |Gv - theta v| is below tol * theta;
    for Hermitian operators that residual bounds the distance from theta to
    the spectrum.  ``matvec`` must accept a (size, k) block.
    """
    rng = np.random.default_rng(seed)
    k = max(1, min(block, size))
    V = rng.standard_normal((size, k)) + 1j * rng.standard_normal((size, k))
    V[:, 0] = 1.0
    V, _ = np.linalg.qr(V)
    resid = math.inf
    for it in range(1, max_iter + 1):
        W = matvec(V)
        H = V.conj().T @ W
        vals, vecs = np.linalg.eigh(0.5 * (H + H.conj().T))
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        theta = float(vals[0])
        top = V @ vecs[:, 0]
        resid = float(np.linalg.norm(W @ vecs[:, 0] - theta * top))
        if resid <= tol * abs(theta) or theta == 0:
            return theta, resid, it
        V, _ = np.linalg.qr(W @ vecs)
    raise ArithmeticError(f"power iteration did not converge in {max_iter} steps (residual {resid:.2e})")


def gabor_multiplier_norm(
    restriction: LatticeRestriction,
    cap: int = MATRIX_CAP,
    method: str = "power",
    sparse_mode: bool = False,
    tol: float = 1e-10,
) -> Spectrum:
    """cellVolume * lambda_max(Gram) of the restricted Gaussian system."""
    size = len(restriction)
    vol = restriction.lattice.cell_volume
    if size == 0:
        return Spectrum(np.zeros(1), meta={"points": 0})
    if size > cap and not sparse_mode:
        raise MatrixCapError(
            f"{size} lattice points exceed the matrix cap {cap}; reduce n or use the sparse mode"
        )
    G = gram_matrix(restriction.points)
    drop_bound = 0.0
    if sparse_mode:
        small = np.abs(G) < DROP_TOL
        drop_bound = float(np.max(np.sum(np.where(small, np.abs(G), 0.0), axis=1)))
        G = sparse.csr_matrix(np.where(small, 0.0, G))
    if method == "dense":
        if sparse_mode:
            G = G.toarray()
        vals = np.linalg.eigvalsh(G)
        eig = vals[::-1] * vol
        return Spectrum(eig, error=drop_bound * vol, meta={"points": size, "method": "dense"})
    if method != "power":
        raise ValueError("method must be 'power' or 'dense'")
    theta, resid, iters = power_iteration(lambda v: G @ v, size, tol)
    return Spectrum(
        np.array([theta * vol]),
        error=(resid + drop_bound) * vol,
        meta={"points": size, "method": "power", "iterations": iters},
    )


def _cell_distance(z: np.ndarray, centres: np.ndarray, half: np.ndarray) -> np.ndarray:
    gap = np.clip(np.abs(z[:, None, :] - centres[None, :, :]) - half, 0.0, None)
    return np.sqrt(np.sum(gap * gap, axis=-1))


def overlap_count(lattice: Lattice2d, R: float, resolution: int = 41) -> int:
    """sup over z in the fundamental region of #{cells meeting B_R(z) in positive measure}.

    A closed box meets the open ball in positive measure iff its distance
    to z is below R.  The count is evaluated on a grid over the fundamental
    region that always contains the centre and the corners.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    sp = np.asarray(lattice.spacings)
    dim = len(sp)
    reach = [range(-(math.ceil(R / s) + 1), math.ceil(R / s) + 2) for s in sp]
    centres = np.array(list(itertools.product(*reach)), dtype=float) * sp
    ticks = np.linspace(-0.5, 0.5, resolution)
    best = 0
    half = sp / 2
    for chunk in _grid_chunks(ticks, dim, 4096):
        z = chunk * sp
        counts = np.sum(_cell_distance(z, centres, half) < R, axis=1)
        best = max(best, int(np.max(counts)))
    return best


def _grid_chunks(ticks, dim, size):
    pts = itertools.product(ticks, repeat=dim)
    while True:
        block = list(itertools.islice(pts, size))
        if not block:
            return
        yield np.array(block)


def overlap_upper_bound(lattice: Lattice2d, R: float) -> int:
    """prod_k (ceil(2R / s_k) + 1): the cells met by the bounding cube of any ball."""
    return math.prod(math.ceil(2 * R / s) + 1 for s in lattice.spacings)


@dataclass
class ConditionH:
    ok: bool
    half_diagonal: float
    radius: float
    overlap: int
    overlap_ratio: float


def check_condition_h(lattice: Lattice2d, h: float, L: float) -> ConditionH:
    """A_Lambda inside B_{hL}(0), and gamma(h, Lambda) |A| / |B_h| for the record."""
    from ..density import ball_volume

    gamma = overlap_count(lattice, h)
    ratio = gamma * lattice.cell_volume / ball_volume(h, 2 * lattice.d)
    return ConditionH(lattice.half_diagonal <= h * L * (1 + 1e-12), lattice.half_diagonal, h * L, gamma, ratio)


def dump_matrix(path, matrix: np.ndarray) -> None:
    """Header (magic, rank, dims) then float64 little-endian row-major payload.

    Complex matrices get a trailing axis of length 2 (real, imaginary).
    """
    m = np.asarray(matrix)
    if np.iscomplexobj(m):
        m = np.stack([m.real, m.imag], axis=-1)
    m = np.ascontiguousarray(m, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", m.ndim))
        fh.write(struct.pack(f"<{m.ndim}Q", *m.shape))
        fh.write(m.tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError("not a matrix dump")
        (rank,) = struct.unpack("<I", fh.read(4))
        shape = struct.unpack(f"<{rank}Q", fh.read(8 * rank))
        data = np.frombuffer(fh.read(), dtype="<f8")
    return data.reshape(shape)
