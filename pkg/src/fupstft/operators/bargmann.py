"""Bargmann transform and Gaussian-window STFT by quadrature, plus closed forms.

Conventions: phi0(t) = 2**(d/4) exp(-pi |t|**2), pi(x, w) = M_w T_x, and
Bf(z) = 2**(d/4) int f(t) exp(2 pi t.z - pi t.t - (pi/2) z.z) dt.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_ORDER = 170
DECAY_TOL = 1e-12


class QuadratureWarning(UserWarning):
    pass


@dataclass
class QuadratureValue:
    value: complex
    error: float
    warning: str | None = None


def default_grid(half_width: float = 8.0, step: float = 1 / 64) -> np.ndarray:
    m = int(round(half_width / step))
    return np.arange(-m, m + 1) * step


def hermite_functions(kmax: int, t: np.ndarray) -> np.ndarray:
    """Rows h_0..h_kmax of L2-normalized Hermite functions with h_0 = phi0 (d = 1)."""
    if kmax < 0 or kmax > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}]")
    t = np.asarray(t, dtype=float)
    u = math.sqrt(2 * math.pi) * t
    out = np.empty((kmax + 1,) + t.shape)
    out[0] = 2**0.25 * np.exp(-math.pi * t * t)
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for k in range(1, kmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * u * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_function(k, t):
    """h_k on a grid; a multi-index gives the tensor product on a meshgrid."""
    ks = (k,) if np.isscalar(k) else tuple(k)
    axes = [hermite_functions(kk, np.asarray(t, float))[kk] for kk in ks]
    if len(axes) == 1:
        return axes[0]
    return np.multiply.outer(axes[0], axes[1])


def bargmann_hermite(k, z) -> complex:
    """prod_j (pi**k_j / k_j!)**0.5 z_j**k_j."""
    ks = (int(k),) if np.isscalar(k) else tuple(int(v) for v in k)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(zs) != len(ks):
        raise ValueError("multi-index and point dimensions differ")
    if any(kk < 0 or kk > MAX_ORDER for kk in ks):
        raise OverflowError(f"orders must lie in [0, {MAX_ORDER}]")
    value = 1.0 + 0j
    for kk, zz in zip(ks, zs):
        value *= math.sqrt(math.pi**kk / math.factorial(kk)) * zz**kk
    return complex(value)


def _trapezoid(values: np.ndarray, step: float, axes: int) -> complex:
    total = values
    for _ in range(axes):
        edge = 0.5 * (total[0] + total[-1])
        total = (np.sum(total, axis=0) - edge) * step
    return complex(total)


def _tensor_quadrature(integrand: np.ndarray, step: float, dim: int) -> QuadratureValue:
    fine = _trapezoid(integrand, step, dim)
    sl = tuple(slice(None, None, 2) for _ in range(dim))
    coarse = _trapezoid(integrand[sl], 2 * step, dim)
    return QuadratureValue(fine, abs(fine - coarse))


def _decay_warning(f: np.ndarray) -> str | None:
    peak = float(np.max(np.abs(f)))
    if peak == 0:
        return None
    dim = f.ndim
    edge = 0.0
    for ax in range(dim):
        edge = max(edge, float(np.max(np.abs(np.take(f, [0, -1], axis=ax)))))
    if edge > DECAY_TOL * peak:
        return f"signal is {edge / peak:.1e} of its peak at the grid boundary"
    return None


def _check_grid(t: np.ndarray) -> float:
    t = np.asarray(t, dtype=float)
    steps = np.diff(t)
    if len(t) < 5 or len(t) % 2 == 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("need a uniform grid with an odd number (>= 5) of nodes")
    return float(steps[0])


def bargmann_quadrature(f: np.ndarray, t: np.ndarray, z) -> QuadratureValue:
    """Bf(z) for f sampled on t (d = 1) or on the tensor grid t x t (d = 2)."""
    step = _check_grid(t)
    f = np.asarray(f)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    dim = len(zs)
    if dim not in (1, 2) or f.ndim != dim:
        raise ValueError("supported: d = 1 with 1-D samples or d = 2 with 2-D samples")
    factors = [np.exp(2 * math.pi * t * zz - math.pi * t * t - 0.5 * math.pi * zz * zz) for zz in zs]
    kernel = factors[0] if dim == 1 else np.multiply.outer(factors[0], factors[1])
    result = _tensor_quadrature(2 ** (dim / 4) * f * kernel, step, dim)
    result.warning = _decay_warning(f)
    if result.warning:
        warnings.warn(result.warning, QuadratureWarning, stacklevel=2)
    return result


def stft_gauss(f: np.ndarray, t: np.ndarray, x, w) -> QuadratureValue:
    """V_phi0 f(x, w) = int f(t) phi0(t - x) exp(-2 pi i w.t) dt."""
    step = _check_grid(t)
    f = np.asarray(f)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ws = np.atleast_1d(np.asarray(w, dtype=float))
    dim = len(xs)
    if dim not in (1, 2) or f.ndim != dim or len(ws) != dim:
        raise ValueError("supported: d = 1 or d = 2 with matching samples")
    factors = [2**0.25 * np.exp(-math.pi * (t - xx) ** 2 - 2j * math.pi * ww * t) for xx, ww in zip(xs, ws)]
    kernel = factors[0] if dim == 1 else np.multiply.outer(factors[0], factors[1])
    result = _tensor_quadrature(f * kernel, step, dim)
    result.warning = _decay_warning(f)
    return result


def identity_rhs(bf: complex, x, w) -> complex:
    """exp(i pi x.w) Bf(z) exp(-pi |z|**2 / 2) for z = x + i w."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ws = np.atleast_1d(np.asarray(w, dtype=float))
    return complex(np.exp(1j * math.pi * np.dot(xs, ws) - 0.5 * math.pi * (np.dot(xs, xs) + np.dot(ws, ws))) * bf)


def check_stft_bargmann_identity(f: np.ndarray, t: np.ndarray, points: Sequence) -> float:
    """Largest |V f(x, -w) - exp(i pi x.w) Bf(x + i w) exp(-pi |z|^2/2)| over points (x, w)."""
    worst = 0.0
    for x, w in points:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        ws = np.atleast_1d(np.asarray(w, dtype=float))
        left = stft_gauss(f, t, xs, -ws).value
        bf = bargmann_quadrature(f, t, xs + 1j * ws).value
        worst = max(worst, abs(left - identity_rhs(bf, xs, ws)))
    return worst


def gauss_tf_inner(lam, mu) -> complex:
    """<pi(lam) phi0, pi(mu) phi0> for phase-space points (x_1..x_d, w_1..w_d).

    Equals exp(-pi |lam - mu|**2 / 2) exp(i pi (w_lam - w_mu).(x_lam + x_mu)).
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    d = lam.shape[-1] // 2
    dx = lam[..., :d] - mu[..., :d]
    dw = lam[..., d:] - mu[..., d:]
    sx = lam[..., :d] + mu[..., :d]
    mag = np.exp(-0.5 * math.pi * (np.sum(dx * dx, axis=-1) + np.sum(dw * dw, axis=-1)))
    return mag * np.exp(1j * math.pi * np.sum(dw * sx, axis=-1))


def check_hermite_sampling_identity(orders: Sequence[int], points: Sequence, t: np.ndarray | None = None) -> float:
    """Largest gap between |<h_k, pi(conj lam) phi0>|**2 and |B h_k(lam)|**2 exp(-pi |lam|**2).

    The left side comes from STFT quadrature, the right from the closed form.
    """
    t = default_grid() if t is None else t
    kmax = max(orders)
    table = hermite_functions(kmax, t)
    worst = 0.0
    for k, (x, w) in zip(orders, points):
        left = abs(stft_gauss(table[k], t, x, -w).value) ** 2
        z = complex(x, w)
        right = abs(bargmann_hermite(k, z)) ** 2 * math.exp(-math.pi * abs(z) ** 2)
        worst = max(worst, abs(left - right))
    return worst


def _gauss_legendre_box(a: float, b: float, c: float, e: float, nodes: int):
    g, wts = np.polynomial.legendre.leggauss(nodes)
    xs = 0.5 * (b - a) * g + 0.5 * (a + b)
    ys = 0.5 * (e - c) * g + 0.5 * (c + e)
    ww = np.outer(wts, wts) * 0.25 * (b - a) * (e - c)
    return xs, ys, ww


def stft_power_density(k: int, x: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """|V_phi0 h_k(x, w)|**p = ((pi**k/k!)**0.5 |z|**k exp(-pi |z|**2 / 2))**p."""
    r2 = x * x + w * w
    logc = 0.5 * (k * math.log(math.pi) - math.lgamma(k + 1))
    with np.errstate(divide="ignore"):
        logv = logc + 0.5 * k * np.log(r2) - 0.5 * math.pi * r2 if k else logc - 0.5 * math.pi * r2
    return np.exp(p * logv)


def stft_power_total(k: int, p: float) -> float:
    """||V_phi0 h_k||_p**p in closed form."""
    a = k * p / 2 + 1
    logc = 0.5 * p * (k * math.log(math.pi) - math.lgamma(k + 1))
    return math.exp(logc + math.log(math.pi) + math.lgamma(a) - a * math.log(p * math.pi / 2))


def eval_stft_quotient(k: int, omega, p: float = 2.0, nodes: int = 48, pieces: int = 4) -> QuadratureValue:
    """||V h_k chi_Omega||_p**p / ||V h_k||_p**p for a bounded product of two interval unions.

    Each rectangle is split into pieces x pieces blocks with tensor
    Gauss-Legendre; the error estimate compares against half the nodes.
    """
    axes = omega.axes() if hasattr(omega, "axes") else list(omega)
    if len(axes) != 2:
        raise ValueError("eval_stft_quotient handles d = 1 (two axes)")
    if p < 1:
        raise ValueError("p must be at least 1")
    xs_int = axes[0].as_array()
    ws_int = axes[1].as_array()
    total = stft_power_total(k, p)

    def integrate(m: int) -> float:
        acc = 0.0
        for a, b in xs_int:
            ex = np.linspace(a, b, pieces + 1)
            for c, e in ws_int:
                ey = np.linspace(c, e, pieces + 1)
                for i in range(pieces):
                    for j in range(pieces):
                        gx, gy, ww = _gauss_legendre_box(ex[i], ex[i + 1], ey[j], ey[j + 1], m)
                        X, Y = np.meshgrid(gx, gy, indexing="ij")
                        acc += float(np.sum(ww * stft_power_density(k, X, Y, p)))
        return acc

    fine = integrate(nodes)
    coarse = integrate(max(2, nodes // 2))
    return QuadratureValue(fine / total, abs(fine - coarse) / total)
