"""Numerical oracles: quadrature rules, nascent deltas, seeded streams,
finite-difference residuals and power-law fits.

Everything here is deterministic for fixed orders and seeds.  Reductions go
through ``numpy.sum``, which uses pairwise summation in a fixed order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import stats

from .errors import AccuracyError, DomainError, PreconditionError

SQRT_PI = np.sqrt(np.pi)


class Quadrature(NamedTuple):
    points: np.ndarray   # (n, d) or (n,)
    weights: np.ndarray  # (n,)


# --------------------------------------------------------------------------
# 1D and tensor rules
# --------------------------------------------------------------------------

def gauss_legendre(a: float, b: float, n: int) -> Quadrature:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return Quadrature(a + half * (x + 1.0), half * w)


def composite_gauss_legendre(breaks: Sequence[float], order: int = 16,
                             panels: int | Sequence[int] = 1) -> Quadrature:
    """Gauss-Legendre on consecutive segments of ``breaks``.

    ``panels`` is the number of equal panels per segment, either one value
    for all segments or one per segment.
    """
    breaks = np.asarray(breaks, dtype=float)
    nseg = len(breaks) - 1
    if np.isscalar(panels):
        panels = [int(panels)] * nseg
    x0, w0 = np.polynomial.legendre.leggauss(order)
    xs, ws = [], []
    for (a, b), m in zip(zip(breaks[:-1], breaks[1:]), panels):
        if b <= a:
            continue
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        xs.append((mid[:, None] + half[:, None] * x0[None, :]).ravel())
        ws.append((half[:, None] * w0[None, :]).ravel())
    if not xs:
        return Quadrature(np.empty(0), np.empty(0))
    return Quadrature(np.concatenate(xs), np.concatenate(ws))


def box_quadrature(bounds: Sequence[tuple[float, float]], order: int = 16,
                   panels: int = 8) -> Quadrature:
    """Tensor product of composite Gauss-Legendre rules over a box."""
    rules = [composite_gauss_legendre([lo, hi], order, panels) for lo, hi in bounds]
    grids = np.meshgrid(*[r.points for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r.weights for r in rules], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return Quadrature(pts, wts)


# --------------------------------------------------------------------------
# sphere rules
# --------------------------------------------------------------------------

def orthonormal_frame(axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (e1, e2, e3) with e3 along ``axis``; deterministic choice of e1."""
    e3 = np.asarray(axis, dtype=float)
    e3 = e3 / np.linalg.norm(e3)
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - (helper @ e3) * e3
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def _polar_azimuth_rule(c_lo: float, c_hi: float, order: int, axis) -> Quadrature:
    c, wc = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (c_hi - c_lo)
    c = c_lo + half * (c + 1.0)
    wc = wc * half
    nphi = 2 * order
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    wphi = 2.0 * np.pi / nphi
    st = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    local = np.stack([
        (st[:, None] * np.cos(phi)[None, :]).ravel(),
        (st[:, None] * np.sin(phi)[None, :]).ravel(),
        np.repeat(c, nphi),
    ], axis=-1)
    if axis is None:
        pts = local
    else:
        e1, e2, e3 = orthonormal_frame(axis)
        pts = local @ np.stack([e1, e2, e3])
    return Quadrature(pts, np.repeat(wc * wphi, nphi))


def sphere_quadrature(order: int, axis=None) -> Quadrature:
    """Product rule on the unit sphere.

    Gauss-Legendre in cos(theta) with ``order`` nodes times the uniform
    trapezoid in phi with ``2*order`` nodes.  Exact for polynomials of degree
    up to 2*order-1 in cos(theta).  The polar axis defaults to +z.
    """
    if order < 4:
        raise PreconditionError(f"sphere_quadrature needs order >= 4, got {order}")
    return _polar_azimuth_rule(-1.0, 1.0, order, axis)


def hemisphere_quadrature(order: int, axis=(0.0, 0.0, 1.0)) -> Quadrature:
    """Product rule on the hemisphere {n : n.axis > 0}."""
    if order < 1:
        raise PreconditionError("hemisphere_quadrature needs order >= 1")
    return _polar_azimuth_rule(0.0, 1.0, order, axis)


# --------------------------------------------------------------------------
# nascent delta + Richardson
# --------------------------------------------------------------------------

def nascent_delta(x, eps: float):
    """Gaussian surrogate exp(-x^2/eps^2) / (eps sqrt(pi))."""
    x = np.asarray(x, dtype=float)
    return np.exp(-(x / eps) ** 2) / (eps * SQRT_PI)


def richardson(h, values) -> tuple[float, float]:
    """Extrapolate ``values(h)`` to h = 0 by polynomial interpolation (Neville).

    Returns (extrapolated value, |difference to the extrapolation that drops
    the largest h|) as the error estimate.
    """
    h = np.asarray(h, dtype=float)
    v = np.asarray(values)
    if len(h) < 2:
        raise PreconditionError("richardson needs at least two points")

    def neville(hh, vv):
        p = list(vv)
        n = len(hh)
        for m in range(1, n):
            for i in range(n - m):
                p[i] = ((0.0 - hh[i + m]) * p[i] - (0.0 - hh[i]) * p[i + 1]) / (hh[i] - hh[i + m])
        return p[0]

    order = np.argsort(h)[::-1]
    h, v = h[order], v[order]
    full = neville(h, v)
    reduced = neville(h[1:], v[1:])
    return full, abs(full - reduced)


def nascent_delta_integrate(integrand: Callable, delta_args: Callable | Sequence[Callable],
                            epsilons: Sequence[float], domain: Quadrature,
                            rtol: float = 1e-3) -> tuple[float, float]:
    """Integrate ``integrand(x) * prod_j delta(g_j(x))`` over a quadrature domain.

    Every delta is replaced by :func:`nascent_delta` of width eps; the values
    for each eps are Richardson-extrapolated in eps^2 to eps -> 0.
    Raises AccuracyError if the sequence of values is not monotonically
    converging (successive differences must shrink).
    """
    eps = np.asarray(epsilons, dtype=float)
    if len(eps) < 3:
        raise PreconditionError("need at least three epsilons")
    if np.any(np.diff(eps) >= 0):
        raise PreconditionError("epsilons must be strictly decreasing")
    if callable(delta_args):
        delta_args = [delta_args]
    x, w = domain
    f = integrand(x)
    args = [g(x) for g in delta_args]
    vals = []
    for e in eps:
        kern = np.ones_like(w)
        for a in args:
            kern = kern * nascent_delta(a, e)
        vals.append(np.sum(w * f * kern))
    vals = np.asarray(vals)
    diffs = np.abs(np.diff(vals))
    scale = max(np.max(np.abs(vals)), 1e-300)
    if np.any(diffs[1:] > diffs[:-1] * (1 + 1e-9) + 1e-14 * scale):
        raise AccuracyError("nascent-delta sequence is not converging monotonically",
                            {"epsilons": eps.tolist(), "values": vals.tolist()})
    value, err = richardson(eps ** 2, vals)
    if err > rtol * max(abs(value), 1e-300) and err > 1e-14:
        raise AccuracyError("nascent-delta extrapolation error above tolerance",
                            {"value": value, "error": err, "values": vals.tolist()})
    return float(np.real_if_close(value)), float(err)


# --------------------------------------------------------------------------
# random streams
# --------------------------------------------------------------------------

def seeded_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Counter-based Philox generator keyed by (seed, stream_id).

    Philox output depends only on the key and counter, so the sequence is
    identical on every platform for the same pair.
    """
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(stream_id) & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorSpec:
    """Linear operator  time * d/dt + sum_b coeff_b * Laplacian_b + constant.

    Each entry of ``laplacian`` is (axes, coeff): the Laplacian over the
    listed coordinate axes, scaled by coeff.
    """
    time: complex = 0.0
    laplacian: tuple = field(default_factory=tuple)
    constant: complex = 0.0


def schrodinger_operator(ndim: int = 3) -> OperatorSpec:
    return OperatorSpec(time=1j, laplacian=((tuple(range(ndim)), 0.5),))


def finite_difference_residual(field: Callable, operator_spec: OperatorSpec, spacing: float,
                               points, t: float = 0.0, time_step: float | None = None) -> float:
    """Max |L psi| over ``points`` with second-order central stencils.

    ``field(x, t)`` takes x of shape (n, d) and returns n complex values.
    The time derivative is a central difference with step ``time_step``
    (default spacing**2).
    """
    if spacing <= 0:
        raise PreconditionError("spacing must be positive")
    x = np.atleast_2d(np.asarray(points, dtype=float))
    h = float(spacing)
    f0 = field(x, t)
    res = operator_spec.constant * f0
    for axes, coeff in operator_spec.laplacian:
        lap = np.zeros_like(f0, dtype=complex)
        for a in axes:
            dx = np.zeros(x.shape[1])
            dx[a] = h
            lap += (field(x + dx, t) - 2.0 * f0 + field(x - dx, t)) / (h * h)
        res = res + coeff * lap
    if operator_spec.time != 0:
        dt = h * h if time_step is None else time_step
        dpsi = (field(x, t + dt) - field(x, t - dt)) / (2.0 * dt)
        res = res + operator_spec.time * dpsi
    return float(np.max(np.abs(res)))


# --------------------------------------------------------------------------
# fits
# --------------------------------------------------------------------------

def powerlaw_fit(xs, ys) -> tuple[float, float]:
    """Least-squares slope of log y against log x, with its standard error."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 4:
        raise PreconditionError("powerlaw_fit needs at least 4 paired points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("powerlaw_fit needs strictly positive data")
    lx, ly = np.log(xs), np.log(ys)
    if np.ptp(ly) == 0.0:
        return 0.0, 0.0
    fit = stats.linregress(lx, ly)
    return float(fit.slope), float(fit.stderr)
