"""Spherical-wave content for scattering on a fixed center.

Includes the partial-wave amplitude, the hemisphere plane-wave
decomposition of e^{ikr}/r with its 1/r evanescent remainder, the
nonstationary probability, and semi-integral cross sections.
"""
from __future__ import annotations

import warnings

import numpy as np

from .errors import AccuracyError, PreconditionError, UnitarityWarning
from .kinematics import check_unit
from .numerics import gauss_legendre, hemisphere_quadrature


def partial_wave_amplitude(S, k: float, theta: float) -> complex:
    """f(theta) = (1/2ik) sum_l (2l+1) (S_l - 1) P_l(cos theta)."""
    if k <= 0:
        raise PreconditionError("k must be positive")
    S = np.asarray(S, dtype=complex)
    if S.size == 0:
        return 0j
    if np.any(np.abs(S) > 1 + 1e-12):
        warnings.warn(UnitarityWarning("an S-matrix element exceeds unit modulus"), stacklevel=2)
    ell = np.arange(S.size)
    coeffs = (2 * ell + 1) * (S - 1)
    return complex(np.polynomial.legendre.legval(np.cos(theta), coeffs) / (2j * k))


def default_hemisphere_order(k: float, r: float) -> int:
    return int(np.ceil(0.5 * k * r)) + 24


def _hemisphere_sum(kr: float, order: int) -> complex:
    # the integrand on the axis is azimuth independent, so the azimuth gives 2 pi
    c, w = gauss_legendre(0.0, 1.0, order)
    return 2 * np.pi * np.sum(w * np.exp(1j * kr * c))


def hemisphere_decomposition(k: float, r: float, quadrature_order: int | None = None,
                             tol: float = 1e-8) -> complex:
    """(ik/2pi) times the integral of exp(i k r cos theta) over the forward hemisphere.

    Evaluated on the axis z = r.  The exact value is (e^{ikr} - 1)/r.  The
    result is accepted only if a rule with 1.5x the nodes agrees within
    ``tol`` times 1/r.
    """
    if k * r < 1:
        raise PreconditionError("hemisphere decomposition needs k r >= 1")
    order = default_hemisphere_order(k, r) if quadrature_order is None else int(quadrature_order)
    if order < 1:
        raise PreconditionError("quadrature_order must be positive")
    kr = k * r
    val = _hemisphere_sum(kr, order)
    check = _hemisphere_sum(kr, int(np.ceil(1.5 * order)) + 1)
    pref = 1j * k / (2 * np.pi)
    if abs(pref * (val - check)) > tol / r:
        raise AccuracyError("hemisphere quadrature not converged at this order",
                            {"order": order, "kr": kr, "difference": abs(pref * (val - check))})
    return complex(pref * val)


def evanescent_tail_bound(r: float) -> float:
    """1/r: modulus of the discarded part of the spherical wave on the axis."""
    if r <= 0:
        raise PreconditionError("r must be positive")
    return 1.0 / r


def nonstationary_probability(b: complex, k: float) -> tuple[complex, float]:
    """F' = i b k / 2 pi and the total 4 pi |b k / 2 pi|^2 = 4 pi |b / lambda|^2."""
    if k <= 0:
        raise PreconditionError("k must be positive")
    F = 1j * b * k / (2 * np.pi)
    return F, 4 * np.pi * abs(F) ** 2


def semi_integral_cross_section(b_of_direction, n, quadrature_order: int = 32) -> float:
    """Integral of |b(direction)|^2 over the hemisphere around ``n``.

    ``b_of_direction`` receives an (m, 3) array of unit vectors and returns m
    values.
    """
    n = check_unit(n)
    pts, w = hemisphere_quadrature(quadrature_order, axis=n)
    vals = np.asarray(b_of_direction(pts))
    return float(np.sum(w * np.abs(vals) ** 2))
