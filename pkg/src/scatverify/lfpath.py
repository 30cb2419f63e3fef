"""Scattering probability computed directly in the laboratory frame.

The energy delta is integrated over |k_f| along each direction, giving a
per-steradian amplitude for every kinematic branch.  Probabilities of
distinct branches add.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (DivergenceWarning, NotFoundError, PreconditionError,
                     SingularJacobianError)
from .kinematics import (CollisionConfig, check_unit, discriminant,
                         final_momentum_roots, roots_on_grid, transfer_state, vec3)
from .numerics import orthonormal_frame, sphere_quadrature


def _branches(cfg: CollisionConfig, n):
    branches = final_momentum_roots(cfg, n)
    for br in branches:
        if br.discriminant == 0.0:
            raise SingularJacobianError(
                "zero discriminant: LF density is unbounded in this direction",
                direction=np.asarray(n, float))
    return branches


def lf_amplitude_density(cfg: CollisionConfig, n) -> list[complex]:
    """dF/dOmega_f = (i b / 2 pi) k_f^2 / sqrt(D) for each branch."""
    n = check_unit(n)
    pref = 1j * cfg.b / (2 * np.pi)
    return [pref * br.k_f ** 2 / np.sqrt(br.discriminant) for br in _branches(cfg, n)]


def lf_probability_density(cfg: CollisionConfig, n) -> float:
    """dw_l/dOmega_f = sum over branches of |b/2pi|^2 k_f^4 / D."""
    n = check_unit(n)
    pref = abs(cfg.b / (2 * np.pi)) ** 2
    return float(sum(pref * br.k_f ** 4 / br.discriminant for br in _branches(cfg, n)))


def lf_density_from_transfer(k_i, k_f, p_i, mu: float, b: complex) -> float:
    """The same density rebuilt from kappa, omega, s and k_i.p_i only.

    On shell, k_f sqrt(D) = |s - mu omega - mu k_i.p_i|, so the density is
    |b/2pi|^2 k_f^6 / (s - mu omega - mu k_i.p_i)^2.
    """
    k_i, k_f, p_i = vec3(k_i), vec3(k_f), vec3(p_i)
    ts = transfer_state(k_i, k_f, mu)
    kf2 = float(k_i @ k_i) - 2.0 * ts.omega
    denom = ts.s - mu * ts.omega - mu * float(k_i @ p_i)
    return abs(b / (2 * np.pi)) ** 2 * kf2 ** 3 / denom ** 2


def singular_cone(cfg: CollisionConfig):
    """Return a direction on the cone where D = 0 with k_f > 0, or None.

    Such a cone exists iff q < mu |P|: it has half-angle arcsin(q / (mu |P|))
    around P, and on it the LF density diverges like 1/D.
    """
    Pn = np.linalg.norm(cfg.P)
    if cfg.mu == 0 or Pn == 0 or cfg.q >= cfg.mu * Pn:
        return None
    sin_b = cfg.q / (cfg.mu * Pn)
    cos_b = np.sqrt(1.0 - sin_b * sin_b)
    e1, _, e3 = orthonormal_frame(cfg.P)
    return cos_b * e3 + sin_b * e1


def lf_total_probability(cfg: CollisionConfig, quadrature_order: int = 64) -> float:
    """Integral of :func:`lf_probability_density` over the sphere.

    If the configuration has a singular cone the integral diverges; a
    DivergenceWarning carrying a direction on the cone is issued and the
    (grid-dependent) quadrature sum is returned.
    """
    if quadrature_order < 8:
        raise PreconditionError("quadrature_order must be >= 8")
    cone = singular_cone(cfg)
    if cone is not None:
        warnings.warn(DivergenceWarning(
            f"LF density has a non-integrable singular cone through {cone.tolist()}",
            direction=cone), stacklevel=2)
    nodes, weights = sphere_quadrature(quadrature_order)
    kp, km, disc = roots_on_grid(cfg, nodes)
    tangent = (disc == 0.0) & ~(np.isnan(kp) & np.isnan(km))
    if np.any(tangent) and cone is None:
        warnings.warn(DivergenceWarning("tangent root hit on quadrature grid",
                                        direction=nodes[np.argmax(tangent)]), stacklevel=2)
    safe = np.where(tangent | (disc <= 0), np.inf, disc)
    pref = abs(cfg.b / (2 * np.pi)) ** 2
    dens = pref * (np.nan_to_num(kp) ** 4 + np.nan_to_num(km) ** 4) / safe
    return float(np.sum(weights * dens))


@dataclass(frozen=True, eq=False)
class DivergenceProbe:
    p_i: np.ndarray
    n: np.ndarray
    discriminant: float
    q: float
    alpha: float
    cone_half_angle: float


def divergence_probe(k_i, mu: float, search_budget: int = 0) -> DivergenceProbe:
    """Construct an atom momentum and direction on the LF singular cone.

    The atom moves along k_i, p_i = alpha k_i, with alpha = (2 - mu) / (3 mu)
    chosen so that q / (mu |P|) = 1/2: the density then diverges on a cone of
    half-angle 30 degrees around P, where k_f = mu |P| cos(30 deg)/(1 + mu) > 0.
    ``search_budget`` is accepted for interface compatibility; the
    construction is closed-form and needs no search.
    """
    k_i = vec3(k_i)
    if mu <= 0:
        raise NotFoundError("no singular direction: for mu = 0 the discriminant is q^2 > 0")
    alpha = (2.0 - mu) / (3.0 * mu)
    p_i = alpha * k_i
    cfg = CollisionConfig(k_i, p_i, mu)
    n = singular_cone(cfg)
    if n is None:
        raise NotFoundError(f"construction produced no singular cone for mu = {mu}")
    return DivergenceProbe(p_i=p_i, n=n, discriminant=discriminant(cfg, n), q=cfg.q,
                           alpha=alpha, cone_half_angle=float(np.arcsin(0.5)))


def tangent_boundary_pair(k_i, mu: float):
    """The collinear pair with q = mu |P| and n perpendicular to P.

    D vanishes there, but so does the root k_f = mu P.n / (1+mu), and the
    density tends to zero.  Kept to document why the probe uses q < mu|P|.
    """
    k_i = vec3(k_i)
    if mu <= 0 or mu >= 1:
        raise NotFoundError("collinear tangent pair needs 0 < mu < 1")
    alpha = (1.0 - mu) / (2.0 * mu)
    p_i = alpha * k_i
    e1, _, _ = orthonormal_frame(k_i)
    cfg = CollisionConfig(k_i, p_i, mu)
    return p_i, e1, discriminant(cfg, e1)
