"""Two-particle wave function of a neutron scattering on a free atom.

Coordinates are r_n (neutron) and r_a (atom); the free Hamiltonian is
-Delta_n/2 - mu Delta_a/2.  Probe points for the residual check are rows of
six numbers (r_n, r_a).
"""
from __future__ import annotations

import numpy as np

from .errors import PreconditionError, SingularPointError
from .kinematics import CollisionConfig, on_shell_check, vec3
from .numerics import OperatorSpec, finite_difference_residual

CONVENTIONS = ("consistent", "printed")


def _phase_coordinate(cfg: CollisionConfig, r_n, r_a, convention: str):
    if convention == "consistent":
        # centre-of-mass coordinate (m_n r_n + M r_a)/(m_n + M) with M = 1/mu
        return (cfg.mu * r_n + r_a) / (1 + cfg.mu)
    if convention == "printed":
        return (cfg.mu * r_n - r_a) / (1 + cfg.mu)
    raise PreconditionError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def scattered_wave_closed(cfg: CollisionConfig, r_n, r_a, t: float,
                          convention: str = "consistent"):
    """Outgoing wave (b/(1+mu)) exp(i q R/(1+mu) + i P.X - i E t) / R.

    R = |r_n - r_a|.  With the default convention X is the centre-of-mass
    coordinate, which makes the wave an exact solution of the free two-body
    equation away from R = 0.  ``convention="printed"`` uses
    X = (mu r_n - r_a)/(1+mu) instead; it agrees with the default only when
    P = 0.

    ``r_n`` and ``r_a`` may be (3,) vectors or (n, 3) arrays.
    """
    r_n = np.asarray(r_n, float)
    r_a = np.asarray(r_a, float)
    sep = np.linalg.norm(r_n - r_a, axis=-1)
    if np.any(sep == 0.0):
        raise SingularPointError("scattered wave is singular at r_n = r_a")
    X = _phase_coordinate(cfg, r_n, r_a, convention)
    phase = cfg.q * sep / (1 + cfg.mu) + X @ cfg.P - cfg.E * t
    return cfg.b / (1 + cfg.mu) * np.exp(1j * phase) / sep


def incident_wave(cfg: CollisionConfig, r_n, r_a, t: float):
    """exp(i k_i.r_n + i p_i.r_a - i E t)."""
    r_n = np.asarray(r_n, float)
    r_a = np.asarray(r_a, float)
    return np.exp(1j * (r_n @ cfg.k_i + r_a @ cfg.p_i - cfg.E * t))


def final_amplitude_kernel(cfg: CollisionConfig, k_f, p_f):
    """Prefactor i b / pi of the two-delta final-state amplitude, plus residuals.

    The deltas enforce k_f + p_f = k_i + p_i and
    k_f^2 + mu p_f^2 = k_i^2 + mu p_i^2; their arguments are returned
    instead of being evaluated.
    """
    k_f, p_f = vec3(k_f), vec3(p_f)
    dp = k_f + p_f - cfg.k_i - cfg.p_i
    de = float(k_f @ k_f + cfg.mu * p_f @ p_f - cfg.k_i @ cfg.k_i - cfg.mu * cfg.p_i @ cfg.p_i)
    return 1j * cfg.b / np.pi, dp, de


def is_on_shell(cfg: CollisionConfig, k_f, p_f, tol: float = 1e-10) -> bool:
    return all(on_shell_check(cfg, k_f, p_f, tol))


def two_body_operator(mu: float) -> OperatorSpec:
    """i d/dt + Delta_n/2 + mu Delta_a/2 on six coordinates."""
    return OperatorSpec(time=1j, laplacian=(((0, 1, 2), 0.5), ((3, 4, 5), 0.5 * mu)))


def pde_residual(cfg: CollisionConfig, grid_spacing: float, probe_points, t: float = 0.0,
                 include_incident: bool = True, include_scattered: bool = True,
                 convention: str = "consistent") -> float:
    """Max finite-difference residual of the free two-body equation.

    The field is the incident plane wave plus the closed-form scattered wave
    (either can be switched off).  Probes must stay at least four grid
    spacings away from the coincidence manifold r_n = r_a.
    """
    pts = np.atleast_2d(np.asarray(probe_points, float))
    if pts.shape[1] != 6:
        raise PreconditionError("probe points must have six coordinates (r_n, r_a)")
    if include_scattered:
        sep = np.linalg.norm(pts[:, :3] - pts[:, 3:], axis=1)
        if np.any(sep < 4 * grid_spacing):
            raise PreconditionError("probe point within 4 grid spacings of r_n = r_a")

    def field(x, tt):
        out = np.zeros(len(x), dtype=complex)
        if include_incident:
            out += incident_wave(cfg, x[:, :3], x[:, 3:], tt)
        if include_scattered:
            out += scattered_wave_closed(cfg, x[:, :3], x[:, 3:], tt, convention)
        return out

    return finite_difference_residual(field, two_body_operator(cfg.mu), grid_spacing, pts, t)
