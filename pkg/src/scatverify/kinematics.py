"""Two-body elastic kinematics of a neutron hitting an atom.

Natural units throughout: hbar = m_neutron = 1, so a neutron of momentum k
has velocity k and energy k^2/2.  The atom has mass 1/mu and momentum p, so
its velocity is mu*p and its energy mu*p^2/2.  Temperatures are in the same
energy units (k_B = 1); the scattering length b is a length and cross
sections are areas.  Nothing in the package converts units.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

UNIT_TOL = 1e-12
ROOT_FLOOR = 1e-12       # roots below ROOT_FLOOR*|k_i| count as zero
TANGENCY_TOL = 1e-12     # discriminants in [-TANGENCY_TOL*q^2, 0) clamp to 0

Vector3 = np.ndarray


def vec3(v) -> Vector3:
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise PreconditionError(f"non-finite vector {v!r}")
    return a


def unit(v) -> Vector3:
    a = vec3(v)
    return a / np.linalg.norm(a)


def direction(theta: float, phi: float = 0.0) -> Vector3:
    """Unit vector at polar angle theta from +z and azimuth phi."""
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def check_unit(n) -> Vector3:
    n = vec3(n)
    if abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
        raise PreconditionError(f"direction must be a unit vector, |n| = {np.linalg.norm(n)!r}")
    return n


@dataclass(frozen=True, eq=False)
class CollisionConfig:
    """One neutron-atom encounter: k_i, p_i, mass ratio mu = m/M, length b.

    ``mu = 0`` is accepted and is the fixed-center limit.
    """
    k_i: Vector3
    p_i: Vector3
    mu: float
    b: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "k_i", vec3(self.k_i))
        object.__setattr__(self, "p_i", vec3(self.p_i))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "b", complex(self.b))
        if self.mu < 0:
            raise PreconditionError("mu must be non-negative")
        if np.linalg.norm(self.k_i) == 0:
            raise PreconditionError("|k_i| must be positive")

    @classmethod
    def make(cls, k_i=(0.0, 0.0, 1.0), p_i=(0.0, 0.0, 0.0), mu=1.0, b=1.0):
        return cls(np.asarray(k_i, float), np.asarray(p_i, float), mu, b)

    @property
    def P(self) -> Vector3:
        return self.k_i + self.p_i

    @property
    def q_vec(self) -> Vector3:
        return self.k_i - self.mu * self.p_i

    @property
    def q(self) -> float:
        return float(np.linalg.norm(self.q_vec))

    @property
    def E_ik(self) -> float:
        return 0.5 * float(self.k_i @ self.k_i)

    @property
    def E_ip(self) -> float:
        return 0.5 * self.mu * float(self.p_i @ self.p_i)

    @property
    def E(self) -> float:
        return self.E_ik + self.E_ip


@dataclass(frozen=True)
class AngularBranch:
    k_f: float
    jacobian: float     # k_f^2 / (2 |(1+mu) k_f - mu n.P|); inf at tangency
    discriminant: float


@dataclass(frozen=True, eq=False)
class TransferState:
    kappa: Vector3
    omega: float
    E_R: float
    s: float


def discriminant(cfg: CollisionConfig, n) -> float:
    """mu^2 (P.n)^2 - mu^2 P^2 + q^2, written as q^2 - mu^2 |P x n|^2."""
    cross = np.cross(cfg.P, n)
    return cfg.q ** 2 - cfg.mu ** 2 * float(cross @ cross)


def final_momentum_roots(cfg: CollisionConfig, n) -> list[AngularBranch]:
    """Positive final-momentum magnitudes along ``n`` allowed by conservation.

    Both signs of the square root are kept whenever they give k_f > 0.
    Sorted by decreasing k_f.
    """
    n = check_unit(n)
    mu = cfg.mu
    q2 = cfg.q ** 2
    disc = discriminant(cfg, n)
    if disc < 0:
        if disc < -TANGENCY_TOL * q2:
            return []
        disc = 0.0
    Pn = float(cfg.P @ n)
    root = np.sqrt(disc)
    floor = ROOT_FLOOR * np.linalg.norm(cfg.k_i)
    candidates = [(mu * Pn + root) / (1 + mu)]
    if root > 0:
        candidates.append((mu * Pn - root) / (1 + mu))
    out = []
    for kf in candidates:
        if kf <= floor:
            continue
        jac = np.inf if root == 0 else kf * kf / (2.0 * root)
        out.append(AngularBranch(float(kf), float(jac), float(disc)))
    out.sort(key=lambda br: -br.k_f)
    return out


def roots_on_grid(cfg: CollisionConfig, nodes) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised roots for many unit directions (rows of ``nodes``).

    Returns (k_plus, k_minus, D) with NaN marking absent or discarded roots.
    Same clamping and flooring rules as :func:`final_momentum_roots`.
    """
    nodes = np.asarray(nodes, dtype=float)
    mu = cfg.mu
    q2 = cfg.q ** 2
    cross = np.cross(cfg.P[None, :], nodes)
    disc = q2 - mu * mu * np.einsum("ij,ij->i", cross, cross)
    disc = np.where((disc < 0) & (disc >= -TANGENCY_TOL * q2), 0.0, disc)
    ok = disc >= 0
    root = np.sqrt(np.where(ok, disc, 0.0))
    Pn = nodes @ cfg.P
    floor = ROOT_FLOOR * np.linalg.norm(cfg.k_i)
    kp = (mu * Pn + root) / (1 + mu)
    km = (mu * Pn - root) / (1 + mu)
    kp = np.where(ok & (kp > floor), kp, np.nan)
    km = np.where(ok & (km > floor) & (root > 0), km, np.nan)
    return kp, km, disc


def delta_argument(cfg: CollisionConfig, k_f_vec) -> float:
    """k_f^2 + mu (P - k_f)^2 - k_i^2 - mu p_i^2  (zero on shell)."""
    k_f_vec = vec3(k_f_vec)
    pf = cfg.P - k_f_vec
    return float(k_f_vec @ k_f_vec + cfg.mu * pf @ pf - cfg.k_i @ cfg.k_i
                 - cfg.mu * cfg.p_i @ cfg.p_i)


def transfer_state(k_i, k_f, mu: float) -> TransferState:
    k_i, k_f = vec3(k_i), vec3(k_f)
    kappa = k_i - k_f
    ki2, kf2 = float(k_i @ k_i), float(k_f @ k_f)
    return TransferState(kappa=kappa, omega=0.5 * (ki2 - kf2),
                         E_R=0.5 * mu * float(kappa @ kappa), s=0.5 * (ki2 + kf2))


def on_shell_check(cfg: CollisionConfig, k_f, p_f, tol: float) -> tuple[bool, bool]:
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    k_f, p_f = vec3(k_f), vec3(p_f)
    dp = cfg.k_i + cfg.p_i - k_f - p_f
    de = (k_f @ k_f + cfg.mu * p_f @ p_f - cfg.k_i @ cfg.k_i - cfg.mu * cfg.p_i @ cfg.p_i)
    return bool(np.linalg.norm(dp) <= tol), bool(abs(de) <= tol)
