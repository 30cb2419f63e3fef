"""Wave-packet families and their properties.

Families:
  gaussian        spreading Gaussian, normalised, solves the free equation
  dB_singular     exp(-s R)/R around the moving centre, normalised, sourced at R = 0
  dB_nonsingular  j0(s R) around the moving centre, not normalisable

Fourier convention: psi(r, t) = int a(p) exp(i p.r - i w(p) t) d^3p with no
2 pi prefactor, so the momentum-space norm carries the weight (2 pi)^3.
R always denotes |r - k t|, the distance to the moving centre.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, PreconditionError, SingularPointError
from .kinematics import vec3
from .numerics import (composite_gauss_legendre, finite_difference_residual,
                       orthonormal_frame, schrodinger_operator, sphere_quadrature)

FAMILIES = ("gaussian", "dB_singular", "dB_nonsingular")
ALIASES = {"gauss": "gaussian", "gaussian": "gaussian", "dB": "dB_singular",
           "dB_singular": "dB_singular", "db": "dB_singular", "ns": "dB_nonsingular",
           "dB_nonsingular": "dB_nonsingular"}
PLANCHEREL_WEIGHT = (2 * np.pi) ** 3


@dataclass(frozen=True, eq=False)
class PacketSpec:
    family: str
    s: float
    k: np.ndarray

    def __post_init__(self):
        fam = ALIASES.get(self.family)
        if fam is None:
            raise PreconditionError(f"unknown packet family {self.family!r}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "k", vec3(self.k))
        if not self.s > 0:
            raise PreconditionError("packet width s must be positive")

    @property
    def C(self) -> float:
        """Normalisation of the singular de Broglie packet, sqrt(s / 2 pi)."""
        return math.sqrt(self.s / (2 * math.pi))

    @property
    def omega(self) -> float:
        """Carrier frequency of the closed form."""
        k2 = float(self.k @ self.k)
        if self.family == "gaussian":
            return 0.5 * k2
        if self.family == "dB_singular":
            return 0.5 * (k2 - self.s ** 2)
        return 0.5 * (k2 + self.s ** 2)


def _centre_distance(spec: PacketSpec, r, t):
    r = np.asarray(r, float)
    return r, np.linalg.norm(r - spec.k * t, axis=-1)


def packet_value(spec: PacketSpec, r, t: float):
    """Closed-form packet at r ((3,) or (n, 3)) and time t."""
    r, R = _centre_distance(spec, r, t)
    s = spec.s
    carrier = np.exp(1j * (r @ spec.k - spec.omega * t))
    if spec.family == "gaussian":
        z = 1 + 1j * t * s * s
        return (s / (np.sqrt(np.pi) * z)) ** 1.5 * carrier * np.exp(-s * s * R * R / (2 * z))
    if spec.family == "dB_singular":
        if np.any(R == 0.0):
            raise SingularPointError("singular de Broglie packet evaluated at its centre")
        return spec.C * carrier * np.exp(-s * R) / R
    return carrier * np.sinc(s * R / np.pi)


def packet_density(spec: PacketSpec, R, t: float):
    """|psi|^2 as a function of the distance R to the moving centre."""
    R = np.asarray(R, float)
    s = spec.s
    if spec.family == "gaussian":
        g = 1 + (t * s * s) ** 2
        return (s * s / (np.pi * g)) ** 1.5 * np.exp(-s * s * R * R / g)
    if spec.family == "dB_singular":
        return spec.C ** 2 * np.exp(-2 * s * R) / (R * R)
    return np.sinc(s * R / np.pi) ** 2


def _radial_extent(spec: PacketSpec, t: float) -> float:
    if spec.family == "gaussian":
        return 12.0 * math.sqrt(1 + (t * spec.s ** 2) ** 2) / spec.s
    return 40.0 / spec.s


def packet_norm(spec: PacketSpec, t: float = 0.0, radial_order: int = 32,
                radial_panels: int = 8, angular_order: int = 8) -> float:
    """Integral of |psi|^2 in spherical coordinates about the moving centre.

    Returns ``math.inf`` for the nonsingular family.
    """
    if spec.family == "dB_nonsingular":
        return math.inf
    Rs, wr = composite_gauss_legendre([0.0, _radial_extent(spec, t)], radial_order, radial_panels)
    dirs, wa = sphere_quadrature(angular_order)
    centre = spec.k * t
    total = 0.0
    for R, w in zip(Rs, wr):
        pts = centre[None, :] + R * dirs
        vals = np.abs(packet_value(spec, pts, t)) ** 2
        total += w * R * R * np.sum(wa * vals)
    return float(total)


# --------------------------------------------------------------------------
# spectra
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ShellMeasure:
    """a(p) = delta((p - k)^2 - s^2) / (2 pi s): a measure on the sphere |p - k| = s."""
    centre: np.ndarray
    radius: float

    @property
    def weight(self) -> float:
        return 1.0 / (2 * np.pi * self.radius)

    def integrate(self, f, order: int = 16) -> complex:
        """int a(p) f(p) d^3p = (1/4 pi) int f(k + s n) dOmega."""
        n, w = sphere_quadrature(order)
        vals = f(self.centre[None, :] + self.radius * n)
        return complex(np.sum(w * vals) / (4 * np.pi))


def dispersion(spec: PacketSpec, p):
    """w(p) for the family's plane-wave components."""
    p = np.asarray(p, float)
    if spec.family == "dB_singular":
        k2 = float(spec.k @ spec.k)
        return 0.5 * (2 * p @ spec.k - k2 - spec.s ** 2)
    return 0.5 * np.sum(p * p, axis=-1)


def packet_fourier(spec: PacketSpec, p=None):
    """Fourier coefficient and frequency of the family.

    gaussian:      a = (2 pi s sqrt(pi))^{-3/2} exp(-(p-k)^2 / 2 s^2)
    dB_singular:   a = C (4 pi / (2 pi)^3) / ((p-k)^2 + s^2)
    dB_nonsingular returns (ShellMeasure, None): the spectrum is a shell.
    """
    if spec.family == "dB_nonsingular":
        return ShellMeasure(spec.k, spec.s), None
    p = np.asarray(p, float)
    d2 = np.sum((p - spec.k) ** 2, axis=-1)
    s = spec.s
    if spec.family == "gaussian":
        a = (1 / (2 * np.pi * s * np.sqrt(np.pi))) ** 1.5 * np.exp(-d2 / (2 * s * s))
    else:
        a = spec.C * 4 * np.pi / (2 * np.pi) ** 3 / (d2 + s * s)
    return a, dispersion(spec, p)


def fourier_synthesis(spec: PacketSpec, r, t: float, order: int = 96) -> complex:
    """Rebuild psi(r, t) from :func:`packet_fourier` by quadrature over p.

    gaussian: the integrand factorises over Cartesian components, each done
    by Gauss-Hermite.  dB_singular: w(p) is linear in p, so the phase splits
    into a carrier times exp(i (p-k).(r - k t)) and the remaining integral is
    a radial sine transform.  dB_nonsingular: shell quadrature.
    """
    r = vec3(r)
    k, s = spec.k, spec.s
    if spec.family == "gaussian":
        x, w = np.polynomial.hermite.hermgauss(order)
        out = 1.0 + 0j
        for j in range(3):
            p = k[j] + np.sqrt(2) * s * x           # exp(-(p-k)^2/2s^2) = exp(-x^2)
            f = np.exp(1j * (p * r[j] - 0.5 * p * p * t))
            out *= np.sqrt(2) * s * np.sum(w * f)
        return complex((1 / (2 * np.pi * s * np.sqrt(np.pi))) ** 1.5 * out)
    if spec.family == "dB_singular":
        Rvec = r - k * t
        R = float(np.linalg.norm(Rvec))
        if R == 0:
            raise SingularPointError("synthesis at the packet centre")
        carrier = np.exp(1j * (k @ r - dispersion(spec, k) * t))
        # int d^3q e^{iq.R}/(q^2+s^2) = (4 pi / R) int_0^inf q sin(qR)/(q^2+s^2) dq
        val, _ = integrate.quad(lambda q: q / (q * q + s * s), 0.0, np.inf, weight="sin",
                                wvar=R, limlst=200)
        a0 = spec.C * 4 * np.pi / (2 * np.pi) ** 3
        return complex(carrier * a0 * 4 * np.pi / R * val)
    shell, _ = packet_fourier(spec)
    return shell.integrate(lambda p: np.exp(1j * (p @ r - 0.5 * np.sum(p * p, axis=1) * t)),
                           order)


# --------------------------------------------------------------------------
# front areas
# --------------------------------------------------------------------------

def front_area(spec: PacketSpec, t: float = 0.0) -> float:
    """pi (1 + t^2 s^4) / s^2 for gaussian, pi / (3 s^2) for dB_singular."""
    s = spec.s
    if spec.family == "gaussian":
        return math.pi * (1 + t * t * s ** 4) / (s * s)
    if spec.family == "dB_singular":
        return math.pi / (3 * s * s)
    raise DomainError("the nonsingular packet is not normalisable: its front area is infinite")


def front_area_numeric(spec: PacketSpec, t: float = 0.0, radial_order: int = 32,
                       radial_panels: int = 8, angular_order: int = 16) -> float:
    """Integral of pi rho^2 |psi|^2 d^3r, rho measured from the line through the centre along k."""
    if spec.family == "dB_nonsingular":
        raise DomainError("the nonsingular packet is not normalisable: its front area is infinite")
    Rs, wr = composite_gauss_legendre([0.0, _radial_extent(spec, t)], radial_order, radial_panels)
    axis = spec.k if np.linalg.norm(spec.k) > 0 else np.array([0.0, 0.0, 1.0])
    dirs, wa = sphere_quadrature(angular_order, axis=axis)
    e3 = axis / np.linalg.norm(axis)
    sin2 = 1.0 - (dirs @ e3) ** 2
    centre = spec.k * t
    total = 0.0
    for R, w in zip(Rs, wr):
        vals = np.abs(packet_value(spec, centre[None, :] + R * dirs, t)) ** 2
        total += w * R ** 4 * np.sum(wa * sin2 * vals)
    return float(np.pi * total)


# --------------------------------------------------------------------------
# equations of motion
# --------------------------------------------------------------------------

def schrodinger_residual(spec: PacketSpec, grid_spacing: float, probe_points, t: float = 0.0) -> float:
    """Max |[i d/dt + Delta/2] psi| by central differences at the probes."""
    pts = np.atleast_2d(np.asarray(probe_points, float))
    if spec.family == "dB_singular":
        R = np.linalg.norm(pts - spec.k * t, axis=1)
        if np.any(R < 4 * grid_spacing):
            raise PreconditionError("probe within 4 grid spacings of the singular centre")
    return finite_difference_residual(lambda x, tt: packet_value(spec, x, tt),
                                      schrodinger_operator(3), grid_spacing, pts, t)


def genesis_transform(q: complex, k, r, t: float) -> complex:
    """Spherical wave of wavenumber q seen from a frame moving with velocity -k.

    exp(i k.r - i k^2 t/2 - i q^2 t/2) exp(i q |r - k t|) / |r - k t|.
    For q = i s this is the singular de Broglie packet without its constant C.
    """
    k, r = vec3(k), vec3(r)
    R = float(np.linalg.norm(r - k * t))
    if R == 0:
        raise SingularPointError("moving spherical wave is singular at its centre")
    q = complex(q)
    return complex(np.exp(1j * (k @ r - 0.5 * (k @ k) * t) - 0.5j * q * q * t + 1j * q * R) / R)


# --------------------------------------------------------------------------
# mirror reflection
# --------------------------------------------------------------------------

def reflection_coefficient(p_perp, u: float):
    """R = (p - sqrt(p^2 - u)) / (p + sqrt(p^2 - u)) with p = |p_perp|; |R| = 1 below u."""
    p = np.abs(np.asarray(p_perp, dtype=float))
    root = np.sqrt((p * p - u).astype(complex))
    return (p - root) / (p + root)


def reflection_deficit(spec: PacketSpec, u: float, normal=(0.0, 0.0, 1.0), order: int = 64,
                       panels: int = 4) -> float:
    """1 - reflected norm = int (2 pi)^3 |a(p)|^2 (1 - |R(p_perp)|^2) d^3p.

    Cylindrical coordinates about the line p_par = k_par: the normal
    component is written p_perp = +-sqrt(u + v^2), which removes the
    square-root edge at p_perp^2 = u, and the in-plane radius is integrated
    with a family-adapted map.
    """
    if spec.family not in ("gaussian", "dB_singular"):
        raise PreconditionError("reflection deficit needs a normalisable family")
    if u <= 0:
        raise PreconditionError("barrier strength u must be positive")
    nvec = vec3(normal)
    nvec = nvec / np.linalg.norm(nvec)
    k_perp = float(spec.k @ nvec)
    if k_perp * k_perp >= u:
        raise DomainError("supercritical incidence: k_perp^2 >= u")
    s = spec.s
    su = math.sqrt(u)
    x0, w0 = np.polynomial.legendre.leggauss(order)

    if spec.family == "dB_singular":
        # v = sqrt(u) tan(theta), theta in (0, pi/2)
        th = 0.25 * np.pi * (x0 + 1)
        wth = 0.25 * np.pi * w0
        v = su * np.tan(th)
        dv = su / np.cos(th) ** 2 * wth
    else:
        pmax = max(su, abs(k_perp)) + 14 * s
        vmax = math.sqrt(max(pmax * pmax - u, 0.0))
        v, dv = composite_gauss_legendre([0.0, vmax], order, panels)
    p = np.sqrt(u + v * v)
    one_minus = 4 * p * v / (p + v) ** 2         # 1 - |R|^2 above the barrier
    jac = v / p                                   # dp_perp / dv
    total = 0.0
    for sign in (1.0, -1.0):
        d = sign * p - k_perp
        if spec.family == "dB_singular":
            # int 2 pi rho drho / (d^2 + rho^2 + s^2)^2 with rho = sqrt(A) tan(phi)
            A = d * d + s * s
            ph, wph = 0.25 * np.pi * (x0 + 1), 0.25 * np.pi * w0
            radial = np.sum(wph * np.sin(ph) * np.cos(ph)) * 2 * np.pi / A
            amp2 = (spec.C * 4 * np.pi / (2 * np.pi) ** 3) ** 2 * radial
        else:
            rho, wrho = composite_gauss_legendre([0.0, 10 * s], order, 1)
            radial = np.sum(wrho[None, :] * 2 * np.pi * rho[None, :]
                            * np.exp(-(rho[None, :] ** 2) / (s * s)), axis=1)
            amp2 = (1 / (2 * np.pi * s * np.sqrt(np.pi))) ** 3 * np.exp(-d * d / (s * s)) * radial
        total += np.sum(dv * jac * one_minus * amp2)
    return float(PLANCHEREL_WEIGHT * total)


# --------------------------------------------------------------------------
# fixed-center packet scattering
# --------------------------------------------------------------------------

def rotation_between(a, b) -> np.ndarray:
    """Rotation matrix taking unit vector a to unit vector b (Rodrigues)."""
    a = np.asarray(a, float) / np.linalg.norm(a)
    b = np.asarray(b, float) / np.linalg.norm(b)
    c = float(a @ b)
    if c < -0.5:
        # 1/(1+c) is ill-conditioned near antiparallel: go through a vector
        # m perpendicular to a with m.b >= 0 instead
        m = b - c * a
        if np.linalg.norm(m) < 1e-8:
            m, _, _ = orthonormal_frame(a)
        return rotation_between(m, b) @ rotation_between(a, m)
    v = np.cross(a, b)
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1 + c)


@dataclass(frozen=True, eq=False)
class ScatteredPacket:
    direction: np.ndarray
    amplitude: complex          # F'(k, Omega) times the translation phase
    shift: np.ndarray           # rho_Omega - rho, the displacement of the outgoing packet
    weight: float


def scatter_fixed_center_detail(spec: PacketSpec, b: complex, rho, directions) -> list[ScatteredPacket]:
    """Outgoing packets for each direction with their explicit translation phases.

    Every outgoing packet is the incident one rotated to k_Omega and displaced
    by rho_Omega - rho.  Its amplitude is F' = b|k|/2 pi times
    exp(i k.rho - i k_Omega.rho), which has unit modulus.
    """
    if spec.family not in ("gaussian", "dB_singular"):
        raise PreconditionError("fixed-center scattering needs a normalisable family")
    rho = vec3(rho)
    kn = float(np.linalg.norm(spec.k))
    if kn == 0:
        raise PreconditionError("packet momentum must be nonzero")
    khat = spec.k / kn
    if abs(rho @ khat) > 1e-12 * max(1.0, float(np.linalg.norm(rho))):
        raise PreconditionError("impact parameter must be perpendicular to k")
    F = b * kn / (2 * np.pi)
    out = []
    for d in directions:
        d = vec3(d)
        d = d / np.linalg.norm(d)
        rot = rotation_between(khat, d)
        rho_rot = rot @ rho
        phase = np.exp(1j * (spec.k @ rho - kn * (d @ rho)))
        amp = F * phase
        out.append(ScatteredPacket(direction=d, amplitude=complex(amp), shift=rho_rot - rho,
                                   weight=abs(F) ** 2 * abs(phase) ** 2))
    return out


def scatter_fixed_center(spec: PacketSpec, b: complex, rho, directions) -> np.ndarray:
    """Per-direction weights |F'(k, Omega)|^2 of the scattered packet."""
    return np.array([sp.weight for sp in scatter_fixed_center_detail(spec, b, rho, directions)])
