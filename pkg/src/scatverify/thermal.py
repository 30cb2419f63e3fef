"""Maxwellian target averaging for a monatomic gas.

The neutron moves along +z with momentum k_i.  Atom momenta follow the
Maxwell law with per-component variance T/mu, so the relative momentum
q = k_i - mu p has per-component spread sqrt(mu T).

Two front-area laws are supported.  The dynamic law A = (2 pi (1+mu))^2/q^2
gives the textbook gas kernel; a constant A gives the contrasting T^{3/2}
growth at low k_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (AccuracyError, DegenerateEncounterError, DomainError,
                     PreconditionError, SingularPointError)
from .kinematics import CollisionConfig, vec3
from .numerics import (composite_gauss_legendre, nascent_delta, richardson)


@dataclass(frozen=True)
class GasSpec:
    T: float
    mu: float
    N0: float = 1.0
    b: complex = 1.0

    def __post_init__(self):
        if not self.T > 0:
            raise PreconditionError("gas temperature must be positive")
        if not self.mu > 0:
            raise PreconditionError("gas mass ratio mu must be positive")
        if self.N0 < 0:
            raise PreconditionError("number density must be non-negative")


@dataclass(frozen=True)
class GasGrid:
    """Quadrature controls for the gas totals.

    The k_f integral is done in spherical coordinates centred on k_i (so the
    radial variable is kappa).  ``cap_fractions`` are the radii, as fractions
    of the largest kappa, of the excluded forward cap; the three results are
    extrapolated to zero cap.
    """
    kappa_order: int = 24
    kappa_panels: int = 6
    u_order: int = 64
    width_sigmas: float = 10.0
    cap_fractions: tuple = (1e-2, 5e-3, 2.5e-3)
    rtol: float = 1e-5


def maxwell_pdf(p, T: float, mu: float):
    """(mu / 2 pi T)^{3/2} exp(-mu p^2 / 2T); ``p`` may be (3,) or (n, 3)."""
    if T <= 0 or mu <= 0:
        raise PreconditionError("maxwell_pdf needs T > 0 and mu > 0")
    p = np.asarray(p, dtype=float)
    p2 = np.sum(p * p, axis=-1)
    return (mu / (2 * np.pi * T)) ** 1.5 * np.exp(-mu * p2 / (2 * T))


def maxwell_sample(T: float, mu: float, rng: np.random.Generator, size: int | None = None):
    """Independent normal components with variance T/mu."""
    if T <= 0 or mu <= 0:
        raise PreconditionError("maxwell_sample needs T > 0 and mu > 0")
    shape = (3,) if size is None else (int(size), 3)
    return rng.normal(0.0, np.sqrt(T / mu), size=shape)


def front_area(cfg: CollisionConfig) -> float:
    """A = (2 pi (1+mu))^2 / q^2."""
    q = cfg.q
    if q == 0:
        raise DegenerateEncounterError("front area undefined for q = 0")
    return (2 * np.pi * (1 + cfg.mu)) ** 2 / q ** 2


def _kinematics(k_i: float, k_f_vec, mu: float):
    k_f_vec = vec3(k_f_vec)
    kappa_vec = np.array([0.0, 0.0, k_i]) - k_f_vec
    kappa = float(np.linalg.norm(kappa_vec))
    omega = 0.5 * (k_i * k_i - float(k_f_vec @ k_f_vec))
    return kappa_vec, kappa, omega, 0.5 * mu * kappa * kappa


def _transfer_kernel(kappa: float, omega: float, E_R: float, gas: GasSpec) -> float:
    return (np.exp(-(E_R - omega) ** 2 / (4 * E_R * gas.T))
            / (kappa * np.sqrt(2 * np.pi * gas.mu * gas.T)))


def gas_double_differential(k_i: float, k_f_vec, gas: GasSpec) -> float:
    """d sigma / d^3k_f = |b|^2 exp(-(E_R - w)^2 / 4 E_R T) / (k_i kappa sqrt(2 pi mu T))."""
    if k_i <= 0:
        raise PreconditionError("k_i must be positive")
    _, kappa, omega, E_R = _kinematics(k_i, k_f_vec, gas.mu)
    if kappa == 0.0:
        raise SingularPointError("gas kernel is singular on the forward line kappa = 0")
    return abs(gas.b) ** 2 / k_i * _transfer_kernel(kappa, omega, E_R, gas)


def gas_double_differential_constant_area(k_i: float, k_f_vec, gas: GasSpec,
                                          A_const: float) -> float:
    """Same average with a fixed front area.

    The energy delta fixes the atom momentum along kappa-hat at
    p_par = (w - E_R)/(mu kappa); the transverse Maxwell components add
    2 mu T to the mean of q^2.
    """
    if A_const <= 0:
        raise PreconditionError("A_const must be positive")
    if k_i <= 0:
        raise PreconditionError("k_i must be positive")
    kappa_vec, kappa, omega, E_R = _kinematics(k_i, k_f_vec, gas.mu)
    if kappa == 0.0:
        raise SingularPointError("gas kernel is singular on the forward line kappa = 0")
    p_par = (omega - E_R) / (gas.mu * kappa)
    a = np.array([0.0, 0.0, k_i]) - gas.mu * p_par * kappa_vec / kappa
    q2 = float(a @ a) + 2 * gas.mu * gas.T
    pref = A_const * abs(gas.b) ** 2 / (4 * np.pi ** 2 * (1 + gas.mu) ** 2)
    return pref * q2 * _transfer_kernel(kappa, omega, E_R, gas) / k_i


def _gas_total(k_i: float, gas: GasSpec, grid: GasGrid, constant_area: bool) -> tuple[float, float]:
    """Quadrature of the gas kernel over d^3k_f, returning (value, error estimate).

    With kappa = k_i - k_f in spherical coordinates about +z and
    u = k_i cos(theta_kappa) - (1+mu) kappa/2, the exponent becomes
    -u^2/(2 mu T) and the Jacobian kappa^2 / kappa leaves an integrand
    proportional to kappa.
    """
    if k_i <= 0:
        raise PreconditionError("k_i must be positive")
    mu, T = gas.mu, gas.T
    sig = np.sqrt(mu * T)
    L = grid.width_sigmas * sig
    kmax = 2 * (k_i + L) / (1 + mu)
    w = 2 * sig / (1 + mu)
    kc = 2 * k_i / (1 + mu)
    inner = [x for x in (kc - grid.width_sigmas * w, kc, kc + grid.width_sigmas * w)
             if 0 < x < kmax]
    ux, uw = np.polynomial.legendre.leggauss(grid.u_order)

    def integrate_from(eps: float) -> float:
        breaks = [eps] + [x for x in inner if x > eps] + [kmax]
        kap, kw = composite_gauss_legendre(breaks, grid.kappa_order, grid.kappa_panels)
        lo = np.maximum(-k_i - 0.5 * (1 + mu) * kap, -L)
        hi = np.minimum(k_i - 0.5 * (1 + mu) * kap, L)
        half = np.clip(0.5 * (hi - lo), 0.0, None)
        u = 0.5 * (hi + lo)[:, None] + half[:, None] * ux[None, :]
        g = np.exp(-u * u / (2 * mu * T))
        if constant_area:
            # q^2 averaged over the transverse Maxwell components
            c = (u + 0.5 * (1 + mu) * kap[:, None]) / k_i
            g = g * (k_i * k_i - 2 * k_i * u * c + u * u + 2 * mu * T)
        inner_int = np.sum(g * uw[None, :], axis=1) * half
        # 2 pi azimuth, dc = du / k_i, kernel kappa / (k_i sqrt(2 pi mu T))
        return float(np.sum(kw * kap * inner_int)) * 2 * np.pi / (k_i * k_i * np.sqrt(2 * np.pi * mu * T))

    eps = np.asarray(grid.cap_fractions, float) * kmax
    vals = np.array([integrate_from(e) for e in eps])
    value, err = richardson(eps ** 2, vals)
    if not np.isfinite(value) or err > grid.rtol * abs(value):
        raise AccuracyError("forward-cap extrapolation did not converge",
                            {"caps": eps.tolist(), "values": vals.tolist(), "error": err})
    return float(value), float(err)


def gas_total_cross_section(k_i: float, gas: GasSpec, grid: GasGrid | None = None) -> float:
    """Total gas cross section with the dynamic front area."""
    value, _ = _gas_total(k_i, gas, grid or GasGrid(), constant_area=False)
    return abs(gas.b) ** 2 * value


def gas_total_constant_area(k_i: float, gas: GasSpec, A_const: float,
                            grid: GasGrid | None = None) -> float:
    """Total gas cross section with a fixed front area A_const."""
    if A_const <= 0:
        raise PreconditionError("A_const must be positive")
    value, _ = _gas_total(k_i, gas, grid or GasGrid(), constant_area=True)
    return A_const * abs(gas.b) ** 2 / (4 * np.pi ** 2 * (1 + gas.mu) ** 2) * value


def relative_speed_moment(k_i: float, T: float, mu: float, order: int) -> float:
    """<q^order> over the Maxwell law, by 1D quadrature of the noncentral-chi density.

    q = |k_i - mu p| has density q/(k s sqrt(2 pi)) [e^{-(q-k)^2/2s^2} - e^{-(q+k)^2/2s^2}]
    with s^2 = mu T.
    """
    s = np.sqrt(mu * T)
    k = float(k_i)

    def pdf(q):
        return q / (k * s * np.sqrt(2 * np.pi)) * (
            np.exp(-(q - k) ** 2 / (2 * s * s)) - np.exp(-(q + k) ** 2 / (2 * s * s)))

    top = k + 12 * s
    val, _ = integrate.quad(lambda q: q ** order * pdf(q), 0.0, top, points=[k], limit=200,
                            epsabs=0.0, epsrel=1e-12)
    return float(val)


def calibration_area(k_i: float, gas: GasSpec) -> float:
    """Constant front area that reproduces the dynamic-area total at this temperature.

    It is A(q_bar) with q_bar^2 = <q^3>/<q>.
    """
    q3 = relative_speed_moment(k_i, gas.T, gas.mu, 3)
    q1 = relative_speed_moment(k_i, gas.T, gas.mu, 1)
    return (2 * np.pi * (1 + gas.mu)) ** 2 * q1 / q3


def rest_total_cross_section(mu: float, b: complex) -> float:
    """4 pi |b / (1+mu)|^2."""
    if mu < 0:
        raise PreconditionError("mu must be non-negative")
    return 4 * np.pi * abs(b / (1 + mu)) ** 2


def q_factor(mu: float) -> float:
    """(8/3) mu^2 + ((1-mu^2)^{3/2}/mu) arctan(mu/sqrt(1-mu^2)) on [0, 1]."""
    if mu < 0:
        raise DomainError("q_factor is defined for 0 <= mu <= 1")
    if mu > 1:
        raise DomainError("q_factor is undefined for mu > 1 (sqrt(1 - mu^2) is imaginary)")
    if mu == 0:
        return 1.0
    if mu == 1:
        return 8.0 / 3.0
    r = np.sqrt(1 - mu * mu)
    return 8.0 / 3.0 * mu * mu + r ** 3 / mu * np.arctan(mu / r)


def collision_rate(cfg: CollisionConfig, N0: float, sigma: float) -> float:
    """nu = q N0 sigma."""
    if N0 < 0 or sigma < 0:
        raise PreconditionError("N0 and sigma must be non-negative")
    return cfg.q * N0 * sigma


@dataclass(frozen=True)
class SampledProbability:
    W: float
    sigma: float
    stderr: float       # standard error of sigma
    n_samples: int


def sample_scattering_probability(k_i: float, d: float, gas: GasSpec, rng: np.random.Generator,
                                  n_samples: int = 200_000) -> SampledProbability:
    """Monte-Carlo W = N0 (d/k_i) <q sigma(p)> with sigma(p) the rest-frame total.

    With the dynamic front area each encounter contributes 4 pi |b/(1+mu)|^2
    regardless of p, so only the relative speed is sampled.
    """
    if d <= 0:
        raise PreconditionError("sample thickness d must be positive")
    if k_i <= 0:
        raise PreconditionError("k_i must be positive")
    if n_samples < 2:
        raise PreconditionError("need at least two samples")
    p = maxwell_sample(gas.T, gas.mu, rng, n_samples)
    q = np.linalg.norm(np.array([0.0, 0.0, k_i])[None, :] - gas.mu * p, axis=1)
    per = q * rest_total_cross_section(gas.mu, gas.b) / k_i
    sigma = float(np.mean(per))
    stderr = float(np.std(per, ddof=1) / np.sqrt(n_samples))
    if not (np.isfinite(sigma) and np.isfinite(stderr)):
        raise AccuracyError("Monte-Carlo estimate is not finite", {"n_samples": n_samples})
    return SampledProbability(W=gas.N0 * d * sigma, sigma=sigma, stderr=stderr,
                              n_samples=n_samples)


def sampled_double_differential(k_i: float, k_f_vec, gas: GasSpec, momenta,
                                epsilons) -> tuple[float, float]:
    """Sampling oracle for the gas kernel at one (k_i, k_f).

    Each atom momentum contributes A q |b / 2 pi (1+mu)|^2 q delta(E_R - w + mu p.kappa)/k_i
    with the delta replaced by Gaussians of the given widths.  The per-sample
    values for the widths are combined by Richardson weights in eps^2 before
    averaging, so the returned standard error covers the combined estimator.
    """
    momenta = np.asarray(momenta, float)
    n = len(momenta)
    kappa_vec, kappa, omega, E_R = _kinematics(k_i, k_f_vec, gas.mu)
    eps = np.asarray(epsilons, float)
    x = E_R - omega + gas.mu * momenta @ kappa_vec
    # samples beyond 9 widths contribute below exp(-81) and are skipped
    live = np.flatnonzero(np.abs(x) < 9.0 * eps.max())
    x = x[live]
    q_vec = np.array([0.0, 0.0, k_i])[None, :] - gas.mu * momenta[live]
    q2 = np.sum(q_vec * q_vec, axis=1)
    area = (2 * np.pi * (1 + gas.mu)) ** 2 / q2
    weight = area * q2 * abs(gas.b / (2 * np.pi * (1 + gas.mu))) ** 2 / k_i
    h = eps ** 2
    coeffs = np.array([np.prod([h[j] / (h[j] - h[i]) for j in range(len(h)) if j != i])
                       for i in range(len(h))])
    per = weight * sum(c * nascent_delta(x, e) for c, e in zip(coeffs, eps))
    mean = float(np.sum(per)) / n
    var = (float(np.sum(per * per)) / n - mean * mean) * n / (n - 1)
    return mean, float(np.sqrt(max(var, 0.0) / n))


@dataclass(frozen=True, eq=False)
class KernelGridCheck:
    omega: np.ndarray
    kappa: np.ndarray
    closed: np.ndarray
    mc: np.ndarray
    stderr: np.ndarray
    z: np.ndarray

    def fraction_within(self, zmax: float) -> float:
        return float(np.mean(np.abs(self.z) <= zmax))


def kernel_grid(k_i: float, gas: GasSpec, n: int, width: float = 2.5):
    """An n x n grid of (omega, kappa) cells with matching k_f vectors.

    kappa spans (0.15, 1.85) k_i.  For each kappa, omega spans the kinematic
    range intersected with E_R +- width sqrt(2 E_R T), the bulk of the
    Gaussian recoil line.  k_f lies in the x-z plane.
    """
    if n < 2:
        raise PreconditionError("grid needs at least 2 points per axis")
    out = []
    for kappa in np.linspace(0.15, 1.85, n) * k_i:
        E_R = 0.5 * gas.mu * kappa * kappa
        lo = 0.5 * (k_i ** 2 - (k_i + kappa) ** 2)
        hi = 0.5 * (k_i ** 2 - (k_i - kappa) ** 2)
        spread = width * np.sqrt(2 * E_R * gas.T)
        a, b = max(lo, E_R - spread), min(hi, E_R + spread)
        pad = 1e-3 * (b - a)
        for omega in np.linspace(a + pad, b - pad, n):
            kf = np.sqrt(k_i * k_i - 2 * omega)
            c = np.clip((k_i * k_i + kf * kf - kappa * kappa) / (2 * k_i * kf), -1.0, 1.0)
            out.append((omega, kappa, np.array([kf * np.sqrt(1 - c * c), 0.0, kf * c])))
    return out


def gas_kernel_grid_check(k_i: float, gas: GasSpec, n: int, n_samples: int,
                          rng: np.random.Generator, eps_fraction: float = 0.08,
                          eps_factors=(1.0, 0.75, 0.5)) -> KernelGridCheck:
    """Closed-form gas kernel against the sampling oracle on :func:`kernel_grid`.

    One set of Maxwell samples is shared by all cells.  The nascent-delta
    widths scale with the spread kappa sqrt(mu T) of mu p.kappa.
    """
    momenta = maxwell_sample(gas.T, gas.mu, rng, n_samples)
    rows = []
    for omega, kappa, kf in kernel_grid(k_i, gas, n):
        closed = gas_double_differential(k_i, kf, gas)
        base = eps_fraction * kappa * np.sqrt(gas.mu * gas.T)
        mc, se = sampled_double_differential(k_i, kf, gas, momenta,
                                             [base * f for f in eps_factors])
        rows.append((omega, kappa, closed, mc, se, (mc - closed) / se if se > 0 else np.inf))
    cols = [np.array(c) for c in zip(*rows)]
    return KernelGridCheck(*cols)
