"""Angular quantization of the scattering sphere.

The CM sphere is cut into N equal-area cells.  Because the CM amplitude is
isotropic, equal area means equal amplitude per cell.  Cells are carried to
the laboratory frame by the CM to LF direction map: each keeps its amplitude,
and its solid angle becomes that of the image cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cmpath import cm_amplitude_density, map_cm_to_lf
from .errors import DegenerateEncounterError, PreconditionError
from .kinematics import CollisionConfig, check_unit

MIN_ELEMENTS = 8


@dataclass(frozen=True, eq=False)
class QuantizedSphere:
    directions: np.ndarray      # (N, 3) unit vectors
    d_omega: np.ndarray         # (N,) cell solid angles
    d_f: np.ndarray             # (N,) complex amplitude elements
    frame: str                  # "CM" or "LF"
    config: CollisionConfig
    flags: dict = field(default_factory=dict)   # element index -> diagnostic text

    def __len__(self) -> int:
        return len(self.d_f)


def zonal_partition(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Equal-area partition of the unit sphere into N cells.

    Two polar caps of area 4 pi/N plus collars whose cell counts follow the
    collar areas.  Collar boundaries are placed at cos(theta) = 1 - 2 c/N,
    c being the number of cells above the boundary, so every cell has area
    4 pi/N exactly.  Returns cell centres and areas.
    """
    if N < MIN_ELEMENTS:
        raise PreconditionError(f"need at least {MIN_ELEMENTS} elements, got {N}")
    area = 4 * np.pi / N
    theta_cap = np.arccos(1 - 2.0 / N)
    n_collars = max(1, int(round((np.pi - 2 * theta_cap) / np.sqrt(area))))
    edges = np.linspace(theta_cap, np.pi - theta_cap, n_collars + 1)
    ideal = (np.cos(edges[:-1]) - np.cos(edges[1:])) * 2 * np.pi / area
    # cumulative rounding keeps the total at N - 2 cells
    cum = np.round(np.cumsum(ideal) * (N - 2) / np.sum(ideal)).astype(int)
    counts = np.diff(np.concatenate([[0], cum]))
    dirs = [np.array([0.0, 0.0, 1.0])]
    above = 1
    for m in counts:
        if m <= 0:
            continue
        c_top = 1 - 2.0 * above / N
        c_bot = 1 - 2.0 * (above + m) / N
        c = 0.5 * (c_top + c_bot)
        st = np.sqrt(max(0.0, 1 - c * c))
        phi = 2 * np.pi * (np.arange(m) + 0.5) / m
        dirs.extend(np.stack([st * np.cos(phi), st * np.sin(phi), np.full(m, c)], axis=1))
        above += m
    dirs.append(np.array([0.0, 0.0, -1.0]))
    dirs = np.asarray(dirs)
    return dirs, np.full(len(dirs), area)


def quantize_cm(cfg: CollisionConfig, N: int) -> QuantizedSphere:
    """N equal cells on the CM sphere, each with d_f = F'_c 4 pi / N."""
    dirs, d_omega = zonal_partition(N)
    F = cm_amplitude_density(cfg)
    return QuantizedSphere(directions=dirs, d_omega=d_omega,
                           d_f=np.full(len(dirs), F * 4 * np.pi / N, dtype=complex),
                           frame="CM", config=cfg)


def transport_to_lf(qs: QuantizedSphere) -> QuantizedSphere:
    """Carry every cell to the laboratory frame.

    Directions go through the CM to LF map and amplitudes are copied.  The
    image solid angle is d_omega_c * q sqrt(D) / ((1+mu)^2 k_f^2), where
    sqrt(D) = q |n . omega_c|.  Cells whose image momentum vanishes keep
    their CM direction, get a NaN solid angle and are listed in ``flags``.
    """
    if qs.frame != "CM":
        raise PreconditionError("transport_to_lf expects a CM-frame sphere")
    cfg = qs.config
    q, mu = cfg.q, cfg.mu
    dirs = np.empty_like(qs.directions)
    d_omega = np.empty_like(qs.d_omega)
    flags = {}
    for j, (wc, dom) in enumerate(zip(qs.directions, qs.d_omega)):
        try:
            n, kf = map_cm_to_lf(cfg, wc)
        except DegenerateEncounterError as exc:
            dirs[j] = wc
            d_omega[j] = np.nan
            flags[j] = f"degenerate mapping: {exc}"
            continue
        dirs[j] = n
        d_omega[j] = dom * q * q * abs(n @ wc) / ((1 + mu) ** 2 * kf * kf)
    return replace(qs, directions=dirs, d_omega=d_omega, d_f=qs.d_f.copy(), frame="LF",
                   flags=flags)


def _in_cone(directions, axis, half_angle):
    if not 0 < half_angle <= np.pi:
        raise PreconditionError("half_angle must lie in (0, pi]")
    axis = check_unit(axis)
    return directions @ axis >= np.cos(half_angle) - 1e-15


def window_probability(qs: QuantizedSphere, axis, half_angle: float) -> float:
    """Sum of |d_f|^2 over cells whose direction lies inside the cone."""
    mask = _in_cone(qs.directions, axis, half_angle)
    return float(np.sum(np.abs(qs.d_f[mask]) ** 2))


def square_order_invariance(cfg: CollisionConfig, N: int, axis, half_angle: float) -> tuple[float, float]:
    """Window probability of an LF cone, squaring before and after transport.

    before: square the CM elements, then select cells by their LF image.
    after:  transport the elements, then select and square in the LF frame.
    """
    cm = quantize_cm(cfg, N)
    lf = transport_to_lf(cm)
    mask = _in_cone(lf.directions, axis, half_angle)
    squares_cm = np.abs(cm.d_f) ** 2
    before = float(np.sum(squares_cm[mask]))
    after = window_probability(lf, axis, half_angle)
    return before, after


def angular_quantum(A: float, q: float, mu: float) -> float:
    """delta Omega = (2 pi (1+mu))^2 / (q^2 A)."""
    if A <= 0 or q <= 0:
        raise PreconditionError("A and q must be positive")
    return (2 * np.pi * (1 + mu)) ** 2 / (q * q * A)


def quantized_cross_section_density(cfg: CollisionConfig, A: float) -> float:
    """|b q / 2 pi (1+mu)^2|^2 A delta Omega; equal to |b|^2/(1+mu)^2 for every A."""
    if A <= 0:
        raise PreconditionError("A must be positive")
    return abs(cm_amplitude_density(cfg)) ** 2 * A * angular_quantum(A, cfg.q, cfg.mu)
