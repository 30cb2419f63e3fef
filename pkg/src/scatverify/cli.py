"""Command-line front end.

Every subcommand writes one table, either as CSV (a '# {json metadata}'
line, a header row, then rows at 17 significant digits) or as a JSON object
with "meta" and "rows".  Exit codes: 0 ok, 2 usage, 3 singular
configuration, 4 numerical accuracy, 5 nothing found.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np
import scipy

from . import __version__
from .cmpath import backmapped_lf_density
from .errors import (AccuracyError, DegenerateEncounterError, DomainError, NotFoundError,
                     PreconditionError, SingularJacobianError, SingularPointError)
from .kinematics import CollisionConfig, direction, final_momentum_roots
from .lfpath import divergence_probe, lf_probability_density, tangent_boundary_pair
from .numerics import orthonormal_frame, powerlaw_fit, seeded_stream
from .quantization import (angular_quantum, quantize_cm, quantized_cross_section_density,
                           square_order_invariance, transport_to_lf, window_probability)
from .spherical import evanescent_tail_bound, hemisphere_decomposition
from .thermal import (GasSpec, calibration_area, front_area, gas_kernel_grid_check,
                      gas_total_constant_area, gas_total_cross_section,
                      rest_total_cross_section)
from . import wavepackets as wp

DEFAULT_SEED = 0x5EEDCAFE

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_ACCURACY, EXIT_NOT_FOUND = 0, 2, 3, 4, 5


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "infinite" if v > 0 else "-infinite"
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_json_value(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def _csv_value(v):
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def render(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": _json_value(meta), "rows": _json_value(rows)},
                          indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(_json_value(meta), sort_keys=True) + "\n")
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_value(row.get(c, "")) for c in columns])
    return buf.getvalue()


def _emit(args, rows, extra_meta=None):
    flags = {k: v for k, v in vars(args).items() if k not in ("func", "out", "format", "command")}
    meta = {"command": args.command, "flags": flags, "seed": getattr(args, "seed", DEFAULT_SEED),
            "versions": {"scatverify": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__}}
    if extra_meta:
        meta.update(extra_meta)
    text = render(rows, meta, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _p_i(args):
    if args.pi is not None:
        return (0.0, 0.0, args.pi)
    return (args.pix, args.piy, args.piz)


def _ambiguity_rows(cfg, thetas, kind):
    rows = []
    for th in thetas:
        n = direction(np.radians(th))
        branches = final_momentum_roots(cfg, n)
        if not branches:
            rows.append({"kind": kind, "theta_deg": th, "branch": 0, "k_f": math.nan,
                         "dw_lf": 0.0, "dw_cm": 0.0, "ratio": math.nan})
            continue
        for j, br in enumerate(branches):
            if br.discriminant == 0.0:
                raise SingularJacobianError("tangent root on the scan", direction=n)
            lf = abs(cfg.b / (2 * np.pi)) ** 2 * br.k_f ** 4 / br.discriminant
            cm = (abs(cfg.b / (2 * np.pi * (1 + cfg.mu))) ** 2 * br.k_f ** 2 * cfg.q
                  / np.sqrt(br.discriminant))
            rows.append({"kind": kind, "theta_deg": th, "branch": j + 1, "k_f": br.k_f,
                         "dw_lf": lf, "dw_cm": cm, "ratio": lf / cm if cm > 0 else math.nan})
    return rows


def cmd_ambiguity(args):
    cfg = CollisionConfig.make(k_i=(0.0, 0.0, args.ki), p_i=_p_i(args), mu=args.mu, b=args.b)
    if args.theta is not None:
        thetas = [float(t) for t in args.theta]
    else:
        thetas = list(np.linspace(0.0, 180.0, args.theta_steps + 1))
    rows = _ambiguity_rows(cfg, thetas, "scan")
    sanity = CollisionConfig.make(k_i=(0.0, 0.0, args.ki), p_i=_p_i(args), mu=1e-8, b=args.b)
    rows += _ambiguity_rows(sanity, [thetas[0]] if thetas else [0.0], "fixed_center_sanity")
    # both totals are kept as cross-checks of the per-branch sums
    for row in rows:
        if row["kind"] == "scan" and row["branch"] == 1:
            n = direction(np.radians(row["theta_deg"]))
            row["dw_lf_total"] = lf_probability_density(cfg, n)
            row["dw_cm_total"] = backmapped_lf_density(cfg, n)
    _emit(args, rows)


def cmd_gas_xs(args):
    gas = GasSpec(T=args.T, mu=args.mu, b=args.b)
    rng = seeded_stream(args.seed, 0)
    check = gas_kernel_grid_check(args.ki, gas, args.grid, args.samples, rng)
    rows = [{"kind": "cell", "omega": o, "kappa": k, "closed": c, "mc": m, "stderr": e, "z": z}
            for o, k, c, m, e, z in zip(check.omega, check.kappa, check.closed, check.mc,
                                        check.stderr, check.z)]
    if not np.all(np.isfinite(check.mc)):
        raise AccuracyError("Monte-Carlo kernel estimate is not finite")
    total = gas_total_cross_section(args.ki, gas)
    rows.append({"kind": "total", "closed": total,
                 "rest_total": rest_total_cross_section(args.mu, args.b)})
    _emit(args, rows, {"fraction_abs_z_le_3": check.fraction_within(3.0)})


def cmd_temp_scan(args):
    if not args.Tmin < args.Tmax:
        raise PreconditionError("--Tmin must be below --Tmax")
    Ts = np.geomspace(args.Tmin, args.Tmax, args.points) if args.points > 1 else np.array([args.Tmin])
    if args.area_mode == "const":
        T0 = math.sqrt(args.Tmin * args.Tmax)
        A = calibration_area(args.ki, GasSpec(T=T0, mu=args.mu, b=args.b))
        sig = [gas_total_constant_area(args.ki, GasSpec(T=T, mu=args.mu, b=args.b), A) for T in Ts]
    else:
        A = None
        sig = [gas_total_cross_section(args.ki, GasSpec(T=T, mu=args.mu, b=args.b)) for T in Ts]
    try:
        expo, err = powerlaw_fit(Ts, sig)
    except (PreconditionError, DomainError) as exc:
        raise AccuracyError(f"power-law fit failed: {exc}") from exc
    rows = [{"T": T, "sigma": s} for T, s in zip(Ts, sig)]
    _emit(args, rows, {"exponent": expo, "exponent_stderr": err, "A_const": A})


def _packet_spec(args):
    return wp.PacketSpec(args.family, args.s, tuple(args.k))


def cmd_packet(args):
    spec = _packet_spec(args)
    rows = []
    extra = {}
    if args.what == "value":
        r = np.asarray(args.r, float)
        v = wp.packet_value(spec, r, args.t)
        syn = wp.fourier_synthesis(spec, r, args.t)
        rows.append({"t": args.t, "re": v.real, "im": v.imag, "synth_re": syn.real,
                     "synth_im": syn.imag})
    elif args.what == "norm":
        rows.append({"t": args.t, "norm": wp.packet_norm(spec, args.t),
                     "closed": math.inf if spec.family == "dB_nonsingular" else 1.0})
    elif args.what == "area":
        rows.append({"t": args.t, "numeric": wp.front_area_numeric(spec, args.t),
                     "closed": wp.front_area(spec, args.t)})
    elif args.what == "residual":
        rng = seeded_stream(args.seed, 1)
        centre = spec.k * args.t
        offs = rng.normal(size=(16, 3))
        offs = offs / np.linalg.norm(offs, axis=1)[:, None] * rng.uniform(1.0, 3.0, 16)[:, None] / spec.s
        pts = centre + offs
        h0 = args.spacing
        prev = None
        for h in (h0, h0 / 2, h0 / 4):
            res = wp.schrodinger_residual(spec, h, pts, args.t)
            rows.append({"spacing": h, "residual": res,
                         "ratio": (prev / res) if prev and res > 0 else math.nan})
            prev = res
    elif args.what == "reflection":
        rows.append({"u": args.u, "s": spec.s, "deficit": wp.reflection_deficit(spec, args.u)})
    elif args.what == "scatter":
        rhos = args.rho if args.rho else [0.0, 10.0, 100.0]
        e1, _, _ = orthonormal_frame(spec.k)
        thetas = np.linspace(0.0, np.pi, 7)
        dirs = [np.cos(th) * spec.k / np.linalg.norm(spec.k) + np.sin(th) * e1 for th in thetas]
        cols = {}
        for m in rhos:
            cols[m] = wp.scatter_fixed_center(spec, args.b, (m / spec.s) * e1, dirs)
        for j, th in enumerate(thetas):
            row = {"theta": th}
            for m in rhos:
                row[f"weight_rho_{m:g}_over_s"] = cols[m][j]
            rows.append(row)
        extra["closed_weight"] = abs(args.b * np.linalg.norm(spec.k) / (2 * np.pi)) ** 2
    _emit(args, rows, extra)


def cmd_asymptotics(args):
    if args.k * args.rmin < 1:
        raise PreconditionError("need k * rmin >= 1")
    rows = []
    for r in np.geomspace(args.rmin, args.rmax, args.points):
        dec = hemisphere_decomposition(args.k, r)
        exact = np.exp(1j * args.k * r) / r
        res = abs(dec - exact)
        rows.append({"r": r, "abs_decomposition": abs(dec), "abs_exact": abs(exact),
                     "residual": res, "residual_times_r": res * r,
                     "bound": evanescent_tail_bound(r)})
    _emit(args, rows)


def cmd_quantize(args):
    cfg = CollisionConfig.make(k_i=(0.0, 0.0, args.ki), mu=args.mu, b=args.b)
    axis = np.asarray(args.cone_axis, float)
    axis = axis / np.linalg.norm(axis)
    half = math.radians(args.cone_angle)
    A = front_area(cfg)
    rows = []
    for N in args.N:
        cm = quantize_cm(cfg, N)
        lf = transport_to_lf(cm)
        before, after = square_order_invariance(cfg, N, axis, half)
        rows.append({"N": N, "N_lf": len(lf), "flagged": len(lf.flags),
                     "window_cm": window_probability(cm, axis, half),
                     "before": before, "after": after,
                     "delta_omega": angular_quantum(A, cfg.q, cfg.mu),
                     "dsigma_domega": quantized_cross_section_density(cfg, A),
                     "reference": abs(args.b) ** 2 / (1 + args.mu) ** 2})
    _emit(args, rows)


def cmd_divergence_probe(args):
    probe = divergence_probe((0.0, 0.0, args.ki), args.mu)
    row = {"kind": "singular_cone", "p_i": probe.p_i, "n": probe.n,
           "discriminant": probe.discriminant, "q": probe.q, "alpha": probe.alpha,
           "cone_half_angle": probe.cone_half_angle}
    rows = [row]
    if 0 < args.mu < 1:
        p_t, n_t, d_t = tangent_boundary_pair((0.0, 0.0, args.ki), args.mu)
        rows.append({"kind": "tangent_boundary", "p_i": p_t, "n": n_t, "discriminant": d_t})
    if args.format == "csv":
        for r in rows:
            for key in ("p_i", "n"):
                r[key] = " ".join("%.17g" % x for x in r[key])
    _emit(args, rows)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(p):
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scatverify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ambiguity", help="LF vs CM-route densities over a theta scan")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--ki", type=float, default=1.0)
    p.add_argument("--pi", type=float, default=None, help="atom momentum along k_i")
    p.add_argument("--pix", type=float, default=0.0)
    p.add_argument("--piy", type=float, default=0.0)
    p.add_argument("--piz", type=float, default=0.0)
    p.add_argument("--theta-steps", type=int, default=18)
    p.add_argument("--theta", type=float, nargs="+", default=None, help="explicit angles in degrees")
    _common(p)
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("gas-xs", help="gas kernel vs Monte-Carlo oracle on an (omega, kappa) grid")
    p.add_argument("--ki", type=float, default=1.0)
    p.add_argument("--T", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=lambda x: int(x, 0), default=DEFAULT_SEED)
    _common(p)
    p.set_defaults(func=cmd_gas_xs)

    p = sub.add_parser("temp-scan", help="total gas cross section against temperature")
    p.add_argument("--ki", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--Tmin", type=float, default=1.0)
    p.add_argument("--Tmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--area-mode", choices=("dynamic", "const"), default="dynamic")
    _common(p)
    p.set_defaults(func=cmd_temp_scan)

    p = sub.add_parser("packet", help="wave-packet properties")
    p.add_argument("--family", choices=("gaussian", "dB", "ns"), default="dB")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--k", type=float, nargs=3, default=(0.0, 0.0, 1.0))
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--what", choices=("value", "norm", "area", "residual", "reflection", "scatter"),
                   default="norm")
    p.add_argument("--r", type=float, nargs=3, default=(1.0, 0.5, 0.25), help="point for --what value")
    p.add_argument("--spacing", type=float, default=0.02)
    p.add_argument("--u", type=float, default=4.0, help="barrier strength for reflection")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--rho", type=float, nargs="*", default=None,
                   help="impact parameters in units of 1/s for scatter")
    p.add_argument("--seed", type=lambda x: int(x, 0), default=DEFAULT_SEED)
    _common(p)
    p.set_defaults(func=cmd_packet)

    p = sub.add_parser("asymptotics", help="hemisphere decomposition residual against r")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--rmin", type=float, default=10.0)
    p.add_argument("--rmax", type=float, default=1000.0)
    p.add_argument("--points", type=int, default=9)
    _common(p)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("quantize", help="angular quantization demo")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--ki", type=float, default=1.0)
    p.add_argument("--N", type=int, nargs="+", default=[1000])
    p.add_argument("--cone-axis", type=float, nargs=3, default=(0.0, 0.0, 1.0))
    p.add_argument("--cone-angle", type=float, default=30.0, help="half angle in degrees")
    p.add_argument("--seed", type=lambda x: int(x, 0), default=DEFAULT_SEED)
    _common(p)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("divergence-probe", help="construct a singular LF configuration")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--ki", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_divergence_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        args.func(args)
    except (SingularJacobianError, SingularPointError, DegenerateEncounterError) as exc:
        where = getattr(exc, "direction", None)
        extra = f" at direction {np.asarray(where).tolist()}" if where is not None else ""
        print(f"error: singular configuration{extra}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except AccuracyError as exc:
        print(f"error: accuracy: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_ACCURACY
    except NotFoundError as exc:
        print(f"error: not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
