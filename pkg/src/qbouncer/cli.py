"""``qbouncer`` command line.

Exit codes: 0 success, 1 validation or output failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import checks
from .classical import cycle_energy_loss, rebound_height, simulate
from .hamiltonian import h_cal, h_exp, phase_state
from .model import PRESETS, QUOTED_ELL_G, ParameterError, PhysicalParams, derive_scales, preset
from .oracle import GridSpec, airy_basis_eigenvalues, fd_eigenvalues, linear_potential, turnover_point
from .spectrum import figure1_data, spectrum

SCHEMA_VERSION = 1
VALIDITY_WARN = 0.3

COMMANDS = ("params", "classical", "spectrum", "figure1", "oracle", "validate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--preset", default=None, help="parameter preset (default: $QBOUNCER_PRESET or neutron)")
    for name, unit in (("m", "kg"), ("g", "m/s^2"), ("gamma", "kg/m"), ("d", "m"), ("hbar", "J s")):
        common.add_argument(f"--{name}", type=float, default=None, help=f"override {name} [{unit}]")
    common.add_argument("--n-max", type=int, default=10)
    common.add_argument("--cycles", type=int, default=1)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--units", choices=("si", "natural"), default="si")
    common.add_argument("--out", default="-", help="output path, '-' for standard output")
    common.add_argument("--basis-size", type=int, default=40, help="Airy basis size for oracle runs")
    common.add_argument("--grid-n", type=int, default=8000, help="interior grid points for oracle runs")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qbouncer", description=__doc__, allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common_flags()
    helps = {
        "params": "physical parameters and derived scales",
        "classical": "simulate the dissipative bouncing particle",
        "spectrum": "unperturbed levels and first-order corrections",
        "figure1": "energy loss per level for plotting",
        "oracle": "numerical eigenvalue oracles",
        "validate": "run the self-validation suites",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], allow_abbrev=False)
    return parser


def resolve_params(args) -> PhysicalParams:
    name = args.preset or os.environ.get("QBOUNCER_PRESET") or "neutron"
    base = preset(name)
    overrides = {k: getattr(args, k) for k in ("m", "g", "gamma", "d", "hbar") if getattr(args, k) is not None}
    return replace(base, **overrides).validate()


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_table(rows: list[dict], fmt: str, units: str, params: PhysicalParams | None = None,
                 comments: tuple[str, ...] = (), extra: dict | None = None) -> str:
    if not rows:
        raise UsageError("nothing to emit: empty table")
    if fmt == "csv":
        buf = io.StringIO()
        for line in comments:
            buf.write(f"# {line}\n")
        columns = list(rows[0])
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(row[c]) for c in columns) + "\n")
        return buf.getvalue()
    doc = {"schema_version": SCHEMA_VERSION, "units": units}
    if params is not None:
        doc["params"] = params.to_dict()
    doc["rows"] = rows
    if extra:
        doc.update(extra)
    return json.dumps(_jsonable(doc), indent=1) + "\n"


def emit_table(rows, fmt, units, out, *, params=None, comments=(), extra=None) -> None:
    _write_text(render_table(rows, fmt, units, params, comments, extra), out)


def _write_text(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_params(args, params):
    s = derive_scales(params)
    length = s.ell_g if args.units == "natural" else 1.0
    row = {
        "m": params.m, "g": params.g, "gamma": params.gamma, "d": params.d / length, "hbar": params.hbar,
        "ell_g": s.ell_g / length, "e_scale": s.e_scale, "eps": s.eps, "delta": s.delta,
        "drop_exponent": s.drop_exponent,
        "rebound_height": rebound_height(params) / length,
        "turnover_point": turnover_point(params) / length,
        "quoted_ell_g": QUOTED_ELL_G / length,
    }
    return [row], (), None


def _cmd_classical(args, params):
    traj = simulate(params, n_cycles=args.cycles, tol=args.tol)
    s = derive_scales(params)
    natural = args.units == "natural"
    length = s.ell_g if natural else 1.0
    energy = s.e_scale if natural else 1.0
    tunit = math.sqrt(s.ell_g / params.g) if natural else 1.0
    vunit = math.sqrt(params.g * s.ell_g) if natural else 1.0

    h_exp_col = np.empty_like(traj.t)
    h_cal_col = np.empty_like(traj.t)
    segments = []
    for i, seg in enumerate(traj.legs):
        sl = traj.leg_slice(i)
        leg_params = params.with_drop_height(seg.drop_height)
        conv = "exp_down" if seg.kind == "down" else "exp_up"
        h_exp_col[sl] = h_exp(phase_state(traj.x[sl], traj.v[sl], conv, leg_params), seg.kind, leg_params)
        h_cal_col[sl] = h_cal(phase_state(traj.x[sl], traj.v[sl], "kinetic", leg_params), seg.kind, leg_params)
        segments.append(f"{seg.kind}:{seg.start}-{seg.stop}")
    e_mech = 0.5 * params.m * traj.v**2 + params.m * params.g * traj.x

    rows = [
        {"t": t / tunit, "x": x / length, "v": v / vunit, "e_mech": e / energy,
         "h_exp_leg": he / energy, "h_cal_leg": hc / energy}
        for t, x, v, e, he, hc in zip(traj.t, traj.x, traj.v, e_mech, h_exp_col, h_cal_col)
    ]
    cycles = []
    for c in range(1, traj.n_cycles + 1):
        summ = cycle_energy_loss(traj, c)
        cycles.append({
            "cycle": c, "d_start": summ.d_start / length, "v_impact": summ.v_impact / vunit,
            "d_rebound": summ.d_rebound / length, "duration": summ.duration / tunit,
            "delta_e_mech": summ.delta_e_mech / energy, "work_integral": summ.work_integral / energy,
        })
    comments = ["legs " + " ".join(segments)] + [
        "cycle " + " ".join(f"{k}={_fmt(v)}" for k, v in c.items() if k != "cycle") for c in cycles
    ]
    return rows, comments, {"legs": segments, "cycles": cycles}


def _spectrum_rows(lines, units, e_scale):
    scale = e_scale if units == "natural" else 1.0
    return [
        {"n": ln.n, "z_n": ln.z_n, "e0": ln.e0 / scale, "de1": ln.de1 / scale, "e": ln.e / scale,
         "validity": ln.validity}
        for ln in lines
    ]


def _warn_validity(lines):
    bad = [ln.n for ln in lines if ln.validity > VALIDITY_WARN]
    if bad:
        print(f"warning: first-order correction exceeds {VALIDITY_WARN:g} of the level for n = "
              f"{bad[0]}..{bad[-1]}; the perturbative result is unreliable there", file=sys.stderr)


def _cmd_spectrum(args, params):
    lines = spectrum(params, args.n_max)
    _warn_validity(lines)
    return _spectrum_rows(lines, args.units, derive_scales(params).e_scale), (), None


def _cmd_figure1(args, params):
    rows = figure1_data(params, args.n_max)
    _warn_validity(rows)
    scale = derive_scales(params).e_scale if args.units == "natural" else 1.0
    out = []
    for r in rows:
        d = r.to_dict()
        for key in ("e0", "abs_de1", "e"):
            d[key] = d[key] / scale
        out.append(d)
    return out, ("energy loss |de1| per level; abs_de1_mgl is |de1| / (m g ell_g)",), None


def _cmd_oracle(args, params):
    s = derive_scales(params)
    k = min(args.n_max, args.basis_size // 4, 20)
    fd = fd_eigenvalues(linear_potential(params), GridSpec(12.0 * s.ell_g, args.grid_n), k, params,
                        richardson=True)
    basis = airy_basis_eigenvalues(params, args.basis_size, k)
    lines = spectrum(params, k)
    scale = s.e_scale if args.units == "natural" else 1.0
    rows = [
        {"n": ln.n, "e0_formula": ln.e0 / scale, "e0_fd": fd.eigenvalues[i] / scale,
         "e_formula": ln.e / scale, "e_airy_basis": basis.eigenvalues[i] / scale,
         "fd_residual": fd.residuals[i] / scale, "airy_basis_residual": basis.residuals[i] / scale}
        for i, ln in enumerate(lines)
    ]
    return rows, ("fd: V = m g x, Dirichlet box L = 12 ell_g, Richardson-extrapolated",), {
        "reports": [fd.to_dict(), basis.to_dict()]}


def _cmd_validate(args, params):
    results = checks.run_all(params)
    rows = [{"suite": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    return rows, (), None


HANDLERS = {
    "params": _cmd_params,
    "classical": _cmd_classical,
    "spectrum": _cmd_spectrum,
    "figure1": _cmd_figure1,
    "oracle": _cmd_oracle,
    "validate": _cmd_validate,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        params = resolve_params(args)
        if args.n_max < 1 or args.cycles < 1:
            raise UsageError("--n-max and --cycles must be >= 1")
    except (UsageError, ParameterError) as exc:
        print(f"qbouncer: error: {exc}", file=sys.stderr)
        return 2

    try:
        rows, comments, extra = HANDLERS[args.command](args, params)
    except (ValueError, ParameterError) as exc:
        print(f"qbouncer: error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate" and args.format == "csv":
        text = "".join(f"{'PASS' if r['passed'] else 'FAIL'} {r['suite']}: {r['detail']}\n" for r in rows)
        try:
            _write_text(text, args.out)
        except OSError as exc:
            print(f"qbouncer: error: {exc}", file=sys.stderr)
            return 1
        return 0 if all(r["passed"] for r in rows) else 1

    try:
        emit_table(rows, args.format, args.units, args.out, params=params, comments=comments, extra=extra)
    except UsageError as exc:
        print(f"qbouncer: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qbouncer: error: {exc}", file=sys.stderr)
        return 1
    if args.command == "validate":
        return 0 if all(r["passed"] for r in rows) else 1
    return 0


def main(argv=None) -> None:
    with contextlib.suppress(BrokenPipeError):
        sys.exit(run(argv))


__all__ = ["run", "main", "emit_table", "render_table", "PRESETS"]
