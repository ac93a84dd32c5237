"""Command-line driver: state panels, sweeps, and file reports.

Exit codes: 0 success, 2 validation problem, 3 I/O problem, 4 numeric
failure.  Reports go to stdout as key: value lines; with --out they are also
written as JSON (versioned schema) or RFC-4180-style CSV, plus a PNG figure
next to the output file unless --no-plot is given.  Re-running a command with
the same inputs reproduces the output files byte for byte.

Sweeps may evaluate grid points in parallel (XXCRIT_THREADS, default 1); the
output table is always assembled in index order, and a numeric failure at one
point flags that row and continues instead of aborting the sweep.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from xxcrit import dim2 as d2
from xxcrit import entanglement as ent
from xxcrit import freefermion as ff
from xxcrit import order
from xxcrit import physunits as pu
from xxcrit import superfluid as sf
from xxcrit.errors import NumericError, ResourceLimitError, ValidationError, XXCritError
from xxcrit.hilbert import SpinChainSpec

SCHEMA_VERSION = "1"
SWEEP_PARAMETERS = ("mu", "temperature", "theta", "j_perp")
OBSERVABLES = ("fs_kinetic", "fs_curvature", "entropy", "concurrence", "correlators", "witnesses")
REPORT_KINDS = ("superfluid", "witness", "experiment", "dim2", "profile")


# ---------------------------------------------------------------- serializers

def _to_jsonable(obj):
    """Recursively convert payloads to JSON-safe values (NaN becomes null)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _write_json(path: Path, document: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_to_jsonable(document), fh, indent=2)
        fh.write("\n")


def _write_csv(path: Path, rows: list[dict]) -> None:
    if not rows:
        raise ValidationError("refusing to write an empty CSV table")
    fields = list(rows[0].keys())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\r\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row.get(k) is None else row[k] for k in fields})


def read_table_csv(path: Path) -> list[dict]:
    """Read back a CSV written by this module, restoring cell types."""
    def restore(s: str):
        if s == "":
            return None
        if s in ("True", "False"):
            return s == "True"
        for cast in (int, float):
            try:
                return cast(s)
            except ValueError:
                continue
        return s

    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: restore(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _flat_rows(payload: dict) -> list[dict]:
    """Flatten a nested payload into (key, value) rows for CSV output."""
    flat: list[dict] = []

    def walk(prefix: str, obj) -> None:
        obj = _to_jsonable(obj)
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            flat.append({"key": prefix, "value": obj})

    walk("", payload)
    return flat


def emit_report(
    kind: str,
    payload: dict,
    out: Optional[Path] = None,
    fmt: str = "json",
    plot: bool = True,
) -> list[Path]:
    """Write a report of the given kind; returns the paths written."""
    if kind not in REPORT_KINDS:
        raise ValidationError(f"report kind must be one of {REPORT_KINDS}, got {kind!r}")
    if fmt not in ("json", "csv"):
        raise ValidationError(f"format must be json or csv, got {fmt!r}")
    written: list[Path] = []
    if out is None:
        return written
    out = Path(out)
    document = {"schema_version": SCHEMA_VERSION, "kind": kind, **payload}
    if fmt == "json":
        _write_json(out, document)
    else:
        if kind == "profile":
            rows = [{"r": r, "value": v} for r, v in payload["points"]]
        else:
            rows = _flat_rows(document)
        _write_csv(out, rows)
    written.append(out)
    if plot:
        from xxcrit import plotting

        written.append(plotting.render_report(kind, _to_jsonable(payload), out.with_suffix(".png")))
    return written


# ------------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class SweepConfig:
    swept_parameter: str
    start: float
    stop: float
    steps: int
    observables: tuple[str, ...]
    fixed: dict = field(default_factory=dict)
    solver: str = "auto"
    output_format: str = "csv"
    output_path: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.swept_parameter not in SWEEP_PARAMETERS:
            raise ValidationError(
                f"swept_parameter must be one of {SWEEP_PARAMETERS}, got {self.swept_parameter!r}"
            )
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 2:
            raise ValidationError(f"steps must be an int >= 2, got {self.steps!r}")
        if not (np.isfinite(self.start) and np.isfinite(self.stop) and self.start < self.stop):
            raise ValidationError(f"need start < stop, got {self.start!r}, {self.stop!r}")
        if not self.observables:
            raise ValidationError("observables must be non-empty")
        bad = [o for o in self.observables if o not in OBSERVABLES]
        if bad:
            raise ValidationError(f"unknown observables {bad}; choose from {OBSERVABLES}")
        if self.output_format not in ("csv", "json"):
            raise ValidationError(f"output_format must be csv or json, got {self.output_format!r}")


def _sweep_columns(config: SweepConfig) -> list[str]:
    cols: list[str] = []
    for obs in config.observables:
        if obs == "correlators":
            cols += ["xx_nn", "yy_nn", "zz_nn", "z_single"]
        elif obs == "concurrence":
            cols.append("concurrence_nn")
        elif obs == "witnesses":
            if config.swept_parameter == "j_perp":
                cols += ["witness_energy_2d_fired", "witness_energy_2d_margin"]
            else:
                cols += [
                    "witness_fs_half_fired",
                    "witness_fs_half_margin",
                    "witness_mu_T_disc_fired",
                    "witness_mu_T_disc_margin",
                    "witness_energy_1d_fired",
                    "witness_energy_1d_margin",
                ]
        else:
            cols.append(obs)
    if config.swept_parameter == "j_perp":
        cols.insert(0, "u_density")
    return cols


def _spin_point(config: SweepConfig, value: float) -> dict:
    fx = config.fixed
    kwargs = dict(
        n_sites=fx.get("n_sites"),
        coupling_j=fx.get("coupling_j", 1.0),
        chem_potential=fx.get("chem_potential", 0.0),
        boundary=fx.get("boundary", "periodic"),
        temperature=fx.get("temperature", 0.0),
    )
    theta = fx.get("theta", 1e-3)
    if config.swept_parameter == "mu":
        kwargs["chem_potential"] = value
    elif config.swept_parameter == "temperature":
        kwargs["temperature"] = value
    else:
        theta = value
    spec = SpinChainSpec(**kwargs)

    row: dict = {}
    notes: list[str] = []
    corr = ff.nn_correlators(spec, solver=config.solver, r_max=1)
    for obs in config.observables:
        if obs == "fs_kinetic":
            row["fs_kinetic"] = sf.superfluid_fraction_kinetic(corr)
        elif obs == "fs_curvature":
            if spec.boundary == "open":
                row["fs_curvature"] = None
                notes.append("fs_curvature: twist response undefined on open chains")
            else:
                row["fs_curvature"] = sf.superfluid_fraction_curvature(
                    spec, theta=theta, solver=config.solver
                )
        elif obs == "entropy":
            row["entropy"] = ent.single_site_entropy(corr.z_single)
        elif obs == "concurrence":
            row["concurrence_nn"] = ent.concurrence_nn(corr)
        elif obs == "correlators":
            row.update(
                xx_nn=corr.xx_nn, yy_nn=corr.yy_nn, zz_nn=corr.zz_nn, z_single=corr.z_single
            )
        elif obs == "witnesses":
            fs = sf.superfluid_fraction_kinetic(corr)
            bond_energy = -spec.coupling_j * (corr.xx_nn + corr.yy_nn) / 2.0
            for w in (
                ent.witness_superfluid(fs),
                ent.witness_high_temperature(
                    spec.chem_potential, spec.temperature, spec.coupling_j
                ),
                ent.witness_energy_1d(bond_energy, spec.coupling_j),
            ):
                row[f"witness_{w.witness_name}_fired"] = w.fired
                row[f"witness_{w.witness_name}_margin"] = w.margin
    row["notes"] = "; ".join(notes)
    return row


def _dim2_point(config: SweepConfig, value: float) -> dict:
    fx = config.fixed
    spec = d2.Dim2Spec(
        j_parallel=fx.get("j_parallel", 1.0),
        j_perp=value,
        beta=fx.get("beta", 1.0),
        quadrature_points=fx.get("quadrature_points", 96),
    )
    u = d2.energy_density_2d(spec)
    row: dict = {"u_density": u}
    notes: list[str] = []
    for obs in config.observables:
        if obs == "witnesses":
            w = d2.witness_energy_2d(u, spec)
            row["witness_energy_2d_fired"] = w.fired
            row["witness_energy_2d_margin"] = w.margin
        else:
            for col in _sweep_columns(replace(config, observables=(obs,))):
                if col != "u_density":
                    row[col] = None
            notes.append(f"{obs}: not defined for a j_perp sweep")
    row["notes"] = "; ".join(notes)
    return row


def run_sweep(config: SweepConfig) -> list[dict]:
    """Evaluate the grid, one row per point, in deterministic index order."""
    grid = np.linspace(config.start, config.stop, config.steps)
    point_fn = _dim2_point if config.swept_parameter == "j_perp" else _spin_point
    columns = _sweep_columns(config)

    def evaluate(item: tuple[int, float]) -> dict:
        i, value = item
        base = {"index": i, config.swept_parameter: float(value)}
        try:
            body = point_fn(config, float(value))
            status = "ok"
        except XXCritError as exc:
            body = {"notes": ""}
            status = f"error: {exc}"
        row = dict(base)
        for col in columns:
            row[col] = body.get(col)
        row["notes"] = body.get("notes") or None  # None round-trips CSV exactly
        row["status"] = status
        return row

    workers = max(1, int(os.environ.get("XXCRIT_THREADS", "1")))
    items = list(enumerate(grid))
    if workers == 1:
        rows = [evaluate(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, items))
    rows.sort(key=lambda r: r["index"])
    return rows


# ------------------------------------------------------------- state panels

def _spec_from_args(args, temperature: float = 0.0) -> SpinChainSpec:
    return SpinChainSpec(
        n_sites=args.n_sites,
        coupling_j=args.j,
        chem_potential=args.mu,
        boundary=args.boundary,
        temperature=temperature,
    )


def _state_panel(spec: SpinChainSpec, solver: str, r_max: Optional[int]) -> dict:
    corr = ff.nn_correlators(spec, solver=solver, r_max=r_max)
    fs_kin = sf.superfluid_fraction_kinetic(corr)
    bond_energy = -spec.coupling_j * (corr.xx_nn + corr.yy_nn) / 2.0
    if spec.n_sites is None:
        energy, energy_note = None, "total energy not defined in the thermodynamic limit"
    elif spec.temperature == 0:
        energy, energy_note = ff.ground_energy(spec), ""
    else:
        energy, energy_note = ff.free_energy(spec), "free energy at T > 0"
    witnesses = [
        ent.witness_superfluid(fs_kin),
        ent.witness_high_temperature(spec.chem_potential, spec.temperature, spec.coupling_j),
        ent.witness_energy_1d(bond_energy, spec.coupling_j),
    ]
    return {
        "spec": dataclasses.asdict(spec),
        "engine": corr.source,
        "energy": energy,
        "energy_note": energy_note,
        "bond_energy": bond_energy,
        "correlators": {
            "xx_nn": corr.xx_nn,
            "yy_nn": corr.yy_nn,
            "zz_nn": corr.zz_nn,
            "z_single": corr.z_single,
        },
        "fs_kinetic": fs_kin,
        "entropy_single_site": ent.single_site_entropy(corr.z_single),
        "concurrence_nn": ent.concurrence_nn(corr),
        "concurrence_standard": ent.concurrence_standard(corr),
        "witnesses": [dataclasses.asdict(w) for w in witnesses],
    }


def _print_panel(payload: dict) -> None:
    for key in ("engine", "energy", "fs_kinetic", "entropy_single_site", "concurrence_nn"):
        print(f"{key}: {payload[key]}")
    for k, v in payload["correlators"].items():
        print(f"{k}: {v}")
    for w in payload["witnesses"]:
        print(f"witness {w['witness_name']}: {'fired' if w['fired'] else 'not fired'} "
              f"(margin {w['margin']:+.6g})")


def _emit_and_report(args, kind: str, payload: dict) -> None:
    paths = emit_report(
        kind, payload, out=args.out, fmt=args.format, plot=not args.no_plot
    )
    for p in paths:
        print(f"wrote: {p}")


# ---------------------------------------------------------------- commands

def cmd_ground(args) -> int:
    spec = _spec_from_args(args, temperature=0.0)
    payload = _state_panel(spec, args.solver, args.r_max)
    _print_panel(payload)
    _emit_and_report(args, "witness", payload)
    return 0


def cmd_thermal(args) -> int:
    if args.temp <= 0:
        raise ValidationError("thermal needs --temp > 0; use ground for T = 0")
    spec = _spec_from_args(args, temperature=args.temp)
    payload = _state_panel(spec, args.solver, args.r_max)
    _print_panel(payload)
    _emit_and_report(args, "witness", payload)
    return 0


def cmd_superfluid(args) -> int:
    spec = _spec_from_args(args, temperature=args.temp)
    rep = sf.superfluid_report(spec, theta=args.theta, solver=args.solver)
    payload = {"spec": dataclasses.asdict(spec), "report": dataclasses.asdict(rep)}
    for k, v in dataclasses.asdict(rep).items():
        print(f"{k}: {v}")
    _emit_and_report(args, "superfluid", payload)
    return 0


def cmd_correlators(args) -> int:
    spec = _spec_from_args(args, temperature=args.temp)
    r_max = args.r_max
    corr = ff.nn_correlators(spec, solver=args.solver, r_max=r_max)
    points = [[int(r), float(v)] for r, v in corr.transverse_profile]
    if len(points) >= 8:
        prof = order.classify_decay(corr.transverse_profile)
        fit_poly, fit_exp, classification = prof.fit_poly, prof.fit_exp, prof.classification
    else:
        fit_poly = fit_exp = None
        classification = "unclassified"
    payload = {
        "spec": dataclasses.asdict(spec),
        "engine": corr.source,
        "nn": {
            "xx_nn": corr.xx_nn,
            "yy_nn": corr.yy_nn,
            "zz_nn": corr.zz_nn,
            "z_single": corr.z_single,
        },
        "points": points,
        "fit_poly": fit_poly,
        "fit_exp": fit_exp,
        "classification": classification,
    }
    print(f"engine: {corr.source}")
    print(f"classification: {classification}")
    if fit_poly:
        print(f"fit_poly exponent: {fit_poly[0]:.6g} (rms {fit_poly[1]:.3g})")
    if fit_exp:
        print(f"fit_exp rate: {fit_exp[0]:.6g} (rms {fit_exp[1]:.3g})")
    _emit_and_report(args, "profile", payload)
    return 0


def cmd_sweep(args) -> int:
    observables = tuple(s.strip() for s in args.observables.split(",") if s.strip())
    fixed = {
        "n_sites": args.n_sites,
        "coupling_j": args.j,
        "chem_potential": args.mu,
        "boundary": args.boundary,
        "temperature": args.temp,
        "theta": args.theta,
        "j_parallel": args.j,
        "beta": (1.0 / args.temp) if args.temp > 0 else None,
        "quadrature_points": args.quadrature_points,
    }
    if args.swept == "j_perp" and args.temp <= 0:
        raise ValidationError("a j_perp sweep needs --temp > 0 to set beta")
    config = SweepConfig(
        swept_parameter=args.swept,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        observables=observables,
        fixed=fixed,
        solver=args.solver,
        output_format=args.format,
        output_path=args.out,
    )
    table = run_sweep(config)
    failures = sum(1 for row in table if row["status"] != "ok")
    print(f"swept {config.swept_parameter}: {len(table)} points, {failures} flagged")
    if args.out is not None:
        out = Path(args.out)
        if args.format == "json":
            _write_json(
                out,
                {
                    "schema_version": SCHEMA_VERSION,
                    "kind": "sweep",
                    "swept_parameter": config.swept_parameter,
                    "table": table,
                },
            )
        else:
            _write_csv(out, table)
        print(f"wrote: {out}")
        if not args.no_plot:
            from xxcrit import plotting

            png = plotting.render_sweep(table, config.swept_parameter, out.with_suffix(".png"))
            print(f"wrote: {png}")
    return 0


def cmd_dim2(args) -> int:
    if args.temp <= 0:
        raise ValidationError("dim2 needs --temp > 0 to set beta")
    beta = 1.0 / args.temp
    spec = d2.Dim2Spec(
        j_parallel=args.j,
        j_perp=args.j_perp,
        beta=beta,
        quadrature_points=args.quadrature_points,
    )
    u = d2.energy_density_2d(spec)
    asym = beta * (spec.j_parallel**2 + spec.j_perp**2) / 8.0
    witness = d2.witness_energy_2d(u, spec, per_bond_doubled=args.per_bond_doubled)
    betas = [beta * 10.0**e for e in np.linspace(-1.5, 1.5, 7)]
    curve = {
        "beta": betas,
        "u_abs": [abs(d2.energy_density_2d(replace(spec, beta=b))) for b in betas],
        "asymptote": [b * (spec.j_parallel**2 + spec.j_perp**2) / 8.0 for b in betas],
    }
    payload = {
        "spec": dataclasses.asdict(spec),
        "beta": beta,
        "u_density": u,
        "high_t_asymptote": -asym,
        "asymptote_ratio": abs(u) / asym,
        "high_t_entanglement_threshold": d2.high_t_entanglement_threshold(spec),
        "witness": dataclasses.asdict(witness),
        "asymptote_curve": curve,
    }
    print(f"u_density: {u}")
    print(f"high_t_asymptote: {-asym} (ratio {abs(u) / asym:.6g})")
    print(f"threshold_temperature: {payload['high_t_entanglement_threshold']}")
    print(f"witness energy_2d: {'fired' if witness.fired else 'not fired'} "
          f"(margin {witness.margin:+.6g})")
    _emit_and_report(args, "dim2", payload)
    return 0


def cmd_experiment(args) -> int:
    params = pu.PhysicalParams(
        mass_kg=pu.mass_from_amu(args.mass_amu),
        temperature_k=args.temperature_nk * 1e-9,
        mu_frequency_hz=args.mu_frequency_khz * 1e3,
        healing_length_m=(
            args.healing_length_um * 1e-6 if args.healing_length_um is not None else None
        ),
        density=args.density,
        scattering_length_m=(
            args.scattering_length_um * 1e-6 if args.scattering_length_um is not None else None
        ),
        mean_energy_j=args.mean_energy_j,
    )
    reference = (
        args.reference_wavelength_um * 1e-6 if args.reference_wavelength_um is not None else None
    )
    rep = pu.experiment_report(params, reference_thermal_wavelength=reference)
    payload = _to_jsonable(rep)
    payload["params"] = _to_jsonable(params)
    for k, v in payload["frequencies_hz"].items():
        print(f"{k}: {v:.6g} Hz")
    lam = payload["thermal_wavelength_m"]
    print(f"thermal_wavelength_um: {lam * 1e6 if lam else None}")
    for c in payload["checks"]:
        print(f"check {c['name']}: {c['verdict']} ({c['inequality']}; "
              f"left={c['left']}, right={c['right']})")
    if payload.get("reference_comparison"):
        rcmp = payload["reference_comparison"]
        print(f"reference wavelength comparison: computed {rcmp['computed_m']} m vs "
              f"{rcmp['reference_m']} m (ratio {rcmp['ratio']:.4g})")
    _emit_and_report(args, "experiment", payload)
    return 0


def cmd_counterexamples(args) -> int:
    from xxcrit.hilbert import pair_expectations, reduced_density_matrix

    ghz = order.ghz_state(args.n_sites)
    transverse = [abs(pair_expectations(ghz, 0, r)["xx"]) for r in range(1, args.n_sites)]
    zz_points = [(r, pair_expectations(ghz, 0, r)["zz"]) for r in range(1, args.n_sites)]
    ghz_entropy = ent.von_neumann_entropy(reduced_density_matrix(ghz, [0]))

    coherent = order.coherent_product_state(args.alpha, args.coherent_sites, args.n_max)
    b = order.bose_annihilation(args.n_max)
    hop = np.kron(b.T, b)
    hops = []
    cut_entropies = []
    for j in range(1, args.coherent_sites):
        rdm = reduced_density_matrix(coherent, [0, j], local_dim=args.n_max + 1)
        rho = rdm.spectrum[1] @ np.diag(rdm.spectrum[0]) @ rdm.spectrum[1].conj().T
        hops.append(float(np.trace(rho @ hop).real))
        cut = reduced_density_matrix(coherent, list(range(j)), local_dim=args.n_max + 1)
        cut_entropies.append(ent.von_neumann_entropy(cut))

    rows = [
        {"state": "ghz", "quantity": "max_transverse_correlator", "value": max(transverse)},
        {"state": "ghz", "quantity": "single_site_entropy", "value": ghz_entropy},
        {"state": "ghz", "quantity": "zz_correlator_min", "value": min(v for _, v in zz_points)},
        {"state": "coherent", "quantity": "min_hopping_correlator", "value": min(hops)},
        {"state": "coherent", "quantity": "max_hopping_correlator", "value": max(hops)},
        {"state": "coherent", "quantity": "max_cut_entropy", "value": max(cut_entropies)},
        {"state": "coherent", "quantity": "alpha_squared", "value": args.alpha**2},
    ]
    payload = {
        "ghz_sites": args.n_sites,
        "coherent_sites": args.coherent_sites,
        "alpha": args.alpha,
        "n_max": args.n_max,
        "rows": rows,
        "witnesses": [],
        "note": (
            "order and entanglement separate: the GHZ state is entangled with no "
            "transverse order, the coherent product is ordered with no entanglement"
        ),
    }
    for r in rows:
        print(f"{r['state']} {r['quantity']}: {r['value']:.6g}")
    _emit_and_report(args, "witness", payload)
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxcrit",
        description="superfluidity, order, and entanglement diagnostics for the XX chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    spin = argparse.ArgumentParser(add_help=False)
    spin.add_argument("--n-sites", type=int, default=None,
                      help="ring size; omit for the thermodynamic limit")
    spin.add_argument("--mu", type=float, default=0.0, help="chemical potential")
    spin.add_argument("--j", type=float, default=1.0, help="hopping J")
    spin.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    spin.add_argument("--solver", choices=("auto", "exactdiag", "freefermion"), default="auto")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", type=Path, default=None, help="output file path")
    out.add_argument("--format", choices=("json", "csv"), default="json")
    out.add_argument("--no-plot", action="store_true", help="skip the PNG figure")

    p = sub.add_parser("ground", parents=[spin, out], help="T = 0 state panel")
    p.add_argument("--r-max", type=int, default=None)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("thermal", parents=[spin, out], help="T > 0 state panel")
    p.add_argument("--temp", type=float, required=True)
    p.add_argument("--r-max", type=int, default=None)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("superfluid", parents=[spin, out], help="superfluid fraction report")
    p.add_argument("--temp", type=float, default=0.0)
    p.add_argument("--theta", type=float, default=1e-3)
    p.set_defaults(func=cmd_superfluid)

    p = sub.add_parser("correlators", parents=[spin, out], help="decay profile report")
    p.add_argument("--temp", type=float, default=0.0)
    p.add_argument("--r-max", type=int, default=None)
    p.set_defaults(func=cmd_correlators)

    p = sub.add_parser("sweep", parents=[spin, out], help="parameter sweep table")
    p.add_argument("--swept", choices=SWEEP_PARAMETERS, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--observables", required=True,
                   help="comma list from " + ",".join(OBSERVABLES))
    p.add_argument("--temp", type=float, default=0.0)
    p.add_argument("--theta", type=float, default=1e-3)
    p.add_argument("--quadrature-points", type=int, default=96)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dim2", parents=[out], help="2D mean-field energy report")
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--j-perp", type=float, default=1.0)
    p.add_argument("--temp", type=float, required=True)
    p.add_argument("--quadrature-points", type=int, default=96)
    p.add_argument("--per-bond-doubled", action="store_true")
    p.set_defaults(func=cmd_dim2)

    p = sub.add_parser("experiment", parents=[out], help="physical-units checks")
    p.add_argument("--mass-amu", type=float, required=True)
    p.add_argument("--healing-length-um", type=float, default=None)
    p.add_argument("--temperature-nk", type=float, required=True)
    p.add_argument("--mu-frequency-khz", type=float, required=True)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--scattering-length-um", type=float, default=None)
    p.add_argument("--mean-energy-j", type=float, default=None)
    p.add_argument("--reference-wavelength-um", type=float, default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("counterexamples", parents=[out],
                       help="order-vs-entanglement reference states")
    p.add_argument("--n-sites", type=int, default=4, help="GHZ size")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--coherent-sites", type=int, default=4)
    p.set_defaults(func=cmd_counterexamples)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ResourceLimitError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
