"""Figure builders for the CLI report kinds.

Uses the Agg backend only; figures are written next to the delimited output
file, never shown.  Each builder takes the same payload dict that goes into
the JSON report, so the figure and the file always agree.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _finish(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _render_superfluid(payload: dict, path: Path) -> Path:
    rep = payload["report"]
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    names = ["fs_kinetic", "fs_curvature", "2 x fs_curvature"]
    vals = [rep["fs_kinetic"], rep["fs_curvature"], 2.0 * rep["fs_curvature"]]
    ax.bar(names, vals, color=["C0", "C1", (0.9, 0.6, 0.2, 0.5)])
    ax.axhline(0.5, color="k", ls="--", lw=0.8, label="witness level 1/2")
    ax.set_ylabel("superfluid fraction")
    ax.legend(frameon=False, fontsize=8)
    ax.tick_params(axis="x", labelsize=8)
    return _finish(fig, path)


def _render_witness(payload: dict, path: Path) -> Path:
    wits = payload.get("witnesses", [])
    rows = payload.get("rows", [])
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    if wits:
        names = [w["witness_name"] for w in wits]
        margins = [w["margin"] for w in wits]
        colors = ["C2" if w["fired"] else "C3" for w in wits]
        ax.barh(names, margins, color=colors)
        ax.axvline(0.0, color="k", lw=0.8)
        ax.set_xlabel("margin (fired when > 0)")
    else:
        names = [r["quantity"] for r in rows]
        vals = [r["value"] for r in rows]
        ax.barh(names, vals, color="C0")
        ax.set_xlabel("value")
    ax.tick_params(axis="y", labelsize=7)
    return _finish(fig, path)


def _render_experiment(payload: dict, path: Path) -> Path:
    freqs = payload["frequencies_hz"]
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    names = list(freqs)
    ax.bar(names, [freqs[k] for k in names], color="C0")
    ax.set_yscale("log")
    ax.set_ylabel("frequency (Hz)")
    ax.tick_params(axis="x", labelsize=8)
    return _finish(fig, path)


def _render_dim2(payload: dict, path: Path) -> Path:
    curve = payload["asymptote_curve"]
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.loglog(curve["beta"], np.abs(curve["u_abs"]), "o-", label="|U| quadrature", ms=3)
    ax.loglog(curve["beta"], curve["asymptote"], "--", label="high-T slope")
    ax.axvline(payload["beta"], color="k", lw=0.8, ls=":")
    ax.set_xlabel("beta")
    ax.set_ylabel("|U|")
    ax.legend(frameon=False, fontsize=8)
    return _finish(fig, path)


def _render_profile(payload: dict, path: Path) -> Path:
    pts = payload["points"]
    r = np.array([p[0] for p in pts], dtype=float)
    v = np.abs(np.array([p[1] for p in pts]))
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    keep = v > 0
    ax.loglog(r[keep], v[keep], "o", ms=3, label="|correlator|")
    if payload.get("fit_poly"):
        p, _ = payload["fit_poly"]
        ref = v[keep][0] * (r[keep] / r[keep][0]) ** (-p)
        ax.loglog(r[keep], ref, "--", label=f"power law p={p:.3f}")
    if payload.get("fit_exp"):
        rate, _ = payload["fit_exp"]
        ref = v[keep][0] * np.exp(-rate * (r[keep] - r[keep][0]))
        ax.loglog(r[keep], ref, ":", label=f"exponential rate={rate:.3f}")
    ax.set_xlabel("r")
    ax.set_ylabel("correlator")
    ax.set_title(payload["classification"], fontsize=9)
    ax.legend(frameon=False, fontsize=8)
    return _finish(fig, path)


def render_report(kind: str, payload: dict, path: Path) -> Path:
    builder = {
        "superfluid": _render_superfluid,
        "witness": _render_witness,
        "experiment": _render_experiment,
        "dim2": _render_dim2,
        "profile": _render_profile,
    }[kind]
    return builder(payload, path)


def render_sweep(table: list[dict], param: str, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    x = [row[param] for row in table]
    skip = {"index", param, "status"}
    numeric_cols = [
        k
        for k in table[0]
        if k not in skip and any(isinstance(row[k], (int, float)) for row in table)
    ]
    for col in numeric_cols:
        y = [row[col] if isinstance(row[col], (int, float)) else np.nan for row in table]
        ax.plot(x, y, "o-", ms=2.5, lw=1.0, label=col)
    ax.set_xlabel(param)
    ax.legend(frameon=False, fontsize=7)
    return _finish(fig, path)
