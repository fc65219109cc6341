"""Render figure analogs from a quenchlab CSV bundle.

Rendering is strictly read-only over the bundle; re-rendering a figure from
the same inputs is idempotent.  Every plotted point comes verbatim from an
input CSV row; the only synthetic curves are fit-line overlays, which are
drawn dashed and labelled as fits.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "quenchplots"
import matplotlib.pyplot as plt
import numpy as np

from .figures import (
    FIGURE_IDS,
    FIGURE_SCHEMAS,
    DataFile,
    FigureSpec,
    SchemaError,
    discover_fits,
    discover_inputs,
    read_csv,
    require_columns,
)


def _load_inputs(spec: FigureSpec) -> list[DataFile]:
    needed = FIGURE_SCHEMAS[spec.figure_id]
    files = []
    for path in spec.inputs:
        data = read_csv(Path(path))
        require_columns(data, needed)
        files.append(data)
    return files


def _annotate_empty(ax):
    ax.text(0.5, 0.5, "no data", ha="center", va="center",
            transform=ax.transAxes, fontsize=14, color="gray")


def _series_label(data: DataFile) -> str:
    params = data.label_params
    if "xi" in params and "tau" in params:
        return rf"$\tau$={params['tau']:g}, $\xi$={params['xi']:g}"
    if "xi" in params:
        return rf"$\xi$={params['xi']:g}"
    if "tau" in params:
        return rf"$\tau$={params['tau']:g}"
    return data.path.stem


def _plot_family(ax, files, xcol, ycol, logx=False, logy=False):
    plotted = 0
    for data in files:
        x, y = data.series(xcol), data.series(ycol)
        if len(x) == 0:
            continue
        if data.path.name == "static.csv":
            ax.plot(x, y, "k:", lw=1.2, label="instantaneous")
        else:
            ax.plot(x, y, lw=1.0, label=_series_label(data))
        plotted += len(x)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    if plotted == 0:
        _annotate_empty(ax)
    elif len(files) > 1 or files[0].path.name == "static.csv":
        ax.legend(fontsize=7, frameon=False)
    return plotted


def render(spec: FigureSpec) -> Path:
    """Render one figure to a vector file; returns the output path."""
    files = _load_inputs(spec)
    fig, ax = plt.subplots(figsize=(4.4, 3.3), dpi=150)
    fid = spec.figure_id

    if fid in ("fig1a", "fig2a"):
        _plot_family(ax, files, "h0", "c_nn")
        ax.set_xlabel(r"$h_0(t)$")
        ax.set_ylabel(r"$C_{l,l+1}$")
    elif fid in ("fig1b", "fig2b"):
        _plot_family(ax, files, "h0", "c_nnn")
        ax.set_xlabel(r"$h_0(t)$")
        ax.set_ylabel(r"$C_{l,l+2}$")
    elif fid == "fig3a":
        _plot_family(ax, files, "tau", "c_nn", logx=True)
        ax.set_xlabel(r"$\tau$")
        ax.set_ylabel(r"$\langle C_{l,l+1}\rangle$")
    elif fid == "fig3b":
        _plot_family(ax, files, "tau", "c_nnn", logx=True)
        ax.set_xlabel(r"$\tau$")
        ax.set_ylabel(r"$\langle C_{l,l+2}\rangle$")
    elif fid == "fig4b":
        for data in files:
            tau, c = data.series("tau"), data.series("c_nnn")
            keep = c > 0
            if keep.any():
                ax.plot(np.log(tau[keep]), c[keep], "o-", ms=2.5, lw=0.8,
                        label=_series_label(data))
        if not any(len(d.series("tau")) for d in files):
            _annotate_empty(ax)
        _overlay_log_fits(ax, spec)
        ax.set_xlabel(r"$\ln \tau$")
        ax.set_ylabel(r"$\langle C_{l,l+2}\rangle$")
        ax.legend(fontsize=7, frameon=False)
    elif fid == "fig4a":
        data = files[0]
        xi2, tau_c = data.series("xi2"), data.series("tau_c")
        good = np.isfinite(tau_c) & (tau_c > 0)
        if good.any():
            ax.loglog(xi2[good], tau_c[good], "o", ms=4, label=r"$\tau_c$")
            _overlay_power_fits(ax, spec, xi2[good])
            inset = ax.inset_axes([0.58, 0.58, 0.38, 0.38])
            inset.plot(xi2, data.series("c_max"), "s-", ms=3, lw=0.8)
            inset.set_xlabel(r"$\xi^2$", fontsize=7)
            inset.set_ylabel(r"$\max\,\langle C\rangle$", fontsize=7)
            inset.tick_params(labelsize=6)
        else:
            _annotate_empty(ax)
        ax.set_xlabel(r"$\xi^2$")
        ax.set_ylabel(r"$\tau_c$")
        ax.legend(fontsize=7, frameon=False, loc="lower left")
    elif fid == "fig5":
        for data in files:
            tau, n = data.series("tau"), data.series("defect_density")
            keep = n > 0
            if keep.any():
                ax.loglog(tau[keep], n[keep], "o-", ms=2.5, lw=0.8,
                          label=_series_label(data))
        if not any((d.series("defect_density") > 0).any() for d in files):
            _annotate_empty(ax)
        ax.set_xlabel(r"$\tau$")
        ax.set_ylabel(r"$n_\xi$")
        ax.legend(fontsize=7, frameon=False)

    ax.set_title(fid)
    fig.tight_layout()
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    # drop the volatile creation date so re-rendering is byte-idempotent
    meta = {"Date": None} if out.suffix == ".svg" else None
    fig.savefig(out, metadata=meta)
    plt.close(fig)
    return out


def _load_fit(path: Path) -> dict:
    return json.loads(Path(path).read_text())


def _overlay_log_fits(ax, spec: FigureSpec):
    for path in spec.fits:
        fit = _load_fit(path)
        if fit.get("kind") != "log-scaling":
            continue
        lo, hi = fit["window"]
        u = np.linspace(np.log(lo), np.log(hi), 50)
        ax.plot(u, fit["exponent"] * u + fit["amplitude"], "--", lw=0.8,
                color="gray", label=f"fit {Path(path).stem.split('fit_log_')[-1]}")


def _overlay_power_fits(ax, spec: FigureSpec, x):
    for path in spec.fits:
        fit = _load_fit(path)
        if fit.get("kind") != "power-law":
            continue
        xs = np.geomspace(x.min(), x.max(), 50)
        ax.plot(xs, fit["amplitude"] * xs ** fit["exponent"], "--", lw=0.8,
                color="gray",
                label=rf"fit: slope {fit['exponent']:.3f}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="quenchplots", description="Render figures from a quenchlab CSV bundle."
    )
    parser.add_argument("command", choices=["render"])
    parser.add_argument("--fig", required=True,
                        help=f"figure id, one of {', '.join(FIGURE_IDS)} or 'all'")
    parser.add_argument("--in", dest="bundle", required=True, help="bundle directory")
    parser.add_argument("--out", required=True,
                        help="output image file (or directory for --fig all)")
    args = parser.parse_args(argv)

    bundle = Path(args.bundle)
    if not bundle.is_dir():
        print(f"bundle directory {bundle} does not exist", file=sys.stderr)
        return 2
    fig_ids = FIGURE_IDS if args.fig == "all" else (args.fig,)
    try:
        for fid in fig_ids:
            if fid not in FIGURE_IDS:
                print(f"unknown figure id {fid!r}", file=sys.stderr)
                return 2
            inputs = discover_inputs(fid, bundle)
            if not inputs:
                print(f"{fid}: no matching CSVs in {bundle}", file=sys.stderr)
                return 2
            out = Path(args.out)
            if args.fig == "all":
                out = out / f"{fid}.svg"
            spec = FigureSpec(
                figure_id=fid,
                inputs=tuple(inputs),
                output=out,
                fits=tuple(discover_fits(fid, bundle)),
            )
            path = render(spec)
            print(f"wrote {path}")
    except SchemaError as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
