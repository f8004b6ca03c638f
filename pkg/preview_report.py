#!/usr/bin/env python3
"""
Report preview tool.

Usage:
  python preview_report.py <report.json>     Show an estimation report
  python preview_report.py <results_dir>     Show an experiment summary (summary.csv + manifest.json)
"""

import argparse
import os

import pandas as pd
import ujson
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from estimators import METHOD_LABELS, Method

MAX_SUMMARY_ROWS = 200


def _fmt(value, spec=".4f"):
    if value is None:
        return "-"
    if isinstance(value, float) and value != value:
        return "nan"
    return format(value, spec)


def _vector(values, spec=".4f"):
    if values is None:
        return "-"
    return ", ".join(_fmt(v, spec) for v in values)


def estimates_table(estimates, title="Estimates"):
    """Table of EstimationReport dicts, one row per method."""
    table = Table(title=title, border_style="blue")
    table.add_column("Method", style="cyan")
    table.add_column("Coefficients", style="white", justify="right")
    table.add_column("Noise var", style="white", justify="right")
    table.add_column("Bootstrap SE", style="white", justify="right")
    table.add_column("Error", style="white", justify="right")
    table.add_column("Flags", style="yellow")
    for est in estimates:
        label = est.get("label") or METHOD_LABELS[Method(est["method"])]
        if "window" in est.get("diagnostics", {}):
            label = f"{label} (w={est['diagnostics']['window']})"
        if est.get("error_message"):
            table.add_row(label, "-", "-", "-", "-", f"[red]{est['error_message']}[/red]")
            continue
        flags = "; ".join(est.get("diagnostics", {}).get("warnings", []))
        table.add_row(
            label,
            _vector(est["coeffs"]),
            _fmt(est.get("noise_var")),
            _vector(est.get("bootstrap_se")),
            _vector(est.get("coeff_error")),
            flags,
        )
    return table


def show_report(report, console=None):
    """Render a report produced by the estimate or residuals command."""
    console = console or Console()
    info = Table(show_header=False, box=None, padding=(0, 2))
    info.add_column(style="bold cyan")
    info.add_column(style="white")
    info.add_row("Input", str(report.get("input", "-")))
    info.add_row("Series length", f"{report.get('n', 0):,}")
    info.add_row("Order p", str(report.get("p", "-")))
    if "seed" in report:
        info.add_row("Seed", str(report["seed"]))
    if report.get("truth"):
        info.add_row("True coefficients", _vector(report["truth"]["model"]["coeffs"]))
    if report.get("changepoints") is not None:
        info.add_row("Changepoints", ", ".join(str(t) for t in report["changepoints"]) or "none")
    console.print()
    console.print(Panel(info, title=f"[bold]{report.get('command', 'report')}[/bold]", border_style="blue"))

    if report.get("estimates"):
        console.print(estimates_table(report["estimates"]))
    detection = report.get("detection")
    if detection:
        times = detection["changepoint_times"]
        console.print(f"[bold]{detection['detector'].upper()}[/bold] on residuals: "
                      f"{len(times)} changepoint(s) at {', '.join(str(t) for t in times) or '-'}")


def summary_table(summary, title="Summary"):
    """Render a summary DataFrame, one row per cell and estimator / detector."""
    table = Table(title=title, border_style="blue")
    for i, col in enumerate(summary.columns):
        table.add_column(str(col), style="cyan" if i == 0 else "white", justify="right")
    for _, row in summary.head(MAX_SUMMARY_ROWS).iterrows():
        table.add_row(*[_fmt(v, ".4g") if isinstance(v, float) else str(v) for v in row])
    return table


def show_experiment(summary, manifest=None, runtime=None, console=None):
    console = console or Console()
    title = "experiment"
    if manifest:
        spec = manifest["spec"]
        title = spec["design"]
        info = Table(show_header=False, box=None, padding=(0, 2))
        info.add_column(style="bold cyan")
        info.add_column(style="white")
        info.add_row("Series lengths", ", ".join(f"{n:,}" for n in spec["ns"]))
        info.add_row("Replications", f"{spec['reps']:,}")
        info.add_row("Seed", str(manifest["seed"]))
        for key, value in sorted(manifest.get("extras", {}).items()):
            info.add_row(key, ", ".join(f"{k}: {_fmt(v, '.4g')}" for k, v in value.items()))
        if runtime is not None:
            info.add_row("Runtime", f"{runtime:.1f}s")
        console.print()
        console.print(Panel(info, title=f"[bold]{title}[/bold]", border_style="blue"))
    console.print(summary_table(summary, title=f"{title} summary"))
    if len(summary) > MAX_SUMMARY_ROWS:
        console.print(f"[yellow]Showing {MAX_SUMMARY_ROWS} of {len(summary):,} rows[/yellow]")


def preview(path, console=None):
    console = console or Console()
    if os.path.isdir(path):
        summary_path = os.path.join(path, "summary.csv")
        manifest_path = os.path.join(path, "manifest.json")
        if not os.path.exists(summary_path):
            console.print(f"[red]Error: {summary_path} not found[/red]")
            return False
        manifest = None
        if os.path.exists(manifest_path):
            with open(manifest_path) as f:
                manifest = ujson.load(f)
        show_experiment(pd.read_csv(summary_path), manifest, console=console)
        return True
    if not os.path.exists(path):
        console.print(f"[red]Error: {path} not found[/red]")
        return False
    with open(path) as f:
        show_report(ujson.load(f), console=console)
    return True


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Report preview tool",
    )
    parser.add_argument("path", help="Report JSON written by diffyw.py, or an experiment output directory")

    args = parser.parse_args()
    preview(args.path)
