"""Report rendering: machine-readable bound reports plus summary figures.

The report path writes one JSON object per line (the stable schema used by
the suite), a CSV with the same rows, and a set of PNG figures: observed
versus bound cost over the whole population, and the cost curves of the two
case studies.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import pcf_machine, workbench
from .extract import extract_cbv
from .pcf_lang import App, Num, Strategy
from .sized_model import Fin, SizedModel
from .workbench import (INF, exp_term, fig_recurrence_term, list_literal,
                        mergesort_term)

FIG_DPI = 150


def write_jsonl(reports, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_json_dict()) + "\n")


def write_csv(reports, path: str):
    fields = ["id", "strategy", "observed_cost", "bound_cost", "verdict", "fuel"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for r in reports:
            writer.writerow(r.to_json_dict())


def _style(ax, title, xlabel, ylabel):
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)


def fig_bounds_scatter(reports, path: str):
    """Observed vs bound cost; everything at or above the diagonal is fine."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    markers = {"cbv": ("tab:blue", "o"), "cbn": ("tab:orange", "^")}
    for strategy, (color, marker) in markers.items():
        xs, ys = [], []
        for r in reports:
            if r.strategy != strategy:
                continue
            if r.observed_cost == INF or r.bound_cost == INF:
                continue
            xs.append(r.observed_cost + 1)
            ys.append(r.bound_cost + 1)
        ax.scatter(xs, ys, s=14, alpha=0.6, c=color, marker=marker,
                   label=f"{strategy} ({len(xs)})")
    lim = ax.get_xlim()[1]
    hi = max(lim, ax.get_ylim()[1], 10)
    ax.plot([1, hi], [1, hi], "k--", lw=1, label="bound = observed")
    ax.set_xscale("log")
    ax.set_yscale("log")
    _style(ax, "Bound vs observed cost (+1, log-log)",
           "observed cost + 1", "bound cost + 1")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def exp_cost_curve(points, fuel: int = workbench.DEFAULT_FUEL,
                   denote_fuel: int = 100):
    """(n, observed, bound) rows for the exponentiation case study.

    The bound is for the applied program, i.e. one application unit on top
    of the recurrence's cost component."""
    fn = exp_term()
    model = SizedModel(denote_fuel)
    pot = model.project(model.denote(extract_cbv(fn).term), 2)
    rows = []
    for n in points:
        outcome = pcf_machine.eval_pcf(App(fn, Num(n)), Strategy.CBV, fuel)
        tn = model.project(model.apply(pot, Fin(n)), 1)
        rows.append((n, outcome.cost, tn.n + 1))
    return rows


def mergesort_cost_curve(lengths, fuel: int = workbench.DEFAULT_FUEL,
                         denote_fuel: int = 100):
    """(n, observed, extracted bound, stub recurrence) rows for merge sort.

    The extracted bound comes from the concrete program and must dominate
    the observed cost; the stub recurrence (unit-cost divide/merge) is the
    idealized curve and sits below both."""
    sort_fn = mergesort_term()
    model = SizedModel(denote_fuel)
    rec_fun = model.denote(fig_recurrence_term())
    rows = []
    for n in lengths:
        xs = list_literal(range(n, 0, -1))  # reverse-sorted input
        prog = App(sort_fn, xs)
        outcome = pcf_machine.eval_pcf(prog, Strategy.CBV, fuel)
        per_prog = SizedModel(denote_fuel)
        bound_cost = per_prog.project(per_prog.denote(extract_cbv(prog).term), 1)
        tn = model.project(model.apply(rec_fun, Fin(n)), 1)
        rows.append((n, outcome.cost, bound_cost.n, tn.n))
    return rows


def _curve_figure(rows, title, series, path):
    """rows: (n, y1, y2, ...) tuples; series: label/style pairs for the ys."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ns = [r[0] for r in rows]
    for idx, (label, style) in enumerate(series, start=1):
        ax.plot(ns, [r[idx] for r in rows], style, label=label)
    _style(ax, title, "input size n", "cost")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def write_report(result: workbench.SuiteResult, outdir: str,
                 fuel: int = workbench.DEFAULT_FUEL) -> dict:
    """Write JSONL + CSV + figures; returns the paths written."""
    os.makedirs(outdir, exist_ok=True)
    paths = {}

    paths["jsonl"] = os.path.join(outdir, "bound_reports.jsonl")
    write_jsonl(result.reports, paths["jsonl"])
    paths["csv"] = os.path.join(outdir, "bound_reports.csv")
    write_csv(result.reports, paths["csv"])

    paths["scatter"] = os.path.join(outdir, "bounds_scatter.png")
    fig_bounds_scatter(result.reports, paths["scatter"])

    exp_rows = exp_cost_curve((0, 1, 2, 4, 8, 16, 32, 64), fuel)
    paths["exp"] = os.path.join(outdir, "exp_cost.png")
    _curve_figure(exp_rows, "Squaring exponentiation: cost and its bound",
                  [("observed cost", "o-"), ("denoted bound", "s--")],
                  paths["exp"])

    ms_rows = mergesort_cost_curve((0, 1, 2, 4, 8, 16, 24, 32), fuel)
    paths["mergesort"] = os.path.join(outdir, "mergesort_cost.png")
    _curve_figure(ms_rows, "Merge sort: cost, bound, and the stub recurrence",
                  [("observed cost", "o-"), ("extracted bound", "s--"),
                   ("stub recurrence (c=d=1)", "^:")],
                  paths["mergesort"])
    return paths
