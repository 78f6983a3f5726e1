"""Write an :class:`~algebrarium.analytics.AnalysisReport` to disk.

CSV tables carry one ``#`` metadata line (config hash, seed and any extra
key/value pairs) followed by a header row. Plots are static SVGs rendered
with a fixed hash salt and no date stamp so reruns produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analytics import (  # noqa: E402
    AnalysisReport, BarrierFit, EmergenceReport, PassKCurve, ProcessOutcome, ShiftRecord,
)
from .response_eval import State  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "algebrarium"

CSV_NAMES = (
    "curves.csv", "classification.csv", "barrier.csv",
    "correlation.csv", "emergence.csv", "shifts.csv",
)


def _meta_line(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def _write_csv(path: Path, meta: dict, header: list, rows: list) -> None:
    buf = io.StringIO()
    buf.write(_meta_line(meta) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> tuple[str, list]:
    """Return ``(metadata_line, rows_as_dicts)`` for a report CSV."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ---------------------------------------------------------------- writers ---

def _curves(out: Path, meta: dict, theo: PassKCurve, emp: PassKCurve, mse: float, plots: bool) -> None:
    rows = [[k, _fmt(t), _fmt(e)] for k, t, e in zip(theo.ks, theo.values, emp.values)]
    _write_csv(out / "curves.csv", {**meta, "mse": _fmt(mse)}, ["k", "theoretical", "empirical"], rows)
    if not plots:
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(theo.ks, theo.values, "-", label="theoretical")
    ax.plot(emp.ks, emp.values, "o", label="empirical")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("k")
    ax.set_ylabel("Pass@k")
    ax.set_title(f"Pass@k (MSE {mse:.2e})")
    ax.legend()
    _save(fig, out / "curves.svg")


def _classification(out: Path, meta: dict, census: dict, plots: bool) -> None:
    rows = []
    for (domain, depth), counts in census.items():
        rows.append([domain, depth, sum(counts.values())] + [counts[s] for s in State])
    _write_csv(out / "classification.csv", meta,
               ["domain", "depth", "tasks"] + [s.value.lower() for s in State], rows)
    if not plots:
        return
    fig, ax = plt.subplots(figsize=(6, 3.5))
    labels = [f"{d}:{n}" for (d, n) in census]
    bottom = [0] * len(labels)
    for s in State:
        vals = [c[s] for c in census.values()]
        ax.bar(labels, vals, bottom=bottom, label=s.value)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_ylabel("tasks")
    ax.tick_params(axis="x", labelrotation=90, labelsize=6)
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, out / "classification.svg")


def _barrier(out: Path, meta: dict, points: dict, fits: dict, plots: bool) -> None:
    rows = []
    for scope, pts in points.items():
        fit: Optional[BarrierFit] = fits.get(scope)
        for depth, prob in pts:
            rows.append([
                scope, depth, _fmt(prob),
                _fmt(fit.predict(depth)) if fit else "",
                _fmt(fit.p_hat_fit) if fit else "",
                _fmt(fit.residual_rms) if fit else "",
                fit.points_used if fit else "",
                fit.dropped_zero_points if fit else "",
            ])
    _write_csv(out / "barrier.csv", meta,
               ["scope", "depth", "observed", "predicted", "p_hat_fit",
                "residual_rms", "points_used", "dropped_zero_points"], rows)
    if not plots:
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for scope, pts in points.items():
        xs = [d for d, _ in pts]
        line, = ax.plot(xs, [p for _, p in pts], "o", label=scope)
        if scope in fits:
            ax.plot(xs, [fits[scope].predict(d) for d in xs], "--", color=line.get_color())
    ax.set_xlabel("operations N")
    ax.set_ylabel("success rate")
    ax.set_title("Multiplicative barrier (dashed: p^N fit)")
    ax.legend(fontsize=7)
    _save(fig, out / "barrier.svg")


def _correlation(out: Path, meta: dict, rows_in: list, rho: Optional[float], plots: bool) -> None:
    rows = [[r.task_id, r.domain, r.depth, _fmt(r.joint), _fmt(r.outcome)] for r in rows_in]
    _write_csv(out / "correlation.csv", {**meta, "pearson": _fmt(rho)},
               ["task_id", "domain", "depth", "joint", "outcome"], rows)
    if not plots:
        return
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter([r.joint for r in rows_in], [r.outcome for r in rows_in], s=8)
    ax.plot([0, 1], [0, 1], ":", color="grey")
    ax.set_xlabel("joint step accuracy")
    ax.set_ylabel("outcome accuracy")
    ax.set_title("Process vs outcome" + (f" (rho={rho:.3f})" if rho is not None else ""))
    _save(fig, out / "correlation.svg")


def _emergence(out: Path, meta: dict, em: EmergenceReport, plots: bool) -> None:
    rows = [
        ["null_count_base", em.null_count_base],
        ["recovered_count", em.recovered_count],
        ["recovery_rate", _fmt(em.recovery_rate)],
        ["recovered_mean", _fmt(em.recovered_mean)],
        ["recovered_median", _fmt(em.recovered_median)],
    ]
    edges = em.bin_edges
    for i, count in enumerate(em.histogram):
        rows.append([f"hist[{edges[i]:.1f},{edges[i + 1]:.1f})", count])
    _write_csv(out / "emergence.csv", meta, ["metric", "value"], rows)
    if not plots:
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar([(a + b) / 2 for a, b in zip(edges, edges[1:])], em.histogram, width=0.09)
    ax.set_xlabel("post-training success rate of recovered tasks")
    ax.set_ylabel("tasks")
    ax.set_title(f"Recovered {em.recovered_count}/{em.null_count_base} Null tasks")
    _save(fig, out / "emergence.svg")


def _shifts(out: Path, meta: dict, shifts: list, eroded: int, plots: bool) -> None:
    rows = [[s.skill_id, _fmt(s.base_acc), _fmt(s.delta)] for s in shifts]
    _write_csv(out / "shifts.csv", {**meta, "eroded": eroded}, ["skill_id", "base_acc", "delta"], rows)
    if not plots:
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.scatter([s.base_acc for s in shifts], [s.delta for s in shifts], s=8)
    ax.axhline(0.0, color="grey", lw=0.8)
    ax.set_xlabel("base accuracy")
    ax.set_ylabel("delta (post - base)")
    ax.set_title(f"Atomic shifts ({eroded} eroded)")
    _save(fig, out / "shifts.svg")


def emit_report(report: AnalysisReport, outdir, meta: Optional[dict] = None, plots: bool = True) -> list:
    """Write every table the report can fill (plus SVGs when ``plots``); return written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    meta = dict(meta or {})
    if report.theoretical is not None:
        _curves(out, meta, report.theoretical, report.empirical, report.curve_mse, plots)
    if report.census:
        _classification(out, meta, report.census, plots)
    if report.barrier_points:
        _barrier(out, meta, report.barrier_points, report.barrier_fits, plots)
    _correlation(out, meta, report.correlation_rows, report.correlation, plots)
    if report.emergence is not None:
        _emergence(out, meta, report.emergence, plots)
    if report.shifts is not None:
        _shifts(out, meta, report.shifts, report.erosion_count or 0, plots)
    return sorted(p for p in out.iterdir() if p.suffix in (".csv", ".svg"))


# ------------------------------------------------------------ json dump ---

def report_to_json(report: AnalysisReport) -> dict:
    """Plain-JSON form of a report (used as ``analysis.json``)."""
    return {
        "curve_mse": report.curve_mse,
        "theoretical": asdict(report.theoretical) if report.theoretical else None,
        "empirical": asdict(report.empirical) if report.empirical else None,
        "census": [
            {"domain": dom, "depth": depth, **{s.value: c[s] for s in State}}
            for (dom, depth), c in report.census.items()
        ],
        "barrier_points": {k: [list(p) for p in v] for k, v in report.barrier_points.items()},
        "barrier_fits": {k: asdict(v) for k, v in report.barrier_fits.items()},
        "correlation": report.correlation,
        "correlation_rows": [asdict(r) for r in report.correlation_rows],
        "emergence": asdict(report.emergence) if report.emergence else None,
        "shifts": [asdict(s) for s in report.shifts] if report.shifts is not None else None,
        "erosion_count": report.erosion_count,
    }


def report_from_json(d: dict) -> AnalysisReport:
    census = {}
    for row in d.get("census", []):
        census[(row["domain"], row["depth"])] = {s: row[s.value] for s in State}
    curve = lambda c: PassKCurve(tuple(c["ks"]), tuple(c["values"]), c["kind"]) if c else None
    em = d.get("emergence")
    return AnalysisReport(
        theoretical=curve(d.get("theoretical")),
        empirical=curve(d.get("empirical")),
        curve_mse=d.get("curve_mse"),
        census=census,
        barrier_points={k: [tuple(p) for p in v] for k, v in d.get("barrier_points", {}).items()},
        barrier_fits={k: BarrierFit(**v) for k, v in d.get("barrier_fits", {}).items()},
        correlation_rows=[ProcessOutcome(**r) for r in d.get("correlation_rows", [])],
        correlation=d.get("correlation"),
        emergence=EmergenceReport(**{**em, "histogram": tuple(em["histogram"]),
                                     "bin_edges": tuple(em["bin_edges"])}) if em else None,
        shifts=[ShiftRecord(**s) for s in d["shifts"]] if d.get("shifts") is not None else None,
        erosion_count=d.get("erosion_count"),
    )


def write_report_json(path, report: AnalysisReport) -> None:
    Path(path).write_text(json.dumps(report_to_json(report), indent=1) + "\n", encoding="utf-8")
