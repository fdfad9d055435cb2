"""Report emission: runs.csv, frontier.csv, report.json and scatter plots.

The SVG is hand-built so it stays byte-deterministic and self-contained
(inline attributes, no scripts): one circle per configuration, frontier
points highlighted and joined by a single polyline. A matplotlib rendering
of the same picture is written next to it as PNG.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .bench import BaseCaseResult, ParetoPoint, RunRecord
from .errors import InputError

REPORT_VERSION = 1

CSV_COLUMNS = [
    "dataset_id", "k", "scenario", "case", "codec_d", "codec_f",
    "use_gaps", "bytes_out", "pre_time_s", "post_time_s", "status", "reason",
]


def write_runs_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.dataset_id, r.k, r.scenario, r.case, r.codec_d, r.codec_f,
                "true" if r.use_gaps else "false",
                r.bytes_out, repr(r.pre_time_s), repr(r.post_time_s),
                r.status, r.reason,
            ])


def parse_runs_csv(path) -> list[RunRecord]:
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_COLUMNS:
            raise InputError(f"{path}: unexpected runs.csv header {header}")
        records = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise InputError(f"{path}: malformed row {row}")
            records.append(RunRecord(
                dataset_id=row[0],
                k=int(row[1]),
                scenario=row[2],
                case=row[3],
                codec_d=row[4],
                codec_f=row[5],
                use_gaps=row[6] == "true",
                bytes_out=int(row[7]),
                pre_time_s=float(row[8]),
                post_time_s=float(row[9]),
                status=row[10],
                reason=row[11],
            ))
    return records


def write_frontier_csv(frontier, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "bytes_out", "post_time_s"])
        for p in frontier:
            writer.writerow([p.label, p.bytes, repr(p.time_s)])


def records_to_points(records) -> list[ParetoPoint]:
    return [
        ParetoPoint(r.bytes_out, r.post_time_s, r.label())
        for r in records
        if r.status == "ok"
    ]


def write_report_json(records, frontier, path, base: BaseCaseResult | None = None) -> None:
    doc = {
        "format_version": REPORT_VERSION,
        "bytes_out_includes_manifest": False,
        "records": [
            {
                "dataset_id": r.dataset_id,
                "k": r.k,
                "scenario": r.scenario,
                "case": r.case,
                "codec_d": r.codec_d,
                "codec_f": r.codec_f,
                "use_gaps": r.use_gaps,
                "bytes_out": r.bytes_out,
                "pre_time_s": r.pre_time_s,
                "post_time_s": r.post_time_s,
                "status": r.status,
                "reason": r.reason,
                "label": r.label(),
                "pre_samples": r.pre_samples,
                "post_samples": r.post_samples,
            }
            for r in records
        ],
        "frontier": [
            {"label": p.label, "bytes_out": p.bytes, "post_time_s": p.time_s}
            for p in frontier
        ],
        "base_case": base.to_json() if base is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# Scatter plot ---------------------------------------------------------------

_W, _H = 820, 540
_ML, _MR, _MT, _MB = 90, 25, 25, 60


def _axis_scale(values, log: bool):
    lo, hi = min(values), max(values)
    if log:
        lo = math.log10(max(lo, 1e-12))
        hi = math.log10(max(hi, 1e-12))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e5 or abs(v) < 1e-3:
        return f"{v:.2E}"
    return f"{v:g}"


def write_pareto_svg(points, frontier, path, log_x: bool = False) -> None:
    """Self-contained scatter: bytes on x, post time on y; the frontier is
    drawn red and joined by one polyline."""
    if not points:
        raise InputError("nothing to plot")
    xs = [p.bytes for p in points]
    ys = [p.time_s for p in points]
    x0, x1 = _axis_scale(xs, log_x)
    y0, y1 = _axis_scale(ys, False)

    def sx(v):
        t = math.log10(max(v, 1e-12)) if log_x else v
        return _ML + (t - x0) / (x1 - x0) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y0) / (y1 - y0) * (_H - _MT - _MB)

    frontier_set = {(p.bytes, p.time_s) for p in frontier}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for i in range(5):
        fx = x0 + (x1 - x0) * (0.04 + 0.92 * i / 4)
        vx = 10 ** fx if log_x else fx
        px = sx(vx)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" y2="{_H - _MB + 5}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_H - _MB + 20}" font-size="11" '
            f'font-family="sans-serif" text-anchor="middle">{_fmt_tick(vx)}</text>'
        )
        fy = y0 + (y1 - y0) * (0.04 + 0.92 * i / 4)
        py = sy(fy)
        parts.append(
            f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" y2="{py:.2f}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_ML - 9}" y="{py + 4:.2f}" font-size="11" '
            f'font-family="sans-serif" text-anchor="end">{_fmt_tick(fy)}</text>'
        )
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 15}" font-size="13" '
        'font-family="sans-serif" text-anchor="middle">output bytes on disk'
        f'{" (log)" if log_x else ""}</text>'
    )
    parts.append(
        f'<text x="18" y="{(_MT + _H - _MB) / 2}" font-size="13" '
        f'font-family="sans-serif" text-anchor="middle" '
        f'transform="rotate(-90 18 {(_MT + _H - _MB) / 2})">post-processing time (s)</text>'
    )

    poly = " ".join(
        f"{sx(p.bytes):.2f},{sy(p.time_s):.2f}"
        for p in sorted(frontier, key=lambda p: (p.bytes, p.time_s))
    )
    if poly:
        parts.append(
            f'<polyline class="frontier" points="{poly}" fill="none" '
            'stroke="#d62728" stroke-width="1.5"/>'
        )
    for p in points:
        on_front = (p.bytes, p.time_s) in frontier_set
        color = "#d62728" if on_front else "#6c7a89"
        parts.append(
            f'<circle class="pt" cx="{sx(p.bytes):.2f}" cy="{sy(p.time_s):.2f}" '
            f'r="4" fill="{color}" fill-opacity="0.85"><title>{_esc(p.label)}'
            f"</title></circle>"
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def write_pareto_png(points, frontier, path, log_x: bool = False) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    frontier_set = {(p.bytes, p.time_s) for p in frontier}
    rest = [p for p in points if (p.bytes, p.time_s) not in frontier_set]
    fig, ax = plt.subplots(figsize=(8, 5.2), dpi=120)
    if rest:
        ax.scatter(
            [p.bytes for p in rest], [p.time_s for p in rest],
            s=26, c="#6c7a89", alpha=0.85, label="configurations",
        )
    front_sorted = sorted(frontier, key=lambda p: (p.bytes, p.time_s))
    ax.plot(
        [p.bytes for p in front_sorted], [p.time_s for p in front_sorted],
        "-o", color="#d62728", markersize=5, linewidth=1.4, label="Pareto frontier",
    )
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel("output bytes on disk")
    ax.set_ylabel("post-processing time (s)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def emit_report(
    records,
    frontier,
    out_dir,
    base: BaseCaseResult | None = None,
    log_x: bool = False,
) -> dict[str, Path]:
    """Write runs.csv, frontier.csv, report.json, pareto.svg and pareto.png."""
    records = list(records)
    if not records:
        raise InputError("no run records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "runs": out / "runs.csv",
        "frontier": out / "frontier.csv",
        "report": out / "report.json",
        "svg": out / "pareto.svg",
        "png": out / "pareto.png",
    }
    write_runs_csv(records, paths["runs"])
    write_frontier_csv(frontier, paths["frontier"])
    write_report_json(records, frontier, paths["report"], base)
    points = records_to_points(records)
    if points:
        write_pareto_svg(points, frontier, paths["svg"], log_x)
        write_pareto_png(points, frontier, paths["png"], log_x)
    return paths
