"""Rendering of conditioning results and relation listings.

Everything here is presentation: the engine's numbers are turned into
a fixed-width ranking table, a delimited ranking file, canonical JSON,
and a pair of figures. Figure rendering imports matplotlib lazily so
plain queries never pay for it.
"""

from __future__ import annotations

import csv
import io
import json
import os

from .conditioning import ObservationSet, PosteriorReport


def canonical_json(obj) -> str:
    """One stable serialization, used verbatim by the CLI and the service."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def fixed_width(header, rows) -> str:
    """Right-aligned whitespace table; header included."""
    table = [list(header)] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(header))]
    lines = [
        "  ".join(cell.rjust(width) for cell, width in zip(line, widths)).rstrip()
        for line in table
    ]
    return "\n".join(lines) + "\n"


def format_relation_rows(columns, rows) -> str:
    return fixed_width(columns, [[row[c] for c in columns] for row in rows])


def format_report_table(report: PosteriorReport) -> str:
    """The ranking table: one row per world, best posterior first."""
    header = ["phi", "upsilon", "tid", report.index_name, report.value_name,
              "Prior", "Posterior"]
    rows = [
        [row.phenomenon, row.upsilon, row.tid, _cell(row.index_value),
         f"{row.predicted:.2f}", f"{row.prior:.3f}", f"{row.posterior:.3f}"]
        for row in report.rows
    ]
    out = fixed_width(header, rows)
    for upsilon, mass in report.aggregates:
        out += f"Pr(upsilon={upsilon}) = {mass:.3f}\n"
    return out


def ranking_csv(report: PosteriorReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["phi", "upsilon", "tid", report.index_name,
                     report.value_name, "prior", "posterior"])
    for row in report.rows:
        writer.writerow([row.phenomenon, row.upsilon, row.tid,
                         repr(row.index_value), repr(row.predicted),
                         repr(row.prior), repr(row.posterior)])
    return out.getvalue()


def _world_label(upsilon, tid) -> str:
    return f"v{upsilon}/t{tid}"


def render_figures(report: PosteriorReport, observations: ObservationSet,
                   series_by_world, out_dir) -> list:
    """Write the posterior bar chart and the prediction overlay.

    ``series_by_world`` maps (hypothesis, trial) to an index -> value
    dict, the same shape conditioning consumes.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []

    labels = [_world_label(r.upsilon, r.tid) for r in report.rows]
    priors = [r.prior for r in report.rows]
    posteriors = [r.posterior for r in report.rows]
    positions = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(labels)), 4.0))
    ax.bar(positions, posteriors, color="#2b6cb0", label="posterior")
    ax.plot(positions, priors, "o", color="#c05621", label="prior")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylabel("probability")
    ax.set_title(f"Worlds of phenomenon {report.phenomenon}, ranked")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "posterior.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    best = max((r.posterior for r in report.rows), default=1.0) or 1.0
    for row in report.rows:
        series = series_by_world[(row.upsilon, row.tid)]
        points = sorted(series.items())
        ax.plot(
            [t for t, _ in points],
            [v for _, v in points],
            alpha=0.25 + 0.75 * row.posterior / best,
            label=_world_label(row.upsilon, row.tid),
        )
    ax.plot(
        [t for t, _ in observations.points],
        [y for _, y in observations.points],
        "ko",
        label=f"observed {report.value_name}",
    )
    ax.set_xlabel(report.index_name)
    ax.set_ylabel(report.value_name)
    ax.set_title("Predicted series against observations")
    if len(report.rows) <= 12:
        ax.legend(fontsize="small", ncol=2)
    fig.tight_layout()
    path = os.path.join(out_dir, "predictions.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths


def write_report_files(report: PosteriorReport, observations: ObservationSet,
                       series_by_world, out_dir) -> list:
    """Materialize ranking.csv, report.json, and both figures."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    path = os.path.join(out_dir, "ranking.csv")
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(ranking_csv(report))
    paths.append(path)
    path = os.path.join(out_dir, "report.json")
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(canonical_json(report.to_obj()))
        stream.write("\n")
    paths.append(path)
    paths.extend(render_figures(report, observations, series_by_world, out_dir))
    return paths
