"""Table rendering for metrics documents: stdout summaries and CSV exports.

Operates on the plain-dict metrics shape returned by the service, so the CLI
can render straight from a response body. Table layouts mirror the standard
accuracy and fault-detection reports.
"""

from __future__ import annotations

import csv
import io
from typing import Any

TYPE_DISPLAY = {
    "PATIENT_DATA": "Patient Data",
    "DIAGNOSIS": "Diagnosis",
    "TREATMENT_PLAN": "Treatment Plan",
    "EMERGENCY_ALERT": "Emergency Alert",
}
ATTACK_DISPLAY = {
    "BAD_SIGNER": "Invalid Signature",
    "STALE_STAMPER": "Expired Timestamp",
    "MALFORMER": "Malformed Content",
}


def _pct(fraction: float | None) -> str:
    if fraction is None:
        return "n/a"
    return f"{fraction * 100:g}%"


def _type_rows(metrics: dict[str, Any]) -> list[tuple[str, int, int, str]]:
    rows = []
    for key, display in TYPE_DISPLAY.items():
        stats = metrics["per_type"].get(key)
        if stats is None:
            continue
        rows.append((display, stats["total"], stats["accepted"], _pct(stats["accuracy"])))
    totals = metrics["totals"]
    rows.append(("Total", totals["total"], totals["accepted"], _pct(totals["accuracy"])))
    return rows


def _attack_rows(metrics: dict[str, Any]) -> list[tuple[str, int, str]]:
    rows = []
    for key, display in ATTACK_DISPLAY.items():
        stats = metrics["per_attack"].get(key)
        if stats is None:
            continue
        rejected = f"{stats['rejected']} ({_pct(stats['detection_rate'])})"
        rows.append((display, stats["injected"], rejected))
    totals = metrics["attack_totals"]
    rows.append(
        ("Total", totals["injected"], f"{totals['rejected']} ({_pct(totals['detection_rate'])})")
    )
    return rows


def _render_text(headers: list[str], rows: list[tuple]) -> str:
    table = [headers] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(row[col]) for row in table) for col in range(len(headers))]
    lines = []
    for i, row in enumerate(table):
        lines.append(
            "  ".join(
                cell.ljust(widths[col]) if col == 0 else cell.rjust(widths[col])
                for col, cell in enumerate(row)
            )
        )
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def type_table_text(metrics: dict[str, Any]) -> str:
    return _render_text(
        ["Message Type", "Total", "Accepted", "Accuracy"], _type_rows(metrics)
    )


def attack_table_text(metrics: dict[str, Any]) -> str:
    return _render_text(["Attack Type", "Injected", "Rejected"], _attack_rows(metrics))


def _csv(headers: list[str], rows: list[tuple]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return out.getvalue()


def type_table_csv(metrics: dict[str, Any]) -> str:
    return _csv(["Message Type", "Total", "Accepted", "Accuracy"], _type_rows(metrics))


def attack_table_csv(metrics: dict[str, Any]) -> str:
    return _csv(["Attack Type", "Injected", "Rejected"], _attack_rows(metrics))


SWEEP_COLUMNS = [
    "n",
    "f",
    "threshold",
    "mean_gossip_sends",
    "max_gossip_sends",
    "mean_latency_ms",
    "p95_latency_ms",
    "mean_coverage",
]


def sweep_csv(rows: list[dict[str, Any]]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({col: row.get(col) for col in SWEEP_COLUMNS})
    return out.getvalue()


def sweep_table_text(rows: list[dict[str, Any]]) -> str:
    display = [
        (
            row["n"],
            row["f"],
            row["threshold"],
            f"{row['mean_gossip_sends']:.1f}",
            f"{row['mean_latency_ms']:.1f}",
            f"{row['mean_coverage']:.3f}",
        )
        for row in rows
    ]
    return _render_text(
        ["n", "f", "threshold", "sends/msg", "latency_ms", "coverage"], display
    )


def run_summary_text(metrics: dict[str, Any]) -> str:
    """Human summary printed after a run: tables plus headline aggregates."""
    parts = [type_table_text(metrics)]
    if metrics["per_attack"]:
        parts.append("")
        parts.append(attack_table_text(metrics))
    latency = metrics["latency_ms"]
    coverage = metrics["coverage"]
    parts.append("")
    parts.append(
        f"coverage mean={_fmt(coverage['mean'])} min={_fmt(coverage['min'])}  "
        f"latency mean={_fmt(latency['mean'])}ms p95={_fmt(latency['p95'])}ms  "
        f"sends/msg mean={_fmt(metrics['gossip_sends']['mean'])}"
    )
    return "\n".join(parts)


def _fmt(value: float | int | None) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)
