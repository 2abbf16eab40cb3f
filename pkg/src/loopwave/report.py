"""Analysis reports: assembly, text rendering, stable JSON encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .labels import LabelStore, dump_labels, pred_labels, vertex_labels
from .parallel import LoopVerdict
from .refs import sorted_refs


@dataclass
class Report:
    program: str
    verdicts: list[LoopVerdict] = field(default_factory=list)
    store: Optional[LabelStore] = None
    notes: list[str] = field(default_factory=list)
    error: Optional[str] = None
    with_labels: bool = False


def _pass_rows(store: LabelStore) -> list[dict]:
    return [
        {
            "name": name,
            "outerPasses": stats.outer_passes,
            "edgeFirings": stats.edge_firings,
        }
        for name, stats in store.stats.items()
    ]


def _verdict_obj(v: LoopVerdict) -> dict:
    return {
        "header": v.header,
        "class": v.verdict,
        "private": sorted(v.private_vars),
        "copyIn": [r.display() for r in sorted_refs(v.copy_in)],
        "reductions": [{"var": f.var, "op": f.op} for f in v.reductions],
        "inhibitors": [
            {
                "kind": w.kind,
                "source": w.src_vid,
                "target": w.dst_vid,
                "refs": [w.src.display(), w.dst.display()],
            }
            for w in v.inhibitors
        ],
    }


def emit_json(report: Report) -> str:
    """Deterministic machine-readable encoding (fixed key order, sorted sets)."""
    obj: dict = {"program": report.program}
    if report.error is not None:
        obj["error"] = report.error
        obj["loops"] = []
        obj["passes"] = []
        obj["notes"] = list(report.notes)
        return json.dumps(obj, indent=2)
    obj["loops"] = [_verdict_obj(v) for v in report.verdicts]
    obj["passes"] = _pass_rows(report.store) if report.store else []
    if report.with_labels and report.store is not None:
        labels = {}
        store = report.store
        for vid in store.g.statement_vids():
            q = vertex_labels(store, vid)
            labels[f"v{vid}"] = {
                "text": store.g.vertices[vid].text,
                "I": [r.display() for r in sorted_refs(q.i)],
                "O": [r.display() for r in sorted_refs(q.o)],
                "D": [r.display() for r in sorted_refs(q.d)],
                "F": [r.display() for r in sorted_refs(q.f)],
                "Pr": pred_labels(store, vid),
            }
        obj["labels"] = labels
    obj["notes"] = list(report.notes) + (report.store.notes if report.store else [])
    return json.dumps(obj, indent=2)


def render_text(report: Report) -> str:
    lines = [f"== {report.program} =="]
    if report.error is not None:
        lines.append(f"error: {report.error}")
        return "\n".join(lines) + "\n"
    if not report.verdicts:
        lines.append("no loops")
    for v in report.verdicts:
        head = report.store.g.vertices[v.header].text if report.store else ""
        lines.append(f"loop@v{v.header} [{head}]: {v.verdict}")
        if v.private_vars:
            lines.append(f"  private: {', '.join(sorted(v.private_vars))}")
        if v.copy_in:
            lines.append(
                "  copy-in: " + ", ".join(r.display() for r in sorted_refs(v.copy_in))
            )
        for f in v.reductions:
            lines.append(f"  reduction: {f.display()}")
        for w in v.inhibitors:
            lines.append(f"  inhibitor {w.display()}")
    if report.store is not None:
        for name, stats in report.store.stats.items():
            lines.append(
                f"pass {name}: sweeps={stats.outer_passes} firings={stats.edge_firings}"
            )
    if report.with_labels and report.store is not None:
        lines.append("-- labels --")
        lines.extend(dump_labels(report.store))
    for n in report.notes + (report.store.notes if report.store else []):
        lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"
