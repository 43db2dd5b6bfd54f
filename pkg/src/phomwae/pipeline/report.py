"""Writing and reading analysis reports.

Directory layout::

    report.json            scalars, config snapshot, file index
    summary.csv            model,comparison,aggregation,value,seed
    diagrams/<model>_<sample>.csv   dim,birth,death  (death "inf" if essential)
    barcodes/<model>_<sample>.csv   same columns, grouped by dim, sorted by birth

Floats are written with ``repr`` so reading a report back is exact.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from ..errors import InputError
from ..persistence import INF, PersistenceDiagram, PersistencePair, barcodes
from .analysis import AnalysisReport, ModelReport

DIAGRAM_HEADER = ["dim", "birth", "death"]
SUMMARY_HEADER = ["model", "comparison", "aggregation", "value", "seed"]


def _fmt(x: float) -> str:
    return "inf" if x == INF else repr(float(x))


def write_diagram(path, diag: PersistenceDiagram) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DIAGRAM_HEADER)
        for p in diag.pairs:
            w.writerow([p.dim, _fmt(p.birth), _fmt(p.death)])


def write_barcode(path, diag: PersistenceDiagram) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DIAGRAM_HEADER)
        for dim, bars in barcodes(diag).intervals.items():
            for b, d in bars:
                w.writerow([dim, _fmt(b), _fmt(d)])


def read_diagram(path, threshold: float = INF) -> PersistenceDiagram:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != DIAGRAM_HEADER:
        raise InputError(f"{path}: expected header {','.join(DIAGRAM_HEADER)}")
    pairs = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            dim, birth, death = row
            pairs.append(PersistencePair(int(dim), float(birth), float(death)))
        except ValueError:
            raise InputError(f"{path}: line {lineno}: cannot parse {row!r}") from None
    return PersistenceDiagram(tuple(pairs), threshold)


def summary_rows(report: AnalysisReport) -> list[list]:
    rows = []
    for m in report.models:
        rows.append([m.model, "original_vs_reconstructed", report.aggregation, m.bottleneck, report.seed])
        for dim, v in sorted(m.per_dim.items()):
            rows.append([m.model, "original_vs_reconstructed", f"dim{dim}", v, report.seed])
        rows.append([m.model, "latent_scatter_mean", report.aggregation, m.scatter_mean, report.seed])
        rows.append([m.model, "latent_scatter_max", report.aggregation, m.scatter_max, report.seed])
    return rows


def export_report(report: AnalysisReport, out_dir) -> Path:
    out = Path(out_dir)
    (out / "diagrams").mkdir(parents=True, exist_ok=True)
    (out / "barcodes").mkdir(parents=True, exist_ok=True)
    models = []
    for m in report.models:
        files = {}
        for name, diag in sorted(m.diagrams.items()):
            dpath = f"diagrams/{m.model}_{name}.csv"
            bpath = f"barcodes/{m.model}_{name}.csv"
            write_diagram(out / dpath, diag)
            write_barcode(out / bpath, diag)
            files[name] = {"diagram": dpath, "barcode": bpath, "threshold": diag.threshold}
        models.append({
            "model": m.model,
            "bottleneck": m.bottleneck,
            "per_dim": {str(k): v for k, v in sorted(m.per_dim.items())},
            "scatter_mean": m.scatter_mean,
            "scatter_max": m.scatter_max,
            "final_loss": m.final_loss,
            "files": files,
        })
    meta = {
        "seed": report.seed,
        "aggregation": report.aggregation,
        "k": report.k,
        "rounds": report.rounds,
        "fraction": report.fraction,
        "include_fraud": report.include_fraud,
        "config": report.config,
        "models": models,
    }
    (out / "report.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    with (out / "summary.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for model, comparison, agg, value, seed in summary_rows(report):
            w.writerow([model, comparison, agg, _fmt(value), seed])
    return out


def load_report(out_dir) -> AnalysisReport:
    out = Path(out_dir)
    try:
        meta = json.loads((out / "report.json").read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{out / 'report.json'}: {exc}") from exc
    models = []
    for m in meta["models"]:
        diagrams = {
            name: read_diagram(out / f["diagram"], f["threshold"]) for name, f in m["files"].items()
        }
        models.append(ModelReport(
            m["model"], m["bottleneck"], {int(k): v for k, v in m["per_dim"].items()},
            m["scatter_mean"], m["scatter_max"], m["final_loss"], diagrams,
        ))
    return AnalysisReport(
        meta["seed"], meta["aggregation"], meta["k"], meta["rounds"], meta["fraction"],
        meta["include_fraud"], meta["config"], tuple(models),
    )
