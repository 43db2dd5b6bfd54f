"""End-to-end procedure: load data, train, extract samples, compare, export."""
from .analysis import (
    AnalysisReport,
    Comparison,
    ModelReport,
    ScatterResult,
    analyze_model,
    bootstrap_scatter,
    compare_manifolds,
    diagram_of,
    extract_manifolds,
    run_analysis,
    scatter_score,
)
from .data import HEADER, Dataset, load_csv, normal_subsample
from .report import export_report, load_report, read_diagram, write_barcode, write_diagram
from .training import TrainResult, batch_loss, decode, encode, init_models, train

__all__ = [
    "AnalysisReport", "Comparison", "Dataset", "HEADER", "ModelReport", "ScatterResult",
    "TrainResult", "analyze_model", "batch_loss", "bootstrap_scatter", "compare_manifolds",
    "decode", "diagram_of", "encode", "export_report", "extract_manifolds", "init_models",
    "load_csv", "load_report", "normal_subsample", "read_diagram", "run_analysis",
    "scatter_score", "train", "write_barcode", "write_diagram",
]
