"""Command-line entry point: ``phomwae {train,diagram,bottleneck,scatter,report}``.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bottleneck import AGGREGATIONS, aggregate, per_dimension
from .errors import InputError, NumericalError
from .neural import load_checkpoint, save_checkpoint
from .objectives import KERNELS, MODELS, KernelConfig, TrainConfig
from .pipeline import (
    bootstrap_scatter,
    diagram_of,
    export_report,
    extract_manifolds,
    load_csv,
    normal_subsample,
    read_diagram,
    run_analysis,
    train,
    write_barcode,
    write_diagram,
)

log = logging.getLogger("phomwae")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("training config (flags override --config)")
    g.add_argument("--config", type=Path, help="JSON config file")
    g.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    g.add_argument("--model", choices=MODELS)
    g.add_argument("--lam", type=float)
    g.add_argument("--lr", type=float)
    g.add_argument("--beta1", type=float)
    g.add_argument("--beta2", type=float)
    g.add_argument("--batch", type=int)
    g.add_argument("--latent-dim", type=int, dest="latent_dim")
    g.add_argument("--hidden", type=lambda s: tuple(int(v) for v in s.split(",")),
                   help="comma-separated hidden widths, e.g. 32,16")
    g.add_argument("--epochs", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--kernel", choices=KERNELS)
    g.add_argument("--kernel-scale", type=float, dest="kernel_scale")


def _config(args) -> TrainConfig:
    base = {}
    if args.config:
        try:
            base = json.loads(args.config.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.config}: {exc}") from None
    cfg = TrainConfig.from_dict(base)
    overrides = {
        k: getattr(args, k)
        for k in ("model", "lam", "lr", "beta1", "beta2", "batch", "latent_dim", "hidden", "epochs", "seed")
        if getattr(args, k, None) is not None
    }
    if args.kernel is not None or args.kernel_scale is not None:
        overrides["kernel"] = KernelConfig(
            args.kernel or cfg.kernel.family,
            args.kernel_scale if args.kernel_scale is not None else cfg.kernel.scale,
        )
    return replace(cfg, **overrides)


def _dump(cfg: TrainConfig) -> None:
    print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))


def _read_points(path: Path) -> np.ndarray:
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows:
        try:
            [float(v) for v in rows[0]]
        except ValueError:
            rows = rows[1:]
    try:
        return np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _cloud(args) -> np.ndarray:
    if args.points:
        return _read_points(args.points)
    if not (args.data and args.checkpoints):
        raise InputError("give --points, or --data together with --checkpoints")
    ds = load_csv(args.data)
    enc = load_checkpoint(args.checkpoints / "encoder.ckpt")
    dec = load_checkpoint(args.checkpoints / "decoder.ckpt")
    n_rows = len(ds) if args.include_fraud else len(ds.normal())
    x, z, g = extract_manifolds(ds, enc, dec, min(args.k, n_rows), args.sample_seed, args.include_fraud)
    return {"x": x, "z": z, "g": g}[args.manifold]


def _add_cloud_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", type=Path, help="CSV of point coordinates, one row per point")
    p.add_argument("--data", type=Path, help="transaction CSV (with --checkpoints)")
    p.add_argument("--checkpoints", type=Path, help="directory written by `train`")
    p.add_argument("--manifold", choices=("x", "z", "g"), default="z",
                   help="original rows, latent codes, or reconstructions")
    p.add_argument("-k", type=int, default=100, help="rows to sample")
    p.add_argument("--sample-seed", type=int, default=0, dest="sample_seed")
    p.add_argument("--include-fraud", action="store_true", dest="include_fraud")


def cmd_train(args) -> int:
    cfg = _config(args)
    if args.dump_config:
        _dump(cfg)
        return EXIT_OK
    ds = load_csv(args.data)
    if args.rows:
        ds = normal_subsample(ds, args.rows, cfg.seed)
    fit = train(ds, cfg)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(fit.encoder, out / "encoder.ckpt")
    save_checkpoint(fit.decoder, out / "decoder.ckpt")
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    with (out / "losses.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "loss", "seed"])
        for i, v in enumerate(fit.losses):
            w.writerow([i, repr(v), cfg.seed])
    print(f"{cfg.model}: {len(fit.losses)} epochs, final loss {fit.losses[-1] if fit.losses else 'n/a'}, seed {cfg.seed}")
    return EXIT_OK


def cmd_diagram(args) -> int:
    diag = diagram_of(_cloud(args))
    write_diagram(args.out, diag)
    if args.barcode:
        write_barcode(args.barcode, diag)
    print(f"{len(diag)} pairs written to {args.out}")
    return EXIT_OK


def cmd_bottleneck(args) -> int:
    a, b = read_diagram(args.a), read_diagram(args.b)
    pd = per_dimension(a, b)
    for dim, v in pd.items():
        print(f"dim{dim},{v!r}")
    print(f"{args.aggregation},{aggregate(pd, args.aggregation)!r}")
    return EXIT_OK


def cmd_scatter(args) -> int:
    res = bootstrap_scatter(_cloud(args), args.rounds, args.fraction, args.seed, args.aggregation)
    print(f"mean,{res.mean!r}\nmax,{res.max!r}\nsubsample_size,{res.size}\nseed,{args.seed}")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _config(args)
    if args.dump_config:
        _dump(cfg)
        return EXIT_OK
    ds = load_csv(args.data)
    if args.rows:
        ds = normal_subsample(ds, args.rows, cfg.seed)
    report = run_analysis(ds, cfg, tuple(args.models.split(",")), args.k, args.rounds,
                          args.fraction, args.aggregation, args.include_fraud)
    export_report(report, args.out)
    for m in report.models:
        print(f"{m.model}: bottleneck {m.bottleneck!r} ({report.aggregation}), "
              f"scatter {m.scatter_mean!r}, seed {report.seed}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phomwae", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one auto-encoder and write checkpoints")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--rows", type=int, help="train on this many sampled normal rows")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("diagram", help="persistence diagram of a point cloud")
    _add_cloud_flags(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--barcode", type=Path)
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two diagram files")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--aggregation", choices=AGGREGATIONS, default="max")
    p.set_defaults(func=cmd_bottleneck)

    p = sub.add_parser("scatter", help="bootstrap scatter score of a point cloud")
    _add_cloud_flags(p)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aggregation", choices=AGGREGATIONS, default="max")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("report", help="train WAE and VAE, analyse, and export a report")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--rows", type=int, help="use this many sampled normal rows")
    p.add_argument("--models", default="wae,vae")
    p.add_argument("-k", type=int, default=100)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--aggregation", choices=AGGREGATIONS, default="max")
    p.add_argument("--include-fraud", action="store_true", dest="include_fraud")
    _add_config_flags(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
