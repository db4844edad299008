"""Command line interface: ``majorcert {certify,oracle,gen,report}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from majorcert.certifiers import certify_sample
from majorcert.geometry import ConfigurationError
from majorcert.harness.config import RunConfig, load_config
from majorcert.harness.metrics import MetricsReport, metrics_for, metrics_from_rows
from majorcert.harness.plots import plot_metrics
from majorcert.harness.records import (
    RecordError,
    certificate_columns,
    certificate_row,
    load_records,
    read_certificate_rows,
    records_to_text,
    write_certificate_rows,
)
from majorcert.harness.synthetic import SCENARIOS, generate_synthetic
from majorcert.oracle import OracleLimitError, conservativeness_report

log = logging.getLogger("majorcert")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML/JSON run configuration")
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--num-classes", type=int)
    p.add_argument("--strategy", action="append", dest="strategies", metavar="KIND:SIZE",
                   help="ablation strategy such as row:4 (repeatable; replaces the config list)")
    p.add_argument("--patch-size", type=int, help="patch side m")
    p.add_argument("--max-combinations", type=int, help="oracle guard per patch")
    p.add_argument("--output-dir", type=Path)


def _config(args) -> RunConfig:
    return load_config(args.config, height=args.height, width=args.width,
                       num_classes=args.num_classes, strategies=args.strategies,
                       patch_size=args.patch_size, max_combinations=args.max_combinations,
                       output_dir=args.output_dir)


def _write_summary(report: MetricsReport, out: Path, extra: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    summary = dict(extra)
    summary["metrics"] = report.to_dict()
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    plot_metrics(report, out / "metrics.png")


def cmd_certify(args) -> int:
    config = _config(args)
    out = args.out or config.output_dir
    records = load_records(args.input, config)
    certs = [certify_sample(r.ensemble(config), config.patch_size) for r in records]
    out.mkdir(parents=True, exist_ok=True)
    write_certificate_rows([certificate_row(r, c) for r, c in zip(records, certs)],
                           certificate_columns(config), out / "certificates.csv")
    report = metrics_for(records, certs)
    _write_summary(report, out, {"config": config.to_dict(), "input": str(args.input)})
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_oracle(args) -> int:
    config = _config(args)
    records = load_records(args.input, config)
    report = conservativeness_report((r.ensemble(config) for r in records),
                                     config.patch_size, config.max_combinations,
                                     ids=[r.id for r in records])
    print(json.dumps(report.as_dict(), indent=2))
    if not report.sound:
        log.error("%d certified samples are attackable: %s",
                  report.certified_attackable, report.violations)
        return 1
    return 0


def cmd_gen(args) -> int:
    config = _config(args)
    records = generate_synthetic(config, args.count, args.seed, args.scenario)
    text = records_to_text(records)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_report(args) -> int:
    rows = read_certificate_rows(args.input)
    report = metrics_from_rows(rows)
    out = args.out or Path(args.input).parent
    _write_summary(report, out, {"input": str(args.input)})
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majorcert", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certify every record and write rows + summary")
    _add_config_args(p)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, help="output directory (default: config output.dir)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="check certificates against the exhaustive adversary")
    _add_config_args(p)
    p.add_argument("--input", type=Path, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a synthetic record file")
    _add_config_args(p)
    p.add_argument("--scenario", choices=SCENARIOS, default="uniform-random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("report", help="re-aggregate metrics from certificate rows")
    p.add_argument("--input", type=Path, required=True, help="certificates.csv")
    p.add_argument("--out", type=Path, help="output directory (default: next to input)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, RecordError, OracleLimitError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
