"""Line-delimited JSON sample records and certificate rows.

One record per line, keys in this order::

    {"id": "s0", "true_label": 3, "votes": {"row:4": [...], "column:4": [...],
     "block:12": [...]}, "metadata": {...}}

``votes`` holds one integer array per configured strategy, in ablation
order; -1 marks an abstaining ablation. ``metadata`` is optional. The JSON
schema lives in ``schema/record.schema.json``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from majorcert.certifiers import Certificate, EnsembleVotes, Method
from majorcert.harness.config import RunConfig
from majorcert.votes import ABSTAIN, VoteGrid


class RecordError(ValueError):
    """A record failed to parse or validate; the message names record and field."""


@dataclass
class SampleRecord:
    id: str
    true_label: int
    votes: dict[str, list[int]]
    metadata: dict[str, Any] | None = field(default=None)

    def ensemble(self, config: RunConfig) -> EnsembleVotes:
        return EnsembleVotes(tuple(
            VoteGrid(spec, np.asarray(self.votes[spec.key]), config.num_classes,
                     config.geometry)
            for spec in config.strategies
        ))

    def to_json(self) -> str:
        data = {"id": self.id, "true_label": self.true_label, "votes": self.votes}
        if self.metadata is not None:
            data["metadata"] = self.metadata
        return json.dumps(data, separators=(",", ":"))


def validate_record(raw: Any, config: RunConfig, where: str = "") -> SampleRecord:
    if not isinstance(raw, dict):
        raise RecordError(f"{where}: record must be a JSON object")
    rid = raw.get("id")
    if not isinstance(rid, str) or not rid:
        raise RecordError(f"{where}: field 'id' must be a non-empty string")
    label = raw.get("true_label")
    if not isinstance(label, int) or isinstance(label, bool) \
            or not 0 <= label < config.num_classes:
        raise RecordError(
            f"record {rid!r}: field 'true_label' must be an integer in "
            f"[0, {config.num_classes}), got {label!r}")
    votes = raw.get("votes")
    if not isinstance(votes, dict):
        raise RecordError(f"record {rid!r}: field 'votes' must be an object")
    clean: dict[str, list[int]] = {}
    for spec in config.strategies:
        seq = votes.get(spec.key)
        name = f"votes.{spec.key}"
        if not isinstance(seq, list):
            raise RecordError(f"record {rid!r}: field {name!r} is missing or not an array")
        expected = spec.count(config.geometry)
        if len(seq) != expected:
            raise RecordError(
                f"record {rid!r}: field {name!r} has {len(seq)} votes, expected {expected}")
        for i, v in enumerate(seq):
            if not isinstance(v, int) or isinstance(v, bool) or not (
                    v == ABSTAIN or 0 <= v < config.num_classes):
                raise RecordError(
                    f"record {rid!r}: field {name!r}[{i}] = {v!r} is not a label in "
                    f"[0, {config.num_classes}) or {ABSTAIN}")
        clean[spec.key] = list(seq)
    extra = set(votes) - set(clean)
    if extra:
        raise RecordError(f"record {rid!r}: field 'votes' has unconfigured strategies "
                          f"{sorted(extra)}")
    metadata = raw.get("metadata")
    if metadata is not None and not isinstance(metadata, dict):
        raise RecordError(f"record {rid!r}: field 'metadata' must be an object")
    return SampleRecord(rid, label, clean, metadata)


def parse_records(lines: Iterable[str], config: RunConfig, source: str = "<input>"
                  ) -> list[SampleRecord]:
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"{where}: not valid JSON ({exc.msg})") from exc
        out.append(validate_record(raw, config, where))
    return out


def load_records(path: str | Path, config: RunConfig) -> list[SampleRecord]:
    with open(path) as fh:
        return parse_records(fh, config, str(path))


def write_records(records: Iterable[SampleRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def records_to_text(records: Iterable[SampleRecord]) -> str:
    return "".join(r.to_json() + "\n" for r in records)


# certificate rows

BASE_COLUMNS = ["id", "true_label", "predicted", "certified", "method"]


def certificate_columns(config: RunConfig) -> list[str]:
    cols = list(BASE_COLUMNS)
    for key in config.strategy_keys:
        cols += [f"{key}/predicted", f"{key}/drs", f"{key}/region"]
    return cols


def certificate_row(record: SampleRecord, cert: Certificate) -> dict[str, Any]:
    row = {
        "id": record.id,
        "true_label": record.true_label,
        "predicted": cert.predicted,
        "certified": int(cert.certified),
        "method": cert.method.value,
    }
    for v in cert.per_strategy:
        row[f"{v.strategy.key}/predicted"] = v.predicted
        row[f"{v.strategy.key}/drs"] = int(v.drs_certified)
        row[f"{v.strategy.key}/region"] = int(v.region_certified)
    return row


def write_certificate_rows(rows: Sequence[dict], columns: Sequence[str],
                           path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        writer.writerows(rows)


@dataclass(frozen=True)
class CertificateRow:
    id: str
    true_label: int
    predicted: int
    certified: bool
    method: Method


def read_certificate_rows(path: str | Path) -> list[CertificateRow]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(BASE_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise RecordError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            try:
                out.append(CertificateRow(row["id"], int(row["true_label"]),
                                          int(row["predicted"]), row["certified"] == "1",
                                          Method(row["method"])))
            except ValueError as exc:
                raise RecordError(f"{path}: bad row for {row.get('id')!r}: {exc}") from exc
    return out
