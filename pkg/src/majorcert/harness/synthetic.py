"""Synthetic vote corpora and a toy pixel classifier for end-to-end fixtures."""
from __future__ import annotations

import numpy as np

from majorcert.certifiers import EnsembleVotes, Method, certify_sample
from majorcert.geometry import (
    AblationKind,
    AblationRegion,
    AblationSpec,
    ConfigurationError,
    Geometry,
    enumerate_ablations,
)
from majorcert.harness.config import RunConfig
from majorcert.harness.records import SampleRecord
from majorcert.votes import ABSTAIN, VoteGrid

SCENARIOS = ("uniform-random", "near-unanimous", "margin-sweep", "figure1-like")

SEPARATING_MAX_ATTEMPTS = 400


def stub_classify(image: np.ndarray, region: AblationRegion, num_classes: int) -> int:
    """Sum of the pixels kept by the ablation, mod K; ABSTAIN when nothing is kept."""
    kept = int(np.asarray(image)[np.ix_(region.rows(), region.cols())].sum())
    return ABSTAIN if kept == 0 else kept % num_classes


def stub_votes(image: np.ndarray, spec: AblationSpec, num_classes: int) -> np.ndarray:
    image = np.asarray(image)
    geo = Geometry(*image.shape)
    return np.array([stub_classify(image, r, num_classes)
                     for r in enumerate_ablations(geo, spec)], dtype=np.int64)


def _noisy(rng: np.random.Generator, n: int, label: int, keep: float, k: int,
           abstain: float = 0.0) -> np.ndarray:
    out = np.full(n, label, dtype=np.int64)
    flip = rng.random(n) >= keep
    out[flip] = rng.integers(0, k, size=int(flip.sum()))
    gone = rng.random(n) < abstain
    out[gone] = ABSTAIN
    return out


def _record(config: RunConfig, rid: str, true_label: int, grids: dict[str, np.ndarray],
            scenario: str) -> SampleRecord:
    votes = {key: [int(v) for v in grids[key]] for key in config.strategy_keys}
    return SampleRecord(rid, int(true_label), votes, {"scenario": scenario})


def _banded(rng: np.random.Generator, spec: AblationSpec, config: RunConfig, base: int,
            other: int) -> np.ndarray:
    """Grid voting ``base`` except a contiguous run of ``other`` votes."""
    geo = config.geometry
    n = spec.count(geo)
    out = np.full(n, base, dtype=np.int64)
    frac = rng.uniform(0.1, 0.45)
    if spec.kind is AblationKind.BLOCK:
        # a band of consecutive block rows, wrapping at the bottom
        rows = max(1, int(round(frac * geo.height)))
        r0 = int(rng.integers(0, geo.height))
        grid = out.reshape(geo.height, geo.width)
        grid[[(r0 + i) % geo.height for i in range(rows)], :] = other
    else:
        run = max(1, int(round(frac * n)))
        s0 = int(rng.integers(0, n))
        out[[(s0 + i) % n for i in range(run)]] = other
    return out


def _separating_sample(rng: np.random.Generator, config: RunConfig, m: int
                    ) -> tuple[int, dict[str, np.ndarray]] | None:
    k = config.num_classes
    specs = config.strategies
    n_banded = len(specs) - 1 if len(specs) > 1 else 1
    for _ in range(SEPARATING_MAX_ATTEMPTS):
        top = max(0, k - 1 - n_banded)
        winner = int(rng.integers(0, top + 1))
        rivals = list(range(winner + 1, k)) or [winner]
        anchor = int(rng.integers(0, len(specs))) if len(specs) > 1 else -1
        grids = {}
        j = 0
        for i, spec in enumerate(specs):
            if i == anchor:
                grids[spec.key] = np.full(spec.count(config.geometry), winner, dtype=np.int64)
            else:
                grids[spec.key] = _banded(rng, spec, config, winner, rivals[j % len(rivals)])
                j += 1
        ensemble = EnsembleVotes(tuple(
            VoteGrid(s, grids[s.key], k, config.geometry) for s in specs))
        if certify_sample(ensemble, m).method is Method.MAJORITY_INVARIANT:
            return winner, grids
    return None


def generate_synthetic(config: RunConfig, count: int, seed: int,
                       scenario: str = "uniform-random") -> list[SampleRecord]:
    """Deterministic corpus of ``count`` records for the given seed and scenario.

    ``figure1-like`` searches, with the certifier in the loop, for samples
    that majority certification rejects but the majority invariant accepts
    at the configured patch size.
    """
    if scenario not in SCENARIOS:
        raise ConfigurationError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    rng = np.random.default_rng(seed)
    k = config.num_classes
    out = []
    for i in range(count):
        rid = f"{scenario}-{seed}-{i}"
        if scenario == "figure1-like":
            found = _separating_sample(rng, config, config.patch_size)
            if found is None:
                raise ConfigurationError(
                    f"no figure1-like sample found in {SEPARATING_MAX_ATTEMPTS} attempts for "
                    f"this geometry and patch size")
            label, grids = found
            out.append(_record(config, rid, label, grids, scenario))
            continue
        label = int(rng.integers(0, k))
        grids = {}
        for spec in config.strategies:
            n = spec.count(config.geometry)
            if scenario == "uniform-random":
                grids[spec.key] = _noisy(rng, n, label, 0.0, k, abstain=0.05)
            elif scenario == "near-unanimous":
                grids[spec.key] = _noisy(rng, n, label, 0.98, k)
            else:
                keep = (i + 1) / count if count > 1 else 1.0
                grids[spec.key] = _noisy(rng, n, label, keep, k, abstain=0.02)
        out.append(_record(config, rid, label, grids, scenario))
    return out
