"""Per-strategy smoothing defenders and the ensemble certification analyses.

Each strategy's defender predicts the plurality label of its vote grid
(smaller label index wins ties). The ensemble predicts the plurality of the
per-strategy winners. A sample is certified when either

* more than half of the strategies certify the same label through the
  global margin test (majority certification), or
* for every patch position, every combination of labels the strategies may
  emit under attack still has the ensemble label as its plurality winner
  (majority invariant).
"""
from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from majorcert.geometry import (
    AblationSpec,
    Geometry,
    PatchRegion,
    check_patch_size,
    delta_closed_form,
    enumerate_patches,
    patch_grid_shape,
)
from majorcert.votes import (
    VoteError,
    VoteGrid,
    bounds_for_patch,
    count_votes,
    local_mask,
    may_set,
    sliding_bounds,
)


class Method(enum.Enum):
    NONE = "none"
    MAJORITY = "majority"
    MAJORITY_INVARIANT = "majority_invariant"


@dataclass(frozen=True)
class EnsembleVotes:
    """Vote grids of one sample, one per strategy, in canonical strategy order."""

    grids: tuple[VoteGrid, ...]

    def __post_init__(self):
        grids = self.grids
        if isinstance(grids, Mapping):
            grids = tuple(grids.values())
        grids = tuple(sorted(grids, key=lambda g: g.strategy.sort_key))
        object.__setattr__(self, "grids", grids)
        if not grids:
            raise VoteError("an ensemble needs at least one strategy")
        specs = [g.strategy for g in grids]
        if len(set(specs)) != len(specs):
            raise VoteError(f"duplicate strategies in ensemble: {[s.key for s in specs]}")
        if len({g.geometry for g in grids}) != 1:
            raise VoteError("all grids of an ensemble must share one geometry")
        if len({g.num_classes for g in grids}) != 1:
            raise VoteError("all grids of an ensemble must share one label space")

    @property
    def geometry(self) -> Geometry:
        return self.grids[0].geometry

    @property
    def num_classes(self) -> int:
        return self.grids[0].num_classes

    @property
    def strategies(self) -> tuple[AblationSpec, ...]:
        return tuple(g.strategy for g in self.grids)

    def __len__(self):
        return len(self.grids)

    def __getitem__(self, spec: AblationSpec) -> VoteGrid:
        for g in self.grids:
            if g.strategy == spec:
                return g
        raise KeyError(spec)


@dataclass(frozen=True)
class StrategyVerdict:
    strategy: AblationSpec
    predicted: int
    drs_certified: bool
    region_certified: bool


@dataclass(frozen=True)
class Certificate:
    predicted: int
    certified: bool
    method: Method
    per_strategy: tuple[StrategyVerdict, ...]


def _argmax(counts: np.ndarray) -> int:
    # np.argmax returns the first maximum, i.e. the smallest label index
    return int(np.argmax(counts))


def drs_predict(grid: VoteGrid) -> int:
    return _argmax(count_votes(grid))


def margin_holds(counts: np.ndarray, c: int, delta: int) -> bool:
    """``counts[c] >= 2*delta + max over c' != c of (counts[c'] + [c > c'])``."""
    rivals = [int(counts[o]) + (1 if c > o else 0) for o in range(len(counts)) if o != c]
    return int(counts[c]) >= 2 * delta + max(rivals, default=0)


def drs_certify(grid: VoteGrid, m: int) -> bool:
    counts = count_votes(grid)
    c = _argmax(counts)
    if not counts.any():
        return False
    return margin_holds(counts, c, delta_closed_form(grid.strategy, m))


def theta(grid: VoteGrid, m: int, c: int) -> int:
    return int(drs_predict(grid) == c and drs_certify(grid, m))


def majority_label(labels: Iterable[int], num_classes: int | None = None) -> int:
    """Plurality label of a label sequence, smaller index winning ties."""
    counts = Counter(labels)
    best = max(counts.values())
    return min(c for c, n in counts.items() if n == best)


def compute_label(ensemble: EnsembleVotes) -> int:
    winners = [drs_predict(g) for g in ensemble.grids]
    return _argmax(np.bincount(winners, minlength=ensemble.num_classes))


def compute_label_two_stage(ensemble: EnsembleVotes) -> int:
    """The same label computed by tallying instances in two nested maps."""
    per_strategy = {}
    for grid in ensemble.grids:
        tally = Counter(int(v) for v in grid.labels if v >= 0)
        if tally:
            top = max(tally.values())
            per_strategy[grid.strategy] = min(c for c, n in tally.items() if n == top)
        else:
            per_strategy[grid.strategy] = 0
    return majority_label(per_strategy.values())


def majority_certify(ensemble: EnsembleVotes, m: int) -> int | None:
    """Label certified by a strict majority of strategies, if any."""
    check_patch_size(ensemble.geometry, m)
    votes = Counter()
    for grid in ensemble.grids:
        if drs_certify(grid, m):
            votes[drs_predict(grid)] += 1
    for c, n in votes.items():
        if 2 * n > len(ensemble):
            return c
    return None


def combinations(may_sets: Sequence[Iterable[int]]) -> Iterator[tuple[int, ...]]:
    """Lexicographic cartesian product of the may sets (no duplicates)."""
    return itertools.product(*(sorted(set(s)) for s in may_sets))


def first_violation(may_sets: Sequence[Iterable[int]], expected: int) -> tuple[int, ...] | None:
    """First label tuple whose plurality is not ``expected``; stops there."""
    for combo in combinations(may_sets):
        if majority_label(combo) != expected:
            return combo
    return None


def enumerate_combinations(ensemble: EnsembleVotes, patch: PatchRegion) -> set[tuple[int, ...]]:
    return set(combinations(_may_sets_at(ensemble, patch)))


def _may_sets_at(ensemble: EnsembleVotes, patch: PatchRegion) -> list[set[int]]:
    return [may_set(g, patch, drs_predict(g)) for g in ensemble.grids]


class _Analysis:
    """Per-strategy local-malicious masks for every patch position of one sample."""

    def __init__(self, ensemble: EnsembleVotes, m: int, naive: bool = False):
        check_patch_size(ensemble.geometry, m)
        self.ensemble = ensemble
        self.m = m
        self.patches_shape = patch_grid_shape(ensemble.geometry, m)
        self.winners = [drs_predict(g) for g in ensemble.grids]
        self.drs = [drs_certify(g, m) for g in ensemble.grids]
        masks = []
        for grid, winner in zip(ensemble.grids, self.winners):
            if naive:
                pairs = [bounds_for_patch(grid, p)
                         for p in enumerate_patches(ensemble.geometry, m)]
                lower = np.stack([b.lower for b in pairs])
                upper = np.stack([b.upper for b in pairs])
            else:
                lower, upper, _ = sliding_bounds(grid, m)
            masks.append(local_mask(lower, upper, winner))
        # (patches, strategies, K)
        self.local = np.stack(masks, axis=1)

    def region_certified(self) -> list[bool]:
        out = []
        for i, grid in enumerate(self.ensemble.grids):
            ok = not self.local[:, i, :].any() and bool(count_votes(grid).any())
            out.append(ok)
        return out

    def patch(self, index: int) -> PatchRegion:
        r, c = divmod(index, self.patches_shape[1])
        return PatchRegion(r, c, self.m)

    def first_violation(self, expected: int) -> tuple[PatchRegion, tuple[int, ...]] | None:
        may = self.local.copy()
        for i, w in enumerate(self.winners):
            may[:, i, w] = True
        # a patch whose may sets are all singletons only yields the clean tuple
        contested = np.flatnonzero(self.local.any(axis=(1, 2)))
        if contested.size == 0:
            return None
        flat = may[contested].reshape(contested.size, -1)
        _, first = np.unique(flat, axis=0, return_index=True)
        for j in np.sort(first):
            row = may[contested[j]]
            sets = [np.flatnonzero(row[i]).tolist() for i in range(row.shape[0])]
            bad = first_violation(sets, expected)
            if bad is not None:
                return self.patch(int(contested[j])), bad
        return None


def region_certify(grid: VoteGrid, m: int) -> bool:
    """True iff no patch position gives the grid a local-malicious label."""
    if not count_votes(grid).any():
        return False
    lower, upper, _ = sliding_bounds(grid, m)
    return not local_mask(lower, upper, drs_predict(grid)).any()


def find_invariant_violation(ensemble: EnsembleVotes, m: int, naive: bool = False
                             ) -> tuple[PatchRegion, tuple[int, ...]] | None:
    """Witness (patch, label tuple) breaking the majority invariant, or None."""
    return _Analysis(ensemble, m, naive).first_violation(compute_label(ensemble))


def majority_invariant_certify(ensemble: EnsembleVotes, m: int, naive: bool = False) -> bool:
    return find_invariant_violation(ensemble, m, naive) is None


def certify_sample(ensemble: EnsembleVotes, m: int, naive: bool = False) -> Certificate:
    """Predict a label and certify it: majority certification, then the invariant."""
    analysis = _Analysis(ensemble, m, naive)
    y = compute_label(ensemble)
    per_strategy = tuple(
        StrategyVerdict(g.strategy, w, d, r)
        for g, w, d, r in zip(ensemble.grids, analysis.winners, analysis.drs,
                              analysis.region_certified())
    )
    if majority_certify(ensemble, m) is not None:
        method = Method.MAJORITY
    elif analysis.first_violation(y) is None:
        method = Method.MAJORITY_INVARIANT
    else:
        method = Method.NONE
    return Certificate(y, method is not Method.NONE, method, per_strategy)
