"""Exhaustive vote-level adversary.

The adversary may rewrite every vote of an ablation touched by the patch,
independently for each strategy, to any label or ABSTAIN. This is at least
as strong as any real pixel patch, so a sample this adversary cannot flip
is genuinely robust, and any sample the certifiers accept must survive it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from majorcert.certifiers import (
    EnsembleVotes,
    certify_sample,
    compute_label,
    majority_label,
)
from majorcert.geometry import PatchRegion, enumerate_patches, overlapping_ablations
from majorcert.votes import ABSTAIN, VoteGrid, count_votes

DEFAULT_MAX_COMBINATIONS = 10_000
DEFAULT_MAX_ENUMERATION = 6


class OracleLimitError(RuntimeError):
    """Raised instead of running an instance too large to decide exhaustively."""


@dataclass(frozen=True)
class AdversaryModel:
    alphabet: tuple[int, ...]
    scope: tuple[tuple[int, ...], ...]


def adversary_model(ensemble: EnsembleVotes, patch: PatchRegion) -> AdversaryModel:
    alphabet = tuple(range(ensemble.num_classes)) + (ABSTAIN,)
    scope = tuple(tuple(overlapping_ablations(g.geometry, g.strategy, patch))
                  for g in ensemble.grids)
    return AdversaryModel(alphabet, scope)


def achievable_winners(grid: VoteGrid, patch: PatchRegion) -> set[int]:
    """Labels the grid's defender can be driven to by rewriting the touched votes.

    Giving every touched vote to a label maximises that label's count and
    minimises every rival's, so a label is reachable iff that one rewrite
    makes it win.
    """
    touched = overlapping_ablations(grid.geometry, grid.strategy, patch)
    out = set()
    for c in range(grid.num_classes):
        labels = grid.labels.copy()
        labels[touched] = c
        if int(np.argmax(np.bincount(labels[labels != ABSTAIN],
                                     minlength=grid.num_classes))) == c:
            out.add(c)
    return out


def achievable_winners_exhaustive(grid: VoteGrid, patch: PatchRegion,
                                  max_touched: int = DEFAULT_MAX_ENUMERATION) -> set[int]:
    """Same set as :func:`achievable_winners`, by trying every rewrite."""
    touched = overlapping_ablations(grid.geometry, grid.strategy, patch)
    if len(touched) > max_touched:
        raise OracleLimitError(
            f"{len(touched)} touched votes exceed the enumeration limit {max_touched}"
        )
    alphabet = list(range(grid.num_classes)) + [ABSTAIN]
    base = grid.labels.copy()
    keep = np.ones(base.size, dtype=bool)
    keep[touched] = False
    fixed = count_votes(VoteGrid(grid.strategy, np.where(keep, base, ABSTAIN),
                                 grid.num_classes, grid.geometry))
    out = set()
    for rewrite in itertools.product(alphabet, repeat=len(touched)):
        counts = fixed.copy()
        for v in rewrite:
            if v != ABSTAIN:
                counts[v] += 1
        out.add(int(np.argmax(counts)))
    return out


def find_attack(ensemble: EnsembleVotes, m: int,
                max_combinations: int = DEFAULT_MAX_COMBINATIONS
                ) -> tuple[PatchRegion, tuple[int, ...]] | None:
    """A patch and per-strategy winners that change the ensemble label, or None."""
    clean = compute_label(ensemble)
    for patch in enumerate_patches(ensemble.geometry, m):
        reachable = [sorted(achievable_winners(g, patch)) for g in ensemble.grids]
        size = int(np.prod([len(r) for r in reachable]))
        if size > max_combinations:
            raise OracleLimitError(
                f"patch {patch} yields {size} winner combinations, limit {max_combinations}"
            )
        for combo in itertools.product(*reachable):
            if majority_label(combo) != clean:
                return patch, combo
    return None


def brute_force_robust(ensemble: EnsembleVotes, m: int,
                       max_combinations: int = DEFAULT_MAX_COMBINATIONS) -> bool:
    """Exact vote-level robustness decision over every patch position."""
    return find_attack(ensemble, m, max_combinations) is None


def brute_force_robust_exhaustive(ensemble: EnsembleVotes, m: int,
                                  max_touched: int = DEFAULT_MAX_ENUMERATION) -> bool:
    """Robustness decided with exhaustive per-strategy rewrites (tiny instances only)."""
    clean = compute_label(ensemble)
    for patch in enumerate_patches(ensemble.geometry, m):
        reachable = [sorted(achievable_winners_exhaustive(g, patch, max_touched))
                     for g in ensemble.grids]
        if any(majority_label(c) != clean for c in itertools.product(*reachable)):
            return False
    return True


@dataclass
class ConservativenessReport:
    total: int = 0
    certified_robust: int = 0
    certified_attackable: int = 0
    uncertified_robust: int = 0
    uncertified_attackable: int = 0
    violations: list = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return self.certified_attackable == 0

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "certified_robust": self.certified_robust,
            "certified_attackable": self.certified_attackable,
            "uncertified_robust": self.uncertified_robust,
            "uncertified_attackable": self.uncertified_attackable,
            "sound": self.sound,
            "violations": list(self.violations),
        }


def conservativeness_report(corpus: Iterable[EnsembleVotes], m: int,
                            max_combinations: int = DEFAULT_MAX_COMBINATIONS,
                            ids: Iterable[str] | None = None) -> ConservativenessReport:
    report = ConservativenessReport()
    ids = iter(ids) if ids is not None else itertools.count()
    for sample_id, ensemble in zip(ids, corpus):
        certified = certify_sample(ensemble, m).certified
        robust = brute_force_robust(ensemble, m, max_combinations)
        report.total += 1
        if certified and robust:
            report.certified_robust += 1
        elif certified:
            report.certified_attackable += 1
            report.violations.append(sample_id)
        elif robust:
            report.uncertified_robust += 1
        else:
            report.uncertified_attackable += 1
    return report
