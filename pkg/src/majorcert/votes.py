"""Vote grids, vote counts, and per-patch vote bounds.

A vote grid holds the label a base classifier assigned to every ablation
of one image under one strategy. For a patch position, the ablations the
patch touches are untrusted: the lower bound of a label counts its votes
among the untouched ablations only, and the upper bound additionally
grants it every touched ablation.

All arithmetic is integer; nothing on the certification path uses floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from majorcert.geometry import (
    AblationKind,
    AblationSpec,
    Geometry,
    PatchRegion,
    check_patch_size,
    overlapping_ablations,
)

ABSTAIN = -1


class VoteError(ValueError):
    """Raised when a vote grid does not match its strategy or label space."""


@dataclass(frozen=True, eq=False)
class VoteGrid:
    strategy: AblationSpec
    labels: np.ndarray
    num_classes: int
    geometry: Geometry

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if self.num_classes < 1:
            raise VoteError(f"num_classes must be >= 1, got {self.num_classes}")
        self.strategy.validate(self.geometry)
        expected = self.strategy.count(self.geometry)
        if labels.size != expected:
            raise VoteError(
                f"{self.strategy.key} grid needs {expected} votes, got {labels.size}"
            )
        bad = (labels != ABSTAIN) & ((labels < 0) | (labels >= self.num_classes))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise VoteError(
                f"{self.strategy.key} vote {i} has label {int(labels[i])} outside "
                f"[0, {self.num_classes}) and is not ABSTAIN ({ABSTAIN})"
            )

    def __eq__(self, other):
        if not isinstance(other, VoteGrid):
            return NotImplemented
        return (self.strategy == other.strategy and self.num_classes == other.num_classes
                and self.geometry == other.geometry
                and np.array_equal(self.labels, other.labels))

    def __hash__(self):
        return hash((self.strategy, self.num_classes, self.geometry, self.labels.tobytes()))


@dataclass(frozen=True, eq=False)
class BoundPair:
    lower: np.ndarray
    upper: np.ndarray
    overlapped: int = field(default=0)

    def __eq__(self, other):
        if not isinstance(other, BoundPair):
            return NotImplemented
        return (np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper)
                and self.overlapped == other.overlapped)


def make_grid(strategy: AblationSpec | str, labels: Sequence[int], num_classes: int,
              geometry: Geometry | tuple[int, int]) -> VoteGrid:
    if isinstance(strategy, str):
        strategy = AblationSpec.parse(strategy)
    if not isinstance(geometry, Geometry):
        geometry = Geometry(*geometry)
    return VoteGrid(strategy, np.asarray(labels), num_classes, geometry)


def _tally(labels: np.ndarray, num_classes: int) -> np.ndarray:
    voted = labels[labels != ABSTAIN]
    return np.bincount(voted, minlength=num_classes).astype(np.int64)


def count_votes(grid: VoteGrid) -> np.ndarray:
    """Per-label vote counts; ABSTAIN entries are not counted."""
    return _tally(grid.labels, grid.num_classes)


def bounds_for_patch(grid: VoteGrid, patch: PatchRegion) -> BoundPair:
    """Lower/upper vote bounds for one patch, by direct enumeration."""
    touched = np.asarray(overlapping_ablations(grid.geometry, grid.strategy, patch),
                         dtype=np.int64)
    keep = np.ones(grid.labels.size, dtype=bool)
    keep[touched] = False
    lower = _tally(grid.labels[keep], grid.num_classes)
    return BoundPair(lower, lower + touched.size, int(touched.size))


def _cyclic_window_sums(onehot: np.ndarray, axis: int, first: np.ndarray,
                        span: int) -> np.ndarray:
    """Sums of ``span`` consecutive cyclic entries along ``axis`` starting at each ``first``.

    Each window is the previous one plus the entering slice minus the leaving
    slice; prefix differences over the doubled axis give all of them at once.
    """
    n = onehot.shape[axis]
    doubled = np.concatenate([onehot, onehot], axis=axis)
    pad = [(0, 0)] * onehot.ndim
    pad[axis] = (1, 0)
    prefix = np.pad(np.cumsum(doubled, axis=axis), pad)
    first = np.asarray(first) % n
    return np.take(prefix, first + span, axis=axis) - np.take(prefix, first, axis=axis)


def sliding_bounds(grid: VoteGrid, m: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Bounds for every patch position at once.

    Returns ``(lower, upper, touched)`` where ``lower`` and ``upper`` have
    shape ``(num_patches, K)`` in row-major patch order and ``touched`` is
    the number of ablations each patch overlaps (the same for all positions).
    Bit-identical to calling :func:`bounds_for_patch` on every patch.
    """
    geo, spec, k = grid.geometry, grid.strategy, grid.num_classes
    check_patch_size(geo, m)
    n_rows, n_cols = geo.height - m + 1, geo.width - m + 1
    labels = grid.labels
    total = count_votes(grid)

    if spec.kind is AblationKind.BLOCK:
        onehot = np.zeros((k, geo.height, geo.width), dtype=np.int64)
        flat = np.flatnonzero(labels != ABSTAIN)
        rr, cc = np.divmod(flat, geo.width)
        onehot[labels[flat], rr, cc] = 1
        span_r = min(geo.height, m + spec.size - 1)
        span_c = min(geo.width, m + spec.size - 1)
        rows_first = np.arange(n_rows) - spec.size + 1
        cols_first = np.arange(n_cols) - spec.size + 1
        inner = _cyclic_window_sums(onehot, 1, rows_first, span_r)
        inner = _cyclic_window_sums(inner, 2, cols_first, span_c)
        touched_votes = inner.reshape(k, -1).T
        touched = span_r * span_c
    else:
        n = geo.height if spec.kind is AblationKind.ROW else geo.width
        onehot = np.zeros((k, n), dtype=np.int64)
        idx = np.flatnonzero(labels != ABSTAIN)
        onehot[labels[idx], idx] = 1
        span = min(n, m + spec.size - 1)
        positions = n_rows if spec.kind is AblationKind.ROW else n_cols
        windows = _cyclic_window_sums(onehot, 1, np.arange(positions) - spec.size + 1,
                                      span).T
        if spec.kind is AblationKind.ROW:
            touched_votes = np.repeat(windows, n_cols, axis=0)
        else:
            touched_votes = np.tile(windows, (n_rows, 1))
        touched = span

    lower = total[None, :] - touched_votes
    return lower, lower + touched, touched


def local_mask(lower: np.ndarray, upper: np.ndarray, predicted: int) -> np.ndarray:
    """Boolean mask of local-malicious labels; works on one bound row or a stack."""
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    k = upper.shape[-1]
    tie = (predicted > np.arange(k)).astype(np.int64)
    mask = lower[..., predicted:predicted + 1] < upper + tie
    mask[..., predicted] = False
    return mask


def local_malicious(grid: VoteGrid, patch: PatchRegion, predicted: int) -> set[int]:
    """Labels other than ``predicted`` that could overtake it under ``patch``."""
    bounds = bounds_for_patch(grid, patch)
    return {int(c) for c in np.flatnonzero(local_mask(bounds.lower, bounds.upper, predicted))}


def may_set(grid: VoteGrid, patch: PatchRegion, predicted: int) -> set[int]:
    return local_malicious(grid, patch, predicted) | {int(predicted)}
