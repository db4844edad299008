"""Image geometry, ablation regions with wrap-around, and patch regions.

Ablation regions wrap around the image borders (a row band starting at the
last row continues at row 0); patch regions never wrap. Overlap between the
two is decided by arc intersection on the cyclic row/column axes, so no
pixel masks are ever built outside of :func:`region_mask` and
:func:`patch_mask`, which exist for testing.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Raised when a geometry, ablation spec, or patch size is inconsistent."""


@dataclass(frozen=True)
class Geometry:
    height: int
    width: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ConfigurationError(
                f"geometry must be at least 1x1, got {self.height}x{self.width}"
            )

    @property
    def pixels(self) -> int:
        return self.height * self.width


class AblationKind(enum.Enum):
    ROW = "row"
    COLUMN = "column"
    BLOCK = "block"

    @property
    def order(self) -> int:
        return _KIND_ORDER[self]


_KIND_ORDER = {AblationKind.ROW: 0, AblationKind.COLUMN: 1, AblationKind.BLOCK: 2}


@dataclass(frozen=True)
class AblationSpec:
    kind: AblationKind
    size: int

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", AblationKind(self.kind.lower()))
        if self.size < 1:
            raise ConfigurationError(f"ablation size must be >= 1, got {self.size}")

    @classmethod
    def parse(cls, text: str) -> "AblationSpec":
        """Parse ``"row:4"`` style strategy keys."""
        try:
            kind, size = text.split(":")
            return cls(AblationKind(kind.strip().lower()), int(size))
        except (ValueError, KeyError) as exc:
            raise ConfigurationError(f"bad strategy {text!r}, expected e.g. 'row:4'") from exc

    @property
    def key(self) -> str:
        return f"{self.kind.value}:{self.size}"

    @property
    def sort_key(self) -> tuple[int, int]:
        # canonical strategy order: Row, Column, Block
        return (self.kind.order, self.size)

    def validate(self, geometry: Geometry) -> None:
        if self.kind is AblationKind.ROW:
            limit = geometry.height
        elif self.kind is AblationKind.COLUMN:
            limit = geometry.width
        else:
            limit = min(geometry.height, geometry.width)
        if self.size > limit:
            raise ConfigurationError(
                f"{self.kind.value} ablation size {self.size} exceeds the limit "
                f"{limit} of a {geometry.height}x{geometry.width} image"
            )

    def count(self, geometry: Geometry) -> int:
        """Number of ablations this strategy produces on ``geometry``."""
        if self.kind is AblationKind.ROW:
            return geometry.height
        if self.kind is AblationKind.COLUMN:
            return geometry.width
        return geometry.pixels


@dataclass(frozen=True)
class AblationRegion:
    start_index: int
    spec: AblationSpec
    geometry: Geometry

    @property
    def origin(self) -> tuple[int, int]:
        """(row, col) of the first covered cell; the unused axis is 0."""
        if self.spec.kind is AblationKind.ROW:
            return self.start_index, 0
        if self.spec.kind is AblationKind.COLUMN:
            return 0, self.start_index
        return divmod(self.start_index, self.geometry.width)

    def rows(self) -> list[int]:
        if self.spec.kind is AblationKind.COLUMN:
            return list(range(self.geometry.height))
        r0 = self.origin[0]
        return [(r0 + k) % self.geometry.height for k in range(self.spec.size)]

    def cols(self) -> list[int]:
        if self.spec.kind is AblationKind.ROW:
            return list(range(self.geometry.width))
        c0 = self.origin[1]
        return [(c0 + k) % self.geometry.width for k in range(self.spec.size)]


@dataclass(frozen=True)
class PatchRegion:
    row: int
    col: int
    side: int

    def validate(self, geometry: Geometry) -> None:
        if self.side < 1:
            raise ConfigurationError(f"patch side must be >= 1, got {self.side}")
        if not (0 <= self.row <= geometry.height - self.side
                and 0 <= self.col <= geometry.width - self.side):
            raise ConfigurationError(f"patch {self} does not fit in {geometry}")


def enumerate_ablations(geometry: Geometry, spec: AblationSpec) -> list[AblationRegion]:
    """All ablation regions of a strategy in canonical (start index) order.

    Block regions are enumerated row-major over every pixel of the torus.
    """
    spec.validate(geometry)
    return [AblationRegion(i, spec, geometry) for i in range(spec.count(geometry))]


def check_patch_size(geometry: Geometry, m: int) -> None:
    if m < 1 or m > min(geometry.height, geometry.width):
        raise ConfigurationError(
            f"patch side {m} does not fit in a {geometry.height}x{geometry.width} image"
        )


def patch_grid_shape(geometry: Geometry, m: int) -> tuple[int, int]:
    check_patch_size(geometry, m)
    return geometry.height - m + 1, geometry.width - m + 1


def enumerate_patches(geometry: Geometry, m: int) -> list[PatchRegion]:
    """Every placement of an m x m patch, row-major, without wrap-around."""
    n_rows, n_cols = patch_grid_shape(geometry, m)
    return [PatchRegion(r, c, m) for r in range(n_rows) for c in range(n_cols)]


def _arcs_intersect(a: int, len_a: int, b: int, len_b: int, n: int) -> bool:
    # two arcs on a cycle of length n meet iff one contains the other's start
    return (b - a) % n < len_a or (a - b) % n < len_b


def overlaps(region: AblationRegion, patch: PatchRegion) -> bool:
    geo, spec = region.geometry, region.spec
    r0, c0 = region.origin
    rows_hit = spec.kind is AblationKind.COLUMN or _arcs_intersect(
        r0, spec.size, patch.row, patch.side, geo.height)
    if not rows_hit:
        return False
    return spec.kind is AblationKind.ROW or _arcs_intersect(
        c0, spec.size, patch.col, patch.side, geo.width)


def delta_closed_form(spec: AblationSpec, m: int) -> int:
    """Maximum number of ablations a side-m patch can touch."""
    if m < 1:
        raise ConfigurationError(f"patch side must be >= 1, got {m}")
    span = m + spec.size - 1
    return span * span if spec.kind is AblationKind.BLOCK else span


def _starts_touching(pos: int, side: int, size: int, n: int) -> list[int]:
    """Start offsets on an axis of length n whose size-long arc meets [pos, pos+side)."""
    span = min(n, side + size - 1)
    first = pos - size + 1
    return sorted((first + k) % n for k in range(span))


def overlapping_ablations(geometry: Geometry, spec: AblationSpec,
                          patch: PatchRegion) -> list[int]:
    """Ascending indices (canonical order) of the ablations the patch touches."""
    spec.validate(geometry)
    patch.validate(geometry)
    if spec.kind is AblationKind.ROW:
        return _starts_touching(patch.row, patch.side, spec.size, geometry.height)
    if spec.kind is AblationKind.COLUMN:
        return _starts_touching(patch.col, patch.side, spec.size, geometry.width)
    rows = _starts_touching(patch.row, patch.side, spec.size, geometry.height)
    cols = _starts_touching(patch.col, patch.side, spec.size, geometry.width)
    return [r * geometry.width + c for r in rows for c in cols]


def region_mask(region: AblationRegion) -> np.ndarray:
    mask = np.zeros((region.geometry.height, region.geometry.width), dtype=np.int64)
    mask[np.ix_(region.rows(), region.cols())] = 1
    return mask


def patch_mask(geometry: Geometry, patch: PatchRegion) -> np.ndarray:
    mask = np.zeros((geometry.height, geometry.width), dtype=np.int64)
    mask[patch.row:patch.row + patch.side, patch.col:patch.col + patch.side] = 1
    return mask


@functools.lru_cache(maxsize=4096)
def _axis_counts(n: int, size: int, side: int) -> np.ndarray:
    """For each patch offset p, how many size-long arcs on a cycle of n meet [p, p+side)."""
    starts = np.arange(n)[:, None]
    pos = np.arange(n - side + 1)[None, :]
    hits = ((pos - starts) % n < size) | ((starts - pos) % n < side)
    counts = hits.sum(axis=0)
    counts.setflags(write=False)
    return counts


def overlap_counts(geometry: Geometry, spec: AblationSpec, m: int) -> np.ndarray:
    """Number of ablations each patch position touches, shape (H-m+1, W-m+1)."""
    spec.validate(geometry)
    n_rows, n_cols = patch_grid_shape(geometry, m)
    if spec.kind is AblationKind.COLUMN:
        rows = np.ones(n_rows, dtype=np.int64)
    else:
        rows = _axis_counts(geometry.height, spec.size, m)
    if spec.kind is AblationKind.ROW:
        cols = np.ones(n_cols, dtype=np.int64)
    else:
        cols = _axis_counts(geometry.width, spec.size, m)
    if spec.kind is AblationKind.BLOCK:
        # block starts are the product of row starts and column starts
        return np.outer(rows, cols)
    if spec.kind is AblationKind.ROW:
        return np.repeat(rows[:, None], n_cols, axis=1)
    return np.repeat(cols[None, :], n_rows, axis=0)
