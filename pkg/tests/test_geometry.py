import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majorcert.geometry import (
    AblationKind,
    AblationRegion,
    AblationSpec,
    ConfigurationError,
    Geometry,
    PatchRegion,
    delta_closed_form,
    enumerate_ablations,
    enumerate_patches,
    overlapping_ablations,
    overlaps,
    patch_mask,
    region_mask,
)

from oracles import mask_overlapping


def test_enumerate_ablations_counts():
    assert len(enumerate_ablations(Geometry(4, 4), AblationSpec("row", 2))) == 4
    assert len(enumerate_ablations(Geometry(32, 32), AblationSpec("block", 12))) == 1024
    assert len(enumerate_ablations(Geometry(5, 7), AblationSpec("column", 3))) == 7


def test_row_region_wraps():
    region = enumerate_ablations(Geometry(4, 4), AblationSpec("row", 2))[3]
    assert region.rows() == [3, 0]
    assert region.cols() == [0, 1, 2, 3]


def test_block_region_order_is_row_major():
    regions = enumerate_ablations(Geometry(3, 5), AblationSpec("block", 2))
    assert [r.origin for r in regions[:6]] == [(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 0)]
    assert regions[4].cols() == [4, 0]


@pytest.mark.parametrize("kind,size", [("row", 5), ("column", 9), ("block", 5)])
def test_oversized_spec_rejected(kind, size):
    with pytest.raises(ConfigurationError):
        enumerate_ablations(Geometry(4, 8), AblationSpec(kind, size))


def test_spec_parse_and_key():
    spec = AblationSpec.parse("Block:12")
    assert spec == AblationSpec(AblationKind.BLOCK, 12)
    assert spec.key == "block:12"
    with pytest.raises(ConfigurationError):
        AblationSpec.parse("diagonal:3")


@pytest.mark.parametrize("h,w,m,n", [(32, 32, 5, 784), (4, 4, 4, 1), (8, 6, 2, 35)])
def test_enumerate_patches_count(h, w, m, n):
    patches = enumerate_patches(Geometry(h, w), m)
    assert len(patches) == n
    assert len(set(patches)) == n


def test_enumerate_patches_row_major_and_too_large():
    patches = enumerate_patches(Geometry(3, 4), 2)
    assert [(p.row, p.col) for p in patches] == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    with pytest.raises(ConfigurationError):
        enumerate_patches(Geometry(4, 6), 5)


def test_overlaps_examples():
    g = Geometry(4, 4)
    row = AblationRegion(3, AblationSpec("row", 2), g)
    assert overlaps(row, PatchRegion(0, 0, 1))
    col = AblationRegion(2, AblationSpec("column", 1), g)
    assert not overlaps(col, PatchRegion(0, 0, 1))
    block = AblationRegion(0, AblationSpec("block", 2), g)
    assert overlaps(block, PatchRegion(1, 1, 2))
    # the mask oracle agrees on all three
    assert (region_mask(row) * patch_mask(g, PatchRegion(0, 0, 1))).any()
    assert not (region_mask(col) * patch_mask(g, PatchRegion(0, 0, 1))).any()


@pytest.mark.parametrize("kind,size,m,delta", [
    ("row", 4, 5, 8), ("column", 4, 5, 8), ("block", 12, 5, 256), ("row", 1, 1, 1),
    ("block", 12, 2, 169),
])
def test_delta_closed_form(kind, size, m, delta):
    assert delta_closed_form(AblationSpec(kind, size), m) == delta


def test_overlapping_ablations_examples():
    assert overlapping_ablations(Geometry(4, 4), AblationSpec("row", 2),
                                 PatchRegion(0, 0, 1)) == [0, 3]
    got = overlapping_ablations(Geometry(8, 8), AblationSpec("row", 2), PatchRegion(3, 0, 2))
    assert got == [2, 3, 4]
    assert len(got) == delta_closed_form(AblationSpec("row", 2), 2)
    for p in enumerate_patches(Geometry(4, 4), 2):
        assert overlapping_ablations(Geometry(4, 4), AblationSpec("block", 4), p) == list(range(16))


@settings(max_examples=150, deadline=None)
@given(h=st.integers(1, 9), w=st.integers(1, 9), kind=st.sampled_from(list(AblationKind)),
       data=st.data())
def test_overlap_matches_mask_oracle(h, w, kind, data):
    g = Geometry(h, w)
    limit = {AblationKind.ROW: h, AblationKind.COLUMN: w}.get(kind, min(h, w))
    spec = AblationSpec(kind, data.draw(st.integers(1, limit)))
    m = data.draw(st.integers(1, min(h, w)))
    for patch in enumerate_patches(g, m):
        expected = mask_overlapping(g, spec, patch)
        assert overlapping_ablations(g, spec, patch) == expected
        assert [r.start_index for r in enumerate_ablations(g, spec)
                if overlaps(r, patch)] == expected


def test_enumeration_is_deterministic():
    g = Geometry(6, 7)
    spec = AblationSpec("block", 3)
    assert enumerate_ablations(g, spec) == enumerate_ablations(g, spec)
    assert enumerate_patches(g, 3) == enumerate_patches(g, 3)
