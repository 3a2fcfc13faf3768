import json

import numpy as np
import pytest

from fixsum.drs import BoundsSpec, drs_sample_batch
from fixsum.simplex_core import make_rng, project_to_plane
from fixsum.tiling import (
    SIMPLEX,
    TransformFamily,
    UnsupportedInstanceError,
    audit,
    contained,
    project_tiles,
    region_frequencies,
    tile_simplex,
    unique_shapes,
)
from oracles import corner_simplex_fraction

GOLDEN_UPPER = (0.5, 0.25, 1.0)


@pytest.fixture(scope="module")
def depth7():
    return audit(GOLDEN_UPPER, 7)


@pytest.fixture(scope="module")
def family():
    return TransformFamily.for_upper(GOLDEN_UPPER)


def test_feasible_fraction(family):
    assert corner_simplex_fraction(GOLDEN_UPPER) == pytest.approx(0.25)
    assert family.feasible.area / SIMPLEX.area == pytest.approx(0.25, abs=1e-14)


@pytest.mark.parametrize("upper", [(0.5, 0.25, 1.0), (0.6, 0.7, 0.8), (0.3, 0.9, 1.0)])
def test_feasible_fraction_other_instances(upper):
    fam = TransformFamily.for_upper(upper)
    assert fam.feasible.area / SIMPLEX.area == pytest.approx(corner_simplex_fraction(upper), abs=1e-12)


def test_three_maps(family):
    assert [(t.label, t.violated) for t in family.transforms] == [("A1", (0,)), ("A2", (1,)), ("A3", (0, 1))]


def test_depth_one_tiles_land_in_feasible_set(family):
    maps = {t.label: t for t in family.transforms}
    for tile in tile_simplex(family, 1)[1:]:
        assert tile.steps == 1
        image = maps[tile.sequence[0]].forward(tile.polygon)
        assert contained(image, family.feasible)


def test_single_step_projection_is_image_of_region(family):
    tiles = tile_simplex(family, 1)
    proj = project_tiles(tiles, family)
    A1 = family.label("A1")
    for pt in proj:
        if pt.tile.sequence == ("A1",):
            expected = family.feasible.intersect(A1.forward(A1.region))
            assert pt.polygon.area == pytest.approx(expected.area, abs=1e-14)
            assert contained(pt.polygon, expected) and contained(expected, pt.polygon)


def test_conservation(depth7):
    tiles, projected, report = depth7
    total = sum(t.mass for t in tiles)
    assert total + report.residual / 100 == pytest.approx(1.0, abs=1e-10)
    assert sum(p.tile.mass for p in projected) == pytest.approx(total, abs=1e-12)
    assert report.realised_total == pytest.approx(report.target_total, abs=1e-9)
    assert sum(r.area for r in report.regions) == pytest.approx(tiles[0].polygon.area, abs=1e-12)


def test_depth_one_conservation(family):
    tiles, projected, report = audit(GOLDEN_UPPER, 1)
    depth1 = sum(t.mass for t in tiles if t.steps == 1)
    assert report.residual / 100 == pytest.approx(1 - 0.25 - depth1, abs=1e-12)


def test_tiles_do_not_overlap(depth7):
    tiles = depth7[0]
    assert sum(t.polygon.area for t in tiles) <= SIMPLEX.area + 1e-12
    few = tiles[:60]
    for i, a in enumerate(few):
        for b in few[i + 1:]:
            assert a.polygon.intersect(b.polygon).area < 1e-12


def test_tile_masses_match_step_counts():
    # Monte Carlo oracle: DRS step counts give the mass of each tile layer.
    tiles = tile_simplex(GOLDEN_UPPER, 7)
    layer = np.zeros(8)
    for t in tiles:
        layer[t.steps] += t.mass
    _, steps = drs_sample_batch(BoundsSpec.upper_only(GOLDEN_UPPER), 1_000_000, make_rng(77))
    freq = np.bincount(np.minimum(steps, 8), minlength=9)[:8] / len(steps)
    np.testing.assert_allclose(layer, freq, atol=2e-3)


def test_regions_partition_and_golden(depth7, golden_dir):
    tiles, projected, report = depth7
    gold = json.loads((golden_dir / "tiling_depth7.json").read_text())
    assert report.n_tiles == gold["tiles"]
    shapes = sorted(
        [[[round(float(v), 9) for v in p] for p in s.vertices] for s in unique_shapes(projected)]
    )
    assert len(shapes) == len(gold["unique_shapes"]) == 6
    np.testing.assert_allclose(np.concatenate([np.ravel(s) for s in shapes]),
                               np.concatenate([np.ravel(s) for s in gold["unique_shapes"]]), atol=1e-9)
    assert len(report.regions) == 9
    for r, g in zip(report.regions, gold["regions"]):
        assert r.realised == pytest.approx(g["realised"], abs=1e-6)
        assert r.target == pytest.approx(g["target"], abs=1e-6)
    assert report.residual == pytest.approx(gold["residual"], abs=1e-6)


def test_region_shares_of_feasible_set(depth7):
    # Target mass is proportional to region area; these shares are fixed by
    # the geometry of the unique shapes (independent of depth).
    report = depth7[2]
    shares = sorted(r.target / report.target_total for r in report.regions)
    printed = sorted(np.array([5.96, 4.77, 7.15, 11.92, 15.89, 12.71, 9.53, 12.71, 15.89]) / 96.52)
    np.testing.assert_allclose(shares, printed, atol=2e-4)


def test_delta_sign_pattern(depth7):
    report = depth7[2]
    top = report.regions[0]
    bottom_left = min(report.regions, key=lambda r: (r.centroid[1], r.centroid[0]))
    assert top.delta > 1.0
    assert bottom_left.delta < -0.9


def test_region_frequencies_cover_feasible_set(depth7):
    report = depth7[2]
    X, _ = drs_sample_batch(BoundsSpec.upper_only(GOLDEN_UPPER), 20_000, make_rng(4))
    freq = region_frequencies(report, X)
    assert freq.sum() == pytest.approx(100.0, abs=0.05)
    P = project_to_plane(X)
    hits = sum(r.contains(P).astype(int) for r in report.regions)
    assert np.mean(hits == 1) > 0.999


@pytest.mark.parametrize("upper", [(0.5, 0.25), (0.5, 0.25, 0.2), (1.0, 1.0, 1.0), (0.0, 0.5, 1.0)])
def test_unsupported_instances(upper):
    with pytest.raises(UnsupportedInstanceError):
        TransformFamily.for_upper(upper)


def test_depth_must_be_positive():
    from fixsum.errors import PreconditionError

    with pytest.raises(PreconditionError):
        tile_simplex(GOLDEN_UPPER, 0)
