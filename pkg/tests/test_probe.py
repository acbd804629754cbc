import io
import json

import pytest

from hepath.corelib.geometry import Path
from hepath.execution.probe import ProbeConfig, ProbeReport, brute_force_probe, raster_path


def test_config_validation():
    with pytest.raises(ValueError):
        ProbeConfig(0, 0, 0, 10, spacing=1, segment_length=1)
    with pytest.raises(ValueError):
        ProbeConfig(0, 0, 10, 10, spacing=0, segment_length=1)
    cfg = ProbeConfig.from_dict({"x_min": 0, "y_min": 0, "x_max": 100, "y_max": 100, "spacing": 25, "segment_length": 25})
    assert (cfg.bands, cfg.columns) == (4, 4)


def test_raster_layout():
    cfg = ProbeConfig(0, 0, 100, 100, spacing=25, segment_length=25)
    raster = raster_path(cfg)
    assert raster.path.segment_count == 4 * 4 + 3
    assert len(raster.cells) == 16
    assert raster.path.points[0].x == 0 and raster.path.points[4].x == 100
    # Second band runs right to left.
    assert raster.path.points[5].x == 100 and raster.path.points[9].x == 0
    assert {p.y for p in raster.path.points} == {12, 37, 62, 87}
    # Connector segments (vertical) carry no cell.
    assert 4 not in raster.cells
    assert raster.cells[5] == (1, 3)


def test_spacing_at_least_height_gives_single_band():
    cfg = ProbeConfig(0, 0, 100, 40, spacing=50, segment_length=20)
    assert cfg.bands == 1
    raster = raster_path(cfg)
    assert raster.path.segment_count == cfg.columns == 5
    assert {band for band, _ in raster.cells.values()} == {0}


def test_halving_spacing_doubles_segments():
    for spacing in (50, 20, 10, 4):
        full = raster_path(ProbeConfig(0, 0, 200, 200, spacing=spacing, segment_length=10)).path.segment_count
        half = raster_path(ProbeConfig(0, 0, 200, 200, spacing=spacing // 2, segment_length=10)).path.segment_count
        assert abs(half - 2 * full) <= 1


def test_probe_reconstructs_crossed_cells(keypair):
    cfg = ProbeConfig(0, 0, 100, 100, spacing=25, segment_length=25)
    bob = Path.from_pairs([(60, -10), (60, 110)])
    report = brute_force_probe(cfg, bob, keypair)
    assert report.cells_hit == [(0, 2), (1, 2), (2, 2), (3, 2)]
    assert report.probe_segments == 19
    assert report.bob_segments == 1


def test_probe_cost_scales_with_raster(keypair):
    bob = Path.from_pairs([(30, -10), (30, 110)])
    coarse = brute_force_probe(ProbeConfig(0, 0, 50, 100, spacing=50, segment_length=25), bob, keypair)
    fine = brute_force_probe(ProbeConfig(0, 0, 50, 100, spacing=25, segment_length=25), bob, keypair)
    assert fine.probe_segments >= 2 * coarse.probe_segments
    assert fine.subprotocol_calls >= 2 * coarse.subprotocol_calls
    assert fine.bytes_total >= 2 * coarse.bytes_total
    # Every (probe, route) segment pair costs at least the four orientation rounds.
    assert fine.sign_calls >= 4 * fine.probe_segments * fine.bob_segments


def test_extrapolated_hours():
    report = ProbeReport(
        bands=2, columns=4, probe_segments=10, bob_segments=2,
        mult_calls=80, sign_calls=80, bytes_total=1000, compare_s=2.0,
    )
    assert report.pair_seconds == pytest.approx(0.1)
    segments = 1000 * 1000 + 999
    assert report.extrapolated_hours() == pytest.approx(segments * 2 * 0.1 / 3600)


def test_report_jsonl():
    report = ProbeReport(
        bands=1, columns=2, probe_segments=2, bob_segments=1,
        mult_calls=8, sign_calls=8, bytes_total=500, compare_s=0.2, cells_hit=[(0, 1)],
    )
    out = io.StringIO()
    report.write_jsonl(out)
    lines = [json.loads(line) for line in out.getvalue().splitlines()]
    assert lines[0]["record"] == "summary"
    assert lines[0]["subprotocol_calls"] == 16
    assert "extrapolated_hours_1km2_1m" in lines[0]
    assert lines[1] == {"record": "cell", "band": 0, "column": 1}
