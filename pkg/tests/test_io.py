import numpy as np
import pytest

from wignerdamp import io
from wignerdamp.grid import WignerField, build_grid
from wignerdamp.observables import MomentRecord


def field(seed=0, t=1.5):
    g = build_grid(-4.0, 4.0, 16, -2.0, 2.0, 8, 0.7)
    rng = np.random.default_rng(seed)
    return WignerField(g, rng.standard_normal(g.shape), t)


def test_snapshot_round_trip_is_bit_identical(tmp_path):
    f = field()
    path = io.write_snapshot(f, tmp_path / "a.wig")
    back = io.read_snapshot(path)
    assert back.values.tobytes() == f.values.tobytes()
    assert back.time == f.time
    assert back.grid.shape == f.grid.shape
    assert (back.grid.x_min, back.grid.x_max, back.grid.p_min, back.grid.p_max, back.grid.hbar) == \
        (f.grid.x_min, f.grid.x_max, f.grid.p_min, f.grid.p_max, f.grid.hbar)
    io.write_snapshot(back, tmp_path / "b.wig")
    assert (tmp_path / "a.wig").read_bytes() == (tmp_path / "b.wig").read_bytes()


def test_snapshot_rejects_truncated_file(tmp_path):
    path = io.write_snapshot(field(), tmp_path / "a.wig")
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="expected"):
        io.read_snapshot(path)


def test_snapshot_rejects_foreign_file(tmp_path):
    path = tmp_path / "x.wig"
    path.write_bytes(b"P6 1 1\n")
    with pytest.raises(ValueError, match="not a WIG1"):
        io.read_snapshot(path)


def test_zero_field_heatmap_is_uniform_mid_scale(tmp_path):
    f = field()
    zero = WignerField(f.grid, np.zeros(f.grid.shape), 0.0)
    ppm, side = io.write_heatmap(zero, tmp_path / "z.ppm")
    img = io.read_ppm(ppm)
    assert img.shape == (f.grid.n_p, f.grid.n_x, 3)
    assert np.all(img == 255)
    assert "vmin" in side.read_text() and "vmax" in side.read_text()


def test_heatmap_orientation_and_sign(tmp_path):
    f = field()
    v = np.zeros(f.grid.shape)
    v[0, -1] = 1.0    # smallest x, largest p: top-left pixel, red
    v[-1, 0] = -1.0   # largest x, smallest p: bottom-right pixel, blue
    img = io.read_ppm(io.write_heatmap(WignerField(f.grid, v), tmp_path / "h.ppm")[0])
    assert tuple(img[0, 0]) == (255, 0, 0)
    assert tuple(img[-1, -1]) == (0, 0, 255)


def test_moments_csv_header_and_line_count(tmp_path):
    recs = [MomentRecord(float(t), 0.1 * t, 1.0, 2.0, 0.5, 0.0, 1.0, 0.75) for t in range(3)]
    path = io.write_moments_csv(recs, tmp_path / "m.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == ",".join(MomentRecord.columns())
    assert io.read_moments_csv(path) == recs


def test_unwritable_output_raises_output_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(io.OutputError):
        io.write_moments_csv([], blocker / "sub" / "m.csv")
    with pytest.raises(io.OutputError):
        io.ensure_dir(blocker / "sub")


def test_table_csv_formats_floats_exactly(tmp_path):
    path = io.write_table_csv([{"a": 0.1, "b": "x"}], tmp_path / "t.csv", ["a", "b"])
    assert path.read_text().splitlines() == ["a,b", "0.10000000000000001,x"]
