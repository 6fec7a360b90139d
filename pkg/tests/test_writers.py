import numpy as np
import pytest

from subquantum import gallery
from subquantum.errors import IoError, PaletteMismatch
from subquantum.model import GridSpec
from subquantum.superpose import superpose
from subquantum.writers import colorize, heatmap_pixels, read_grid, read_ppm, render_heatmap, write_grid

G3 = GridSpec(-1.0, 1.0, 3, 1.0, 2)


def test_zero_grid_csv(tmp_path):
    path = write_grid(np.zeros((3, 3)), G3, tmp_path / "z.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0].split(",") == ["t\\x", "-1.0", "0.0", "1.0"]
    assert lines[1] == "0.0,0.0,0.0,0.0"


def test_header_count_and_round_trip(tmp_path):
    g = GridSpec(-3.0, 2.0, 17, 0.3, 5)
    rng = np.random.default_rng(0)
    field = rng.standard_normal((6, 17)) * 10.0 ** rng.integers(-300, 300, (6, 17))
    path = write_grid(field, g, tmp_path / "f.csv")
    header = path.read_text().splitlines()[0].split(",")
    assert len(header) == g.nx + 1
    t, x, back = read_grid(path)
    assert np.array_equal(back, field)
    assert np.array_equal(x, g.x) and np.array_equal(t, g.t)


def test_shape_mismatch(tmp_path):
    with pytest.raises(ValueError):
        write_grid(np.zeros((2, 3)), G3, tmp_path / "bad.csv")


def test_unwritable(tmp_path):
    with pytest.raises(IoError):
        write_grid(np.zeros((3, 3)), G3, tmp_path / "missing" / "f.csv")


def test_all_zero_intensity_is_white(tmp_path):
    path = render_heatmap(np.zeros((3, 3)), G3, "intensity", tmp_path / "z.ppm")
    w, h, px = read_ppm(path)
    assert (w, h) == (3, 3)
    assert np.all(px == 255)


def test_header_bytes(tmp_path):
    g = GridSpec(0.0, 1.0, 4, 1.0, 6)
    path = render_heatmap(np.ones((7, 4)), g, "intensity", tmp_path / "o.ppm")
    data = path.read_bytes()
    assert data.startswith(b"P6\n7 4\n255\n")
    assert len(data) == len(b"P6\n7 4\n255\n") + 7 * 4 * 3


def test_palette_anchors():
    assert colorize(np.array([0.0]), heatmap_pixels.__globals__["INTENSITY"]).tolist() == [[255, 255, 255]]
    field = np.array([[0.0, 1.0 / 3, 2.0 / 3, 1.0]])
    px = heatmap_pixels(field, "intensity")
    # rows are x from the top down; column is the single time
    assert px[:, 0].tolist() == [[255, 0, 0], [255, 165, 0], [255, 255, 0], [255, 255, 255]]
    signed = np.array([[-2.0, 0.0, 2.0]])
    px = heatmap_pixels(signed, "diverging")
    assert px[:, 0].tolist() == [[255, 0, 0], [255, 255, 255], [0, 0, 255]]


def test_palette_mismatch():
    with pytest.raises(PaletteMismatch):
        heatmap_pixels(np.array([[-1.0, 1.0]]), "intensity")
    with pytest.raises(PaletteMismatch):
        heatmap_pixels(np.array([[0.0, 1.0]]), "diverging")
    with pytest.raises(PaletteMismatch):
        heatmap_pixels(np.array([[0.0, 1.0]]), "rainbow")
    # round-off negatives are tolerated by the intensity palette
    heatmap_pixels(np.array([[-1e-18, 1.0]]), "intensity")


def test_entangling_image_mirror(tmp_path):
    cfg = gallery.fig2_zero_velocity()
    f = superpose(cfg)
    _, _, px = read_ppm(render_heatmap(f.J_e, cfg.grid, "diverging", tmp_path / "je.ppm"))
    red = (px[..., 0] == 255) & (px[..., 2] < 200)
    blue = (px[..., 2] == 255) & (px[..., 0] < 200)
    assert red.any() and blue.any()
    # odd field: red above the central row mirrors blue below
    assert np.array_equal(red, blue[::-1])
