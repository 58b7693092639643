import io

import numpy as np
import pytest

from mongeampere.errors import ConfigurationError, DataError
from mongeampere.grid import GridFunction, classify, make_grid, sample


def test_make_grid_2d():
    g = make_grid(2, 31)
    assert g.h == pytest.approx(1.0 / 30)
    assert g.num_points == 961
    assert g.h * (g.n - 1) == pytest.approx(1.0)


def test_make_grid_3d():
    g = make_grid(3, 7)
    assert g.h == pytest.approx(1.0 / 6)
    assert g.num_points == 343


@pytest.mark.parametrize("dim,n", [(2, 2), (3, 2), (1, 10), (4, 10)])
def test_make_grid_rejects_bad_config(dim, n):
    with pytest.raises(ConfigurationError):
        make_grid(dim, n)


def test_sample_constant():
    g = make_grid(2, 31)
    u = sample(g, lambda x, y: np.ones_like(x))
    assert np.all(u.values == 1.0)


def test_sample_x_plus_y_on_3x3():
    g = make_grid(2, 3)
    u = sample(g, lambda x, y: x + y)
    # flat order: x fastest, y slow
    expected = [0.0, 0.5, 1.0, 0.5, 1.0, 1.5, 1.0, 1.5, 2.0]
    assert u.values == pytest.approx(expected)


def test_sample_pole_raises_data_error():
    g = make_grid(2, 31)  # x = 0.5 is on the lattice
    with pytest.raises(DataError, match="0.5"):
        sample(g, lambda x, y: 1.0 / (x - 0.5))


def test_classify_counts():
    assert classify(make_grid(2, 3)).n_interior == 1
    assert classify(make_grid(2, 3)).n_boundary == 8
    assert classify(make_grid(2, 31)).n_interior == 29**2
    assert classify(make_grid(3, 7)).n_interior == 5**3


def test_boundary_tag_matches_index_rule():
    g = make_grid(3, 5)
    pc = classify(g)
    m = g.multi_indices()
    on_face = np.any((m == 0) | (m == g.n - 1), axis=1)
    assert np.array_equal(~pc.interior, on_face)


def test_index_coordinate_round_trip():
    g = make_grid(3, 6)
    m = g.multi_indices()
    assert np.array_equal(g.flat_index(m), np.arange(g.num_points))
    assert g.coordinate(g.flat_index((2, 3, 1))) == pytest.approx([0.4, 0.6, 0.2])


def test_sample_readback_exact_for_polynomials():
    g = make_grid(2, 9)
    u = sample(g, lambda x, y: 2.0 * x**2 - 3.0 * x * y + y)
    pts = g.points()
    assert u.values == pytest.approx(2.0 * pts[:, 0] ** 2 - 3.0 * pts[:, 0] * pts[:, 1] + pts[:, 1], abs=0)


def test_gridfunction_csv_round_trip(tmp_path):
    g = make_grid(2, 5)
    u = sample(g, lambda x, y: x * y + 1.0 / 3.0)
    path = tmp_path / "u.csv"
    u.to_csv(path)
    raw = np.loadtxt(path, delimiter=",", skiprows=1)
    assert raw.shape == (25, 3)
    assert raw[:, :2] == pytest.approx(g.points(), abs=0)
    assert raw[:, 2] == pytest.approx(u.values, abs=0)
    with open(path) as f:
        assert f.readline().strip() == "x,y,value"


def test_gridfunction_length_checked():
    g = make_grid(2, 5)
    with pytest.raises(DataError):
        GridFunction(g, np.zeros(7))
