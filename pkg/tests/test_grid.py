import numpy as np
import pytest

import biharmlab as bl
from biharmlab.grid import GridSpec


def test_interval_spec():
    g = bl.interval(0.0, 1.0, 11)
    assert g.dimension == 1
    assert g.h == pytest.approx(0.1)
    assert g.mask.all()


def test_rectangle_isotropy_enforced():
    g = bl.rectangle((0.0, 1.0), (0.0, 0.5), 11)
    assert g.shape == (11, 6)
    with pytest.raises(ValueError, match="not an integer multiple"):
        bl.rectangle((0.0, 1.0), (0.0, 0.517), 11)
    with pytest.raises(ValueError, match="isotropic"):
        GridSpec(2, ((0.0, 1.0), (0.0, 1.0)), (11, 21))


def test_disk_mask_is_node_center_test():
    g = bl.disk_in_rectangle((0.0, 0.0), 1.0, 41)
    x, y = g.coords()
    inside = x**2 + y**2 < 1.0
    assert np.array_equal(g.mask, inside)
    # corners excluded, center included
    assert not g.mask[0, 0]
    assert g.mask[20, 20]


def test_field_rejects_shape_and_nonfinite():
    g = bl.interval(0.0, 1.0, 11)
    with pytest.raises(ValueError, match="shape"):
        bl.ScalarField(g, np.zeros(10))
    vals = np.zeros(11)
    vals[3] = np.inf
    with pytest.raises(ValueError, match="non-finite"):
        bl.ScalarField(g, vals)
    # non-finite allowed where invalid
    valid = np.ones(11, bool)
    valid[3] = False
    f = bl.ScalarField(g, vals, valid)
    assert np.isnan(f.values[3])


def test_fields_on_different_grids_do_not_combine():
    a = bl.ScalarField(bl.interval(0, 1, 11), np.ones(11))
    b = bl.ScalarField(bl.interval(0, 1, 21), np.ones(21))
    with pytest.raises(ValueError, match="different grids"):
        _ = a + b
    c = bl.ScalarField(bl.interval(0, 1, 11), np.full(11, 2.0))
    assert np.allclose((a + c).values, 3.0)
    assert np.allclose((a * c).values, 2.0)
    assert np.allclose((2.0 * a).values, 2.0)


@pytest.mark.parametrize("r_cells", [2.0, 3.5, 10.0])
def test_subregion_nonempty_at_two_cells(r_cells):
    g = bl.square(1.0, 33)
    r = r_cells * g.h
    sel = bl.SubRegion((0.37, -0.22), r).select(g)
    assert sel.any()


def test_subregion_respects_mask():
    g = bl.disk_in_rectangle((0.0, 0.0), 1.0, 41)
    sel = bl.SubRegion((0.99, 0.99), 0.5).select(g)
    x, y = g.coords()
    assert np.all(x[sel] ** 2 + y[sel] ** 2 < 1.0)


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_field_roundtrip(tmp_path, fmt):
    g = bl.disk_in_rectangle((0.1, -0.2), 0.8, 33)
    x, y = g.coords()
    f = bl.sample_field(lambda a, b: np.sin(a) + b**2, g)
    sidecar = bl.save_field(f, tmp_path / "field", fmt=fmt)
    back = bl.load_field(sidecar)
    assert back.grid == g
    assert np.array_equal(back.valid, f.valid)
    assert np.allclose(back.values[back.valid], f.values[f.valid])


def test_sample_field_skips_invalid_nodes():
    g = bl.disk_in_rectangle((0.0, 0.0), 1.0, 21)

    def fn(x, y):
        r2 = x**2 + y**2
        if np.any(r2 >= 1.0):
            raise AssertionError("evaluated outside the disk")
        return r2

    f = bl.sample_field(fn, g)
    assert np.isnan(f.values[~g.mask]).all()
