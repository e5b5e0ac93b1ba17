import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifraclab.grid import (
    ExponentConfig,
    Field,
    Rect,
    integrate,
    interval_family,
    lp_norm,
    make_grid,
    partial_lp_norm,
    rectangle_family,
    sample,
)
from bifraclab.weights import counterexample_omega

from conftest import constant_field


def dyadic_values(n, m):
    """Arrays of dyadic rationals k/256: every partial sum is exact in binary."""
    return st.lists(
        st.lists(st.integers(0, 2**20), min_size=m, max_size=m),
        min_size=n,
        max_size=n,
    ).map(lambda rows: np.array(rows, dtype=np.float64) / 256.0)


class TestExponentConfig:
    def test_balanced_constructor(self):
        cfg = ExponentConfig.make_balanced(1, 1, 2.0, 4.0)
        assert cfg.alpha == cfg.beta == 0.25
        assert cfg.p_conj == 2.0

    def test_balanced_relation_enforced(self):
        with pytest.raises(ValueError):
            ExponentConfig(n=1, m=1, p=2.0, q=4.0, alpha=0.5, beta=0.25, balanced=True)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=1, m=1, p=4.0, q=2.0, alpha=0.25, beta=0.25),  # p > q
            dict(n=1, m=1, p=1.0, q=4.0, alpha=0.25, beta=0.25),  # p = 1
            dict(n=1, m=1, p=2.0, q=4.0, alpha=1.5, beta=0.25),  # alpha > n
            dict(n=1, m=1, p=2.0, q=4.0, alpha=0.25, beta=0.0),  # beta = 0
            dict(n=0, m=1, p=2.0, q=4.0, alpha=0.25, beta=0.25),  # n = 0
        ],
    )
    def test_invalid_configs(self, kwargs):
        with pytest.raises(ValueError):
            ExponentConfig(**kwargs)


class TestMakeGrid:
    def test_two_cells(self):
        grid = make_grid(1.0, 2)
        assert grid.cell_sizes == (1.0, 1.0)
        assert np.allclose(grid.centers(0), [-0.5, 0.5])

    def test_four_cells(self):
        assert make_grid(1.0, 4).cell_sizes == (0.5, 0.5)

    def test_eight_cells(self):
        grid = make_grid(2.0, 8)
        assert grid.cell_sizes == (0.5, 0.5)
        assert grid.centers(0)[0] == -1.75

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            make_grid(1.0, 3)

    def test_rejects_nonpositive_half_width(self):
        with pytest.raises(ValueError):
            make_grid(0.0, 4)

    def test_centers_avoid_hyperplanes(self):
        # centers are odd multiples of cell_size/2, never zero
        for cells in (2, 4, 8, 16, 32):
            grid = make_grid(1.0, cells)
            assert np.all(grid.centers(0) != 0.0)


class TestSample:
    def test_constant(self, unit_grid_4):
        f = sample(lambda x, y: 1.0, unit_grid_4)
        assert np.all(f.values == 1.0)
        assert f.nonnegative

    def test_abs_x_on_two_cells(self):
        grid = make_grid(1.0, 2)
        f = sample(lambda x, y: np.abs(x) * np.ones_like(y), grid)
        assert np.all(f.values == 0.5)

    def test_counterexample_omega_value(self, balanced_config):
        grid = make_grid(1.0, 2)  # centers at +-0.5
        f = sample(counterexample_omega(balanced_config), grid)
        assert f.values[1, 1] == pytest.approx((1.5) ** -1 * (1.5) ** -1)
        assert f.values[1, 1] == pytest.approx(0.4444, abs=5e-5)

    def test_rejects_non_finite(self):
        grid = make_grid(1.0, 2)
        with pytest.raises(ValueError):
            sample(lambda x, y: np.full_like(x * y, np.nan), grid)


class TestIntegrate:
    def test_constant_unit_rect(self, unit_grid_4):
        f = constant_field(unit_grid_4, 1.0)
        assert integrate(f, Rect(0, 0, 0, 0)) == 1.0

    def test_constant_three_quarter_area(self):
        grid = make_grid(1.0, 4)  # cell area 0.25
        f = constant_field(grid, 3.0)
        assert integrate(f, Rect(0, 0, 0, 0)) == 0.75

    def test_abs_x_full_domain(self):
        grid = make_grid(1.0, 2)
        f = sample(lambda x, y: np.abs(x) * np.ones_like(y), grid)
        assert integrate(f, Rect(0, 1, 0, 1)) == 2.0

    def test_out_of_bounds(self, unit_grid_4):
        with pytest.raises(ValueError):
            integrate(constant_field(unit_grid_4), Rect(0, 4, 0, 0))

    @settings(max_examples=25, deadline=None)
    @given(values=dyadic_values(4, 4), split=st.integers(1, 3))
    def test_additive_over_tilings_exact(self, values, split):
        grid = make_grid(2.0, 4)
        f = Field(grid, values, nonnegative=True)
        whole = integrate(f, Rect(0, 3, 0, 3))
        parts = integrate(f, Rect(0, split - 1, 0, 3)) + integrate(f, Rect(split, 3, 0, 3))
        assert whole == parts  # bit-exact for dyadic values


class TestLpNorm:
    def test_constant_on_unit_area(self):
        grid = make_grid(0.5, 4)  # domain [-1/2,1/2]^2, area 1
        assert lp_norm(constant_field(grid, 3.0), 2.0) == pytest.approx(3.0, rel=1e-15)

    def test_zero(self, unit_grid_4):
        assert lp_norm(constant_field(unit_grid_4, 0.0), 2.0) == 0.0

    def test_single_cell(self):
        grid = make_grid(1.0, 4)  # cell area 0.25
        values = np.zeros(grid.shape)
        values[0, 0] = 2.0
        assert lp_norm(Field(grid, values), 2.0) == pytest.approx(1.0, rel=1e-15)

    def test_grid_mismatch(self, unit_grid_4):
        other = constant_field(make_grid(2.0, 8))
        with pytest.raises(ValueError):
            lp_norm(constant_field(unit_grid_4), 2.0, weight=other)

    @settings(max_examples=25, deadline=None)
    @given(
        values=dyadic_values(4, 4),
        c=st.floats(0.01, 100.0, allow_nan=False),
        p=st.sampled_from([1.0, 2.0, 4.0]),
    )
    def test_absolute_homogeneity(self, values, c, p):
        grid = make_grid(2.0, 4)
        f = Field(grid, values, nonnegative=True)
        cf = Field(grid, c * values, nonnegative=True)
        assert lp_norm(cf, p) == pytest.approx(c * lp_norm(f, p), rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(values=dyadic_values(4, 4), bump=dyadic_values(4, 4))
    def test_monotone_in_pointwise_abs(self, values, bump):
        grid = make_grid(2.0, 4)
        f = Field(grid, values, nonnegative=True)
        g = Field(grid, values + bump, nonnegative=True)
        assert lp_norm(f, 2.0) <= lp_norm(g, 2.0) * (1.0 + 1e-12)


class TestPartialLpNorm:
    def test_constant_slice(self):
        grid = make_grid(1.0, 4)  # second factor [-1, 1]
        f = constant_field(grid, 3.0)
        got = partial_lp_norm(f, 2.0, None, fixed_axis=0, index=1)
        assert got == pytest.approx(3.0 * np.sqrt(2.0), rel=1e-15)

    def test_zero_slice(self, unit_grid_4):
        f = constant_field(unit_grid_4, 0.0)
        assert partial_lp_norm(f, 2.0, None, 0, 0) == 0.0

    def test_p1_two_cells(self):
        grid = make_grid(1.0, 2)  # unit cells
        f = Field(grid, np.array([[1.0, 2.0], [0.0, 0.0]]))
        assert partial_lp_norm(f, 1.0, None, fixed_axis=0, index=0) == 3.0

    def test_bad_index(self, unit_grid_4):
        with pytest.raises(ValueError):
            partial_lp_norm(constant_field(unit_grid_4), 2.0, None, 0, 4)


class TestFamilies:
    def test_dyadic_intervals_4(self):
        got = set(interval_family(4, "dyadic"))
        assert got == {(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (2, 3), (0, 3)}

    def test_dyadic_rectangles_2x2(self):
        assert len(rectangle_family(make_grid(1.0, 2), "dyadic")) == 9

    def test_all_intervals_4(self):
        assert len(interval_family(4, "all")) == 10

    def test_all_restricted_to_oracle_scale(self):
        with pytest.raises(ValueError):
            interval_family(32, "all")

    def test_family_inclusions(self):
        dyadic = set(interval_family(8, "dyadic"))
        shifted = set(interval_family(8, "dyadic_shifted"))
        everything = set(interval_family(8, "all"))
        assert dyadic <= shifted <= everything

    @pytest.mark.parametrize("mode", ["dyadic", "dyadic_shifted", "all"])
    def test_single_cells_present(self, mode):
        grid = make_grid(1.0, 8)
        singles = {(r.x0, r.y0) for r in rectangle_family(grid, mode) if r.cell_count == 1}
        assert len(singles) == 64

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            interval_family(8, "bogus")
