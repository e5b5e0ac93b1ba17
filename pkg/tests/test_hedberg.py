import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifraclab.grid import ExponentConfig, Field, make_grid
from bifraclab.hedberg import (
    REGIONS,
    HedbergContext,
    case_select,
    layer_cake_bound,
    pointwise_bound_report,
    region_integral,
    region_split,
    solve_rho_lambda_case1,
    solve_rho_lambda_case2,
)
from bifraclab.operators import fractional_integral
from bifraclab.weights import WeightPair

from conftest import constant_field

positive = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)


class TestRegionSplit:
    def test_huge_radii_all_near(self, unit_grid_4):
        split = region_split((1, 1), 100.0, 100.0, unit_grid_4)
        assert np.all(split.masks["I"])
        for r in ("II", "III", "IV"):
            assert not np.any(split.masks[r])

    def test_tiny_radii(self, unit_grid_4):
        split = region_split((1, 1), 0.5, 0.5, unit_grid_4)
        assert split.masks["I"].sum() == 1 and split.masks["I"][1, 1]
        assert split.masks["III"].sum() == 3  # rest of the center row
        assert split.masks["IV"].sum() == 3  # rest of the center column
        assert split.masks["II"].sum() == 9

    def test_corner_counts(self, unit_grid_4):
        split = region_split((0, 0), 1.5, 1.5, unit_grid_4)
        counts = {r: int(split.masks[r].sum()) for r in REGIONS}
        assert counts == {"I": 4, "II": 4, "III": 4, "IV": 4}

    def test_masks_partition(self, unit_grid_4):
        split = region_split((2, 1), 1.2, 0.7, unit_grid_4)
        total = sum(split.masks[r].astype(int) for r in REGIONS)
        assert np.all(total == 1)

    def test_rejects_nonpositive_radii(self, unit_grid_4):
        with pytest.raises(ValueError):
            region_split((0, 0), 0.0, 1.0, unit_grid_4)


class TestRegionIntegral:
    def test_zero_field(self, balanced_config, unit_grid_4):
        split = region_split((1, 1), 1.0, 1.0, unit_grid_4)
        z = constant_field(unit_grid_4, 0.0)
        for r in REGIONS:
            assert region_integral(z, split, r, balanced_config) == 0.0

    def test_partition_identity(self, balanced_config):
        grid = make_grid(2.0, 16)
        rng = np.random.default_rng(1)
        f = Field(grid, rng.uniform(0.0, 2.0, grid.shape), nonnegative=True)
        full = fractional_integral(f, balanced_config)
        for center in ((0, 0), (7, 3), (15, 15)):
            split = region_split(center, 0.9, 1.7, grid)
            total = sum(region_integral(f, split, r, balanced_config) for r in REGIONS)
            assert total == pytest.approx(full.values[center], rel=1e-10)

    def test_far_single_cell_one_term(self, balanced_config):
        grid = make_grid(2.0, 16)
        values = np.zeros(grid.shape)
        values[14, 14] = 1.0
        f = Field(grid, values, nonnegative=True)
        split = region_split((1, 1), 0.5, 0.5, grid)
        assert split.masks["II"][14, 14]
        got = region_integral(f, split, "II", balanced_config)
        full = fractional_integral(f, balanced_config).values[1, 1]
        assert got == pytest.approx(full, rel=1e-12)
        for r in ("I", "III", "IV"):
            assert region_integral(f, split, r, balanced_config) == 0.0

    def test_unknown_region(self, balanced_config, unit_grid_4):
        split = region_split((0, 0), 1.0, 1.0, unit_grid_4)
        with pytest.raises(ValueError):
            region_integral(constant_field(unit_grid_4), split, "V", balanced_config)


class TestLayerCake:
    def test_inside_half(self):
        cfg = ExponentConfig(n=1, m=1, p=2.0, q=4.0, alpha=0.5, beta=0.5)
        est = layer_cake_bound("inside", 0, 1.0, cfg)
        assert est.exact_value == pytest.approx(4.0)  # 2 r^alpha / alpha

    def test_outside_quarter(self):
        cfg = ExponentConfig(n=1, m=1, p=2.0, q=4.0, alpha=0.25, beta=0.25)
        est = layer_cake_bound("outside", 0, 1.0, cfg)
        assert est.exponent == pytest.approx(1.5)
        assert est.exact_value == pytest.approx(4.0)  # 2 r^(1-s)/(s-1)

    def test_inside_scaling(self, balanced_config):
        e1 = layer_cake_bound("inside", 0, 1.0, balanced_config)
        e2 = layer_cake_bound("inside", 0, 2.0, balanced_config)
        assert e2.exact_value == pytest.approx(2.0**balanced_config.alpha * e1.exact_value)

    def test_discrete_converges_first_order(self, balanced_config):
        errs = []
        for cells in (64, 128, 256):
            grid = make_grid(8.0, cells)
            est = layer_cake_bound("inside", 0, 1.0, balanced_config, grid=grid)
            errs.append(abs(est.discrete_value - est.exact_value))
        assert errs[2] < errs[1] < errs[0]
        # the singular cell limits the rate to h^alpha
        assert errs[1] / errs[2] > 2.0 ** (0.5 * balanced_config.alpha)

    def test_discrete_nan_without_grid(self, balanced_config):
        assert math.isnan(layer_cake_bound("inside", 0, 1.0, balanced_config).discrete_value)

    def test_errors(self, balanced_config):
        with pytest.raises(ValueError):
            layer_cake_bound("inside", 0, -1.0, balanced_config)
        with pytest.raises(ValueError):
            layer_cake_bound("sideways", 0, 1.0, balanced_config)


class TestCaseSelect:
    def test_strictly_greater_is_two(self):
        assert case_select(2.0, 1.0, 1.0) == "two"

    def test_tie_is_one(self):
        assert case_select(1.0, 1.0, 1.0) == "one"

    def test_zero_gf_is_one(self):
        assert case_select(0.0, 5.0, 5.0) == "one"

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            case_select(-1.0, 1.0, 1.0)


class TestSolvers:
    def test_case1_symmetric_fixed_point(self, balanced_config):
        rho, lam = solve_rho_lambda_case1(2.0, 2.0, 3.0, 3.0, balanced_config)
        assert rho == pytest.approx(1.0) and lam == pytest.approx(1.0)

    def test_case1_worked_example(self, balanced_config):
        # ratio 4, norm1/norm2 = 4: rho^(-1/2) = 4, lambda^(-1/2) = 1
        rho, lam = solve_rho_lambda_case1(4.0, 1.0, 4.0, 1.0, balanced_config)
        assert rho == pytest.approx(1.0 / 16.0, rel=1e-12)
        assert lam == pytest.approx(1.0, rel=1e-12)

    def test_case1_zero_homogeneous_in_f(self, balanced_config):
        base = solve_rho_lambda_case1(2.0, 3.0, 5.0, 7.0, balanced_config)
        c = 13.0
        scaled = solve_rho_lambda_case1(c * 2.0, c * 3.0, c * 5.0, c * 7.0, balanced_config)
        assert scaled[0] == pytest.approx(base[0], rel=1e-12)
        assert scaled[1] == pytest.approx(base[1], rel=1e-12)

    def test_case2_symmetric(self, balanced_config):
        rho, lam = solve_rho_lambda_case2(4.0, 2.0, 2.0, 2.0, balanced_config)
        assert rho == pytest.approx(1.0) and lam == pytest.approx(1.0)

    def test_case2_worked_example(self, balanced_config):
        fs = 3.0
        rho, lam = solve_rho_lambda_case2(fs * fs, fs, 2.0 * fs, fs / 2.0, balanced_config)
        assert rho == pytest.approx(0.25, rel=1e-12)
        assert lam == pytest.approx(4.0, rel=1e-12)

    def test_rejects_nonpositive(self, balanced_config):
        with pytest.raises(ValueError):
            solve_rho_lambda_case1(0.0, 1.0, 1.0, 1.0, balanced_config)
        with pytest.raises(ValueError):
            solve_rho_lambda_case2(1.0, -1.0, 1.0, 1.0, balanced_config)

    @settings(max_examples=50, deadline=None)
    @given(a=positive, b=positive, c=positive, d=positive)
    def test_case1_defining_equations(self, a, b, c, d):
        cfg = ExponentConfig.make_balanced(1, 1, 2.0, 4.0)
        rho, lam = solve_rho_lambda_case1(a, b, c, d, cfg)
        np_, mp_ = cfg.n / cfg.p, cfg.m / cfg.p
        # rho^(-n/p) lam^(-m/p) = a/b  and  rho^(-n/p)/lam^(-m/p) = c/d
        assert rho**-np_ * lam**-mp_ == pytest.approx(a / b, rel=1e-12)
        assert rho**-np_ / lam**-mp_ == pytest.approx(c / d, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(b=positive, c=positive, d=positive)
    def test_case2_defining_equations_and_simplification(self, b, c, d):
        cfg = ExponentConfig.make_balanced(1, 1, 2.0, 4.0)
        gf = c * d  # the transform is the product of the slice norms
        rho, lam = solve_rho_lambda_case2(gf, b, c, d, cfg)
        np_, mp_ = cfg.n / cfg.p, cfg.m / cfg.p
        assert rho**-np_ * lam**-mp_ == pytest.approx(gf / b**2, rel=1e-12)
        assert rho**-np_ / lam**-mp_ == pytest.approx(c / d, rel=1e-12)
        # simplified closed form
        assert rho**-np_ == pytest.approx(c / b, rel=1e-12)
        assert lam**-mp_ == pytest.approx(d / b, rel=1e-12)


class TestPointwiseBoundReport:
    def build(self, grid, config, f_values=None, seed=0):
        rng = np.random.default_rng(seed)
        if f_values is None:
            f_values = rng.uniform(0.0, 2.0, grid.shape)
        f = Field(grid, f_values, nonnegative=True)
        pair = WeightPair(
            omega=Field(grid, rng.uniform(0.5, 2.0, grid.shape), nonnegative=True),
            sigma=Field(grid, rng.uniform(0.5, 2.0, grid.shape), nonnegative=True),
            config=config,
        )
        return f, pair

    def test_zero_field_degenerate(self, balanced_config):
        grid = make_grid(2.0, 8)
        f, pair = self.build(grid, balanced_config, f_values=np.zeros(grid.shape))
        rep = pointwise_bound_report(f, pair, (3, 3), balanced_config)
        assert rep.degenerate
        assert rep.final_value == 0.0
        assert rep.region_values == (0.0, 0.0, 0.0, 0.0)

    def test_partition_and_radii(self, balanced_config):
        grid = make_grid(2.0, 16)
        f, pair = self.build(grid, balanced_config, seed=4)
        context = HedbergContext(f=f, pair=pair, config=balanced_config)
        full = fractional_integral(f, balanced_config)
        for center in ((0, 0), (8, 8), (3, 12)):
            rep = pointwise_bound_report(
                f, pair, center, balanced_config, context=context
            )
            assert not rep.degenerate
            assert sum(rep.region_values) == pytest.approx(
                full.values[center], rel=1e-10
            )
            assert rep.case in ("one", "two")
            assert rep.rho > 0.0 and rep.lam > 0.0
            assert rep.measured_constant == pytest.approx(
                rep.final_value / rep.final_bound
            )

    def test_constant_inputs(self, balanced_config):
        grid = make_grid(2.0, 8)
        f = constant_field(grid, 1.0)
        pair = WeightPair(
            omega=constant_field(grid, 1.0),
            sigma=constant_field(grid, 1.0),
            config=balanced_config,
        )
        rep = pointwise_bound_report(f, pair, (4, 4), balanced_config)
        assert not rep.degenerate
        full = fractional_integral(f, balanced_config).values[4, 4]
        assert sum(rep.region_values) == pytest.approx(full, rel=1e-10)
        assert np.isfinite(rep.measured_constant)

    def test_constant_invariance_under_scaling(self, balanced_config):
        grid = make_grid(2.0, 8)
        f, pair = self.build(grid, balanced_config, seed=9)
        base = pointwise_bound_report(f, pair, (4, 4), balanced_config)
        c = 5.0
        scaled_f = f.map(lambda v: c * v, nonnegative=True)
        rep_f = pointwise_bound_report(scaled_f, pair, (4, 4), balanced_config)
        assert rep_f.measured_constant == pytest.approx(
            base.measured_constant, rel=1e-10
        )
        scaled_pair = WeightPair(
            omega=pair.omega.map(lambda v: c * v, nonnegative=True),
            sigma=pair.sigma,
            config=balanced_config,
        )
        rep_w = pointwise_bound_report(f, scaled_pair, (4, 4), balanced_config)
        assert rep_w.case == base.case
        assert rep_w.measured_constant == pytest.approx(
            base.measured_constant, rel=1e-10
        )

    def test_case_one_reports_both_forms(self, balanced_config):
        # constants make Gf = 2 ||f sigma|| * (omega M f) impossible; force
        # case one with a flat field where Gf = ||fsigma||^2-ish
        grid = make_grid(1.0, 8)
        f = constant_field(grid, 1.0)
        pair = WeightPair(
            omega=constant_field(grid, 1.0),
            sigma=constant_field(grid, 1.0),
            config=balanced_config,
        )
        rep = pointwise_bound_report(f, pair, (4, 4), balanced_config)
        if rep.case == "one":
            assert np.isfinite(rep.alt_final_bound)
            assert np.isfinite(rep.alt_constant)
        else:
            assert math.isnan(rep.alt_final_bound)

    def test_region_ii_hoelder_step(self, balanced_config):
        # discrete Hoelder: masked integral <= ||f sigma||_p * (masked dual mass)^(1/p')
        grid = make_grid(2.0, 16)
        f, pair = self.build(grid, balanced_config, seed=7)
        from bifraclab.grid import lp_norm
        from bifraclab.operators import SeparableKernel

        kernel = SeparableKernel.build(grid, balanced_config)
        split = region_split((8, 8), 0.9, 0.9, grid)
        got = region_integral(f, split, "II", balanced_config, kernel=kernel)
        p, pc = balanced_config.p, balanced_config.p_conj
        mask = split.masks["II"]
        dual = pair.dual_sigma().values
        kernel_weights = np.outer(kernel.k1[8], kernel.k2[8])
        area = grid.cell_area
        dual_mass = float(
            np.sum((kernel_weights[mask] / area) ** pc * dual[mask]) * area
        )
        bound = lp_norm(f, p, weight=pair.sigma) * dual_mass ** (1.0 / pc)
        assert got <= bound * (1.0 + 1e-10)
