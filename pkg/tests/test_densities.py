import math

import numpy as np
import pytest

from app.core.exceptions import InvalidInputError, SupportError
from app.models.density import DensityGrid, GaussianMixture
from app.models.laplace import LaplaceMeasure
from app.services import densities

INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)


class TestGaussianMixture:
    def test_weights_are_normalized(self):
        mixture = GaussianMixture([(2, 0, 1), (6, 3, 1)])
        assert mixture.weights.tolist() == pytest.approx([0.25, 0.75])

    def test_moments(self):
        mixture = GaussianMixture([(0.5, -1, 1), (0.5, 1, 1)])
        assert mixture.mean == pytest.approx(0.0)
        assert mixture.variance == pytest.approx(2.0)

    @pytest.mark.parametrize("component", [(0, 0, 1), (1, 0, 0), (1, float("nan"), 1), (-1, 0, 1)])
    def test_invalid_component(self, component):
        with pytest.raises(InvalidInputError):
            GaussianMixture([component])

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            GaussianMixture([])

    def test_two_point_family(self):
        mixture = GaussianMixture.two_point(0.3, 5.0)
        assert [(c.weight, c.mean, c.variance) for c in mixture.components] == [
            pytest.approx((0.3, 0.0, 1.0)), pytest.approx((0.7, 5.0, 1.0))
        ]

    @pytest.mark.parametrize("weight, separation", [(0.4, 0.0), (1.0, 3.0)])
    def test_two_point_degenerates_to_gaussian(self, weight, separation):
        assert len(GaussianMixture.two_point(weight, separation)) == 1

    def test_two_point_weight_range(self):
        with pytest.raises(InvalidInputError):
            GaussianMixture.two_point(0.0, 1.0)


class TestEvolve:
    def test_variance_grows_by_t(self, skewed_mixture):
        evolved = densities.evolve(skewed_mixture, 1.5)
        assert evolved.variances.tolist() == pytest.approx((skewed_mixture.variances + 1.5).tolist())
        assert evolved.means.tolist() == skewed_mixture.means.tolist()

    def test_zero_time_is_identity(self, skewed_mixture):
        assert densities.evolve(skewed_mixture, 0.0) is skewed_mixture

    def test_semigroup(self, symmetric_mixture):
        twice = densities.evolve(densities.evolve(symmetric_mixture, 1.0), 2.0)
        once = densities.evolve(symmetric_mixture, 3.0)
        assert twice.variances.tolist() == pytest.approx(once.variances.tolist())

    def test_negative_time(self, standard_gaussian):
        with pytest.raises(InvalidInputError):
            densities.evolve(standard_gaussian, -0.1)

    def test_mixture_convolution(self):
        total = densities.mixture_convolve(GaussianMixture.gaussian(1.0, 2.0), GaussianMixture.gaussian(-1.0, 3.0))
        assert (total.mean, total.variance) == pytest.approx((0.0, 5.0))


class TestDerivatives:
    def test_standard_gaussian_at_origin(self, standard_gaussian):
        values = densities.pdf_derivatives(standard_gaussian, 0.0, 2)
        assert values.tolist() == pytest.approx([INV_SQRT_2PI, 0.0, -INV_SQRT_2PI], abs=1e-12)

    def test_score_vanishes_at_the_mean(self):
        values = densities.pdf_derivatives(GaussianMixture.gaussian(2.0, 0.7), 2.0, 1)
        assert abs(values[1]) < 1e-15

    def test_symmetric_mixture_is_flat_at_zero(self, symmetric_mixture):
        assert abs(densities.pdf_derivatives(symmetric_mixture, 0.0, 3)[1]) < 1e-15

    def test_matches_finite_differences(self, skewed_mixture):
        y = np.linspace(-3, 7, 20001)
        values = densities.pdf_derivatives(skewed_mixture, y, 3)
        for i in range(3):
            numeric = np.gradient(values[i], y)
            assert np.max(np.abs(numeric[5:-5] - values[i + 1][5:-5])) < 1e-5

    def test_far_tail_ratios_are_finite(self, standard_gaussian):
        scaled, _ = densities.scaled_pdf_derivatives(standard_gaussian, np.array([60.0]), 2)
        ratios = scaled[1:, 0] / scaled[0, 0]
        assert np.all(np.isfinite(ratios))
        assert ratios[0] == pytest.approx(-60.0)

    def test_order_bound(self, standard_gaussian):
        with pytest.raises(InvalidInputError):
            densities.pdf_derivatives(standard_gaussian, 0.0, 17)


class TestGrids:
    def test_grid_is_normalized(self):
        grid = DensityGrid(0.0, 0.5, [0.0, 2.0, 2.0, 0.0])
        assert grid.mass == pytest.approx(1.0)

    def test_grid_rejects_negative_values(self):
        with pytest.raises(InvalidInputError):
            DensityGrid(0.0, 0.1, [0.0, -1.0, 1.0])

    def test_sample_mixture(self, skewed_mixture):
        grid = densities.sample_mixture(skewed_mixture)
        assert grid.mass == pytest.approx(1.0)
        assert densities.boundary_mass(grid) < 1e-12

    def test_heat_flow_on_grid_matches_closed_form(self, standard_gaussian):
        grid = densities.sample_mixture(standard_gaussian, spacing=0.01, half_width=12.0)
        evolved = densities.heat_evolve_grid(grid, 0.25)
        exact = densities.pdf(GaussianMixture.gaussian(0.0, 1.25), evolved.y)
        assert np.max(np.abs(evolved.values - exact)) < 1e-6

    def test_uniform_density_has_mass_at_the_boundary(self):
        grid = DensityGrid(0.0, 0.01, np.ones(101))
        with pytest.raises(SupportError):
            densities.heat_evolve_grid(grid, 1e-4)

    def test_kernel_wider_than_grid(self, standard_gaussian):
        grid = densities.sample_mixture(standard_gaussian, spacing=0.01, half_width=12.0)
        with pytest.raises(SupportError) as exc_info:
            densities.heat_evolve_grid(grid, 4.0)
        assert "extend the grid" in exc_info.value.hint

    def test_grid_flow_needs_positive_time(self, standard_gaussian):
        with pytest.raises(InvalidInputError):
            densities.heat_evolve_grid(densities.sample_mixture(standard_gaussian), 0.0)

    def test_convolution(self, standard_gaussian):
        grid = densities.sample_mixture(standard_gaussian, spacing=0.01, half_width=12.0)
        total = densities.convolve(grid, grid)
        exact = densities.pdf(GaussianMixture.gaussian(0.0, 2.0), total.y)
        assert np.max(np.abs(total.values - exact)) < 1e-6

    def test_convolution_needs_equal_spacing(self, standard_gaussian):
        a = densities.sample_mixture(standard_gaussian, spacing=0.01)
        b = densities.sample_mixture(standard_gaussian, spacing=0.02)
        with pytest.raises(InvalidInputError):
            densities.convolve(a, b)


class TestLaplaceMeasure:
    def test_exponential_grid(self):
        measure = LaplaceMeasure.exponential(2.0, 30.0, 1001)
        assert measure.x[0] == 0.0
        assert measure.density[0] == 1.0

    def test_point_mass(self):
        measure = LaplaceMeasure.point_mass(1.5, 2.0)
        assert measure.atoms == ((1.5, 2.0),)
        assert measure.x.size == 0

    def test_negative_support(self):
        with pytest.raises(InvalidInputError):
            LaplaceMeasure([-1.0, 0.0, 1.0], [1.0, 1.0, 1.0])

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            LaplaceMeasure()
