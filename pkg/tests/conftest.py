import numpy as np
import pytest
from click.testing import CliRunner

from app.models.density import GaussianMixture
from app.schemas.quadrature import QuadratureConfig


@pytest.fixture
def standard_gaussian():
    return GaussianMixture.gaussian()


@pytest.fixture
def symmetric_mixture():
    return GaussianMixture([(0.5, -1.5, 1.0), (0.5, 1.5, 1.0)])


@pytest.fixture
def skewed_mixture():
    return GaussianMixture([(0.3, 0.0, 1.0), (0.7, 4.0, 0.5)])


@pytest.fixture
def three_component_mixture():
    return GaussianMixture([(0.2, -3.0, 0.5), (0.5, 0.0, 1.0), (0.3, 2.5, 0.8)])


@pytest.fixture
def random_mixture():
    """Seeded factory: 2-3 components, means at least 2 apart, variances in [0.3, 1.5]."""
    def build(seed: int) -> GaussianMixture:
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 4))
        means = np.cumsum(rng.uniform(2.0, 5.0, k)) - rng.uniform(2.0, 8.0)
        variances = rng.uniform(0.3, 1.5, k)
        weights = rng.dirichlet(np.full(k, 3.0))
        return GaussianMixture(zip(weights, means, variances))
    return build


@pytest.fixture
def quadrature():
    return QuadratureConfig()


@pytest.fixture
def runner():
    return CliRunner()
