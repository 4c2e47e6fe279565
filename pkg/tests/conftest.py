from __future__ import annotations

import pytest

import tiltmedian as tm


@pytest.fixture(scope="session")
def std_gaussian() -> tm.BaseMeasure:
    return tm.build_measure(tm.Gaussian(0.0, 1.0))


@pytest.fixture(scope="session")
def cosine_half() -> tm.BaseMeasure:
    return tm.build_measure(tm.PerturbedCosine(0.5))


@pytest.fixture(scope="session")
def quadratic_one() -> tm.BaseMeasure:
    return tm.build_measure(tm.PerturbedQuadratic(1.0))


@pytest.fixture(scope="session")
def symmetric_mixture() -> tm.BaseMeasure:
    return tm.build_measure(tm.GaussianMixture(0.5, -1.0, 1.0, 1.0, 1.0))


@pytest.fixture(scope="session")
def catalog(std_gaussian, cosine_half, quadratic_one, symmetric_mixture):
    """One representative per closed-form family."""
    return (std_gaussian, cosine_half, quadratic_one, symmetric_mixture)
