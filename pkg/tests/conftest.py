import numpy as np
import pytest

from isoprofile import SphereGeometry, cylinder_profile, sphere_profile


@pytest.fixture(scope="session")
def cyl3_mu2():
    return cylinder_profile(3, 2.0)


@pytest.fixture(scope="session")
def cyl4_mu32():
    return cylinder_profile(4, 2.0**1.5)


@pytest.fixture(scope="session")
def s4_47():
    return sphere_profile(SphereGeometry(4, 4.7))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
