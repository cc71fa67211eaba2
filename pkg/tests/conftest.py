import numpy as np
import pytest

from pile2dof.fir import FirConfig, build_fir
from pile2dof.synth import builtin_catalog, generate_event

FS = 256.0


@pytest.fixture(scope="session")
def default_fir():
    return build_fir(FirConfig.for_period(1.0 / FS))


@pytest.fixture(scope="session")
def catalog_records():
    return [(spec, generate_event(spec)) for spec in builtin_catalog()]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
