import pytest

from sparsetrain import ModelParams
from sparsetrain.kernels import backends

# canonical desk-scale configuration: k_c=16384, k_d=4096, L=16
P0 = dict(k_c=16384, k_d=4096, L=16)


@pytest.fixture
def p0():
    return ModelParams(**P0, gain_model="constant", sampling_mode="fixed_count")


@pytest.fixture
def p0_gaussian():
    return ModelParams(**P0, gain_model="gaussian", sampling_mode="fixed_count")


@pytest.fixture(params=sorted(backends()))
def kernel_backend(request):
    return backends()[request.param]
