import pytest

import winf.presets as presets
from winf import build_evaluator, model_from_dict


@pytest.fixture(scope="session")
def uniform_F():
    return build_evaluator(model_from_dict(presets.uniform()))


@pytest.fixture(scope="session")
def tent_F():
    return build_evaluator(model_from_dict(presets.tent()))


@pytest.fixture(scope="session")
def quad_F():
    return build_evaluator(model_from_dict(presets.even_zero(2)))


@pytest.fixture(scope="session")
def gap_F():
    return build_evaluator(model_from_dict(presets.gap()), force=True)


@pytest.fixture(scope="session")
def invsqrt_F():
    return build_evaluator(model_from_dict(presets.inverse_sqrt()))


@pytest.fixture(scope="session")
def mixed_F():
    return build_evaluator(model_from_dict(presets.zero_with_singularity()))
