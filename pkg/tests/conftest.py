"""Shared fixtures: the reference systems realized through stage 2."""
import copy

import pytest

from checks.context import VerificationContext
from construction.basis_assembly import build_construction
from construction.bd_system import build_system
from data.reference_systems import AFFINE_CONFIG, EXPLICIT_CONFIG, P0_CONFIG
from run_config import RunConfig


def make_config(base: dict, **overrides) -> RunConfig:
    data = copy.deepcopy(base)
    data.update(overrides)
    return RunConfig.model_validate(data)


SMALL_SAMPLES = {
    "elementary": 8,
    "pairs": 8,
    "random": 8,
    "prefix_indices": 8,
    "dual_crosscheck_support": 3,
    "net_molecules": 8,
    "core_vectors": 60,
}


@pytest.fixture(scope="session")
def p0_config() -> RunConfig:
    return make_config(P0_CONFIG, samples=SMALL_SAMPLES)


@pytest.fixture(scope="session")
def p0_system(p0_config):
    return build_system(p0_config.system)


@pytest.fixture(scope="session")
def p0(p0_system, p0_config):
    return build_construction(p0_system, p0_config.depth)


@pytest.fixture(scope="session")
def p0_chain(p0):
    return p0.chain


@pytest.fixture(scope="session")
def p0_context(p0_config, p0_system, p0) -> VerificationContext:
    return VerificationContext(p0_config, p0_system, p0)


@pytest.fixture(scope="session")
def affine_config() -> RunConfig:
    return make_config(AFFINE_CONFIG)


@pytest.fixture(scope="session")
def affine_system(affine_config):
    return build_system(affine_config.system)


def realize(config: RunConfig) -> VerificationContext:
    system = build_system(config.system)
    return VerificationContext(config, system, build_construction(system, config.depth))


@pytest.fixture(scope="session")
def affine_context() -> VerificationContext:
    """Halving extension: ρ and the stage-1 lifts carry rational coordinates."""
    return realize(make_config(AFFINE_CONFIG, samples=SMALL_SAMPLES))


@pytest.fixture(scope="session")
def explicit_context() -> VerificationContext:
    return realize(make_config(EXPLICIT_CONFIG, samples=SMALL_SAMPLES))
