import numpy as np
import pytest

from armteleop.configs import all_config_ids, load_config
from armteleop.encoder import reading_from_angles
from armteleop.mapping import MappingParams


def record_criterion_line(config, line: str) -> None:
    """Collect acceptance-criterion verdicts for the end-of-run summary."""
    config._criterion_lines = getattr(config, "_criterion_lines", [])
    config._criterion_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(params=[c.value for c in all_config_ids()])
def config(request):
    """Parametrizes a test over all three built-in configurations."""
    return load_config(request.param)


@pytest.fixture
def config1():
    return load_config("config1")


@pytest.fixture
def config2():
    return load_config("config2")


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def make_reading(config, angles, ts=0):
    """Shorthand: EncoderFrame from neutral-relative degrees."""
    return reading_from_angles(config, np.asarray(angles, dtype=float), ts)


def random_in_range(config, rng, margin=0.0):
    """A random joint vector strictly inside the config's travel ranges."""
    lo, hi = config.limits()
    return rng.uniform(lo + margin, hi - margin)


def dyadic(angles, grid=2.0**-10):
    """Snap values to a power-of-two grid so float arithmetic on them is exact."""
    return np.round(np.asarray(angles, dtype=float) / grid) * grid


def identity_params(**overrides):
    """Params that make the pipeline an exact identity: no smoothing lag,
    no deadband unless asked for."""
    defaults = dict(deadband_tau=0.0, interp_steps=4, ema_alpha=1.0, rate_hz=50.0)
    defaults.update(overrides)
    return MappingParams(**defaults)
