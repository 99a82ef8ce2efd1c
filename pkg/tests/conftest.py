import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from optospring.params import ModeParams, Topology, preset

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

TWO_PI = 2 * math.pi

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"AC{key:<2} {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(params=["aligo", "aligo-equal", "msi", "msi-equal"])
def any_preset(request):
    return preset(request.param)


@st.composite
def aligo_params(draw, delta_min_hz=0.2):
    """Random aLIGO-like mode parameters (rad/s internally)."""
    hz = lambda lo, hi: TWO_PI * draw(st.floats(lo, hi))  # noqa: E731
    return ModeParams(
        gamma_w=hz(0.5, 10.0),
        gamma_s=hz(0.1, 5.0),
        delta_w=-hz(5.0, 60.0),
        delta_s=hz(20.0, 80.0),
        delta_arm=hz(delta_min_hz, 10.0),
        mass=draw(st.floats(10.0, 80.0)),
        arm_length=4000.0,
        circ_power=draw(st.floats(1e3, 3e4)),
        topology=Topology.ALIGO,
    )


def random_aligo(rng, **overrides):
    """Same distribution as :func:`aligo_params`, from a numpy Generator."""
    u = lambda lo, hi: float(rng.uniform(lo, hi))  # noqa: E731
    fields = dict(
        gamma_w=TWO_PI * u(0.5, 10.0),
        gamma_s=TWO_PI * u(0.1, 5.0),
        delta_w=-TWO_PI * u(5.0, 60.0),
        delta_s=TWO_PI * u(20.0, 80.0),
        delta_arm=TWO_PI * u(0.2, 10.0),
        mass=u(10.0, 80.0),
        arm_length=4000.0,
        circ_power=u(1e3, 3e4),
    )
    fields.update(overrides)
    return ModeParams(**fields)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
