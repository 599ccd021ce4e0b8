import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qrouter.router import ControlQubit, SignalQubit

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@st.composite
def signal_qubits(draw):
    polar = draw(st.floats(0.0, math.pi))
    azimuth = draw(st.floats(0.0, 2 * math.pi))
    return SignalQubit.from_angles(polar, azimuth)


@st.composite
def control_qubits(draw):
    theta = draw(st.floats(0.0, math.pi / 2))
    vartheta = draw(st.floats(0.0, 2 * math.pi, exclude_max=True))
    return ControlQubit(theta, vartheta)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
