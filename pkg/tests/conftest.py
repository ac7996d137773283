import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

OMEGA_R = 1.495e14
OMEGA = 0.3 * OMEGA_R


@pytest.fixture(scope="session")
def ref_slab():
    from otqe.slab_optics import SlabModel
    return SlabModel(thickness=0.01)


@pytest.fixture(scope="session")
def ref_pair():
    from otqe.correlators import QubitPair
    return QubitPair.planar(OMEGA, 1.0, 1.0, 0.25)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
