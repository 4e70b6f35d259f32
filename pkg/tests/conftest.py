import pytest
from hypothesis import HealthCheck, settings

from divemeta.studyio import load_builtin

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def esd():
    records, _ = load_builtin("esd")
    return records
