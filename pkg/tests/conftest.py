import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, derandomize=True, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def genus2_corpus():
    from hodgetau.hyperelliptic.checks import random_corpus
    return random_corpus(4, seed=11)


@pytest.fixture(scope="session")
def genus2_sample(genus2_corpus):
    from hodgetau.hyperelliptic import period_data
    c, spec = genus2_corpus[0]
    return c, spec, period_data(c)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
