import numpy as np
import pytest
from hypothesis import settings

from pgtower import spec as S
from pgtower.build import build_group
from pgtower.corpus import D8, M16, M27, quaternion_spec

settings.register_profile("suite", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def d8():
    return build_group(D8)


@pytest.fixture(scope="session")
def q8():
    return build_group(quaternion_spec())


@pytest.fixture(scope="session")
def m16():
    return build_group(M16)


@pytest.fixture(scope="session")
def m27():
    return build_group(M27)


@pytest.fixture(scope="session")
def klein():
    return build_group(S.DirectProduct((S.Cyclic(2), S.Cyclic(2))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
