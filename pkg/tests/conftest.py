import os
import sys
import zlib

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from rnspectral import parse_column_spec, read_sample  # noqa: E402
from rnspectral.fixtures import (FixtureUnavailable, fetch_uci_breast_cancer,  # noqa: E402
                                 generate_runge_fixture)

RUNGE_COLS = "9:0,6:7:8:1"
BREAST_COLS = "11:1,9:10:-1:0"


@pytest.fixture(scope="session")
def runge_path(tmp_path_factory):
    d = tmp_path_factory.mktemp("runge")
    return generate_runge_fixture(d / "runge_function.csv", n=7, dx=1e-4)


@pytest.fixture(scope="session")
def runge_sample(runge_path):
    return read_sample(runge_path, parse_column_spec(RUNGE_COLS))


@pytest.fixture(scope="session")
def breast_paths(tmp_path_factory):
    d = tmp_path_factory.mktemp("breast")
    try:
        return fetch_uci_breast_cancer(d)
    except FixtureUnavailable as exc:
        pytest.skip(f"breast cancer data unavailable offline: {exc}")


@pytest.fixture
def rng(request):
    # stable per test
    seed = zlib.crc32(request.node.nodeid.encode())
    return np.random.default_rng(seed)
