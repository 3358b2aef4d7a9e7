import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ltlab import build_table, make_curve

# The two worked example curves.
SERRE_CURVE = dict(label="serre-6-2", a=6, b=-2, serre_curve=True)
CM_CURVE = dict(label="cm-27", a=-768108000, b=8194304162000)


@pytest.fixture(scope="session")
def serre_curve():
    return make_curve(**SERRE_CURVE)


@pytest.fixture(scope="session")
def cm_curve():
    return make_curve(**CM_CURVE)


@pytest.fixture(scope="session")
def serre_table_small(serre_curve):
    return build_table(serre_curve, 2 * 10**4, workers=2)


@pytest.fixture(scope="session")
def cm_table_small(cm_curve):
    return build_table(cm_curve, 10**5, workers=2)
