#************************************************************************
#       Copyright (C) 2025 The mcpzones developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 2 of the License, or
# any later version.
#                  http://www.gnu.org/licenses/
#************************************************************************

import pytest

# doctests of these functions run at full size
SLOW_PREFIX = 'mcpzones.acceptance.'

def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help="run the full-size checks of mcpzones.acceptance")

def pytest_collection_modifyitems(config, items):
    skip = pytest.mark.skip(reason="full-size check, run with --runslow")
    for item in items:
        if item.name.startswith(SLOW_PREFIX):
            item.add_marker(pytest.mark.slow)
            if not config.getoption('--runslow'):
                item.add_marker(skip)

# doctests were written against the NumPy 1.x scalar repr (``4764.0`` rather
# than ``np.float64(4764.0)``); keep that repr under NumPy >= 2
@pytest.fixture(autouse=True)
def _numpy_legacy_repr(doctest_namespace):
    import numpy as np
    if int(np.__version__.split('.')[0]) >= 2:
        with np.printoptions(legacy='1.25'):
            yield
    else:
        yield
