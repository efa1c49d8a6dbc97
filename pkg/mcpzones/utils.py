r"""
Small helpers shared across the package.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~meters_to_miles`    | Convert a length in meters to statute miles
    :func:`~stable_digest`      | Short hexadecimal digest of a sequence of strings
    :func:`~format_float`       | Fixed-decimal text rendering of a float, used by every writer
    :func:`~lexsorted`          | Order indices by `(distance, key)` with a stable tie-break
    :class:`~StageTimer`        | Collect wall-clock timings of named pipeline stages
"""

#************************************************************************
#       Copyright (C) 2025 The mcpzones developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 2 of the License, or
# any later version.
#                  http://www.gnu.org/licenses/
#************************************************************************

import hashlib
import logging
import time
from contextlib import contextmanager

import numpy as np

logger = logging.getLogger(__name__)

#===============================================
# Units
#===============================================

METERS_PER_MILE = 1609.344

def meters_to_miles(length_m):
    r"""
    Convert a length in meters to statute miles.

    EXAMPLES::

        >>> from mcpzones.utils import meters_to_miles
        >>> meters_to_miles(1609.344)
        1.0
        >>> meters_to_miles(804.672)
        0.5
    """
    return float(length_m) / METERS_PER_MILE

#===============================================
# Deterministic text output
#===============================================

def stable_digest(parts, length=12):
    r"""
    Return a short hexadecimal SHA-1 digest of a sequence of strings.

    The parts are joined with a unit separator, so ``['ab', 'c']`` and
    ``['a', 'bc']`` do not collide.

    INPUT:

    - ``parts`` -- iterable of strings

    - ``length`` -- (default: 12) number of hexadecimal characters kept

    EXAMPLES::

        >>> from mcpzones.utils import stable_digest
        >>> stable_digest(['A', 'B']) == stable_digest(['A', 'B'])
        True
        >>> stable_digest(['ab', 'c']) == stable_digest(['a', 'bc'])
        False
        >>> len(stable_digest(['x'], length=8))
        8
    """
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return hashlib.sha1(payload).hexdigest()[:length]

def format_float(value, digits=6):
    r"""
    Render ``value`` with a fixed number of decimals.

    Negative zero is written as zero and infinities as ``inf``, so that two
    runs on the same data write the same bytes.

    EXAMPLES::

        >>> from mcpzones.utils import format_float
        >>> format_float(900)
        '900.000000'
        >>> format_float(-0.0, 2)
        '0.00'
        >>> format_float(float('inf'))
        'inf'
        >>> format_float(-1e-12, 3)
        '0.000'
    """
    value = float(value)
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = "%.*f" % (digits, value)
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text

#===============================================
# Ordering
#===============================================

def lexsorted(distances, keys):
    r"""
    Return the permutation that sorts by ``distances`` ascending and breaks
    ties by ``keys`` ascending.

    EXAMPLES::

        >>> from mcpzones.utils import lexsorted
        >>> lexsorted([2.0, 1.0, 1.0], [0, 7, 3]).tolist()
        [2, 1, 0]
    """
    return np.lexsort((np.asarray(keys), np.asarray(distances, dtype=np.float64)))

#===============================================
# Stage timings
#===============================================

class StageTimer(object):
    r"""
    Collect wall-clock timings of named stages.

    Timings are informational only and never enter the deterministic outputs.

    EXAMPLES::

        >>> from mcpzones.utils import StageTimer
        >>> timer = StageTimer()
        >>> with timer.stage('ingest'):
        ...     pass
        >>> list(timer.timings())
        ['ingest']
        >>> timer.timings()['ingest'] >= 0
        True
    """
    def __init__(self):
        self._timings = {}

    def __repr__(self):
        return "A StageTimer with %s recorded stages" % len(self._timings)

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self._timings[name] = self._timings.get(name, 0.0) + elapsed
            logger.debug("stage %s took %.3f s", name, elapsed)

    def timings(self):
        """
        Get the recorded timings in seconds, in stage order.
        """
        return dict(self._timings)
