r"""
Weighted multi-criteria prioritization of risk zones.

Each zone is described by six factor scores normalized to `[0, 1]`; the
composite score is the weighted sum of the factors with percentage weights, so
that it lies in `[0, 100]`. The default weights give customer impact 30%,
redundancy loss 20%, critical infrastructure 10%, asset condition 20%,
restoration complexity 10% and outage risk 10%.

Weights and factors
~~~~~~~~~~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~FactorVector`       | Six normalized factor scores of one zone
    :class:`~WeightVector`       | Six percentage weights
    :func:`~validate_weights`    | Check that weights are non-negative and sum to 100
    :func:`~load_weights`        | Read weights from a JSON file
    :func:`~normalize_factor`    | Map one raw factor column to `[0, 1]`
    :func:`~normalize_table`     | Normalize a raw factor table column by column

Scoring and ranking
~~~~~~~~~~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~score_zone`          | Composite score of one zone
    :func:`~rank_zones`          | Rank zones by composite score
    :class:`~PriorityRanking`    | The ranked zones
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

import json
import logging
import math
from collections import namedtuple

import numpy as np
from scipy.stats import rankdata

logger = logging.getLogger(__name__)

FACTORS = ('customer_impact', 'redundancy_loss', 'critical_infrastructure',
           'asset_condition', 'restoration_complexity', 'outage_risk')

NORMALIZATIONS = ('minmax', 'rank', 'passthrough')

# relative drift of the weight sum that is silently normalized away
WEIGHT_SUM_TOLERANCE = 1e-6

FactorVector = namedtuple('FactorVector', FACTORS)
FactorVector.__doc__ = """Normalized factor scores of a zone, each in `[0, 1]`; ``nan`` marks a missing value."""

WeightVector = namedtuple('WeightVector', FACTORS)
WeightVector.__doc__ = """Percentage weights of the six factors."""

DEFAULT_WEIGHTS = WeightVector(30.0, 20.0, 10.0, 20.0, 10.0, 10.0)

RankedZone = namedtuple('RankedZone', ['rank', 'zone_id', 'factors', 'score', 'imputed'])
RankedZone.__doc__ = """A ranked zone: rank from 1, id, factors used, score and the names of imputed factors."""

class WeightError(ValueError):
    r"""
    Invalid factor weights.
    """

class FactorError(ValueError):
    r"""
    A zone lacks the value of a factor; ``zone_id`` and ``factor`` name it.
    """
    def __init__(self, zone_id, factor):
        super(FactorError, self).__init__("zone %r has no value for factor %s" % (zone_id, factor))
        self.zone_id = zone_id
        self.factor = factor

#===============================================
# Weights
#===============================================

def _as_weights(w):
    if isinstance(w, dict):
        unknown = sorted(set(w) - set(FACTORS))
        if unknown:
            raise WeightError("unknown factor(s) in weights: %s" % ", ".join(unknown))
        missing = [f for f in FACTORS if f not in w]
        if missing:
            raise WeightError("weights missing for factor(s): %s" % ", ".join(missing))
        w = [w[f] for f in FACTORS]
    values = list(w)
    if len(values) != len(FACTORS):
        raise WeightError("expected %s weights, got %s" % (len(FACTORS), len(values)))
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError):
        raise WeightError("weights must be numbers, got %r" % (values,))

def validate_weights(w):
    r"""
    Return a validated :class:`WeightVector`.

    INPUT:

    - ``w`` -- a :class:`WeightVector`, a sequence of six numbers in factor
      order, or a dictionary keyed by factor name

    OUTPUT:

    The weights as a :class:`WeightVector`. A sum within a relative drift of
    `10^{-6}` of 100 is rescaled to exactly 100.

    EXAMPLES::

        >>> from mcpzones.prioritize import validate_weights, DEFAULT_WEIGHTS
        >>> validate_weights(DEFAULT_WEIGHTS) == DEFAULT_WEIGHTS
        True
        >>> sum(DEFAULT_WEIGHTS)
        100.0
        >>> validate_weights([100, 0, 0, 0, 0, 0]).customer_impact
        100.0
        >>> w = validate_weights([30, 20, 10, 20, 10, 10 + 1e-5])
        >>> round(math.fsum(w), 9), w.outage_risk > 10.0
        (100.0, True)

    TESTS::

        >>> validate_weights([30, 20, 10, 20, 10, 0])
        Traceback (most recent call last):
        ...
        mcpzones.prioritize.WeightError: weights sum to 90.0, expected 100
        >>> validate_weights([50, 70, -20, 0, 0, 0])
        Traceback (most recent call last):
        ...
        mcpzones.prioritize.WeightError: weight of critical_infrastructure is negative: -20.0
        >>> validate_weights({'customer_impact': 100})
        Traceback (most recent call last):
        ...
        mcpzones.prioritize.WeightError: weights missing for factor(s): redundancy_loss, critical_infrastructure, asset_condition, restoration_complexity, outage_risk
    """
    values = _as_weights(w)
    for name, v in zip(FACTORS, values):
        if not math.isfinite(v):
            raise WeightError("weight of %s is not finite: %r" % (name, v))
        if v < 0:
            raise WeightError("weight of %s is negative: %r" % (name, v))
    total = math.fsum(values)
    if abs(total - 100.0) > WEIGHT_SUM_TOLERANCE * 100.0:
        raise WeightError("weights sum to %r, expected 100" % total)
    if total != 100.0:
        values = [v * 100.0 / total for v in values]
    return WeightVector(*values)

def load_weights(path):
    r"""
    Read a JSON object mapping the six factor names to percentages.

    EXAMPLES::

        >>> import json, os, tempfile
        >>> from mcpzones.prioritize import load_weights, FACTORS
        >>> path = os.path.join(tempfile.mkdtemp(), 'weights.json')
        >>> with open(path, 'w') as f:
        ...     json.dump(dict(zip(FACTORS, [50, 10, 10, 10, 10, 10])), f)
        >>> load_weights(path).customer_impact
        50.0
    """
    with open(path, encoding='utf-8') as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise WeightError("%s must hold a JSON object of factor weights" % path)
    return validate_weights(doc)

#===============================================
# Normalization
#===============================================

def normalize_factor(values, method='minmax'):
    r"""
    Map a raw factor column to `[0, 1]`.

    INPUT:

    - ``values`` -- raw values across zones; ``nan`` entries are missing and
      are passed through unchanged

    - ``method`` -- (default: ``'minmax'``) one of:

      - ``'minmax'`` -- maps `[\min, \max]` onto `[0, 1]`; a constant column
        gives 0.5 everywhere

      - ``'rank'`` -- `(r - 1)/(n - 1)` where `r` is the average rank of the
        value; a single value gives 0.5

      - ``'passthrough'`` -- checks that the values already lie in `[0, 1]`

    OUTPUT:

    A NumPy array of the same length.

    EXAMPLES::

        >>> from mcpzones.prioritize import normalize_factor
        >>> normalize_factor([100, 300, 500]).tolist()
        [0.0, 0.5, 1.0]
        >>> normalize_factor([7, 7, 7]).tolist()
        [0.5, 0.5, 0.5]
        >>> normalize_factor([10, 20, 20, 40], 'rank').tolist()
        [0.0, 0.5, 0.5, 1.0]
        >>> normalize_factor([3.0], 'rank').tolist()
        [0.5]
        >>> normalize_factor([0.2, float('nan'), 0.9], 'passthrough').tolist()
        [0.2, nan, 0.9]

    An increasing affine change of units leaves the minmax column unchanged::

        >>> import numpy as np
        >>> raw = np.random.default_rng(8).integers(0, 1000, 50).astype(float)
        >>> bool(np.allclose(normalize_factor(raw), normalize_factor(4.0 * raw + 250.0), rtol=0, atol=1e-12))
        True

    TESTS::

        >>> normalize_factor([0.5, 1.5], 'passthrough')
        Traceback (most recent call last):
        ...
        ValueError: passthrough factor value 1.5 outside [0, 1]
        >>> normalize_factor([1, 2], 'banded')
        Traceback (most recent call last):
        ...
        NotImplementedError: normalization method 'banded' is not available, expected one of minmax, rank, passthrough
    """
    if method not in NORMALIZATIONS:
        raise NotImplementedError("normalization method %r is not available, expected one of %s"
                                  % (method, ", ".join(NORMALIZATIONS)))
    x = np.array(values, dtype=np.float64).reshape(-1)
    known = ~np.isnan(x)
    v = x[known]
    if len(v) == 0:
        return x
    if method == 'passthrough':
        bad = (v < 0.0) | (v > 1.0)
        if bad.any():
            raise ValueError("passthrough factor value %r outside [0, 1]" % float(v[bad][0]))
        return x
    if method == 'minmax':
        lo, hi = v.min(), v.max()
        out = np.full(len(v), 0.5) if lo == hi else (v - lo) / (hi - lo)
    else:
        out = np.full(len(v), 0.5) if len(v) == 1 else (rankdata(v, method='average') - 1.0) / (len(v) - 1.0)
    x[known] = out
    return x

def normalize_table(table, method='minmax', zone_ids=None):
    r"""
    Normalize a raw factor table column by column.

    INPUT:

    - ``table`` -- ``pandas.DataFrame`` indexed by zone id with the six factor
      columns, as returned by :func:`~mcpzones.io.load_factors`

    - ``method`` -- normalization method, see :func:`normalize_factor`

    - ``zone_ids`` -- (optional) restrict to these zones, in this order; zones
      absent from the table get missing values

    OUTPUT:

    A list of ``(zone_id, FactorVector)`` pairs.

    EXAMPLES::

        >>> import pandas as pd
        >>> from mcpzones.prioritize import normalize_table, FACTORS
        >>> T = pd.DataFrame([[100, 1, 0, 0.2, 3, 5], [300, 0, 0, 0.8, 1, 5]],
        ...                  index=['Z-1', 'Z-2'], columns=FACTORS)
        >>> normalize_table(T)[1]
        ('Z-2', FactorVector(customer_impact=1.0, redundancy_loss=0.0, critical_infrastructure=0.5, asset_condition=1.0, restoration_complexity=0.0, outage_risk=0.5))
        >>> [z for z, f in normalize_table(T, zone_ids=['Z-3', 'Z-1'])]
        ['Z-3', 'Z-1']
    """
    if zone_ids is not None:
        table = table.reindex(list(zone_ids))
    columns = [normalize_factor(table[f].to_numpy(dtype=np.float64), method) for f in FACTORS]
    return [(str(zone_id), FactorVector(*(float(c[i]) for c in columns)))
            for i, zone_id in enumerate(table.index)]

#===============================================
# Scoring
#===============================================

def score_zone(f, w=DEFAULT_WEIGHTS):
    r"""
    Composite score `\sum_i w_i f_i` of a zone, in `[0, 100]`.

    INPUT:

    - ``f`` -- :class:`FactorVector` with components in `[0, 1]`

    - ``w`` -- (default: :obj:`DEFAULT_WEIGHTS`) validated :class:`WeightVector`

    EXAMPLES::

        >>> from mcpzones.prioritize import score_zone, FactorVector
        >>> score_zone(FactorVector(1, 1, 1, 1, 1, 1))
        100.0
        >>> score_zone(FactorVector(0, 0, 0, 0, 0, 0))
        0.0
        >>> [score_zone(FactorVector(*(float(i == j) for i in range(6)))) for j in range(6)]
        [30.0, 20.0, 10.0, 20.0, 10.0, 10.0]

    TESTS:

    Linearity and monotonicity on random factor pairs::

        >>> import numpy as np
        >>> rng = np.random.default_rng(6)
        >>> linear = monotone = True
        >>> for f1, f2, a in zip(rng.random((10000, 6)), rng.random((10000, 6)), rng.random(10000)):
        ...     mix = score_zone(a * f1 + (1 - a) * f2)
        ...     linear &= abs(mix - (a * score_zone(f1) + (1 - a) * score_zone(f2))) <= 1e-9
        ...     up = f1.copy(); up[int(a * 6)] = max(f1[int(a * 6)], f2[int(a * 6)])
        ...     monotone &= score_zone(up) >= score_zone(f1)
        >>> bool(linear), bool(monotone)
        (True, True)
    """
    s = math.fsum(float(wi) * float(fi) for wi, fi in zip(w, f))
    return min(100.0, max(0.0, s))

#===============================================
# Ranking
#===============================================

class PriorityRanking(object):
    r"""
    Zones ranked by descending composite score.

    Iterating yields :class:`RankedZone` tuples in rank order.

    EXAMPLES::

        >>> from mcpzones.prioritize import rank_zones, FactorVector
        >>> R = rank_zones([('Z-1', FactorVector(1, 0, 0, 0, 0, 0))]); R
        A PriorityRanking of n = 1 zones
        >>> R[0].rank, R[0].score
        (1, 30.0)
    """
    def __init__(self, entries, weights):
        self._entries = list(entries)
        self._weights = weights

    def __repr__(self):
        return "A PriorityRanking of n = %s zones" % len(self._entries)

    def __len__(self):
        return len(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    def __iter__(self):
        return iter(self._entries)

    def weights(self):
        """
        Get the weights used for scoring.
        """
        return self._weights

    def zone_ids(self):
        """
        Get the zone identifiers in rank order.
        """
        return [e.zone_id for e in self._entries]

def _complete(zone_id, f, impute):
    values, imputed = [], []
    for name, v in zip(FACTORS, f):
        v = math.nan if v is None else float(v)
        if math.isnan(v):
            if impute is None:
                raise FactorError(zone_id, name)
            v = impute
            imputed.append(name)
        elif not 0.0 <= v <= 1.0:
            raise ValueError("factor %s of zone %r is %r, outside [0, 1]" % (name, zone_id, v))
        values.append(v)
    if imputed:
        logger.warning("zone %s: imputed %s with %s", zone_id, ", ".join(imputed), impute)
    return FactorVector(*values), tuple(imputed)

def rank_zones(zone_factors, weights=DEFAULT_WEIGHTS, impute=None):
    r"""
    Rank zones by descending composite score.

    INPUT:

    - ``zone_factors`` -- iterable of ``(zone_id, FactorVector)`` pairs with
      normalized factors

    - ``weights`` -- (default: :obj:`DEFAULT_WEIGHTS`) weights, validated with
      :func:`validate_weights`

    - ``impute`` -- (optional) value in `[0, 1]` substituted for missing
      factors; the substituted factor names are listed in the ``imputed``
      field of the entry. Without it a missing factor raises :class:`FactorError`.

    OUTPUT:

    A :class:`PriorityRanking`. Equal scores are ordered by higher customer
    impact first and then by zone id.

    EXAMPLES::

        >>> from mcpzones.prioritize import rank_zones, FactorVector
        >>> R = rank_zones([('B', FactorVector(0, 0, 0, 0, 0, 0)), ('A', FactorVector(1, 1, 1, 1, 1, 1))])
        >>> [(e.rank, e.zone_id, e.score) for e in R]
        [(1, 'A', 100.0), (2, 'B', 0.0)]

    Equal scores are separated by customer impact::

        >>> R = rank_zones([('X', FactorVector(0, 1, 0, 0.5, 0, 0)), ('Y', FactorVector(1, 0, 0, 0, 0, 0))])
        >>> R.zone_ids(), R[0].score == R[1].score
        (['Y', 'X'], True)

    Scores that differ only by rounding count as equal::

        >>> R = rank_zones([('Z-a', FactorVector(0.71, 0.31, 0.87, 0.16, 0.41, 0.14)),
        ...                 ('Z-b', FactorVector(0.13, 0.53, 0.79, 0.62, 0.09, 0.92))])
        >>> R.zone_ids(), round(R[0].score, 9) == round(R[1].score, 9)
        (['Z-a', 'Z-b'], True)

    Missing factors::

        >>> nan = float('nan')
        >>> rank_zones([('Z-7', FactorVector(1, 1, nan, 1, 1, 1))])
        Traceback (most recent call last):
        ...
        mcpzones.prioritize.FactorError: zone 'Z-7' has no value for factor critical_infrastructure
        >>> entry = rank_zones([('Z-7', FactorVector(1, 1, nan, 1, 1, 1))], impute=0.5)[0]
        >>> entry.score, entry.imputed
        (95.0, ('critical_infrastructure',))

    TESTS:

    The ordering equals an independent sort of independently computed scores::

        >>> import numpy as np
        >>> rng = np.random.default_rng(12)
        >>> zones = [('Z-%03d' % i, FactorVector(*rng.integers(0, 3, 6) / 2)) for i in range(100)]
        >>> W = [30, 20, 10, 20, 10, 10]
        >>> scores = {z: sum(w * v for w, v in zip(W, f)) for z, f in zones}
        >>> expected = sorted(scores, key=lambda z: (-round(scores[z], 9), -dict(zones)[z][0], z))
        >>> R = rank_zones(zones)
        >>> R.zone_ids() == expected, [e.rank for e in R] == list(range(1, 101))
        (True, True)
        >>> rank_zones([('A', FactorVector(1, 1, 1, 1, 1, 1))] * 2)
        Traceback (most recent call last):
        ...
        ValueError: zone 'A' appears more than once
    """
    weights = validate_weights(weights)
    if impute is not None:
        impute = float(impute)
        if not 0.0 <= impute <= 1.0:
            raise ValueError("imputed factor value must lie in [0, 1], got %r" % impute)
    scored, seen = [], set()
    for zone_id, f in zone_factors:
        if zone_id in seen:
            raise ValueError("zone %r appears more than once" % zone_id)
        seen.add(zone_id)
        f, imputed = _complete(zone_id, f, impute)
        scored.append((zone_id, f, score_zone(f, weights), imputed))
    # scores equal up to rounding are ties
    scored.sort(key=lambda e: (-round(e[2], 9), -e[1].customer_impact, e[0]))
    entries = [RankedZone(rank, zone_id, f, score, imputed)
               for rank, (zone_id, f, score, imputed) in enumerate(scored, 1)]
    return PriorityRanking(entries, weights)
