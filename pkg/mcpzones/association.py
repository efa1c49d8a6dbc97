r"""
Infer which wire segments hang on which pole.

The GIS layers carry no explicit pole-to-wire linkage, so attachments are
inferred from proximity: every pole is associated with the `k` wire segments
whose centroids are nearest to it, among those at distance at most `d_{max}`.

Wire ties at equal distance are broken by the rank of the ``wire_id`` in
lexicographic order, so that the result depends only on the data and not on
the order of the records in the source files.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~AssociationParams`      | The `k` and `d_{max}` parameters and the distance mode
    :class:`~Association`            | One inferred pole-to-wire attachment
    :class:`~AssociationTable`       | All attachments, by pole ordinal
    :func:`~associate`               | Infer attachments with a KD-tree over wire centroids
    :func:`~brute_force_associate`   | Exhaustive version of :func:`associate`
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

import logging
import math
from collections import namedtuple

import numpy as np
import shapely
from shapely import STRtree

from mcpzones.geometry import distances_from
from mcpzones.spatial_index import build, radius_query_many
from mcpzones.utils import lexsorted

logger = logging.getLogger(__name__)

DISTANCE_MODES = ('centroid', 'nearest-point')

Association = namedtuple('Association', ['wire_index', 'wire_id', 'circuit_id', 'distance', 'declared'])
Association.__doc__ = """A wire attached to a pole; ``declared`` is set when the link came from the wire's declared pole ids."""

class AssociationParams(namedtuple('AssociationParams', ['k', 'd_max', 'distance', 'trust_declared'])):
    r"""
    Parameters of the proximity association.

    INPUT:

    - ``k`` -- (default: 3) maximum number of wires per pole

    - ``d_max`` -- (default: 50) distance cutoff in meters, inclusive

    - ``distance`` -- (default: ``'centroid'``) ``'centroid'`` measures the
      distance from the pole to the half-arc-length point of the wire,
      ``'nearest-point'`` to the closest point of the wire

    - ``trust_declared`` -- (default: ``False``) add the links given by the
      wires' declared pole ids to the inferred ones

    EXAMPLES::

        >>> from mcpzones.association import AssociationParams
        >>> AssociationParams()
        AssociationParams(k=3, d_max=50.0, distance='centroid', trust_declared=False)
        >>> AssociationParams(k=0)
        Traceback (most recent call last):
        ...
        ValueError: k must be at least 1, got 0
        >>> AssociationParams(d_max=-1)
        Traceback (most recent call last):
        ...
        ValueError: d_max must be a positive finite distance, got -1.0
    """
    __slots__ = ()

    def __new__(cls, k=3, d_max=50.0, distance='centroid', trust_declared=False):
        if int(k) != k or k < 1:
            raise ValueError("k must be at least 1, got %s" % k)
        d_max = float(d_max)
        if not (d_max > 0 and math.isfinite(d_max)):
            raise ValueError("d_max must be a positive finite distance, got %r" % d_max)
        if distance not in DISTANCE_MODES:
            raise NotImplementedError("distance mode %r is not available, expected one of %s"
                                      % (distance, ", ".join(DISTANCE_MODES)))
        return super(AssociationParams, cls).__new__(cls, int(k), d_max, distance, bool(trust_declared))

class AssociationTable(object):
    r"""
    The wires associated with every pole, indexed by pole ordinal.

    Each entry is a list of :class:`Association` sorted by distance and then
    by wire id; poles without any wire have an empty list.

    EXAMPLES::

        >>> from mcpzones.territory import PoleSet, WireSet
        >>> from mcpzones.association import associate
        >>> P = PoleSet(['P1', 'P2'], [(0, 0), (500, 0)])
        >>> W = WireSet(['W1'], ['A'], [[(5, -5), (5, 5)]])
        >>> T = associate(P, W); T
        An AssociationTable of n = 2 poles with 1 associations
        >>> T[0]
        [Association(wire_index=0, wire_id='W1', circuit_id='A', distance=5.0, declared=False)]
        >>> T[1]
        []
    """
    def __init__(self, rows, params):
        self._rows = [list(r) for r in rows]
        self._params = params

    def __repr__(self):
        return "An AssociationTable of n = %s poles with %s associations" % (len(self._rows), self.size())

    def __len__(self):
        return len(self._rows)

    def __getitem__(self, i):
        return self._rows[i]

    def __iter__(self):
        return iter(self._rows)

    def __eq__(self, other):
        return isinstance(other, AssociationTable) and self._rows == other._rows

    def params(self):
        """
        Get the parameters the table was computed with.
        """
        return self._params

    def size(self):
        """
        Get the total number of associations.
        """
        return sum(len(r) for r in self._rows)

#===============================================
# Helpers
#===============================================

def _id_order(wire_ids):
    """
    Return ``order`` with ``order[rank] = ordinal`` and its inverse ``rank``.
    """
    order = np.array(sorted(range(len(wire_ids)), key=wire_ids.__getitem__), dtype=np.intp)
    rank = np.empty(len(order), dtype=np.intp)
    rank[order] = np.arange(len(order))
    return order, rank

def _check_inputs(poles, wires):
    if len(poles) == 0:
        raise ValueError("cannot associate an empty pole set")
    if len(wires) == 0:
        raise ValueError("cannot associate an empty wire set")

def _nearest_point_distances(coords, pole_index, geoms):
    if len(pole_index) == 0:
        return np.zeros(0)
    return shapely.distance(shapely.points(coords[pole_index]), geoms).astype(np.float64)

def _select(ranks, dist, params):
    """
    Filter by the cutoff, sort by ``(distance, rank)`` and keep the first `k`.
    """
    keep = dist <= params.d_max
    ranks, dist = ranks[keep], dist[keep]
    s = lexsorted(dist, ranks)[:params.k]
    return ranks[s], dist[s]

def _materialize(selected, order, wires):
    ids, circuits = wires.ids(), wires.circuit_ids()
    rows = []
    for ranks, dist in selected:
        row = []
        for t, d in zip(ranks, dist):
            w = int(order[t])
            row.append(Association(w, ids[w], circuits[w], float(d), False))
        rows.append(row)
    return rows

def _add_declared(rows, poles, wires, rank, params):
    """
    Union the declared links into ``rows``; they are exempt from `k` and `d_{max}`.
    """
    coords, centroids, geoms = poles.coords(), wires.centroids(), wires.geometries()
    ids, circuits = wires.ids(), wires.circuit_ids()
    added = unknown = 0
    touched = set()
    for w in range(len(wires)):
        for pole_id in wires.declared_pole_ids(w):
            try:
                i = poles.ordinal(pole_id)
            except KeyError:
                unknown += 1
                continue
            if any(a.wire_index == w for a in rows[i]):
                continue
            if params.distance == 'centroid':
                d = float(distances_from(centroids[w], coords[i:i + 1])[0])
            else:
                d = float(_nearest_point_distances(coords, np.array([i]), geoms[w:w + 1])[0])
            rows[i].append(Association(w, ids[w], circuits[w], d, True))
            touched.add(i)
            added += 1
    for i in touched:
        rows[i].sort(key=lambda a: (a.distance, rank[a.wire_index]))
    if unknown:
        logger.warning("%s declared pole ids do not match any pole", unknown)
    logger.info("added %s declared pole-to-wire links", added)

#===============================================
# Association
#===============================================

def associate(poles, wires, params=None, workers=1):
    r"""
    Associate every pole with its nearest wire segments.

    INPUT:

    - ``poles`` -- non-empty :class:`~mcpzones.territory.PoleSet`

    - ``wires`` -- non-empty :class:`~mcpzones.territory.WireSet`

    - ``params`` -- (default: ``AssociationParams()``) an :class:`AssociationParams`

    - ``workers`` -- (default: 1) threads used for the batched KD-tree
      queries of the centroid mode; the result does not depend on it

    OUTPUT:

    An :class:`AssociationTable`. Every pole gets the at most `k` wires at
    distance at most `d_{max}`, nearest first. With ``trust_declared`` the
    declared links are added as well, regardless of `k` and `d_{max}`.

    EXAMPLES:

    Only the wires inside the cutoff are kept::

        >>> from mcpzones.territory import PoleSet, WireSet
        >>> from mcpzones.association import associate, AssociationParams
        >>> def wires_at(*xs):
        ...     return WireSet(['W%d' % i for i in range(len(xs))], ['CKT-%d' % i for i in range(len(xs))],
        ...                    [[(x, -5), (x, 5)] for x in xs])
        >>> P = PoleSet(['P1'], [(0, 0)])
        >>> [(a.circuit_id, a.distance) for a in associate(P, wires_at(10, 20, 60))[0]]
        [('CKT-0', 10.0), ('CKT-1', 20.0)]

    The cutoff is inclusive; four wires qualify and the three nearest are kept::

        >>> W = wires_at(10, 20, 49.999, 50.0, 50.001)
        >>> [a.distance for a in associate(P, W, AssociationParams(k=10))[0]]
        [10.0, 20.0, 49.999, 50.0]
        >>> [a.distance for a in associate(P, W)[0]]
        [10.0, 20.0, 49.999]

    Ties at equal distance go to the smaller wire id, whatever the record order::

        >>> W = WireSet(['W-b', 'W-c', 'W-a'], ['B', 'C', 'A'], [[(-5, -5), (-5, 5)], [(5, -5), (5, 5)], [(-5, -5), (5, -5)]])
        >>> [a.wire_id for a in associate(P, W, AssociationParams(k=2))[0]]
        ['W-a', 'W-b']

    A long wire passing close to the pole has a far centroid; the
    ``'nearest-point'`` mode measures to the closest point instead::

        >>> W = WireSet(['W1'], ['A'], [[(8, 0), (8, 400)]])
        >>> associate(P, W)[0]
        []
        >>> associate(P, W, AssociationParams(distance='nearest-point'))[0]
        [Association(wire_index=0, wire_id='W1', circuit_id='A', distance=8.0, declared=False)]

    Declared links are only used on request::

        >>> W = WireSet(['W1', 'W2'], ['A', 'B'], [[(5, -5), (5, 5)], [(300, 0), (400, 0)]], declared_pole_ids=[(), ('P1',)])
        >>> [a.wire_id for a in associate(P, W)[0]]
        ['W1']
        >>> [(a.wire_id, a.declared) for a in associate(P, W, AssociationParams(trust_declared=True))[0]]
        [('W1', False), ('W2', True)]

    TESTS:

    Equivalence with the exhaustive search, in both distance modes::

        >>> import numpy as np
        >>> from mcpzones.association import brute_force_associate
        >>> rng = np.random.default_rng(3)
        >>> mismatches = 0
        >>> for trial in range(12):
        ...     n, m = int(rng.integers(1, 400)), int(rng.integers(1, 500))
        ...     P = PoleSet(['P%d' % i for i in range(n)], rng.uniform(0, 1000, (n, 2)).round(0))
        ...     start = rng.uniform(0, 1000, (m, 2)).round(0)
        ...     step = rng.integers(-40, 41, (m, 2)) * 2 + 1
        ...     W = WireSet(['W%04d' % j for j in rng.permutation(m)], ['C%d' % c for c in rng.integers(0, 9, m)],
        ...                 [[tuple(a), tuple(a + s)] for a, s in zip(start, step)])
        ...     for params in (AssociationParams(k=int(rng.integers(1, 5)), d_max=float(rng.integers(10, 80))),
        ...                    AssociationParams(k=2, d_max=30, distance='nearest-point')):
        ...         mismatches += associate(P, W, params, workers=2) != brute_force_associate(P, W, params)
        >>> mismatches
        0

    A conductor crossing the whole territory among short spans::

        >>> n = 1500
        >>> Q = PoleSet(['P%d' % i for i in range(n)], rng.uniform(0, 20000, (n, 2)).round(0))
        >>> start = rng.uniform(0, 20000, (n, 2)).round(0)
        >>> L = WireSet(['W%04d' % j for j in range(n + 1)], ['C%d' % (j % 5) for j in range(n + 1)],
        ...             [[tuple(a), tuple(a + (40, 0))] for a in start] + [[(0, 10000), (20000, 10000)]])
        >>> params = AssociationParams(k=10, distance='nearest-point')
        >>> T = associate(Q, L, params)
        >>> T == brute_force_associate(Q, L, params)
        True
        >>> near = [i for i in range(n) if abs(Q.coords()[i][1] - 10000) <= 50]
        >>> len(near) > 0, all(any(a.wire_id == 'W%04d' % n for a in T[i]) for i in near)
        (True, True)

    Enlarging `k` or `d_{max}` never removes an association::

        >>> def links(T):
        ...     return {(i, a.wire_id) for i, row in enumerate(T) for a in row}
        >>> links(associate(P, W, AssociationParams(k=2, d_max=30))) <= links(associate(P, W, AssociationParams(k=3, d_max=30)))
        True
        >>> links(associate(P, W, AssociationParams(k=2, d_max=30))) <= links(associate(P, W, AssociationParams(k=2, d_max=45)))
        True

    The result does not depend on the order of the wire records::

        >>> perm = rng.permutation(len(W))
        >>> V = WireSet([W.ids()[j] for j in perm], [W.circuit_ids()[j] for j in perm], W.geometries()[perm])
        >>> links(associate(P, V)) == links(associate(P, W))
        True
    """
    params = AssociationParams() if params is None else params
    _check_inputs(poles, wires)
    logger.info("associating %s poles to %s wire segments (k = %s, d_max = %s m, %s distance)...",
                len(poles), len(wires), params.k, params.d_max, params.distance)
    order, rank = _id_order(wires.ids())
    coords = poles.coords()

    if params.distance == 'centroid':
        tree = build(wires.centroids()[order])
        selected = [_select(idx, dist, params)
                    for idx, dist in radius_query_many(tree, coords, params.d_max, workers=workers)]
    else:
        # candidate wires lie within the cutoff of the pole, whatever their length
        geoms = wires.geometries()
        reach = params.d_max * (1.0 + 1e-9) + 1e-9
        strtree = STRtree(geoms[order])
        pole_index, flat = strtree.query(shapely.points(coords), predicate='dwithin', distance=reach)
        s = np.lexsort((flat, pole_index))
        pole_index, flat = pole_index[s].astype(np.intp), flat[s].astype(np.intp)
        dist = _nearest_point_distances(coords, pole_index, geoms[order[flat]])
        bounds = np.concatenate([[0], np.cumsum(np.bincount(pole_index, minlength=len(poles)))])
        selected = [_select(flat[a:b], dist[a:b], params) for a, b in zip(bounds[:-1], bounds[1:])]

    rows = _materialize(selected, order, wires)
    if params.trust_declared:
        _add_declared(rows, poles, wires, rank, params)
    table = AssociationTable(rows, params)
    logger.info("done: %s associations, %s poles without a wire",
                table.size(), sum(1 for r in rows if not r))
    return table

def brute_force_associate(poles, wires, params=None):
    r"""
    Exhaustive version of :func:`associate`: all pole-wire distances are
    computed, filtered, sorted and truncated.

    EXAMPLES::

        >>> from mcpzones.territory import PoleSet, WireSet
        >>> from mcpzones.association import associate, brute_force_associate
        >>> P = PoleSet(['P1', 'P2'], [(0, 0), (40, 0)])
        >>> W = WireSet(['W1', 'W2'], ['A', 'B'], [[(5, -5), (5, 5)], [(20, -5), (20, 5)]])
        >>> brute_force_associate(P, W) == associate(P, W)
        True
        >>> [[a.wire_id for a in row] for row in brute_force_associate(P, W)]
        [['W1', 'W2'], ['W2', 'W1']]
    """
    params = AssociationParams() if params is None else params
    _check_inputs(poles, wires)
    order, rank = _id_order(wires.ids())
    coords = poles.coords()
    ranks = np.arange(len(wires))
    if params.distance == 'centroid':
        centroids = wires.centroids()[order]
        selected = [_select(ranks, distances_from(p, centroids), params) for p in coords]
    else:
        geoms = wires.geometries()[order]
        selected = [_select(ranks, shapely.distance(shapely.Point(p), geoms).astype(np.float64), params)
                    for p in coords]
    rows = _materialize(selected, order, wires)
    if params.trust_declared:
        _add_declared(rows, poles, wires, rank, params)
    return AssociationTable(rows, params)
