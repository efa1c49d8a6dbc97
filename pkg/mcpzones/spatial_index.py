r"""
Exact nearest-neighbor and fixed-radius search in the plane.

The :class:`KdTree` wraps a balanced, median-split ``scipy.spatial.KDTree``
(leaf bucket size 16) and post-processes every answer so that results are
exact and reproducible:

- distances are recomputed with :func:`~mcpzones.geometry.distances_from`, so
  they equal :func:`~mcpzones.geometry.euclidean_distance` bit for bit;

- range checks are closed (``distance <= r``);

- results are sorted by ``(distance, point_index)``.

The linear-scan functions implement the same contracts by exhaustive search
and serve as verification oracles.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~build`                | Build a KdTree over a list of planar points
    :func:`~knn`                  | The `k` nearest points within a maximum distance
    :func:`~radius_query`         | All points within a radius
    :func:`~radius_query_many`    | Batched :func:`radius_query` over many query points
    :func:`~pairs_within`         | All index pairs at distance at most `r`
    :func:`~linear_scan_knn`      | Exhaustive :func:`knn`
    :func:`~linear_scan_radius`   | Exhaustive :func:`radius_query`
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

from collections import namedtuple

import numpy as np
from scipy.spatial import KDTree

from mcpzones.geometry import distances_from
from mcpzones.utils import lexsorted

DEFAULT_LEAFSIZE = 16

# relative slack on the radius handed to scipy; answers are re-filtered exactly
_SLACK = 1e-9

Neighbor = namedtuple('Neighbor', ['point_index', 'distance'])
Neighbor.__doc__ = """An indexed point and its distance in meters to the query."""

#===============================================
# The tree
#===============================================

def _as_coords(points):
    coords = np.array([tuple(p) for p in points] if not isinstance(points, np.ndarray) else points,
                      dtype=np.float64)
    return coords.reshape(-1, 2)

def _loose(r):
    return r + (abs(r) + 1.0) * _SLACK

class KdTree(object):
    r"""
    Immutable 2-D KD-tree over a fixed point collection.

    INPUT:

    - ``points`` -- non-empty sequence of `(x, y)` pairs or an `(n, 2)` array

    - ``leafsize`` -- (default: 16) leaf bucket size; does not affect results

    EXAMPLES::

        >>> from mcpzones.spatial_index import KdTree
        >>> T = KdTree([(0, 0), (1, 1), (2, 2)]); T
        A KdTree over n = 3 points (leaf size 16)
        >>> T.size()
        3

    TESTS::

        >>> KdTree([])
        Traceback (most recent call last):
        ...
        ValueError: cannot index an empty point set
        >>> KdTree([(0, float('inf'))])
        Traceback (most recent call last):
        ...
        ValueError: indexed points must have finite coordinates
    """
    def __init__(self, points, leafsize=DEFAULT_LEAFSIZE):
        coords = _as_coords(points)
        if len(coords) == 0:
            raise ValueError("cannot index an empty point set")
        if not np.all(np.isfinite(coords)):
            raise ValueError("indexed points must have finite coordinates")
        if leafsize < 1:
            raise ValueError("leaf size must be at least 1, got %s" % leafsize)
        coords.setflags(write=False)
        self._points = coords
        self._leafsize = int(leafsize)
        self._tree = KDTree(coords, leafsize=self._leafsize, compact_nodes=True,
                            copy_data=True, balanced_tree=True)

    def __repr__(self):
        return "A KdTree over n = %s points (leaf size %s)" % (len(self._points), self._leafsize)

    def __len__(self):
        return len(self._points)

    def size(self):
        """
        Get the number of indexed points.
        """
        return len(self._points)

    def points(self):
        """
        Get the indexed points as a read-only `(n, 2)` array.
        """
        return self._points

    def leafsize(self):
        """
        Get the leaf bucket size.
        """
        return self._leafsize

    def _exact(self, query, candidates, r):
        idx = np.asarray(candidates, dtype=np.intp)
        dist = distances_from(query, self._points[idx])
        keep = dist <= r
        idx, dist = idx[keep], dist[keep]
        order = lexsorted(dist, idx)
        return idx[order], dist[order]

def build(points, leafsize=DEFAULT_LEAFSIZE):
    r"""
    Build a :class:`KdTree` over ``points``.

    The ordinal of each point is its position in ``points``; duplicated
    coordinates are all kept.

    EXAMPLES::

        >>> from mcpzones.spatial_index import build, knn
        >>> build([(5, 5)])
        A KdTree over n = 1 points (leaf size 16)

    Collinear points still partition exhaustively::

        >>> T = build([(0, 0), (0, 1), (0, 2), (0, 3)])
        >>> [n.point_index for n in knn(T, (0, 1.2), k=4, max_dist=10)]
        [1, 2, 0, 3]
    """
    return KdTree(points, leafsize=leafsize)

def _as_query(query):
    q = np.asarray(query, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(q)):
        raise ValueError("query point must have finite coordinates")
    return q

def _neighbors(idx, dist):
    return [Neighbor(int(i), float(d)) for i, d in zip(idx, dist)]

#===============================================
# Queries
#===============================================

def knn(tree, query, k, max_dist=np.inf):
    r"""
    The up-to-`k` nearest indexed points at distance at most ``max_dist``.

    INPUT:

    - ``tree`` -- a :class:`KdTree`

    - ``query`` -- `(x, y)` pair

    - ``k`` -- integer, at least 1

    - ``max_dist`` -- (default: infinity) positive distance cutoff, inclusive

    OUTPUT:

    A list of :class:`Neighbor`, sorted by ``(distance, point_index)``.

    EXAMPLES::

        >>> from mcpzones.spatial_index import build, knn
        >>> T = build([(10, 0), (0, 20), (-60, 0), (0, 0)])
        >>> knn(T, (0, 0), k=1)
        [Neighbor(point_index=3, distance=0.0)]
        >>> knn(T, (0, 0), k=3, max_dist=50)
        [Neighbor(point_index=3, distance=0.0), Neighbor(point_index=0, distance=10.0), Neighbor(point_index=1, distance=20.0)]
        >>> knn(build([(10, 0), (20, 0), (60, 0)]), (0, 0), k=3, max_dist=50)
        [Neighbor(point_index=0, distance=10.0), Neighbor(point_index=1, distance=20.0)]

    TESTS:

    Equivalence with the linear scan, including duplicated and collinear
    points, element for element::

        >>> import numpy as np
        >>> from mcpzones.spatial_index import linear_scan_knn
        >>> rng = np.random.default_rng(2024)
        >>> mismatches = 0
        >>> for trial in range(30):
        ...     n = int(rng.integers(1, 3000))
        ...     pts = rng.uniform(0, 1000, size=(n, 2)).round(0)
        ...     if trial % 5 == 0:
        ...         pts[:, 1] = 7.0
        ...     T = build(pts)
        ...     for q in rng.uniform(-50, 1050, size=(30, 2)).round(1):
        ...         k, r = int(rng.integers(1, 9)), float(rng.uniform(1, 150))
        ...         mismatches += knn(T, q, k, r) != linear_scan_knn(pts, q, k, r)
        ...         mismatches += knn(T, q, k) != linear_scan_knn(pts, q, k)
        >>> mismatches
        0
        >>> knn(T, (0, 0), k=0)
        Traceback (most recent call last):
        ...
        ValueError: k must be at least 1, got 0
    """
    if k < 1:
        raise ValueError("k must be at least 1, got %s" % k)
    if not max_dist > 0:
        raise ValueError("max_dist must be positive, got %s" % max_dist)
    q = _as_query(query)
    n = tree.size()
    kk = min(int(k), n)
    dist, _ = tree._tree.query(q, k=kk, distance_upper_bound=_loose(max_dist))
    dist = np.atleast_1d(dist)
    found = dist[np.isfinite(dist)]
    if len(found) < kk:
        # fewer than k points inside the cutoff: they are all candidates
        radius = max_dist
    else:
        # every point tied with the k-th one must be seen to break ties by index
        radius = min(max_dist, float(found.max()))
    if np.isfinite(radius):
        candidates = tree._tree.query_ball_point(q, _loose(radius))
    else:
        candidates = np.arange(n)
    idx, dist = tree._exact(q, candidates, max_dist)
    return _neighbors(idx[:k], dist[:k])

def radius_query(tree, query, r):
    r"""
    All indexed points at distance at most ``r`` from ``query``.

    The range is closed: a point exactly at distance ``r`` is included.

    EXAMPLES::

        >>> from mcpzones.spatial_index import build, radius_query
        >>> T = build([(0, 0), (3, 4), (6, 8), (0, 0.5)])
        >>> radius_query(T, (0, 0), 5)
        [Neighbor(point_index=0, distance=0.0), Neighbor(point_index=3, distance=0.5), Neighbor(point_index=1, distance=5.0)]
        >>> radius_query(T, (6, 8), 0.1)
        [Neighbor(point_index=2, distance=0.0)]

    TESTS::

        >>> import numpy as np
        >>> from mcpzones.spatial_index import linear_scan_radius
        >>> rng = np.random.default_rng(99)
        >>> mismatches = 0
        >>> for trial in range(30):
        ...     pts = rng.uniform(0, 500, size=(int(rng.integers(1, 4000)), 2)).round(0)
        ...     T = build(pts)
        ...     for q in pts[rng.integers(0, len(pts), size=20)]:
        ...         r = float(rng.integers(1, 60))
        ...         mismatches += radius_query(T, q, r) != linear_scan_radius(pts, q, r)
        >>> mismatches
        0
        >>> radius_query(T, (0, 0), 0)
        Traceback (most recent call last):
        ...
        ValueError: radius must be positive, got 0
    """
    if not r > 0:
        raise ValueError("radius must be positive, got %s" % r)
    q = _as_query(query)
    idx, dist = tree._exact(q, tree._tree.query_ball_point(q, _loose(r)), r)
    return _neighbors(idx, dist)

def radius_query_many(tree, queries, r, workers=1):
    r"""
    Batched :func:`radius_query`.

    INPUT:

    - ``tree`` -- a :class:`KdTree`

    - ``queries`` -- `(m, 2)` array of query points

    - ``r`` -- positive radius, inclusive

    - ``workers`` -- (default: 1) number of threads scipy may use; ``-1`` uses
      all processors. Results do not depend on it.

    OUTPUT:

    A list with one ``(indices, distances)`` pair of arrays per query, sorted
    by ``(distance, point_index)``.

    EXAMPLES::

        >>> from mcpzones.spatial_index import build, radius_query_many
        >>> T = build([(0, 0), (1, 0), (5, 0)])
        >>> [(i.tolist(), d.tolist()) for i, d in radius_query_many(T, [(0, 0), (5, 0)], 1)]
        [([0, 1], [0.0, 1.0]), ([2], [0.0])]
    """
    if not r > 0:
        raise ValueError("radius must be positive, got %s" % r)
    queries = np.asarray(queries, dtype=np.float64).reshape(-1, 2)
    if len(queries) == 0:
        return []
    candidates = tree._tree.query_ball_point(queries, _loose(r), workers=workers)
    return [tree._exact(q, c, r) for q, c in zip(queries, candidates)]

def pairs_within(tree, r):
    r"""
    All index pairs `(i, j)`, `i < j`, of indexed points at distance at most ``r``.

    OUTPUT:

    Arrays ``(i, j, distance)`` sorted by ``(i, j)``.

    EXAMPLES::

        >>> from mcpzones.spatial_index import build, pairs_within
        >>> i, j, d = pairs_within(build([(0, 0), (3, 4), (100, 0)]), 5)
        >>> i.tolist(), j.tolist(), d.tolist()
        ([0], [1], [5.0])
    """
    if not r > 0:
        raise ValueError("radius must be positive, got %s" % r)
    pairs = tree._tree.query_pairs(_loose(r), output_type='ndarray')
    pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
    P = tree.points()
    d = P[pairs[:, 0]] - P[pairs[:, 1]]
    dist = np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1])
    keep = dist <= r
    pairs, dist = pairs[keep], dist[keep]
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order, 0], pairs[order, 1], dist[order]

#===============================================
# Linear-scan oracles
#===============================================

def linear_scan_knn(points, query, k, max_dist=np.inf):
    r"""
    Exhaustive-search version of :func:`knn`.

    EXAMPLES::

        >>> from mcpzones.spatial_index import linear_scan_knn
        >>> linear_scan_knn([], (0, 0), 3)
        []
        >>> linear_scan_knn([(1, 1), (0, 0), (1, 1)], (1, 1), 2)
        [Neighbor(point_index=0, distance=0.0), Neighbor(point_index=2, distance=0.0)]
    """
    if k < 1:
        raise ValueError("k must be at least 1, got %s" % k)
    return linear_scan_radius(points, query, max_dist)[:k]

def linear_scan_radius(points, query, r):
    r"""
    Exhaustive-search version of :func:`radius_query`.

    EXAMPLES::

        >>> from mcpzones.spatial_index import linear_scan_radius
        >>> linear_scan_radius([(2, 0), (0, 0), (2, 0)], (1, 0), 1)
        [Neighbor(point_index=0, distance=1.0), Neighbor(point_index=1, distance=1.0), Neighbor(point_index=2, distance=1.0)]
    """
    coords = _as_coords(points)
    if len(coords) == 0:
        return []
    q = _as_query(query)
    dist = distances_from(q, coords)
    idx = np.flatnonzero(dist <= r)
    order = lexsorted(dist[idx], idx)
    return _neighbors(idx[order], dist[idx][order])
