r"""
Clustering of multi-circuit poles into risk zones.

Within each circuit configuration, poles are joined into one zone when a chain
of hops of length at most `r` connects them. Clusters are grown by a
breadth-first flood fill over a KD-tree of the group, seeded at the
lowest-ordinal pole not yet visited; each dequeued pole is queried for its
neighbors within `r`, which are enqueued by distance and then by ordinal.

The spatial extent of a zone is the total length of the Euclidean minimum
spanning tree over its poles. On a pole line this is the length of the line.

Clustering
~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~ZoningParams`      | Radius, emission filters and extent mode
    :class:`~RiskZone`          | A materialized risk zone
    :func:`~cluster_group`      | Flood-fill clustering of one configuration group
    :func:`~build_zones`        | Cluster every group and materialize the zones

Extent and statistics
~~~~~~~~~~~~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~zone_extent`              | Minimum spanning tree length of a set of locations
    :func:`~exhaustive_mst_length`    | Quadratic-time minimum spanning tree length
    :func:`~discovery_order_extent`   | Sum of consecutive distances in the given order
    :func:`~length_histogram`         | Zone count per extent bin in miles
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
from collections import deque, namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from mcpzones.geometry import Point2D, convex_hull, distances_from
from mcpzones.spatial_index import build, pairs_within, radius_query_many
from mcpzones.utils import METERS_PER_MILE, meters_to_miles, stable_digest

logger = logging.getLogger(__name__)

EXTENT_MODES = ('mst', 'discovery-order')

class ZoningParams(namedtuple('ZoningParams', ['radius', 'min_extent', 'min_poles', 'extent'])):
    r"""
    Parameters of the zone clustering.

    INPUT:

    - ``radius`` -- (default: 200) maximum hop between adjacent poles of a
      zone, in meters, inclusive

    - ``min_extent`` -- (default: 200) zones shorter than this many meters are
      not emitted; 0 disables the filter

    - ``min_poles`` -- (default: 2) zones with fewer poles are not emitted

    - ``extent`` -- (default: ``'mst'``) ``'mst'`` or ``'discovery-order'``,
      see :func:`zone_extent` and :func:`discovery_order_extent`

    EXAMPLES::

        >>> from mcpzones.zoning import ZoningParams
        >>> ZoningParams()
        ZoningParams(radius=200.0, min_extent=200.0, min_poles=2, extent='mst')
        >>> ZoningParams(radius=0)
        Traceback (most recent call last):
        ...
        ValueError: radius must be a positive finite distance, got 0.0
    """
    __slots__ = ()

    def __new__(cls, radius=200.0, min_extent=200.0, min_poles=2, extent='mst'):
        radius, min_extent = float(radius), float(min_extent)
        if not (radius > 0 and math.isfinite(radius)):
            raise ValueError("radius must be a positive finite distance, got %r" % radius)
        if not min_extent >= 0:
            raise ValueError("min_extent must be non-negative, got %r" % min_extent)
        if int(min_poles) != min_poles or min_poles < 1:
            raise ValueError("min_poles must be at least 1, got %s" % min_poles)
        if extent not in EXTENT_MODES:
            raise NotImplementedError("extent mode %r is not available, expected one of %s"
                                      % (extent, ", ".join(EXTENT_MODES)))
        return super(ZoningParams, cls).__new__(cls, radius, min_extent, int(min_poles), extent)

class RiskZone(namedtuple('RiskZone', ['zone_id', 'circuits', 'members', 'pole_ids', 'extent_m',
                                       'hull', 'bbox', 'centroid'])):
    r"""
    A risk zone.

    Fields:

    - ``zone_id`` -- ``'Z-'`` followed by a digest of the circuits and the
      sorted member pole ids

    - ``circuits`` -- the :class:`~mcpzones.detection.CircuitSet` of the group

    - ``members`` -- member pole ordinals, in discovery order

    - ``pole_ids`` -- member pole ids, sorted

    - ``extent_m`` -- spatial extent in meters

    - ``hull`` -- convex hull as a closed :class:`~mcpzones.geometry.Polyline`

    - ``bbox`` -- lower-left and upper-right corners

    - ``centroid`` -- mean member location
    """
    __slots__ = ()

    def __repr__(self):
        return "A RiskZone %s on %s with n = %s poles, extent %.1f m" % (
            self.zone_id, self.circuits.label(), self.pole_count, self.extent_m)

    @property
    def pole_count(self):
        return len(self.members)

    @property
    def extent_mi(self):
        return meters_to_miles(self.extent_m)

HistogramBin = namedtuple('HistogramBin', ['lo_mi', 'hi_mi', 'count'])
HistogramBin.__doc__ = """Number of zones with extent in ``[lo_mi, hi_mi)`` miles."""

#===============================================
# Clustering
#===============================================

def _sorted_members(group):
    if not group.members:
        raise ValueError("cannot cluster an empty group")
    return sorted(group.members, key=lambda m: m.pole_index)

def _flood_fill(locations, radius, workers=1):
    """
    Clusters as lists of positions in ``locations``, in discovery order.
    """
    tree = build(locations)
    neighbors = radius_query_many(tree, locations, radius, workers=workers)
    visited = np.zeros(len(locations), dtype=bool)
    clusters = []
    for seed in range(len(locations)):
        if visited[seed]:
            continue
        visited[seed] = True
        queue = deque([seed])
        cluster = []
        while queue:
            q = queue.popleft()
            cluster.append(q)
            for j in neighbors[q][0]:
                if not visited[j]:
                    visited[j] = True
                    queue.append(int(j))
        clusters.append(cluster)
    return clusters

def cluster_group(group, params=None):
    r"""
    Partition a configuration group into clusters of poles connected by hops
    of length at most `r`.

    INPUT:

    - ``group`` -- non-empty :class:`~mcpzones.detection.McpGroup`

    - ``params`` -- (default: ``ZoningParams()``) a :class:`ZoningParams`

    OUTPUT:

    A list of clusters, each a list of pole ordinals in discovery order.
    Clusters are listed by their lowest pole ordinal.

    EXAMPLES::

        >>> from mcpzones.detection import CircuitSet, McpGroup, McpPole
        >>> from mcpzones.geometry import Point2D
        >>> from mcpzones.zoning import cluster_group
        >>> def group(points, circuits='AB'):
        ...     key = CircuitSet(circuits)
        ...     return McpGroup(key, [McpPole(i, 'P%d' % i, Point2D(*p), key) for i, p in enumerate(points)])
        >>> cluster_group(group([(0, 0), (150, 0)]))
        [[0, 1]]
        >>> cluster_group(group([(0, 0), (250, 0)]))
        [[0], [1]]
        >>> cluster_group(group([(900, 0), (180, 0), (0, 0), (360, 0)]))
        [[0], [1, 2, 3]]

    Neighbors are discovered nearest first::

        >>> cluster_group(group([(0, 0), (190, 0), (-50, 0), (100, 0)]))
        [[0, 2, 3, 1]]

    TESTS:

    Equivalence with the connected components of the graph of all pairs at
    distance at most `r`::

        >>> import numpy as np
        >>> from scipy.sparse import csr_matrix
        >>> from scipy.sparse.csgraph import connected_components
        >>> from scipy.spatial.distance import pdist, squareform
        >>> from mcpzones.zoning import ZoningParams
        >>> def oracle(points, r):
        ...     D = squareform(pdist(points))
        ...     _, labels = connected_components(csr_matrix((D <= r).astype(float)), directed=False)
        ...     return {frozenset(np.flatnonzero(labels == c).tolist()) for c in set(labels)}
        >>> rng = np.random.default_rng(4)
        >>> mismatches = 0
        >>> for trial in range(40):
        ...     n = int(rng.integers(1, 700))
        ...     pts = rng.uniform(0, 5000, (n, 2)).round(0)
        ...     r = float(rng.integers(20, 400))
        ...     got = cluster_group(group(pts), ZoningParams(radius=r))
        ...     mismatches += {frozenset(c) for c in got} != oracle(pts, r)
        ...     mismatches += sorted(i for c in got for i in c) != list(range(n))
        >>> mismatches
        0

    Membership does not depend on the order of the members::

        >>> perm = rng.permutation(len(pts))
        >>> shuffled = McpGroup(CircuitSet('AB'), [group(pts).members[i] for i in perm])
        >>> {frozenset(c) for c in cluster_group(shuffled, ZoningParams(radius=r))} == {frozenset(c) for c in got}
        True
    """
    params = ZoningParams() if params is None else params
    members = _sorted_members(group)
    locations = np.array([tuple(m.location) for m in members], dtype=np.float64)
    return [[members[p].pole_index for p in c] for c in _flood_fill(locations, params.radius)]

#===============================================
# Extent
#===============================================

def _unique_locations(locations):
    pts = np.array([tuple(p) for p in locations] if not isinstance(locations, np.ndarray) else locations,
                   dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("the extent of an empty cluster is undefined")
    return np.unique(pts, axis=0)

def zone_extent(locations, radius=None):
    r"""
    Total edge length of the Euclidean minimum spanning tree over ``locations``.

    INPUT:

    - ``locations`` -- non-empty sequence of `(x, y)` pairs; repeated
      locations count once

    - ``radius`` -- (optional) when every pair of adjacent locations is
      within this distance, as in a cluster built with that radius, the tree is
      computed on the sparse graph of such pairs

    EXAMPLES::

        >>> from mcpzones.zoning import zone_extent
        >>> zone_extent([(0, 0), (100, 0), (200, 0)])
        200.0
        >>> zone_extent([(5, 5)])
        0.0
        >>> zone_extent([(0, 0), (0, 0)])
        0.0
        >>> zone_extent([(0, 0), (3, 4), (3, 0), (0, 4)])
        10.0

    TESTS:

    Agreement with the quadratic oracle, with and without a radius::

        >>> import numpy as np
        >>> from mcpzones.zoning import exhaustive_mst_length, discovery_order_extent
        >>> rng = np.random.default_rng(12)
        >>> pts = rng.uniform(0, 1000, (12, 2))
        >>> abs(zone_extent(pts) - exhaustive_mst_length(pts)) <= 1e-6 * exhaustive_mst_length(pts)
        True
        >>> worst = 0.0
        >>> for trial in range(300):
        ...     pts = np.cumsum(rng.uniform(-150, 150, (int(rng.integers(2, 120)), 2)), axis=0)
        ...     exact = exhaustive_mst_length(pts)
        ...     worst = max(worst, abs(zone_extent(pts) - exact) / exact, abs(zone_extent(pts, radius=250) - exact) / exact)
        >>> worst <= 1e-6
        True

    The tree is never longer than a path through the same points, and equal to
    it on an evenly spaced line::

        >>> all(zone_extent(p) <= discovery_order_extent(p) + 1e-9
        ...     for p in (rng.uniform(0, 100, (20, 2)) for _ in range(50)))
        True
        >>> line = [(0, 75.0 * i) for i in range(41)]
        >>> zone_extent(line), zone_extent(line, radius=200), discovery_order_extent(line)
        (3000.0, 3000.0, 3000.0)
    """
    pts = _unique_locations(locations)
    n = len(pts)
    if n == 1:
        return 0.0
    if radius is not None:
        i, j, d = pairs_within(build(pts), radius)
        graph = csr_matrix((d, (i, j)), shape=(n, n))
        if len(d) >= n - 1 and connected_components(graph, directed=False)[0] == 1:
            return math.fsum(minimum_spanning_tree(graph).data)
    return math.fsum(minimum_spanning_tree(squareform(pdist(pts))).data)

def exhaustive_mst_length(locations):
    r"""
    Minimum spanning tree length by greedy tree growth over all pairs, in
    quadratic time.

    EXAMPLES::

        >>> from mcpzones.zoning import exhaustive_mst_length
        >>> exhaustive_mst_length([(0, 0), (0, 100), (100, 100), (0, 200)])
        300.0
    """
    pts = _unique_locations(locations)
    n = len(pts)
    inside = np.zeros(n, dtype=bool)
    inside[0] = True
    best = distances_from(pts[0], pts)
    edges = []
    for _ in range(n - 1):
        candidates = np.where(inside, np.inf, best)
        j = int(np.argmin(candidates))
        edges.append(candidates[j])
        inside[j] = True
        best = np.minimum(best, distances_from(pts[j], pts))
    return math.fsum(edges)

def discovery_order_extent(locations):
    r"""
    Sum of the distances between consecutive locations, in the given order.

    EXAMPLES::

        >>> from mcpzones.zoning import discovery_order_extent
        >>> discovery_order_extent([(0, 0), (200, 0), (100, 0)])
        300.0
        >>> discovery_order_extent([(1, 1)])
        0.0
    """
    pts = np.asarray([tuple(p) for p in locations], dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("the extent of an empty cluster is undefined")
    d = pts[1:] - pts[:-1]
    return math.fsum(np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]))

#===============================================
# Zones
#===============================================

def _materialize(key, members, cluster, params):
    chosen = [members[p] for p in cluster]
    locations = np.array([tuple(m.location) for m in chosen], dtype=np.float64)
    if params.extent == 'mst':
        extent = zone_extent(locations, radius=params.radius)
    else:
        extent = discovery_order_extent(locations)
    pole_ids = sorted(m.pole_id for m in chosen)
    lo, hi = locations.min(axis=0), locations.max(axis=0)
    return RiskZone(zone_id="Z-" + stable_digest([key.label(), ';'.join(pole_ids)]),
                    circuits=key,
                    members=[m.pole_index for m in chosen],
                    pole_ids=pole_ids,
                    extent_m=float(extent),
                    hull=convex_hull(locations),
                    bbox=(Point2D(*lo), Point2D(*hi)),
                    centroid=Point2D(*locations.mean(axis=0)))

def _zones_of_group(group, params):
    members = _sorted_members(group)
    locations = np.array([tuple(m.location) for m in members], dtype=np.float64)
    clusters = _flood_fill(locations, params.radius)
    zones = []
    for cluster in clusters:
        if len(cluster) < params.min_poles:
            continue
        zone = _materialize(group.key, members, cluster, params)
        if zone.extent_m >= params.min_extent:
            zones.append(zone)
    return len(clusters), zones

def build_zones(groups, params=None, workers=1):
    r"""
    Cluster every configuration group and materialize the risk zones.

    INPUT:

    - ``groups`` -- list of :class:`~mcpzones.detection.McpGroup`

    - ``params`` -- (default: ``ZoningParams()``) a :class:`ZoningParams`

    - ``workers`` -- (default: 1) number of threads clustering groups
      concurrently; the result does not depend on it

    OUTPUT:

    A list of :class:`RiskZone` with at least ``min_poles`` poles and extent
    at least ``min_extent``, sorted by circuits and then by centroid.

    EXAMPLES::

        >>> from mcpzones.detection import CircuitSet, McpGroup, McpPole
        >>> from mcpzones.geometry import Point2D
        >>> from mcpzones.zoning import build_zones, ZoningParams
        >>> def group(points, circuits='AB', first=0):
        ...     key = CircuitSet(circuits)
        ...     return McpGroup(key, [McpPole(first + i, 'P%02d' % (first + i), Point2D(*p), key)
        ...                          for i, p in enumerate(points)])
        >>> corridor = group([(100 * i, 0) for i in range(10)])
        >>> [Z] = build_zones([corridor]); Z
        A RiskZone Z-... on A;B with n = 10 poles, extent 900.0 m
        >>> Z.extent_mi, Z.centroid, Z.bbox
        (0.559..., Point2D(x=450.0, y=0.0), (Point2D(x=0.0, y=0.0), Point2D(x=900.0, y=0.0)))
        >>> len(Z.hull), sorted(set(Z.hull.vertices()))
        (3, [Point2D(x=0.0, y=0.0), Point2D(x=900.0, y=0.0)])

    A lone pole is not a zone, and neither is a cluster shorter than the
    minimum extent unless the filter is disabled::

        >>> build_zones([group([(0, 0)])])
        []
        >>> build_zones([group([(0, 0), (150, 0)])])
        []
        >>> build_zones([group([(0, 0), (150, 0)])], ZoningParams(min_extent=0))
        [A RiskZone Z-... on A;B with n = 2 poles, extent 150.0 m]

    Crossing corridors of different configurations stay separate zones::

        >>> other = group([(450, 100 * i - 450) for i in range(10)], circuits='CD', first=10)
        >>> [z.circuits.label() for z in build_zones([corridor, other])]
        ['A;B', 'C;D']

    TESTS:

    Zone ids are stable and do not depend on the worker count::

        >>> import numpy as np
        >>> rng = np.random.default_rng(30)
        >>> groups = [group(rng.uniform(0, 3000, (300, 2)), circuits=c, first=300 * n)
        ...           for n, c in enumerate(['AB', 'AC', 'BC', 'ABC'])]
        >>> Z1, Z4 = build_zones(groups), build_zones(groups, workers=4)
        >>> [z.zone_id for z in Z1] == [z.zone_id for z in Z4], len(Z1) > 0
        (True, True)

    Every emitted zone is connected by hops of at most `r`::

        >>> from mcpzones.zoning import cluster_group
        >>> location = {m.pole_index: m.location for g in groups for m in g.members}
        >>> def rebuilt(z):
        ...     return McpGroup(z.circuits, [McpPole(i, '', location[i], z.circuits) for i in z.members])
        >>> all(len(cluster_group(rebuilt(z))) == 1 for z in Z1)
        True
    """
    params = ZoningParams() if params is None else params
    groups = [g for g in groups if g.members]
    logger.info("clustering %s multi-circuit poles in %s configuration groups (r = %s m)...",
                sum(len(g.members) for g in groups), len(groups), params.radius)
    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda g: _zones_of_group(g, params), groups))
    else:
        results = [_zones_of_group(g, params) for g in groups]
    zones = [z for _, found in results for z in found]
    zones.sort(key=lambda z: (z.circuits, z.centroid.x, z.centroid.y, z.zone_id))
    logger.info("done: %s clusters, %s zones after filtering (min_poles = %s, min_extent = %s m)",
                sum(n for n, _ in results), len(zones), params.min_poles, params.min_extent)
    return zones

#===============================================
# Statistics
#===============================================

def length_histogram(zones, bin_width=1.0, max_miles=5.0):
    r"""
    Count zones per extent bin.

    INPUT:

    - ``zones`` -- list of :class:`RiskZone`, or of extents in meters

    - ``bin_width`` -- (default: 1) bin width in miles

    - ``max_miles`` -- (default: 5) zones of at least this many miles, rounded
      up to a whole number of bins, fall in the trailing overflow bin

    OUTPUT:

    A list of :class:`HistogramBin`. Bins are half-open, ``[lo_mi, hi_mi)``;
    the overflow bin has ``hi_mi`` infinite. Empty bins are listed.

    EXAMPLES::

        >>> from mcpzones.zoning import length_histogram
        >>> mi = 1609.344
        >>> length_histogram([0.5 * mi, 0.8 * mi])[0]
        HistogramBin(lo_mi=0.0, hi_mi=1.0, count=2)
        >>> [b.count for b in length_histogram([1609.344, 9000.0, 12000.0])]
        [0, 1, 0, 0, 0, 2]
        >>> length_histogram([], bin_width=0.5, max_miles=1)
        [HistogramBin(lo_mi=0.0, hi_mi=0.5, count=0), HistogramBin(lo_mi=0.5, hi_mi=1.0, count=0), HistogramBin(lo_mi=1.0, hi_mi=inf, count=0)]

    TESTS:

    Counts agree with a direct tally::

        >>> import numpy as np
        >>> extents = np.random.default_rng(2).uniform(0, 9, 1000) * mi
        >>> tally = [sum(1 for e in extents if i <= e / mi < i + 1) for i in range(5)] + [sum(1 for e in extents if e / mi >= 5)]
        >>> [b.count for b in length_histogram(extents)] == tally
        True
        >>> length_histogram([100.0], bin_width=0)
        Traceback (most recent call last):
        ...
        ValueError: bin width must be positive, got 0.0
    """
    bin_width, max_miles = float(bin_width), float(max_miles)
    if not (bin_width > 0 and math.isfinite(bin_width)):
        raise ValueError("bin width must be positive, got %r" % bin_width)
    if not (max_miles > 0 and math.isfinite(max_miles)):
        raise ValueError("max_miles must be positive, got %r" % max_miles)
    extents = np.array([getattr(z, 'extent_m', z) for z in zones], dtype=np.float64)
    if np.any(~np.isfinite(extents) | (extents < 0)):
        raise ValueError("zone extents must be finite and non-negative")
    nbins = max(1, int(math.ceil(max_miles / bin_width - 1e-9)))
    index = np.minimum(np.floor(extents / METERS_PER_MILE / bin_width), nbins).astype(np.int64)
    counts = np.bincount(index, minlength=nbins + 1)
    bins = [HistogramBin(i * bin_width, (i + 1) * bin_width, int(counts[i])) for i in range(nbins)]
    bins.append(HistogramBin(nbins * bin_width, math.inf, int(counts[nbins])))
    return bins
