r"""
Full-size conformance checks of the spatial index, the clustering, the
extent, the association, the zone recovery and the running time.

Each check compares a fast routine with its exhaustive counterpart on seeded
random instances, or runs the pipeline on a library territory.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~index_mismatches`         | KD-tree queries against the linear scans
    :func:`~clustering_mismatches`    | Flood fill against graph components
    :func:`~extent_worst_error`       | Spanning tree length against the quadratic oracle
    :func:`~association_mismatches`   | Association against the exhaustive search
    :func:`~recovery_report`          | Zones found in a synthetic territory against its ground truth
    :func:`~benchmark_report`         | Time and peak memory of a full pipeline run
    :func:`~build_time_exponent`      | Growth of the KD-tree build time with the number of points
    :func:`~pipeline_time_exponent`   | Growth of the pipeline time with the territory size

The examples of the functions run at full size and are skipped unless
pytest is given ``--runslow``; the ones below are small::

    >>> from mcpzones.acceptance import index_mismatches, clustering_mismatches, extent_worst_error
    >>> index_mismatches(instances=5, max_points=500, queries=20)
    0
    >>> clustering_mismatches(groups=5, max_members=300)
    0
    >>> extent_worst_error(clusters=20, max_poles=40) <= 1e-6
    True
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
import os
import tempfile
import time
import tracemalloc

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from mcpzones.association import AssociationParams, associate, brute_force_associate
from mcpzones.detection import CircuitSet, McpGroup, McpPole
from mcpzones.geometry import Point2D
from mcpzones.library import benchmark_territory
from mcpzones.pipeline import PipelineConfig, run_pipeline, zones_from_layers
from mcpzones.spatial_index import build, knn, linear_scan_knn, linear_scan_radius, radius_query
from mcpzones.synth import generate, write_territory
from mcpzones.territory import PoleSet, WireSet
from mcpzones.zoning import (ZoningParams, cluster_group, exhaustive_mst_length, length_histogram,
                             zone_extent)

logger = logging.getLogger(__name__)

#===============================================
# Oracle equivalence
#===============================================

def index_mismatches(instances=200, max_points=10000, queries=1000, seed=0):
    r"""
    Count the queries where :func:`~mcpzones.spatial_index.knn` or
    :func:`~mcpzones.spatial_index.radius_query` differ from the linear scans.

    Coordinates are rounded to whole meters so that duplicates and distance
    ties occur; every fourth instance is collinear.

    EXAMPLES::

        >>> from mcpzones.acceptance import index_mismatches
        >>> index_mismatches()
        0
    """
    rng = np.random.default_rng(seed)
    mismatches = 0
    for trial in range(instances):
        n = int(rng.integers(1, max_points + 1))
        side = float(rng.choice([100.0, 1000.0, 10000.0]))
        pts = rng.uniform(0, side, size=(n, 2)).round(0)
        if trial % 4 == 0:
            pts[:, 1] = 3.0
        T = build(pts)
        for q in rng.uniform(-0.05 * side, 1.05 * side, size=(queries, 2)).round(0):
            k, r = int(rng.integers(1, 9)), float(rng.uniform(0.01, 0.1) * side)
            mismatches += knn(T, q, k, r) != linear_scan_knn(pts, q, k, r)
            mismatches += radius_query(T, q, r) != linear_scan_radius(pts, q, r)
    logger.info("index oracle: %s mismatches over %s instances", mismatches, instances)
    return mismatches

def _group(points):
    key = CircuitSet(['A', 'B'])
    return McpGroup(key, [McpPole(i, 'P%d' % i, Point2D(*p), key) for i, p in enumerate(points)])

def clustering_mismatches(groups=100, max_members=2000, seed=0):
    r"""
    Count the groups where :func:`~mcpzones.zoning.cluster_group` does not
    produce the connected components of the graph of all pairs within the radius.

    EXAMPLES::

        >>> from mcpzones.acceptance import clustering_mismatches
        >>> clustering_mismatches()
        0
    """
    rng = np.random.default_rng(seed)
    mismatches = 0
    for trial in range(groups):
        n = int(rng.integers(1, max_members + 1))
        pts = rng.uniform(0, 10000, (n, 2)).round(0)
        r = float(rng.integers(20, 500))
        got = {frozenset(c) for c in cluster_group(_group(pts), ZoningParams(radius=r))}
        if n == 1:
            mismatches += got != {frozenset([0])}
            continue
        _, labels = connected_components(csr_matrix((squareform(pdist(pts)) <= r).astype(float)), directed=False)
        mismatches += got != {frozenset(np.flatnonzero(labels == c).tolist()) for c in set(labels.tolist())}
    logger.info("clustering oracle: %s mismatches over %s groups", mismatches, groups)
    return mismatches

def extent_worst_error(clusters=500, max_poles=200, seed=0):
    r"""
    Return the largest relative difference between
    :func:`~mcpzones.zoning.zone_extent`, with and without a radius, and
    :func:`~mcpzones.zoning.exhaustive_mst_length` over random walks of poles.

    EXAMPLES::

        >>> from mcpzones.acceptance import extent_worst_error
        >>> extent_worst_error() <= 1e-6
        True
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(clusters):
        pts = np.cumsum(rng.uniform(-150, 150, (int(rng.integers(2, max_poles + 1)), 2)), axis=0)
        exact = exhaustive_mst_length(pts)
        for got in (zone_extent(pts), zone_extent(pts, radius=220)):
            worst = max(worst, abs(got - exact) / exact)
    return worst

def association_mismatches(territories=100, max_poles=5000, max_wires=5000, seed=0):
    r"""
    Count the territories where :func:`~mcpzones.association.associate`
    differs from :func:`~mcpzones.association.brute_force_associate`.

    Every territory is checked with centroid distances; every twentieth one
    also with nearest-point distances.

    EXAMPLES::

        >>> from mcpzones.acceptance import association_mismatches
        >>> association_mismatches()
        0
    """
    rng = np.random.default_rng(seed)
    mismatches = 0
    for trial in range(territories):
        n, m = int(rng.integers(1, max_poles + 1)), int(rng.integers(1, max_wires + 1))
        side = math.sqrt(max(n, m)) * 40.0
        P = PoleSet(['P%d' % i for i in range(n)], rng.uniform(0, side, (n, 2)).round(0))
        start = rng.uniform(0, side, (m, 2)).round(0)
        step = rng.integers(-40, 41, (m, 2)) * 2 + 1
        W = WireSet(['W%05d' % j for j in rng.permutation(m)], ['C%d' % c for c in rng.integers(0, 9, m)],
                    [[tuple(a), tuple(a + s)] for a, s in zip(start, step)])
        modes = ['centroid', 'nearest-point'] if trial % 20 == 0 else ['centroid']
        for mode in modes:
            params = AssociationParams(k=int(rng.integers(1, 5)), d_max=float(rng.integers(10, 80)), distance=mode)
            mismatches += associate(P, W, params) != brute_force_associate(P, W, params)
    logger.info("association oracle: %s mismatches over %s territories", mismatches, territories)
    return mismatches

#===============================================
# Recovery and running time
#===============================================

def recovery_report(params):
    r"""
    Generate a synthetic territory and compare its zones with the planted corridors.

    OUTPUT:

    A dictionary with:

    - ``zones`` -- number of zones found

    - ``recovered`` -- whether the zones are exactly the planted corridors,
      with their circuits and member poles

    - ``extents_within`` -- whether every zone extent is within `3 \sigma \sqrt{n}`
      of the planted corridor length, where `\sigma` is the position noise

    - ``histogram``, ``planted_histogram`` -- counts per length bin of the zones
      and of the planted corridors

    EXAMPLES::

        >>> from mcpzones.acceptance import recovery_report
        >>> from mcpzones.library import acceptance_territory
        >>> R = recovery_report(acceptance_territory())
        >>> R['zones'], R['recovered'], R['extents_within']
        (10, True, True)
        >>> R['histogram'], R['histogram'] == R['planted_histogram']
        ([3, 2, 1, 1, 1, 2], True)
    """
    poles, wires, truth = generate(params)
    zones = zones_from_layers(poles, wires)
    found = {(z.circuits, tuple(z.pole_ids)): z for z in zones}
    planted = {(t.circuits, tuple(sorted(t.pole_ids))): t for t in truth}
    within = all(key in found and abs(found[key].extent_m - t.expected_extent_m)
                 <= 3.0 * params.jitter_m * math.sqrt(len(t.pole_ids)) + 1e-6
                 for key, t in planted.items())
    return {'zones': len(zones),
            'recovered': sorted(found) == sorted(planted),
            'extents_within': within,
            'histogram': [b.count for b in length_histogram(zones)],
            'planted_histogram': [b.count for b in length_histogram([t.expected_extent_m for t in truth])]}

def benchmark_report(params, workers=1):
    r"""
    Write a synthetic territory to files and time a full pipeline run on it,
    from reading the layers to writing the reports.

    OUTPUT:

    A dictionary with the pole, wire and zone counts, the elapsed ``seconds``
    and the ``peak_bytes`` of memory allocated during the run.

    EXAMPLES::

        >>> from mcpzones.acceptance import benchmark_report
        >>> from mcpzones.library import benchmark_territory
        >>> B = benchmark_report(benchmark_territory())
        >>> B['poles'], B['zones']
        (100000, 10)
        >>> 145000 <= B['wires'] <= 155000, B['seconds'] < 60, B['peak_bytes'] < 2 * 1024 ** 3
        (True, True, True)
    """
    tmp = tempfile.mkdtemp()
    paths = write_territory(*generate(params), os.path.join(tmp, 'territory'))
    cfg = PipelineConfig(poles=paths['poles'], wires=paths['wires'], out=os.path.join(tmp, 'report'),
                         workers=workers)
    tracemalloc.start()
    start = time.perf_counter()
    try:
        summary = run_pipeline(cfg)
        seconds = time.perf_counter() - start
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    counts = summary['counts']
    logger.info("benchmark: %s poles, %s wires in %.2f s, peak %.0f MB",
                counts['poles'], counts['wires'], seconds, peak / 2.0 ** 20)
    return {'poles': counts['poles'], 'wires': counts['wires'], 'zones': counts['zones'],
            'seconds': seconds, 'peak_bytes': peak}

def _best_time(f, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        f()
        best = min(best, time.perf_counter() - start)
    return best

def _exponent(sizes, seconds):
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])

def build_time_exponent(sizes=(10000, 30000, 100000), repeats=5, seed=0):
    r"""
    Return the slope of log build time against log size for KD-trees over
    uniform random points; `n \log n` growth gives a slope slightly above 1.

    EXAMPLES::

        >>> from mcpzones.acceptance import build_time_exponent
        >>> build_time_exponent() < 1.5
        True
    """
    rng = np.random.default_rng(seed)
    seconds = []
    for n in sizes:
        pts = rng.uniform(0, 40000, (n, 2))
        seconds.append(_best_time(lambda: build(pts), repeats))
    return _exponent(sizes, seconds)

def pipeline_time_exponent(sizes=(10000, 30000, 100000), repeats=2):
    r"""
    Return the slope of log time against log pole count of
    :func:`~mcpzones.pipeline.zones_from_layers` on benchmark territories
    with one and a half wire segments per pole.

    EXAMPLES::

        >>> from mcpzones.acceptance import pipeline_time_exponent
        >>> pipeline_time_exponent() < 1.5
        True
    """
    seconds = []
    for n in sizes:
        poles, wires, _ = generate(benchmark_territory(total_poles=n, total_wires=int(1.5 * n)))
        seconds.append(_best_time(lambda: zones_from_layers(poles, wires), repeats))
    return _exponent(sizes, seconds)
