r"""
Synthetic service territories with planted multi-circuit corridors.

A synthetic territory has two parts:

- planted corridors, straight pole lines carrying two or more circuits. Each
  pole gets one wire segment per circuit, centered on the pole and offset to
  the side of the pole line, the way GIS wire geometries are often drawn
  beside the poles they hang on;

- single-circuit background poles on parallel rows, split into feeders, far
  enough from the corridors and from each other that they never pick up a
  second circuit.

The ground truth lists, for every corridor, the circuit set, the pole ids and
the analytic extent `(n - 1) s` of the unjittered pole line.

Positions are perturbed by Gaussian noise clipped to three standard
deviations, so that with spacing at most `r - 6\sigma` every planted corridor
is recovered as exactly one zone.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~CorridorSpec`            | Shape of one planted corridor
    :class:`~SynthParams`             | All parameters of a synthetic territory
    :class:`~GroundTruth`             | Expected zones of a synthetic territory
    :func:`~generate`                 | Generate poles, wires and ground truth
    :func:`~write_territory`          | Write a synthetic territory and its ground truth
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
import string
from collections import namedtuple

import numpy as np
import shapely

from mcpzones.detection import CircuitSet
from mcpzones.io import write_json, write_poles_csv, write_poles_geojson, write_wires_csv, write_wires_geojson
from mcpzones.territory import PoleSet, WireSet

logger = logging.getLogger(__name__)

# the bit generator named in the ground truth
GENERATOR = 'PCG64'

# attempts at placing one corridor before giving up
MAX_PLACEMENT_ATTEMPTS = 1000

# feeder runs on a background row span this many pole slots
FEEDER_SLOTS = (20, 80)

class InfeasibleLayoutError(ValueError):
    r"""
    The requested territory cannot be laid out with the guarantees of the generator.
    """

class CorridorSpec(namedtuple('CorridorSpec', ['n_circuits', 'length_m', 'spacing_m', 'heading_deg'])):
    r"""
    A planted corridor.

    INPUT:

    - ``n_circuits`` -- (default: 2) number of circuits, at least 2

    - ``length_m`` -- (default: 900) nominal length in meters; the pole count
      is ``round(length_m / spacing_m) + 1``

    - ``spacing_m`` -- (default: 100) pole spacing in meters

    - ``heading_deg`` -- (optional) direction in degrees counterclockwise from
      east; drawn at random when omitted

    EXAMPLES::

        >>> from mcpzones.synth import CorridorSpec
        >>> C = CorridorSpec(3, 1000, 90); C.n_poles, C.expected_extent_m
        (12, 990.0)
        >>> CorridorSpec(1)
        Traceback (most recent call last):
        ...
        ValueError: a corridor carries at least 2 circuits, got 1
    """
    __slots__ = ()

    def __new__(cls, n_circuits=2, length_m=900.0, spacing_m=100.0, heading_deg=None):
        if int(n_circuits) != n_circuits or not 2 <= n_circuits <= len(string.ascii_uppercase):
            raise ValueError("a corridor carries at least 2 circuits, got %s" % n_circuits)
        length_m, spacing_m = float(length_m), float(spacing_m)
        if not (spacing_m > 0 and math.isfinite(spacing_m)):
            raise ValueError("pole spacing must be positive, got %r" % spacing_m)
        if not (length_m >= spacing_m and math.isfinite(length_m)):
            raise ValueError("corridor length %r is shorter than its pole spacing %r" % (length_m, spacing_m))
        if heading_deg is not None:
            heading_deg = float(heading_deg)
        return super(CorridorSpec, cls).__new__(cls, int(n_circuits), length_m, spacing_m, heading_deg)

    @property
    def n_poles(self):
        return int(round(self.length_m / self.spacing_m)) + 1

    @property
    def expected_extent_m(self):
        return (self.n_poles - 1) * self.spacing_m

_SYNTH_FIELDS = ['seed', 'width_m', 'height_m', 'background_poles', 'background_circuits', 'corridors',
                 'jitter_m', 'wire_offset_m', 'radius_m', 'd_max_m', 'k', 'row_gap_m',
                 'background_spacing_m', 'split_fraction']

class SynthParams(namedtuple('SynthParams', _SYNTH_FIELDS)):
    r"""
    Parameters of a synthetic territory.

    INPUT:

    - ``seed`` -- (default: 0) seed of the ``PCG64`` bit generator

    - ``width_m``, ``height_m`` -- (default: 10000) territory size in meters

    - ``background_poles`` -- (default: 0) number of single-circuit poles

    - ``background_circuits`` -- (default: 100) number of distinct circuit
      ids cycled over the background feeders

    - ``corridors`` -- (default: none) list of :class:`CorridorSpec`

    - ``jitter_m`` -- (default: 5) standard deviation of the position noise

    - ``wire_offset_m`` -- (default: 10) lateral distance between poles and wires

    - ``radius_m``, ``d_max_m``, ``k`` -- (default: 200, 50, 3) the pipeline
      parameters the territory must be recoverable with

    - ``row_gap_m`` -- (default: 150) distance between background rows

    - ``background_spacing_m`` -- (default: 50) pole slot spacing on a row

    - ``split_fraction`` -- (default: 0) fraction of the background wires
      split in two segments

    EXAMPLES::

        >>> from mcpzones.synth import SynthParams, CorridorSpec
        >>> S = SynthParams(seed=3, corridors=[CorridorSpec()]); S.corridors
        (CorridorSpec(n_circuits=2, length_m=900.0, spacing_m=100.0, heading_deg=None),)
        >>> SynthParams(jitter_m=-1)
        Traceback (most recent call last):
        ...
        ValueError: jitter must be non-negative, got -1.0
    """
    __slots__ = ()

    def __new__(cls, seed=0, width_m=10000.0, height_m=10000.0, background_poles=0, background_circuits=100,
                corridors=(), jitter_m=5.0, wire_offset_m=10.0, radius_m=200.0, d_max_m=50.0, k=3,
                row_gap_m=150.0, background_spacing_m=50.0, split_fraction=0.0):
        if int(seed) != seed or not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer, got %r" % seed)
        for name, value in (('width', width_m), ('height', height_m), ('radius', radius_m), ('d_max', d_max_m),
                            ('row gap', row_gap_m), ('background spacing', background_spacing_m)):
            if not (float(value) > 0 and math.isfinite(float(value))):
                raise ValueError("%s must be positive, got %r" % (name, float(value)))
        if not float(jitter_m) >= 0:
            raise ValueError("jitter must be non-negative, got %r" % float(jitter_m))
        if not float(wire_offset_m) >= 0:
            raise ValueError("wire offset must be non-negative, got %r" % float(wire_offset_m))
        if int(background_poles) < 0:
            raise ValueError("background pole count must be non-negative, got %s" % background_poles)
        if int(background_circuits) < 1:
            raise ValueError("background circuit count must be at least 1, got %s" % background_circuits)
        if int(k) < 1:
            raise ValueError("k must be at least 1, got %s" % k)
        if not 0.0 <= float(split_fraction) <= 1.0:
            raise ValueError("split fraction must lie in [0, 1], got %r" % float(split_fraction))
        corridors = tuple(c if isinstance(c, CorridorSpec) else CorridorSpec(*c) for c in corridors)
        return super(SynthParams, cls).__new__(
            cls, int(seed), float(width_m), float(height_m), int(background_poles), int(background_circuits),
            corridors, float(jitter_m), float(wire_offset_m), float(radius_m), float(d_max_m), int(k),
            float(row_gap_m), float(background_spacing_m), float(split_fraction))

    @property
    def reach_m(self):
        """
        Largest possible distance between a pole and the centroid of its own wire.
        """
        return self.wire_offset_m + 6.0 * self.jitter_m

CorridorTruth = namedtuple('CorridorTruth', ['circuits', 'pole_ids', 'expected_extent_m', 'spec'])
CorridorTruth.__doc__ = """Expected zone of a planted corridor; ``spec`` records the heading actually used."""

class GroundTruth(object):
    r"""
    The expected zones of a synthetic territory, one per planted corridor.

    EXAMPLES::

        >>> from mcpzones.synth import generate
        >>> from mcpzones.library import single_corridor
        >>> truth = generate(single_corridor())[2]; truth
        Ground truth for n = 1 planted corridors
        >>> truth[0].circuits, truth[0].expected_extent_m
        (CircuitSet(['K01-A', 'K01-B']), 900.0)
        >>> sorted(truth.to_dict())
        ['corridors', 'counts', 'generator', 'params', 'seed']
    """
    def __init__(self, corridors, params, counts):
        self._corridors = list(corridors)
        self._params = params
        self._counts = dict(counts)

    def __repr__(self):
        return "Ground truth for n = %s planted corridors" % len(self._corridors)

    def __len__(self):
        return len(self._corridors)

    def __getitem__(self, i):
        return self._corridors[i]

    def __iter__(self):
        return iter(self._corridors)

    def params(self):
        """
        Get the generation parameters.
        """
        return self._params

    def to_dict(self):
        """
        Get a JSON-ready description of the territory and its expected zones.
        """
        params = self._params._asdict()
        params['corridors'] = [c._asdict() for c in self._params.corridors]
        return {
            'generator': GENERATOR,
            'seed': self._params.seed,
            'params': params,
            'counts': dict(self._counts),
            'corridors': [{'circuits': list(c.circuits),
                           'pole_ids': list(c.pole_ids),
                           'expected_extent_m': c.expected_extent_m,
                           'n_poles': len(c.pole_ids),
                           'length_m': c.spec.length_m,
                           'spacing_m': c.spec.spacing_m,
                           'heading_deg': c.spec.heading_deg} for c in self._corridors],
        }

#===============================================
# Random helpers
#===============================================

def _planar_jitter(rng, n, sigma):
    """
    Gaussian offsets with the vector norm clipped to three standard deviations.
    """
    z = rng.normal(0.0, 1.0, size=(n, 2)) * sigma
    norm = np.hypot(z[:, 0], z[:, 1])
    scale = np.ones(n)
    far = norm > 3.0 * sigma
    scale[far] = 3.0 * sigma / norm[far]
    return z * scale[:, None]

def _scalar_jitter(rng, n, sigma):
    return np.clip(rng.normal(0.0, 1.0, size=n) * sigma, -3.0 * sigma, 3.0 * sigma)

#===============================================
# Layout
#===============================================

def _check_layout(params):
    reach = params.reach_m
    if not reach < params.d_max_m:
        raise InfeasibleLayoutError("wire offset plus jitter reaches %.1f m, it must stay below d_max = %.1f m"
                                    % (reach, params.d_max_m))
    for i, spec in enumerate(params.corridors, 1):
        if spec.n_circuits > params.k:
            raise InfeasibleLayoutError("corridor %s carries %s circuits, more than k = %s"
                                        % (i, spec.n_circuits, params.k))
        if spec.spacing_m > params.radius_m:
            raise InfeasibleLayoutError("corridor %s pole spacing %.1f m exceeds the radius %.1f m"
                                        % (i, spec.spacing_m, params.radius_m))
        if spec.spacing_m > params.radius_m - 6.0 * params.jitter_m:
            logger.warning("corridor %s pole spacing %.1f m exceeds r - 6 sigma = %.1f m; "
                           "it may split into several zones", i, spec.spacing_m,
                           params.radius_m - 6.0 * params.jitter_m)
    if params.background_poles and not params.row_gap_m > params.d_max_m + reach:
        raise InfeasibleLayoutError("background row gap %.1f m must exceed d_max plus reach = %.1f m"
                                    % (params.row_gap_m, params.d_max_m + reach))

def _place_corridors(rng, params):
    """
    Start point, unit direction and heading of every corridor.
    """
    margin = params.radius_m
    separation = 2.0 * params.radius_m + 6.0 * params.jitter_m
    placed, lines = [], []
    for i, spec in enumerate(params.corridors, 1):
        heading = spec.heading_deg if spec.heading_deg is not None else float(rng.uniform(0.0, 180.0))
        u = np.array([math.cos(math.radians(heading)), math.sin(math.radians(heading))])
        span = (spec.n_poles - 1) * spec.spacing_m * u
        lo = np.array([margin, margin]) - np.minimum(span, 0.0)
        hi = np.array([params.width_m, params.height_m]) - margin - np.maximum(span, 0.0)
        if np.any(lo > hi):
            raise InfeasibleLayoutError("corridor %s (%.0f m) does not fit in a %.0f m by %.0f m territory"
                                        % (i, spec.expected_extent_m, params.width_m, params.height_m))
        for attempt in range(MAX_PLACEMENT_ATTEMPTS):
            start = np.round(rng.uniform(lo, hi))
            line = shapely.LineString([start, start + span])
            if all(line.distance(other) > separation for other in lines):
                break
        else:
            raise InfeasibleLayoutError("cannot separate corridor %s from the others by more than %.0f m "
                                        "after %s attempts" % (i, separation, MAX_PLACEMENT_ATTEMPTS))
        lines.append(line)
        placed.append((start, u, heading))
    return placed, lines

def _corridor_layers(rng, params, placed):
    pole_ids, pole_xy, wire_ids, circuits, geoms, declared, truths = [], [], [], [], [], [], []
    for i, (spec, (start, u, heading)) in enumerate(zip(params.corridors, placed), 1):
        n, s = spec.n_poles, spec.spacing_m
        v = np.array([-u[1], u[0]])
        base = start + np.outer(np.arange(n) * s, u)
        ids = ["P-K%02d-%04d" % (i, j) for j in range(n)]
        names = ["K%02d-%s" % (i, string.ascii_uppercase[c]) for c in range(spec.n_circuits)]
        pole_ids.extend(ids)
        pole_xy.append(base + _planar_jitter(rng, n, params.jitter_m))
        lateral = _scalar_jitter(rng, n * spec.n_circuits, params.jitter_m).reshape(n, spec.n_circuits)
        for j in range(n):
            for c, name in enumerate(names):
                side = 1.0 if c % 2 == 0 else -1.0
                center = base[j] + side * (params.wire_offset_m + lateral[j, c]) * v
                wire_ids.append("W-%s-%04d" % (name, j))
                circuits.append(name)
                geoms.append([center - 0.5 * s * u, center, center + 0.5 * s * u])
                declared.append((ids[j],))
        truths.append(CorridorTruth(CircuitSet(names), ids, spec.expected_extent_m,
                                    spec._replace(heading_deg=heading)))
    return pole_ids, pole_xy, wire_ids, circuits, geoms, declared, truths

def _background_slots(rng, params):
    """
    Pole slots on the background rows and the feeder number of each slot.
    """
    s = params.background_spacing_m
    gap = int(math.ceil((params.d_max_m + params.reach_m) / s)) + 1
    xs = np.arange(0.5 * s, params.width_m, s)
    slots, feeders = [], []
    feeder = 0
    for y in np.arange(0.5 * params.row_gap_m, params.height_m, params.row_gap_m):
        j = 0
        while j < len(xs):
            run = int(rng.integers(FEEDER_SLOTS[0], FEEDER_SLOTS[1] + 1))
            stop = min(j + run, len(xs))
            slots.append(np.column_stack([xs[j:stop], np.full(stop - j, y)]))
            feeders.append(np.full(stop - j, feeder))
            feeder += 1
            j = stop + gap
    if not slots:
        return np.zeros((0, 2)), np.zeros(0, dtype=np.int64)
    return np.concatenate(slots), np.concatenate(feeders)

def _background_layers(rng, params, lines):
    n = params.background_poles
    slots, feeders = _background_slots(rng, params)
    keep = np.ones(len(slots), dtype=bool)
    if len(slots) and lines:
        points = shapely.points(slots)
        for line in lines:
            keep &= shapely.distance(points, line) > 2.0 * params.radius_m
    eligible = np.flatnonzero(keep)
    if len(eligible) < n:
        raise InfeasibleLayoutError("only %s background pole slots are available for %s background poles"
                                    % (len(eligible), n))
    chosen = eligible[np.sort(rng.choice(len(eligible), size=n, replace=False))]
    base = slots[chosen]
    pole_xy = base + _planar_jitter(rng, n, params.jitter_m)
    lateral = _scalar_jitter(rng, n, params.jitter_m)
    split = rng.random(n) < params.split_fraction
    u, v = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    half = 0.5 * params.background_spacing_m * u
    pole_ids = ["P-B%06d" % m for m in range(n)]
    wire_ids, circuits, geoms, declared = [], [], [], []
    for m in range(n):
        center = base[m] + (params.wire_offset_m + lateral[m]) * v
        circuit = "BG-%04d" % (feeders[chosen[m]] % params.background_circuits)
        if split[m]:
            pieces = [("W-B%06d-a" % m, [center - half, center]), ("W-B%06d-b" % m, [center, center + half])]
        else:
            pieces = [("W-B%06d" % m, [center - half, center, center + half])]
        for wire_id, geom in pieces:
            wire_ids.append(wire_id)
            circuits.append(circuit)
            geoms.append(geom)
            declared.append((pole_ids[m],))
    return pole_ids, pole_xy, wire_ids, circuits, geoms, declared

#===============================================
# Generation
#===============================================

def generate(params):
    r"""
    Generate a synthetic territory.

    INPUT:

    - ``params`` -- a :class:`SynthParams`

    OUTPUT:

    A tuple ``(poles, wires, truth)``: a :class:`~mcpzones.territory.PoleSet`,
    a :class:`~mcpzones.territory.WireSet` and a :class:`GroundTruth`. The
    output only depends on ``params``.

    EXAMPLES::

        >>> from mcpzones.synth import generate, SynthParams, CorridorSpec
        >>> from mcpzones.library import single_corridor, three_corridors, background_only
        >>> poles, wires, truth = generate(single_corridor())
        >>> poles, wires
        (A PoleSet of n = 10 poles, A WireSet of n = 20 wire segments on 2 circuits)
        >>> poles.ids()[:2], wires.ids()[:2]
        (['P-K01-0000', 'P-K01-0001'], ['W-K01-A-0000', 'W-K01-B-0000'])

    Every planted corridor is recovered as one zone with the planted
    circuits and poles, and background poles produce no zone::

        >>> from mcpzones.pipeline import zones_from_layers
        >>> poles, wires, truth = generate(three_corridors())
        >>> zones = zones_from_layers(poles, wires)
        >>> len(zones), len(truth)
        (3, 3)
        >>> found = {(z.circuits, tuple(z.pole_ids)): z.extent_m for z in zones}
        >>> all((t.circuits, tuple(sorted(t.pole_ids))) in found for t in truth)
        True
        >>> all(abs(found[t.circuits, tuple(sorted(t.pole_ids))] - t.expected_extent_m)
        ...     <= 3 * 5.0 * len(t.pole_ids) ** 0.5 for t in truth)
        True
        >>> zones_from_layers(*generate(background_only())[:2])
        []

    The same seed gives the same territory::

        >>> P1, W1, _ = generate(three_corridors())
        >>> bool((P1.coords() == poles.coords()).all()), W1.ids() == wires.ids()
        (True, True)
        >>> P2, _, _ = generate(three_corridors()._replace(seed=12))
        >>> bool((P2.coords() == poles.coords()).all())
        False

    A fraction of the background wires can be split in two::

        >>> _, W, _ = generate(SynthParams(width_m=2000, height_m=2000, background_poles=300, split_fraction=1))
        >>> len(W)
        600

    TESTS::

        >>> generate(SynthParams(wire_offset_m=30))
        Traceback (most recent call last):
        ...
        mcpzones.synth.InfeasibleLayoutError: wire offset plus jitter reaches 60.0 m, it must stay below d_max = 50.0 m
        >>> generate(SynthParams(width_m=1000, height_m=1000, corridors=[CorridorSpec(2, 5000, 100)]))
        Traceback (most recent call last):
        ...
        mcpzones.synth.InfeasibleLayoutError: corridor 1 (5000 m) does not fit in a 1000 m by 1000 m territory
        >>> generate(SynthParams(width_m=1000, height_m=1000, background_poles=10**5))
        Traceback (most recent call last):
        ...
        mcpzones.synth.InfeasibleLayoutError: only ... background pole slots are available for 100000 background poles
        >>> generate(SynthParams(corridors=[CorridorSpec(4)]))
        Traceback (most recent call last):
        ...
        mcpzones.synth.InfeasibleLayoutError: corridor 1 carries 4 circuits, more than k = 3
    """
    _check_layout(params)
    rng = np.random.Generator(np.random.PCG64(params.seed))
    logger.info("generating a synthetic territory (%s corridors, %s background poles, seed %s)...",
                len(params.corridors), params.background_poles, params.seed)
    placed, lines = _place_corridors(rng, params)
    pole_ids, pole_xy, wire_ids, circuits, geoms, declared, truths = _corridor_layers(rng, params, placed)
    if params.background_poles:
        bg = _background_layers(rng, params, lines)
        pole_ids += bg[0]
        pole_xy.append(bg[1])
        wire_ids += bg[2]
        circuits += bg[3]
        geoms += bg[4]
        declared += bg[5]
    coords = np.concatenate(pole_xy) if pole_xy else np.zeros((0, 2))
    poles = PoleSet(pole_ids, coords)
    wires = WireSet(wire_ids, circuits, geoms, declared_pole_ids=declared)
    truth = GroundTruth(truths, params, {'poles': len(poles), 'wires': len(wires)})
    logger.info("done: %s poles, %s wire segments", len(poles), len(wires))
    return poles, wires, truth

def write_territory(poles, wires, truth, out_dir, fmt='csv'):
    r"""
    Write a synthetic territory to ``out_dir``.

    The layers are written as ``poles.csv`` and ``wires.csv``, or as
    ``poles.geojson`` and ``wires.geojson`` with ``fmt='geojson'``, in planar
    meters; the ground truth is written as ``ground_truth.json``.

    OUTPUT:

    A dictionary of the written paths.

    EXAMPLES::

        >>> import json, os, tempfile
        >>> from mcpzones.synth import generate, write_territory
        >>> from mcpzones.library import single_corridor
        >>> from mcpzones.io import load_poles
        >>> out = tempfile.mkdtemp()
        >>> paths = write_territory(*generate(single_corridor()), out)
        >>> sorted(os.path.basename(p) for p in paths.values())
        ['ground_truth.json', 'poles.csv', 'wires.csv']
        >>> load_poles(paths['poles'])
        A PoleSet of n = 10 poles
        >>> json.load(open(paths['ground_truth']))['generator']
        'PCG64'
    """
    if fmt not in ('csv', 'geojson'):
        raise ValueError("unsupported format %r, expected csv or geojson" % fmt)
    os.makedirs(out_dir, exist_ok=True)
    paths = {'poles': os.path.join(out_dir, 'poles.' + fmt),
             'wires': os.path.join(out_dir, 'wires.' + fmt),
             'ground_truth': os.path.join(out_dir, 'ground_truth.json')}
    if fmt == 'csv':
        write_poles_csv(poles, paths['poles'])
        write_wires_csv(wires, paths['wires'])
    else:
        write_poles_geojson(poles, paths['poles'])
        write_wires_geojson(wires, paths['wires'])
    write_json(truth.to_dict(), paths['ground_truth'])
    logger.info("wrote %s poles and %s wire segments to %s", len(poles), len(wires), out_dir)
    return paths
