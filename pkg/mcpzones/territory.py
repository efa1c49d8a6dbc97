r"""
Classes to represent the pole and overhead-wire layers of a service territory.

Both layers are held column-wise (identifier lists and coordinate arrays) so
that territories with hundreds of thousands of records can be processed with
vectorized operations; single records are materialized on indexing.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~Pole`           | A surveyed support structure
    :class:`~WireSegment`    | An overhead conductor polyline carrying one circuit
    :class:`~PoleSet`        | Ordered pole collection with id lookup
    :class:`~WireSet`        | Ordered wire-segment collection with id lookup
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

from mcpzones.geometry import GeoPoint, Point2D, Polyline, clean_vertices

logger = logging.getLogger(__name__)

# stated and geometric lengths may disagree by this relative amount
LENGTH_TOLERANCE = 0.01

Pole = namedtuple('Pole', ['pole_id', 'location', 'metadata'])
Pole.__doc__ = """A pole: identifier, planar location and an opaque attribute table."""

WireSegment = namedtuple('WireSegment', ['wire_id', 'circuit_id', 'geometry', 'length',
                                         'ampacity', 'declared_pole_ids'])
WireSegment.__doc__ = """An overhead wire segment and its attributes."""

def _duplicates(ids):
    index = {}
    for i, key in enumerate(ids):
        if key in index:
            return key
        index[key] = i
    return None

class PoleSet(object):
    r"""
    An ordered collection of poles.

    INPUT:

    - ``pole_ids`` -- sequence of unique identifiers

    - ``coords`` -- `(n, 2)` array of planar coordinates in meters

    - ``metadata`` -- (optional) list of dictionaries of text attributes

    - ``origin`` -- (optional) :class:`~mcpzones.geometry.GeoPoint`, the
      projection origin when the poles were read as WGS84 longitude/latitude

    - ``warnings`` -- (optional) list of validation messages recorded at load time

    EXAMPLES::

        >>> from mcpzones.territory import PoleSet
        >>> P = PoleSet(['P1', 'P2'], [(0, 0), (30, 40)]); P
        A PoleSet of n = 2 poles
        >>> P[1]
        Pole(pole_id='P2', location=Point2D(x=30.0, y=40.0), metadata={})
        >>> P.ordinal('P2')
        1

    TESTS::

        >>> PoleSet(['P1', 'P1'], [(0, 0), (1, 1)])
        Traceback (most recent call last):
        ...
        ValueError: duplicate pole_id 'P1'
        >>> PoleSet(['P1'], [(0, float('nan'))])
        Traceback (most recent call last):
        ...
        ValueError: pole 'P1' has non-finite coordinates
    """
    def __init__(self, pole_ids, coords, metadata=None, origin=None, warnings=None):
        ids = [str(p) for p in pole_ids]
        coords = np.array(coords, dtype=np.float64).reshape(-1, 2)
        if len(coords) != len(ids):
            raise ValueError("got %s pole ids but %s coordinates" % (len(ids), len(coords)))
        bad = np.flatnonzero(~np.all(np.isfinite(coords), axis=1))
        if len(bad):
            raise ValueError("pole %r has non-finite coordinates" % ids[bad[0]])
        dup = _duplicates(ids)
        if dup is not None:
            raise ValueError("duplicate pole_id %r" % dup)
        coords.setflags(write=False)
        self._ids = ids
        self._coords = coords
        self._metadata = [dict(m) for m in metadata] if metadata is not None else [{} for _ in ids]
        self._index = {key: i for i, key in enumerate(ids)}
        self._origin = GeoPoint(*origin) if origin is not None else None
        self._warnings = list(warnings or [])

    def __repr__(self):
        return "A PoleSet of n = %s poles" % len(self._ids)

    def __len__(self):
        return len(self._ids)

    def __getitem__(self, i):
        x, y = self._coords[i]
        return Pole(self._ids[i], Point2D(x, y), self._metadata[i])

    def __iter__(self):
        for i in range(len(self._ids)):
            yield self[i]

    def ids(self):
        """
        Get the pole identifiers in ordinal order.
        """
        return list(self._ids)

    def coords(self):
        """
        Get the planar coordinates as a read-only `(n, 2)` array.
        """
        return self._coords

    def metadata(self, i):
        """
        Get the attribute table of the pole with ordinal ``i``.
        """
        return self._metadata[i]

    def ordinal(self, pole_id):
        """
        Get the ordinal of a pole from its identifier.
        """
        return self._index[pole_id]

    def origin(self):
        """
        Get the projection origin, or ``None`` for planar sources.
        """
        return self._origin

    def warnings(self):
        """
        Get the validation messages recorded when the set was built.
        """
        return list(self._warnings)

class WireSet(object):
    r"""
    An ordered collection of overhead wire segments.

    INPUT:

    - ``wire_ids`` -- sequence of unique identifiers

    - ``circuit_ids`` -- sequence of circuit identifiers; surrounding whitespace
      is removed and empty identifiers are rejected

    - ``geometries`` -- sequence of shapely ``LineString`` objects or vertex
      arrays, in planar meters

    - ``lengths`` -- (optional) stated lengths in meters, ``nan`` when absent.
      A stated length that disagrees with the geometry by more than 1% is
      replaced by the geometric one and a warning is recorded.

    - ``ampacities`` -- (optional) amperes, ``nan`` when absent

    - ``declared_pole_ids`` -- (optional) list of pole id tuples, one per wire

    - ``origin`` -- (optional) projection origin of WGS84 sources

    - ``warnings`` -- (optional) messages recorded at load time

    EXAMPLES::

        >>> from mcpzones.territory import WireSet
        >>> W = WireSet(['W1', 'W2'], ['CKT-A', ' CKT-B '], [[(0, 0), (10, 0)], [(0, 5), (4, 5), (4, 9)]])
        >>> W
        A WireSet of n = 2 wire segments on 2 circuits
        >>> W.circuit_ids()
        ['CKT-A', 'CKT-B']
        >>> W.centroids().tolist()
        [[5.0, 0.0], [4.0, 5.0]]
        >>> W[1].length
        8.0

    A stated length off by more than 1% is replaced::

        >>> W = WireSet(['W1'], ['A'], [[(0, 0), (100, 0)]], lengths=[120.0])
        >>> W.lengths().tolist(), W.warnings()
        ([100.0], ["wire 'W1': stated length 120.000 m differs from geometry 100.000 m by more than 1%"])

    TESTS::

        >>> WireSet(['W1'], [''], [[(0, 0), (1, 0)]])
        Traceback (most recent call last):
        ...
        ValueError: wire 'W1' has no circuit_id
        >>> WireSet(['W1'], ['A'], [[(0, 0), (0, 0)]])
        Traceback (most recent call last):
        ...
        ValueError: wire 'W1' has degenerate geometry (fewer than 2 distinct vertices)
        >>> WireSet(['W1', 'W1'], ['A', 'B'], [[(0, 0), (1, 0)], [(0, 1), (1, 1)]])
        Traceback (most recent call last):
        ...
        ValueError: duplicate wire_id 'W1'
    """
    def __init__(self, wire_ids, circuit_ids, geometries, lengths=None, ampacities=None,
                 declared_pole_ids=None, origin=None, warnings=None):
        ids = [str(w) for w in wire_ids]
        circuits = [str(c).strip() for c in circuit_ids]
        if len(circuits) != len(ids) or len(geometries) != len(ids):
            raise ValueError("wire ids, circuit ids and geometries differ in length")
        for wire_id, circuit in zip(ids, circuits):
            if not circuit:
                raise ValueError("wire %r has no circuit_id" % wire_id)
        dup = _duplicates(ids)
        if dup is not None:
            raise ValueError("duplicate wire_id %r" % dup)

        geoms = np.empty(len(ids), dtype=object)
        for i, g in enumerate(geometries):
            coords = shapely.get_coordinates(g) if isinstance(g, shapely.Geometry) else g
            coords = clean_vertices(coords)
            if len(coords) < 2:
                raise ValueError("wire %r has degenerate geometry (fewer than 2 distinct vertices)" % ids[i])
            if not np.all(np.isfinite(coords)):
                raise ValueError("wire %r has non-finite coordinates" % ids[i])
            geoms[i] = shapely.LineString(coords)

        self._warnings = list(warnings or [])
        geometric = shapely.length(geoms).astype(np.float64) if len(ids) else np.zeros(0)
        stated = np.full(len(ids), np.nan) if lengths is None else np.array(lengths, dtype=np.float64)
        for i in np.flatnonzero(np.isfinite(stated)):
            if abs(stated[i] - geometric[i]) > LENGTH_TOLERANCE * geometric[i]:
                message = ("wire %r: stated length %.3f m differs from geometry %.3f m by more than 1%%"
                           % (ids[i], stated[i], geometric[i]))
                logger.warning(message)
                self._warnings.append(message)
                stated[i] = geometric[i]
        missing = ~np.isfinite(stated)
        stated[missing] = geometric[missing]

        self._ids = ids
        self._circuits = circuits
        self._geoms = geoms
        self._lengths = stated
        self._ampacities = (np.full(len(ids), np.nan) if ampacities is None
                            else np.array(ampacities, dtype=np.float64))
        self._declared = ([tuple(str(p) for p in d) if d else () for d in declared_pole_ids]
                          if declared_pole_ids is not None else [() for _ in ids])
        self._index = {key: i for i, key in enumerate(ids)}
        self._origin = GeoPoint(*origin) if origin is not None else None
        self._centroids = None
        for a in (self._lengths, self._ampacities):
            a.setflags(write=False)

    def __repr__(self):
        return "A WireSet of n = %s wire segments on %s circuits" % (len(self._ids), len(set(self._circuits)))

    def __len__(self):
        return len(self._ids)

    def __getitem__(self, i):
        ampacity = self._ampacities[i]
        return WireSegment(self._ids[i], self._circuits[i],
                           Polyline(shapely.get_coordinates(self._geoms[i])),
                           float(self._lengths[i]),
                           None if math.isnan(ampacity) else float(ampacity),
                           self._declared[i])

    def __iter__(self):
        for i in range(len(self._ids)):
            yield self[i]

    def ids(self):
        """
        Get the wire identifiers in ordinal order.
        """
        return list(self._ids)

    def circuit_ids(self):
        """
        Get the circuit identifier of every wire, in ordinal order.
        """
        return list(self._circuits)

    def geometries(self):
        """
        Get the geometries as an array of shapely ``LineString`` objects.
        """
        return self._geoms

    def lengths(self):
        """
        Get the lengths in meters.
        """
        return self._lengths

    def ampacities(self):
        """
        Get the ampacities in amperes, ``nan`` where absent.
        """
        return self._ampacities

    def declared_pole_ids(self, i):
        """
        Get the pole ids declared by the wire with ordinal ``i``.
        """
        return self._declared[i]

    def ordinal(self, wire_id):
        """
        Get the ordinal of a wire from its identifier.
        """
        return self._index[wire_id]

    def origin(self):
        """
        Get the projection origin, or ``None`` for planar sources.
        """
        return self._origin

    def warnings(self):
        """
        Get the validation messages recorded when the set was built.
        """
        return list(self._warnings)

    def centroids(self):
        """
        Get the half-arc-length point of every wire as an `(n, 2)` array.
        """
        if self._centroids is None:
            if len(self._ids):
                points = shapely.line_interpolate_point(self._geoms, 0.5, normalized=True)
                centroids = shapely.get_coordinates(points)
            else:
                centroids = np.zeros((0, 2))
            centroids.setflags(write=False)
            self._centroids = centroids
        return self._centroids
