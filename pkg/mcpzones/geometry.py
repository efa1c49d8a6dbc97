r"""
Planar geometry primitives.

All lengths are planar meters. Geographic inputs are brought to the plane with
a local equirectangular projection about a dataset origin.

Types
~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~Point2D`     | Planar point `(x, y)` in meters
    :class:`~GeoPoint`    | WGS84 longitude and latitude in degrees
    :class:`~Polyline`    | Ordered vertex list with at least two vertices

Measures
~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~euclidean_distance`    | Euclidean distance between two planar points
    :func:`~distances_from`        | Vectorized Euclidean distances from one point to many
    :func:`~polyline_arc_length`   | Sum of the edge lengths of a polyline
    :func:`~polyline_midpoint`     | Point at half the arc length of a polyline
    :func:`~polyline_distance`     | Distance from a point to the nearest point of a polyline
    :func:`~convex_hull`           | Counterclockwise convex hull ring

Projection
~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~project_to_plane`       | Local equirectangular projection of a GeoPoint
    :func:`~unproject_from_plane`   | Inverse of :func:`project_to_plane`
    :func:`~project_lonlat`         | Vectorized projection of an array of lon/lat pairs
    :func:`~unproject_xy`           | Vectorized inverse projection
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

import math
from collections import namedtuple

import numpy as np

import shapely
from shapely.geometry import LineString, MultiPoint, Point
from shapely.geometry.polygon import orient

# mean Earth radius, meters
EARTH_RADIUS_M = 6371000.0

# the projection is refused at or beyond this absolute latitude
MAX_PROJECTION_LATITUDE = 89.0

#===============================================
# Types
#===============================================

class Point2D(namedtuple('Point2D', ['x', 'y'])):
    r"""
    A planar point, easting ``x`` and northing ``y`` in meters.

    EXAMPLES::

        >>> from mcpzones.geometry import Point2D
        >>> Point2D(3, 4)
        Point2D(x=3.0, y=4.0)
        >>> Point2D(float('nan'), 0)
        Traceback (most recent call last):
        ...
        ValueError: coordinates must be finite, got (nan, 0.0)
    """
    __slots__ = ()

    def __new__(cls, x, y):
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("coordinates must be finite, got (%r, %r)" % (x, y))
        return super(Point2D, cls).__new__(cls, x, y)

class GeoPoint(namedtuple('GeoPoint', ['lon', 'lat'])):
    r"""
    A WGS84 position in degrees.

    EXAMPLES::

        >>> from mcpzones.geometry import GeoPoint
        >>> GeoPoint(-72.5, 41.75)
        GeoPoint(lon=-72.5, lat=41.75)
        >>> GeoPoint(0, 91)
        Traceback (most recent call last):
        ...
        ValueError: latitude 91.0 outside [-90, 90]
    """
    __slots__ = ()

    def __new__(cls, lon, lat):
        lon, lat = float(lon), float(lat)
        if not -180.0 <= lon <= 180.0:
            raise ValueError("longitude %r outside [-180, 180]" % lon)
        if not -90.0 <= lat <= 90.0:
            raise ValueError("latitude %r outside [-90, 90]" % lat)
        return super(GeoPoint, cls).__new__(cls, lon, lat)

def clean_vertices(coords):
    r"""
    Drop consecutive repeated vertices from an `(n, 2)` coordinate array.

    EXAMPLES::

        >>> from mcpzones.geometry import clean_vertices
        >>> clean_vertices([(0, 0), (0, 0), (1, 0), (1, 0), (1, 1)]).tolist()
        [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]
    """
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    if len(coords) < 2:
        return coords
    keep = np.ones(len(coords), dtype=bool)
    keep[1:] = np.any(coords[1:] != coords[:-1], axis=1)
    return coords[keep]

class Polyline(object):
    r"""
    An ordered list of at least two planar vertices.

    INPUT:

    - ``vertices`` -- sequence of `(x, y)` pairs or an `(n, 2)` array

    - ``check`` -- (default: ``True``) validate the vertex count, finiteness and
      the absence of consecutive repeated vertices. Degenerate hull rings are
      built with ``check=False``.

    EXAMPLES::

        >>> from mcpzones.geometry import Polyline
        >>> P = Polyline([(0, 0), (3, 4)]); P
        A Polyline with n = 2 vertices
        >>> P.vertices()
        [Point2D(x=0.0, y=0.0), Point2D(x=3.0, y=4.0)]

    TESTS::

        >>> Polyline([(0, 0)])
        Traceback (most recent call last):
        ...
        ValueError: a polyline needs at least 2 vertices, got 1
        >>> Polyline([(0, 0), (0, 0), (1, 1)])
        Traceback (most recent call last):
        ...
        ValueError: consecutive vertices 0 and 1 are identical
    """
    def __init__(self, vertices, check=True):
        coords = np.array(vertices, dtype=np.float64).reshape(-1, 2)
        if check:
            if len(coords) < 2:
                raise ValueError("a polyline needs at least 2 vertices, got %s" % len(coords))
            if not np.all(np.isfinite(coords)):
                raise ValueError("polyline vertices must be finite")
            repeated = np.flatnonzero(np.all(coords[1:] == coords[:-1], axis=1))
            if len(repeated):
                i = int(repeated[0])
                raise ValueError("consecutive vertices %s and %s are identical" % (i, i + 1))
        coords.setflags(write=False)
        self._coords = coords

    def __repr__(self):
        return "A Polyline with n = %s vertices" % len(self._coords)

    def __len__(self):
        return len(self._coords)

    def __eq__(self, other):
        return isinstance(other, Polyline) and np.array_equal(self._coords, other._coords)

    def __hash__(self):
        return hash(self._coords.tobytes())

    def coords(self):
        """
        Get the vertices as a read-only `(n, 2)` array.
        """
        return self._coords

    def vertices(self):
        """
        Get the vertices as a list of :class:`Point2D`.
        """
        return [Point2D(x, y) for x, y in self._coords]

    def is_closed(self):
        """
        Whether the first and last vertices coincide.
        """
        return bool(np.array_equal(self._coords[0], self._coords[-1]))

    def to_linestring(self):
        """
        Get the polyline as a shapely ``LineString``.
        """
        return LineString(self._coords)

#===============================================
# Distances and measures
#===============================================

def euclidean_distance(a, b):
    r"""
    Euclidean distance between two planar points.

    The squared differences are summed before the square root, exactly as in
    :func:`distances_from`, so scalar and vectorized distances agree bit for bit.

    EXAMPLES::

        >>> from mcpzones.geometry import euclidean_distance
        >>> euclidean_distance((0, 0), (3, 4))
        5.0
        >>> euclidean_distance((7, -2), (7, -2))
        0.0
        >>> euclidean_distance((12.5, 8.0), (-3.5, 20.0))
        20.0

    TESTS:

    Symmetry and the triangle inequality on random triples::

        >>> import numpy as np
        >>> rng = np.random.default_rng(1)
        >>> ok = True
        >>> for a, b, c in rng.uniform(-1e4, 1e4, size=(500, 3, 2)):
        ...     ab, bc, ac = euclidean_distance(a, b), euclidean_distance(b, c), euclidean_distance(a, c)
        ...     ok &= ab == euclidean_distance(b, a)
        ...     ok &= ac <= ab + bc + 1e-9
        >>> bool(ok)
        True
    """
    dx = float(a[0]) - float(b[0])
    dy = float(a[1]) - float(b[1])
    return math.sqrt(dx * dx + dy * dy)

def distances_from(query, coords):
    r"""
    Euclidean distances from ``query`` to every row of an `(n, 2)` array.

    EXAMPLES::

        >>> from mcpzones.geometry import distances_from
        >>> distances_from((0, 0), [(3, 4), (0, 1)]).tolist()
        [5.0, 1.0]
    """
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    dx = coords[:, 0] - float(query[0])
    dy = coords[:, 1] - float(query[1])
    return np.sqrt(dx * dx + dy * dy)

def _as_polyline(p):
    return p if isinstance(p, Polyline) else Polyline(p)

def polyline_arc_length(p):
    r"""
    Sum of the consecutive-vertex distances of a polyline.

    EXAMPLES::

        >>> from mcpzones.geometry import Polyline, polyline_arc_length
        >>> polyline_arc_length(Polyline([(0, 0), (3, 4)]))
        5.0
        >>> polyline_arc_length(Polyline([(0, 0), (1, 0), (1, 1)]))
        2.0

    TESTS:

    Agreement with an edge-by-edge sum, and invariance under inserting a
    vertex on an existing edge::

        >>> import numpy as np
        >>> from mcpzones.geometry import euclidean_distance
        >>> rng = np.random.default_rng(3)
        >>> V = rng.uniform(0, 100, size=(10, 2))
        >>> edges = sum(euclidean_distance(V[i], V[i + 1]) for i in range(9))
        >>> abs(polyline_arc_length(Polyline(V)) - edges) <= 1e-9 * edges
        True
        >>> W = np.insert(V, 4, 0.25 * V[3] + 0.75 * V[4], axis=0)
        >>> abs(polyline_arc_length(Polyline(W)) - edges) <= 1e-9 * edges
        True
    """
    return float(shapely.length(_as_polyline(p).to_linestring()))

def polyline_midpoint(p):
    r"""
    The point at exactly half the arc length along a polyline.

    This is the centroid used for wire segments: unlike the vertex mean, it does
    not move when a GIS export densifies part of a line.

    EXAMPLES::

        >>> from mcpzones.geometry import Polyline, polyline_midpoint
        >>> polyline_midpoint(Polyline([(0, 0), (10, 0)]))
        Point2D(x=5.0, y=0.0)
        >>> polyline_midpoint(Polyline([(0, 0), (4, 0), (4, 4)]))
        Point2D(x=4.0, y=0.0)

    TESTS:

    The midpoint lies on the line and splits it in two equal halves::

        >>> import numpy as np
        >>> rng = np.random.default_rng(5)
        >>> P = Polyline(np.cumsum(rng.uniform(1, 10, size=(12, 2)), axis=0))
        >>> line = P.to_linestring()
        >>> m = polyline_midpoint(P)
        >>> line.distance(shapely.Point(m)) < 1e-9
        True
        >>> bool(abs(line.project(shapely.Point(m)) - line.length / 2) <= 1e-9 * line.length)
        True
    """
    point = shapely.line_interpolate_point(_as_polyline(p).to_linestring(), 0.5, normalized=True)
    return Point2D(point.x, point.y)

def polyline_distance(point, p):
    r"""
    Distance from a planar point to the nearest point of a polyline.

    EXAMPLES::

        >>> from mcpzones.geometry import Polyline, polyline_distance
        >>> polyline_distance((5, 3), Polyline([(0, 0), (10, 0)]))
        3.0
        >>> polyline_distance((13, 4), Polyline([(0, 0), (10, 0)]))
        5.0
    """
    return float(shapely.distance(Point(float(point[0]), float(point[1])),
                                  _as_polyline(p).to_linestring()))

def convex_hull(points):
    r"""
    Counterclockwise convex hull of a set of planar points, as a closed ring.

    Degenerate inputs give degenerate rings: a single point gives the point
    twice, collinear points give the extreme segment closed back on itself.

    INPUT:

    - ``points`` -- non-empty sequence of `(x, y)` pairs

    OUTPUT:

    A :class:`Polyline` whose first and last vertices coincide.

    EXAMPLES::

        >>> from mcpzones.geometry import convex_hull
        >>> ring = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
        >>> ring.is_closed(), len(ring) - 1
        (True, 4)
        >>> (0.5, 0.5) in ring.vertices()
        False
        >>> shapely.Polygon(ring.coords()).exterior.is_ccw
        True
        >>> convex_hull([(2, 3)]).vertices()
        [Point2D(x=2.0, y=3.0), Point2D(x=2.0, y=3.0)]
        >>> ring = convex_hull([(0, 0), (1, 1), (2, 2)])
        >>> len(ring), sorted(set(ring.vertices()))
        (3, [Point2D(x=0.0, y=0.0), Point2D(x=2.0, y=2.0)])

    TESTS:

    Every input point is inside or on the hull::

        >>> import numpy as np
        >>> rng = np.random.default_rng(11)
        >>> pts = rng.uniform(-100, 100, size=(50, 2))
        >>> hull = shapely.Polygon(convex_hull(pts).coords())
        >>> max(hull.distance(shapely.Point(p)) for p in pts) <= 1e-9
        True
        >>> convex_hull([])
        Traceback (most recent call last):
        ...
        ValueError: convex hull of an empty point set
    """
    coords = np.asarray([tuple(p) for p in points], dtype=np.float64).reshape(-1, 2)
    if len(coords) == 0:
        raise ValueError("convex hull of an empty point set")
    hull = MultiPoint(coords).convex_hull
    if hull.geom_type == 'Polygon':
        ring = np.asarray(orient(hull, sign=1.0).exterior.coords)
    elif hull.geom_type == 'LineString':
        line = np.asarray(hull.coords)
        ring = np.array([line[0], line[-1], line[0]])
    else:
        ring = np.array([coords[0], coords[0]])
    return Polyline(ring, check=False)

#===============================================
# Projection
#===============================================

def _check_latitude(lat):
    if abs(lat) >= MAX_PROJECTION_LATITUDE:
        raise ValueError("latitude %r is too close to a pole for the planar projection" % lat)

def project_to_plane(g, origin):
    r"""
    Project a GeoPoint onto the plane tangent at ``origin``.

    The projection is the local equirectangular one,
    `x = R \Delta\lambda \cos\varphi_0` and `y = R \Delta\varphi`, with `R`
    the mean Earth radius and angles in radians. It is exact at the origin.

    INPUT:

    - ``g`` -- GeoPoint to project

    - ``origin`` -- GeoPoint, the projection origin

    EXAMPLES::

        >>> from mcpzones.geometry import GeoPoint, project_to_plane
        >>> o = GeoPoint(-72.7, 41.7)
        >>> project_to_plane(o, o)
        Point2D(x=0.0, y=0.0)
        >>> p = project_to_plane(GeoPoint(0, 0.001), GeoPoint(0, 0))
        >>> p.x, round(p.y, 2)
        (0.0, 111.19)
        >>> project_to_plane(GeoPoint(-72.8, 41.7), o).x < 0
        True

    TESTS::

        >>> project_to_plane(GeoPoint(0, 89.5), GeoPoint(0, 0))
        Traceback (most recent call last):
        ...
        ValueError: latitude 89.5 is too close to a pole for the planar projection
    """
    g, origin = GeoPoint(*g), GeoPoint(*origin)
    _check_latitude(g.lat)
    _check_latitude(origin.lat)
    x = EARTH_RADIUS_M * math.radians(g.lon - origin.lon) * math.cos(math.radians(origin.lat))
    y = EARTH_RADIUS_M * math.radians(g.lat - origin.lat)
    return Point2D(x, y)

def unproject_from_plane(p, origin):
    r"""
    Inverse of :func:`project_to_plane`.

    EXAMPLES::

        >>> from mcpzones.geometry import GeoPoint, project_to_plane, unproject_from_plane
        >>> o = GeoPoint(-73.0, 41.2)
        >>> g = GeoPoint(-72.91, 41.33)
        >>> back = unproject_from_plane(project_to_plane(g, o), o)
        >>> abs(back.lon - g.lon) < 1e-9 and abs(back.lat - g.lat) < 1e-9
        True
    """
    origin = GeoPoint(*origin)
    _check_latitude(origin.lat)
    lon = origin.lon + math.degrees(float(p[0]) / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat))))
    lat = origin.lat + math.degrees(float(p[1]) / EARTH_RADIUS_M)
    return GeoPoint(lon, lat)

def project_lonlat(lonlat, origin):
    r"""
    Vectorized :func:`project_to_plane` for an `(n, 2)` array of lon/lat pairs.

    EXAMPLES::

        >>> from mcpzones.geometry import GeoPoint, project_lonlat, project_to_plane
        >>> o = GeoPoint(-72.7, 41.7)
        >>> xy = project_lonlat([(-72.69, 41.71)], o)
        >>> bool(abs(xy[0, 0] - project_to_plane(GeoPoint(-72.69, 41.71), o).x) < 1e-6)
        True
    """
    origin = GeoPoint(*origin)
    _check_latitude(origin.lat)
    lonlat = np.asarray(lonlat, dtype=np.float64).reshape(-1, 2)
    if len(lonlat) and np.max(np.abs(lonlat[:, 1])) >= MAX_PROJECTION_LATITUDE:
        _check_latitude(float(np.max(np.abs(lonlat[:, 1]))))
    x = EARTH_RADIUS_M * np.radians(lonlat[:, 0] - origin.lon) * math.cos(math.radians(origin.lat))
    y = EARTH_RADIUS_M * np.radians(lonlat[:, 1] - origin.lat)
    return np.column_stack([x, y])

def unproject_xy(xy, origin):
    r"""
    Vectorized :func:`unproject_from_plane` for an `(n, 2)` array.

    EXAMPLES::

        >>> import numpy as np
        >>> from mcpzones.geometry import GeoPoint, project_lonlat, unproject_xy
        >>> o = GeoPoint(-72.7, 41.7)
        >>> ll = np.array([(-72.69, 41.71), (-72.75, 41.66)])
        >>> bool(np.allclose(unproject_xy(project_lonlat(ll, o), o), ll, rtol=0, atol=1e-9))
        True
    """
    origin = GeoPoint(*origin)
    _check_latitude(origin.lat)
    xy = np.asarray(xy, dtype=np.float64).reshape(-1, 2)
    lon = origin.lon + np.degrees(xy[:, 0] / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat))))
    lat = origin.lat + np.degrees(xy[:, 1] / EARTH_RADIUS_M)
    return np.column_stack([lon, lat])
