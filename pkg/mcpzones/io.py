r"""
Input/output functions: pole and wire layers, zone reports, factor tables.

Load layers
~~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~load_poles`    | Read and validate a pole layer from GeoJSON or CSV
    :func:`~load_wires`    | Read and validate a wire-segment layer from GeoJSON or CSV
    :func:`~load_factors`  | Read the per-zone prioritization factor table

Export layers and reports
~~~~~~~~~~~~~~~~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~write_poles_geojson`       | Write a PoleSet as a GeoJSON FeatureCollection
    :func:`~write_poles_csv`           | Write a PoleSet as CSV
    :func:`~write_wires_geojson`       | Write a WireSet as a GeoJSON FeatureCollection
    :func:`~write_wires_csv`           | Write a WireSet as CSV with WKT geometries
    :func:`~export_associations_csv`   | Debug dump of inferred pole-to-wire associations
    :func:`~export_mcps_csv`           | Debug dump of detected multi-circuit poles
    :func:`~export_zones_geojson`      | Risk zones as hull features
    :func:`~export_zones_csv`          | Risk-zone summary table
    :func:`~read_zones_csv`            | Read a risk-zone summary table back
    :func:`~export_histogram_csv`      | Zone length histogram
    :func:`~export_ranking_csv`        | Prioritized zone ranking
    :func:`~write_json`                | Deterministic JSON document

GeoJSON sources are read as WGS84 longitude/latitude and CSV sources as planar
meters unless ``crs`` says otherwise. WGS84 layers are projected about the
dataset centroid (see :func:`~mcpzones.geometry.project_to_plane`).

Validation is strict by default: the first invalid record raises
:class:`IngestError` naming the record. With ``lenient=True`` invalid records
are logged, skipped and listed in the set's ``warnings()``.
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
import os

import numpy as np
import pandas as pd
import shapely
from shapely.errors import GEOSException

from mcpzones.geometry import (MAX_PROJECTION_LATITUDE, GeoPoint, clean_vertices,
                               project_lonlat, unproject_xy)
from mcpzones.prioritize import FACTORS
from mcpzones.territory import PoleSet, WireSet
from mcpzones.utils import format_float

logger = logging.getLogger(__name__)

FORMATS = ('geojson', 'csv')
CRS_CHOICES = ('planar', 'wgs84')

class IngestError(ValueError):
    r"""
    An input layer could not be read; ``record_id`` names the offending record
    when there is one.
    """
    def __init__(self, message, record_id=None):
        super(IngestError, self).__init__(message)
        self.record_id = record_id

#===============================================
# Helpers
#===============================================

def _format_of(path, fmt):
    if fmt is None:
        ext = os.path.splitext(str(path))[1].lower()
        if ext in ('.geojson', '.json'):
            return 'geojson'
        if ext == '.csv':
            return 'csv'
        raise IngestError("cannot infer the format of %s; pass 'geojson' or 'csv'" % path)
    if fmt not in FORMATS:
        raise IngestError("unsupported format %r, expected one of %s" % (fmt, ", ".join(FORMATS)))
    return fmt

def _crs_of(fmt, crs):
    if crs is None:
        return 'wgs84' if fmt == 'geojson' else 'planar'
    if crs not in CRS_CHOICES:
        raise IngestError("unsupported crs %r, expected one of %s" % (crs, ", ".join(CRS_CHOICES)))
    return crs

class _Rejects(object):
    """
    Strict mode raises on the first invalid record, lenient mode logs and counts.
    """
    def __init__(self, layer, lenient):
        self.layer = layer
        self.lenient = lenient
        self.messages = []

    def __call__(self, record_id, message):
        text = "%s record %r: %s" % (self.layer, record_id, message)
        if not self.lenient:
            raise IngestError(text, record_id)
        logger.warning("skipping %s", text)
        self.messages.append("skipped " + text)

def _read_feature_collection(path):
    with open(path, encoding='utf-8-sig') as f:
        doc = json.load(f)
    if not isinstance(doc, dict) or doc.get('type') != 'FeatureCollection':
        raise IngestError("%s is not a GeoJSON FeatureCollection" % path)
    return doc.get('features') or []

def _read_table(path, required):
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8-sig')
    df.columns = [c.strip() for c in df.columns]
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise IngestError("%s is missing required column(s): %s" % (path, ", ".join(missing)))
    return df

def _to_float(value):
    """
    Parse an optional numeric attribute; blank gives ``nan``, garbage raises.
    """
    if value is None:
        return math.nan
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    return float(text) if text else math.nan

def _check_lonlat(coords):
    coords = np.asarray(coords, dtype=np.float64)
    if np.any(np.abs(coords[:, 0]) > 180.0):
        return "longitude outside [-180, 180]"
    if np.any(np.abs(coords[:, 1]) >= MAX_PROJECTION_LATITUDE):
        return "latitude outside (-89, 89)"
    return None

def _split_ids(value):
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(str(v).strip() for v in value if str(v).strip())
    return tuple(v.strip() for v in str(value).split(';') if v.strip())

#===============================================
# Poles
#===============================================

def load_poles(path, fmt=None, crs=None, lenient=False):
    r"""
    Read and validate a pole layer.

    INPUT:

    - ``path`` -- file name of a GeoJSON FeatureCollection of ``Point``
      features with a ``pole_id`` property, or of a CSV file with header
      ``pole_id,x,y[,...]``

    - ``fmt`` -- (optional) ``'geojson'`` or ``'csv'``; inferred from the file
      extension when omitted

    - ``crs`` -- (optional) ``'wgs84'`` (default for GeoJSON) or ``'planar'``
      (default for CSV)

    - ``lenient`` -- (default: ``False``) skip invalid records instead of failing

    OUTPUT:

    A :class:`~mcpzones.territory.PoleSet` whose ordinals follow the record
    order of the source. Extra properties or columns are kept as text metadata.

    EXAMPLES::

        >>> import json, os, tempfile
        >>> from mcpzones.io import load_poles
        >>> tmp = tempfile.mkdtemp()
        >>> path = os.path.join(tmp, 'poles.geojson')
        >>> points = [('P1', -72.700, 41.700), ('P2', -72.701, 41.700), ('P3', -72.700, 41.701)]
        >>> with open(path, 'w') as f:
        ...     json.dump({'type': 'FeatureCollection', 'features': [
        ...         {'type': 'Feature', 'properties': {'pole_id': p, 'material': 'wood'},
        ...          'geometry': {'type': 'Point', 'coordinates': [x, y]}} for p, x, y in points]}, f)
        >>> P = load_poles(path); P
        A PoleSet of n = 3 poles
        >>> P.metadata(0), P.origin() is not None
        ({'material': 'wood'}, True)

    Planar distances of a projected source agree with great-circle distances::

        >>> import numpy as np
        >>> def haversine(a, b):
        ...     l1, p1, l2, p2 = map(np.radians, (a[0], a[1], b[0], b[1]))
        ...     h = np.sin((p2 - p1) / 2)**2 + np.cos(p1) * np.cos(p2) * np.sin((l2 - l1) / 2)**2
        ...     return 2 * 6371000.0 * np.arcsin(np.sqrt(h))
        >>> rng = np.random.default_rng(0)
        >>> lonlat = np.column_stack([rng.uniform(-72.73, -72.67, 40), rng.uniform(41.68, 41.72, 40)])
        >>> with open(path, 'w') as f:
        ...     json.dump({'type': 'FeatureCollection', 'features': [
        ...         {'type': 'Feature', 'properties': {'pole_id': 'P%d' % i},
        ...          'geometry': {'type': 'Point', 'coordinates': [float(x), float(y)]}}
        ...         for i, (x, y) in enumerate(lonlat)]}, f)
        >>> xy = load_poles(path).coords()
        >>> worst = max(abs(np.hypot(*(xy[i] - xy[j])) / haversine(lonlat[i], lonlat[j]) - 1)
        ...             for i in range(40) for j in range(i + 1, 40))
        >>> bool(worst < 1e-3)
        True

    A repeated identifier is reported by name::

        >>> csv_path = os.path.join(tmp, 'poles.csv')
        >>> with open(csv_path, 'w') as f:
        ...     _ = f.write('pole_id,x,y\nA,0,0\nB,10,0\nA,20,0\n')
        >>> load_poles(csv_path)
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: pole record 'A': duplicate pole_id
        >>> P = load_poles(csv_path, lenient=True); P
        A PoleSet of n = 2 poles
        >>> P.warnings()
        ["skipped pole record 'A': duplicate pole_id"]

    TESTS::

        >>> with open(csv_path, 'w') as f:
        ...     _ = f.write('pole_id,x,y\nA,0,zero\n')
        >>> load_poles(csv_path)
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: pole record 'A': missing or non-numeric coordinates
        >>> with open(path, 'w') as f:
        ...     json.dump({'type': 'FeatureCollection', 'features': [{'type': 'Feature',
        ...         'properties': {'pole_id': 'L1'},
        ...         'geometry': {'type': 'LineString', 'coordinates': [[0, 0], [1, 1]]}}]}, f)
        >>> load_poles(path)
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: pole record 'L1': unsupported geometry type 'LineString' (expected Point)
    """
    fmt = _format_of(path, fmt)
    crs = _crs_of(fmt, crs)
    reject = _Rejects('pole', lenient)
    records = []

    if fmt == 'geojson':
        for n, feature in enumerate(_read_feature_collection(path), 1):
            props = feature.get('properties') or {}
            pole_id = props.get('pole_id', feature.get('id'))
            pole_id = '' if pole_id is None else str(pole_id).strip()
            if not pole_id:
                reject('#%d' % n, "missing pole_id")
                continue
            geom = feature.get('geometry') or {}
            if geom.get('type') != 'Point':
                reject(pole_id, "unsupported geometry type %r (expected Point)" % geom.get('type'))
                continue
            meta = {str(k): str(v) for k, v in props.items() if k != 'pole_id' and v is not None}
            records.append((pole_id, (geom.get('coordinates') or [None, None])[:2], meta))
    else:
        df = _read_table(path, ('pole_id', 'x', 'y'))
        extra = [c for c in df.columns if c not in ('pole_id', 'x', 'y')]
        for n, row in enumerate(df.itertuples(index=False), 1):
            row = row._asdict() if hasattr(row, '_asdict') else dict(zip(df.columns, row))
            pole_id = str(row['pole_id']).strip()
            if not pole_id:
                reject('#%d' % n, "missing pole_id")
                continue
            meta = {c: row[c] for c in extra if row[c] != ''}
            records.append((pole_id, (row['x'], row['y']), meta))

    ids, coords, metadata, seen = [], [], [], set()
    for pole_id, xy, meta in records:
        try:
            x, y = float(xy[0]), float(xy[1])
        except (TypeError, ValueError, IndexError):
            reject(pole_id, "missing or non-numeric coordinates")
            continue
        if not (math.isfinite(x) and math.isfinite(y)):
            reject(pole_id, "non-finite coordinates")
            continue
        if crs == 'wgs84':
            problem = _check_lonlat([(x, y)])
            if problem:
                reject(pole_id, problem)
                continue
        if pole_id in seen:
            reject(pole_id, "duplicate pole_id")
            continue
        seen.add(pole_id)
        ids.append(pole_id)
        coords.append((x, y))
        metadata.append(meta)

    if not ids:
        raise IngestError("no valid pole records in %s" % path)
    coords = np.asarray(coords, dtype=np.float64)
    origin = None
    if crs == 'wgs84':
        origin = GeoPoint(float(np.mean(coords[:, 0])), float(np.mean(coords[:, 1])))
        coords = project_lonlat(coords, origin)
    logger.debug("read %s poles from %s", len(ids), path)
    return PoleSet(ids, coords, metadata, origin=origin, warnings=reject.messages)

def _pole_rows(poles):
    coords = poles.coords()
    if poles.origin() is not None:
        coords = unproject_xy(coords, poles.origin())
    return coords

def write_poles_geojson(poles, path):
    r"""
    Write a PoleSet as a GeoJSON FeatureCollection of ``Point`` features.

    WGS84 sets are written back as longitude/latitude, planar sets as meters.
    Coordinates are written at full precision.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.territory import PoleSet
        >>> from mcpzones.io import load_poles, write_poles_geojson
        >>> path = os.path.join(tempfile.mkdtemp(), 'poles.geojson')
        >>> P = PoleSet(['P1', 'P2'], [(0.125, -3.5), (1e5 / 3, 7.0)], [{'owner': 'utility'}, {}])
        >>> write_poles_geojson(P, path)
        >>> Q = load_poles(path, crs='planar')
        >>> Q.ids() == P.ids(), bool((Q.coords() == P.coords()).all()), Q.metadata(0)
        (True, True, {'owner': 'utility'})
    """
    coords = _pole_rows(poles)
    features = []
    for i, pole_id in enumerate(poles.ids()):
        properties = {'pole_id': pole_id}
        properties.update(poles.metadata(i))
        features.append({'type': 'Feature',
                         'geometry': {'type': 'Point', 'coordinates': [float(coords[i, 0]), float(coords[i, 1])]},
                         'properties': properties})
    _dump_json({'type': 'FeatureCollection', 'features': features}, path, indent=None)

def write_poles_csv(poles, path):
    r"""
    Write a PoleSet as CSV with header ``pole_id,x,y`` followed by the
    metadata columns in sorted order.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.territory import PoleSet
        >>> from mcpzones.io import load_poles, write_poles_csv
        >>> path = os.path.join(tempfile.mkdtemp(), 'poles.csv')
        >>> write_poles_csv(PoleSet(['P1'], [(2.5, 1e-3)], [{'height_ft': '40'}]), path)
        >>> print(open(path).read().strip())
        pole_id,x,y,height_ft
        P1,2.5,0.001,40
        >>> load_poles(path)[0]
        Pole(pole_id='P1', location=Point2D(x=2.5, y=0.001), metadata={'height_ft': '40'})
    """
    coords = _pole_rows(poles)
    extra = sorted({k for i in range(len(poles)) for k in poles.metadata(i)} - {'pole_id', 'x', 'y'})
    table = {'pole_id': poles.ids(),
             'x': [repr(float(v)) for v in coords[:, 0]],
             'y': [repr(float(v)) for v in coords[:, 1]]}
    for column in extra:
        table[column] = [poles.metadata(i).get(column, '') for i in range(len(poles))]
    _write_table(pd.DataFrame(table, columns=['pole_id', 'x', 'y'] + extra), path)

#===============================================
# Wires
#===============================================

def load_wires(path, fmt=None, crs=None, lenient=False, origin=None):
    r"""
    Read and validate an overhead wire-segment layer.

    INPUT:

    - ``path`` -- file name of a GeoJSON FeatureCollection of ``LineString``
      features with ``wire_id`` and ``circuit_id`` properties (optional
      ``length_m``, ``ampacity_a``, ``pole_ids``), or of a CSV file with
      columns ``wire_id,circuit_id,geometry_wkt`` (same optional columns;
      ``pole_ids`` separated by ``;``)

    - ``fmt``, ``crs``, ``lenient`` -- as in :func:`load_poles`

    - ``origin`` -- (optional) projection origin for WGS84 sources; pass the
      pole layer's ``origin()`` so that both layers share one plane. Defaults to
      the mean vertex of the wire layer.

    OUTPUT:

    A :class:`~mcpzones.territory.WireSet`. Missing lengths are computed from
    the geometry; stated lengths off by more than 1% are replaced, with a warning.

    EXAMPLES::

        >>> import json, os, tempfile
        >>> from mcpzones.io import load_wires
        >>> tmp = tempfile.mkdtemp()
        >>> path = os.path.join(tmp, 'wires.geojson')
        >>> def collection(*features):
        ...     return {'type': 'FeatureCollection', 'features': [
        ...         {'type': 'Feature', 'properties': props, 'geometry': {'type': kind, 'coordinates': xy}}
        ...         for props, kind, xy in features]}
        >>> with open(path, 'w') as f:
        ...     json.dump(collection(
        ...         ({'wire_id': 'W1', 'circuit_id': 'CKT-A'}, 'LineString', [[0, 0], [100, 0]]),
        ...         ({'wire_id': 'W2', 'circuit_id': 'CKT-B', 'length_m': 150.0}, 'LineString', [[0, 5], [100, 5]])), f)
        >>> W = load_wires(path, crs='planar'); W
        A WireSet of n = 2 wire segments on 2 circuits
        >>> W.lengths().tolist()
        [100.0, 100.0]
        >>> W.warnings()
        ["wire 'W2': stated length 150.000 m differs from geometry 100.000 m by more than 1%"]

    CSV sources carry WKT geometries::

        >>> csv_path = os.path.join(tmp, 'wires.csv')
        >>> with open(csv_path, 'w') as f:
        ...     _ = f.write('wire_id,circuit_id,geometry_wkt,pole_ids\n'
        ...                 'W1,A,"LINESTRING (0 0, 3 4)",P1;P2\n')
        >>> W = load_wires(csv_path)
        >>> W[0].length, W.declared_pole_ids(0)
        (5.0, ('P1', 'P2'))

    TESTS::

        >>> with open(path, 'w') as f:
        ...     json.dump(collection(({'wire_id': 'W1', 'circuit_id': 'A'}, 'LineString', [[0, 0]])), f)
        >>> load_wires(path, crs='planar')
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: wire record 'W1': degenerate geometry (fewer than 2 distinct vertices)
        >>> with open(path, 'w') as f:
        ...     json.dump(collection(({'wire_id': 'W1'}, 'LineString', [[0, 0], [1, 0]])), f)
        >>> load_wires(path, crs='planar')
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: wire record 'W1': missing circuit_id
        >>> with open(path, 'w') as f:
        ...     json.dump(collection(({'wire_id': 'W1', 'circuit_id': 'A'}, 'MultiLineString', [[[0, 0], [1, 0]]])), f)
        >>> load_wires(path, crs='planar')
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: wire record 'W1': unsupported geometry type 'MultiLineString' (multi-part wires must be pre-split)
    """
    fmt = _format_of(path, fmt)
    crs = _crs_of(fmt, crs)
    reject = _Rejects('wire', lenient)
    records = []

    if fmt == 'geojson':
        for n, feature in enumerate(_read_feature_collection(path), 1):
            props = feature.get('properties') or {}
            wire_id = props.get('wire_id', feature.get('id'))
            wire_id = '' if wire_id is None else str(wire_id).strip()
            if not wire_id:
                reject('#%d' % n, "missing wire_id")
                continue
            geom = feature.get('geometry') or {}
            kind = geom.get('type')
            if kind == 'MultiLineString':
                reject(wire_id, "unsupported geometry type 'MultiLineString' (multi-part wires must be pre-split)")
                continue
            if kind != 'LineString':
                reject(wire_id, "unsupported geometry type %r (expected LineString)" % kind)
                continue
            try:
                coords = np.array([c[:2] for c in geom.get('coordinates') or []], dtype=np.float64).reshape(-1, 2)
            except (TypeError, ValueError):
                reject(wire_id, "malformed coordinates")
                continue
            records.append((wire_id, props.get('circuit_id'), coords, props.get('length_m'),
                            props.get('ampacity_a'), props.get('pole_ids')))
    else:
        df = _read_table(path, ('wire_id', 'circuit_id', 'geometry_wkt'))
        for n, row in enumerate(df.to_dict('records'), 1):
            wire_id = str(row['wire_id']).strip()
            if not wire_id:
                reject('#%d' % n, "missing wire_id")
                continue
            try:
                geom = shapely.from_wkt(row['geometry_wkt'])
            except (GEOSException, ValueError, TypeError):
                reject(wire_id, "unreadable WKT geometry")
                continue
            if geom is None or geom.geom_type != 'LineString':
                kind = None if geom is None else geom.geom_type
                reject(wire_id, "unsupported geometry type %r (expected LineString)" % kind)
                continue
            records.append((wire_id, row['circuit_id'], shapely.get_coordinates(geom),
                            row.get('length_m'), row.get('ampacity_a'), row.get('pole_ids')))

    kept, seen = [], set()
    for wire_id, circuit, coords, length, ampacity, pole_ids in records:
        circuit = '' if circuit is None else str(circuit).strip()
        if not circuit:
            reject(wire_id, "missing circuit_id")
            continue
        coords = clean_vertices(coords)
        if len(coords) < 2:
            reject(wire_id, "degenerate geometry (fewer than 2 distinct vertices)")
            continue
        if not np.all(np.isfinite(coords)):
            reject(wire_id, "non-finite coordinates")
            continue
        if crs == 'wgs84':
            problem = _check_lonlat(coords)
            if problem:
                reject(wire_id, problem)
                continue
        try:
            length, ampacity = _to_float(length), _to_float(ampacity)
        except ValueError:
            reject(wire_id, "non-numeric length_m or ampacity_a")
            continue
        if wire_id in seen:
            reject(wire_id, "duplicate wire_id")
            continue
        seen.add(wire_id)
        kept.append((wire_id, circuit, coords, length, ampacity, _split_ids(pole_ids)))

    if not kept:
        raise IngestError("no valid wire records in %s" % path)
    geometries = [k[2] for k in kept]
    if crs == 'wgs84':
        stacked = np.concatenate(geometries)
        if origin is None:
            origin = GeoPoint(float(np.mean(stacked[:, 0])), float(np.mean(stacked[:, 1])))
        projected = project_lonlat(stacked, origin)
        splits = np.cumsum([len(g) for g in geometries])[:-1]
        geometries = np.split(projected, splits)
    else:
        origin = None
    logger.debug("read %s wire segments from %s", len(kept), path)
    return WireSet([k[0] for k in kept], [k[1] for k in kept], geometries,
                   lengths=[k[3] for k in kept], ampacities=[k[4] for k in kept],
                   declared_pole_ids=[k[5] for k in kept], origin=origin,
                   warnings=reject.messages)

def _wire_coords(wires):
    coords = [shapely.get_coordinates(g) for g in wires.geometries()]
    if wires.origin() is not None:
        coords = [unproject_xy(c, wires.origin()) for c in coords]
    return coords

def write_wires_geojson(wires, path):
    r"""
    Write a WireSet as a GeoJSON FeatureCollection of ``LineString`` features.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.territory import WireSet
        >>> from mcpzones.io import load_wires, write_wires_geojson
        >>> path = os.path.join(tempfile.mkdtemp(), 'wires.geojson')
        >>> W = WireSet(['W1'], ['A'], [[(0, 0), (2.5, 1 / 3)]], ampacities=[400], declared_pole_ids=[('P9',)])
        >>> write_wires_geojson(W, path)
        >>> V = load_wires(path, crs='planar')
        >>> V[0] == W[0]
        True
    """
    ids, circuits = wires.ids(), wires.circuit_ids()
    lengths, ampacities = wires.lengths(), wires.ampacities()
    features = []
    for i, coords in enumerate(_wire_coords(wires)):
        properties = {'wire_id': ids[i], 'circuit_id': circuits[i], 'length_m': float(lengths[i])}
        if math.isfinite(ampacities[i]):
            properties['ampacity_a'] = float(ampacities[i])
        if wires.declared_pole_ids(i):
            properties['pole_ids'] = list(wires.declared_pole_ids(i))
        features.append({'type': 'Feature',
                         'geometry': {'type': 'LineString', 'coordinates': coords.tolist()},
                         'properties': properties})
    _dump_json({'type': 'FeatureCollection', 'features': features}, path, indent=None)

def write_wires_csv(wires, path):
    r"""
    Write a WireSet as CSV with columns
    ``wire_id,circuit_id,geometry_wkt,length_m,ampacity_a,pole_ids``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.territory import WireSet
        >>> from mcpzones.io import write_wires_csv
        >>> path = os.path.join(tempfile.mkdtemp(), 'wires.csv')
        >>> write_wires_csv(WireSet(['W1'], ['A'], [[(0, 0), (3, 4)]]), path)
        >>> print(open(path).read().strip())
        wire_id,circuit_id,geometry_wkt,length_m,ampacity_a,pole_ids
        W1,A,"LINESTRING (0 0, 3 4)",5.0,,
    """
    wkt = [shapely.to_wkt(shapely.LineString(c), rounding_precision=-1) for c in _wire_coords(wires)]
    ampacity = wires.ampacities()
    table = pd.DataFrame({
        'wire_id': wires.ids(),
        'circuit_id': wires.circuit_ids(),
        'geometry_wkt': wkt,
        'length_m': [repr(float(v)) for v in wires.lengths()],
        'ampacity_a': ['' if math.isnan(a) else repr(float(a)) for a in ampacity],
        'pole_ids': [';'.join(wires.declared_pole_ids(i)) for i in range(len(wires))],
    })
    _write_table(table, path)

#===============================================
# Reports
#===============================================

def _write_table(df, path):
    df.to_csv(path, index=False, lineterminator='\n', encoding='utf-8')

def _dump_json(doc, path, indent=2, sort_keys=False):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(doc, f, indent=indent, sort_keys=sort_keys, allow_nan=False)
        f.write('\n')

def write_json(doc, path):
    r"""
    Write a JSON document with sorted keys and two-space indentation.
    """
    _dump_json(doc, path, indent=2, sort_keys=True)

def export_associations_csv(table, poles, wires, path):
    r"""
    Write every inferred association as ``pole_id,wire_id,circuit_id,distance_m``,
    by pole ordinal and then by association order.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.territory import PoleSet, WireSet
        >>> from mcpzones.association import associate
        >>> from mcpzones.io import export_associations_csv
        >>> P = PoleSet(['P1'], [(0, 0)])
        >>> W = WireSet(['W1', 'W2'], ['A', 'B'], [[(5, -5), (5, 5)], [(-10, 0), (-10, 20)]])
        >>> path = os.path.join(tempfile.mkdtemp(), 'associations.csv')
        >>> export_associations_csv(associate(P, W), P, W, path)
        >>> print(open(path).read().strip())
        pole_id,wire_id,circuit_id,distance_m
        P1,W1,A,5.000000
        P1,W2,B,14.142136
    """
    rows = []
    pole_ids = poles.ids()
    for i, entries in enumerate(table):
        for a in entries:
            rows.append((pole_ids[i], a.wire_id, a.circuit_id, format_float(a.distance)))
    _write_table(pd.DataFrame(rows, columns=['pole_id', 'wire_id', 'circuit_id', 'distance_m']), path)

def export_mcps_csv(mcps, path):
    r"""
    Write detected multi-circuit poles as ``pole_id,circuit_set`` with the
    circuits joined by ``;``.
    """
    rows = [(m.pole_id, m.circuits.label()) for m in mcps]
    _write_table(pd.DataFrame(rows, columns=['pole_id', 'circuit_set']), path)

def _hull_geometry(zone, origin, digits):
    ring = zone.hull.coords()
    if origin is not None:
        ring = unproject_xy(ring, origin)
    ring = [[round(float(x), digits), round(float(y), digits)] for x, y in ring]
    distinct = []
    for v in ring:
        if v not in distinct:
            distinct.append(v)
    if len(distinct) >= 3:
        return {'type': 'Polygon', 'coordinates': [ring]}
    if len(distinct) == 2:
        return {'type': 'LineString', 'coordinates': distinct}
    return {'type': 'Point', 'coordinates': distinct[0]}

def export_zones_geojson(zones, path, origin=None):
    r"""
    Write risk zones as a GeoJSON FeatureCollection of hull features.

    Zones whose hull is a segment are written as ``LineString`` features
    and the others as ``Polygon`` features. Properties are ``zone_id``,
    ``circuits``, ``extent_m``, ``extent_mi``, ``pole_count`` and ``pole_ids``.
    When ``origin`` is given, coordinates are converted back to WGS84.

    EXAMPLES::

        >>> import json, os, tempfile
        >>> from mcpzones.library import single_corridor
        >>> from mcpzones.synth import generate
        >>> from mcpzones.pipeline import zones_from_layers
        >>> poles, wires, truth = generate(single_corridor())
        >>> zones = zones_from_layers(poles, wires)
        >>> path = os.path.join(tempfile.mkdtemp(), 'zones.geojson')
        >>> export_zones_geojson(zones, path)
        >>> feature = json.load(open(path))['features'][0]
        >>> feature['geometry']['type'], feature['properties']['pole_count'], feature['properties']['extent_m']
        ('LineString', 10, 900.0)
    """
    digits = 9 if origin is not None else 6
    features = []
    for z in zones:
        features.append({
            'type': 'Feature',
            'geometry': _hull_geometry(z, origin, digits),
            'properties': {
                'zone_id': z.zone_id,
                'circuits': list(z.circuits),
                'extent_m': round(z.extent_m, 6),
                'extent_mi': round(z.extent_mi, 6),
                'pole_count': z.pole_count,
                'pole_ids': list(z.pole_ids),
            },
        })
    _dump_json({'type': 'FeatureCollection', 'features': features}, path, indent=2)

ZONE_COLUMNS = ['zone_id', 'circuits', 'pole_count', 'extent_m', 'extent_mi', 'centroid_x', 'centroid_y',
                'bbox_min_x', 'bbox_min_y', 'bbox_max_x', 'bbox_max_y', 'pole_ids']

def export_zones_csv(zones, path):
    r"""
    Write the risk-zone summary table, one row per zone, in zone order.

    Circuit and pole identifiers are joined with ``;``; coordinates are planar meters.
    """
    rows = []
    for z in zones:
        (x0, y0), (x1, y1) = z.bbox
        rows.append([z.zone_id, ';'.join(z.circuits), str(z.pole_count), format_float(z.extent_m),
                     format_float(z.extent_mi), format_float(z.centroid.x), format_float(z.centroid.y),
                     format_float(x0), format_float(y0), format_float(x1), format_float(y1),
                     ';'.join(z.pole_ids)])
    _write_table(pd.DataFrame(rows, columns=ZONE_COLUMNS), path)

def read_zones_csv(path):
    r"""
    Read a table written by :func:`export_zones_csv`.

    OUTPUT:

    A ``pandas.DataFrame`` with the zone columns; ``extent_m`` and
    ``extent_mi`` are floats and ``pole_count`` is an integer.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.library import single_corridor
        >>> from mcpzones.synth import generate
        >>> from mcpzones.pipeline import zones_from_layers
        >>> from mcpzones.io import export_zones_csv, read_zones_csv
        >>> path = os.path.join(tempfile.mkdtemp(), 'zones.csv')
        >>> export_zones_csv(zones_from_layers(*generate(single_corridor())[:2]), path)
        >>> df = read_zones_csv(path)
        >>> list(df['circuits']), float(df['extent_m'][0])
        (['K01-A;K01-B'], 900.0)
    """
    df = _read_table(path, ('zone_id', 'extent_m'))
    try:
        df['extent_m'] = df['extent_m'].astype(float)
        if 'extent_mi' in df.columns:
            df['extent_mi'] = df['extent_mi'].astype(float)
        if 'pole_count' in df.columns:
            df['pole_count'] = df['pole_count'].astype(int)
    except ValueError as e:
        raise IngestError("%s has a malformed numeric column: %s" % (path, e))
    if df['zone_id'].duplicated().any():
        raise IngestError("%s repeats zone_id %r" % (path, df['zone_id'][df['zone_id'].duplicated()].iloc[0]))
    return df

def export_histogram_csv(bins, path):
    r"""
    Write a zone length histogram as ``bin_lo_mi,bin_hi_mi,count``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.zoning import length_histogram
        >>> from mcpzones.io import export_histogram_csv
        >>> path = os.path.join(tempfile.mkdtemp(), 'histogram.csv')
        >>> export_histogram_csv(length_histogram([800.0, 1609.344, 9000.0], max_miles=2), path)
        >>> print(open(path).read().strip())
        bin_lo_mi,bin_hi_mi,count
        0.000,1.000,1
        1.000,2.000,1
        2.000,inf,1
    """
    rows = [(format_float(b.lo_mi, 3), format_float(b.hi_mi, 3), str(b.count)) for b in bins]
    _write_table(pd.DataFrame(rows, columns=['bin_lo_mi', 'bin_hi_mi', 'count']), path)

#===============================================
# Prioritization tables
#===============================================

def load_factors(path):
    r"""
    Read the per-zone factor table.

    INPUT:

    - ``path`` -- CSV file with header ``zone_id`` followed by the six factor
      columns; blank cells denote missing values

    OUTPUT:

    A ``pandas.DataFrame`` indexed by ``zone_id`` with one float column per
    factor, ``nan`` where missing.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.io import load_factors
        >>> path = os.path.join(tempfile.mkdtemp(), 'factors.csv')
        >>> with open(path, 'w') as f:
        ...     _ = f.write('zone_id,customer_impact,redundancy_loss,critical_infrastructure,'
        ...                 'asset_condition,restoration_complexity,outage_risk\n'
        ...                 'Z-1,4764,1,0,0.4,2,0.9\nZ-2,9828,0,,0.7,1,0.2\n')
        >>> F = load_factors(path)
        >>> F.loc['Z-1', 'customer_impact'], bool(F.isna().loc['Z-2', 'critical_infrastructure'])
        (4764.0, True)

    TESTS::

        >>> with open(path, 'w') as f:
        ...     _ = f.write('zone_id,customer_impact\nZ-1,3\n')
        >>> load_factors(path)
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: ... is missing required column(s): redundancy_loss, critical_infrastructure, asset_condition, restoration_complexity, outage_risk

    Infinite values are rejected, only blank cells are missing::

        >>> header = ('zone_id,customer_impact,redundancy_loss,critical_infrastructure,'
        ...           'asset_condition,restoration_complexity,outage_risk\n')
        >>> with open(path, 'w') as f:
        ...     _ = f.write(header + 'Z-1,4764,1,0,0.4,2,0.9\nZ-2,inf,0,1,0.7,1,0.2\n')
        >>> load_factors(path)
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: factor record 'Z-2' (line 3): non-finite customer_impact value 'inf'
        >>> with open(path, 'w') as f:
        ...     _ = f.write(header + 'Z-1,4764,1,0,0.4,2,nan\n')
        >>> load_factors(path)
        Traceback (most recent call last):
        ...
        mcpzones.io.IngestError: factor record 'Z-1' (line 2): non-finite outage_risk value 'nan'

    A byte order mark before the header is ignored::

        >>> with open(path, 'w', encoding='utf-8') as f:
        ...     _ = f.write('\ufeff' + header + 'Z-1,4764,1,0,0.4,2,0.9\n')
        >>> list(load_factors(path).index)
        ['Z-1']
    """
    df = _read_table(path, ('zone_id',) + FACTORS)
    df['zone_id'] = df['zone_id'].str.strip()
    duplicated = df['zone_id'][df['zone_id'].duplicated()]
    if len(duplicated):
        raise IngestError("factor record %r: duplicate zone_id" % duplicated.iloc[0], duplicated.iloc[0])
    values = {}
    for factor in FACTORS:
        column = []
        # line 1 is the header
        for line, (zone_id, text) in enumerate(zip(df['zone_id'], df[factor]), start=2):
            try:
                value = _to_float(text)
            except ValueError:
                raise IngestError("factor record %r (line %s): non-numeric %s value %r" % (zone_id, line, factor, text),
                                  zone_id)
            if str(text).strip() and not math.isfinite(value):
                raise IngestError("factor record %r (line %s): non-finite %s value %r" % (zone_id, line, factor, text),
                                  zone_id)
            column.append(value)
        values[factor] = column
    return pd.DataFrame(values, index=pd.Index(df['zone_id'], name='zone_id'), columns=list(FACTORS))

def export_ranking_csv(ranking, path):
    r"""
    Write a :class:`~mcpzones.prioritize.PriorityRanking` as
    ``rank,zone_id,score,<six normalized factors>,imputed``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.prioritize import FactorVector, rank_zones
        >>> from mcpzones.io import export_ranking_csv
        >>> R = rank_zones([('Z-b', FactorVector(0, 0, 0, 0, 0, 0)), ('Z-a', FactorVector(1, 1, 1, 1, 1, 1))])
        >>> path = os.path.join(tempfile.mkdtemp(), 'ranking.csv')
        >>> export_ranking_csv(R, path)
        >>> print(open(path).read().strip())
        rank,zone_id,score,customer_impact,redundancy_loss,critical_infrastructure,asset_condition,restoration_complexity,outage_risk,imputed
        1,Z-a,100.000000,1.000000,1.000000,1.000000,1.000000,1.000000,1.000000,
        2,Z-b,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,
    """
    rows = []
    for entry in ranking:
        rows.append([str(entry.rank), entry.zone_id, format_float(entry.score)]
                    + [format_float(v) for v in entry.factors] + [';'.join(entry.imputed)])
    _write_table(pd.DataFrame(rows, columns=['rank', 'zone_id', 'score'] + list(FACTORS) + ['imputed']), path)
