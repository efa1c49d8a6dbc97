r"""
The risk-zone pipeline: ingest, associate, detect, group, cluster, prioritize
and export.

Pipeline runs
~~~~~~~~~~~~~

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~PipelineConfig`      | Layered run configuration
    :func:`~run_pipeline`         | Full run from layer files to reports
    :func:`~zones_from_layers`    | Risk zones of in-memory layers
    :func:`~run_association`      | Association and detection debug dumps
    :func:`~run_ranking`          | Rank the zones of an existing zones table
    :func:`~run_validation`       | Ingest-only dry run
    :func:`~run_histogram`        | Length histogram of an existing zones table

A failure inside a stage is raised as :class:`StageError`, whose ``stage``
attribute names the stage.
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
import os
from contextlib import contextmanager

from mcpzones.association import DISTANCE_MODES, AssociationParams, associate
from mcpzones.detection import GROUPING_MODES, detect_mcp, group_by_configuration
from mcpzones.io import (CRS_CHOICES, export_associations_csv, export_histogram_csv, export_mcps_csv,
                         export_ranking_csv, export_zones_csv, export_zones_geojson, load_factors,
                         load_poles, load_wires, read_zones_csv, write_json)
from mcpzones.prioritize import (DEFAULT_WEIGHTS, NORMALIZATIONS, load_weights, normalize_table,
                                 rank_zones, validate_weights)
from mcpzones.utils import StageTimer
from mcpzones.zoning import EXTENT_MODES, ZoningParams, build_zones, length_histogram

logger = logging.getLogger(__name__)

STAGES = ('ingest', 'associate', 'detect', 'group', 'cluster', 'prioritize', 'export')

class StageError(RuntimeError):
    r"""
    A pipeline stage failed; ``stage`` names it.
    """
    def __init__(self, stage, message):
        super(StageError, self).__init__(message)
        self.stage = stage

@contextmanager
def _stage(timer, name):
    with timer.stage(name):
        try:
            yield
        except StageError:
            raise
        except Exception as e:
            raise StageError(name, str(e)) from e

#===============================================
# Configuration
#===============================================

DEFAULTS = {
    'poles': None,
    'wires': None,
    'factors': None,
    'crs': None,
    'k': 3,
    'd_max': 50.0,
    'distance': 'centroid',
    'trust_declared': False,
    'radius': 200.0,
    'min_extent': 200.0,
    'min_poles': 2,
    'extent': 'mst',
    'grouping': 'exact',
    'normalize': 'minmax',
    'weights': None,
    'impute': None,
    'lenient': False,
    'workers': 1,
    'bin_width': 1.0,
    'max_miles': 5.0,
    'out': '.',
}

class PipelineConfig(object):
    r"""
    Configuration of a pipeline run.

    INPUT:

    Keyword arguments named after :obj:`DEFAULTS`:

    - ``poles``, ``wires`` -- layer paths; ``factors`` -- (optional) factor table path

    - ``crs`` -- (optional) ``'planar'`` or ``'wgs84'``; by default GeoJSON
      layers are WGS84 and CSV layers planar

    - ``k``, ``d_max``, ``distance``, ``trust_declared`` -- association
      parameters, see :class:`~mcpzones.association.AssociationParams`

    - ``radius``, ``min_extent``, ``min_poles``, ``extent`` -- zoning
      parameters, see :class:`~mcpzones.zoning.ZoningParams`

    - ``grouping`` -- ``'exact'`` or ``'overlap'``

    - ``normalize``, ``weights``, ``impute`` -- factor normalization method,
      weights (a JSON file path or a dictionary) and value for missing factors

    - ``lenient`` -- skip invalid input records instead of failing

    - ``workers`` -- threads used by the batched queries and the clustering

    - ``bin_width``, ``max_miles`` -- length histogram bins

    - ``out`` -- output directory

    EXAMPLES::

        >>> from mcpzones.pipeline import PipelineConfig
        >>> cfg = PipelineConfig(poles='poles.csv', wires='wires.csv', radius=150); cfg
        A PipelineConfig for poles.csv and wires.csv writing to .
        >>> cfg.zoning_params()
        ZoningParams(radius=150.0, min_extent=200.0, min_poles=2, extent='mst')
        >>> cfg.association_params()
        AssociationParams(k=3, d_max=50.0, distance='centroid', trust_declared=False)

    TESTS::

        >>> PipelineConfig(raduis=150)
        Traceback (most recent call last):
        ...
        ValueError: unknown configuration key(s): raduis
        >>> PipelineConfig(k=0)
        Traceback (most recent call last):
        ...
        ValueError: k must be at least 1, got 0
        >>> PipelineConfig(grouping='fuzzy')
        Traceback (most recent call last):
        ...
        ValueError: grouping must be one of exact, overlap, got 'fuzzy'
    """
    def __init__(self, **kwargs):
        unknown = sorted(set(kwargs) - set(DEFAULTS))
        if unknown:
            raise ValueError("unknown configuration key(s): %s" % ", ".join(unknown))
        settings = dict(DEFAULTS)
        settings.update(kwargs)
        for key, value in settings.items():
            setattr(self, key, value)
        for key, choices in (('crs', CRS_CHOICES), ('grouping', GROUPING_MODES), ('normalize', NORMALIZATIONS),
                             ('distance', DISTANCE_MODES), ('extent', EXTENT_MODES)):
            value = settings[key]
            if value is not None and value not in choices:
                raise ValueError("%s must be one of %s, got %r" % (key, ", ".join(choices), value))
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError("workers must be at least 1, got %s" % self.workers)
        if self.impute is not None and not 0.0 <= float(self.impute) <= 1.0:
            raise ValueError("imputed factor value must lie in [0, 1], got %r" % self.impute)
        self.association_params()
        self.zoning_params()

    def __repr__(self):
        return "A PipelineConfig for %s and %s writing to %s" % (self.poles, self.wires, self.out)

    @classmethod
    def from_file(cls, path, **overrides):
        r"""
        Layer a JSON configuration file over the defaults, then ``overrides``
        over the file. Overrides equal to ``None`` are ignored.

        EXAMPLES::

            >>> import json, os, tempfile
            >>> from mcpzones.pipeline import PipelineConfig
            >>> path = os.path.join(tempfile.mkdtemp(), 'run.json')
            >>> with open(path, 'w') as f:
            ...     json.dump({'k': 4, 'radius': 150, 'out': 'reports'}, f)
            >>> cfg = PipelineConfig.from_file(path, radius=120, d_max=None)
            >>> cfg.k, cfg.radius, cfg.d_max, cfg.out
            (4, 120, 50.0, 'reports')
        """
        settings = {}
        if path is not None:
            with open(path, encoding='utf-8') as f:
                doc = json.load(f)
            if not isinstance(doc, dict):
                raise ValueError("%s must hold a JSON object of configuration keys" % path)
            settings.update(doc)
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)

    def association_params(self):
        """
        Get the :class:`~mcpzones.association.AssociationParams` of the run.
        """
        return AssociationParams(self.k, self.d_max, self.distance, self.trust_declared)

    def zoning_params(self):
        """
        Get the :class:`~mcpzones.zoning.ZoningParams` of the run.
        """
        return ZoningParams(self.radius, self.min_extent, self.min_poles, self.extent)

    def weight_vector(self):
        """
        Get the validated weights: read from the ``weights`` file, taken from
        the ``weights`` dictionary, or the defaults.
        """
        if self.weights is None:
            return DEFAULT_WEIGHTS
        if isinstance(self.weights, dict):
            return validate_weights(self.weights)
        return load_weights(self.weights)

    def as_dict(self):
        """
        Get the settings as a dictionary.
        """
        return {key: getattr(self, key) for key in DEFAULTS}

#===============================================
# Stages
#===============================================

def _require(path, what):
    if path is None:
        raise ValueError("no %s file given" % what)
    if not os.path.isfile(path):
        raise FileNotFoundError("%s file not found: %s" % (what, path))

def _ingest(cfg):
    _require(cfg.poles, 'poles')
    _require(cfg.wires, 'wires')
    logger.info("reading %s and %s...", cfg.poles, cfg.wires)
    poles = load_poles(cfg.poles, crs=cfg.crs, lenient=cfg.lenient)
    wires = load_wires(cfg.wires, crs=cfg.crs, lenient=cfg.lenient, origin=poles.origin())
    if (poles.origin() is None) != (wires.origin() is None):
        raise ValueError("poles and wires were read in different coordinate systems; pass crs explicitly")
    logger.info("done: %s poles, %s wire segments", len(poles), len(wires))
    return poles, wires

def zones_from_layers(poles, wires, assoc_params=None, zoning_params=None, grouping='exact', workers=1):
    r"""
    Return the risk zones of in-memory pole and wire layers.

    EXAMPLES::

        >>> from mcpzones.territory import PoleSet, WireSet
        >>> from mcpzones.pipeline import zones_from_layers
        >>> P = PoleSet(['P%d' % i for i in range(4)], [(100 * i, 0) for i in range(4)])
        >>> W = WireSet(['A%d' % i for i in range(4)] + ['B%d' % i for i in range(4)], ['A'] * 4 + ['B'] * 4,
        ...             [[(100 * i - 40, 8), (100 * i + 40, 8)] for i in range(4)]
        ...             + [[(100 * i - 40, -8), (100 * i + 40, -8)] for i in range(4)])
        >>> zones_from_layers(P, W)
        [A RiskZone Z-... on A;B with n = 4 poles, extent 300.0 m]
    """
    table = associate(poles, wires, assoc_params, workers=workers)
    groups = group_by_configuration(detect_mcp(table, poles), grouping)
    return build_zones(groups, zoning_params, workers=workers)

def _ranking(cfg, zone_ids):
    factors = load_factors(cfg.factors)
    unknown = sorted(set(factors.index) - set(zone_ids))
    if unknown:
        logger.warning("the factor table lists %s zones that are not in this run, e.g. %s",
                       len(unknown), unknown[0])
    zone_factors = normalize_table(factors, cfg.normalize, zone_ids=zone_ids)
    return rank_zones(zone_factors, cfg.weight_vector(), impute=cfg.impute)

def run_pipeline(cfg):
    r"""
    Run the full pipeline and write the reports to ``cfg.out``.

    The reports are ``zones.geojson``, ``zones.csv``, ``histogram.csv``,
    ``ranking.csv`` when a factor table is given, and ``run_summary.json``.
    Apart from the timings in the summary, they only depend on the inputs and
    the parameters.

    OUTPUT:

    The run summary: counts per stage, timings, output paths and parameters.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.library import three_corridors
        >>> from mcpzones.synth import generate, write_territory
        >>> from mcpzones.pipeline import PipelineConfig, run_pipeline
        >>> tmp = tempfile.mkdtemp()
        >>> paths = write_territory(*generate(three_corridors()), os.path.join(tmp, 'territory'))
        >>> cfg = PipelineConfig(poles=paths['poles'], wires=paths['wires'], out=os.path.join(tmp, 'run1'))
        >>> summary = run_pipeline(cfg)
        >>> summary['counts']['zones'], summary['counts']['poles']
        (3, 1550)
        >>> sorted(os.path.basename(p) for p in summary['outputs'].values())
        ['histogram.csv', 'run_summary.json', 'zones.csv', 'zones.geojson']
        >>> c = summary['counts']
        >>> c['mcps'] <= c['poles'], c['zone_poles'] <= c['mcps']
        (True, True)

    The outputs do not depend on the number of workers::

        >>> again = run_pipeline(PipelineConfig(poles=paths['poles'], wires=paths['wires'],
        ...                                     out=os.path.join(tmp, 'run2'), workers=3))
        >>> all(open(summary['outputs'][name], 'rb').read() == open(again['outputs'][name], 'rb').read()
        ...     for name in ('zones_geojson', 'zones_csv', 'histogram'))
        True

    Factors give a ranking::

        >>> import pandas as pd
        >>> from mcpzones.io import read_zones_csv
        >>> from mcpzones.prioritize import FACTORS
        >>> zones = read_zones_csv(summary['outputs']['zones_csv'])
        >>> table = pd.DataFrame({f: range(len(zones)) for f in FACTORS})
        >>> table.insert(0, 'zone_id', zones['zone_id'])
        >>> table.to_csv(os.path.join(tmp, 'factors.csv'), index=False)
        >>> summary = run_pipeline(PipelineConfig(poles=paths['poles'], wires=paths['wires'], out=os.path.join(tmp, 'run3'),
        ...                                       factors=os.path.join(tmp, 'factors.csv')))
        >>> pd.read_csv(summary['outputs']['ranking'])['zone_id'].tolist() == zones['zone_id'].tolist()[::-1]
        True

    TESTS::

        >>> run_pipeline(PipelineConfig(poles=paths['poles'], wires=os.path.join(tmp, 'missing.csv')))
        Traceback (most recent call last):
        ...
        mcpzones.pipeline.StageError: wires file not found: ...missing.csv
        >>> try:
        ...     run_pipeline(PipelineConfig(poles=paths['poles'], wires=os.path.join(tmp, 'missing.csv')))
        ... except Exception as e:
        ...     e.stage
        'ingest'
    """
    timer = StageTimer()
    counts = {}
    with _stage(timer, 'ingest'):
        poles, wires = _ingest(cfg)
        counts.update(poles=len(poles), wires=len(wires),
                      ingest_warnings=len(poles.warnings()) + len(wires.warnings()))
    with _stage(timer, 'associate'):
        table = associate(poles, wires, cfg.association_params(), workers=cfg.workers)
        counts.update(associations=table.size(), poles_without_wire=sum(1 for row in table if not row))
    with _stage(timer, 'detect'):
        mcps = detect_mcp(table, poles)
        counts['mcps'] = len(mcps)
    with _stage(timer, 'group'):
        groups = group_by_configuration(mcps, cfg.grouping)
        counts['groups'] = len(groups)
    with _stage(timer, 'cluster'):
        zones = build_zones(groups, cfg.zoning_params(), workers=cfg.workers)
        bins = length_histogram(zones, cfg.bin_width, cfg.max_miles)
        counts.update(zones=len(zones), zone_poles=sum(z.pole_count for z in zones))
    ranking = None
    if cfg.factors is not None:
        with _stage(timer, 'prioritize'):
            _require(cfg.factors, 'factors')
            ranking = _ranking(cfg, [z.zone_id for z in zones])
            counts['ranked'] = len(ranking)

    outputs = {}
    with _stage(timer, 'export'):
        os.makedirs(cfg.out, exist_ok=True)
        outputs['zones_geojson'] = os.path.join(cfg.out, 'zones.geojson')
        export_zones_geojson(zones, outputs['zones_geojson'], origin=poles.origin())
        outputs['zones_csv'] = os.path.join(cfg.out, 'zones.csv')
        export_zones_csv(zones, outputs['zones_csv'])
        outputs['histogram'] = os.path.join(cfg.out, 'histogram.csv')
        export_histogram_csv(bins, outputs['histogram'])
        if ranking is not None:
            outputs['ranking'] = os.path.join(cfg.out, 'ranking.csv')
            export_ranking_csv(ranking, outputs['ranking'])
        outputs['summary'] = os.path.join(cfg.out, 'run_summary.json')
        summary = {'counts': counts, 'outputs': outputs, 'parameters': cfg.as_dict()}
        summary['timings'] = timer.timings()
        write_json(summary, outputs['summary'])
    logger.info("wrote %s zones to %s", len(zones), cfg.out)
    return summary

#===============================================
# Partial runs
#===============================================

def run_association(cfg):
    r"""
    Ingest and associate, then write ``associations.csv`` and ``mcps.csv`` to ``cfg.out``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.library import single_corridor
        >>> from mcpzones.synth import generate, write_territory
        >>> from mcpzones.pipeline import PipelineConfig, run_association
        >>> tmp = tempfile.mkdtemp()
        >>> paths = write_territory(*generate(single_corridor()), tmp)
        >>> summary = run_association(PipelineConfig(poles=paths['poles'], wires=paths['wires'], out=tmp))
        >>> summary['counts']['associations'], summary['counts']['mcps']
        (20, 10)
        >>> open(summary['outputs']['mcps']).read().splitlines()[:2]
        ['pole_id,circuit_set', 'P-K01-0000,K01-A;K01-B']
    """
    timer = StageTimer()
    with _stage(timer, 'ingest'):
        poles, wires = _ingest(cfg)
    with _stage(timer, 'associate'):
        table = associate(poles, wires, cfg.association_params(), workers=cfg.workers)
    with _stage(timer, 'detect'):
        mcps = detect_mcp(table, poles)
    outputs = {}
    with _stage(timer, 'export'):
        os.makedirs(cfg.out, exist_ok=True)
        outputs['associations'] = os.path.join(cfg.out, 'associations.csv')
        export_associations_csv(table, poles, wires, outputs['associations'])
        outputs['mcps'] = os.path.join(cfg.out, 'mcps.csv')
        export_mcps_csv(mcps, outputs['mcps'])
    return {'counts': {'poles': len(poles), 'wires': len(wires), 'associations': table.size(), 'mcps': len(mcps)},
            'outputs': outputs, 'timings': timer.timings()}

def run_ranking(cfg, zones_path):
    r"""
    Rank the zones of a zones table written by a previous run, and write
    ``ranking.csv`` to ``cfg.out``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.pipeline import PipelineConfig, run_ranking
        >>> tmp = tempfile.mkdtemp()
        >>> zones_path, factors_path = os.path.join(tmp, 'zones.csv'), os.path.join(tmp, 'factors.csv')
        >>> with open(zones_path, 'w') as f:
        ...     _ = f.write('zone_id,extent_m\nZ-a,900\nZ-b,400\n')
        >>> with open(factors_path, 'w') as f:
        ...     _ = f.write('zone_id,customer_impact,redundancy_loss,critical_infrastructure,'
        ...                 'asset_condition,restoration_complexity,outage_risk\n'
        ...                 'Z-a,10,1,0,0.5,1,1\nZ-b,90,1,,0.5,1,1\n')
        >>> summary = run_ranking(PipelineConfig(factors=factors_path, out=tmp, impute=0.5), zones_path)
        >>> print(open(summary['outputs']['ranking']).read().strip())
        rank,zone_id,score,customer_impact,redundancy_loss,critical_infrastructure,asset_condition,restoration_complexity,outage_risk,imputed
        1,Z-b,65.000000,1.000000,0.500000,0.500000,0.500000,0.500000,0.500000,critical_infrastructure
        2,Z-a,35.000000,0.000000,0.500000,0.500000,0.500000,0.500000,0.500000,

    TESTS::

        >>> run_ranking(PipelineConfig(out=tmp), zones_path)
        Traceback (most recent call last):
        ...
        mcpzones.pipeline.StageError: no factors file given
    """
    timer = StageTimer()
    with _stage(timer, 'ingest'):
        _require(cfg.factors, 'factors')
        _require(zones_path, 'zones')
        zone_ids = read_zones_csv(zones_path)['zone_id'].tolist()
    with _stage(timer, 'prioritize'):
        ranking = _ranking(cfg, zone_ids)
    outputs = {}
    with _stage(timer, 'export'):
        os.makedirs(cfg.out, exist_ok=True)
        outputs['ranking'] = os.path.join(cfg.out, 'ranking.csv')
        export_ranking_csv(ranking, outputs['ranking'])
    return {'counts': {'zones': len(zone_ids), 'ranked': len(ranking)}, 'outputs': outputs,
            'timings': timer.timings()}

def run_validation(cfg):
    r"""
    Read and validate both layers without running the analysis.

    OUTPUT:

    A dictionary with the record count and the validation messages of each layer.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.library import single_corridor
        >>> from mcpzones.synth import generate, write_territory
        >>> from mcpzones.pipeline import PipelineConfig, run_validation
        >>> paths = write_territory(*generate(single_corridor()), tempfile.mkdtemp())
        >>> run_validation(PipelineConfig(poles=paths['poles'], wires=paths['wires']))
        {'poles': {'records': 10, 'warnings': []}, 'wires': {'records': 20, 'warnings': []}}
    """
    timer = StageTimer()
    with _stage(timer, 'ingest'):
        poles, wires = _ingest(cfg)
    return {'poles': {'records': len(poles), 'warnings': poles.warnings()},
            'wires': {'records': len(wires), 'warnings': wires.warnings()}}

def run_histogram(zones_path, out, bin_width=1.0, max_miles=5.0):
    r"""
    Write ``histogram.csv`` to ``out`` from a zones table of a previous run.

    EXAMPLES::

        >>> import os, tempfile
        >>> from mcpzones.pipeline import run_histogram
        >>> tmp = tempfile.mkdtemp()
        >>> with open(os.path.join(tmp, 'zones.csv'), 'w') as f:
        ...     _ = f.write('zone_id,extent_m\nZ-a,800\nZ-b,1700\nZ-c,20000\n')
        >>> [b.count for b in run_histogram(os.path.join(tmp, 'zones.csv'), tmp)]
        [1, 1, 0, 0, 0, 1]
    """
    timer = StageTimer()
    with _stage(timer, 'ingest'):
        _require(zones_path, 'zones')
        extents = read_zones_csv(zones_path)['extent_m'].tolist()
    with _stage(timer, 'export'):
        bins = length_histogram(extents, bin_width, max_miles)
        os.makedirs(out, exist_ok=True)
        export_histogram_csv(bins, os.path.join(out, 'histogram.csv'))
    return bins
