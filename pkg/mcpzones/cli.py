r"""
Command line interface.

Subcommands:

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    ``zone``         | Full pipeline, from pole and wire layers to the zone reports
    ``associate``    | Association and multi-circuit pole tables only
    ``rank``         | Rank the zones of an existing ``zones.csv`` with a factor table
    ``synth``        | Write a synthetic territory and its ground truth
    ``validate``     | Read and validate both layers without running the analysis
    ``hist``         | Length histogram of an existing ``zones.csv``

Settings are layered: built-in defaults, then the JSON file given with
``--config``, then flags. The exit status is 0 on success, 1 when a stage
fails and 2 on invalid usage.

EXAMPLES::

    >>> import os, tempfile
    >>> from mcpzones.cli import main
    >>> tmp = tempfile.mkdtemp()
    >>> main(['--quiet', 'synth', '--preset', 'single_corridor', '--out', tmp])
    0
    >>> main(['--quiet', 'zone', '--poles', os.path.join(tmp, 'poles.csv'), '--wires', os.path.join(tmp, 'wires.csv'),
    ...       '--out', tmp, '--radius', '150'])
    0
    >>> print(open(os.path.join(tmp, 'histogram.csv')).read().strip())
    bin_lo_mi,bin_hi_mi,count
    0.000,1.000,1
    1.000,2.000,0
    2.000,3.000,0
    3.000,4.000,0
    4.000,5.000,0
    5.000,inf,0

TESTS::

    >>> main(['--quiet', 'zone', '--poles', os.path.join(tmp, 'poles.csv'), '--wires', os.path.join(tmp, 'nowhere.csv')])
    1
    >>> main(['--quiet', 'rank', '--zones', os.path.join(tmp, 'zones.csv')])
    1
    >>> main(['--quiet', 'zone', '--k', 'three'])
    Traceback (most recent call last):
    ...
    SystemExit: 2
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

import argparse
import logging
import sys

from mcpzones import library
from mcpzones.association import DISTANCE_MODES
from mcpzones.detection import GROUPING_MODES
from mcpzones.io import CRS_CHOICES, FORMATS
from mcpzones.pipeline import (PipelineConfig, StageError, run_association, run_histogram, run_pipeline,
                               run_ranking, run_validation)
from mcpzones.prioritize import NORMALIZATIONS
from mcpzones.synth import generate, write_territory
from mcpzones.zoning import EXTENT_MODES

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)-8s %(name)s: %(message)s'

PRESETS = {
    'single_corridor': library.single_corridor,
    'three_corridors': library.three_corridors,
    'background_only': library.background_only,
    'acceptance': library.acceptance_territory,
    'benchmark': library.benchmark_territory,
}

# flags layered over the configuration file, by configuration key
_CONFIG_FLAGS = ('poles', 'wires', 'factors', 'crs', 'k', 'd_max', 'distance', 'trust_declared', 'radius',
                 'min_extent', 'min_poles', 'extent', 'grouping', 'normalize', 'weights', 'impute', 'lenient',
                 'workers', 'bin_width', 'max_miles', 'out')

def _layer_flags(p):
    p.add_argument('--poles', metavar='PATH', help="pole layer, GeoJSON or CSV")
    p.add_argument('--wires', metavar='PATH', help="wire layer, GeoJSON or CSV")
    p.add_argument('--crs', choices=CRS_CHOICES, help="coordinate system of the layers")
    p.add_argument('--lenient', action='store_true', default=None, help="skip invalid records")

def _association_flags(p):
    p.add_argument('--k', type=int, help="maximum wires per pole (default: 3)")
    p.add_argument('--d-max', dest='d_max', type=float, help="association cutoff in meters (default: 50)")
    p.add_argument('--distance', choices=DISTANCE_MODES, help="pole to wire distance (default: centroid)")
    p.add_argument('--trust-declared', dest='trust_declared', action='store_true', default=None,
                   help="add the pole-wire links declared in the wire layer")

def _histogram_flags(p):
    p.add_argument('--bin-width', dest='bin_width', type=float, help="bin width in miles (default: 1)")
    p.add_argument('--max-miles', dest='max_miles', type=float, help="start of the overflow bin (default: 5)")

def _ranking_flags(p):
    p.add_argument('--factors', metavar='PATH', help="per-zone factor table")
    p.add_argument('--weights', metavar='PATH', help="JSON weights by factor name")
    p.add_argument('--normalize', choices=NORMALIZATIONS, help="factor normalization (default: minmax)")
    p.add_argument('--impute', type=float, help="value in [0, 1] for missing factors")

def _common_flags(p):
    p.add_argument('--config', metavar='PATH', help="JSON configuration file")
    p.add_argument('--out', metavar='DIR', help="output directory (default: current directory)")
    p.add_argument('--workers', type=int, help="worker threads (default: 1)")

def build_parser():
    r"""
    Return the argument parser of the ``mcpzones`` command.

    EXAMPLES::

        >>> from mcpzones.cli import build_parser
        >>> args = build_parser().parse_args(['zone', '--poles', 'p.csv', '--d-max', '40'])
        >>> args.command, args.poles, args.d_max, args.k
        ('zone', 'p.csv', 40.0, None)
    """
    parser = argparse.ArgumentParser(prog='mcpzones',
                                     description="Multi-circuit pole risk zones of a distribution network.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="log debug messages")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="log warnings and errors only")
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('zone', help="run the full pipeline")
    _layer_flags(p)
    _association_flags(p)
    p.add_argument('--radius', type=float, help="clustering radius in meters (default: 200)")
    p.add_argument('--min-extent', dest='min_extent', type=float, help="minimum zone extent in meters (default: 200)")
    p.add_argument('--min-poles', dest='min_poles', type=int, help="minimum poles per zone (default: 2)")
    p.add_argument('--extent', choices=EXTENT_MODES, help="extent measure (default: mst)")
    p.add_argument('--grouping', choices=GROUPING_MODES, help="circuit configuration grouping (default: exact)")
    _ranking_flags(p)
    _histogram_flags(p)
    _common_flags(p)

    p = sub.add_parser('associate', help="write the association and multi-circuit pole tables")
    _layer_flags(p)
    _association_flags(p)
    _common_flags(p)

    p = sub.add_parser('rank', help="rank the zones of an existing zones table")
    p.add_argument('--zones', metavar='PATH', required=True, help="zones.csv of a previous run")
    _ranking_flags(p)
    _common_flags(p)

    p = sub.add_parser('synth', help="write a synthetic territory")
    p.add_argument('--preset', choices=sorted(PRESETS), default='three_corridors',
                   help="territory preset (default: three_corridors)")
    p.add_argument('--seed', type=int, help="override the seed of the preset")
    p.add_argument('--format', dest='fmt', choices=FORMATS, default='csv', help="layer format (default: csv)")
    p.add_argument('--out', metavar='DIR', default='.', help="output directory (default: current directory)")

    p = sub.add_parser('validate', help="read and validate both layers")
    _layer_flags(p)
    p.add_argument('--config', metavar='PATH', help="JSON configuration file")

    p = sub.add_parser('hist', help="length histogram of an existing zones table")
    p.add_argument('--zones', metavar='PATH', required=True, help="zones.csv of a previous run")
    _histogram_flags(p)
    p.add_argument('--out', metavar='DIR', default='.', help="output directory (default: current directory)")
    return parser

def _config(args):
    overrides = {key: getattr(args, key) for key in _CONFIG_FLAGS if hasattr(args, key)}
    return PipelineConfig.from_file(args.config, **overrides)

def _synth(args):
    params = PRESETS[args.preset]()
    if args.seed is not None:
        params = params._replace(seed=args.seed)
    poles, wires, truth = generate(params)
    return write_territory(poles, wires, truth, args.out, fmt=args.fmt)

def _validate(args):
    report = run_validation(_config(args))
    for layer in ('poles', 'wires'):
        entry = report[layer]
        print("%s: %s records, %s warnings" % (layer, entry['records'], len(entry['warnings'])))
        for message in entry['warnings']:
            print("  %s" % message)
    return report

def _run(args):
    if args.command == 'zone':
        cfg = _config(args)
        summary = run_pipeline(cfg)
        counts = summary['counts']
        logger.info("%s zones from %s multi-circuit poles", counts['zones'], counts['mcps'])
    elif args.command == 'associate':
        run_association(_config(args))
    elif args.command == 'rank':
        cfg = _config(args)
        if cfg.factors is None:
            raise ValueError("rank needs a factor table, pass --factors or set factors in the configuration")
        run_ranking(cfg, args.zones)
    elif args.command == 'synth':
        _synth(args)
    elif args.command == 'validate':
        _validate(args)
    elif args.command == 'hist':
        bin_width = 1.0 if args.bin_width is None else args.bin_width
        max_miles = 5.0 if args.max_miles is None else args.max_miles
        run_histogram(args.zones, args.out, bin_width, max_miles)

def main(argv=None):
    r"""
    Entry point of the ``mcpzones`` command; return the exit status.
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger('mcpzones').setLevel(level)
    try:
        _run(args)
    except StageError as e:
        logger.error("%s stage failed: %s", e.stage, e)
        return 1
    except (ValueError, OSError) as e:
        logger.error("%s", e)
        return 1
    return 0

if __name__ == '__main__':
    sys.exit(main())
