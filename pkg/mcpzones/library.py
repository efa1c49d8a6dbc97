r"""
Library of synthetic territories used for examples, acceptance and benchmarks.

The following functions are available:

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :func:`~single_corridor`          | One straight two-circuit corridor of ten poles, no noise
    :func:`~three_corridors`          | Three corridors of different configurations among background feeders
    :func:`~background_only`          | Single-circuit feeders only
    :func:`~acceptance_territory`     | Ten corridors from 0.3 to 6 miles among 50,000 background poles
    :func:`~benchmark_territory`      | About 100,000 poles and 150,000 wire segments

Each function returns a :class:`~mcpzones.synth.SynthParams`; pass it to
:func:`~mcpzones.synth.generate` to build the territory.
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

from mcpzones.synth import CorridorSpec, SynthParams
from mcpzones.utils import METERS_PER_MILE

# lengths in miles, spacings in meters and circuit counts of the acceptance corridors
ACCEPTANCE_MILES = (0.3, 0.6, 0.9, 1.4, 1.8, 2.5, 3.3, 4.2, 5.6, 6.0)
ACCEPTANCE_SPACINGS = (60, 75, 90, 100, 110, 120, 130, 145, 160, 170)
ACCEPTANCE_CIRCUITS = (2, 3, 2, 2, 3, 2, 2, 3, 2, 2)

def single_corridor(seed=1):
    r"""
    One east-heading corridor of ten poles at 100 m carrying two circuits,
    without position noise or background.

    EXAMPLES::

        >>> from mcpzones.library import single_corridor
        >>> from mcpzones.synth import generate
        >>> from mcpzones.pipeline import zones_from_layers
        >>> [Z] = zones_from_layers(*generate(single_corridor())[:2])
        >>> Z.circuits.label(), Z.pole_count, Z.extent_m
        ('K01-A;K01-B', 10, 900.0)
    """
    return SynthParams(seed=seed, width_m=2000, height_m=2000, jitter_m=0,
                       corridors=[CorridorSpec(2, 900, 100, 0)])

def three_corridors(seed=11):
    r"""
    Three corridors carrying two, three and two circuits, among 1,500
    single-circuit background poles in a 5 km square.

    EXAMPLES::

        >>> from mcpzones.library import three_corridors
        >>> [c.n_poles for c in three_corridors().corridors]
        [16, 16, 18]
    """
    return SynthParams(seed=seed, width_m=5000, height_m=5000, background_poles=1500,
                       corridors=[CorridorSpec(2, 1500, 100, 0),
                                  CorridorSpec(3, 1200, 80, 90),
                                  CorridorSpec(2, 2000, 120, 45)])

def background_only(seed=5):
    r"""
    800 single-circuit background poles in a 3 km square, without corridors.

    EXAMPLES::

        >>> from mcpzones.library import background_only
        >>> from mcpzones.synth import generate
        >>> from mcpzones.association import associate
        >>> from mcpzones.detection import detect_mcp
        >>> poles, wires, truth = generate(background_only())
        >>> len(poles), len(truth), detect_mcp(associate(poles, wires), poles)
        (800, 0, [])
    """
    return SynthParams(seed=seed, width_m=3000, height_m=3000, background_poles=800)

def acceptance_territory(seed=2025, background_poles=50000):
    r"""
    Ten corridors of 0.3 to 6 miles with spacings of 60 to 170 m and two or
    three circuits, among ``background_poles`` background poles in a 30 km
    square, with 5 m position noise.

    Two corridors are longer than 5 miles, so that the overflow bin of the
    length histogram is populated.

    EXAMPLES::

        >>> from mcpzones.library import acceptance_territory
        >>> from mcpzones.zoning import length_histogram
        >>> A = acceptance_territory()
        >>> len(A.corridors), A.background_poles
        (10, 50000)
        >>> [b.count for b in length_histogram([c.expected_extent_m for c in A.corridors])]
        [3, 2, 1, 1, 1, 2]

    Recovery on a lighter background::

        >>> from mcpzones.synth import generate
        >>> from mcpzones.pipeline import zones_from_layers
        >>> poles, wires, truth = generate(acceptance_territory(background_poles=5000))
        >>> zones = zones_from_layers(poles, wires)
        >>> sorted((z.circuits, tuple(z.pole_ids)) for z in zones) == sorted((t.circuits, tuple(sorted(t.pole_ids))) for t in truth)
        True
        >>> [b.count for b in length_histogram(zones)] == [b.count for b in length_histogram([t.expected_extent_m for t in truth])]
        True
    """
    corridors = [CorridorSpec(n, miles * METERS_PER_MILE, spacing)
                 for miles, spacing, n in zip(ACCEPTANCE_MILES, ACCEPTANCE_SPACINGS, ACCEPTANCE_CIRCUITS)]
    return SynthParams(seed=seed, width_m=30000, height_m=30000, background_poles=background_poles,
                       corridors=corridors)

def benchmark_territory(seed=7, total_poles=100000, total_wires=150000):
    r"""
    The acceptance corridors in a 40 km square filled with background poles
    up to ``total_poles`` poles; enough background wires are split in two to
    reach about ``total_wires`` wire segments.

    EXAMPLES::

        >>> from mcpzones.library import benchmark_territory
        >>> B = benchmark_territory()
        >>> B.background_poles + sum(c.n_poles for c in B.corridors)
        100000
        >>> round(B.background_poles * (1 + B.split_fraction) + sum(c.n_poles * c.n_circuits for c in B.corridors))
        150000
    """
    corridors = [CorridorSpec(n, miles * METERS_PER_MILE, spacing)
                 for miles, spacing, n in zip(ACCEPTANCE_MILES, ACCEPTANCE_SPACINGS, ACCEPTANCE_CIRCUITS)]
    background = total_poles - sum(c.n_poles for c in corridors)
    corridor_wires = sum(c.n_poles * c.n_circuits for c in corridors)
    split = min(1.0, max(0.0, float(total_wires - corridor_wires) / background - 1.0))
    return SynthParams(seed=seed, width_m=40000, height_m=40000, background_poles=background,
                       corridors=corridors, split_fraction=split)
