r"""
Detection of multi-circuit poles and their grouping by circuit configuration.

A pole is a multi-circuit pole (MCP) when the wires associated with it belong
to more than one distinct circuit. Several wire segments of the same circuit
count once.

.. csv-table::
    :class: contentstable
    :widths: 30, 70
    :delim: |

    :class:`~CircuitSet`                 | Sorted set of distinct circuit identifiers
    :class:`~McpPole`                    | A multi-circuit pole and its circuits
    :class:`~McpGroup`                   | Multi-circuit poles sharing a circuit configuration
    :func:`~detect_mcp`                  | Classify the poles of an association table
    :func:`~group_by_configuration`      | Group multi-circuit poles by circuit configuration
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
from collections import namedtuple

from mcpzones.geometry import Point2D

logger = logging.getLogger(__name__)

GROUPING_MODES = ('exact', 'overlap')

class CircuitSet(tuple):
    r"""
    A non-empty, sorted tuple of distinct circuit identifiers.

    Identifiers are compared as exact strings after removing surrounding
    whitespace. Circuit sets compare and sort as tuples.

    EXAMPLES::

        >>> from mcpzones.detection import CircuitSet
        >>> C = CircuitSet(['B', 'A', ' B']); C
        CircuitSet(['A', 'B'])
        >>> C.label()
        'A;B'
        >>> C == CircuitSet(('A', 'B')), CircuitSet(['A', 'B']) < CircuitSet(['A', 'C'])
        (True, True)

    TESTS::

        >>> CircuitSet([])
        Traceback (most recent call last):
        ...
        ValueError: a circuit set cannot be empty
    """
    __slots__ = ()

    def __new__(cls, circuits):
        items = sorted({str(c).strip() for c in circuits})
        if not items or not all(items):
            raise ValueError("a circuit set cannot be empty")
        return super(CircuitSet, cls).__new__(cls, items)

    def __repr__(self):
        return "CircuitSet(%r)" % list(self)

    def label(self):
        """
        Get the circuit identifiers joined by ``;``.
        """
        return ';'.join(self)

McpPole = namedtuple('McpPole', ['pole_index', 'pole_id', 'location', 'circuits'])
McpPole.__doc__ = """A multi-circuit pole: ordinal, id, planar location and :class:`CircuitSet` of size at least 2."""

McpGroup = namedtuple('McpGroup', ['key', 'members'])
McpGroup.__doc__ = """Multi-circuit poles sharing the circuit configuration ``key``, by pole ordinal."""

def detect_mcp(assoc, poles):
    r"""
    Return the poles whose associated wires carry more than one circuit.

    INPUT:

    - ``assoc`` -- an :class:`~mcpzones.association.AssociationTable`

    - ``poles`` -- the :class:`~mcpzones.territory.PoleSet` it was computed for

    OUTPUT:

    A list of :class:`McpPole`, by pole ordinal.

    EXAMPLES::

        >>> from mcpzones.territory import PoleSet, WireSet
        >>> from mcpzones.association import associate
        >>> from mcpzones.detection import detect_mcp
        >>> P = PoleSet(['P1', 'P2'], [(0, 0), (1000, 0)])
        >>> W = WireSet(['W1', 'W2', 'W3', 'W4', 'W5'], ['A', 'A', 'B', 'A', 'A'],
        ...             [[(0, 5), (10, 5)], [(0, -5), (-10, -5)], [(-3, 8), (3, 8)],
        ...              [(995, 5), (1005, 5)], [(995, -5), (1005, -5)]])
        >>> detect_mcp(associate(P, W), P)
        [McpPole(pole_index=0, pole_id='P1', location=Point2D(x=0.0, y=0.0), circuits=CircuitSet(['A', 'B']))]

    TESTS:

    Equivalence with a direct recount of distinct circuits::

        >>> import numpy as np
        >>> rng = np.random.default_rng(17)
        >>> n, m = 800, 1200
        >>> P = PoleSet(['P%d' % i for i in range(n)], rng.uniform(0, 3000, (n, 2)))
        >>> start = rng.uniform(0, 3000, (m, 2))
        >>> W = WireSet(['W%d' % j for j in range(m)], ['C%d' % c for c in rng.integers(0, 4, m)],
        ...             [[tuple(a), tuple(a + (30, 0))] for a in start])
        >>> T = associate(P, W)
        >>> recount = [i for i, row in enumerate(T) if len({a.circuit_id for a in row}) > 1]
        >>> [m.pole_index for m in detect_mcp(T, P)] == recount
        True
        >>> all(len(m.circuits) >= 2 and T[m.pole_index] for m in detect_mcp(T, P))
        True
    """
    ids, coords = poles.ids(), poles.coords()
    if len(assoc) != len(ids):
        raise ValueError("association table covers %s poles, pole set has %s" % (len(assoc), len(ids)))
    mcps = []
    for i, row in enumerate(assoc):
        circuits = {a.circuit_id for a in row}
        if len(circuits) > 1:
            mcps.append(McpPole(i, ids[i], Point2D(*coords[i]), CircuitSet(circuits)))
    logger.info("detected %s multi-circuit poles among %s poles", len(mcps), len(ids))
    return mcps

def group_by_configuration(mcps, mode='exact'):
    r"""
    Group multi-circuit poles by circuit configuration.

    INPUT:

    - ``mcps`` -- list of :class:`McpPole`

    - ``mode`` -- (default: ``'exact'``) ``'exact'`` groups poles with equal
      circuit sets, which partitions the input; ``'overlap'`` makes one group
      per observed circuit set, holding every pole whose circuit set contains
      it, so that a pole may belong to several groups

    OUTPUT:

    A list of :class:`McpGroup` sorted by key; members are sorted by pole ordinal.

    EXAMPLES::

        >>> from mcpzones.detection import CircuitSet, McpPole, group_by_configuration
        >>> def mcp(i, circuits):
        ...     return McpPole(i, 'P%d' % i, (i, 0), CircuitSet(circuits))
        >>> M = [mcp(0, 'AB'), mcp(1, 'AC'), mcp(2, 'AB'), mcp(3, 'ABC')]
        >>> [(g.key.label(), [m.pole_id for m in g.members]) for g in group_by_configuration(M)]
        [('A;B', ['P0', 'P2']), ('A;B;C', ['P3']), ('A;C', ['P1'])]
        >>> [(g.key.label(), [m.pole_id for m in g.members]) for g in group_by_configuration(M, 'overlap')]
        [('A;B', ['P0', 'P2', 'P3']), ('A;B;C', ['P3']), ('A;C', ['P1', 'P3'])]
        >>> group_by_configuration([])
        []

    TESTS:

    Exact grouping is a partition into key-homogeneous groups::

        >>> import numpy as np
        >>> rng = np.random.default_rng(21)
        >>> M = [mcp(i, rng.choice(list('ABCDE'), size=int(rng.integers(2, 4)), replace=False)) for i in range(500)]
        >>> G = group_by_configuration(M)
        >>> sorted(m.pole_index for g in G for m in g.members) == list(range(500))
        True
        >>> all(m.circuits == g.key for g in G for m in g.members), [g.key for g in G] == sorted(g.key for g in G)
        (True, True)
    """
    if mode not in GROUPING_MODES:
        raise NotImplementedError("grouping mode %r is not available, expected one of %s"
                                  % (mode, ", ".join(GROUPING_MODES)))
    by_key = {}
    for m in sorted(mcps, key=lambda m: m.pole_index):
        by_key.setdefault(m.circuits, []).append(m)
    keys = sorted(by_key)
    if mode == 'exact':
        groups = [McpGroup(key, by_key[key]) for key in keys]
    else:
        groups = []
        for key in keys:
            wanted = set(key)
            members = [m for other in keys if wanted <= set(other) for m in by_key[other]]
            groups.append(McpGroup(key, sorted(members, key=lambda m: m.pole_index)))
    logger.info("grouped %s multi-circuit poles into %s configurations (%s)", len(mcps), len(groups), mode)
    return groups
