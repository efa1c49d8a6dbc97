r"""
Import the public functions and classes of every module.

EXAMPLES::

    >>> from mcpzones.all import *
    >>> three_corridors().seed, DEFAULT_WEIGHTS.customer_impact
    (11, 30.0)
"""

from mcpzones.association import *
from mcpzones.detection import *
from mcpzones.geometry import *
from mcpzones.io import *
from mcpzones.library import *
from mcpzones.pipeline import *
from mcpzones.prioritize import *
from mcpzones.spatial_index import *
from mcpzones.synth import *
from mcpzones.territory import *
from mcpzones.utils import *
from mcpzones.zoning import *
