import sys

from mcpzones.cli import main

sys.exit(main())
