# This is the init file for mcpzones.
