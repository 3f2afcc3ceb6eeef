"""Transport layer: the command-line interface."""
