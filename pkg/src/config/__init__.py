"""Environment settings and per-run configuration."""
