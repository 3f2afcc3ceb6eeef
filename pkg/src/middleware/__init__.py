"""Error handling and logging setup."""
