"""Command-line transport."""
