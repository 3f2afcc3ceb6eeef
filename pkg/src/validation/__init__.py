"""Circuit parsing and output contract validation."""
