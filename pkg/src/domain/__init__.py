"""Domain entities and error taxonomy."""
