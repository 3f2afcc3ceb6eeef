"""Simulation and analysis services."""
