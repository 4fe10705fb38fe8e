"""Finite-stage Bourgain-Delbaen constructions, retractional bases and free-space norms."""
