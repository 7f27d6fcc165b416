"""Petri-net model-checking workbench."""
