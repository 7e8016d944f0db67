"""Workbench for coloured omega-operads with the loop-restricted contractibility."""

__version__ = "0.1.0"
