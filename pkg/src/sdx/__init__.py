"""Sketch-storyboard to vector-animation authoring toolkit."""

__version__ = "0.1.0"
