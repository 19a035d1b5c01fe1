"""Workbench for the one- and two-dimensional systems of Q-lattices."""

__version__ = "0.1.0"
