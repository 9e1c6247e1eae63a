"""Point counts of graph hypersurfaces over finite fields."""

__version__ = "0.1.0"
