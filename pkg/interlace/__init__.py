"""Interlacing graphs, summing-norm embeddings, Schreier families and gluing."""

__version__ = "1.0.0"
