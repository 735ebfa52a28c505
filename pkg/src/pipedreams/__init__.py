"""Random pipe dreams and random subwords of words in adjacent transpositions."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
