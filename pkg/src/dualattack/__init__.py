"""Desk-scale laboratory for dual attacks on binary linear-code decoding."""

__version__ = "0.1.0"

from ._kernels import BACKEND, HAS_NUMBA

__all__ = ["BACKEND", "HAS_NUMBA", "__version__"]
