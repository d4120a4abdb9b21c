"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``MINH2R_PURE=1`` to force the numpy implementation.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("MINH2R_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled

        _impl = _compiled
        BACKEND = "cython"
    except ImportError:
        pass

GL_NODES = _kernels_py.GL_NODES
GL_WEIGHTS = _kernels_py.GL_WEIGHTS
tri_terms = _impl.tri_terms
tri_weights = _impl.tri_weights
tri_energy_delta = _impl.tri_energy_delta
edge_lengths = _impl.edge_lengths
