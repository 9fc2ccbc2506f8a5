"""Numeric kernels for the fiber computations.

The numba backend is used when numba imports and ``MIRRORCELL_NUMBA`` is not
set to ``0``; otherwise the pure-numpy backend is used. Both backends expose
the same functions and agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

from . import _numpy

_FUNCS = (
    "map_f",
    "fiber_residual",
    "jacobian",
    "min_abs_forms",
    "homogeneous_residual",
    "homogeneous_gradients",
    "euler_terms",
)


def numba_requested() -> bool:
    return os.environ.get("MIRRORCELL_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


def load_backend(name: str):
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if numba_requested():
        try:
            return "numba", load_backend("numba")
        except ImportError:
            pass
    return "numpy", _numpy


BACKEND, _impl = _select()


def _wrap(name):
    fn = getattr(_impl, name)

    def call(*args):
        args = tuple(np.ascontiguousarray(a, dtype=complex) if isinstance(a, np.ndarray) else a
                     for a in args)
        return fn(*args)

    call.__name__ = name
    call.__doc__ = getattr(_numpy, name).__doc__
    return call


map_f = _wrap("map_f")
fiber_residual = _wrap("fiber_residual")
jacobian = _wrap("jacobian")
min_abs_forms = _wrap("min_abs_forms")
homogeneous_residual = _wrap("homogeneous_residual")
homogeneous_gradients = _wrap("homogeneous_gradients")
euler_terms = _wrap("euler_terms")

__all__ = ["BACKEND", "load_backend", "numba_requested", *_FUNCS]
