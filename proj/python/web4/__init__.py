"""Invariants and classification of planar 4-webs.

Every function takes the spec file text (the key = value format read by the
``web4`` command line) and returns the same report documents as plain dicts.
"""
import json

from . import _web4
from ._web4 import ParseError, WebError, corpus_dir, render, suite_names

__all__ = [
    "ParseError",
    "WebError",
    "classify",
    "corpus_dir",
    "invariants",
    "jet",
    "render",
    "suite_names",
    "verify",
]


def _point(value):
    return value if isinstance(value, str) else repr(value)


def invariants(spec, x, y, backend=None):
    """Invariant ladder, subweb curvatures, residuals and labels at (x, y)."""
    return json.loads(_web4.invariants(spec, _point(x), _point(y), backend))


def classify(spec, grid=None, backend=None):
    """Per-point verdicts and the aggregate over the spec's grid (or ``grid``)."""
    return json.loads(_web4.classify(spec, tuple(grid) if grid else None, backend))


def jet(expr, x, y, order, backend="float"):
    """Taylor coefficients c_ij of expr about (x, y), keyed "i,j"."""
    return json.loads(_web4.jet(expr, _point(x), _point(y), order, backend))


def verify(suite):
    """Runs one built-in verification suite."""
    return json.loads(_web4.verify(suite))
