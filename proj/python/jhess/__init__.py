"""Metrised Jordan algebras and Hessian potentials with parallel derivatives."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import load_potential as _load_potential
from ._core import parse_algebra as _parse_algebra


def algebra_from_spec(spec):
    """Build a MetrisedAlgebra from a spec dict or JSON string."""
    return _parse_algebra(spec if isinstance(spec, str) else _json.dumps(spec))


def potential_from_spec(spec):
    """Return (field, anchor) for a potential spec dict or JSON string."""
    return _load_potential(spec if isinstance(spec, str) else _json.dumps(spec))
