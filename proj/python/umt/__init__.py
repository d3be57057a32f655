"""Finite-scale model theory: entities, bounded formulas, ultraproducts,
the star map, order-reversals and the Mostowski collapse."""

import json as _json

from . import _umt
from ._umt import (  # noqa: F401
    CapExceeded,
    Entity,
    Error,
    ParseError,
    PreconditionError,
    StarContext,
    __version__,
    enumerate_vn,
    eval_bounded,
    pair,
    parse_formula,
    run_cli,
    vn_size,
)


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def satisfies(structure, formula, assignment=None):
    """structure is a dict in the structure file format, or its JSON text."""
    return _umt.satisfies(_text(structure), formula, assignment or {})


def los_check(structures, principal, depth=2):
    """Exhaustive Los check of a family under the principal ultrafilter at
    index `principal`. Returns the report as a dict."""
    return _json.loads(_umt.los_check([_text(s) for s in structures], principal, depth))


def collapse(model):
    return _umt.collapse(_text(model))


def support_of(reversal):
    return _umt.support_of(_text(reversal))


def check_transfer(ctx, depth=1):
    return _json.loads(ctx.check_transfer(depth))


def star_algebra(ctx):
    return _json.loads(ctx.star_algebra())
