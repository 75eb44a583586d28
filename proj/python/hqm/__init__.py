"""Hermitian theta series, special cycle classes and their modularity checks."""

import json

from . import _core
from ._core import ValidationError, commands

__all__ = [
    "ValidationError",
    "boundary_analyze",
    "boundary_correct",
    "commands",
    "field_info",
    "fspace_dim",
    "modularity_check",
    "qexp",
    "run",
    "sl2_check",
]


def run(command, request=None, *, precision=128, tol=1e-8, trunc=None, workers=1):
    """Run a CLI command in process. `request` is a dict with the same keys as the CLI flags."""
    req = json.dumps(request or {})
    out = _core.run(command, req, precision, tol, None if trunc is None else str(trunc), workers)
    return json.loads(out)


def field_info(d):
    return run("field info", {"d": d})


def fspace_dim(n, g):
    return _core.fspace_dim(n, g)


def sl2_check(n=None, gram=None, d=1):
    req = {"d": d}
    if gram is not None:
        req["gram"] = gram
    else:
        req["n"] = n
    return run("fspace sl2-check", req)["pass"]


def qexp(gram, g=1, kind="weighted", poly="h", d=1, trunc=None, test_classes=False, workers=1):
    req = {"d": d, "gram": gram, "g": g, "kind": kind, "test_classes": test_classes}
    if kind in ("weighted", "completed"):
        req["poly"] = poly
    return run("qexp", req, trunc=trunc, workers=workers)


def modularity_check(gram, g=1, kind="completed", poly="h", d=1, generator="w", tau="i",
                     A=None, B=None, tol=1e-8, trunc=None, precision=128, test_classes=False, workers=1):
    req = {"d": d, "gram": gram, "g": g, "kind": kind, "generator": generator, "tau": tau,
           "test_classes": test_classes}
    if kind in ("weighted", "completed"):
        req["poly"] = poly
    if A is not None:
        req["A"] = A
    if B is not None:
        req["B"] = B
    return run("modularity check", req, precision=precision, tol=tol, trunc=trunc, workers=workers)


def boundary_analyze(gram, d=1, e=None):
    return run("boundary analyze", {"d": d, "gram": gram, "e": e})


def boundary_correct(gram, N, g=1, d=1, e=None, cosets=None, workers=1):
    req = {"d": d, "gram": gram, "g": g, "N": N, "e": e}
    if cosets is not None:
        req["cosets"] = cosets
    return run("boundary correct", req, workers=workers)
