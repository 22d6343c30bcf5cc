"""Kernel backend selection.

The compiled extension is used when it imports; ``QDL_PURE_PYTHON=1`` forces
the numpy fallback.
"""
import contextlib
import os

from . import _fallback

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = {"python": _fallback}
if _kernels is not None:
    BACKENDS["cython"] = _kernels

if os.environ.get("QDL_PURE_PYTHON", "") not in ("", "0") or _kernels is None:
    _active = _fallback
else:
    _active = _kernels


def active():
    return _active


def get(name=None):
    if name is None:
        return _active
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}") from None


@contextlib.contextmanager
def use(name):
    """Temporarily switch the process-wide backend."""
    global _active
    previous = _active
    _active = get(name)
    try:
        yield _active
    finally:
        _active = previous
