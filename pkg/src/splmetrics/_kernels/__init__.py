"""Pairwise-similarity kernels.

Two interchangeable backends fill similarity matrices from packed
component arrays: a compiled Cython extension (built at install time)
and a pure-Python reference implementation. The compiled backend is
selected at import when present; both produce bitwise-identical output.

Set SPLMETRICS_BACKEND=python or =cython to force one.
"""

import os

from ..errors import ConfigurationError
from . import _purepy

try:
    from . import _simkernel
except ImportError:
    _simkernel = None

_BACKENDS = {"python": _purepy}
if _simkernel is not None:
    _BACKENDS["cython"] = _simkernel

DEFAULT_BACKEND = "cython" if _simkernel is not None else "python"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str | None = None):
    """Resolve a kernel backend: explicit name > env override > default.

    Returns (name, module). Raises ConfigurationError for unknown or
    unbuilt backends.
    """
    if name is None:
        name = os.environ.get("SPLMETRICS_BACKEND") or DEFAULT_BACKEND
    try:
        return name, _BACKENDS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown or unavailable kernel backend {name!r}; "
            f"available: {', '.join(available_backends())}") from None
