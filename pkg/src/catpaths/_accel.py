"""Backend selection for the hot loops.

``CATPATHS_BACKEND`` picks ``numba`` or ``numpy``; ``auto`` (the default) uses
numba when it imports.
"""

from __future__ import annotations

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the install
    numba = None
    HAVE_NUMBA = False

BACKENDS = ("auto", "numba", "numpy")


def resolve(backend: str | None = None) -> str:
    name = (backend or os.environ.get("CATPATHS_BACKEND", "auto")).strip().lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if name == "numba" and not HAVE_NUMBA:
        raise ImportError("CATPATHS_BACKEND=numba but numba is not installed")
    return name


def njit(**kw):
    """``numba.njit`` when available, otherwise leave the function as is."""

    def wrap(fn):
        if HAVE_NUMBA:
            return numba.njit(**kw)(fn)
        return fn

    return wrap
