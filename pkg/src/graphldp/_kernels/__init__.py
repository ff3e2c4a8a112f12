"""Monte Carlo kernel backend selection.

The compiled extension is used when importable; otherwise the pure NumPy
implementation takes over.  Setting the environment variable
``GRAPHLDP_PURE_KERNELS`` to a non-empty value other than ``0`` forces the
pure backend.  Both backends implement the same contracts; see
:func:`backend_name` for which one is active and :func:`load_backend` to
obtain a specific one (used by the benchmark and the cross-backend tests).
"""

from __future__ import annotations

import os

from . import _mc_py as _pure

_FORCE_PURE = os.environ.get("GRAPHLDP_PURE_KERNELS", "") not in ("", "0")

if _FORCE_PURE:
    _active = _pure
    _BACKEND = "pure"
else:
    try:
        from . import _mc as _compiled  # type: ignore[attr-defined]

        _active = _compiled
        _BACKEND = "compiled"
    except ImportError:
        _active = _pure
        _BACKEND = "pure"

conditional_isolated_counts = _active.conditional_isolated_counts
coupled_discrepancy_stats = _active.coupled_discrepancy_stats
allocation_profile_hist = _active.allocation_profile_hist
allocation_empty_counts = _active.allocation_empty_counts

__all__ = [
    "allocation_empty_counts",
    "allocation_profile_hist",
    "backend_name",
    "conditional_isolated_counts",
    "coupled_discrepancy_stats",
    "load_backend",
]


def backend_name() -> str:
    """Name of the active kernel backend: ``compiled`` or ``pure``."""
    return _BACKEND


def load_backend(name: str):
    """Load a kernel backend module by name, independent of the default.

    Raises :class:`ImportError` when the compiled backend is requested but
    was not built.
    """
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _mc as compiled  # type: ignore[attr-defined]

        return compiled
    raise ValueError(f"unknown backend {name!r}")
