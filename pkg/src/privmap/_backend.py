"""Numeric backend selection: compiled extension if importable, else pure Python.

Set PRIVMAP_BACKEND=python or PRIVMAP_BACKEND=compiled to force a choice;
forcing the compiled backend raises if the extension was not built.
"""

from __future__ import annotations

import os

from . import _reference

_forced = os.environ.get("PRIVMAP_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _reference
    BACKEND_NAME = "python"
elif _forced == "compiled":
    from . import _kernels as _impl  # type: ignore[no-redef]

    BACKEND_NAME = "compiled"
elif _forced:
    raise ImportError(f"PRIVMAP_BACKEND must be 'python' or 'compiled', got {_forced!r}")
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND_NAME = "compiled"
    except ImportError:
        _impl = _reference
        BACKEND_NAME = "python"

gaussian_interval_mass = _impl.gaussian_interval_mass
gaussian_density_at = _impl.gaussian_density_at
kalman_predict_step = _impl.kalman_predict_step
kalman_update_step = _impl.kalman_update_step


def available_backends() -> list[str]:
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return _reference
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def use(name: str) -> str:
    """Rebind the module-level kernels to the named backend.

    Callers go through this module's attributes on every call, so the
    switch takes effect immediately. Returns the previous backend name.
    """
    global BACKEND_NAME, gaussian_interval_mass, gaussian_density_at
    global kalman_predict_step, kalman_update_step
    impl = get_backend(name)
    previous = BACKEND_NAME
    gaussian_interval_mass = impl.gaussian_interval_mass
    gaussian_density_at = impl.gaussian_density_at
    kalman_predict_step = impl.kalman_predict_step
    kalman_update_step = impl.kalman_update_step
    BACKEND_NAME = name
    return previous
