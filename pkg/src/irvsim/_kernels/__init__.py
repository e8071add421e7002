"""Backend selection for the alternating-optimization kernels.

The compiled extension ``_ao`` is used when it is importable; otherwise the
numpy implementation ``_pyao`` takes over. Set ``IRVSIM_BACKEND`` to
``python`` or ``compiled`` to force one (``compiled`` fails loudly when the
extension is missing).
"""

import importlib
import os

from . import _pyao

__all__ = ["BACKEND", "load_backend", "effective_channel", "align_phases", "alternating_optimize"]


def load_backend(name):
    """Return the kernel module for ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _pyao
    if name == "compiled":
        return importlib.import_module(__name__ + "._ao")
    raise ValueError(f"unknown backend {name!r}")


def _select():
    choice = os.environ.get("IRVSIM_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "compiled", "python"):
        raise ImportError(f"IRVSIM_BACKEND must be auto, compiled or python, got {choice!r}")
    if choice == "auto":
        try:
            return "compiled", load_backend("compiled")
        except ImportError:
            return "python", _pyao
    return choice, load_backend(choice)


BACKEND, _impl = _select()
effective_channel = _impl.effective_channel
align_phases = _impl.align_phases
alternating_optimize = _impl.alternating_optimize
