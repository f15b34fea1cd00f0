"""Select the kernel implementation at import time.

``GPH_BACKEND`` chooses: ``auto`` (default; compiled if importable),
``compiled`` (fail if unavailable) or ``python``.
"""
import os

from . import _pykernels

python_kernels = _pykernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None


def _select():
    choice = os.environ.get("GPH_BACKEND", "auto").strip().lower()
    if choice == "python":
        return _pykernels
    if choice == "compiled":
        if compiled_kernels is None:
            raise ImportError("GPH_BACKEND=compiled but gph._kernels is not built")
        return compiled_kernels
    if choice != "auto":
        raise ValueError(f"unknown GPH_BACKEND {choice!r}")
    return compiled_kernels if compiled_kernels is not None else _pykernels


kernels = _select()


def available():
    """Names of the importable kernel sets."""
    names = ["python"]
    if compiled_kernels is not None:
        names.append("compiled")
    return names


def get(name):
    if name == "python":
        return _pykernels
    if name == "compiled" and compiled_kernels is not None:
        return compiled_kernels
    raise KeyError(name)
