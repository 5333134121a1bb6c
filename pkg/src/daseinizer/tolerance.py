"""Global numeric tolerance.

The algebra assumes exact operators; every floating-point
comparison in the package goes through the absolute max-norm tolerance kept
here. ``DASEINIZER_EPS`` overrides the default at import time.
"""

import os
from contextlib import contextmanager

DEFAULT_EPS = 1e-9
KEY_DECIMALS = 6

_eps = float(os.environ.get("DASEINIZER_EPS", DEFAULT_EPS))


def get_eps() -> float:
    return _eps


def set_eps(value: float) -> None:
    global _eps
    value = float(value)
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {value}")
    _eps = value


@contextmanager
def tolerance(value: float):
    """Temporarily run with a different tolerance."""
    old = _eps
    set_eps(value)
    try:
        yield
    finally:
        set_eps(old)


def cluster_tol(norm: float) -> float:
    """Eigenvalue clustering tolerance for an operator of the given norm."""
    return 1e-8 * max(1.0, norm)
