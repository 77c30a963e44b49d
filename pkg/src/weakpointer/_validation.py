"""Input validation helpers shared by the modules and the estimator API."""

import numpy as np

from .errors import InvalidInput, NonHermitian, NonNormalized

#: states whose norm is off by at most this much are renormalized silently
RENORMALIZE_SLACK = 1e-6


def as_complex_vector(x, name="state"):
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInput(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return arr


def as_square_matrix(x, name="observable"):
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInput(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return arr


def hermiticity_residual(a):
    """Return ``max|A - A^H| / max|A|`` (0 for the zero matrix)."""
    scale = np.max(np.abs(a))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)) / scale)


def check_hermitian(a, tol=1e-12):
    res = hermiticity_residual(a)
    if res > tol:
        raise NonHermitian(f"observable is not Hermitian: relative residual {res:.3e} > {tol:.1e}")
    return res


def normalize_state(v, name="state", slack=RENORMALIZE_SLACK):
    """Renormalize ``v`` if its norm is within ``slack`` of one, else raise."""
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > slack:
        raise NonNormalized(f"{name} has norm {norm:.12g}; expected 1 within {slack:.0e}")
    return v / norm


def check_gammas(gammas, min_len=1):
    """Validate a list of coupling strengths and return it as a float array."""
    arr = np.atleast_1d(np.asarray(gammas, dtype=float))
    if arr.ndim != 1:
        raise InvalidInput("gammas must be one-dimensional")
    if arr.size < min_len:
        raise InvalidInput(f"need at least {min_len} gamma value(s), got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("gammas must be finite")
    return arr


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise InvalidInput(f"{name} must be positive, got {value!r}")
    return value
