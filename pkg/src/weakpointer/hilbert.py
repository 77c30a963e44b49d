"""Finite-dimensional measured system: observable, pre/post-selection, weak values."""

from dataclasses import dataclass

import numpy as np

from ._validation import (
    as_complex_vector,
    as_square_matrix,
    hermiticity_residual,
    normalize_state,
)
from .errors import InvalidInput, NonHermitian, NonNormalized, VanishingOverlap

DEFAULT_OVERLAP_FLOOR = 1e-10


@dataclass(frozen=True)
class SystemSpec:
    """Hermitian observable with pre-selected and post-selected states.

    States whose norm is within 1e-6 of one are renormalized on construction;
    anything further off raises :class:`NonNormalized`. The remaining
    invariants are enforced by :func:`validate_system`, which runs here too.
    """

    observable: np.ndarray
    pre_state: np.ndarray
    post_state: np.ndarray
    overlap_floor: float = DEFAULT_OVERLAP_FLOOR

    def __post_init__(self):
        a = as_square_matrix(self.observable)
        pre = as_complex_vector(self.pre_state, "pre_state")
        post = as_complex_vector(self.post_state, "post_state")
        if pre.shape[0] != a.shape[0] or post.shape[0] != a.shape[0]:
            raise InvalidInput(
                f"dimension mismatch: observable {a.shape}, pre {pre.shape}, post {post.shape}"
            )
        object.__setattr__(self, "observable", a)
        object.__setattr__(self, "pre_state", normalize_state(pre, "pre_state"))
        object.__setattr__(self, "post_state", normalize_state(post, "post_state"))
        validate_system(self)

    @property
    def dim(self):
        return self.observable.shape[0]

    @property
    def overlap(self):
        """``<psi_f|psi_i>``."""
        return complex(np.vdot(self.post_state, self.pre_state))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SystemDiagnostics:
    hermiticity_residual: float
    pre_norm: float
    post_norm: float
    overlap_abs: float
    overlap_sq: float


def validate_system(sys, hermitian_tol=1e-12, norm_tol=1e-12):
    """Check the invariants of ``sys`` and report the measured residuals.

    Raises
    ------
    NonHermitian, NonNormalized, VanishingOverlap
        With the offending magnitude in the message.
    """
    a = np.asarray(sys.observable)
    res = hermiticity_residual(a)
    if res > hermitian_tol:
        raise NonHermitian(f"observable is not Hermitian: relative residual {res:.3e}")
    pre_norm = float(np.linalg.norm(sys.pre_state))
    post_norm = float(np.linalg.norm(sys.post_state))
    for name, n in (("pre_state", pre_norm), ("post_state", post_norm)):
        if abs(n - 1.0) > norm_tol:
            raise NonNormalized(f"{name} norm {n:.15g} deviates from 1")
    ov = abs(np.vdot(sys.post_state, sys.pre_state))
    if ov <= sys.overlap_floor:
        raise VanishingOverlap(
            f"|<psi_f|psi_i>| = {ov:.3e} is at or below the floor {sys.overlap_floor:.1e}"
        )
    return SystemDiagnostics(res, pre_norm, post_norm, float(ov), float(ov**2))


def spectrum(sys):
    """Eigen-decomposition of the observable (ascending eigenvalues)."""
    a = sys.observable
    # symmetrize so eigh sees an exactly Hermitian matrix
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return Spectrum(w, v)


def weak_moment(sys, order):
    """``<psi_f|A^m|psi_i> / <psi_f|psi_i>`` by repeated matrix-vector products."""
    order = int(order)
    if order < 1:
        raise InvalidInput(f"order must be >= 1, got {order}")
    overlap = np.vdot(sys.post_state, sys.pre_state)
    if abs(overlap) <= sys.overlap_floor:
        raise VanishingOverlap(f"|<psi_f|psi_i>| = {abs(overlap):.3e}")
    v = sys.pre_state
    for _ in range(order):
        v = sys.observable @ v
    return complex(np.vdot(sys.post_state, v) / overlap)


def weak_value(sys):
    return weak_moment(sys, 1)


def pps_weights(sys):
    """Eigenvalues ``a_j`` with the products ``c'_j* c_j`` and ``|c_j|^2``.

    ``c_j = <a_j|psi_i>`` and ``c'_j = <a_j|psi_f>``. Sums over a degenerate
    eigenspace do not depend on the basis chosen inside it.
    """
    spec = spectrum(sys)
    c = spec.eigenvectors.conj().T @ sys.pre_state
    cp = spec.eigenvectors.conj().T @ sys.post_state
    return spec.eigenvalues, cp.conj() * c, np.abs(c) ** 2


def eigenvalue_spread(sys):
    w = spectrum(sys).eigenvalues
    return float(w[-1] - w[0])


__all__ = [
    "SystemSpec",
    "Spectrum",
    "SystemDiagnostics",
    "validate_system",
    "spectrum",
    "weak_moment",
    "weak_value",
    "pps_weights",
    "eigenvalue_spread",
]
