"""Exact impulsive von Neumann measurement on a grid pointer.

Every translation ``S(x) = exp(-i x p / hbar)`` is applied as a phase in the
momentum representation, which is exact to machine precision on the periodic
grid as long as the shifted state stays clear of the edges. The first-order
expansion in the coupling is never used here; this module is the reference
the perturbative predictions are checked against.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .errors import InvalidInput, TranslationOverflow, VanishingOverlap
from .hilbert import pps_weights
from .pointer import PointerState, apply_momentum

#: maximum |gamma * a_j| as a fraction of the grid extent
MAX_SHIFT_FRACTION = 1.0 / 8.0
POSTSELECT_FLOOR = 1e-20


@dataclass(frozen=True, eq=False)
class PostSelectedPointer:
    state: PointerState
    postselect_prob: float
    gamma: float


def translate(pointer, shift):
    """Samples of ``S(shift) phi``, i.e. ``phi(q - shift)``."""
    hbar = pointer.hbar
    return apply_momentum(pointer.grid, pointer.samples, lambda p: np.exp(-1j * shift * p / hbar))


def _check_shift(eigenvalues, gamma, grid):
    largest = abs(gamma) * float(np.max(np.abs(eigenvalues)))
    limit = MAX_SHIFT_FRACTION * grid.extent
    if largest > limit:
        raise TranslationOverflow(
            f"largest translation |gamma a_j| = {largest:.4g} exceeds L/8 = {limit:.4g}"
        )


def _group(eigenvalues, weights, tol=1e-12):
    # merge (near-)degenerate eigenvalues so each distinct shift is applied once
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    merged_a, merged_w = [], []
    for a, w in zip(eigenvalues, weights):
        if merged_a and abs(a - merged_a[-1]) <= tol * scale:
            merged_w[-1] += w
        else:
            merged_a.append(float(a))
            merged_w.append(w)
    return merged_a, merged_w


def measure(sys, pointer, gamma):
    """Couple, post-select, and return the normalized conditioned pointer.

    The unnormalized pointer is ``sum_j c'_j* c_j S(gamma a_j) phi``; its
    squared norm (same quadrature as the pointer norm) is the post-selection
    probability.
    """
    gamma = float(gamma)
    a, w_pps, _ = pps_weights(sys)
    _check_shift(a, gamma, pointer.grid)
    psi = np.zeros(pointer.grid.n_points, dtype=complex)
    for aj, wj in zip(*_group(a, w_pps)):
        if wj != 0:
            psi += wj * translate(pointer, gamma * aj)
    prob = float(np.sum(np.abs(psi) ** 2) * pointer.grid.dq)
    if prob <= POSTSELECT_FLOOR:
        raise VanishingOverlap(f"post-selection probability {prob:.3e} is numerically zero")
    return PostSelectedPointer(PointerState(pointer.grid, psi / np.sqrt(prob)), prob, gamma)


def strong_distribution(sys, pointer, gamma):
    """Pointer density after a strong measurement without post-selection."""
    gamma = float(gamma)
    a, _, born = pps_weights(sys)
    _check_shift(a, gamma, pointer.grid)
    density = np.zeros(pointer.grid.n_points)
    for aj, pj in zip(*_group(a, born)):
        if pj != 0:
            density += pj * np.abs(translate(pointer, gamma * aj)) ** 2
    return density


def _strang(samples, grid, potential, mass, dt, steps):
    half_kick = np.exp(-0.5j * dt * potential / grid.hbar)
    drift = np.exp(-0.5j * dt * grid.p**2 / (mass * grid.hbar))
    psi = np.asarray(samples, dtype=complex)
    for _ in range(steps):
        psi = half_kick * np.fft.ifft(drift * np.fft.fft(half_kick * psi))
    return psi


def evolve(pointer, potential, mass, dt, steps):
    """Propagate under ``p^2/2m + V(q)`` with the Strang split-step scheme.

    Parameters
    ----------
    potential : array_like or callable or None
        ``V`` sampled on the pointer grid, or a function of ``q``. ``None``
        means a free pointer.
    """
    mass = check_positive(mass, "mass")
    dt = check_positive(dt, "dt")
    steps = int(steps)
    if steps < 0:
        raise InvalidInput("steps must be non-negative")
    v = sample_potential(pointer.grid, potential)
    psi = _strang(pointer.samples, pointer.grid, v, mass, dt, steps)
    # drift in norm is round-off only; fold it back so the state stays valid
    return pointer.with_samples(psi, renormalize=True)


def evolve_backward(pointer, potential, mass, dt, steps):
    """Propagate to negative time using time reversal of a real Hamiltonian."""
    flipped = pointer.with_samples(np.conj(pointer.samples))
    out = evolve(flipped, potential, mass, dt, steps)
    return pointer.with_samples(np.conj(out.samples))


def sample_potential(grid, potential):
    if potential is None:
        return np.zeros(grid.n_points)
    if callable(potential):
        v = np.asarray(potential(grid.q), dtype=float)
    else:
        v = np.asarray(potential)
        if np.iscomplexobj(v):
            raise InvalidInput("potential must be real-valued")
        v = v.astype(float)
    v = np.broadcast_to(v, (grid.n_points,)).copy()
    if not np.all(np.isfinite(v)):
        raise InvalidInput("potential must be finite on the grid")
    return v
