"""Pointer wavefunctions on a uniform periodic grid.

Position moments are rectangle-rule sums over the q grid; momentum moments are
the same sums over the discrete momentum representation

    phi~(p_k) = dq / sqrt(2 pi hbar) * exp(-i p_k q_0 / hbar) * FFT(phi)_k,
    p_k = hbar * 2 pi k / L,   dp = hbar * 2 pi / L,

for which Parseval holds exactly. Both rules are spectrally accurate for
smooth states that have decayed at the grid edges.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_positive
from .errors import BoundaryLeak, InvalidInput, NonNormalized

NORM_TOL = 1e-10
BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 4096
    center: float = 0.0
    extent: float = 40.0
    hbar: float = 1.0

    def __post_init__(self):
        n = int(self.n_points)
        if n < 64 or n & (n - 1):
            raise InvalidInput(f"n_points must be a power of two >= 64, got {self.n_points}")
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "extent", check_positive(self.extent, "extent"))
        object.__setattr__(self, "hbar", check_positive(self.hbar, "hbar"))
        object.__setattr__(self, "center", float(self.center))

    @property
    def dq(self):
        return self.extent / self.n_points

    @property
    def dp(self):
        return self.hbar * 2.0 * np.pi / self.extent

    @property
    def q(self):
        return self.center - 0.5 * self.extent + self.dq * np.arange(self.n_points)

    @property
    def p(self):
        """Momentum grid in FFT order (``k = 0, 1, ..., -1``)."""
        return self.hbar * 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dq)


@dataclass(frozen=True, eq=False)
class PointerState:
    """Normalized complex samples ``phi(q_k)`` on ``grid``."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.n_points,):
            raise InvalidInput(f"expected {self.grid.n_points} samples, got shape {s.shape}")
        norm = float(np.sum(np.abs(s) ** 2) * self.grid.dq)
        if abs(norm - 1.0) > NORM_TOL:
            raise NonNormalized(f"pointer norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def q(self):
        return self.grid.q

    @property
    def p(self):
        return self.grid.p

    @property
    def hbar(self):
        return self.grid.hbar

    def norm(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dq)

    def boundary_ratio(self):
        """Largest edge amplitude relative to the peak amplitude."""
        a = np.abs(self.samples)
        return float(max(a[0], a[-1]) / a.max())

    def momentum_amplitudes(self):
        return to_momentum(self.grid, self.samples)

    def with_samples(self, samples, renormalize=False):
        samples = np.asarray(samples, dtype=complex)
        if renormalize:
            samples = samples / np.sqrt(np.sum(np.abs(samples) ** 2) * self.grid.dq)
        return PointerState(self.grid, samples)


def to_momentum(grid, samples):
    """Momentum amplitudes ``phi~(p_k)`` in FFT order."""
    phase = np.exp(-1j * grid.p * grid.q[0] / grid.hbar)
    return grid.dq / np.sqrt(2.0 * np.pi * grid.hbar) * phase * np.fft.fft(samples)


def from_momentum(grid, amplitudes):
    """Inverse of :func:`to_momentum`."""
    phase = np.exp(1j * grid.p * grid.q[0] / grid.hbar)
    scale = grid.n_points * grid.dp / np.sqrt(2.0 * np.pi * grid.hbar)
    return scale * np.fft.ifft(phase * np.asarray(amplitudes))


def apply_momentum(grid, samples, func):
    """Apply ``func(p_hat)`` spectrally and return the result in position space."""
    return np.fft.ifft(func(grid.p) * np.fft.fft(samples))


# --- state families -------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    sigma: float = 1.0
    q0: float = 0.0
    p0: float = 0.0


@dataclass(frozen=True)
class Chirped:
    """Centred Gaussian times ``exp(i c q^2)``."""

    sigma: float = 1.0
    c: float = 0.0


@dataclass(frozen=True)
class Cubic:
    """Centred Gaussian times ``exp(i b q^3)``."""

    sigma: float = 1.0
    b: float = 0.0


@dataclass(frozen=True)
class MomentumSkewed:
    """Momentum profile proportional to ``(1 + lam p) exp(-p^2 / 4 s^2)``."""

    s: float = 1.0
    lam: float = 0.0


@dataclass(frozen=True, eq=False)
class Tabulated:
    samples: np.ndarray
    q: Optional[np.ndarray] = None


def _envelope(q, sigma, q0=0.0):
    return np.exp(-((q - q0) ** 2) / (4.0 * sigma**2))


def build_pointer(family, grid=None):
    """Sample a state family on ``grid`` and normalize it.

    Raises
    ------
    BoundaryLeak
        If the amplitude at either grid edge exceeds 1e-10 of the peak.
    """
    grid = GridSpec() if grid is None else grid
    q = grid.q
    if isinstance(family, Gaussian):
        sigma = check_positive(family.sigma, "sigma")
        raw = _envelope(q, sigma, family.q0) * np.exp(1j * family.p0 * q / grid.hbar)
    elif isinstance(family, Chirped):
        sigma = check_positive(family.sigma, "sigma")
        raw = _envelope(q, sigma) * np.exp(1j * family.c * q**2)
    elif isinstance(family, Cubic):
        sigma = check_positive(family.sigma, "sigma")
        raw = _envelope(q, sigma) * np.exp(1j * family.b * q**3)
    elif isinstance(family, MomentumSkewed):
        s = check_positive(family.s, "s")
        p = grid.p
        raw = from_momentum(grid, (1.0 + family.lam * p) * np.exp(-(p**2) / (4.0 * s**2)))
    elif isinstance(family, Tabulated):
        raw = np.asarray(family.samples, dtype=complex)
        if raw.shape != (grid.n_points,):
            raise InvalidInput(f"tabulated state has {raw.size} samples, grid has {grid.n_points}")
        if family.q is not None and not np.allclose(family.q, q, rtol=0, atol=1e-9 * grid.extent):
            raise InvalidInput("tabulated q column does not match the grid")
    else:
        raise InvalidInput(f"unknown pointer family {family!r}")

    norm = np.sum(np.abs(raw) ** 2) * grid.dq
    if not np.isfinite(norm) or norm <= 0:
        raise InvalidInput("pointer samples have zero or non-finite norm")
    state = PointerState(grid, raw / np.sqrt(norm))
    ratio = state.boundary_ratio()
    if ratio > BOUNDARY_TOL:
        raise BoundaryLeak(
            f"edge amplitude ratio {ratio:.2e} exceeds {BOUNDARY_TOL:.0e}; enlarge the grid extent"
        )
    return state


def grid_from_positions(q, hbar=1.0):
    """Recover the :class:`GridSpec` of a uniformly spaced position column."""
    q = np.asarray(q, dtype=float)
    n = q.size
    if n < 2:
        raise InvalidInput("need at least two grid points")
    dq = (q[-1] - q[0]) / (n - 1)
    if dq <= 0 or not np.allclose(np.diff(q), dq, rtol=1e-9, atol=0):
        raise InvalidInput("position column must be uniformly increasing")
    extent = n * dq
    return GridSpec(n_points=n, center=q[0] + 0.5 * extent, extent=extent, hbar=hbar)


# --- moments -------------------------------------------------------------


@dataclass(frozen=True)
class MomentBundle:
    observable: str
    mean: float
    raw2: float
    raw3: float
    variance: float
    central3: float


def _moments(x, weights, which):
    total = np.sum(weights)
    w = weights / total
    mean = float(np.sum(x * w))
    d = x - mean
    variance = float(np.sum(d**2 * w))
    central3 = float(np.sum(d**3 * w))
    raw2 = float(np.sum(x**2 * w))
    raw3 = float(np.sum(x**3 * w))
    return MomentBundle(which, mean, raw2, raw3, variance, central3)


def stats(state, which="q"):
    """First three moments of position (``"q"``) or momentum (``"p"``)."""
    if which == "q":
        return _moments(state.q, np.abs(state.samples) ** 2, "q")
    if which == "p":
        return _moments(state.p, np.abs(state.momentum_amplitudes()) ** 2, "p")
    raise InvalidInput(f"which must be 'q' or 'p', got {which!r}")


@dataclass(frozen=True)
class RateBundle:
    """Rates of change of position moments just before the coupling.

    ``var_rate_q`` is d(Var q)/dt and ``skew_rate_q`` is d(q3)/dt where q3 is
    the third central moment. Both follow from anticommutator expectations
    and hold for any Hamiltonian ``p^2/2m + V(q)``.
    """

    mass: float
    anticom_qp: float
    anticom_q2p: float
    var_rate_q: float
    skew_rate_q: float
    mean_q: float
    mean_p: float
    raw2_q: float


def _anticommutator_p(grid, phi_p, samples, power):
    # <{q^n, p}> = 2 Re <q^n phi | p phi>, evaluated in the momentum representation
    qn_p = to_momentum(grid, grid.q**power * samples)
    return float(2.0 * np.real(np.sum(np.conj(qn_p) * grid.p * phi_p)) * grid.dp)


def initial_rates(state, mass):
    mass = check_positive(mass, "mass")
    grid = state.grid
    phi_p = state.momentum_amplitudes()
    sq = stats(state, "q")
    mean_p = stats(state, "p").mean
    a1 = _anticommutator_p(grid, phi_p, state.samples, 1)
    a2 = _anticommutator_p(grid, phi_p, state.samples, 2)
    mq = sq.mean
    var_rate = (a1 - 2.0 * mq * mean_p) / mass
    skew_rate = (
        1.5 * a2 / mass
        - 3.0 * (mean_p * sq.raw2 + mq * a1) / mass
        + 6.0 * mq**2 * mean_p / mass
    )
    return RateBundle(mass, a1, a2, float(var_rate), float(skew_rate), mq, mean_p, sq.raw2)
