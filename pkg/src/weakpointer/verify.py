"""Checks of the first-order theory against the exact engine and itself.

* :func:`convergence_order` measures how fast first-order predictions
  approach the exact post-selected statistics as the coupling shrinks.
* :func:`identity_suite` evaluates each operator identity through two
  computations that share no intermediate arrays.
* :func:`rate_suite` compares the static rate expressions against central
  finite differences of a time-evolved pointer.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ._validation import check_gammas, check_positive
from .errors import InvalidInput
from .hilbert import weak_value
from .perturb import (
    ObservablePoly,
    expectation,
    functionals,
    mean_p_closed,
    mean_q_closed,
    predict_mean,
    predict_variance,
    variance_p_closed,
    variance_q_closed,
)
from .pointer import initial_rates, stats, to_momentum
from .vonneumann import evolve, evolve_backward, measure

QUANTITIES = ("mean_q", "mean_p", "var_q", "var_p", "mean_poly", "var_poly")
DEGENERATE_FLOOR = 1e-11


@dataclass(frozen=True)
class OrderFit:
    gammas: List[float]
    residuals: List[float]
    fitted_order: float
    degenerate: bool
    ratios: List[float] = field(default_factory=list)


def exact_quantity(quantity, measured, poly=None):
    state = measured.state
    if quantity == "mean_q":
        return stats(state, "q").mean
    if quantity == "mean_p":
        return stats(state, "p").mean
    if quantity == "var_q":
        return stats(state, "q").variance
    if quantity == "var_p":
        return stats(state, "p").variance
    if poly is None:
        raise InvalidInput(f"{quantity} needs an observable polynomial")
    mean = expectation(poly, state)
    if quantity == "mean_poly":
        return mean
    if quantity == "var_poly":
        return expectation(poly.squared(), state) - mean**2
    raise InvalidInput(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def predicted_quantity(quantity, scenario, gamma, poly=None):
    sys, ptr, hbar = scenario.system, scenario.pointer, scenario.hbar
    aw = weak_value(sys)
    if quantity == "mean_q":
        return mean_q_closed(aw, stats(ptr, "q"), initial_rates(ptr, scenario.mass), gamma, hbar)
    if quantity == "mean_p":
        return mean_p_closed(aw, stats(ptr, "p"), gamma, hbar)
    if quantity == "var_q":
        return variance_q_closed(aw, stats(ptr, "q"), initial_rates(ptr, scenario.mass), gamma, hbar)
    if quantity == "var_p":
        return variance_p_closed(aw, stats(ptr, "p"), gamma, hbar)
    if poly is None:
        raise InvalidInput(f"{quantity} needs an observable polynomial")
    if quantity == "mean_poly":
        return predict_mean(poly, sys, ptr, gamma)
    if quantity == "var_poly":
        return predict_variance(poly, sys, ptr, gamma)
    raise InvalidInput(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def convergence_order(scenario, quantity, gammas, poly=None):
    """Fit the power law of ``|exact - predicted|`` against the coupling.

    The fitted order is the least-squares slope of log residual against
    log gamma; it is NaN when every residual sits at the noise floor, in
    which case the fit is flagged degenerate.
    """
    if quantity not in QUANTITIES:
        raise InvalidInput(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    g = np.sort(np.abs(check_gammas(gammas, min_len=3)))[::-1]
    if np.any(g == 0):
        raise InvalidInput("gammas must be nonzero")
    residuals, scale = [], 1.0
    for gamma in g:
        exact = exact_quantity(quantity, measure(scenario.system, scenario.pointer, gamma), poly)
        pred = predicted_quantity(quantity, scenario, gamma, poly)
        residuals.append(abs(exact - pred))
        scale = max(scale, abs(exact))
    r = np.array(residuals)
    degenerate = bool(r.max() <= DEGENERATE_FLOOR * scale)
    if degenerate:
        order = float("nan")
    else:
        tiny = np.finfo(float).tiny
        order = float(np.polyfit(np.log(g), np.log(np.maximum(r, tiny)), 1)[0])
    ratios = [float(a / b) if b > 0 else float("inf") for a, b in zip(r[:-1], r[1:])]
    return OrderFit([float(x) for x in g], [float(x) for x in r], order, degenerate, ratios)


# --- identity suite ------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    residuals: Dict[str, float]
    thresholds: Dict[str, float]
    grid_error: float
    passed: bool
    values: Dict[str, float] = field(default_factory=dict)


def grid_error_estimate(pointer):
    """Crude resolution indicator: edge amplitude and outer-band spectral content."""
    phi_p = np.abs(to_momentum(pointer.grid, pointer.samples))
    k = np.abs(np.fft.fftfreq(pointer.grid.n_points))
    spectral = float(phi_p[k >= 0.25].max() / phi_p.max())
    return max(pointer.boundary_ratio(), spectral)


def _rel(a, b, floor):
    return abs(a - b) / max(abs(a), abs(b), floor)


def _direct_skew_rate(pointer, mass):
    # dq3/dt from the q-space probability current j = (hbar/m) Im(phi* dphi/dq),
    # with the derivative taken spectrally: d<f(q)>/dt = <f'(q) j>
    grid = pointer.grid
    dphi = np.fft.ifft(1j * (grid.p / grid.hbar) * np.fft.fft(pointer.samples))
    current = (grid.hbar / mass) * np.imag(np.conj(pointer.samples) * dphi)
    rho = np.abs(pointer.samples) ** 2
    norm = np.sum(rho)
    q = grid.q
    mean = np.sum(q * rho) / norm
    d = q - mean
    # q3 = <(q - <q>)^3>; d/dt = 3<(q-<q>)^2 j> - 3 d<q>/dt <(q-<q>)^2>, last factor is Var q
    dmean = np.sum(current) / norm
    return float(3.0 * np.sum(d**2 * current) / norm - 3.0 * dmean * np.sum(d**2 * rho) / norm)


def identity_suite(pointer, mass, tol=1e-9):
    """Evaluate the operator identities behind the compact variance forms.

    Items (all reported as relative residuals):

    ``F_q``, ``F_p``
        ``|F(M)|`` for ``M = q, p`` scaled by ``hbar * Var M``.
    ``G_q``
        ``G(q)`` by direct operator quadrature against ``(2m/3) dq3/dt`` from
        the momentum-representation rates.
    ``G_p``
        ``G(p)`` by operator quadrature against ``2 p3`` from the momentum
        density.
    ``skew_rate_current``
        the momentum-space ``dq3/dt`` against a probability-current quadrature.
    ``var_rate_assembly``, ``skew_rate_assembly``
        internal consistency of the rate bundle.
    """
    mass = check_positive(mass, "mass")
    hbar = pointer.hbar
    mq, mp = stats(pointer, "q"), stats(pointer, "p")
    rates = initial_rates(pointer, mass)
    fq = functionals(ObservablePoly.position(), pointer)
    fp = functionals(ObservablePoly.momentum(), pointer)
    g_q_route = (2.0 * mass / 3.0) * rates.skew_rate_q
    g_p_route = 2.0 * mp.central3
    skew_current = _direct_skew_rate(pointer, mass)

    floor_gq = hbar * np.sqrt(mq.variance)
    floor_gp = mp.variance**1.5
    floor_rate = hbar / mass
    var_assembled = (rates.anticom_qp - 2.0 * rates.mean_q * rates.mean_p) / mass
    skew_assembled = (
        1.5 * rates.anticom_q2p / mass
        - 3.0 * (rates.mean_p * rates.raw2_q + rates.mean_q * rates.anticom_qp) / mass
        + 6.0 * rates.mean_q**2 * rates.mean_p / mass
    )
    residuals = {
        "F_q": abs(fq.F) / (hbar * mq.variance),
        "F_p": abs(fp.F) / (hbar * mp.variance),
        "G_q": _rel(fq.G, g_q_route, floor_gq),
        "G_p": _rel(fp.G, g_p_route, floor_gp),
        "skew_rate_current": _rel(rates.skew_rate_q, skew_current, floor_rate),
        "var_rate_assembly": _rel(rates.var_rate_q, var_assembled, floor_rate),
        "skew_rate_assembly": _rel(rates.skew_rate_q, skew_assembled, floor_rate),
    }
    grid_error = grid_error_estimate(pointer)
    threshold = tol + 10.0 * grid_error
    thresholds = {k: threshold for k in residuals}
    values = {
        "G_q": fq.G,
        "G_q_from_rates": g_q_route,
        "G_p": fp.G,
        "G_p_from_moments": g_p_route,
        "skew_rate_q": rates.skew_rate_q,
        "var_rate_q": rates.var_rate_q,
    }
    passed = all(residuals[k] <= thresholds[k] for k in residuals)
    return IdentityReport(residuals, thresholds, grid_error, passed, values)


# --- rate suite ---------------------------------------------------------------


def named_potential(name):
    if name in (None, "free"):
        return None
    if name == "harmonic":
        return lambda q: 0.5 * q**2
    if name == "quartic":
        return lambda q: 0.25 * q**4
    raise InvalidInput(f"unknown potential {name!r}; expected free, harmonic or quartic")


def _position_moments(state):
    m = stats(state, "q")
    return np.array([m.variance, m.central3, m.raw2])


@dataclass(frozen=True)
class RateReport:
    dt: float
    analytic: Dict[str, float]
    finite_difference: Dict[str, float]
    mismatch: Dict[str, float]
    mismatch_half: Dict[str, float]
    richardson: Dict[str, Optional[float]]
    degenerate: Dict[str, bool]


RATE_KEYS = ("var_rate_q", "skew_rate_q", "raw2_rate_q")


def _fd_rates(pointer, potential, mass, dt):
    plus = evolve(pointer, potential, mass, dt, 1)
    minus = evolve_backward(pointer, potential, mass, dt, 1)
    return (_position_moments(plus) - _position_moments(minus)) / (2.0 * dt)


def rate_suite(pointer, potential, mass, dt):
    """Finite-difference check of the pre-coupling rates at ``dt`` and ``dt/2``.

    ``richardson`` is the ratio of mismatches at ``dt`` and ``dt/2``; it is
    ``None`` where the mismatch at ``dt`` is already at round-off level
    (for instance a free pointer, whose second moments are exactly quadratic
    in time), and the item is flagged degenerate.
    """
    mass = check_positive(mass, "mass")
    dt = check_positive(dt, "dt")
    if isinstance(potential, str) or potential is None:
        potential = named_potential(potential)
    rates = initial_rates(pointer, mass)
    analytic = np.array([rates.var_rate_q, rates.skew_rate_q, rates.anticom_qp / mass])
    fd = _fd_rates(pointer, potential, mass, dt)
    fd_half = _fd_rates(pointer, potential, mass, 0.5 * dt)
    mis = np.abs(fd - analytic)
    mis_half = np.abs(fd_half - analytic)
    # round-off in a moment difference divided by 2 dt
    scale = max(stats(pointer, "q").variance, 1.0) ** 1.5
    noise = 1e-13 * scale / dt
    rich, degen = {}, {}
    for key, a, b in zip(RATE_KEYS, mis, mis_half):
        degen[key] = bool(a <= 100.0 * noise)
        rich[key] = None if degen[key] or b == 0 else float(a / b)
    return RateReport(
        dt=dt,
        analytic=dict(zip(RATE_KEYS, analytic.tolist())),
        finite_difference=dict(zip(RATE_KEYS, fd.tolist())),
        mismatch=dict(zip(RATE_KEYS, mis.tolist())),
        mismatch_half=dict(zip(RATE_KEYS, mis_half.tolist())),
        richardson=rich,
        degenerate=degen,
    )
