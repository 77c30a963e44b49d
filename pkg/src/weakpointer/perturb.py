"""First-order pointer statistics after a weak measurement.

All predictions keep terms through first order in ``gamma / hbar``. Operator
expectations here are evaluated in the position representation with ``p``
applied spectrally. :mod:`weakpointer.pointer` computes the same
anticommutators in the momentum representation, and the two routes are
compared in :mod:`weakpointer.verify`.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from ._validation import check_positive
from .errors import InvalidInput, NonPositiveEpsilon
from .hilbert import eigenvalue_spread, weak_value
from .pointer import apply_momentum, initial_rates, stats


@dataclass(frozen=True)
class ObservablePoly:
    """Pointer observable ``sum_k c_k B^k`` with ``B`` either ``q`` or ``p``."""

    basis: str
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        if self.basis not in ("q", "p"):
            raise InvalidInput(f"basis must be 'q' or 'p', got {self.basis!r}")
        coeffs = tuple(float(c) for c in np.atleast_1d(self.coefficients))
        if not coeffs or not any(coeffs):
            raise InvalidInput("observable needs at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def position(cls):
        return cls("q", (0.0, 1.0))

    @classmethod
    def momentum(cls):
        return cls("p", (0.0, 1.0))

    def squared(self):
        return ObservablePoly(self.basis, tuple(P.polymul(self.coefficients, self.coefficients)))

    @property
    def label(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            op = "" if k == 0 else (self.basis if k == 1 else f"{self.basis}^{k}")
            coef = "" if (c == 1 and k) else repr(c)
            terms.append(f"{coef}{'*' if coef and op else ''}{op}")
        return "+".join(terms)

    def apply(self, pointer, samples=None):
        s = pointer.samples if samples is None else samples
        if self.basis == "q":
            return P.polyval(pointer.q, self.coefficients) * s
        return apply_momentum(pointer.grid, s, lambda p: P.polyval(p, self.coefficients))


def _inner(pointer, a, b):
    return complex(np.sum(np.conj(a) * b) * pointer.grid.dq)


def _p_phi(pointer):
    return apply_momentum(pointer.grid, pointer.samples, lambda p: p)


def expectation(M, pointer):
    return _inner(pointer, pointer.samples, M.apply(pointer)).real


def commutator_p(M, pointer):
    """``<[M, p]>`` (purely imaginary)."""
    return 2j * _inner(pointer, M.apply(pointer), _p_phi(pointer)).imag


def anticommutator_p(M, pointer):
    """``<{M, p}>``."""
    return 2.0 * _inner(pointer, M.apply(pointer), _p_phi(pointer)).real


@dataclass(frozen=True)
class Functionals:
    F: complex
    G: float


def functionals(M, pointer):
    """Coefficients of ``Re A_w`` and ``Im A_w`` in the first-order variance."""
    M2 = M.squared()
    mean = expectation(M, pointer)
    var = expectation(M2, pointer) - mean**2
    mean_p = expectation(ObservablePoly.momentum(), pointer)
    F = commutator_p(M2, pointer) - 2.0 * mean * commutator_p(M, pointer)
    G = anticommutator_p(M2, pointer) - 2.0 * mean * anticommutator_p(M, pointer) - 2.0 * mean_p * (
        var - mean**2
    )
    return Functionals(complex(F), float(G))


def predict_mean(M, sys, pointer, gamma, mass=None):
    """First-order ``<M>`` after coupling with strength ``gamma``.

    ``mass`` is accepted for signature symmetry with :func:`predict_variance`;
    the general expression does not need it.
    """
    aw = weak_value(sys)
    g = float(gamma) / pointer.hbar
    mean = expectation(M, pointer)
    mean_p = expectation(ObservablePoly.momentum(), pointer)
    value = (
        mean
        - 1j * g * aw.real * commutator_p(M, pointer)
        + g * aw.imag * (anticommutator_p(M, pointer) - 2.0 * mean * mean_p)
    )
    return float(value.real)


def predict_variance(M, sys, pointer, gamma, mass=None):
    aw = weak_value(sys)
    g = float(gamma) / pointer.hbar
    mean = expectation(M, pointer)
    var = expectation(M.squared(), pointer) - mean**2
    f = functionals(M, pointer)
    return float((var - 1j * g * aw.real * f.F + g * aw.imag * f.G).real)


# --- closed forms for q and p -------------------------------------------------


def mean_q_closed(weak, moments_q, rates, gamma, hbar):
    return moments_q.mean + gamma * weak.real + (gamma / hbar) * weak.imag * rates.mass * rates.var_rate_q


def mean_p_closed(weak, moments_p, gamma, hbar):
    return moments_p.mean + 2.0 * (gamma / hbar) * weak.imag * moments_p.variance


def variance_q_closed(weak, moments_q, rates, gamma, hbar):
    return moments_q.variance + (2.0 * gamma * rates.mass / (3.0 * hbar)) * weak.imag * rates.skew_rate_q


def variance_p_closed(weak, moments_p, gamma, hbar):
    return moments_p.variance + (2.0 * gamma / hbar) * weak.imag * moments_p.central3


@dataclass(frozen=True)
class ControlAssessment:
    which: str
    term: float
    lower_bound: float
    satisfied: bool
    status: str  # "inside", "boundary" or "outside"
    predicted_variance: float


def _assess(which, term, lower, variance0, scale_factor):
    # round-off in rates of an exactly symmetric state leaves |term| ~ 1e-17
    if abs(term) <= 1e-12 * max(1.0, abs(lower)):
        term = 0.0
    satisfied = lower < term <= 0.0
    if term == 0.0:
        status = "boundary"
    elif satisfied:
        status = "inside"
    else:
        status = "outside"
    return ControlAssessment(which, term, lower, satisfied, status, variance0 + scale_factor * term)


def control_assessment(which, sys, pointer, gamma, mass):
    """Variance-control term, its lower bound, and whether it lies in the window.

    Inside the window ``lower_bound < term <= 0`` the first-order variance
    after the measurement is positive and no larger than before.
    """
    gamma = check_positive(gamma, "gamma")
    mass = check_positive(mass, "mass")
    hbar = pointer.hbar
    aw = weak_value(sys)
    if which == "q":
        mq = stats(pointer, "q")
        rates = initial_rates(pointer, mass)
        lower = -(3.0 * hbar / (2.0 * gamma * mass)) * mq.variance
        return _assess("q", aw.imag * rates.skew_rate_q, lower, mq.variance, 2.0 * gamma * mass / (3.0 * hbar))
    if which == "p":
        mp = stats(pointer, "p")
        lower = -(hbar / (2.0 * gamma)) * mp.variance
        return _assess("p", aw.imag * mp.central3, lower, mp.variance, 2.0 * gamma / hbar)
    raise InvalidInput(f"which must be 'q' or 'p', got {which!r}")


REASON_REAL_WEAK_VALUE = "weak value is real valued"
REASON_IMAGINARY_WEAK_VALUE = "weak value is purely imaginary"
REASON_ZERO_VAR_RATE = "initial position-variance rate is zero"
REASON_ZERO_P_VARIANCE = "initial momentum variance is zero"


@dataclass(frozen=True)
class SensitivityBundle:
    """Squared measurement sensitivities.

    Entries that cannot be formed are ``None`` with the reason in
    ``undefined``. ``caveats`` marks values that are computable but not
    informative, and ``negative`` lists entries the control term has driven
    below zero.
    """

    dq2_re: Optional[float]
    dq2_im: Optional[float]
    dp2_im: Optional[float]
    undefined: Dict[str, str] = field(default_factory=dict)
    caveats: Dict[str, str] = field(default_factory=dict)
    negative: Tuple[str, ...] = ()


def sensitivities(sys, pointer, gamma, mass):
    gamma = check_positive(gamma, "gamma")
    mass = check_positive(mass, "mass")
    hbar = pointer.hbar
    aw = weak_value(sys)
    mq = stats(pointer, "q")
    mp = stats(pointer, "p")
    rates = initial_rates(pointer, mass)
    zero_tol = 1e-12 * max(1.0, abs(aw))
    im_zero = abs(aw.imag) <= zero_tol
    re_zero = abs(aw.real) <= zero_tol
    control_q = aw.imag * rates.skew_rate_q
    control_p = aw.imag * mp.central3

    undefined, caveats = {}, {}
    dq2_re = mq.variance / gamma**2 + (2.0 * mass / (3.0 * gamma * hbar)) * control_q
    if re_zero:
        caveats["dq2_re"] = REASON_IMAGINARY_WEAK_VALUE

    dq2_im = None
    rate = rates.var_rate_q
    if im_zero:
        undefined["dq2_im"] = REASON_REAL_WEAK_VALUE
    elif abs(rate) <= 1e-12 * hbar / mass:
        undefined["dq2_im"] = REASON_ZERO_VAR_RATE
    else:
        k = hbar / (gamma * mass)
        dq2_im = k**2 * mq.variance / rate**2 + (2.0 / 3.0) * k * control_q / rate**2

    dp2_im = None
    if im_zero:
        undefined["dp2_im"] = REASON_REAL_WEAK_VALUE
    elif mp.variance <= 0.0:
        undefined["dp2_im"] = REASON_ZERO_P_VARIANCE
    else:
        k = hbar / (2.0 * gamma)
        dp2_im = k**2 / mp.variance + k * control_p / mp.variance**2

    values = {"dq2_re": dq2_re, "dq2_im": dq2_im, "dp2_im": dp2_im}
    negative = tuple(k for k, v in values.items() if v is not None and v < 0)
    return SensitivityBundle(dq2_re, dq2_im, dp2_im, undefined, caveats, negative)


def optimal_control_target(which, epsilon, gamma, mass, pointer):
    """Control-term value just inside the lower edge of the variance window."""
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise NonPositiveEpsilon(f"epsilon must be strictly positive, got {epsilon!r}")
    gamma = check_positive(gamma, "gamma")
    hbar = pointer.hbar
    if which == "q":
        mass = check_positive(mass, "mass")
        return -(3.0 * hbar / (2.0 * gamma * mass)) * stats(pointer, "q").variance + epsilon
    if which == "p":
        return -(hbar / (2.0 * gamma)) * stats(pointer, "p").variance + epsilon
    raise InvalidInput(f"which must be 'q' or 'p', got {which!r}")


def weakness_diagnostic(sys, pointer, gamma):
    """``gamma * (a_max - a_min) / Delta q``; small values mean a weak measurement."""
    spread = eigenvalue_spread(sys)
    if spread == 0.0:
        return 0.0
    return float(abs(gamma) * spread / np.sqrt(stats(pointer, "q").variance))


@dataclass(frozen=True)
class PredictionBundle:
    gamma: float
    weak_value: complex
    mean_q: float
    mean_p: float
    variance_q: float
    variance_p: float
    control_q: Optional[ControlAssessment]
    control_p: Optional[ControlAssessment]
    generic: Dict[ObservablePoly, Tuple[float, float]]
    truncation_warning: Tuple[str, ...]


def predict(sys, pointer, gamma, mass, observables=()):
    """All first-order predictions for one coupling strength.

    ``generic`` maps each extra observable to ``(mean, variance)``. Negative
    predicted variances are kept as they are and named in
    ``truncation_warning``.
    """
    gamma = float(gamma)
    mass = check_positive(mass, "mass")
    hbar = pointer.hbar
    aw = weak_value(sys)
    mq, mp = stats(pointer, "q"), stats(pointer, "p")
    rates = initial_rates(pointer, mass)
    var_q = variance_q_closed(aw, mq, rates, gamma, hbar)
    var_p = variance_p_closed(aw, mp, gamma, hbar)
    generic = {
        M: (predict_mean(M, sys, pointer, gamma), predict_variance(M, sys, pointer, gamma))
        for M in observables
    }
    warn = [name for name, v in (("variance_q", var_q), ("variance_p", var_p)) if v < 0]
    warn += [M.label for M, (_, v) in generic.items() if v < 0]
    # the control window is only defined for a positive coupling
    cq = control_assessment("q", sys, pointer, gamma, mass) if gamma > 0 else None
    cp = control_assessment("p", sys, pointer, gamma, mass) if gamma > 0 else None
    return PredictionBundle(
        gamma=gamma,
        weak_value=aw,
        mean_q=float(mean_q_closed(aw, mq, rates, gamma, hbar)),
        mean_p=float(mean_p_closed(aw, mp, gamma, hbar)),
        variance_q=float(var_q),
        variance_p=float(var_p),
        control_q=cq,
        control_p=cp,
        generic=generic,
        truncation_warning=tuple(warn),
    )
