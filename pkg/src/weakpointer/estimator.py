"""scikit-learn style front end.

:class:`WeakMeasurementModel` is fitted on a pointer state and then maps
coupling strengths to pointer statistics: ``predict`` gives the first-order
values and ``transform`` runs the exact measurement. Both return an
``(n_gammas, 4)`` array with columns :data:`OUTPUT_COLUMNS`.

>>> import numpy as np
>>> from weakpointer import Cubic, build_pointer
>>> r = 2 ** -0.5
>>> model = WeakMeasurementModel(np.diag([1.0, -1.0]), [r, r], [r, -1j * r])
>>> model = model.fit(build_pointer(Cubic(sigma=1.0, b=0.05)))
>>> round(float(model.predict([0.1])[0, 2]), 12)
0.94
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_gammas, check_positive
from .errors import InvalidInput
from .hilbert import DEFAULT_OVERLAP_FLOOR, SystemSpec, weak_value
from .perturb import (
    mean_p_closed,
    mean_q_closed,
    variance_p_closed,
    variance_q_closed,
)
from .pointer import GridSpec, PointerState, initial_rates, stats
from .vonneumann import measure

OUTPUT_COLUMNS = ("mean_q", "mean_p", "var_q", "var_p")


def _gamma_column(X):
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise InvalidInput(f"expected a single column of couplings, got shape {arr.shape}")
        arr = arr[:, 0]
    return check_gammas(arr)


class WeakMeasurementModel(BaseEstimator):
    """Pointer statistics after a pre/post-selected von Neumann measurement.

    Parameters
    ----------
    observable : array_like, shape (d, d)
        Hermitian observable of the measured system.
    pre_state, post_state : array_like, shape (d,)
        Pre- and post-selected system states.
    mass : float
        Pointer mass; enters the position-variance rates.
    grid : GridSpec, optional
        Needed only when ``fit`` receives raw samples instead of a
        :class:`PointerState`.
    overlap_floor : float
        Smallest accepted ``|<psi_f|psi_i>|``.
    """

    def __init__(self, observable=None, pre_state=None, post_state=None, mass=1.0,
                 grid=None, overlap_floor=DEFAULT_OVERLAP_FLOOR):
        self.observable = observable
        self.pre_state = pre_state
        self.post_state = post_state
        self.mass = mass
        self.grid = grid
        self.overlap_floor = overlap_floor

    def fit(self, X, y=None):
        if self.observable is None or self.pre_state is None or self.post_state is None:
            raise InvalidInput("observable, pre_state and post_state must all be set")
        check_positive(self.mass, "mass")
        if isinstance(X, PointerState):
            pointer = X
        else:
            grid = self.grid if self.grid is not None else GridSpec()
            samples = np.asarray(X, dtype=complex).ravel()
            norm = np.sum(np.abs(samples) ** 2) * grid.dq
            if not norm > 0:
                raise InvalidInput("pointer samples have zero norm")
            pointer = PointerState(grid, samples / np.sqrt(norm))
        self.system_ = SystemSpec(self.observable, self.pre_state, self.post_state,
                                  overlap_floor=self.overlap_floor)
        self.pointer_ = pointer
        self.weak_value_ = weak_value(self.system_)
        self.moments_q_ = stats(pointer, "q")
        self.moments_p_ = stats(pointer, "p")
        self.rates_ = initial_rates(pointer, self.mass)
        return self

    def predict(self, X):
        """First-order statistics for each coupling in ``X``."""
        check_is_fitted(self, "rates_")
        hbar = self.pointer_.hbar
        aw = self.weak_value_
        rows = [
            (
                mean_q_closed(aw, self.moments_q_, self.rates_, g, hbar),
                mean_p_closed(aw, self.moments_p_, g, hbar),
                variance_q_closed(aw, self.moments_q_, self.rates_, g, hbar),
                variance_p_closed(aw, self.moments_p_, g, hbar),
            )
            for g in _gamma_column(X)
        ]
        return np.array(rows, dtype=float).reshape(-1, 4)

    def transform(self, X):
        """Exact post-selected statistics for each coupling in ``X``."""
        check_is_fitted(self, "rates_")
        rows = []
        for g in _gamma_column(X):
            state = measure(self.system_, self.pointer_, g).state
            mq, mp = stats(state, "q"), stats(state, "p")
            rows.append((mq.mean, mp.mean, mq.variance, mp.variance))
        return np.array(rows, dtype=float).reshape(-1, 4)

    def fit_transform(self, X, y=None, gammas=None):
        if gammas is None:
            raise InvalidInput("fit_transform needs the couplings via gammas=")
        return self.fit(X).transform(gammas)

    def residuals(self, X):
        """``|exact - first order|`` per coupling and column."""
        return np.abs(self.transform(X) - self.predict(X))

    def get_feature_names_out(self, input_features=None):
        return np.array(OUTPUT_COLUMNS, dtype=object)
