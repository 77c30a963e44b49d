"""Weak-value measurement pointers: exact von Neumann simulation and
first-order predictions of pointer means, variances and sensitivities."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundaryLeak,
    ConfigError,
    InvalidInput,
    NonHermitian,
    NonNormalized,
    NonPositiveEpsilon,
    PhysicsError,
    TranslationOverflow,
    VanishingOverlap,
    WeakPointerError,
)
from .hilbert import SystemSpec, spectrum, validate_system, weak_moment, weak_value  # noqa: E402
from .pointer import (  # noqa: E402
    Chirped,
    Cubic,
    Gaussian,
    GridSpec,
    MomentumSkewed,
    PointerState,
    Tabulated,
    build_pointer,
    initial_rates,
    stats,
)
from .vonneumann import evolve, measure, strong_distribution  # noqa: E402
from .perturb import (  # noqa: E402
    ObservablePoly,
    control_assessment,
    functionals,
    optimal_control_target,
    predict,
    predict_mean,
    predict_variance,
    sensitivities,
    weakness_diagnostic,
)
from .verify import convergence_order, identity_suite, rate_suite  # noqa: E402
from .scenarios import Scenario, get_scenario  # noqa: E402
from .estimator import WeakMeasurementModel  # noqa: E402
