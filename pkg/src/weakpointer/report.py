"""Assemble run reports and sweep rows from a scenario.

Reports are plain nested dicts of JSON-safe values so the CLI can emit them
byte-for-byte deterministically.
"""

from dataclasses import asdict

import numpy as np

from .errors import WeakPointerError
from .hilbert import validate_system, weak_moment, weak_value
from .perturb import (
    expectation,
    optimal_control_target,
    predict,
    sensitivities,
    weakness_diagnostic,
)
from .pointer import initial_rates, stats
from .verify import (
    DEGENERATE_FLOOR,
    QUANTITIES,
    convergence_order,
    identity_suite,
    rate_suite,
)
from .vonneumann import measure

STATS_KEYS = ("mean_q", "mean_p", "var_q", "var_p")

SWEEP_COLUMNS = (
    "point",
    "parameter",
    "value",
    "gamma",
    "status",
    "error",
    "postselect_prob",
    "exact_mean_q",
    "pred_mean_q",
    "resid_mean_q",
    "exact_mean_p",
    "pred_mean_p",
    "resid_mean_p",
    "exact_var_q",
    "pred_var_q",
    "resid_var_q",
    "exact_var_p",
    "pred_var_p",
    "resid_var_p",
    "control_q",
    "bound_q",
    "satisfied_q",
    "status_q",
    "control_p",
    "bound_p",
    "satisfied_p",
    "status_p",
    "dq2_re",
    "dq2_im",
    "dp2_im",
    "weakness",
)


def jsonable(x):
    """Recursively convert numpy/complex/NaN values to JSON-safe ones."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else None
    return x


def _moments(m):
    d = asdict(m)
    d.pop("observable")
    return d


def _exact(scenario, gamma):
    measured = measure(scenario.system, scenario.pointer, gamma)
    mq, mp = stats(measured.state, "q"), stats(measured.state, "p")
    out = {"mean_q": mq.mean, "mean_p": mp.mean, "var_q": mq.variance, "var_p": mp.variance}
    obs = {}
    for M in scenario.observables:
        mean = expectation(M, measured.state)
        obs[M.label] = {"mean": mean, "variance": expectation(M.squared(), measured.state) - mean**2}
    return measured.postselect_prob, out, obs


def _predicted(scenario, gamma):
    pb = predict(scenario.system, scenario.pointer, gamma, scenario.mass, scenario.observables)
    out = {"mean_q": pb.mean_q, "mean_p": pb.mean_p, "var_q": pb.variance_q, "var_p": pb.variance_p}
    obs = {M.label: {"mean": m, "variance": v} for M, (m, v) in pb.generic.items()}
    return pb, out, obs


def _sensitivity_dict(scenario, gamma):
    if gamma <= 0:
        return None
    sb = sensitivities(scenario.system, scenario.pointer, gamma, scenario.mass)
    return {
        "dq2_re": sb.dq2_re,
        "dq2_im": sb.dq2_im,
        "dp2_im": sb.dp2_im,
        "undefined": dict(sorted(sb.undefined.items())),
        "caveats": dict(sorted(sb.caveats.items())),
        "negative": list(sb.negative),
    }


def _header(scenario, gamma):
    diag = validate_system(scenario.system)
    ptr = scenario.pointer
    return {
        "scenario": scenario.name,
        "gamma": gamma,
        "hbar": ptr.hbar,
        "mass": scenario.mass,
        "weak_value": weak_value(scenario.system),
        "pps_overlap_sq": diag.overlap_sq,
        "weakness": weakness_diagnostic(scenario.system, ptr, gamma),
        "initial": {
            "q": _moments(stats(ptr, "q")),
            "p": _moments(stats(ptr, "p")),
            "rates": asdict(initial_rates(ptr, scenario.mass)),
            "boundary_ratio": ptr.boundary_ratio(),
        },
    }


def predict_report(scenario, gamma=None, epsilon=0.1):
    gamma = scenario.gamma if gamma is None else float(gamma)
    pb, pred, pred_obs = _predicted(scenario, gamma)
    rep = _header(scenario, gamma)
    rep["predicted"] = dict(pred, observables=pred_obs, truncation_warning=list(pb.truncation_warning))
    rep["control"] = {
        "q": asdict(pb.control_q) if pb.control_q else None,
        "p": asdict(pb.control_p) if pb.control_p else None,
    }
    if gamma > 0 and epsilon > 0:
        rep["optimal_control_target"] = {
            w: optimal_control_target(w, epsilon, gamma, scenario.mass, scenario.pointer)
            for w in ("q", "p")
        }
    rep["sensitivities"] = _sensitivity_dict(scenario, gamma)
    return jsonable(rep)


def simulate_report(scenario, gamma=None, epsilon=0.1):
    """Exact oracle statistics next to the first-order predictions."""
    gamma = scenario.gamma if gamma is None else float(gamma)
    rep = predict_report(scenario, gamma, epsilon)
    prob, exact, exact_obs = _exact(scenario, gamma)
    pred = rep["predicted"]
    diff = {k: abs(exact[k] - pred[k]) for k in STATS_KEYS}
    degenerate = {
        k: diff[k] <= DEGENERATE_FLOOR * max(1.0, abs(exact[k])) for k in STATS_KEYS
    }
    for label, ex in exact_obs.items():
        pr = pred["observables"][label]
        diff[label] = {k: abs(ex[k] - pr[k]) for k in ("mean", "variance")}
    rep["postselect_prob"] = prob
    rep["exact"] = dict(exact, observables=exact_obs)
    rep["abs_diff"] = diff
    rep["degenerate"] = degenerate
    return jsonable(rep)


def weak_value_report(scenario, max_order=3):
    diag = validate_system(scenario.system)
    return jsonable({
        "scenario": scenario.name,
        "dim": scenario.system.dim,
        "weak_value": weak_value(scenario.system),
        "weak_moments": {str(m): weak_moment(scenario.system, m) for m in range(1, max_order + 1)},
        "diagnostics": asdict(diag),
    })


def verify_report(scenario, gammas, potential="free", dt=1e-3):
    ids = identity_suite(scenario.pointer, scenario.mass)
    rates = rate_suite(scenario.pointer, potential, scenario.mass, dt)
    orders = {}
    for q in QUANTITIES:
        if q.endswith("_poly"):
            for M in scenario.observables:
                orders[f"{q}[{M.label}]"] = asdict(convergence_order(scenario, q, gammas, M))
        else:
            orders[q] = asdict(convergence_order(scenario, q, gammas))
    return jsonable({
        "scenario": scenario.name,
        "identity_suite": asdict(ids),
        "rate_suite": dict(asdict(rates), potential=potential),
        "convergence": orders,
    })


def sweep_row(scenario, gamma, point, parameter="gamma", value=None):
    """One CSV row (as a dict keyed by :data:`SWEEP_COLUMNS`)."""
    row = dict.fromkeys(SWEEP_COLUMNS)
    row.update(point=point, parameter=parameter, value=gamma if value is None else value, gamma=gamma)
    try:
        rep = simulate_report(scenario, gamma)
    except WeakPointerError as exc:
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
        return row
    row.update(status="ok", error="", postselect_prob=rep["postselect_prob"], weakness=rep["weakness"])
    for k in STATS_KEYS:
        row[f"exact_{k}"] = rep["exact"][k]
        row[f"pred_{k}"] = rep["predicted"][k]
        row[f"resid_{k}"] = rep["abs_diff"][k]
    for w in ("q", "p"):
        c = rep["control"][w]
        if c is not None:
            row[f"control_{w}"] = c["term"]
            row[f"bound_{w}"] = c["lower_bound"]
            row[f"satisfied_{w}"] = c["satisfied"]
            row[f"status_{w}"] = c["status"]
    sens = rep["sensitivities"]
    if sens is not None:
        for k in ("dq2_re", "dq2_im", "dp2_im"):
            row[k] = sens[k]
    return row


def format_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


__all__ = [
    "SWEEP_COLUMNS",
    "jsonable",
    "predict_report",
    "simulate_report",
    "weak_value_report",
    "verify_report",
    "sweep_row",
    "format_cell",
]
