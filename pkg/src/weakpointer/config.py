"""Scenario configuration: a JSON key-value tree, validated strictly.

Complex numbers are ``[re, im]`` pairs. The observable is either a list of
rows or a flat row-major list of ``dim * dim`` pairs. Unknown keys are
rejected, and every error names the offending key path.

Example::

    {
      "system": {"dim": 2,
                 "observable": [[1, 0], [0, 0], [0, 0], [-1, 0]],
                 "pre_state": [[0.7071067811865476, 0], [0.7071067811865476, 0]],
                 "post_state": [[0.7071067811865476, 0], [0, -0.7071067811865476]]},
      "pointer": {"family": "cubic", "sigma": 1.0, "b": 0.05,
                  "grid": {"n": 4096, "extent": 40.0, "center": 0.0}},
      "constants": {"hbar": 1.0, "mass": 1.0, "gamma": 0.1},
      "run": {"observables": [{"basis": "q", "coefficients": [0, 0, 1]}],
              "gammas": [0.2, 0.1, 0.05, 0.025], "epsilon": 0.1}
    }
"""

import copy
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInput
from .hilbert import DEFAULT_OVERLAP_FLOOR, SystemSpec
from .perturb import ObservablePoly
from .pointer import (
    Chirped,
    Cubic,
    Gaussian,
    GridSpec,
    MomentumSkewed,
    Tabulated,
    build_pointer,
    grid_from_positions,
)

FAMILY_PARAMS = {
    "gaussian": {"sigma": 1.0, "q0": 0.0, "p0": 0.0},
    "chirped": {"sigma": 1.0, "c": 0.0},
    "cubic": {"sigma": 1.0, "b": 0.0},
    "momentum_skewed": {"s": 1.0, "lam": 0.0},
    "tabulated": {"path": None},
}
POTENTIALS = ("free", "harmonic", "quartic")

_TOP = {"system", "pointer", "constants", "run"}
_SYSTEM = {"dim", "observable", "pre_state", "post_state", "overlap_floor"}
_GRID = {"n", "extent", "center"}
_CONSTANTS = {"hbar", "mass", "gamma"}
_RUN = {"observables", "gammas", "epsilon", "sweep", "potential", "dt"}
_SWEEP = {"parameter", "values"}

DEFAULT_GAMMAS = [0.2, 0.1, 0.05, 0.025]


def _check_keys(tree, allowed, where):
    if not isinstance(tree, dict):
        raise ConfigError("expected a mapping", key=where or "<root>")
    for k in tree:
        if k not in allowed:
            raise ConfigError("unknown key", key=f"{where}.{k}" if where else k)


def _number(x, key, positive=False, integer=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"expected a number, got {x!r}", key=key)
    if integer and int(x) != x:
        raise ConfigError(f"expected an integer, got {x!r}", key=key)
    x = int(x) if integer else float(x)
    if not np.isfinite(x) or (positive and x <= 0):
        raise ConfigError(f"expected a {'positive ' if positive else ''}finite number, got {x!r}", key=key)
    return x


def _complex(x, key):
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(_number(x[0], key), _number(x[1], key))
    raise ConfigError(f"expected an [re, im] pair, got {x!r}", key=key)


def _complex_vector(xs, key):
    if not isinstance(xs, list) or not xs:
        raise ConfigError("expected a non-empty list of [re, im] pairs", key=key)
    return np.array([_complex(x, f"{key}[{i}]") for i, x in enumerate(xs)], dtype=complex)


def _observable(raw, dim, key):
    if not isinstance(raw, list) or not raw:
        raise ConfigError("expected a list", key=key)
    nested = isinstance(raw[0], list) and raw[0] and isinstance(raw[0][0], list)
    if nested:
        rows = [_complex_vector(r, f"{key}[{i}]") for i, r in enumerate(raw)]
        if any(len(r) != len(rows) for r in rows):
            raise ConfigError("observable must be square", key=key)
        mat = np.array(rows)
    else:
        flat = _complex_vector(raw, key)
        d = dim if dim is not None else int(round(np.sqrt(flat.size)))
        if d * d != flat.size:
            raise ConfigError(f"{flat.size} entries do not form a {d}x{d} matrix", key=key)
        mat = flat.reshape(d, d)
    if dim is not None and mat.shape[0] != dim:
        raise ConfigError(f"matrix is {mat.shape[0]}x{mat.shape[0]} but dim = {dim}", key=key)
    return mat


def _pairs(z):
    return [[float(np.real(v)), float(np.imag(v))] for v in np.ravel(z)]


def normalize_config(tree, base_dir=None):
    """Validate ``tree`` and return the canonical, fully-defaulted copy.

    The canonical form is also the serialization form: loading it again
    reproduces the same physics exactly.
    """
    tree = copy.deepcopy(tree)
    _check_keys(tree, _TOP, "")
    for req in ("system", "pointer"):
        if req not in tree:
            raise ConfigError("missing required section", key=req)

    sys_t = tree["system"]
    _check_keys(sys_t, _SYSTEM, "system")
    for req in ("observable", "pre_state", "post_state"):
        if req not in sys_t:
            raise ConfigError("missing required key", key=f"system.{req}")
    dim = _number(sys_t["dim"], "system.dim", positive=True, integer=True) if "dim" in sys_t else None
    mat = _observable(sys_t["observable"], dim, "system.observable")
    dim = mat.shape[0]
    pre = _complex_vector(sys_t["pre_state"], "system.pre_state")
    post = _complex_vector(sys_t["post_state"], "system.post_state")
    for name, v in (("pre_state", pre), ("post_state", post)):
        if v.size != dim:
            raise ConfigError(f"length {v.size} does not match dim {dim}", key=f"system.{name}")
    floor = _number(sys_t.get("overlap_floor", DEFAULT_OVERLAP_FLOOR), "system.overlap_floor", positive=True)
    system = {
        "dim": dim,
        "observable": _pairs(mat),
        "pre_state": _pairs(pre),
        "post_state": _pairs(post),
        "overlap_floor": floor,
    }

    ptr = tree["pointer"]
    if not isinstance(ptr, dict) or "family" not in ptr:
        raise ConfigError("missing required key", key="pointer.family")
    family = ptr["family"]
    if family not in FAMILY_PARAMS:
        raise ConfigError(f"unknown family {family!r}; expected one of {sorted(FAMILY_PARAMS)}",
                          key="pointer.family")
    _check_keys(ptr, {"family", "grid", *FAMILY_PARAMS[family]}, "pointer")
    pointer = {"family": family}
    for k, default in FAMILY_PARAMS[family].items():
        if k == "path":
            if "path" not in ptr or not isinstance(ptr["path"], str):
                raise ConfigError("tabulated family needs a file path", key="pointer.path")
            path = Path(ptr["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            pointer["path"] = str(path)
        else:
            pointer[k] = _number(ptr.get(k, default), f"pointer.{k}", positive=k in ("sigma", "s"))
    grid_t = ptr.get("grid", {})
    _check_keys(grid_t, _GRID, "pointer.grid")
    if family != "tabulated":
        pointer["grid"] = {
            "n": _number(grid_t.get("n", 4096), "pointer.grid.n", positive=True, integer=True),
            "extent": _number(grid_t.get("extent", 40.0), "pointer.grid.extent", positive=True),
            "center": _number(grid_t.get("center", 0.0), "pointer.grid.center"),
        }
    elif grid_t:
        raise ConfigError("a tabulated pointer takes its grid from the file", key="pointer.grid")

    const_t = tree.get("constants", {})
    _check_keys(const_t, _CONSTANTS, "constants")
    constants = {
        "hbar": _number(const_t.get("hbar", 1.0), "constants.hbar", positive=True),
        "mass": _number(const_t.get("mass", 1.0), "constants.mass", positive=True),
        "gamma": _number(const_t.get("gamma", 0.1), "constants.gamma"),
    }

    run_t = tree.get("run", {})
    _check_keys(run_t, _RUN, "run")
    observables = []
    for i, o in enumerate(run_t.get("observables", [])):
        key = f"run.observables[{i}]"
        _check_keys(o, {"basis", "coefficients"}, key)
        coeffs = [_number(c, f"{key}.coefficients") for c in o.get("coefficients", [])]
        try:
            ObservablePoly(o.get("basis"), tuple(coeffs))
        except InvalidInput as exc:
            raise ConfigError(str(exc), key=key) from None
        observables.append({"basis": o["basis"], "coefficients": coeffs})
    gammas_raw = run_t.get("gammas", DEFAULT_GAMMAS)
    if not isinstance(gammas_raw, list):
        raise ConfigError("expected a list", key="run.gammas")
    run = {
        "observables": observables,
        "gammas": [_number(g, f"run.gammas[{i}]") for i, g in enumerate(gammas_raw)],
        "epsilon": _number(run_t.get("epsilon", 0.1), "run.epsilon"),
        "potential": run_t.get("potential", "free"),
        "dt": _number(run_t.get("dt", 1e-3), "run.dt", positive=True),
    }
    if run["potential"] not in POTENTIALS:
        raise ConfigError(f"expected one of {POTENTIALS}", key="run.potential")
    if "sweep" in run_t:
        sw = run_t["sweep"]
        _check_keys(sw, _SWEEP, "run.sweep")
        if not isinstance(sw.get("parameter"), str):
            raise ConfigError("expected a dotted key path", key="run.sweep.parameter")
        values = sw.get("values")
        if not isinstance(values, list):
            raise ConfigError("expected a list", key="run.sweep.values")
        run["sweep"] = {
            "parameter": sw["parameter"],
            "values": [_number(v, f"run.sweep.values[{i}]") for i, v in enumerate(values)],
        }

    return {"system": system, "pointer": pointer, "constants": constants, "run": run}


def load_config(path):
    path = Path(path)
    try:
        tree = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"no such file: {path}", key="--config") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}", key="--config") from None
    return normalize_config(tree, base_dir=path.parent)


def dump_config(tree):
    return json.dumps(tree, indent=2, sort_keys=True) + "\n"


def set_path(tree, dotted, value):
    """Return a copy of ``tree`` with ``dotted`` (e.g. ``pointer.b``) set."""
    tree = copy.deepcopy(tree)
    node = tree
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError("no such config key", key=dotted)
        node = node[part]
    if not isinstance(node, dict):
        raise ConfigError("no such config key", key=dotted)
    node[parts[-1]] = value
    return tree


def load_tabulated(path, hbar=1.0):
    """Read a ``q, Re phi, Im phi`` text table (two columns: imaginary part zero)."""
    try:
        data = np.loadtxt(path, ndmin=2)
    except OSError:
        raise ConfigError(f"cannot read tabulated state {path!r}", key="pointer.path") from None
    except ValueError as exc:
        raise ConfigError(f"malformed table: {exc}", key="pointer.path") from None
    if data.shape[1] not in (2, 3):
        raise ConfigError("expected 2 or 3 columns (q, Re phi[, Im phi])", key="pointer.path")
    q = data[:, 0]
    samples = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    try:
        grid = grid_from_positions(q, hbar=hbar)
    except InvalidInput as exc:
        raise ConfigError(str(exc), key="pointer.path") from None
    return Tabulated(samples, q), grid


def _pointer_from(ptr, hbar):
    family = ptr["family"]
    if family == "tabulated":
        fam, grid = load_tabulated(ptr["path"], hbar)
        return build_pointer(fam, grid)
    g = ptr["grid"]
    try:
        grid = GridSpec(n_points=g["n"], center=g["center"], extent=g["extent"], hbar=hbar)
    except InvalidInput as exc:
        raise ConfigError(str(exc), key="pointer.grid") from None
    params = {k: v for k, v in ptr.items() if k not in ("family", "grid")}
    cls = {"gaussian": Gaussian, "chirped": Chirped, "cubic": Cubic,
           "momentum_skewed": MomentumSkewed}[family]
    return build_pointer(cls(**params), grid)


def scenario_from_config(tree, name="config", base_dir=None):
    """Build a :class:`~weakpointer.scenarios.Scenario` from a config tree."""
    from .scenarios import Scenario

    cfg = normalize_config(tree, base_dir=base_dir)
    s = cfg["system"]
    d = s["dim"]
    mat = np.array([complex(*z) for z in s["observable"]]).reshape(d, d)
    system = SystemSpec(
        mat,
        np.array([complex(*z) for z in s["pre_state"]]),
        np.array([complex(*z) for z in s["post_state"]]),
        overlap_floor=s["overlap_floor"],
    )
    pointer = _pointer_from(cfg["pointer"], cfg["constants"]["hbar"])
    observables = tuple(
        ObservablePoly(o["basis"], tuple(o["coefficients"])) for o in cfg["run"]["observables"]
    )
    return Scenario(
        name=name,
        system=system,
        pointer=pointer,
        mass=cfg["constants"]["mass"],
        gamma=cfg["constants"]["gamma"],
        observables=observables,
    )
