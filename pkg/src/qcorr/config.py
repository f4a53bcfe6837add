"""JSON run-configuration parsing and validation.

A run is described by a single JSON object.  Parsing is strict: unknown
keys are rejected by name, every value is type- and range-checked, and all
failures raise :class:`ConfigError` with a message that names the offending
key.  The CLI maps these to exit code 2.

Top-level keys::

    scenario          required; one of "figure1", "figure2", "sweep",
                      "evolve", "audit", "compare-backends"
    state             initial-state object (see below); figure scenarios
                      default to {"yu_eberly": {"alpha": 0.5}}
    m                 list of reservoir occupations; default [0, 0.1, 0.5, 1]
    gamma             decay rate, > 0; default 1.0
    grid              {"points": n, "x_min": lo, "x_max": hi};
                      default 2001 points on [0, 1]
    backend           "exact" | "ode" | "transcribed"; default "exact";
                      rejected for compare-backends (the pair is fixed) and
                      for audit (both closed forms always run, "grid" and
                      "dt" are likewise rejected there)
    dt                ODE step; only with backend "ode" or compare-backends
    measures          required for sweep; optional with a pinned value for
                      figure1 (["gmod"]) and figure2 (both MIN variants);
                      rejected elsewhere
    output_basename   stem for output files; defaults to the scenario name
    emit_svg          also render figures; default false

A state object holds exactly one key naming a constructor, mapped to its
parameters: {"yu_eberly": {"alpha": ...}}, {"thermal_product": {"m": ...}},
{"bell_phi_plus": {}}, or {"xstate": {...}} with populations "a", "b", "c",
"d" and optional coherences "w", "z" (each a real number or an [re, im]
pair).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlations import Measure
from .dynamics import (
    DEFAULT_ODE_STEP,
    Backend,
    ExactClosedForm,
    OdeOracle,
    TranscribedClosedForm,
)
from .qstate import (
    XState,
    bell_phi_plus,
    thermal_product_state,
    yu_eberly_state,
)


class ConfigError(ValueError):
    """A run configuration that cannot be used."""


SCENARIOS = ("figure1", "figure2", "sweep", "evolve", "audit", "compare-backends")
DEFAULT_M_VALUES = (0.0, 0.1, 0.5, 1.0)

_FIGURE_MEASURES = {
    "figure1": (Measure.GMOD,),
    "figure2": (Measure.MIN_PAPER, Measure.MIN_GENERAL),
}


@dataclass
class RunConfig:
    """A validated run description, ready for the CLI driver."""

    scenario: str
    state: XState
    state_label: str
    m_values: tuple[float, ...]
    gamma: float
    grid: np.ndarray
    backend: Backend
    measures: tuple[Measure, ...] = ()
    output_basename: str = ""
    emit_svg: bool = False
    dt: float | None = None
    extras: dict = field(default_factory=dict, repr=False)


def _require_mapping(value, key: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f'"{key}" must be a JSON object, got {type(value).__name__}')
    return value


def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        names = ", ".join(f'"{k}"' for k in unknown)
        raise ConfigError(f"unknown key(s) in {where}: {names}")


def _real(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'"{key}" must be a number, got {value!r}')
    out = float(value)
    if not np.isfinite(out):
        raise ConfigError(f'"{key}" must be finite, got {value!r}')
    return out


def _complex_entry(value, key: str) -> complex:
    """A coherence: a real number or an [re, im] pair."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        re = _real(value[0], f"{key}[0]")
        im = _real(value[1], f"{key}[1]")
        return complex(re, im)
    raise ConfigError(f'"{key}" must be a number or an [re, im] pair, got {value!r}')


_STATE_CONSTRUCTORS = ("yu_eberly", "thermal_product", "bell_phi_plus", "xstate")


def _parse_state(raw) -> tuple[XState, str]:
    state = _require_mapping(raw, "state")
    if len(state) != 1:
        got = ", ".join(f'"{k}"' for k in state) or "none"
        raise ConfigError(
            f'"state" must hold exactly one constructor key, got {got}'
        )
    (name,) = state
    if name not in _STATE_CONSTRUCTORS:
        valid = ", ".join(f'"{n}"' for n in _STATE_CONSTRUCTORS)
        raise ConfigError(f"unknown state constructor {name!r}; expected one of {valid}")
    params = _require_mapping(state[name], f"state.{name}")

    if name == "yu_eberly":
        _check_keys(params, {"alpha"}, '"state.yu_eberly"')
        if "alpha" not in params:
            raise ConfigError('"state.yu_eberly" requires "alpha"')
        alpha = _real(params["alpha"], "state.yu_eberly.alpha")
        if not 0.0 <= alpha <= 1.0:
            raise ConfigError(f'"state.yu_eberly.alpha" must lie in [0, 1], got {alpha}')
        return yu_eberly_state(alpha), f"yu_eberly(alpha={alpha:g})"

    if name == "thermal_product":
        _check_keys(params, {"m"}, '"state.thermal_product"')
        if "m" not in params:
            raise ConfigError('"state.thermal_product" requires "m"')
        m = _real(params["m"], "state.thermal_product.m")
        if m < 0.0:
            raise ConfigError(f'"state.thermal_product.m" must be >= 0, got {m}')
        return thermal_product_state(m), f"thermal_product(m={m:g})"

    if name == "bell_phi_plus":
        _check_keys(params, set(), '"state.bell_phi_plus"')
        return bell_phi_plus(), "bell_phi_plus"

    _check_keys(params, {"a", "b", "c", "d", "w", "z"}, '"state.xstate"')
    missing = [k for k in ("a", "b", "c", "d") if k not in params]
    if missing:
        names = ", ".join(f'"{k}"' for k in missing)
        raise ConfigError(f'"state.xstate" requires population key(s) {names}')
    pops = {k: _real(params[k], f"state.xstate.{k}") for k in ("a", "b", "c", "d")}
    w = _complex_entry(params["w"], "state.xstate.w") if "w" in params else 0j
    z = _complex_entry(params["z"], "state.xstate.z") if "z" in params else 0j
    try:
        built = XState(w=w, z=z, **pops)
    except ValueError as exc:
        raise ConfigError(f'invalid "state.xstate": {exc}') from exc
    return built, "xstate"


def _parse_m_values(raw) -> tuple[float, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError('"m" must be a non-empty list of numbers')
    values = tuple(_real(v, f"m[{i}]") for i, v in enumerate(raw))
    for i, v in enumerate(values):
        if v < 0.0:
            raise ConfigError(f'"m[{i}]" must be >= 0, got {v}')
    if len(set(values)) != len(values):
        raise ConfigError('"m" contains duplicate values')
    return values


def _parse_grid(raw) -> np.ndarray:
    grid = _require_mapping(raw, "grid")
    _check_keys(grid, {"points", "x_min", "x_max"}, '"grid"')
    points = grid.get("points", 2001)
    if isinstance(points, bool) or not isinstance(points, int):
        raise ConfigError(f'"grid.points" must be an integer, got {points!r}')
    if points < 2:
        raise ConfigError(f'"grid.points" must be >= 2, got {points}')
    x_min = _real(grid.get("x_min", 0.0), "grid.x_min")
    x_max = _real(grid.get("x_max", 1.0), "grid.x_max")
    if not 0.0 <= x_min < x_max <= 1.0:
        raise ConfigError(
            f'"grid" requires 0 <= x_min < x_max <= 1, got x_min={x_min}, x_max={x_max}'
        )
    return np.linspace(x_min, x_max, points)


def _parse_measures(raw, scenario: str) -> tuple[Measure, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError('"measures" must be a non-empty list of measure names')
    out = []
    valid = ", ".join(f'"{m.value}"' for m in Measure)
    for i, name in enumerate(raw):
        try:
            out.append(Measure(name))
        except ValueError:
            raise ConfigError(
                f'"measures[{i}]" is {name!r}; expected one of {valid}'
            ) from None
    if len(set(out)) != len(out):
        raise ConfigError('"measures" contains duplicate entries')

    if scenario in _FIGURE_MEASURES:
        pinned = _FIGURE_MEASURES[scenario]
        if set(out) != set(pinned) or len(out) != len(pinned):
            names = ", ".join(f'"{m.value}"' for m in pinned)
            raise ConfigError(
                f'"measures" for scenario "{scenario}" is pinned to exactly [{names}]; '
                "omit the key to use it"
            )
        return pinned
    return tuple(out)


_TOP_KEYS = {
    "scenario", "state", "m", "gamma", "grid", "backend", "dt",
    "measures", "output_basename", "emit_svg",
}


def parse_config(raw) -> RunConfig:
    """Validate a decoded JSON object into a :class:`RunConfig`."""
    data = _require_mapping(raw, "configuration")
    _check_keys(data, _TOP_KEYS, "the configuration")

    scenario = data.get("scenario")
    if scenario is None:
        raise ConfigError('missing required key "scenario"')
    if scenario not in SCENARIOS:
        names = ", ".join(f'"{s}"' for s in SCENARIOS)
        raise ConfigError(f'"scenario" is {scenario!r}; expected one of {names}')

    if scenario == "audit":
        for key in ("backend", "dt", "grid"):
            if key in data:
                raise ConfigError(
                    f'scenario "audit" always runs both closed-form backends on the '
                    f'pinned grid; drop the "{key}" key'
                )

    if "state" in data:
        state, state_label = _parse_state(data["state"])
    elif scenario in ("figure1", "figure2"):
        state, state_label = yu_eberly_state(0.5), "yu_eberly(alpha=0.5)"
    else:
        raise ConfigError(f'scenario "{scenario}" requires a "state" object')

    m_values = _parse_m_values(data["m"]) if "m" in data else DEFAULT_M_VALUES

    gamma = _real(data.get("gamma", 1.0), "gamma")
    if gamma <= 0.0:
        raise ConfigError(f'"gamma" must be > 0, got {gamma}')

    grid = _parse_grid(data["grid"]) if "grid" in data else np.linspace(0.0, 1.0, 2001)

    dt = None
    if "dt" in data:
        dt = _real(data["dt"], "dt")
        if not 0.0 < dt <= 0.1:
            raise ConfigError(f'"dt" must lie in (0, 0.1], got {dt}')

    backend_name = data.get("backend")
    if scenario == "compare-backends":
        if backend_name is not None:
            raise ConfigError(
                'scenario "compare-backends" always runs the exact and ode backends; '
                'drop the "backend" key'
            )
        backend: Backend = ExactClosedForm()
    else:
        backend_name = "exact" if backend_name is None else backend_name
        if backend_name == "exact":
            backend = ExactClosedForm()
        elif backend_name == "transcribed":
            backend = TranscribedClosedForm()
        elif backend_name == "ode":
            backend = OdeOracle(dt=dt if dt is not None else DEFAULT_ODE_STEP)
        else:
            raise ConfigError(
                f'"backend" is {backend_name!r}; expected "exact", "ode", or "transcribed"'
            )
        if dt is not None and backend_name != "ode":
            raise ConfigError(f'"dt" only applies to the ode backend, not {backend_name!r}')

    if "measures" in data:
        if scenario in ("evolve", "audit", "compare-backends"):
            raise ConfigError(f'scenario "{scenario}" does not accept a "measures" key')
        measures = _parse_measures(data["measures"], scenario)
    elif scenario in _FIGURE_MEASURES:
        measures = _FIGURE_MEASURES[scenario]
    elif scenario == "sweep":
        raise ConfigError('scenario "sweep" requires a "measures" list')
    else:
        measures = ()

    basename = data.get("output_basename", scenario.replace("-", "_"))
    if not isinstance(basename, str) or not basename:
        raise ConfigError(f'"output_basename" must be a non-empty string, got {basename!r}')
    if any(sep in basename for sep in ("/", "\\")) or basename in (".", ".."):
        raise ConfigError(f'"output_basename" must be a bare file stem, got {basename!r}')

    emit_svg = data.get("emit_svg", False)
    if not isinstance(emit_svg, bool):
        raise ConfigError(f'"emit_svg" must be true or false, got {emit_svg!r}')

    return RunConfig(
        scenario=scenario,
        state=state,
        state_label=state_label,
        m_values=m_values,
        gamma=gamma,
        grid=grid,
        backend=backend,
        measures=measures,
        output_basename=basename,
        emit_svg=emit_svg,
        dt=dt,
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path} is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from exc
    return parse_config(raw)
