"""Sweeps over the decay parameter, decay classification, and claims audit.

Everything here is phrased in X = exp(-t gamma (1+2m)), swept on an
ascending grid in [0, 1].  ``classify`` decides between three long-time
behaviours of a measure along a trajectory:

* sudden death: the measure hits zero at an interior X (refined by
  bisection),
* asymptotic decay: the measure stays positive and vanishes only at X = 0,
* persistent plateau: the measure stays positive all the way to X = 0.

Detection is anchored to the sweep grid: a death-and-revival window
narrower than one grid cell (5e-4 in X on the default 2001-point grid) can
fall between samples and is deliberately out of scope.

``audit`` evaluates a fixed registry of published asymptotic claims about
these dynamics against computed values, always running both closed-form
backends and both MIN variants, and renders plain-text verdicts
(reproduced / contradicted / not-applicable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import correlations as corr
from .correlations import Measure
from .dynamics import (
    Backend,
    ExactClosedForm,
    GridEvolution,
    TranscribedClosedForm,
    backend_label,
    evolve_on_grid,
)
from .qstate import XState, thermal_product_state

GRID_POINTS = 2001
ZERO_THRESHOLD = 1e-12
BISECT_XTOL = 1e-10
_SLOPE_EPS = 1e-15


def default_grid() -> np.ndarray:
    """The pinned classification grid: 2001 uniform points on [0, 1]."""
    return np.linspace(0.0, 1.0, GRID_POINTS)


def _matrix_from_elements(a, b, c, d, w, z) -> np.ndarray:
    """Assemble the X-pattern matrix from raw elements, no validation.

    Used for the general Bloch-form measures, including on raw transcribed
    tuples whose population sum is below one.
    """
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a
    rho[1, 1] = b
    rho[2, 2] = c
    rho[3, 3] = d
    rho[0, 3] = w
    rho[3, 0] = np.conj(w)
    rho[1, 2] = z
    rho[2, 1] = np.conj(z)
    return rho


def _measure_on_elements(measure: Measure, a, b, c, d, w, z):
    """Evaluate a measure on element arrays (or scalars)."""
    w_abs = np.abs(w)
    z_abs = np.abs(z)
    if measure is Measure.GMOD:
        return corr.gmod_from_elements(a, b, c, d, w_abs, z_abs)
    if measure is Measure.MIN_PAPER:
        return corr.min_from_elements(a, b, c, d, w_abs, z_abs)
    if measure is Measure.CONCURRENCE:
        return corr.concurrence_from_elements(a, b, c, d, w_abs, z_abs)
    if measure in (Measure.GMOD_GENERAL, Measure.MIN_GENERAL):
        fn = corr.gmod_general if measure is Measure.GMOD_GENERAL else corr.min_general
        arr = np.broadcast_arrays(a, b, c, d, w, z)
        flat = [np.atleast_1d(v) for v in arr]
        out = np.empty(flat[0].shape, dtype=float)
        for i in range(flat[0].size):
            out[i] = fn(_matrix_from_elements(*(v[i] for v in flat)))
        return out if np.ndim(a) else float(out[0])
    raise ValueError(f"unknown measure {measure!r}")


@dataclass
class SweepSeries:
    """Measure values along an ascending X grid, with provenance metadata."""

    grid: np.ndarray
    values: np.ndarray
    m: float
    measure: Measure
    backend: Backend | None = None
    state0: XState | None = None
    state_label: str = "xstate"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be one-dimensional and equal length")
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0.0):
            raise ValueError("grid must be strictly ascending")

    @property
    def backend_name(self) -> str:
        return backend_label(self.backend) if self.backend is not None else "unknown"


def sweep(
    state0: XState,
    m: float,
    measure: Measure,
    backend: Backend,
    grid,
    state_label: str = "xstate",
) -> SweepSeries:
    """Evaluate one measure for one (state0, m, backend) along a grid."""
    evolution = evolve_on_grid(state0, m, grid, backend)
    values = _measure_on_elements(
        measure, evolution.a, evolution.b, evolution.c, evolution.d, evolution.w, evolution.z
    )
    return SweepSeries(
        grid=evolution.grid,
        values=np.asarray(values, dtype=float),
        m=float(m),
        measure=measure,
        backend=backend,
        state0=state0,
        state_label=state_label,
    )


# ---------------------------------------------------------------------------
# Decay classification
# ---------------------------------------------------------------------------

class DecayKind(Enum):
    SUDDEN_DEATH = "sudden-death"
    ASYMPTOTIC_DECAY = "asymptotic-decay"
    PERSISTENT_PLATEAU = "persistent-plateau"


@dataclass(frozen=True)
class DecayClassification:
    """Outcome of :func:`classify`.

    ``x_death`` is set only for sudden death and lies strictly inside
    (0, 1); ``limit`` is set only for a plateau and exceeds the zero
    threshold.
    """

    kind: DecayKind
    x_death: float | None = None
    limit: float | None = None

    def __post_init__(self):
        if self.kind is DecayKind.SUDDEN_DEATH:
            if self.x_death is None or not 0.0 < self.x_death < 1.0:
                raise ValueError(f"x_death={self.x_death!r} must lie in (0, 1)")
        elif self.x_death is not None:
            raise ValueError("x_death only applies to sudden death")
        if self.kind is DecayKind.PERSISTENT_PLATEAU:
            if self.limit is None or self.limit <= ZERO_THRESHOLD:
                raise ValueError(f"plateau limit={self.limit!r} must exceed {ZERO_THRESHOLD}")
        elif self.limit is not None:
            raise ValueError("limit only applies to a plateau")


def _bisect(fn, lo: float, hi: float, xtol: float = BISECT_XTOL) -> float:
    """Plain bisection for fn(lo) <= 0 < fn(hi), to interval width xtol."""
    flo = fn(lo)
    fhi = fn(hi)
    if flo > 0.0 or fhi <= 0.0:
        raise ValueError(f"root not bracketed on [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if fn(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def classify(
    state0: XState,
    m: float,
    measure: Measure,
    backend: Backend,
    grid=None,
) -> DecayClassification:
    """Classify the long-time behaviour of a measure along a trajectory.

    Procedure (pinned): evaluate on the grid (default 2001 uniform points on
    [0, 1]); any drop below the zero threshold 1e-12 at an interior grid
    point, with the measure above threshold at larger X, is bracketed and
    refined by bisection to an interval of 1e-10 and reported as sudden
    death.  Otherwise the X = 0 value decides: at or below threshold is
    asymptotic decay, above it a persistent plateau with that limit.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    evolution = evolve_on_grid(state0, m, grid, backend)
    values = np.asarray(
        _measure_on_elements(
            measure, evolution.a, evolution.b, evolution.c, evolution.d, evolution.w, evolution.z
        ),
        dtype=float,
    )
    below = values <= ZERO_THRESHOLD

    def measure_at(x: float) -> float:
        a, b, c, d, w, z = evolution.elements_at(x)
        return float(_measure_on_elements(measure, a, b, c, d, w, z))

    # Latest-in-X transition from dead (<= threshold, at X > 0) to alive.
    for i in range(values.size - 2, -1, -1):
        if below[i] and not below[i + 1] and grid[i] > 0.0:
            x_death = _bisect(
                lambda x: measure_at(x) - ZERO_THRESHOLD, grid[i], grid[i + 1]
            )
            return DecayClassification(kind=DecayKind.SUDDEN_DEATH, x_death=x_death)

    limit = measure_at(0.0) if grid[0] > 0.0 else float(values[0])
    if limit <= ZERO_THRESHOLD:
        return DecayClassification(kind=DecayKind.ASYMPTOTIC_DECAY)
    return DecayClassification(kind=DecayKind.PERSISTENT_PLATEAU, limit=limit)


# ---------------------------------------------------------------------------
# Turning points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TurningPoint:
    """A labeled feature of a sweep: ``kind`` is "slope" for a first-
    difference sign change at a grid point, "selector" for a refined branch
    switch inside a measure's max/min selector."""

    x: float
    kind: str
    detail: str = ""


_CANDIDATE_FNS = {
    Measure.GMOD: (corr.gmod_candidates, np.argmax),
    Measure.MIN_PAPER: (corr.min_candidates, np.argmin),
    Measure.CONCURRENCE: (corr.concurrence_candidates, np.argmax),
}


def turning_points(series: SweepSeries) -> list[TurningPoint]:
    """Locate slope sign changes and selector branch switches in a sweep.

    Slope changes come from the discrete first differences of the stored
    values.  Branch switches are found for the closed-form X-state measures
    by re-evaluating the selector candidates along the grid and bisecting
    the candidate difference to 1e-10; they require the series to carry its
    initial state, and are skipped (with only slope reporting) otherwise.
    """
    points: list[TurningPoint] = []
    grid = series.grid
    values = series.values

    diffs = np.diff(values)
    prev_sign = 0
    for i, step in enumerate(diffs):
        sign = 0 if abs(step) <= _SLOPE_EPS else (1 if step > 0.0 else -1)
        if sign == 0:
            continue
        if prev_sign != 0 and sign != prev_sign:
            points.append(
                TurningPoint(x=float(grid[i]), kind="slope", detail=f"{prev_sign:+d} to {sign:+d}")
            )
        prev_sign = sign

    if series.state0 is not None and series.backend is not None and series.measure in _CANDIDATE_FNS:
        cand_fn, arg_fn = _CANDIDATE_FNS[series.measure]
        evolution = evolve_on_grid(series.state0, series.m, grid, series.backend)
        cands = cand_fn(
            evolution.a, evolution.b, evolution.c, evolution.d,
            np.abs(evolution.w), np.abs(evolution.z),
        )
        selector = arg_fn(cands, axis=0)
        maximising = arg_fn is np.argmax

        def candidate_gap(x: float, new: int, old: int) -> float:
            a, b, c, d, w, z = evolution.elements_at(x)
            cs = cand_fn(a, b, c, d, abs(w), abs(z))
            gap = float(cs[new] - cs[old])
            return gap if maximising else -gap

        for i in range(selector.size - 1):
            old, new = int(selector[i]), int(selector[i + 1])
            if old == new:
                continue
            try:
                root = _bisect(
                    lambda x: candidate_gap(x, new, old), float(grid[i]), float(grid[i + 1])
                )
            except ValueError:
                # Ties or multiple switches inside one cell; report the cell edge.
                root = float(grid[i + 1])
            points.append(
                TurningPoint(x=root, kind="selector", detail=f"branch {old} to {new}")
            )

    points.sort(key=lambda p: p.x)
    return points


# ---------------------------------------------------------------------------
# Claims audit
# ---------------------------------------------------------------------------

class Verdict(Enum):
    REPRODUCED = "reproduced"
    CONTRADICTED = "contradicted"
    NOT_APPLICABLE = "not-applicable"


@dataclass
class AuditEntry:
    claim_id: str
    statement: str
    reference: str
    computed: dict[str, str] = field(default_factory=dict)
    verdict: Verdict = Verdict.NOT_APPLICABLE
    note: str = ""


@dataclass
class AuditReport:
    state_label: str
    m: float
    entries: list[AuditEntry]

    def entry(self, claim_id: str) -> AuditEntry:
        for e in self.entries:
            if e.claim_id == claim_id:
                return e
        raise KeyError(claim_id)

    def render_text(self) -> str:
        lines = [
            "claims audit",
            f"state: {self.state_label}",
            f"m: {self.m:g}",
            "backends: exact closed form / transcribed closed form",
            "",
        ]
        for i, e in enumerate(self.entries, start=1):
            lines.append(f"[{i}] {e.claim_id}")
            lines.append(f"    claim: {e.statement}")
            lines.append(f"    reference: {e.reference}")
            for key, val in e.computed.items():
                lines.append(f"    computed {key}: {val}")
            lines.append(f"    verdict: {e.verdict.value}")
            if e.note:
                lines.append(f"    note: {e.note}")
            lines.append("")
        return "\n".join(lines)


# Registry of audited claims; audit() emits exactly one entry per id.
REGISTERED_CLAIMS = (
    "gmod-asymptotic-decay",
    "gmod-no-sudden-death",
    "min-no-sudden-death",
    "min-no-asymptotic-decay",
    "min-longtime-value",
    "min-asymptotic-escape-condition",
)

_AUDIT_TOL = 1e-10


def _fmt(v: float) -> str:
    return "0" if v == 0.0 else format(float(v), ".12g")


def _limit_elements(state0: XState, m: float, backend: Backend):
    """Elements in the X -> 0 limit for a closed-form backend."""
    if isinstance(backend, ExactClosedForm):
        return thermal_product_state(m).elements
    evolution = evolve_on_grid(state0, m, np.array([0.0, 1.0]), backend)
    return evolution.elements_at(0.0)


def _classification_label(c: DecayClassification) -> str:
    if c.kind is DecayKind.SUDDEN_DEATH:
        return f"{c.kind.value} at X={c.x_death:.9f}"
    if c.kind is DecayKind.PERSISTENT_PLATEAU:
        return f"{c.kind.value} with limit {_fmt(c.limit)}"
    return c.kind.value


def audit(state0: XState, m: float, state_label: str = "xstate") -> AuditReport:
    """Check the registered asymptotic claims for one initial state and m.

    Always evaluates the 2x2 grid {exact, transcribed} x {min_paper,
    min_general}, plus GMOD under both backends, and classifies decay on the
    pinned grid.  Claims about quantities outside the physical state space
    get the not-applicable verdict rather than a pass or fail.
    """
    m = float(m)
    a0 = state0.a
    backends: dict[str, Backend] = {
        "exact": ExactClosedForm(),
        "transcribed": TranscribedClosedForm(),
    }

    # Long-time limits of every measure route.
    gmod_limits = {}
    min_limits = {}
    for name, backend in backends.items():
        elements = _limit_elements(state0, m, backend)
        w_abs, z_abs = abs(elements[4]), abs(elements[5])
        gmod_limits[name] = float(corr.gmod_from_elements(*elements[:4], w_abs, z_abs))
        min_limits[f"min_paper/{name}"] = float(corr.min_from_elements(*elements[:4], w_abs, z_abs))
        min_limits[f"min_general/{name}"] = float(
            corr.min_general(_matrix_from_elements(*elements))
        )

    classifications = {
        (tag, name): classify(state0, m, tag, backend)
        for tag in (Measure.GMOD, Measure.MIN_PAPER)
        for name, backend in backends.items()
    }

    entries: list[AuditEntry] = []

    entry = AuditEntry(
        claim_id="gmod-asymptotic-decay",
        statement="GMOD decays asymptotically: GMOD -> 0 as X -> 0",
        reference="GMOD(X=0) = 0",
        computed={f"GMOD(X=0), {n}": _fmt(v) for n, v in gmod_limits.items()},
    )
    entry.verdict = (
        Verdict.REPRODUCED if gmod_limits["exact"] <= ZERO_THRESHOLD else Verdict.CONTRADICTED
    )
    entry.note = "the long-time state is a product state, so GMOD vanishes"
    entries.append(entry)

    entry = AuditEntry(
        claim_id="gmod-no-sudden-death",
        statement="GMOD never dies suddenly: no zero crossing at interior X",
        reference="no root of GMOD(X) with 0 < X < 1",
        computed={
            f"classification, {n}": _classification_label(classifications[(Measure.GMOD, n)])
            for n in backends
        },
    )
    entry.verdict = (
        Verdict.REPRODUCED
        if classifications[(Measure.GMOD, "exact")].kind is not DecayKind.SUDDEN_DEATH
        else Verdict.CONTRADICTED
    )
    entries.append(entry)

    entry = AuditEntry(
        claim_id="min-no-sudden-death",
        statement="MIN never dies suddenly: no zero crossing at interior X",
        reference="no root of MIN(X) with 0 < X < 1",
        computed={
            f"classification, {n}": _classification_label(classifications[(Measure.MIN_PAPER, n)])
            for n in backends
        },
    )
    entry.verdict = (
        Verdict.REPRODUCED
        if classifications[(Measure.MIN_PAPER, "exact")].kind is not DecayKind.SUDDEN_DEATH
        else Verdict.CONTRADICTED
    )
    entries.append(entry)

    exact_paper = min_limits["min_paper/exact"]
    exact_general = min_limits["min_general/exact"]
    entry = AuditEntry(
        claim_id="min-no-asymptotic-decay",
        statement="MIN does not decay asymptotically: MIN(X -> 0) stays positive",
        reference="MIN(X=0) > 0",
        computed={f"MIN(X=0), {k}": _fmt(v) for k, v in min_limits.items()},
    )
    if exact_general <= ZERO_THRESHOLD:
        entry.verdict = Verdict.CONTRADICTED
        entry.note = (
            "holds only for the unconditional X-state form (min_paper plateaus at "
            f"{_fmt(exact_paper)} = 1/(4 (1+2m)^4)); the general MIN vanishes as X -> 0 "
            "because the steady state is a product state"
        )
    else:
        entry.verdict = Verdict.REPRODUCED
    entries.append(entry)

    claimed = (1.0 + m * a0 * (1.0 + m)) ** 2 / (4.0 * (1.0 + 2.0 * m) ** 4)
    matches = [k for k, v in min_limits.items() if abs(v - claimed) <= _AUDIT_TOL]
    entry = AuditEntry(
        claim_id="min-longtime-value",
        statement=(
            "the long-time MIN equals [1 + m a (1+m)]^2 / [4 (1+2m)^4], "
            "with a the initial doubly excited population"
        ),
        reference=f"claimed limit {_fmt(claimed)} for a={_fmt(a0)}, m={m:g}",
        computed={f"MIN(X=0), {k}": _fmt(v) for k, v in min_limits.items()},
    )
    if matches:
        entry.verdict = Verdict.REPRODUCED
        entry.note = f"matched by route(s): {', '.join(matches)}"
        if m == 0.0:
            entry.note += (
                "; at m = 0 the claimed expression loses its dependence on the initial "
                "state and coincides with the min_paper limit 1/4"
            )
    else:
        entry.verdict = Verdict.CONTRADICTED
        entry.note = (
            "reproduced by no backend: a relaxing semigroup forgets the initial state, "
            "so no initial-state-dependent limit is attainable"
        )
    entries.append(entry)

    entry = AuditEntry(
        claim_id="min-asymptotic-escape-condition",
        statement=(
            "MIN decays asymptotically only when the initial doubly excited "
            "population equals -1/(m + m^2)"
        ),
        reference="a = -1/(m + m^2)",
    )
    if m > 0.0:
        required = -1.0 / (m + m * m)
        entry.computed["required population"] = _fmt(required)
        entry.verdict = Verdict.NOT_APPLICABLE
        entry.note = (
            f"a = {_fmt(required)} is negative for every m > 0, outside the physical "
            "population range [0, 1]; no state satisfies the condition"
        )
    else:
        entry.computed["required population"] = "undefined (division by zero at m=0)"
        entry.verdict = Verdict.NOT_APPLICABLE
        entry.note = "the condition is undefined at m = 0"
    entries.append(entry)

    if tuple(e.claim_id for e in entries) != REGISTERED_CLAIMS:
        raise RuntimeError("audit registry mismatch")
    return AuditReport(state_label=state_label, m=m, entries=entries)
