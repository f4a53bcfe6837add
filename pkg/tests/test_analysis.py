"""Sweeps, decay classification, turning points, and the claims audit.

Several closed-course oracles are frozen here after hand derivation for the
alpha = 1/2 Yu-Eberly state at zero temperature (elements a = X^2/6,
b = c = X(3-X)/6, z = X/3, w = 0):

* MIN selector switch: (a-b-c+d)^2/4 meets |z|^2 where 2X^2 - 8X + 3 = 0,
  i.e. X = (4 - sqrt(10))/2.
* GMOD selector switch: the population candidate meets 4|z|^2 at the root
  of X^2 (2X-3)^2 + (2X^2 - 9X + 6)^2 - 8 X^2 on (0.5, 0.7).

And for alpha = 1 (a = 1/3, z = 1/3, d = 0), zero temperature: concurrence
is (2X/3) (1 - sqrt((1-X)(3-X))) clamped at zero, which dies at
(1-X)(3-X) = 1, i.e. X* = 2 - sqrt(2).
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcorr.analysis import (
    BISECT_XTOL,
    GRID_POINTS,
    REGISTERED_CLAIMS,
    ZERO_THRESHOLD,
    DecayClassification,
    DecayKind,
    SweepSeries,
    Verdict,
    audit,
    classify,
    default_grid,
    sweep,
    turning_points,
)
from qcorr.correlations import Measure, concurrence_xstate, gmod_xstate, min_xstate
from qcorr.dynamics import (
    ExactClosedForm,
    OdeOracle,
    TranscribedClosedForm,
    propagate_exact,
)
from qcorr.qstate import (
    XState,
    bell_phi_plus,
    thermal_product_state,
    yu_eberly_state,
)

EXACT = ExactClosedForm()
DEFAULT_M = (0.0, 0.1, 0.5, 1.0)


def bisect(fn, lo, hi, tol=1e-13):
    flo = fn(lo)
    assert flo * fn(hi) < 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (fn(mid) > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestDefaultGrid:
    def test_shape_and_endpoints(self):
        grid = default_grid()
        assert grid.size == GRID_POINTS == 2001
        assert grid[0] == 0.0 and grid[-1] == 1.0
        assert_allclose(np.diff(grid), 1.0 / 2000.0, atol=1e-15)


class TestSweep:
    def test_matches_pointwise_evaluation(self):
        grid = np.linspace(0.0, 1.0, 17)
        st = yu_eberly_state(0.5)
        series = sweep(st, 0.3, Measure.GMOD, EXACT, grid)
        for i, x in enumerate(grid):
            ref = gmod_xstate(propagate_exact(st, 0.3, float(x)))
            assert series.values[i] == pytest.approx(ref, abs=1e-14)

    def test_metadata(self):
        grid = np.linspace(0.0, 1.0, 5)
        series = sweep(bell_phi_plus(), 1.0, Measure.MIN_PAPER, EXACT, grid, "bell")
        assert series.m == 1.0
        assert series.measure is Measure.MIN_PAPER
        assert series.state_label == "bell"
        assert series.backend_name == "exact"

    def test_general_measures_take_the_matrix_path(self):
        grid = np.linspace(0.0, 1.0, 9)
        st = yu_eberly_state(0.5)
        g = sweep(st, 0.0, Measure.GMOD_GENERAL, EXACT, grid)
        ref = sweep(st, 0.0, Measure.GMOD, EXACT, grid)
        assert_allclose(g.values, ref.values, atol=1e-12)
        mn = sweep(st, 0.0, Measure.MIN_GENERAL, EXACT, grid)
        assert mn.values[0] == pytest.approx(0.0, abs=1e-12)  # product steady state

    def test_series_validation(self):
        with pytest.raises(ValueError):
            SweepSeries(grid=np.array([0.0, 0.5]), values=np.zeros(3), m=0.0,
                        measure=Measure.GMOD)
        with pytest.raises(ValueError):
            SweepSeries(grid=np.array([0.5, 0.2]), values=np.zeros(2), m=0.0,
                        measure=Measure.GMOD)


class TestClassifyConcurrence:
    def test_frozen_course_matches_implementation(self):
        st = yu_eberly_state(1.0)
        for x in (0.9, 0.7, 0.62, 0.5, 0.3):
            expected = max(0.0, 2.0 * x / 3.0 * (1.0 - math.sqrt((1.0 - x) * (3.0 - x))))
            got = concurrence_xstate(propagate_exact(st, 0.0, x))
            assert got == pytest.approx(expected, abs=1e-14)

    def test_sudden_death_at_two_minus_sqrt2(self):
        result = classify(yu_eberly_state(1.0), 0.0, Measure.CONCURRENCE, EXACT)
        assert result.kind is DecayKind.SUDDEN_DEATH
        assert result.x_death == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-9)
        assert result.limit is None

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 1.0])
    @pytest.mark.parametrize("m", [0.0, 0.1, 0.5, 1.0])
    def test_classification_stable_across_backends(self, alpha, m):
        st = yu_eberly_state(alpha)
        exact = classify(st, m, Measure.CONCURRENCE, EXACT)
        ode = classify(st, m, Measure.CONCURRENCE, OdeOracle())
        assert exact.kind is ode.kind
        if exact.kind is DecayKind.SUDDEN_DEATH:
            assert abs(exact.x_death - ode.x_death) < 1e-6

    def test_bisection_brackets_the_threshold(self):
        # the refined death point separates dead from alive to well inside
        # the reporting precision
        for st, m in ((yu_eberly_state(1.0), 0.0), (bell_phi_plus(), 1.0)):
            xd = classify(st, m, Measure.CONCURRENCE, EXACT).x_death
            probe = sweep(st, m, Measure.CONCURRENCE, EXACT,
                          np.array([xd - 1e-8, xd + 1e-8]))
            assert probe.values[0] <= ZERO_THRESHOLD < probe.values[1]

    def test_small_alpha_never_crosses(self):
        # long-lived entanglement at zero temperature for weak excitation
        result = classify(yu_eberly_state(0.25), 0.0, Measure.CONCURRENCE, EXACT)
        assert result.kind is DecayKind.ASYMPTOTIC_DECAY
        grid = default_grid()
        series = sweep(yu_eberly_state(0.25), 0.0, Measure.CONCURRENCE, EXACT, grid)
        assert np.all(series.values[grid > 0.0] > ZERO_THRESHOLD)

    def test_bell_state_zero_temperature_decays_asymptotically(self):
        result = classify(bell_phi_plus(), 0.0, Measure.CONCURRENCE, EXACT)
        assert result.kind is DecayKind.ASYMPTOTIC_DECAY

    def test_warm_reservoir_kills_bell_entanglement_suddenly(self):
        result = classify(bell_phi_plus(), 1.0, Measure.CONCURRENCE, EXACT)
        assert result.kind is DecayKind.SUDDEN_DEATH
        assert 0.0 < result.x_death < 1.0


class TestClassifyDiscordMeasures:
    def test_gmod_always_decays_asymptotically(self):
        for m in DEFAULT_M:
            result = classify(yu_eberly_state(0.5), m, Measure.GMOD, EXACT)
            assert result.kind is DecayKind.ASYMPTOTIC_DECAY

    def test_min_paper_plateau_value(self):
        for m in DEFAULT_M:
            result = classify(yu_eberly_state(0.5), m, Measure.MIN_PAPER, EXACT)
            assert result.kind is DecayKind.PERSISTENT_PLATEAU
            assert result.limit == pytest.approx(
                1.0 / (4.0 * (1.0 + 2.0 * m) ** 4), abs=1e-10
            )

    def test_min_general_decays_asymptotically(self):
        result = classify(yu_eberly_state(0.5), 0.5, Measure.MIN_GENERAL, EXACT)
        assert result.kind is DecayKind.ASYMPTOTIC_DECAY

    def test_thermal_start_is_flat_plateau(self):
        m = 0.5
        result = classify(thermal_product_state(m), m, Measure.MIN_PAPER, EXACT)
        assert result.kind is DecayKind.PERSISTENT_PLATEAU
        assert result.limit == pytest.approx(1.0 / (4.0 * (1.0 + 2.0 * m) ** 4), abs=1e-12)

    def test_dead_everywhere_counts_as_asymptotic(self):
        mixed = XState(0.25, 0.25, 0.25, 0.25)
        result = classify(mixed, 0.0, Measure.CONCURRENCE, EXACT)
        assert result.kind is DecayKind.ASYMPTOTIC_DECAY

    def test_custom_grid(self):
        grid = np.linspace(0.0, 1.0, 101)
        result = classify(yu_eberly_state(1.0), 0.0, Measure.CONCURRENCE, EXACT, grid=grid)
        assert result.x_death == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-9)


class TestDecayClassificationInvariants:
    def test_sudden_death_requires_interior_x(self):
        with pytest.raises(ValueError):
            DecayClassification(kind=DecayKind.SUDDEN_DEATH, x_death=None)
        with pytest.raises(ValueError):
            DecayClassification(kind=DecayKind.SUDDEN_DEATH, x_death=1.0)

    def test_plateau_requires_positive_limit(self):
        with pytest.raises(ValueError):
            DecayClassification(kind=DecayKind.PERSISTENT_PLATEAU, limit=0.0)

    def test_fields_are_exclusive(self):
        with pytest.raises(ValueError):
            DecayClassification(kind=DecayKind.ASYMPTOTIC_DECAY, x_death=0.5)
        with pytest.raises(ValueError):
            DecayClassification(kind=DecayKind.SUDDEN_DEATH, x_death=0.5, limit=1.0)


class TestTurningPoints:
    def test_single_peak(self):
        series = SweepSeries(
            grid=np.array([0.0, 0.5, 1.0]),
            values=np.array([0.0, 1.0, 0.0]),
            m=0.0,
            measure=Measure.GMOD,
        )
        points = turning_points(series)
        assert [p.x for p in points if p.kind == "slope"] == [0.5]

    def test_flat_stretches_are_skipped(self):
        series = SweepSeries(
            grid=np.linspace(0.0, 1.0, 5),
            values=np.array([0.0, 0.0, 1.0, 1.0, 0.0]),
            m=0.0,
            measure=Measure.GMOD,
        )
        points = turning_points(series)
        slopes = [p.x for p in points if p.kind == "slope"]
        assert slopes == [0.75]

    def test_monotone_series_has_no_slope_points(self):
        series = SweepSeries(
            grid=np.linspace(0.0, 1.0, 11),
            values=np.linspace(0.0, 1.0, 11) ** 2,
            m=0.0,
            measure=Measure.GMOD,
        )
        assert turning_points(series) == []

    def test_min_selector_switch_location(self):
        # hand-derived: branch change where 2 X^2 - 8 X + 3 = 0
        expected = (4.0 - math.sqrt(10.0)) / 2.0
        series = sweep(yu_eberly_state(0.5), 0.0, Measure.MIN_PAPER, EXACT, default_grid())
        switches = [p for p in turning_points(series) if p.kind == "selector"]
        assert len(switches) == 1
        assert switches[0].x == pytest.approx(expected, abs=1e-9)

    def test_gmod_selector_switch_location(self):
        poly = lambda x: x**2 * (2 * x - 3) ** 2 + (2 * x**2 - 9 * x + 6) ** 2 - 8 * x**2
        expected = bisect(poly, 0.5, 0.7)
        series = sweep(yu_eberly_state(0.5), 0.0, Measure.GMOD, EXACT, default_grid())
        switches = [p for p in turning_points(series) if p.kind == "selector"]
        assert len(switches) == 1
        assert switches[0].x == pytest.approx(expected, abs=1e-9)

    def test_concurrence_selector_switch_is_the_death_point(self):
        # the max clamp activating is a branch change too
        series = sweep(yu_eberly_state(1.0), 0.0, Measure.CONCURRENCE, EXACT, default_grid())
        switches = [p for p in turning_points(series) if p.kind == "selector"]
        assert any(p.x == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-6) for p in switches)

    def test_min_paper_dip_shows_up_as_slope_change(self):
        series = sweep(yu_eberly_state(0.5), 0.1, Measure.MIN_PAPER, EXACT, default_grid())
        assert any(p.kind == "slope" for p in turning_points(series))


class TestAudit:
    def test_registry_order(self):
        report = audit(yu_eberly_state(0.5), 1.0)
        assert tuple(e.claim_id for e in report.entries) == REGISTERED_CLAIMS

    def test_verdicts_warm_reservoir(self):
        report = audit(yu_eberly_state(0.5), 1.0)
        expected = {
            "gmod-asymptotic-decay": Verdict.REPRODUCED,
            "gmod-no-sudden-death": Verdict.REPRODUCED,
            "min-no-sudden-death": Verdict.REPRODUCED,
            "min-no-asymptotic-decay": Verdict.CONTRADICTED,
            "min-longtime-value": Verdict.CONTRADICTED,
            "min-asymptotic-escape-condition": Verdict.NOT_APPLICABLE,
        }
        for claim_id, verdict in expected.items():
            assert report.entry(claim_id).verdict is verdict, claim_id

    def test_verdicts_zero_temperature(self):
        report = audit(yu_eberly_state(0.5), 0.0)
        # the claimed long-time value degenerates to the plateau at m = 0
        entry = report.entry("min-longtime-value")
        assert entry.verdict is Verdict.REPRODUCED
        assert "coincides" in entry.note
        assert report.entry("min-asymptotic-escape-condition").verdict is Verdict.NOT_APPLICABLE
        assert report.entry("min-no-asymptotic-decay").verdict is Verdict.CONTRADICTED

    def test_escape_condition_flagged_unphysical(self):
        entry = audit(yu_eberly_state(0.5), 0.5).entry("min-asymptotic-escape-condition")
        assert "unphysical" in entry.note or "outside the physical" in entry.note
        assert entry.computed["required population"].startswith("-")

    def test_longtime_claim_value(self):
        m, alpha = 0.5, 0.75
        st = yu_eberly_state(alpha)
        entry = audit(st, m).entry("min-longtime-value")
        claimed = (1.0 + m * st.a * (1.0 + m)) ** 2 / (4.0 * (1.0 + 2.0 * m) ** 4)
        assert f"{claimed:.12g}" in entry.reference

    def test_render_text_structure(self):
        report = audit(yu_eberly_state(0.5), 1.0, "yu_eberly(alpha=0.5)")
        text = report.render_text()
        assert "state: yu_eberly(alpha=0.5)" in text
        assert "m: 1" in text
        for claim_id in REGISTERED_CLAIMS:
            assert claim_id in text
        assert text.count("verdict: ") == len(REGISTERED_CLAIMS)
        assert "verdict: contradicted" in text
        assert "verdict: reproduced" in text

    def test_unknown_claim_lookup(self):
        report = audit(yu_eberly_state(0.5), 1.0)
        with pytest.raises(KeyError):
            report.entry("no-such-claim")
