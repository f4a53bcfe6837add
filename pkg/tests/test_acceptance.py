"""Acceptance gate: eight criteria, one reported pass/fail line each.

Each test computes its verdict first, emits the line through the
``record_criterion`` fixture (also replayed in the terminal summary), and
only then asserts, so a failing criterion still leaves its line in the log.
"""

import math
import re
import time

import numpy as np

from qcorr.analysis import ZERO_THRESHOLD, DecayKind, audit, classify, default_grid, sweep
from qcorr.cli import run
from qcorr.config import parse_config
from qcorr.correlations import (
    Measure,
    concurrence_xstate,
    gmod_general,
    gmod_xstate,
    min_general,
    min_xstate,
)
from qcorr.dynamics import (
    ExactClosedForm,
    OdeOracle,
    integrate_ode,
    propagate_exact,
    propagate_transcribed,
)
from qcorr.qstate import (
    ReservoirParams,
    bell_phi_plus,
    random_xstate,
    validate,
    xstate_to_matrix,
    yu_eberly_state,
)

M_SWEEP = (0.0, 0.1, 0.5, 1.0, 2.0)
TIME_SWEEP = (0.1, 0.5, 1.0, 2.0, 5.0)
DEFAULT_M = (0.0, 0.1, 0.5, 1.0)
EXACT = ExactClosedForm()


def test_criterion_1_oracle_equivalence(record_criterion):
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    states = [random_xstate(rng) for _ in range(100)]
    batch = np.stack([xstate_to_matrix(s) for s in states])

    worst = 0.0
    for m in M_SWEEP:
        params = ReservoirParams(1.0, m)
        rho = batch
        t_done = 0.0
        for t in TIME_SWEEP:
            rho = integrate_ode(rho, params, t - t_done)
            t_done = t
            x = math.exp(-t * (1.0 + 2.0 * m))
            ref = np.stack(
                [xstate_to_matrix(propagate_exact(s, m, x)) for s in states]
            )
            worst = max(worst, float(np.max(np.abs(rho - ref))))
    elapsed = time.perf_counter() - started

    passed = worst <= 1e-8 and elapsed < 10.0
    line = record_criterion(
        1,
        "exact channel vs RK4 oracle (dt=1e-3), 100 states x 5 occupations x "
        f"5 times: max deviation {worst:.3e} <= 1e-8, runtime {elapsed:.2f} s < 10 s",
        passed,
    )
    assert passed, line


def test_criterion_2_physicality_and_semigroup(record_criterion):
    rng = np.random.default_rng(2025)
    worst_trace = 0.0
    worst_eig = 0.0
    for _ in range(300):
        st = propagate_exact(random_xstate(rng), rng.uniform(0.0, 2.0), rng.uniform())
        report = validate(xstate_to_matrix(st))
        worst_trace = max(worst_trace, abs(report.trace_defect))
        worst_eig = min(worst_eig, report.min_eigenvalue)
    for _ in range(10):
        rho = integrate_ode(
            xstate_to_matrix(random_xstate(rng)),
            ReservoirParams(1.0, rng.uniform(0.0, 2.0)),
            rng.uniform(0.1, 3.0),
        )
        report = validate(rho)
        worst_trace = max(worst_trace, abs(report.trace_defect))
        worst_eig = min(worst_eig, report.min_eigenvalue)

    worst_semigroup = 0.0
    for _ in range(100):
        st = random_xstate(rng)
        m = rng.uniform(0.0, 2.0)
        x1, x2 = rng.uniform(0.05, 1.0, size=2)
        two = propagate_exact(propagate_exact(st, m, x1), m, x2)
        one = propagate_exact(st, m, x1 * x2)
        worst_semigroup = max(
            worst_semigroup,
            max(abs(complex(p) - complex(q)) for p, q in zip(two.elements, one.elements)),
        )

    passed = worst_trace <= 1e-12 and worst_eig >= -1e-10 and worst_semigroup <= 1e-13
    line = record_criterion(
        2,
        f"physicality of propagated states: trace defect {worst_trace:.2e} <= 1e-12, "
        f"min eigenvalue {worst_eig:.2e} >= -1e-10, semigroup defect "
        f"{worst_semigroup:.2e} <= 1e-13",
        passed,
    )
    assert passed, line


def test_criterion_3_transcribed_form_pinning(record_criterion):
    rng = np.random.default_rng(2026)
    worst_sum = 0.0
    for _ in range(100):
        st = random_xstate(rng)
        out = propagate_transcribed(st, 0.0, rng.uniform())
        x = out.a + out.b + out.c + out.d
        # population sum collapses to X itself at zero temperature
        worst_sum = max(worst_sum, abs(x - (1.0 - out.trace_defect)))
    # recompute against the sampled x explicitly
    worst_m0 = 0.0
    worst_identity = 0.0
    for _ in range(100):
        st = random_xstate(rng)
        x = rng.uniform()
        out = propagate_transcribed(st, 0.0, x)
        worst_m0 = max(worst_m0, abs(out.a + out.b + out.c + out.d - x))
        out1 = propagate_transcribed(st, rng.uniform(0.0, 2.0), 1.0)
        deviation = max(
            abs(out1.a - st.a), abs(out1.b - st.b), abs(out1.c - st.c),
            abs(out1.d - st.d), abs(out1.w - st.w), abs(out1.z - st.z),
        )
        worst_identity = max(worst_identity, deviation)

    passed = worst_m0 <= 1e-12 and worst_identity <= 1e-12 and worst_sum <= 1e-15
    line = record_criterion(
        3,
        "transcribed closed form pinned: zero-temperature population sum equals X "
        f"(defect {worst_m0:.2e} <= 1e-12), X=1 identity on 100 random states "
        f"(defect {worst_identity:.2e} <= 1e-12)",
        passed,
    )
    assert passed, line


def test_criterion_4_spot_values(record_criterion):
    bell = bell_phi_plus()
    ye_half = yu_eberly_state(0.5)
    rho_bell = xstate_to_matrix(bell)
    checks = {
        "gmod(bell)=1/2": abs(gmod_xstate(bell) - 0.5),
        "min(bell)=1/2": abs(min_xstate(bell) - 0.5),
        "gmod(ye 1/2)=5/36": abs(gmod_xstate(ye_half) - 5.0 / 36.0),
        "min(ye 1/2)=2/9": abs(min_xstate(ye_half) - 2.0 / 9.0),
        "concurrence(ye 1)=2/3": abs(concurrence_xstate(yu_eberly_state(1.0)) - 2.0 / 3.0),
        "gmod_general(bell)=1/2": abs(gmod_general(rho_bell) - 0.5),
        "min_general(bell)=1/2": abs(min_general(rho_bell) - 0.5),
    }
    worst = max(checks.values())
    passed = worst <= 1e-12
    line = record_criterion(
        4,
        "spot values (Bell and Yu-Eberly states, closed forms cross-checked "
        f"against the Bloch-form routes): max deviation {worst:.2e} <= 1e-12",
        passed,
    )
    assert passed, line


def test_criterion_5_sweep_claims(record_criterion):
    st = yu_eberly_state(0.5)

    kinds_ok = all(
        classify(st, m, Measure.GMOD, EXACT).kind is DecayKind.ASYMPTOTIC_DECAY
        for m in DEFAULT_M
    )

    gmod_at_one = [gmod_xstate(propagate_exact(st, m, 1.0)) for m in DEFAULT_M]
    gmod_at_zero = [gmod_xstate(propagate_exact(st, m, 0.0)) for m in DEFAULT_M]
    min_at_one = [min_xstate(propagate_exact(st, m, 1.0)) for m in DEFAULT_M]
    min_at_zero = [min_xstate(propagate_exact(st, m, 0.0)) for m in DEFAULT_M]
    spread = max(
        max(gmod_at_one) - min(gmod_at_one),
        max(gmod_at_zero) - min(gmod_at_zero),
        max(min_at_one) - min(min_at_one),
    )
    min_zero_gaps = [
        abs(min_at_zero[i] - min_at_zero[j])
        for i in range(len(DEFAULT_M))
        for j in range(i + 1, len(DEFAULT_M))
    ]

    plateau_defect = 0.0
    plateaus_ok = True
    for m in DEFAULT_M:
        result = classify(st, m, Measure.MIN_PAPER, EXACT)
        plateaus_ok = plateaus_ok and result.kind is DecayKind.PERSISTENT_PLATEAU
        if result.limit is not None:
            plateau_defect = max(
                plateau_defect, abs(result.limit - 1.0 / (4.0 * (1.0 + 2.0 * m) ** 4))
            )

    passed = (
        kinds_ok
        and spread <= 1e-12
        and min(min_zero_gaps) >= 1e-6
        and plateaus_ok
        and plateau_defect <= 1e-10
    )
    line = record_criterion(
        5,
        "sweep claims: GMOD always decays asymptotically; GMOD endpoints and MIN "
        f"at X=1 occupation-independent (spread {spread:.1e} <= 1e-12) while MIN "
        f"at X=0 separates (min gap {min(min_zero_gaps):.1e} >= 1e-6); MIN plateau "
        f"limit matches 1/(4(1+2m)^4) within {plateau_defect:.1e} <= 1e-10",
        passed,
    )
    assert passed, line


def test_criterion_6_audit_contradictions(record_criterion, tmp_path):
    st = yu_eberly_state(0.5)
    api_ok = True
    general_limit_recorded = True
    for m in (0.1, 0.5, 1.0):
        report = audit(st, m)
        api_ok = api_ok and (
            report.entry("min-no-asymptotic-decay").verdict.value == "contradicted"
            and report.entry("min-longtime-value").verdict.value == "contradicted"
            and report.entry("min-asymptotic-escape-condition").verdict.value
            == "not-applicable"
        )
        general = float(
            report.entry("min-no-asymptotic-decay").computed["MIN(X=0), min_general/exact"]
        )
        general_limit_recorded = general_limit_recorded and general <= ZERO_THRESHOLD
        api_ok = api_ok and "no backend" in report.entry("min-longtime-value").note
        api_ok = api_ok and "physical" in report.entry("min-asymptotic-escape-condition").note

    paths = run(
        parse_config({"scenario": "audit", "state": {"yu_eberly": {"alpha": 0.5}}}),
        tmp_path,
    )
    text = paths[0].read_text()

    def section_verdict(section: str, claim: str) -> str:
        match = re.search(rf"{claim}\n(?:.+\n)*?\s+verdict: (\S+)", section)
        return match.group(1) if match else "missing"

    file_ok = True
    for section in text.split("claims audit")[1:]:
        m_match = re.search(r"m: ([0-9.]+)", section)
        if m_match is None or float(m_match.group(1)) == 0.0:
            continue
        file_ok = file_ok and (
            section_verdict(section, "min-no-asymptotic-decay") == "contradicted"
            and section_verdict(section, "min-longtime-value") == "contradicted"
            and section_verdict(section, "min-asymptotic-escape-condition")
            == "not-applicable"
        )

    passed = api_ok and general_limit_recorded and file_ok
    line = record_criterion(
        6,
        "audit records the contradictions: general MIN vanishes at X=0, the claimed "
        "long-time MIN value is reproduced by no backend for m>0, and the escape "
        "condition's required population is flagged unphysical — in the API and in "
        "the rendered audit file",
        passed,
    )
    assert passed, line


def test_criterion_7_entanglement_death_contrast(record_criterion):
    exact = classify(yu_eberly_state(1.0), 0.0, Measure.CONCURRENCE, EXACT)
    ode = classify(yu_eberly_state(1.0), 0.0, Measure.CONCURRENCE, OdeOracle())
    death_ok = (
        exact.kind is DecayKind.SUDDEN_DEATH
        and ode.kind is DecayKind.SUDDEN_DEATH
        and 0.0 < exact.x_death < 1.0
    )
    backend_gap = abs(exact.x_death - ode.x_death) if death_ok else float("inf")

    quarter = classify(yu_eberly_state(0.25), 0.0, Measure.CONCURRENCE, EXACT)
    grid = default_grid()
    series = sweep(yu_eberly_state(0.25), 0.0, Measure.CONCURRENCE, EXACT, grid)
    survives = quarter.kind is DecayKind.ASYMPTOTIC_DECAY and bool(
        np.all(series.values[grid > 0.0] > ZERO_THRESHOLD)
    )

    passed = death_ok and backend_gap <= 1e-6 and survives
    line = record_criterion(
        7,
        "zero-temperature entanglement contrast: fully excited start dies suddenly at "
        f"X*={exact.x_death:.9f} (backend gap {backend_gap:.1e} <= 1e-6); weakly "
        "excited start never crosses zero on (0, 1]",
        passed,
    )
    assert passed, line


def test_criterion_8_deterministic_output(record_criterion, tmp_path):
    identical = True
    for scenario in ("figure1", "figure2"):
        first = run(parse_config({"scenario": scenario}), tmp_path / "a")
        second = run(parse_config({"scenario": scenario}), tmp_path / "b")
        for one, two in zip(first, second):
            identical = identical and one.read_bytes() == two.read_bytes()

    line = record_criterion(
        8,
        "figure scenarios rerun byte-identical (suite wall time reported by pytest; "
        "budget 60 s)",
        identical,
    )
    assert identical, line
