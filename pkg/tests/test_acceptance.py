"""Acceptance gate.

One test per shipped criterion, each asserting its stated tolerance and
time budget. The workload fixtures are shared: the monotonicity and
corrector-decrease criteria re-examine every solve performed for the
convergence, table, and tail criteria.
"""

import math
import time

import numpy as np
import pytest

from ptslcp.corrector import build_line
from ptslcp.directions import (
    DirectionKind,
    corrector_direction,
    predictor_direction,
)
from ptslcp.predictor import expand_ray, feasible_alpha_limit
from ptslcp.problem import GeneratorConfig, generate_random
from ptslcp.solver import SolverConfig, Termination, solve, theory_outer_bound
from ptslcp.target_space import omega, proximities, residuals

from conftest import make_interior_iterate


# --------------------------------------------------------------- workloads

@pytest.fixture(scope="module")
def theory_runs():
    """25 audited solves at each n in {16, 32, 64} with the theory radius."""
    begin = time.perf_counter()
    runs = []
    cfg = SolverConfig(eps=1e-7, audit=True,
                       direction=DirectionKind.AUTO_CORRECTOR)
    for n in (16, 32, 64):
        for seed in range(25):
            problem, pair = generate_random(GeneratorConfig(n=n, seed=seed))
            x, s, trace = solve(problem, pair, cfg)
            runs.append((problem, trace))
    return {"elapsed": time.perf_counter() - begin, "runs": runs}


@pytest.fixture(scope="module")
def table_runs():
    """25 audited solves per size and direction at the wide radius."""
    begin = time.perf_counter()
    cells = {}
    runs = []
    for kind in (DirectionKind.AUTO_CORRECTOR,
                 DirectionKind.UNIVERSAL_TANGENT):
        cfg = SolverConfig(tau=1.5, eps=1e-7, audit=True, direction=kind)
        for n in (16, 32, 64, 128):
            traces = []
            for seed in range(25):
                problem, pair = generate_random(
                    GeneratorConfig(n=n, seed=seed))
                x, s, trace = solve(problem, pair, cfg)
                traces.append(trace)
                runs.append((problem, trace))
            cells[(n, kind.value)] = traces
    return {"elapsed": time.perf_counter() - begin, "cells": cells,
            "runs": runs}


@pytest.fixture(scope="module")
def tail_runs():
    """10 instances at n=64 solved to 1e-12 with both directions."""
    begin = time.perf_counter()
    instances = []
    runs = []
    for seed in range(10):
        problem, pair = generate_random(GeneratorConfig(n=64, seed=seed))
        entry = {"seed": seed}
        for kind in (DirectionKind.AUTO_CORRECTOR,
                     DirectionKind.UNIVERSAL_TANGENT):
            cfg = SolverConfig(tau=1.5, eps=1e-12, audit=True,
                               direction=kind)
            x, s, trace = solve(problem, pair, cfg)
            entry[kind.value] = trace
            runs.append((problem, trace))
        instances.append(entry)
    return {"elapsed": time.perf_counter() - begin, "instances": instances,
            "runs": runs}


def gap_sequence(trace):
    return [trace.xts_initial] + [rec.xts for rec in trace.records]


def max_tail_drop(trace, region=1e-5):
    """Largest single-iteration decade drop of x^T s started inside region."""
    gaps = gap_sequence(trace)
    best = 0.0
    for before, after in zip(gaps, gaps[1:]):
        if before <= region and after > 0.0:
            best = max(best, math.log10(before / after))
    return best


# -------------------------------------------------------------- criterion 1

def test_criterion_1_identity_suite():
    begin = time.perf_counter()
    sizes = (2, 8, 32)
    cases = 0
    for n in sizes:
        for seed in range(70):
            problem, pair = generate_random(GeneratorConfig(n=n, seed=seed))
            rng = np.random.default_rng(10_000 + 97 * seed + n)
            it = make_interior_iterate(problem, pair, rng)
            cases += 1

            # normalization of the scaled residuals
            rh2 = it.r / it.rho
            assert rh2.sum() == pytest.approx(n + 1, rel=1e-9)

            # barrier splits into control value plus proximity gap
            from ptslcp.target_space import barrier_value, control_value
            report = proximities(it)
            split = barrier_value(it) - control_value(it.w)
            assert split == pytest.approx(report.psi, rel=1e-9, abs=1e-9)

            # corrector line slope equals the squared proximity
            corr = corrector_direction(problem, it)
            line = build_line(it, corr)
            assert line.slope(0.0) == pytest.approx(-report.zeta0 ** 2,
                                                    abs=1e-9)

            # structure of the two predictor expansions
            ut = predictor_direction(problem, it,
                                     DirectionKind.UNIVERSAL_TANGENT)
            exp_ut = expand_ray(it, ut)
            assert np.abs(exp_ut.h).max() <= 1e-12
            ac = predictor_direction(problem, it,
                                     DirectionKind.AUTO_CORRECTOR)
            exp_ac = expand_ray(it, ac)
            assert np.abs(exp_ac.base + exp_ac.h).max() <= 1e-12

            # expansion agrees with direct residual recomputation
            for direction, exp in ((ut, exp_ut), (ac, exp_ac)):
                c0, c1, c2 = exp.residual_coefficients()
                limit = min(feasible_alpha_limit(exp, direction, it), 1.0)
                for alpha in rng.uniform(0.0, 0.9 * limit, 5):
                    from_coeffs = c0 + alpha * c1 + alpha * alpha * c2
                    direct, _, _ = residuals(
                        it.x + alpha * direction.dx,
                        it.s + alpha * direction.ds,
                        it.w.scaled(1.0 - alpha))
                    np.testing.assert_allclose(from_coeffs, direct,
                                               rtol=1e-10, atol=1e-13)

                # displacement products agree with the quadratic form
                inner = float(direction.dx @ direction.ds)
                quad = float(direction.dx @ (problem.M @ direction.dx))
                assert inner == pytest.approx(quad, rel=1e-9, abs=1e-12)

    elapsed = time.perf_counter() - begin
    assert cases >= 200
    assert elapsed < 10.0
    print(f"criterion 1: PASS ({cases} cases, {elapsed:.1f}s)")


# -------------------------------------------------------------- criterion 2

def test_criterion_2_direction_bounds():
    solves = 0
    directions_checked = 0
    for seed in range(25):
        kind = (DirectionKind.AUTO_CORRECTOR if seed % 2 == 0
                else DirectionKind.UNIVERSAL_TANGENT)
        problem, pair = generate_random(GeneratorConfig(n=16, seed=seed))
        cfg = SolverConfig(tau=1.5, eps=1e-7, audit=True, direction=kind)
        # audit mode rechecks the four product bounds (tolerance 1e-9) on
        # every predictor and corrector direction and raises on violation
        x, s, trace = solve(problem, pair, cfg)
        assert trace.termination is Termination.CONVERGED
        report = trace.audit
        assert report.directions_checked == (trace.predictor_count
                                             + trace.corrector_count)
        directions_checked += report.directions_checked
        solves += 1
    assert solves == 25
    assert directions_checked > 0
    print(f"criterion 2: PASS ({directions_checked} directions over "
          f"{solves} solves)")


# -------------------------------------------------------------- criterion 3

def test_criterion_3_theory_run(theory_runs):
    runs = theory_runs["runs"]
    assert len(runs) == 75
    for problem, trace in runs:
        assert trace.termination is Termination.CONVERGED
        bound = theory_outer_bound(problem.n, trace.mu_star_initial,
                                   trace.eps)
        assert trace.predictor_count <= bound
        assert all(rec.corrector_steps <= 24 for rec in trace.records)
    assert theory_runs["elapsed"] < 60.0
    worst = max(trace.predictor_count for _, trace in runs)
    print(f"criterion 3: PASS (75/75 converged, max predictors {worst}, "
          f"{theory_runs['elapsed']:.1f}s)")


# -------------------------------------------------------------- criterion 4

REFERENCE_MEANS = {
    # (n, direction): (predictors, correctors)
    (16, "ac"): (8.4, 20.3),
    (32, "ac"): (9.4, 21.8),
    (64, "ac"): (11.6, 32.8),
    (128, "ac"): (15.0, 37.1),
    (16, "ut"): (11.2, 30.7),
    (32, "ut"): (12.2, 31.6),
    (64, "ut"): (13.8, 35.8),
    (128, "ut"): (17.7, 46.6),
}


def test_criterion_4_reference_table(table_runs):
    for key, traces in table_runs["cells"].items():
        assert len(traces) == 25
        assert all(t.termination is Termination.CONVERGED for t in traces)
        mean_pred = float(np.mean([t.predictor_count for t in traces]))
        mean_corr = float(np.mean([t.corrector_count for t in traces]))
        ref_pred, ref_corr = REFERENCE_MEANS[key]
        assert ref_pred / 2.0 <= mean_pred <= ref_pred * 2.0, key
        assert ref_corr / 2.0 <= mean_corr <= ref_corr * 2.0, key
    assert table_runs["elapsed"] < 300.0
    print(f"criterion 4: PASS (8 cells within 2x of the reference, "
          f"{table_runs['elapsed']:.1f}s)")


# -------------------------------------------------------------- criterion 5

def test_criterion_5_quadratic_tail(tail_runs):
    instances = tail_runs["instances"]
    assert len(instances) == 10
    contrasting = 0
    for entry in instances:
        ac_drop = max_tail_drop(entry["ac"])
        ut_drop = max_tail_drop(entry["ut"])
        if ac_drop >= 3.0 and ut_drop <= 2.0:
            contrasting += 1
    assert contrasting >= 8
    assert tail_runs["elapsed"] < 120.0
    print(f"criterion 5: PASS ({contrasting}/10 instances show the "
          f"contrast, {tail_runs['elapsed']:.1f}s)")


# -------------------------------------------------------------- criterion 6

def test_criterion_6_monotonicity_and_drift(theory_runs, table_runs,
                                            tail_runs):
    everything = (theory_runs["runs"] + table_runs["runs"]
                  + tail_runs["runs"])
    assert everything
    for problem, trace in everything:
        heights = [trace.v0_initial] + [rec.v0 for rec in trace.records]
        assert all(a > b for a, b in zip(heights, heights[1:]))
        merits = ([trace.mu_star_initial]
                  + [rec.mu_star for rec in trace.records])
        assert all(a > b for a, b in zip(merits, merits[1:]))
        for rec in trace.records:
            assert rec.delta_after_corr <= trace.beta + 1e-9
            assert rec.psi_after_pred <= trace.tau + 1e-9
        tol = 1e-8 * (1.0 + float(np.abs(problem.q).max()))
        assert trace.feasibility_drift <= tol
    print(f"criterion 6: PASS ({len(everything)} solves checked)")


# -------------------------------------------------------------- criterion 7

def test_criterion_7_corrector_decrease_floor(theory_runs, table_runs,
                                              tail_runs):
    floor = omega(0.25 / math.sqrt(1.5))
    assert floor == pytest.approx(0.018371693003090273, rel=1e-12)
    everything = (theory_runs["runs"] + table_runs["runs"]
                  + tail_runs["runs"])
    steps = 0
    for _, trace in everything:
        report = trace.audit
        assert report is not None
        # every recenter fires at proximity above beta, so the certified
        # minimum decrease applies to each of them
        if report.corrector_steps_checked:
            assert report.min_corrector_decrease >= floor - 1e-9
        steps += report.corrector_steps_checked
    assert steps > 0
    print(f"criterion 7: PASS ({steps} corrector steps above the "
          f"omega floor)")
