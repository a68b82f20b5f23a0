"""Simulation harness: theorem grids, two-analyst runs, expectation checks."""

import pytest

from itergain.errors import ParamError, SpaceMismatch
from itergain.gains import LogBase, ProbabilityAssessment, cross_entropy_gain, expected_gain
from itergain.generators import HypothesisGenerator
from itergain.notation import parse_set
from itergain.outcomes import expected_set
from itergain.simulate import (
    SimulatedAnalyst,
    TrueMechanism,
    run_scenario,
    simulate_gain_distribution,
    verify_structural_theorems,
    verify_two_analyst_scenarios,
)
from itergain.tools import make_tool


def analyst(name, expect, space, p, base=LogBase.BITS):
    return SimulatedAnalyst(
        name,
        expected_set(parse_set(expect), parse_set(space)),
        ProbabilityAssessment(p),
        base,
    )


def test_structural_theorems_all_pass():
    report = verify_structural_theorems()
    assert report.all_passed
    assert report.stats["grid_points"] == 499
    assert report.stats["grid_checks"] == 1497
    assert report.stats["failures"] == 0
    assert report.stats["max_decomposition_error"] <= 1e-12


def test_structural_theorems_in_nats():
    assert verify_structural_theorems(LogBase.NATS).all_passed


def test_gain_distribution_calibrated():
    mech = TrueMechanism.bernoulli(0.95)
    report = simulate_gain_distribution(mech, analyst("a", "{1}", "{0,1}", 0.95), 20000, seed=3)
    assert report.all_passed
    target = expected_gain(ProbabilityAssessment(0.95))
    assert report.stats["mean_g"] == pytest.approx(target, abs=0.02)
    assert report.stats["theory_mean_g"] == target


def test_gain_distribution_miscalibrated():
    mech = TrueMechanism.bernoulli(0.80)
    report = simulate_gain_distribution(mech, analyst("a", "{1}", "{0,1}", 0.95), 20000, seed=3)
    assert report.all_passed
    target = cross_entropy_gain(0.80, ProbabilityAssessment(0.95))
    assert report.stats["theory_mean_g"] == target
    assert report.stats["mean_g"] == pytest.approx(target, abs=0.05)


def test_gain_distribution_requires_enough_runs():
    with pytest.raises(ParamError):
        simulate_gain_distribution(
            TrueMechanism.bernoulli(0.9), analyst("a", "{1}", "{0,1}", 0.9), 10
        )


def test_gain_distribution_is_reproducible():
    mech = TrueMechanism.bernoulli(0.9)
    a = simulate_gain_distribution(mech, analyst("a", "{1}", "{0,1}", 0.9), 2000, seed=11)
    b = simulate_gain_distribution(mech, analyst("a", "{1}", "{0,1}", 0.9), 2000, seed=11)
    assert a == b
    c = simulate_gain_distribution(mech, analyst("a", "{1}", "{0,1}", 0.9), 2000, seed=12)
    assert c.stats["mean_g"] != a.stats["mean_g"]


def test_gain_distribution_error_shrinks_with_runs():
    mech = TrueMechanism.bernoulli(0.95)
    target = expected_gain(ProbabilityAssessment(0.95))
    errors = []
    for n in (1000, 10_000, 100_000):
        report = simulate_gain_distribution(
            mech, analyst("a", "{1}", "{0,1}", 0.95), n, seed=29
        )
        errors.append(abs(report.stats["mean_g"] - target))
    improvements = sum(errors[i + 1] <= errors[i] for i in range(2))
    assert improvements >= 1
    assert errors[2] < errors[0]


def test_gain_distribution_concrete_plane_agrees_with_abstract():
    # Sign of a weak positive correlation in small samples: the event
    # probability is not known in closed form, so compare the two planes
    # against each other.
    space = "{-1,0,1}"
    gen = HypothesisGenerator("truth", "bivariate_normal", {"rho": 0.1}, n=20)
    tool = make_tool("correlation_sign", {"col_a": "x", "col_b": "y"})
    an = analyst("a", "{1}", space, 0.95)
    concrete = simulate_gain_distribution(
        TrueMechanism.from_tool(gen, tool), an, 2000, seed=5
    )
    rate = concrete.stats["event_rate"]
    assert 0.0 < rate < 1.0
    abstract = simulate_gain_distribution(
        TrueMechanism.bernoulli(rate), an, 2000, seed=6
    )
    assert concrete.stats["mean_g"] == pytest.approx(
        abstract.stats["mean_g"], abs=3 * (concrete.stats["se_g"] + abstract.stats["se_g"])
    )


def test_two_analysts_unequal_assessments_always_differ():
    mech = TrueMechanism.categorical(
        parse_set("{-1,0,1}"), {1: 0.9, 0: 0.05, -1: 0.05}
    )
    report = verify_two_analyst_scenarios(
        analyst("A", "{1}", "{-1,0,1}", 0.95),
        analyst("B", "{1}", "{-1,0,1}", 0.70),
        mech,
        5000,
        seed=1,
    )
    assert report.all_passed
    assert report.stats["runs_with_differing_gains"] == 5000
    assert sum(report.counts.values()) == 5000
    # Identical sets: only the two same-side scenarios are reachable.
    assert report.counts["a_expected_b_unexpected"] == 0
    assert report.counts["a_unexpected_b_expected"] == 0


def test_two_analysts_identical_declarations_always_equal():
    mech = TrueMechanism.categorical(parse_set("{-1,0,1}"), {1: 0.8, 0: 0.1, -1: 0.1})
    report = verify_two_analyst_scenarios(
        analyst("A", "{1}", "{-1,0,1}", 0.8),
        analyst("B", "{1}", "{-1,0,1}", 0.8),
        mech,
        3000,
        seed=2,
    )
    assert report.all_passed
    assert report.stats["runs_with_equal_gains"] == 3000


def test_two_analysts_different_sets_same_assessment():
    mech = TrueMechanism.categorical(parse_set("{-1,0,1}"), {1: 0.5, 0: 0.3, -1: 0.2})
    report = verify_two_analyst_scenarios(
        analyst("A", "{1}", "{-1,0,1}", 0.8),
        analyst("B", "{-1,0}", "{-1,0,1}", 0.8),
        mech,
        4000,
        seed=3,
    )
    assert report.all_passed
    counts = report.counts
    assert sum(counts.values()) == 4000
    # Complementary sets: same-side scenarios are impossible.
    assert counts["both_expected"] == 0
    assert counts["both_unexpected"] == 0
    assert report.stats["runs_with_differing_gains"] == 4000


def test_two_analysts_space_mismatch():
    mech = TrueMechanism.categorical(parse_set("{-1,0,1}"), {1: 1.0})
    with pytest.raises(SpaceMismatch):
        verify_two_analyst_scenarios(
            analyst("A", "{1}", "{-1,0,1}", 0.9),
            analyst("B", "{1}", "{0,1}", 0.9),
            mech,
            100,
        )


def test_two_analysts_need_output_mechanism():
    with pytest.raises(ParamError):
        verify_two_analyst_scenarios(
            analyst("A", "{1}", "{0,1}", 0.9),
            analyst("B", "{1}", "{0,1}", 0.8),
            TrueMechanism.bernoulli(0.9),
            100,
        )


def test_categorical_mechanism_validation():
    space = parse_set("{-1,0,1}")
    with pytest.raises(ParamError):
        TrueMechanism.categorical(space, {5: 1.0})
    with pytest.raises(ParamError):
        TrueMechanism.categorical(space, {1: 0.0})
    with pytest.raises(ParamError):
        TrueMechanism.bernoulli(1.0)


def test_scenario_runner_theorems():
    report = run_scenario({"kind": "theorems"})
    assert report.kind == "structural_theorems"
    assert report.all_passed


def test_scenario_runner_expectation_abstract():
    report = run_scenario(
        {"kind": "expectation", "p": 0.95, "p_true": 0.95, "runs": 2000, "seed": 4}
    )
    assert report.kind == "gain_distribution"
    assert report.all_passed


def test_scenario_runner_two_analyst():
    report = run_scenario(
        {
            "kind": "two_analyst",
            "space": "{-1,0,1}",
            "a": {"expect": "{1}", "p": 0.95},
            "b": {"expect": "{1}", "p": 0.7},
            "weights": {"1": 0.9, "0": 0.05, "-1": 0.05},
            "runs": 2000,
            "seed": 5,
        }
    )
    assert report.kind == "two_analyst"
    assert report.all_passed


def test_scenario_runner_rejects_unknown_kind():
    with pytest.raises(ParamError):
        run_scenario({"kind": "telepathy"})


def test_report_serialization():
    report = verify_structural_theorems()
    payload = report.to_dict()
    assert payload["all_passed"] is True
    assert "assertions" in payload and payload["assertions"]
    text = report.render_text()
    assert "ALL PASS" in text
