"""Informativeness checks: discrimination, negative controls, reproducibility."""

import pytest

from itergain.dataset import Dataset
from itergain.errors import ParamError
from itergain.generators import HypothesisGenerator
from itergain.informativeness import informativeness_check
from itergain.notation import parse_set
from itergain.outcomes import Kind
from itergain.tools import ToolSpec, make_tool, register_tool


def poisson(lam, n=200):
    return HypothesisGenerator(f"poisson{lam}", "poisson", {"lam": lam}, n=n)


def test_sample_mean_separates_poisson_rates():
    tool = make_tool("sample_mean", {"column": "x"})
    verdict = informativeness_check(tool, poisson(2), poisson(5), 1000, seed=11)
    assert verdict.informative
    assert verdict.mean_h1 == pytest.approx(2.0, abs=0.05)
    assert verdict.mean_h2 == pytest.approx(5.0, abs=0.05)
    assert verdict.ci_separation > 0
    assert verdict.p_value < 0.01


def test_row_count_cannot_separate_equal_sizes():
    tool = make_tool("row_count")
    verdict = informativeness_check(
        tool, poisson(2, n=100), poisson(5, n=100), 200, seed=3
    )
    assert not verdict.informative
    assert verdict.mean_h1 == verdict.mean_h2 == 100.0
    assert verdict.ci_separation == 0.0


def test_correlation_sign_separates_opposite_correlations():
    tool = make_tool("correlation_sign", {"col_a": "x", "col_b": "y"})
    h1 = HypothesisGenerator("pos", "bivariate_normal", {"rho": 0.6}, n=100)
    h2 = HypothesisGenerator("neg", "bivariate_normal", {"rho": -0.6}, n=100)
    verdict = informativeness_check(tool, h1, h2, 1000, seed=21)
    assert verdict.informative
    assert verdict.mean_h1 > 0.9
    assert verdict.mean_h2 < -0.9


def test_identical_generators_double_blind():
    tool = make_tool("sample_mean", {"column": "x"})
    verdict = informativeness_check(tool, poisson(2), poisson(2), 400, seed=77)
    assert not verdict.informative
    # Arms must be independent draws, not copies of one another.
    assert verdict.mean_h1 != verdict.mean_h2


def test_false_positive_rate_near_alpha():
    tool = make_tool("sample_mean", {"column": "x"})
    hits = 0
    trials = 40
    for rep in range(trials):
        verdict = informativeness_check(
            tool, poisson(2, n=50), poisson(2, n=50), 200, alpha=0.01, seed=1000 + rep
        )
        hits += verdict.informative
    assert hits <= 4


def test_seeded_runs_are_bit_identical():
    tool = make_tool("sample_mean", {"column": "x"})
    a = informativeness_check(tool, poisson(2), poisson(5), 200, seed=5)
    b = informativeness_check(tool, poisson(2), poisson(5), 200, seed=5)
    assert a == b


def test_replicate_floor():
    tool = make_tool("row_count")
    with pytest.raises(ParamError):
        informativeness_check(tool, poisson(2), poisson(5), 99)
    with pytest.raises(ParamError):
        informativeness_check(tool, poisson(2), poisson(5), 1000, alpha=0.0)


def _register_parity_tool():
    def parity(tool: ToolSpec, data: Dataset) -> str:
        total = int(data.column("x").present().sum())
        return "even" if total % 2 == 0 else "odd"

    register_tool("sum_parity", parity)
    return ToolSpec(
        "sum_parity", {}, Kind.CATEGORY, parse_set("{even,odd}")
    )


def test_categorical_outputs_use_frequency_comparison():
    tool = _register_parity_tool()
    # Bernoulli sums: p=0.05 with n=40 is mostly even-ish small counts,
    # p=0.95 concentrates near 38; parity frequencies stay near 1/2 for
    # both, so the tool should NOT separate them.
    h1 = HypothesisGenerator("a", "bernoulli", {"p": 0.5}, n=41)
    h2 = HypothesisGenerator("b", "bernoulli", {"p": 0.5}, n=41)
    verdict = informativeness_check(tool, h1, h2, 400, seed=2)
    assert not verdict.informative
    assert 0.0 <= verdict.ci_separation <= 1.0

    # A forced frequency shift: n=1 vs n=2 with p=1 gives all-odd vs all-even.
    h3 = HypothesisGenerator("c", "bernoulli", {"p": 1.0}, n=1)
    h4 = HypothesisGenerator("d", "bernoulli", {"p": 1.0}, n=2)
    verdict = informativeness_check(tool, h3, h4, 400, seed=2)
    assert verdict.informative
