"""Monte Carlo test of whether a tool discriminates two hypotheses.

A tool is informative for a pair of hypotheses when the expected tool
output differs between them. Exact expectations are rarely available, so
the check draws replicated datasets under each hypothesis, applies the
tool, and compares the two Monte Carlo samples: a Welch two-sample test
for numeric outputs, a chi-square homogeneity test over outcome
frequencies for categorical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import GenError, ParamError
from .generators import HypothesisGenerator, replicate_rng
from .outcomes import Kind
from .tools import ToolSpec, apply_tool

_MIN_REPLICATES = 100


@dataclass(frozen=True)
class InformativenessVerdict:
    informative: bool
    mean_h1: float
    mean_h2: float
    ci_separation: float
    n_replicates: int
    p_value: float
    alpha: float

    def to_dict(self) -> dict:
        return {
            "informative": self.informative,
            "mean_h1": self.mean_h1,
            "mean_h2": self.mean_h2,
            "ci_separation": self.ci_separation,
            "n_replicates": self.n_replicates,
            "p_value": self.p_value,
            "alpha": self.alpha,
        }


def informativeness_check(
    tool: ToolSpec,
    h1: HypothesisGenerator,
    h2: HypothesisGenerator,
    n_replicates: int = 1000,
    alpha: float = 0.01,
    seed: int = 0,
) -> InformativenessVerdict:
    """Decide whether ``tool`` separates ``h1`` from ``h2``.

    Seeded and counter-based per replicate: a fixed seed gives
    bit-identical verdicts regardless of evaluation order. The two arms
    always use disjoint streams, so identical generator specifications
    yield independent same-distribution samples (the negative control:
    false positives at roughly ``alpha``).
    """
    if n_replicates < _MIN_REPLICATES:
        raise ParamError(
            f"n_replicates must be at least {_MIN_REPLICATES}, got {n_replicates}"
        )
    if not 0.0 < alpha < 1.0:
        raise ParamError(f"alpha must lie in (0, 1), got {alpha}")

    outputs_a = _run_arm(tool, h1, n_replicates, seed, stream=1)
    outputs_b = _run_arm(tool, h2, n_replicates, seed, stream=2)

    if tool.output_kind is Kind.CATEGORY:
        return _categorical_verdict(outputs_a, outputs_b, n_replicates, alpha)
    a = np.asarray(outputs_a, dtype=np.float64)
    b = np.asarray(outputs_b, dtype=np.float64)
    return _numeric_verdict(a, b, n_replicates, alpha)


def _run_arm(tool, generator, n_replicates, seed, stream) -> list:
    outputs = []
    for i in range(n_replicates):
        rng = replicate_rng(seed, i, stream=stream)
        try:
            data = generator.sample(rng)
        except GenError:
            raise
        except Exception as exc:
            raise GenError(
                f"generator {generator.hypothesis_id!r} failed on replicate {i}: {exc}"
            ) from exc
        outputs.append(apply_tool(tool, data))
    return outputs


def _numeric_verdict(a, b, n_replicates, alpha) -> InformativenessVerdict:
    mean_a, mean_b = float(a.mean()), float(b.mean())
    var_a = float(a.var(ddof=1))
    var_b = float(b.var(ddof=1))
    delta = abs(mean_a - mean_b)

    if var_a == 0.0 and var_b == 0.0:
        # Both arms constant: the comparison is exact, no test needed.
        informative = delta > 0.0
        return InformativenessVerdict(
            informative, mean_a, mean_b, delta, n_replicates,
            0.0 if informative else 1.0, alpha,
        )

    se_a, se_b = var_a / a.size, var_b / b.size
    se_delta = math.sqrt(se_a + se_b)
    dof = (se_a + se_b) ** 2 / (
        (se_a**2 / (a.size - 1)) + (se_b**2 / (b.size - 1))
    )
    t_stat = delta / se_delta
    p_value = 2.0 * float(stats.t.sf(t_stat, dof))
    t_crit = float(stats.t.ppf(1.0 - alpha / 2.0, dof))
    return InformativenessVerdict(
        p_value < alpha,
        mean_a,
        mean_b,
        delta - t_crit * se_delta,
        n_replicates,
        p_value,
        alpha,
    )


def _categorical_verdict(outputs_a, outputs_b, n_replicates, alpha) -> InformativenessVerdict:
    levels = sorted(set(outputs_a) | set(outputs_b))
    codes = {label: i for i, label in enumerate(levels)}
    counts_a = np.bincount([codes[v] for v in outputs_a], minlength=len(levels))
    counts_b = np.bincount([codes[v] for v in outputs_b], minlength=len(levels))

    mean_a = float(np.mean([codes[v] for v in outputs_a]))
    mean_b = float(np.mean([codes[v] for v in outputs_b]))
    freq_a = counts_a / counts_a.sum()
    freq_b = counts_b / counts_b.sum()
    tv_distance = 0.5 * float(np.abs(freq_a - freq_b).sum())

    if len(levels) < 2:
        return InformativenessVerdict(
            False, mean_a, mean_b, 0.0, n_replicates, 1.0, alpha
        )
    table = np.vstack([counts_a, counts_b])
    # Drop all-zero categories; chi-square needs positive column sums.
    table = table[:, table.sum(axis=0) > 0]
    _, p_value, _, _ = stats.chi2_contingency(table)
    p_value = float(p_value)
    return InformativenessVerdict(
        p_value < alpha, mean_a, mean_b, tv_distance, n_replicates, p_value, alpha
    )
