"""Analytic tools: dataset -> scalar output, with declared outcome sets.

Each tool declares its complete potential outcome set up front; applying
it asserts the output actually lies there, so a contract break surfaces
as ToolContractError instead of corrupting downstream accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .dataset import Column, Dataset
from .errors import ModelViolation, ParamError, ToolContractError, ToolDomainError
from .outcomes import (
    FiniteSet,
    IntegerRange,
    Kind,
    OutcomeSpace,
    RealInterval,
    ScalarValue,
    contains,
    normalize,
)

DEFAULT_SKEW_BAND = 0.05


@dataclass(frozen=True)
class ToolSpec:
    """A named tool plus parameters and its complete outcome set.

    ``space_claimed`` marks outcome sets narrowed by user-supplied domain
    knowledge (e.g. a claimed non-negative column): an output escaping a
    claimed set is a model violation, while escaping an intrinsic set is
    an engine bug.
    """

    tool_id: str
    params: Mapping[str, Any] = field(default_factory=dict)
    output_kind: Kind = Kind.REAL
    declared_space: OutcomeSpace = None  # type: ignore[assignment]
    space_claimed: bool = False


@dataclass(frozen=True)
class _Builtin:
    tool_id: str
    describe: str
    output_kind: Kind
    space_for: Callable[[Mapping[str, Any], Dataset | None], OutcomeSpace]
    apply: Callable[[ToolSpec, Dataset], ScalarValue]
    param_names: tuple[str, ...] = ()


def _numeric_column(data: Dataset, tool: ToolSpec, key: str = "column") -> Column:
    params = tool.params
    if key not in params:
        raise ParamError(f"{tool.tool_id} requires a {key!r} parameter")
    col = data.column(str(params[key]))
    if col.kind is Kind.CATEGORY:
        raise ParamError(
            f"{tool.tool_id} needs a numeric column; {col.name!r} is categorical"
        )
    return col


def _row_count_space(params, data) -> OutcomeSpace:
    return normalize(IntegerRange(0, None))


def _apply_row_count(tool: ToolSpec, data: Dataset) -> int:
    return data.n_rows


def _sample_mean_space(params, data) -> OutcomeSpace:
    low = params.get("low", -math.inf)
    high = params.get("high", math.inf)
    try:
        low, high = float(low), float(high)
    except (TypeError, ValueError):
        raise ParamError("sample_mean bounds must be numbers") from None
    if not low < high:
        raise ParamError(f"sample_mean bounds must satisfy low < high, got [{low}, {high}]")
    return normalize(RealInterval(low, high))


def _apply_sample_mean(tool: ToolSpec, data: Dataset) -> float:
    col = _numeric_column(data, tool)
    values = col.present()
    if values.size == 0:
        raise ToolDomainError(f"mean of {col.name!r} is undefined: no observed values")
    return float(np.mean(values.astype(np.float64)))


def _sign_space(params, data) -> OutcomeSpace:
    return normalize(FiniteSet([-1, 0, 1]))


def _apply_correlation_sign(tool: ToolSpec, data: Dataset) -> int:
    col_a = _numeric_column(data, tool, "col_a")
    col_b = _numeric_column(data, tool, "col_b")
    both = ~(col_a.missing | col_b.missing)
    x = col_a.values[both].astype(np.float64)
    y = col_b.values[both].astype(np.float64)
    if x.size < 2:
        raise ToolDomainError("correlation needs at least two complete pairs")
    x = x - x.mean()
    y = y - y.mean()
    sx = float(np.sqrt(np.sum(x * x)))
    sy = float(np.sqrt(np.sum(y * y)))
    if sx == 0.0 or sy == 0.0:
        raise ToolDomainError("correlation is undefined for a zero-variance column")
    r = float(np.sum(x * y)) / (sx * sy)
    return (r > 0) - (r < 0)


def _missing_count_space(params, data) -> OutcomeSpace:
    hi = data.n_rows if data is not None else None
    return normalize(IntegerRange(0, hi))


def _apply_missing_count(tool: ToolSpec, data: Dataset) -> int:
    col_name = tool.params.get("column")
    if col_name is None:
        raise ParamError("missing_count requires a 'column' parameter")
    return data.column(str(col_name)).n_missing()


def _apply_skewness_sign(tool: ToolSpec, data: Dataset) -> int:
    col = _numeric_column(data, tool)
    tau = float(tool.params.get("tau", DEFAULT_SKEW_BAND))
    if tau < 0:
        raise ParamError(f"skewness zero-band must be non-negative, got {tau}")
    values = col.present().astype(np.float64)
    if values.size < 2:
        raise ToolDomainError("skewness needs at least two observed values")
    centered = values - values.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise ToolDomainError("skewness is undefined for a zero-variance column")
    g1 = float(np.mean(centered**3)) / m2**1.5
    if abs(g1) <= tau:
        return 0
    return 1 if g1 > 0 else -1


_BUILTINS: dict[str, _Builtin] = {
    b.tool_id: b
    for b in [
        _Builtin(
            "row_count",
            "number of rows in the dataset",
            Kind.INTEGER,
            _row_count_space,
            _apply_row_count,
        ),
        _Builtin(
            "sample_mean",
            "mean of a numeric column (missing cells skipped); optional "
            "low/high params narrow the outcome set for bounded data",
            Kind.REAL,
            _sample_mean_space,
            _apply_sample_mean,
            ("column", "low", "high"),
        ),
        _Builtin(
            "correlation_sign",
            "sign of the Pearson correlation of two numeric columns",
            Kind.INTEGER,
            _sign_space,
            _apply_correlation_sign,
            ("col_a", "col_b"),
        ),
        _Builtin(
            "missing_count",
            "number of missing cells in a column",
            Kind.INTEGER,
            _missing_count_space,
            _apply_missing_count,
            ("column",),
        ),
        _Builtin(
            "skewness_sign",
            "sign of the sample third standardized moment, with a zero band "
            "of width tau (default 0.05)",
            Kind.INTEGER,
            _sign_space,
            _apply_skewness_sign,
            ("column", "tau"),
        ),
    ]
}

_CUSTOM_APPLY: dict[str, Callable[[ToolSpec, Dataset], ScalarValue]] = {}


def builtin_tool_ids() -> list[str]:
    return sorted(_BUILTINS)


def describe_tools() -> list[dict]:
    """Metadata for every built-in tool (for the CLI and the API)."""
    out = []
    for b in _BUILTINS.values():
        out.append(
            {
                "tool_id": b.tool_id,
                "description": b.describe,
                "output_kind": b.output_kind.value,
                "params": list(b.param_names),
                "default_space": str(b.space_for({}, None)),
            }
        )
    return sorted(out, key=lambda d: d["tool_id"])


def make_tool(
    tool_id: str,
    params: Mapping[str, Any] | None = None,
    data: Dataset | None = None,
) -> ToolSpec:
    """Build a ToolSpec for a built-in tool.

    Some outcome sets are sharper when the dataset is known (e.g. a
    missing count is bounded by the row count), so pass ``data`` when
    available.
    """
    builtin = _BUILTINS.get(tool_id)
    if builtin is None:
        raise ParamError(
            f"unknown tool {tool_id!r}; built-ins: {', '.join(builtin_tool_ids())}"
        )
    params = dict(params or {})
    space = builtin.space_for(params, data)
    claimed = tool_id == "sample_mean" and ("low" in params or "high" in params)
    return ToolSpec(tool_id, params, builtin.output_kind, space, claimed)


def register_tool(
    tool_id: str,
    apply: Callable[[ToolSpec, Dataset], ScalarValue],
) -> None:
    """Register a custom tool implementation for an existing ToolSpec id.

    Intended for embedding callers and tests; the CLI and service only
    expose built-ins.
    """
    _CUSTOM_APPLY[tool_id] = apply


def apply_tool(tool: ToolSpec, data: Dataset) -> ScalarValue:
    """Apply a tool to a dataset and return its scalar output.

    Pure in (tool, data). The output is checked against the tool's
    declared outcome set; an escape is a ToolContractError.
    """
    builtin = _BUILTINS.get(tool.tool_id)
    if builtin is not None:
        output = builtin.apply(tool, data)
    elif tool.tool_id in _CUSTOM_APPLY:
        output = _CUSTOM_APPLY[tool.tool_id](tool, data)
    else:
        raise ParamError(f"unknown tool {tool.tool_id!r}")

    if tool.declared_space is not None and not contains(tool.declared_space, output):
        if tool.space_claimed:
            exc = ModelViolation(
                f"{tool.tool_id} produced {output!r} outside the claimed "
                f"outcome set {tool.declared_space}; the claim is falsified"
            )
            exc.observed = output
            raise exc
        raise ToolContractError(
            f"{tool.tool_id} produced {output!r} outside its declared outcome "
            f"set {tool.declared_space}"
        )
    return output
