"""Sampleable data-generating mechanisms standing in for unknown truth.

A generator is an immutable specification (mechanism name, parameters,
sample size); sampling takes an explicit random generator, and helper
``replicate_rng`` derives independent counter-based streams so replicated
draws are reproducible and independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .dataset import Column, Dataset
from .errors import GenError
from .outcomes import Kind

_MECHANISMS = (
    "normal",
    "poisson",
    "uniform",
    "bernoulli",
    "exponential",
    "bivariate_normal",
    "fixed",
)


def replicate_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one replicate of one stream.

    Counter-based (Philox): the stream for (seed, index, stream) is fixed
    regardless of how many other replicates run or in what order.
    """
    if not isinstance(index, int) or index < 0:
        raise GenError(f"replicate index must be a non-negative integer, got {index!r}")
    key = abs(int(seed)) % (2**128)
    return np.random.Generator(
        np.random.Philox(key=key, counter=[0, index, stream, 0])
    )


@dataclass(frozen=True)
class HypothesisGenerator:
    """One hypothesis about the data-generating mechanism.

    Mechanisms: normal(mu, sigma), poisson(lam), uniform(a, b),
    bernoulli(p), exponential(rate), bivariate_normal(rho[, mu_x, mu_y,
    sigma_x, sigma_y]), fixed(columns). Any mechanism accepts miss_rate
    to knock out cells independently at that rate. Single-column
    mechanisms emit column "x" (override with the column param);
    bivariate_normal emits "x" and "y".
    """

    hypothesis_id: str
    mechanism: str
    params: Mapping[str, Any] = field(default_factory=dict)
    n: int = 100

    def __post_init__(self) -> None:
        if self.mechanism not in _MECHANISMS:
            raise GenError(
                f"unknown mechanism {self.mechanism!r}; "
                f"supported: {', '.join(_MECHANISMS)}"
            )
        if not isinstance(self.n, int) or self.n < 0:
            raise GenError(f"sample size must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "params", dict(self.params))
        _VALIDATORS[self.mechanism](self.params)
        miss = self.params.get("miss_rate", 0.0)
        if not isinstance(miss, (int, float)) or not 0.0 <= float(miss) < 1.0:
            raise GenError(f"miss_rate must lie in [0, 1), got {miss!r}")

    def sample(self, rng: np.random.Generator) -> Dataset:
        data = _SAMPLERS[self.mechanism](self, rng)
        miss = float(self.params.get("miss_rate", 0.0))
        if miss > 0.0:
            for col in data.columns.values():
                col.missing = rng.random(data.n_rows) < miss
        return data

    def sample_with_seed(self, seed: int, index: int = 0) -> Dataset:
        """Reproducible draw: the same (seed, index) always yields the same data."""
        return self.sample(replicate_rng(seed, index))

    def to_dict(self) -> dict:
        return {
            "id": self.hypothesis_id,
            "mechanism": self.mechanism,
            "n": self.n,
            **{k: v for k, v in self.params.items()},
        }

    @staticmethod
    def from_dict(spec: Mapping[str, Any]) -> "HypothesisGenerator":
        spec = dict(spec)
        try:
            mechanism = spec.pop("mechanism")
        except KeyError:
            raise GenError("generator spec needs a 'mechanism' field") from None
        hypothesis_id = str(spec.pop("id", mechanism))
        n = spec.pop("n", 100)
        if not isinstance(n, int):
            raise GenError(f"generator 'n' must be an integer, got {n!r}")
        return HypothesisGenerator(hypothesis_id, str(mechanism), spec, n)


def _need_number(params: Mapping, key: str, default=None) -> float:
    if key not in params:
        if default is None:
            raise GenError(f"mechanism needs parameter {key!r}")
        return float(default)
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise GenError(f"parameter {key!r} must be a finite number, got {v!r}")
    return float(v)


def _check_normal(params) -> None:
    _need_number(params, "mu", 0.0)
    if _need_number(params, "sigma", 1.0) < 0:
        raise GenError("sigma must be non-negative")


def _check_poisson(params) -> None:
    if _need_number(params, "lam") < 0:
        raise GenError("lam must be non-negative")


def _check_uniform(params) -> None:
    a = _need_number(params, "a", 0.0)
    b = _need_number(params, "b", 1.0)
    if not a <= b:
        raise GenError(f"uniform needs a <= b, got a={a}, b={b}")


def _check_bernoulli(params) -> None:
    p = _need_number(params, "p")
    if not 0.0 <= p <= 1.0:
        raise GenError(f"bernoulli p must lie in [0, 1], got {p}")


def _check_exponential(params) -> None:
    if _need_number(params, "rate") <= 0:
        raise GenError("rate must be positive")


def _check_bivariate(params) -> None:
    rho = _need_number(params, "rho")
    if not -1.0 <= rho <= 1.0:
        raise GenError(f"rho must lie in [-1, 1], got {rho}")
    _need_number(params, "mu_x", 0.0)
    _need_number(params, "mu_y", 0.0)
    if _need_number(params, "sigma_x", 1.0) < 0 or _need_number(params, "sigma_y", 1.0) < 0:
        raise GenError("sigma_x and sigma_y must be non-negative")


def _check_fixed(params) -> None:
    cols = params.get("columns")
    if not isinstance(cols, Mapping) or not cols:
        raise GenError("fixed mechanism needs a nonempty 'columns' mapping")


_VALIDATORS = {
    "normal": _check_normal,
    "poisson": _check_poisson,
    "uniform": _check_uniform,
    "bernoulli": _check_bernoulli,
    "exponential": _check_exponential,
    "bivariate_normal": _check_bivariate,
    "fixed": _check_fixed,
}


def _column_name(gen: HypothesisGenerator) -> str:
    return str(gen.params.get("column", "x"))


def _sample_normal(gen: HypothesisGenerator, rng) -> Dataset:
    mu = float(gen.params.get("mu", 0.0))
    sigma = float(gen.params.get("sigma", 1.0))
    values = rng.normal(mu, sigma, gen.n)
    return _single_real(gen, values)


def _sample_poisson(gen: HypothesisGenerator, rng) -> Dataset:
    values = rng.poisson(float(gen.params["lam"]), gen.n).astype(np.int64)
    return _single_int(gen, values)


def _sample_uniform(gen: HypothesisGenerator, rng) -> Dataset:
    a = float(gen.params.get("a", 0.0))
    b = float(gen.params.get("b", 1.0))
    return _single_real(gen, rng.uniform(a, b, gen.n))


def _sample_bernoulli(gen: HypothesisGenerator, rng) -> Dataset:
    values = (rng.random(gen.n) < float(gen.params["p"])).astype(np.int64)
    return _single_int(gen, values)


def _sample_exponential(gen: HypothesisGenerator, rng) -> Dataset:
    scale = 1.0 / float(gen.params["rate"])
    return _single_real(gen, rng.exponential(scale, gen.n))


def _sample_bivariate(gen: HypothesisGenerator, rng) -> Dataset:
    rho = float(gen.params["rho"])
    mu_x = float(gen.params.get("mu_x", 0.0))
    mu_y = float(gen.params.get("mu_y", 0.0))
    sx = float(gen.params.get("sigma_x", 1.0))
    sy = float(gen.params.get("sigma_y", 1.0))
    z1 = rng.normal(0.0, 1.0, gen.n)
    z2 = rng.normal(0.0, 1.0, gen.n)
    x = mu_x + sx * z1
    y = mu_y + sy * (rho * z1 + math.sqrt(max(0.0, 1.0 - rho * rho)) * z2)
    cols = {
        "x": Column("x", Kind.REAL, x, np.zeros(gen.n, dtype=bool)),
        "y": Column("y", Kind.REAL, y, np.zeros(gen.n, dtype=bool)),
    }
    return Dataset(cols, gen.n)


def _sample_fixed(gen: HypothesisGenerator, rng) -> Dataset:
    return Dataset.from_columns(gen.params["columns"])


def _single_real(gen: HypothesisGenerator, values: np.ndarray) -> Dataset:
    name = _column_name(gen)
    col = Column(name, Kind.REAL, values.astype(np.float64), np.zeros(gen.n, dtype=bool))
    return Dataset({name: col}, gen.n)


def _single_int(gen: HypothesisGenerator, values: np.ndarray) -> Dataset:
    name = _column_name(gen)
    col = Column(name, Kind.INTEGER, values, np.zeros(gen.n, dtype=bool))
    return Dataset({name: col}, gen.n)


_SAMPLERS = {
    "normal": _sample_normal,
    "poisson": _sample_poisson,
    "uniform": _sample_uniform,
    "bernoulli": _sample_bernoulli,
    "exponential": _sample_exponential,
    "bivariate_normal": _sample_bivariate,
    "fixed": _sample_fixed,
}
