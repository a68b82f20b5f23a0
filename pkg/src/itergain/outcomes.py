"""Set algebra for scalar outcome domains.

A complete outcome set describes every value a tool can produce; an
expected set is an analyst-declared strict subset of it; the anomaly set
is the complement of the expected set within the complete set. Values
normalize to a canonical form so structural equality coincides with
mathematical equality. Membership is exact: interval endpoints carry no
epsilon, and an observed value outside the complete set is a loud model
violation, never silently coerced to an anomaly.

Scalar kinds are integer, real, and category label. Integer literals mix
freely with real material (they embed as isolated real points); integer
ranges do not, and labels never mix with numbers.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import (
    EmptySpace,
    InvalidExpectedSet,
    KindMismatch,
    ModelViolation,
    ParseError,
)

ScalarValue = Union[int, float, str]

# Integer sets embedded into a real domain become isolated points; cap the
# expansion so an unbounded range cannot be requested by accident.
_PROMOTE_LIMIT = 4096

_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")
_RESERVED_LABELS = frozenset({"int", "real", "union", "inf", "nan"})


class Kind(enum.Enum):
    INTEGER = "integer"
    REAL = "real"
    CATEGORY = "category"


class EventVerdict(enum.Enum):
    AS_EXPECTED = "AsExpected"
    UNEXPECTED = "Unexpected"


# ---------------------------------------------------------------------------
# Raw set expressions (constructor surface; normalize() is the gate)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, init=False)
class FiniteSet:
    """An explicit collection of scalar values."""

    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(values))


@dataclass(frozen=True)
class IntegerRange:
    """Inclusive integer range; None means unbounded on that side."""

    lo: int | None = None
    hi: int | None = None


@dataclass(frozen=True)
class RealInterval:
    """Real interval with explicit endpoint closedness."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True


@dataclass(frozen=True, init=False)
class UnionOf:
    """Union of any set expressions; normalization flattens and merges."""

    members: tuple

    def __init__(self, members):
        object.__setattr__(self, "members", tuple(members))


RawSetExpression = Union[FiniteSet, IntegerRange, RealInterval, UnionOf]


# ---------------------------------------------------------------------------
# Canonical form
#
# INTEGER parts:  ((lo, hi), ...)  ints or None, sorted, gaps >= 2
# REAL parts:     ((lo, lo_closed, hi, hi_closed), ...) sorted, unmergeable
# CATEGORY parts: (label, ...) sorted
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomeSpace:
    """A normalized, nonempty set of scalar outcomes."""

    kind: Kind
    parts: tuple

    def __post_init__(self) -> None:
        if not self.parts:
            raise EmptySpace("an outcome set must be nonempty")

    def contains(self, y: ScalarValue) -> bool:
        return contains(self, y)

    def is_finite(self) -> bool:
        if self.kind is Kind.CATEGORY:
            return True
        if self.kind is Kind.INTEGER:
            return all(lo is not None and hi is not None for lo, hi in self.parts)
        return all(lo == hi for lo, _, hi, _ in self.parts)

    def count(self) -> int | None:
        """Number of members, or None for an infinite set."""
        if not self.is_finite():
            return None
        if self.kind is Kind.CATEGORY:
            return len(self.parts)
        if self.kind is Kind.INTEGER:
            return sum(hi - lo + 1 for lo, hi in self.parts)
        return len(self.parts)

    def iter_values(self) -> Iterator[ScalarValue]:
        """Iterate members of a finite set in canonical order."""
        if not self.is_finite():
            raise KindMismatch("cannot enumerate an infinite outcome set")
        if self.kind is Kind.CATEGORY:
            yield from self.parts
        elif self.kind is Kind.INTEGER:
            for lo, hi in self.parts:
                yield from range(lo, hi + 1)
        else:
            for lo, _, _, _ in self.parts:
                yield lo

    def __str__(self) -> str:
        from .notation import format_set

        return format_set(self)


@dataclass(frozen=True)
class OutcomeSet:
    """An expected set: a nonempty strict subset of its outcome space."""

    values: OutcomeSpace
    space: OutcomeSpace

    def __post_init__(self) -> None:
        if not is_strict_subset(self.values, self.space):
            raise InvalidExpectedSet(
                f"expected set {self.values} is not a strict subset of {self.space}"
            )

    def contains(self, y: ScalarValue) -> bool:
        return contains(self.values, y)

    def complement(self) -> "OutcomeSet":
        return complement_within(self, self.space)

    def classify(self, y: ScalarValue) -> EventVerdict:
        return classify(self, self.space, y)

    def __str__(self) -> str:
        return str(self.values)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return isinstance(v, float)


def _lo_val(lo):
    return -math.inf if lo is None else lo


def _hi_val(hi):
    return math.inf if hi is None else hi


def _flatten(raw) -> Iterator:
    if isinstance(raw, UnionOf):
        for member in raw.members:
            yield from _flatten(member)
    elif isinstance(raw, (FiniteSet, IntegerRange, RealInterval)):
        yield raw
    elif isinstance(raw, OutcomeSpace):
        yield from _flatten(_as_raw(raw))
    elif isinstance(raw, OutcomeSet):
        yield from _flatten(_as_raw(raw.values))
    else:
        raise ParseError(f"not a set expression: {raw!r}")


def _as_raw(space: OutcomeSpace) -> RawSetExpression:
    if space.kind is Kind.CATEGORY:
        return FiniteSet(space.parts)
    if space.kind is Kind.INTEGER:
        return UnionOf(IntegerRange(lo, hi) for lo, hi in space.parts)
    return UnionOf(
        RealInterval(lo, hi, lc, hc) for lo, lc, hi, hc in space.parts
    )


def _check_label(label: str) -> str:
    if not _LABEL_RE.match(label) or label in _RESERVED_LABELS:
        raise ParseError(
            f"category label {label!r} is not serializable; labels must match "
            f"{_LABEL_RE.pattern} and avoid reserved words"
        )
    return label


def normalize(raw) -> OutcomeSpace:
    """Reduce any set expression to canonical form.

    Idempotent and order-independent: permutations of the same material
    normalize to identical values. Raises EmptySpace when nothing is left
    and KindMismatch when incompatible scalar kinds are combined.
    """
    if isinstance(raw, OutcomeSpace):
        return raw
    if isinstance(raw, OutcomeSet):
        return raw.values

    int_ranges: list[tuple] = []
    real_intervals: list[tuple] = []
    labels: list[str] = []
    int_literals: list[int] = []

    for leaf in _flatten(raw):
        if isinstance(leaf, IntegerRange):
            lo, hi = leaf.lo, leaf.hi
            for bound in (lo, hi):
                if bound is not None and not _is_int(bound):
                    raise ParseError(f"integer range bound must be int or None, got {bound!r}")
            if _lo_val(lo) > _hi_val(hi):
                continue
            int_ranges.append((lo, hi))
        elif isinstance(leaf, RealInterval):
            lo, hi = leaf.lo, leaf.hi
            lc, hc = bool(leaf.lo_closed), bool(leaf.hi_closed)
            if isinstance(lo, bool) or isinstance(hi, bool):
                raise ParseError("interval endpoints cannot be booleans")
            lo, hi = float(lo) + 0.0, float(hi) + 0.0
            if math.isnan(lo) or math.isnan(hi):
                raise ParseError("interval endpoints cannot be NaN")
            if lo == -math.inf:
                lc = False
            if hi == math.inf:
                hc = False
            if lo > hi or lo == math.inf or hi == -math.inf:
                continue
            if lo == hi and not (lc and hc):
                continue
            real_intervals.append((lo, lc, hi, hc))
        else:  # FiniteSet
            for v in leaf.values:
                if isinstance(v, bool):
                    raise KindMismatch("booleans are not scalar outcomes")
                if isinstance(v, int):
                    int_literals.append(v)
                elif isinstance(v, float):
                    if math.isnan(v) or math.isinf(v):
                        raise ParseError(f"{v!r} is not a valid set member")
                    v = v + 0.0
                    real_intervals.append((v, True, v, True))
                elif isinstance(v, str):
                    labels.append(_check_label(v))
                else:
                    raise KindMismatch(f"unsupported scalar value {v!r}")

    has_numeric = bool(int_ranges or real_intervals or int_literals)
    if labels and has_numeric:
        raise KindMismatch("cannot mix category labels with numeric values")
    if int_ranges and real_intervals:
        raise KindMismatch(
            "cannot mix integer ranges with real intervals; "
            "use real endpoints throughout"
        )

    if labels:
        return OutcomeSpace(Kind.CATEGORY, tuple(sorted(set(labels))))

    if real_intervals:
        real_intervals.extend((float(v), True, float(v), True) for v in int_literals)
        return OutcomeSpace(Kind.REAL, _merge_real(real_intervals))

    if int_ranges or int_literals:
        int_ranges.extend((v, v) for v in int_literals)
        return OutcomeSpace(Kind.INTEGER, _merge_integer(int_ranges))

    raise EmptySpace("set expression normalized to the empty set")


def _merge_integer(ranges: list[tuple]) -> tuple:
    ranges.sort(key=lambda r: (_lo_val(r[0]), _hi_val(r[1])))
    merged: list[tuple] = []
    for lo, hi in ranges:
        if merged:
            plo, phi = merged[-1]
            if _lo_val(lo) <= _hi_val(phi) + 1:
                if _hi_val(hi) > _hi_val(phi):
                    merged[-1] = (plo, hi)
                continue
        merged.append((lo, hi))
    return tuple(merged)


def _merge_real(intervals: list[tuple]) -> tuple:
    intervals.sort(key=lambda iv: (iv[0], not iv[1], -iv[2]))
    merged: list[tuple] = []
    for lo, lc, hi, hc in intervals:
        if merged:
            plo, plc, phi, phc = merged[-1]
            touches = lo < phi or (lo == phi and (phc or lc))
            if touches:
                if hi > phi or (hi == phi and hc and not phc):
                    merged[-1] = (plo, plc, hi, hc)
                continue
        merged.append((lo, lc, hi, hc))
    return tuple(merged)


def contains(space_or_set: OutcomeSpace | OutcomeSet, y: ScalarValue) -> bool:
    """Exact membership test; endpoint closedness is respected literally."""
    space = space_or_set.values if isinstance(space_or_set, OutcomeSet) else space_or_set
    if isinstance(y, bool):
        raise KindMismatch("booleans are not scalar outcomes")

    if space.kind is Kind.CATEGORY:
        if not isinstance(y, str):
            raise KindMismatch(f"expected a category label, got {y!r}")
        return y in space.parts

    if space.kind is Kind.INTEGER:
        if not _is_int(y):
            raise KindMismatch(f"expected an integer, got {y!r}")
        for lo, hi in space.parts:
            if y < _lo_val(lo):
                return False
            if y <= _hi_val(hi):
                return True
        return False

    if not isinstance(y, (int, float)):
        raise KindMismatch(f"expected a real number, got {y!r}")
    y = float(y)
    if math.isnan(y):
        return False
    for lo, lc, hi, hc in space.parts:
        if y < lo or (y == lo and not lc):
            return False
        if y < hi or (y == hi and hc):
            return True
    return False


def _promote_integer_to_real(space: OutcomeSpace) -> OutcomeSpace:
    """Embed a bounded integer set into the reals as isolated points."""
    total = 0
    points: list[tuple] = []
    for lo, hi in space.parts:
        if lo is None or hi is None:
            raise KindMismatch(
                "an unbounded integer set cannot be embedded in a real domain"
            )
        total += hi - lo + 1
        if total > _PROMOTE_LIMIT:
            raise KindMismatch(
                f"integer set too large to embed in a real domain (> {_PROMOTE_LIMIT})"
            )
        points.extend((float(n), True, float(n), True) for n in range(lo, hi + 1))
    return OutcomeSpace(Kind.REAL, tuple(points))


def _align_kinds(e: OutcomeSpace, space: OutcomeSpace) -> OutcomeSpace:
    """Return e adjusted so it can be compared against space's kind."""
    if e.kind is space.kind:
        return e
    if e.kind is Kind.INTEGER and space.kind is Kind.REAL:
        return _promote_integer_to_real(e)
    raise KindMismatch(
        f"cannot compare a {e.kind.value} set against a {space.kind.value} space"
    )


def _covers_integer(e_parts: tuple, s_parts: tuple) -> bool:
    si = 0
    for lo, hi in e_parts:
        while si < len(s_parts) and _hi_val(s_parts[si][1]) < _lo_val(lo):
            si += 1
        if si == len(s_parts):
            return False
        slo, shi = s_parts[si]
        if not (_lo_val(slo) <= _lo_val(lo) and _hi_val(hi) <= _hi_val(shi)):
            return False
    return True


def _covers_real(e_parts: tuple, s_parts: tuple) -> bool:
    si = 0
    for lo, lc, hi, hc in e_parts:
        # Advance past space parts that end before this e-part begins. The
        # surviving part is the only one that can cover it: normalized parts
        # are separated by genuine gaps, so spanning two parts is never a
        # subset relation.
        while si < len(s_parts):
            shi, shc = s_parts[si][2], s_parts[si][3]
            if shi < lo or (shi == lo and (not shc or not lc)):
                si += 1
            else:
                break
        if si == len(s_parts):
            return False
        slo, slc, shi, shc = s_parts[si]
        lo_ok = slo < lo or (slo == lo and (slc or not lc))
        hi_ok = hi < shi or (hi == shi and (shc or not hc))
        if not (lo_ok and hi_ok):
            return False
    return True


def is_strict_subset(e: OutcomeSpace | OutcomeSet, space: OutcomeSpace | OutcomeSet) -> bool:
    """True iff every member of e lies in space and e differs from space."""
    e_val = e.values if isinstance(e, OutcomeSet) else e
    s_val = space.values if isinstance(space, OutcomeSet) else space
    e_val = _align_kinds(e_val, s_val)
    if e_val == s_val:
        return False
    if e_val.kind is Kind.CATEGORY:
        return set(e_val.parts) <= set(s_val.parts)
    if e_val.kind is Kind.INTEGER:
        return _covers_integer(e_val.parts, s_val.parts)
    return _covers_real(e_val.parts, s_val.parts)


def expected_set(raw, space) -> OutcomeSet:
    """Build a validated expected set over a complete outcome space."""
    space_val = space if isinstance(space, OutcomeSpace) else normalize(space)
    values = normalize(raw)
    values = _align_kinds(values, space_val)
    return OutcomeSet(values, space_val)


def complement_within(e: OutcomeSet | OutcomeSpace, space: OutcomeSpace | None = None) -> OutcomeSet:
    """The anomaly set: everything in space outside e, as a validated set.

    Involutive: taking the complement twice returns the original set.
    """
    if isinstance(e, OutcomeSet):
        space = e.space if space is None else space
        e_val = e.values
    else:
        if space is None:
            raise InvalidExpectedSet("complement requires an enclosing space")
        e_val = e
    if not isinstance(space, OutcomeSpace):
        space = normalize(space)
    e_val = _align_kinds(e_val, space)
    if not is_strict_subset(e_val, space):
        raise InvalidExpectedSet(
            f"{e_val} is not a strict subset of {space}; no complement exists"
        )

    if space.kind is Kind.CATEGORY:
        removed = set(e_val.parts)
        parts = tuple(lbl for lbl in space.parts if lbl not in removed)
        return OutcomeSet(OutcomeSpace(Kind.CATEGORY, parts), space)

    if space.kind is Kind.INTEGER:
        parts = _integer_difference(space.parts, e_val.parts)
    else:
        parts = _real_difference(space.parts, e_val.parts)
    return OutcomeSet(OutcomeSpace(space.kind, parts), space)


def _integer_difference(s_parts: tuple, e_parts: tuple) -> tuple:
    result: list[tuple] = []
    for slo, shi in s_parts:
        cur = slo
        exhausted = False
        for lo, hi in e_parts:
            if _hi_val(hi) < _lo_val(cur):
                continue
            if _lo_val(lo) > _hi_val(shi):
                break
            if _lo_val(lo) > _lo_val(cur):
                result.append((cur, lo - 1))
            if hi is None:
                exhausted = True
                break
            cur = hi + 1
            if cur > _hi_val(shi):
                exhausted = True
                break
        if not exhausted and _lo_val(cur) <= _hi_val(shi):
            result.append((cur, shi))
    return _merge_integer(result)


def _real_difference(s_parts: tuple, e_parts: tuple) -> tuple:
    result: list[tuple] = []
    for slo, slc, shi, shc in s_parts:
        cur_lo, cur_lc = slo, slc
        exhausted = False
        for lo, lc, hi, hc in e_parts:
            below = hi < cur_lo or (hi == cur_lo and (not hc or not cur_lc))
            if below:
                continue
            above = lo > shi or (lo == shi and (not lc or not shc))
            if above:
                break
            starts_after = lo > cur_lo or (lo == cur_lo and cur_lc and not lc)
            if starts_after:
                result.append((cur_lo, cur_lc, lo, not lc))
            cur_lo, cur_lc = hi, not hc
            tail_nonempty = cur_lo < shi or (cur_lo == shi and cur_lc and shc)
            if not tail_nonempty:
                exhausted = True
                break
        if not exhausted:
            tail_nonempty = cur_lo < shi or (cur_lo == shi and cur_lc and shc)
            if tail_nonempty:
                result.append((cur_lo, cur_lc, shi, shc))
    return _merge_real(result)


def classify(e: OutcomeSet, space: OutcomeSpace | None, y: ScalarValue) -> EventVerdict:
    """Decide whether an observed output is as-expected or unexpected.

    An output outside the complete outcome set raises ModelViolation: the
    declared space failed to contain an outcome, which is diagnostic
    information, not an anomaly verdict.
    """
    if isinstance(e, OutcomeSet):
        space = e.space if space is None else space
        e_val = e.values
    else:
        e_val = e
    if space is None:
        raise InvalidExpectedSet("classification requires the complete outcome set")
    if not contains(space, y):
        raise ModelViolation(
            f"observed output {y!r} lies outside the complete outcome set {space}"
        )
    return EventVerdict.AS_EXPECTED if contains(e_val, y) else EventVerdict.UNEXPECTED
