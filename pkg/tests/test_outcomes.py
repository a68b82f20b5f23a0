"""Outcome-set algebra: normalization, membership, subsets, complements."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from itergain.errors import (
    EmptySpace,
    InvalidExpectedSet,
    KindMismatch,
    ModelViolation,
    ParseError,
)
from itergain.outcomes import (
    EventVerdict,
    FiniteSet,
    IntegerRange,
    Kind,
    OutcomeSet,
    RealInterval,
    UnionOf,
    classify,
    complement_within,
    contains,
    expected_set,
    is_strict_subset,
    normalize,
)


def test_normalize_merges_overlapping_integer_ranges():
    v = normalize(UnionOf([IntegerRange(0, 5), IntegerRange(3, 9)]))
    assert v == normalize(IntegerRange(0, 9))


def test_normalize_merges_adjacent_real_intervals():
    v = normalize(
        UnionOf([RealInterval(0, 1, True, False), RealInterval(1, 2, True, True)])
    )
    assert v == normalize(RealInterval(0, 2))


def test_normalize_dedups_and_sorts_finite_sets():
    v = normalize(FiniteSet([1, 0, -1, 1]))
    assert v == normalize(FiniteSet([-1, 0, 1]))
    assert list(v.iter_values()) == [-1, 0, 1]


def test_normalize_is_idempotent():
    v = normalize(UnionOf([IntegerRange(0, 5), FiniteSet([7, 9]), IntegerRange(8, 12)]))
    assert normalize(v) == v


def test_normalize_rejects_empty():
    with pytest.raises(EmptySpace):
        normalize(IntegerRange(5, 3))
    with pytest.raises(EmptySpace):
        normalize(FiniteSet([]))
    with pytest.raises(EmptySpace):
        normalize(RealInterval(1.0, 1.0, True, False))


def test_normalize_rejects_mixed_kinds():
    with pytest.raises(KindMismatch):
        normalize(FiniteSet(["a", 1]))
    with pytest.raises(KindMismatch):
        normalize(UnionOf([IntegerRange(0, 5), RealInterval(0, 1)]))
    with pytest.raises(KindMismatch):
        normalize(FiniteSet([True]))


def test_normalize_promotes_int_literals_among_reals():
    v = normalize(FiniteSet([1, 2.5]))
    assert v.kind is Kind.REAL
    assert contains(v, 1.0) and contains(v, 2.5)


def test_normalize_rejects_nan_and_inf_members():
    with pytest.raises(ParseError):
        normalize(FiniteSet([math.nan]))
    with pytest.raises(ParseError):
        normalize(FiniteSet([math.inf]))
    with pytest.raises(ParseError):
        normalize(RealInterval(math.nan, 1.0))


def test_contains_integer_range():
    space = normalize(IntegerRange(0, None))
    assert contains(space, 1000)
    assert not contains(space, -1)
    with pytest.raises(KindMismatch):
        contains(space, 3.5)


def test_contains_singleton_and_interval():
    assert not contains(normalize(FiniteSet([1000])), 998)
    space = normalize(RealInterval(0, math.inf))
    assert not contains(space, -4.0)
    assert contains(space, 0.0)
    assert contains(space, 4.25)


def test_contains_respects_open_endpoints_exactly():
    space = normalize(RealInterval(0, 1, lo_closed=False, hi_closed=True))
    assert not contains(space, 0.0)
    assert contains(space, 1.0)
    assert contains(space, 1e-300)


def test_contains_nan_is_never_a_member():
    assert not contains(normalize(RealInterval(-math.inf, math.inf)), math.nan)


def test_strict_subset_examples():
    space = normalize(IntegerRange(0, None))
    assert is_strict_subset(normalize(FiniteSet([1000])), space)
    assert not is_strict_subset(space, space)
    assert is_strict_subset(normalize(FiniteSet([1])), normalize(FiniteSet([-1, 0, 1])))


def test_strict_subset_structural_equality_across_forms():
    # {0,1,2} written as a finite set equals the range written as a range.
    assert not is_strict_subset(
        normalize(FiniteSet([0, 1, 2])), normalize(IntegerRange(0, 2))
    )


def test_complement_examples():
    signs = normalize(FiniteSet([-1, 0, 1]))
    e = expected_set(FiniteSet([1]), signs)
    assert complement_within(e).values == normalize(FiniteSet([-1, 0]))

    counts = normalize(IntegerRange(0, None))
    e2 = expected_set(FiniteSet([1000]), counts)
    assert complement_within(e2).values == normalize(
        UnionOf([IntegerRange(0, 999), IntegerRange(1001, None)])
    )

    seg = normalize(RealInterval(0, 2, lo_closed=False, hi_closed=True))
    e3 = expected_set(RealInterval(0, 1, lo_closed=False, hi_closed=True), seg)
    assert complement_within(e3).values == normalize(
        RealInterval(1, 2, lo_closed=False, hi_closed=True)
    )


def test_complement_requires_strict_subset():
    space = normalize(FiniteSet([-1, 0, 1]))
    with pytest.raises(InvalidExpectedSet):
        complement_within(normalize(FiniteSet([-1, 0, 1])), space)


def test_classify_examples():
    counts = normalize(IntegerRange(0, None))
    e = expected_set(FiniteSet([1000]), counts)
    assert classify(e, counts, 1000) is EventVerdict.AS_EXPECTED

    signs = normalize(FiniteSet([-1, 0, 1]))
    e2 = expected_set(FiniteSet([1]), signs)
    assert classify(e2, signs, -1) is EventVerdict.UNEXPECTED

    with pytest.raises(ModelViolation):
        classify(e, counts, -3)


def test_expected_set_rejects_full_space():
    signs = normalize(FiniteSet([-1, 0, 1]))
    with pytest.raises(InvalidExpectedSet):
        expected_set(FiniteSet([-1, 0, 1]), signs)


def test_expected_set_rejects_non_subset():
    signs = normalize(FiniteSet([-1, 0, 1]))
    with pytest.raises(InvalidExpectedSet):
        expected_set(FiniteSet([2]), signs)


def test_int_set_promotes_into_real_space():
    space = normalize(RealInterval(0, math.inf))
    e = expected_set(FiniteSet([2]), space)
    assert e.values.kind is Kind.REAL
    comp = complement_within(e)
    assert contains(comp, 1.9999) and contains(comp, 2.0001)
    assert not contains(comp, 2.0)
    assert complement_within(comp).values == e.values


def test_unbounded_int_set_cannot_promote():
    space = normalize(RealInterval(-math.inf, math.inf))
    with pytest.raises(KindMismatch):
        expected_set(IntegerRange(0, None), space)


def test_category_sets():
    space = normalize(FiniteSet(["yes", "no", "maybe"]))
    e = expected_set(FiniteSet(["yes"]), space)
    assert classify(e, space, "yes") is EventVerdict.AS_EXPECTED
    assert classify(e, space, "no") is EventVerdict.UNEXPECTED
    assert complement_within(e).values == normalize(FiniteSet(["maybe", "no"]))
    with pytest.raises(ModelViolation):
        classify(e, space, "dunno")
    with pytest.raises(KindMismatch):
        contains(space, 3)


def test_category_labels_must_be_serializable():
    with pytest.raises(ParseError):
        normalize(FiniteSet(["has space"]))
    with pytest.raises(ParseError):
        normalize(FiniteSet(["union"]))


# ---------------------------------------------------------------------------
# Property tests over randomly generated spaces
# ---------------------------------------------------------------------------

int_piece = st.one_of(
    st.tuples(st.integers(-50, 50), st.integers(0, 20)).map(
        lambda t: IntegerRange(t[0], t[0] + t[1])
    ),
    st.lists(st.integers(-50, 50), min_size=1, max_size=6).map(FiniteSet),
)

real_piece = st.one_of(
    st.tuples(
        st.floats(-50, 50, allow_nan=False),
        st.floats(0.125, 20, allow_nan=False),
        st.booleans(),
        st.booleans(),
    ).map(lambda t: RealInterval(t[0], t[0] + t[1], t[2], t[3])),
    st.lists(
        st.floats(-50, 50, allow_nan=False).map(lambda x: round(x, 3)),
        min_size=1,
        max_size=4,
    ).map(FiniteSet),
)

int_expr = st.lists(int_piece, min_size=1, max_size=4).map(UnionOf)
real_expr = st.lists(real_piece, min_size=1, max_size=4).map(UnionOf)
any_expr = st.one_of(int_expr, real_expr)
paired_exprs = st.one_of(
    st.tuples(int_expr, int_expr),
    st.tuples(real_expr, real_expr),
)


@given(any_expr, st.randoms())
def test_normalize_order_independent(expr, rnd):
    members = list(expr.members)
    rnd.shuffle(members)
    assert normalize(expr) == normalize(UnionOf(members))


@given(int_expr, st.integers(-80, 80))
def test_integer_membership_matches_brute_force(expr, y):
    members = set()
    for piece in expr.members:
        if isinstance(piece, IntegerRange):
            members.update(range(piece.lo, piece.hi + 1))
        else:
            members.update(piece.values)
    assert contains(normalize(expr), y) == (y in members)


@given(int_expr, int_expr)
def test_integer_subset_matches_brute_force(a, b):
    def enumerate_members(expr):
        out = set()
        for piece in expr.members:
            if isinstance(piece, IntegerRange):
                out.update(range(piece.lo, piece.hi + 1))
            else:
                out.update(piece.values)
        return out

    ma, mb = enumerate_members(a), enumerate_members(b)
    expected = ma <= mb and ma != mb
    assert is_strict_subset(normalize(a), normalize(b)) == expected


@settings(max_examples=200)
@given(paired_exprs, st.data())
def test_partition_property(exprs, data):
    space_expr, e_expr = exprs
    space = normalize(UnionOf([space_expr, e_expr]))
    e = normalize(e_expr)
    if not is_strict_subset(e, space):
        return
    e_set = OutcomeSet(e, space)
    comp = complement_within(e_set)

    if space.kind is Kind.INTEGER:
        y = data.draw(st.integers(-80, 80))
    else:
        y = data.draw(
            st.one_of(
                st.floats(-80, 80, allow_nan=False),
                st.sampled_from([p[0] for p in space.parts]),
            )
        )
    if not contains(space, y):
        with pytest.raises(ModelViolation):
            classify(e_set, space, y)
        return
    in_e = contains(e_set, y)
    in_comp = contains(comp, y)
    assert in_e != in_comp
    verdict = classify(e_set, space, y)
    assert (verdict is EventVerdict.AS_EXPECTED) == in_e


@settings(max_examples=200)
@given(paired_exprs)
def test_complement_involution(exprs):
    space_expr, e_expr = exprs
    space = normalize(UnionOf([space_expr, e_expr]))
    e = normalize(e_expr)
    if not is_strict_subset(e, space):
        return
    e_set = OutcomeSet(e, space)
    comp = complement_within(e_set)
    assert complement_within(comp).values == e_set.values
