import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igl.errors import MalformedTraceError, SchemaError
from igl.scattered import (Ordinal, ScatteredSpace, cb_derivative, cb_rank,
                           escape_index, parse_ordinal, decide_scattered,
                           stratum_multiplicity)
from igl.valgroup import ValueTower, Verdict, inv_of_valuation, render_expr
from oracles import derived_bound_oracle, ordinal_grid


def w(e=1, c=1):
    return Ordinal.omega_power(e, c)


def fin(n):
    return Ordinal.from_int(n)


def zt(*names):
    return ValueTower.from_names(list(names))


def space(bound, labels):
    return ScatteredSpace.interval(bound, labels)


# ---------------------------------------------------------------------------
# ordinals
# ---------------------------------------------------------------------------

def test_ordinal_parse_render_examples():
    for text in ("0", "1", "w", "w+1", "w*3", "w^2+w*3+1", "w^5"):
        assert parse_ordinal(text).render() == text
    with pytest.raises(SchemaError):
        parse_ordinal("1+w")  # exponents must decrease
    with pytest.raises(SchemaError):
        parse_ordinal("spam")


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(1, 5)), max_size=3))
def test_ordinal_roundtrip(pairs):
    seen = set()
    terms = []
    for e, c in sorted(pairs, reverse=True):
        if e not in seen:
            seen.add(e)
            terms.append((e, c))
    o = Ordinal(tuple(terms))
    assert parse_ordinal(o.render()) == o


def test_ordinal_order():
    assert fin(3) < w()
    assert w() < w().successor()
    assert w().successor() < w(1, 2)
    assert w(1, 2) < w(2)
    assert not (w() < w())


def test_successor_predecessor():
    assert fin(0).successor() == fin(1)
    assert w().successor().predecessor() == w()
    assert w().is_limit() and not w().is_successor()
    assert fin(5).is_successor()
    with pytest.raises(ValueError):
        w().predecessor()


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def test_derivative_examples():
    # finite intervals are discrete
    s = space(fin(5), {0: zt("Z")})
    assert cb_derivative(s).is_empty()
    # [0, w] leaves the single point w
    s = space(w(), {0: zt("Z"), 1: zt("Z")})
    d = cb_derivative(s)
    assert d.bound == fin(0)
    assert d.label_map()[0].slot_names() == ["Z"]
    # [0, w^2] leaves the multiples of w
    s = space(w(2), {0: zt("Z"), 1: zt("Z"), 2: zt("Z")})
    d = cb_derivative(s)
    assert d.bound == w()


def test_rank_examples():
    assert cb_rank(space(fin(7), {0: zt("Z")})) == fin(1)
    assert cb_rank(space(w(), {0: zt("Z"), 1: zt("Z")})) == fin(2)
    assert cb_rank(space(w(2), {0: zt("Z"), 1: zt("Z"), 2: zt("Z")})) == fin(3)
    assert cb_rank(ScatteredSpace.empty()) == fin(0)


def test_rank_of_omega_powers():
    for k in range(1, 6):
        for m in (1, 2, 3):
            labels = {i: zt("Z") for i in range(k + 1)}
            s = space(Ordinal.omega_power(k, m), labels)
            assert cb_rank(s) == fin(k + 1)


def test_derivative_matches_oracle_below_w3():
    for bound in ordinal_grid(2, 3):
        labels = {i: zt("Z") for i in range(bound.leading_exponent() + 1)}
        s = space(bound, labels)
        d = cb_derivative(s)
        expected = derived_bound_oracle(bound)
        if expected is None:
            assert d.is_empty()
        else:
            assert d.bound == expected


def test_strata_monotone_along_derivatives():
    s = space(parse_ordinal("w^2+w*3+1"),
              {0: zt("Z"), 1: zt("Z"), 2: zt("Q")})
    prev = set(s.occupied_strata())
    cur = s
    while not cur.is_empty():
        cur = cb_derivative(cur)
        shifted = {k + 1 for k in cur.occupied_strata()}
        assert shifted <= prev
        prev = set(cur.occupied_strata())


def test_point_rank_and_multiplicity():
    s = space(w(2), {0: zt("Z"), 1: zt("Z"), 2: zt("Z")})
    assert s.point_rank(fin(0)) == 0
    assert s.point_rank(fin(17)) == 0
    assert s.point_rank(w()) == 1
    assert s.point_rank(w(1, 3)) == 1
    assert s.point_rank(w(2)) == 2
    assert stratum_multiplicity(s, 0) == "w^2"
    assert stratum_multiplicity(s, 1) == "w"
    assert stratum_multiplicity(s, 2) == 1


def test_missing_label_rejected():
    with pytest.raises(SchemaError):
        space(w(), {0: zt("Z")})


# ---------------------------------------------------------------------------
# the derived-sequence decision
# ---------------------------------------------------------------------------

def test_scattered_decision_all_free():
    s = space(w(), {0: zt("Z"), 1: zt("Z")})
    res = decide_scattered(s)
    assert res.verdict is Verdict.DIRECT_SUM_FREE
    assert render_expr(res.expr) == "Z^(w) ⊕ Z"


def test_scattered_decision_obstruction():
    s = space(w(), {0: zt("Z"), 1: zt("Q")})
    res = decide_scattered(s)
    assert res.verdict is Verdict.OBSTRUCTED
    assert any(s.rule == "divisible-quotient-obstruction" for s in res.certificate)


def test_scattered_decision_empty_and_finite():
    assert decide_scattered(ScatteredSpace.empty()).verdict is Verdict.DIRECT_SUM_FREE
    res = decide_scattered(space(fin(2), {0: zt("Q")}))
    assert res.verdict is Verdict.DIRECT_SUM
    res = decide_scattered(space(fin(2), {0: zt("Z")}))
    assert res.verdict is Verdict.DIRECT_SUM_FREE


def test_scattered_decision_unknown_cases():
    # rational isolated points next to a rational limit: not the obstruction
    s = space(w(), {0: zt("Q"), 1: zt("Q")})
    assert decide_scattered(s).verdict is Verdict.UNKNOWN
    # a real label on the limit stratum is not covered by the rational rule
    s = space(w(), {0: zt("Z"), 1: zt("R")})
    assert decide_scattered(s).verdict is Verdict.UNKNOWN


def test_scattered_decision_one_point_matches_valuation():
    for names in (["Z"], ["Q"], ["R"]):
        s = space(fin(0), {0: zt(*names)})
        res = decide_scattered(s)
        assert render_expr(res.expr) == render_expr(inv_of_valuation(zt(*names)))


# ---------------------------------------------------------------------------
# escape stages
# ---------------------------------------------------------------------------

def test_escape_examples():
    assert escape_index([(fin(0), True), (fin(1), False)]) == fin(1)
    t = [(fin(0), True), (w(), True), (w().successor(), False)]
    assert escape_index(t) == w().successor()
    with pytest.raises(MalformedTraceError):
        escape_index([(fin(0), True), (w(), False)])


def test_escape_rejects_malformed():
    with pytest.raises(MalformedTraceError):
        escape_index([])
    with pytest.raises(MalformedTraceError):
        escape_index([(fin(0), True), (fin(3), True)])  # never fails
    with pytest.raises(MalformedTraceError):
        escape_index([(fin(0), False)])  # proper ideal survives at stage zero
    with pytest.raises(MalformedTraceError):
        escape_index([(fin(0), True), (fin(2), False), (fin(3), True)])
    with pytest.raises(MalformedTraceError):
        escape_index([(fin(0), True), (fin(0), False)])  # stages must increase


@settings(max_examples=120, deadline=None)
@given(st.sampled_from(ordinal_grid(2, 3)), st.booleans())
def test_escape_accepts_exactly_successors(gamma, pad):
    if gamma.is_zero():
        return
    trace = [(Ordinal.zero(), True)]
    if pad and Ordinal.from_int(1) < gamma:
        trace.append((Ordinal.from_int(1), True))
    trace.append((gamma, False))
    if gamma.is_successor():
        assert escape_index(trace) == gamma
    else:
        with pytest.raises(MalformedTraceError):
            escape_index(trace)
