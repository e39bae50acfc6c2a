import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igl.errors import PreconditionError, SchemaError
from igl.valgroup import (Cyclic, DirectSum, FgAtom, LexTower, Opaque, Q, R,
                          Repeated, TRIVIAL, UNKNOWN, ValueTower, Verdict, Z,
                          ZPROD, convex_subgroup, div_of_valuation,
                          direct_sum, expr_invariant_factors, expr_rank,
                          freeness_verdict, has_divisible, has_torsion,
                          inv_of_valuation, normalize, parse_expr,
                          quotient_by_convex, render_expr,
                          unbranched_valuation_verdict)


def verdict(e):
    return freeness_verdict(e).verdict


# ---------------------------------------------------------------------------
# verdict rules
# ---------------------------------------------------------------------------

def test_basic_verdicts():
    assert verdict(direct_sum(Z, Z, Z)) is Verdict.FREE
    assert verdict(Q) is Verdict.NOT_FREE
    assert verdict(R) is Verdict.NOT_FREE
    assert verdict(ZPROD) is Verdict.NOT_FREE
    assert verdict(Cyclic(5)) is Verdict.NOT_FREE
    assert verdict(TRIVIAL) is Verdict.FREE
    assert verdict(UNKNOWN) is Verdict.UNKNOWN
    assert verdict(FgAtom((2, 0))) is Verdict.NOT_FREE
    assert verdict(FgAtom((0, 0))) is Verdict.FREE


def test_opaque_verdicts():
    assert verdict(Opaque("u", is_free=True)) is Verdict.FREE
    assert verdict(Opaque("u", is_free=False)) is Verdict.NOT_FREE
    assert verdict(Opaque("u", is_torsionfree=False)) is Verdict.NOT_FREE
    assert verdict(Opaque("u", has_divisible=True)) is Verdict.NOT_FREE
    assert verdict(Opaque("u")) is Verdict.UNKNOWN


def test_sum_propagation_rules():
    # free + free stays free, including infinite multiplicities
    assert verdict(Repeated(Z, "w^2")) is Verdict.FREE
    assert verdict(direct_sum(Repeated(Z, "w"), Z)) is Verdict.FREE
    # torsion and divisible witnesses survive in summands
    assert verdict(direct_sum(Z, Cyclic(4))) is Verdict.NOT_FREE
    assert verdict(direct_sum(Z, Q)) is Verdict.NOT_FREE
    assert verdict(direct_sum(Repeated(Cyclic(2), "w"), Z)) is Verdict.NOT_FREE
    # these are the only two summand propagation rules: an unfree summand
    # without such a witness leaves the sum undecided
    assert verdict(direct_sum(ZPROD, Z)) is Verdict.UNKNOWN
    assert verdict(direct_sum(Opaque("u", is_free=False), Z)) is Verdict.UNKNOWN


def test_lex_freeness_via_underlying_sum():
    assert verdict(LexTower((Z, Z))) is Verdict.FREE
    assert verdict(LexTower((Z, Q))) is Verdict.NOT_FREE
    assert verdict(LexTower((Z, UNKNOWN))) is Verdict.UNKNOWN


def test_witness_predicates():
    assert has_torsion(direct_sum(Z, Cyclic(3))) is True
    assert has_torsion(Z) is False
    assert has_torsion(Opaque("u")) is None
    assert has_divisible(LexTower((Z, R))) is True
    assert has_divisible(ZPROD) is False


def test_every_definite_verdict_has_certificate():
    for e in (Z, Q, R, ZPROD, Cyclic(4), Opaque("u", is_free=False),
              direct_sum(Z, Cyclic(2)), Repeated(Z, 3)):
        res = freeness_verdict(e)
        if res.verdict is not Verdict.UNKNOWN:
            assert len(res.trace) >= 1
            assert all(s.rule for s in res.trace)


# ---------------------------------------------------------------------------
# invariant factors of finitely generated expressions
# ---------------------------------------------------------------------------

def test_expr_invariants():
    assert expr_invariant_factors(direct_sum(Z, Cyclic(2), Cyclic(3))) == (6, 0)
    assert expr_invariant_factors(Repeated(Z, 3)) == (0, 0, 0)
    assert expr_invariant_factors(direct_sum(Cyclic(2), Cyclic(2))) == (2, 2)
    assert expr_invariant_factors(Q) is None
    assert expr_invariant_factors(Repeated(Z, "w")) is None
    assert expr_rank(LexTower((Z, Z))) == 2


# ---------------------------------------------------------------------------
# rendering round-trip
# ---------------------------------------------------------------------------

atoms = st.sampled_from([Z, Q, R, ZPROD, UNKNOWN, TRIVIAL,
                         Cyclic(2), Cyclic(9), Opaque("U(k)", is_free=True),
                         Opaque("L*/K*"), Opaque("t", is_torsionfree=False)])


def exprs(depth=2):
    if depth == 0:
        return atoms
    sub = exprs(depth - 1)
    return st.one_of(
        atoms,
        st.lists(sub, min_size=1, max_size=3).map(lambda xs: DirectSum(tuple(xs))),
        st.lists(sub, min_size=1, max_size=3).map(lambda xs: LexTower(tuple(xs))),
        st.tuples(sub, st.one_of(st.integers(2, 4), st.sampled_from(["w", "w^2"])))
          .map(lambda t: Repeated(*t)),
    )


@given(exprs())
@settings(max_examples=200, deadline=None)
def test_render_parse_roundtrip(e):
    text = render_expr(e)
    again = parse_expr(text)
    assert render_expr(again) == text


def test_canonical_rendering_examples():
    assert render_expr(direct_sum(Z, LexTower((Z, Q)), R)) == "Z ⊕ lex(Z;Q) ⊕ R"
    assert render_expr(direct_sum(Z, Z, Z)) == "Z^3"
    assert render_expr(TRIVIAL) == "0"
    assert render_expr(normalize(FgAtom((2, 6, 0)))) == "Z/2 ⊕ Z/6 ⊕ Z"
    assert render_expr(Repeated(Z, "w")) == "Z^(w)"


def test_parse_rejects_junk():
    with pytest.raises(SchemaError):
        parse_expr("Z ⊕")
    with pytest.raises(SchemaError):
        parse_expr("lex()")
    with pytest.raises(SchemaError):
        parse_expr("opaque(nolabel)")


# ---------------------------------------------------------------------------
# value towers
# ---------------------------------------------------------------------------

slot_lists = st.lists(st.sampled_from(["Z", "Q", "R"]), max_size=5)


@given(slot_lists, st.integers(0, 5))
@settings(max_examples=300, deadline=None)
def test_tower_concat_invariant(names, depth):
    t = ValueTower.from_names(names)
    if depth > len(t):
        with pytest.raises(PreconditionError):
            quotient_by_convex(t, depth)
        return
    q = quotient_by_convex(t, depth)
    s = convex_subgroup(t, depth)
    assert q.slots + s.slots == t.slots
    assert q.concat(s).slots == t.slots


def test_tower_quotient_examples():
    t = ValueTower.from_names(["Z", "Z", "Z"])
    assert quotient_by_convex(t, 1).slot_names() == ["Z"]
    assert convex_subgroup(t, 1).slot_names() == ["Z", "Z"]
    t2 = ValueTower.from_names(["Q", "Z"])
    assert quotient_by_convex(t2, 2).slot_names() == ["Q", "Z"]
    assert convex_subgroup(t2, 2).slot_names() == []
    t3 = ValueTower.from_names(["Z", "Q", "Z"])
    assert quotient_by_convex(t3, 2).slot_names() == ["Z", "Q"]
    assert convex_subgroup(t3, 2).slot_names() == ["Z"]


def test_inv_of_valuation():
    assert render_expr(inv_of_valuation(ValueTower.from_names(["Z"]))) == "Z"
    q = inv_of_valuation(ValueTower.from_names(["Q"]))
    assert verdict(q) is Verdict.NOT_FREE
    assert render_expr(inv_of_valuation(ValueTower.from_names([]))) == "0"


@given(st.integers(1, 5))
def test_inv_of_discrete_tower_free_with_rank(n):
    t = ValueTower.from_names(["Z"] * n)
    e = inv_of_valuation(t)
    assert verdict(e) is Verdict.FREE
    assert expr_rank(e) == n
    # cross-check through the exact engine on Z^n
    from igl.abelian import FgGroup, is_free
    g = FgGroup.free(n)
    assert is_free(g) and g.rank == expr_rank(e)
    assert g.invariant_factors == expr_invariant_factors(e)


def test_div_of_valuation_cases():
    res = div_of_valuation(ValueTower.from_names(["Z"]), maximal_principal=True)
    assert res.verdict is Verdict.FREE and render_expr(res.expr) == "Z"
    res = div_of_valuation(ValueTower.from_names(["Q", "Z"]), maximal_principal=False)
    assert res.verdict is Verdict.NOT_FREE
    assert render_expr(res.expr) == "R ⊕ Z"
    res = div_of_valuation(ValueTower.from_names([]), maximal_principal=False)
    assert res.verdict is Verdict.FREE and render_expr(res.expr) == "0"
    res = div_of_valuation(ValueTower.from_names(["Z"]), maximal_principal=True,
                           maximal_branched=False)
    assert res.verdict is Verdict.UNKNOWN and res.expr is None


def test_unbranched_valuation_rule():
    assert unbranched_valuation_verdict([Z, Z], True).verdict is Verdict.FREE
    assert unbranched_valuation_verdict([Z, Q], True).verdict is Verdict.UNKNOWN
    assert unbranched_valuation_verdict([], True).verdict is Verdict.FREE
    assert unbranched_valuation_verdict([Z], False).verdict is Verdict.UNKNOWN


def test_tower_slot_validation():
    with pytest.raises(SchemaError):
        ValueTower.from_names(["X"])
    with pytest.raises(SchemaError):
        ValueTower((Cyclic(2),))  # torsion slots are not value groups
