import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forbidpat.terms import (
    App,
    FunSym,
    PosRelation,
    PositionError,
    Signature,
    SortError,
    Var,
    apply,
    canonical_vars,
    compare,
    depth,
    format_pos,
    is_ground,
    is_linear,
    iter_positions,
    match,
    parse_pos,
    positions,
    rename_apart,
    replace_at,
    size,
    subterm_at,
    unify,
    variables,
)

from helpers import A, B, F, G, SIG, VARS, ground_terms, substitutions, terms

x, y, z = VARS
a, b = App(A), App(B)


def f(s, t):
    return App(F, (s, t))


def g(t):
    return App(G, (t,))


def test_sort_checked_construction():
    nat = FunSym("s", ("Nat",), "Nat")
    with pytest.raises(SortError):
        App(nat, (a,))
    with pytest.raises(SortError):
        App(F, (a,))


def test_positions_and_subterms():
    t = f(g(x), a)
    assert positions(t) == [(), (1,), (1, 1), (2,)]
    assert positions(t, nonvar_only=True) == [(), (1,), (2,)]
    assert subterm_at(t, (1, 1)) == x
    with pytest.raises(PositionError):
        subterm_at(t, (3,))
    assert replace_at(t, (2,), b) == f(g(x), b)


def test_position_text():
    assert format_pos(()) == "e"
    assert format_pos((2, 1)) == "2.1"
    assert parse_pos("e") == ()
    assert parse_pos("1.2") == (1, 2)
    with pytest.raises(PositionError):
        parse_pos("0")


def test_position_relations():
    assert compare((1,), (1,)) is PosRelation.EQUAL
    assert compare((1,), (1, 2)) is PosRelation.ABOVE
    assert compare((1, 2), (1,)) is PosRelation.BELOW
    assert compare((1,), (2, 1)) is PosRelation.PARALLEL


def test_measures():
    t = f(g(a), x)
    assert depth(a) == 1 and depth(t) == 3
    assert size(t) == 4
    assert variables(f(y, f(x, y))) == [y, x]
    assert not is_ground(t) and is_ground(g(a))
    assert is_linear(f(x, y)) and not is_linear(f(x, x))


def test_match_is_one_sided():
    assert match(f(x, x), f(a, a)) == {x: a}
    assert match(f(x, x), f(a, b)) is None
    assert match(f(a, y), f(x, b)) is None


def test_unify_occurs_check():
    assert unify(x, g(x)) is None
    assert unify(f(x, x), f(y, g(y))) is None
    theta = unify(f(x, g(y)), f(g(z), x))
    assert apply(theta, f(x, g(y))) == apply(theta, f(g(z), x))


def test_unify_rejects_sort_clash():
    n = Var("n", "Nat")
    assert unify(n, a) is None


def test_rename_apart_and_canonical():
    t = f(x, y)
    u = rename_apart(t, [x, y])
    assert set(variables(u)).isdisjoint({x, y})
    assert canonical_vars((u,)) == canonical_vars((t,))


def test_signature_rejects_conflicts():
    sig = Signature(["S"], [A])
    with pytest.raises(SortError):
        sig.add(FunSym("a", ("S",), "S"))
    with pytest.raises(SortError):
        sig.add(FunSym("k", ("T",), "S"))


# properties


@given(terms(), st.data())
def test_replace_subterm_roundtrip(t, data):
    p, s = data.draw(st.sampled_from(list(iter_positions(t))))
    assert replace_at(t, p, s) == t
    r = data.draw(terms(4))
    assert subterm_at(replace_at(t, p, r), p) == r


@given(terms(), substitutions())
def test_match_recovers_instances(t, sigma):
    inst = apply(sigma, t)
    tau = match(t, inst)
    assert tau is not None
    assert apply(tau, t) == inst


@given(terms(6), terms(6))
def test_unifier_is_idempotent_solution(s, t):
    theta = unify(s, t)
    if theta is not None:
        assert apply(theta, s) == apply(theta, t)
        assert all(apply(theta, v) == v for v in theta.values())


def _small_ground():
    out = [a, b]
    out += [g(u) for u in out]
    return out


def _tuple(ts):
    sym = FunSym("tup", ("S",) * len(ts), "S")
    return App(sym, ts)


@settings(max_examples=60, deadline=None)
@given(terms(4), terms(4))
def test_unify_agrees_with_brute_force(s, t):
    # ground unifiers over a finite carrier must exist iff an mgu does, and
    # each of them must be an instance of the mgu
    vs = sorted(set(variables(s)) | set(variables(t)), key=lambda v: v.name)
    carrier = _small_ground()
    ground_unifiers = []
    for vals in itertools.product(carrier, repeat=len(vs)):
        tau = dict(zip(vs, vals))
        if apply(tau, s) == apply(tau, t):
            ground_unifiers.append(tau)
    theta = unify(s, t)
    if ground_unifiers:
        assert theta is not None
    if theta is None:
        assert not ground_unifiers
        return
    general = _tuple(tuple(apply(theta, v) for v in vs))
    for tau in ground_unifiers:
        assert match(general, _tuple(tuple(tau[v] for v in vs))) is not None


@given(ground_terms())
def test_ground_terms_have_no_variables(t):
    assert is_ground(t) and variables(t) == []
    assert SIG.check_term(t) is None
