import pytest

from forbidpat.rewriting import (
    TRS,
    InvalidRedex,
    Rule,
    RuleError,
    closure,
    closure_plus,
    contract,
    innermost_redexes,
    is_head_normal_bounded,
    is_redex_at,
    outermost_redexes,
    parallel_outermost_step,
    reachable,
    redexes,
    rewrite_sequence,
)
from forbidpat.syntax import parse_term
from forbidpat.terms import App, SortError, Var

from helpers import A, B, F, G, SIG

x, y = Var("x", "S"), Var("y", "S")
a, b = App(A), App(B)


def test_rule_validation():
    with pytest.raises(RuleError):
        Rule(x, a)
    with pytest.raises(RuleError):
        Rule(App(G, (x,)), y)
    with pytest.raises(SortError):
        Rule(App(G, (x,)), Var("n", "Nat"))


def test_redexes_order_and_contraction(ex):
    sys = ex("ex2nd")
    t = parse_term("2nd(cons(0, cons(s(0), inf(0))))", sys)
    rs = redexes(sys.trs, t)
    assert [(r.position, r.rule_index) for r in rs] == [((), 1), ((1, 2, 2), 0)]
    assert str(contract(sys.trs, t, (), 1)) == "s(0)"
    with pytest.raises(InvalidRedex):
        contract(sys.trs, t, (1,), 1)
    assert is_redex_at(sys.trs, t, (1, 2, 2))
    assert not is_redex_at(sys.trs, t, (1,))


def test_innermost_and_outermost(ex):
    sys = ex("ex2nd")
    t = parse_term("2nd(cons(0, cons(s(0), inf(0))))", sys)
    assert [r.position for r in innermost_redexes(sys.trs, t)] == [(1, 2, 2)]
    assert [r.position for r in outermost_redexes(sys.trs, t)] == [()]


def test_left_linearity(ex):
    assert ex("ex2nd").trs.is_left_linear()
    assert not ex("parout").trs.is_left_linear()


def test_closures():
    trs = TRS(SIG, [Rule(a, b), Rule(b, a)])
    succ = lambda t: [contract(trs, t, r.position, r.rule_index) for r in redexes(trs, t)]
    dist, trunc = closure(succ, a, 5)
    assert dist == {a: 0, b: 1} and not trunc
    plus, _ = closure_plus(succ, a, 1)
    assert set(plus) == {b}
    plus, _ = closure_plus(succ, a, 2)
    assert set(plus) == {a, b}
    assert reachable(trs, App(G, (a,)), 3)[0] == {App(G, (a,)), App(G, (b,))}


def test_closure_truncation():
    trs = TRS(SIG, [Rule(App(G, (x,)), App(G, (App(G, (x,)),)))])
    succ = lambda t: [contract(trs, t, r.position, r.rule_index) for r in redexes(trs, t)]
    _, trunc = closure(succ, App(G, (a,)), 100, max_terms=5)
    assert trunc


def test_head_normal_bounded_finds_root_step(ex):
    sys = ex("faa")
    t = parse_term("f(a, a)", sys)
    v = is_head_normal_bounded(sys.trs, t, 5)
    assert v.root_step_found
    assert v.trace[-1][1] == ()
    assert str(v.trace[-1][0]) == "f(b, b)"
    assert not is_head_normal_bounded(sys.trs, parse_term("g(a)", sys), 5)


def test_parallel_outermost_misses_normal_form(ex):
    sys = ex("parout")
    seq = rewrite_sequence(lambda t: parallel_outermost_step(sys.trs, t), parse_term("g(a, b)", sys), 100)
    assert len(seq) == 101
    assert all(str(t) != "d" for t in seq)
    assert str(seq[1]) == "g(b, a)"
    assert parallel_outermost_step(sys.trs, parse_term("d", sys)) is None


def test_two_step_rule_application():
    trs = TRS(SIG, [Rule(App(F, (x, x)), x)])
    t = App(F, (App(F, (a, a)), a))
    assert [r.position for r in redexes(trs, t)] == [(1,)]
