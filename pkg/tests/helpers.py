"""Shared helpers for the test suite."""

from hypothesis import strategies as st

from forbidpat.syntax import parse_term
from forbidpat.terms import App, FunSym, Signature, Var, canonical_vars


def rule_key(lhs, rhs):
    """String form of a rule modulo variable renaming and sorts."""
    lhs, rhs = canonical_vars((lhs, rhs))
    return f"{lhs} -> {rhs}"


def rule_keys(rules):
    return {rule_key(r.lhs, r.rhs) for r in rules}


def erased(signature, rename=None):
    """Single-sorted copy of ``signature``, optionally renaming symbols."""
    rename = rename or {}
    sig = Signature(["S"])
    for f in signature:
        sig.add(FunSym(rename.get(f.name, f.name), ("S",) * f.arity, "S"))
    return sig


def read_rules(texts, signature, var_names):
    """Parse ``"lhs -> rhs"`` strings into rule keys over ``signature``."""
    sort = next(iter(signature.sorts))
    vs = {n: Var(n, sort) for n in var_names}
    out = set()
    for text in texts:
        l, r = text.split("->")
        out.add(rule_key(parse_term(l, signature, vs), parse_term(r, signature, vs)))
    return out


# reference rule table for the take/app system, kept verbatim with
# abbreviations expanded; two of its entries are ill-sorted
TAKEAPP_TABLE = [
    "top(inf(x)) -> top(cons(x, inf(s(x))))",
    "take(y, inf(x)) -> take(y, cons(x, inf(s(x))))",
    "app(y, inf(x)) -> app(y, cons(x, inf(s(x))))",
    "top(app(inf(x), y)) -> top(app(cons(x, inf(s(x))), y))",
    "take(app(inf(x), y), z) -> take(app(cons(x, inf(s(x))), y), z)",
    "take(z, app(inf(x), y)) -> take(z, app(cons(x, inf(s(x))), y))",
    "app(app(inf(x), y), z) -> app(app(cons(x, inf(s(x))), y), z)",
    "app(z, app(inf(x), y)) -> app(z, app(cons(x, inf(s(x))), y))",
    "top(app(cons(x, xs), ys)) -> top(cons(x, app(xs, ys)))",
    "take(z, app(cons(x, xs), ys)) -> take(z, cons(x, app(xs, ys)))",
    "app(app(cons(x, xs), ys), z) -> app(cons(x, app(xs, ys)), z)",
    "app(z, app(cons(x, xs), ys)) -> app(z, cons(x, app(xs, ys)))",
    "app(cons(x, inf(zs)), ys) -> cons(x, app(inf(zs), ys))",
    "app(cons(x, s(zs)), ys) -> cons(x, app(s(zs), ys))",
    "app(cons(x, cons(y, zs)), ys) -> cons(x, app(cons(y, zs), ys))",
    "app(nil, x) -> x",
    "take(s(x), cons(y, ys)) -> take(x, ys)",
    "take(0, cons(y, ys)) -> y",
    "take(x, nil) -> 0",
]


# hypothesis strategies over a small one-sorted signature

A = FunSym("a", (), "S")
B = FunSym("b", (), "S")
G = FunSym("g", ("S",), "S")
F = FunSym("f", ("S", "S"), "S")
SIG = Signature(["S"], [A, B, G, F])
VARS = [Var(n, "S") for n in ("x", "y", "z")]


def terms(max_leaves=8, with_vars=True):
    leaves = [st.just(App(A)), st.just(App(B))]
    if with_vars:
        leaves.append(st.sampled_from(VARS))
    return st.recursive(
        st.one_of(*leaves),
        lambda sub: st.one_of(
            st.builds(lambda t: App(G, (t,)), sub),
            st.builds(lambda s, t: App(F, (s, t)), sub, sub),
        ),
        max_leaves=max_leaves,
    )


def ground_terms(max_leaves=8):
    return terms(max_leaves, with_vars=False)


def substitutions(max_leaves=4):
    return st.dictionaries(st.sampled_from(VARS), terms(max_leaves), max_size=3)
