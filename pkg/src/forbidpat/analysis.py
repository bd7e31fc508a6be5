"""Bounded verification machinery: ground enumeration, loop search,
head-normalization and relation comparisons.

Depth convention: constants and variables have depth 1; bounds are inclusive.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .patterns import PatternSystem, forbidden, is_canonical, pi_redexes
from .rewriting import TRS, Redex, closure_plus, redexes, step
from .terms import (
    App,
    Position,
    Signature,
    Sort,
    Term,
    apply,
    format_pos,
    is_prefix,
    iter_positions,
    match,
    replace_at,
)
from .transform import TransformResult

Step = Tuple[Position, int, Term]
StepFn = Callable[[Term], Iterable[Step]]


# ---------------------------------------------------------------------------
# Ground terms


@dataclass
class GroundEnumeration:
    signature: Signature
    sort: Sort
    max_depth: int
    terms: List[Term]

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)


def _ground_layers(signature: Signature, max_depth: int) -> List[Dict[Sort, List[Term]]]:
    """``layers[d][s]``: ground terms of sort ``s`` with depth exactly ``d``."""
    layers: List[Dict[Sort, List[Term]]] = [{s: [] for s in signature.sorts}]
    for d in range(1, max_depth + 1):
        layer: Dict[Sort, List[Term]] = {s: [] for s in signature.sorts}
        upto = {s: [t for l in layers for t in l[s]] for s in signature.sorts}
        for f in signature:
            if f.arity == 0:
                if d == 1:
                    layer[f.sort].append(App(f, ()))
                continue
            if d == 1:
                continue
            choices = [upto[s] for s in f.arg_sorts]
            prev = [set(layers[d - 1][s]) for s in f.arg_sorts]
            for args in itertools.product(*choices):
                # exactly depth d: some argument has depth d - 1
                if any(a in p for a, p in zip(args, prev)):
                    layer[f.sort].append(App(f, args))
        layers.append(layer)
    return layers


def enumerate_ground(signature: Signature, sort: Sort, max_depth: int) -> GroundEnumeration:
    layers = _ground_layers(signature, max_depth)
    terms = [t for layer in layers for t in layer.get(sort, [])]
    return GroundEnumeration(signature, sort, max_depth, terms)


def ground_terms(signature: Signature, max_depth: int) -> List[Term]:
    """All ground terms of every sort, ordered by depth then sort."""
    layers = _ground_layers(signature, max_depth)
    return [t for layer in layers for s in signature.sorts for t in layer[s]]


# ---------------------------------------------------------------------------
# Derivations and loops


def plain_steps(trs: TRS) -> StepFn:
    def steps(t: Term) -> Iterator[Step]:
        for r in redexes(trs, t):
            yield r.position, r.rule_index, step(trs, t, r)

    return steps


def pi_steps(sys: PatternSystem) -> StepFn:
    def steps(t: Term) -> Iterator[Step]:
        for r in pi_redexes(sys, t):
            yield r.position, r.rule_index, step(sys.trs, t, r)

    return steps


@dataclass
class DerivationTrace:
    start: Term
    steps: List[Tuple[Term, Position, int]] = field(default_factory=list)
    end: Optional[Term] = None

    def terms(self) -> List[Term]:
        out = [s[0] for s in self.steps]
        if self.end is not None:
            out.append(self.end)
        return out or [self.start]

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        lines = []
        for t, p, i in self.steps:
            lines.append(f"{t}  --[{format_pos(p)}, rule {i}]-->")
        lines.append(str(self.end if self.end is not None else self.start))
        return "\n".join(lines)


@dataclass
class LoopSearch:
    loop: Optional[DerivationTrace]
    exhausted: bool
    explored: int

    @property
    def found(self) -> bool:
        return self.loop is not None


def find_loop(step_fn: StepFn, t: Term, max_steps: int) -> LoopSearch:
    """Depth-first search for a derivation that revisits one of its terms.

    ``max_steps`` bounds the number of steps examined.  The returned trace
    starts at the revisited term.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    on_path: Dict[Term, int] = {}
    done = set()
    path: List[Tuple[Term, Position, int]] = []
    budget = max_steps
    exhausted = False

    # iterative DFS; each frame holds a term and its pending successors
    stack = [(t, iter(step_fn(t)))]
    on_path[t] = 0
    while stack:
        u, succ = stack[-1]
        nxt = next(succ, None)
        if nxt is None:
            stack.pop()
            del on_path[u]
            done.add(u)
            if path:
                path.pop()
            continue
        if budget == 0:
            exhausted = True
            break
        budget -= 1
        pos, idx, v = nxt
        if v in on_path:
            cyc = path[on_path[v]:] + [(u, pos, idx)]
            return LoopSearch(DerivationTrace(v, cyc, v), False, max_steps - budget)
        if v in done:
            continue
        path.append((u, pos, idx))
        on_path[v] = len(path)
        stack.append((v, iter(step_fn(v))))
    return LoopSearch(None, exhausted, max_steps - budget)


# ---------------------------------------------------------------------------
# Normalization


class BudgetExhausted(RuntimeError):
    def __init__(self, message: str, partial: Term, trace: DerivationTrace):
        super().__init__(message)
        self.partial = partial
        self.trace = trace


def leftmost_innermost(rs: Sequence[Redex]) -> Optional[Redex]:
    ps = [r.position for r in rs]
    for r in rs:
        if not any(q != r.position and is_prefix(r.position, q) for q in ps):
            return r
    return None


@dataclass
class NormalizeResult:
    term: Term
    trace: DerivationTrace
    steps: int


def pi_normalize(sys: PatternSystem, t: Term, budget: int) -> Tuple[Term, List[Tuple[Term, Position, int]], bool]:
    """Leftmost-innermost allowed steps until a Pi-normal form or the budget."""
    steps = []
    while True:
        r = leftmost_innermost(pi_redexes(sys, t))
        if r is None:
            return t, steps, True
        if len(steps) >= budget:
            return t, steps, False
        steps.append((t, r.position, r.rule_index))
        t = step(sys.trs, t, r)


def normalize(
    sys: PatternSystem,
    t: Term,
    step_budget: int = 1000,
    depth_budget: int = 200,
    check: bool = True,
) -> NormalizeResult:
    """Compute the Pi-normal form of ``t``, then recurse into the arguments.

    Under a left-linear confluent system with canonical patterns and a
    terminating restricted relation this yields the normal form of ``t``.
    """
    if check:
        if not sys.trs.is_left_linear():
            warnings.warn("system is not left-linear; result may not be a normal form")
        elif not is_canonical(sys):
            warnings.warn("patterns are not canonical; result may not be a normal form")

    trace: List[Tuple[Term, Position, int]] = []
    whole = [t]
    used = [0]

    def rec(u: Term, prefix: Position, depth: int) -> Term:
        if depth > depth_budget:
            raise BudgetExhausted(
                "recursion depth budget exhausted", whole[0], DerivationTrace(t, list(trace), whole[0])
            )
        v, steps, done = pi_normalize(sys, u, step_budget - used[0])
        for s, p, i in steps:
            trace.append((replace_at(whole[0], prefix, s), prefix + p, i))
            whole[0] = replace_at(whole[0], prefix, step(sys.trs, s, Redex(p, i, {})))
        used[0] += len(steps)
        if not done:
            raise BudgetExhausted(
                "step budget exhausted", whole[0], DerivationTrace(t, list(trace), whole[0])
            )
        if isinstance(v, App) and v.args:
            args = [rec(a, prefix + (k,), depth + 1) for k, a in enumerate(v.args, 1)]
            v = App(v.sym, args)
        return v

    result = rec(t, (), 0)
    return NormalizeResult(result, DerivationTrace(t, trace, result), used[0])


# ---------------------------------------------------------------------------
# Relation comparisons


@dataclass
class Discrepancy:
    term: Term
    only_first: List[Tuple[Position, int]]
    only_second: List[Tuple[Position, int]]


@dataclass
class RelationReport:
    terms_checked: int
    discrepancies: List[Discrepancy]

    @property
    def equal(self) -> bool:
        return not self.discrepancies

    def __bool__(self):
        return self.equal


def compare_relations(
    redex_fn_a: Callable[[Term], Iterable[Redex]],
    redex_fn_b: Callable[[Term], Iterable[Redex]],
    terms: Iterable[Term],
) -> RelationReport:
    out = []
    n = 0
    for t in terms:
        n += 1
        a = {(r.position, r.rule_index) for r in redex_fn_a(t)}
        b = {(r.position, r.rule_index) for r in redex_fn_b(t)}
        if a != b:
            out.append(Discrepancy(t, sorted(a - b), sorted(b - a)))
    return RelationReport(n, out)


@dataclass
class CorrespondenceReport:
    terms_checked: int
    pairs_checked: int
    counterexamples: List[dict]

    @property
    def verdict(self) -> bool:
        return not self.counterexamples

    def __bool__(self):
        return self.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "terms_checked": self.terms_checked,
            "pairs_checked": self.pairs_checked,
            "counterexamples": self.counterexamples,
        }


def check_ground_correspondence(
    sys: PatternSystem,
    transformed: TransformResult,
    depth: int = 3,
    k: int = 4,
    slack: int = 2,
    max_terms: int = 20_000,
) -> CorrespondenceReport:
    """Compare ``s ->Pi+ t`` with ``top(s) ->+ top(t)`` on ground terms.

    Each side's derivations of length at most ``k`` must be matched by the
    other side within ``slack * k`` steps.
    """
    ext = transformed.signature
    target = TRS(ext, transformed.trs.rules)
    top = ext.top
    pi_succ = lambda u: [v for _, _, v in pi_steps(sys)(u)]
    t_succ = lambda u: [v for _, _, v in plain_steps(target)(u)]
    wide = slack * k
    cex = []
    pairs = 0
    terms = ground_terms(sys.signature, depth)
    for s in terms:
        pi_near, _ = closure_plus(pi_succ, s, k, max_terms)
        t_far, t_trunc = closure_plus(t_succ, top(s), wide, max_terms)
        for u in pi_near:
            pairs += 1
            if top(u) not in t_far and not t_trunc:
                cex.append({"direction": "pi-to-transformed", "source": str(s), "target": str(u)})
        t_near, _ = closure_plus(t_succ, top(s), k, max_terms)
        pi_far, pi_trunc = closure_plus(pi_succ, s, wide, max_terms)
        for w in t_near:
            pairs += 1
            if not (isinstance(w, App) and w.sym == top(s).sym):
                cex.append({"direction": "top-lost", "source": str(s), "target": str(w)})
                continue
            if w.args[0] not in pi_far and not pi_trunc:
                cex.append({"direction": "transformed-to-pi", "source": str(s), "target": str(w.args[0])})
    return CorrespondenceReport(len(terms), pairs, cex)


def check_one_step_soundness(sys: PatternSystem, transformed: TransformResult, depth: int = 3) -> List[Tuple[Term, Term]]:
    """Ground Pi-steps ``s -> t`` without a single transformed step
    ``top(s) -> top(t)``."""
    ext = transformed.signature
    target = TRS(ext, transformed.trs.rules)
    failures = []
    for s in ground_terms(sys.signature, depth):
        targets = {v for _, _, v in plain_steps(target)(ext.top(s))}
        for _, _, t in pi_steps(sys)(s):
            if ext.top(t) not in targets:
                failures.append((s, t))
    return failures


def check_compatibility(sys: PatternSystem, transformed: TransformResult, depth: int = 3) -> List[dict]:
    """Every transformed step on ``top(s)`` or ``s`` (ground) must be an allowed
    step of the originating rule at the tagged position."""
    ext = transformed.signature
    failures = []
    for s in ground_terms(sys.signature, depth):
        for start, offset in ((ext.top(s), 1), (s, 0)):
            for tr in transformed.accepted:
                for p, sub in iter_positions(start):
                    if not isinstance(sub, App) or sub.sym != tr.lhs.sym:
                        continue
                    sigma = match(tr.lhs, sub)
                    if sigma is None:
                        continue
                    after = replace_at(start, p, apply(sigma, tr.rhs))
                    inner = after.args[0] if offset else after
                    at = (p + tr.tag)[offset:]
                    ok = forbidden(sys.patterns, s, at) is None
                    if ok:
                        try:
                            ok = step(sys.trs, s, Redex(at, tr.origin, {})) == inner
                        except Exception:
                            ok = False
                    if not ok:
                        failures.append({"term": str(s), "rule": str(tr), "position": format_pos(p)})
    return failures
