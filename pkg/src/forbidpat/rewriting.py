"""Unrestricted rewriting and the reference strategies used as oracles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple

from .terms import (
    Position,
    Signature,
    SortError,
    Substitution,
    Term,
    TermError,
    Var,
    apply,
    format_pos,
    is_linear,
    is_prefix,
    iter_positions,
    match,
    replace_at,
    subterm_at,
    variables,
)


class RuleError(TermError):
    pass


class InvalidRedex(TermError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise RuleError(f"left-hand side of {self} is a variable")
        if self.lhs.sort != self.rhs.sort:
            raise SortError(f"sides of {self} have different sorts")
        extra = set(variables(self.rhs)) - set(variables(self.lhs))
        if extra:
            names = ", ".join(sorted(v.name for v in extra))
            raise RuleError(f"right-hand side of {self} has extra variables {names}")

    @property
    def sort(self):
        return self.lhs.sort

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


class TRS:
    def __init__(self, signature: Signature, rules: Iterable[Rule] = ()):
        self.signature = signature
        self.rules: Tuple[Rule, ...] = tuple(rules)
        for r in self.rules:
            signature.check_term(r.lhs)
            signature.check_term(r.rhs)

    @property
    def defined(self) -> set:
        return {r.lhs.sym for r in self.rules}

    @property
    def constructors(self) -> set:
        return set(self.signature) - self.defined

    def is_left_linear(self) -> bool:
        return all(is_linear(r.lhs) for r in self.rules)

    def __repr__(self):
        return f"TRS({len(self.rules)} rules)"


@dataclass(frozen=True)
class Redex:
    position: Position
    rule_index: int
    matcher: Substitution = field(compare=False, hash=False)

    def __str__(self):
        return f"{format_pos(self.position)}#{self.rule_index}"


def redexes(trs: TRS, t: Term) -> List[Redex]:
    """All redexes of ``t``, ordered by position then rule index."""
    out = []
    for p, s in iter_positions(t):
        if isinstance(s, Var):
            continue
        for i, rule in enumerate(trs.rules):
            if rule.lhs.sym != s.sym:
                continue
            sigma = match(rule.lhs, s)
            if sigma is not None:
                out.append(Redex(p, i, sigma))
    return out


def is_redex_at(trs: TRS, t: Term, p: Position) -> bool:
    s = subterm_at(t, p)
    return any(match(r.lhs, s) is not None for r in trs.rules)


def contract(trs: TRS, t: Term, position: Position, rule_index: int) -> Term:
    """Rewrite ``t`` at ``position`` with rule ``rule_index``."""
    rule = trs.rules[rule_index]
    s = subterm_at(t, position)
    if isinstance(s, Var):
        raise InvalidRedex(f"position {format_pos(position)} is a variable position")
    sigma = match(rule.lhs, s)
    if sigma is None:
        raise InvalidRedex(f"rule {rule} does not match at {format_pos(position)}")
    return replace_at(t, position, apply(sigma, rule.rhs))


def step(trs: TRS, t: Term, rdx: Redex) -> Term:
    return contract(trs, t, rdx.position, rdx.rule_index)


def innermost_redexes(trs: TRS, t: Term) -> List[Redex]:
    rs = redexes(trs, t)
    ps = {r.position for r in rs}
    return [
        r for r in rs
        if not any(q != r.position and is_prefix(r.position, q) for q in ps)
    ]


def outermost_redexes(trs: TRS, t: Term) -> List[Redex]:
    rs = redexes(trs, t)
    ps = {r.position for r in rs}
    return [
        r for r in rs
        if not any(q != r.position and is_prefix(q, r.position) for q in ps)
    ]


def successors(trs: TRS, t: Term) -> List[Term]:
    return [step(trs, t, r) for r in redexes(trs, t)]


# ---------------------------------------------------------------------------
# Bounded exploration


def closure(
    succ: Callable[[Term], Iterable[Term]],
    start: Term,
    max_steps: int,
    max_terms: int = 100_000,
) -> Tuple[dict, bool]:
    """Breadth-first closure under ``succ``.

    Returns ``(dist, truncated)`` where ``dist`` maps each term reachable in at
    most ``max_steps`` steps to its distance from ``start``.  ``truncated`` is
    set when ``max_terms`` cut the exploration short.
    """
    dist = {start: 0}
    frontier = deque([start])
    truncated = False
    while frontier:
        t = frontier.popleft()
        d = dist[t]
        if d >= max_steps:
            continue
        for u in succ(t):
            if u in dist:
                continue
            if len(dist) >= max_terms:
                truncated = True
                break
            dist[u] = d + 1
            frontier.append(u)
        if truncated:
            break
    return dist, truncated


def closure_plus(
    succ: Callable[[Term], Iterable[Term]],
    start: Term,
    max_steps: int,
    max_terms: int = 100_000,
) -> Tuple[dict, bool]:
    """Like :func:`closure` but over derivations of length 1 to ``max_steps``;
    ``start`` itself is included only if it lies on a cycle."""
    dist: dict = {}
    frontier = deque()
    for u in succ(start):
        if u not in dist:
            dist[u] = 1
            frontier.append(u)
    truncated = False
    while frontier:
        t = frontier.popleft()
        d = dist[t]
        if d >= max_steps:
            continue
        for u in succ(t):
            if u in dist:
                continue
            if len(dist) >= max_terms:
                truncated = True
                break
            dist[u] = d + 1
            frontier.append(u)
        if truncated:
            break
    return dist, truncated


def reachable(trs: TRS, t: Term, max_steps: int, max_terms: int = 100_000) -> Tuple[set, bool]:
    if max_steps < 0 or max_terms < 1:
        raise ValueError("bounds must be positive")
    dist, truncated = closure(lambda u: successors(trs, u), t, max_steps, max_terms)
    return set(dist), truncated


@dataclass
class HeadNormalVerdict:
    root_step_found: bool
    trace: List[Tuple[Term, Position, int]] = field(default_factory=list)
    truncated: bool = False

    def __bool__(self):
        return self.root_step_found


def is_head_normal_bounded(
    trs: TRS, t: Term, max_steps: int, max_terms: int = 100_000
) -> HeadNormalVerdict:
    """Search for a derivation from ``t`` that ends with a root step.

    The returned trace lists ``(term, position, rule_index)`` for each step,
    the last one at the root.
    """
    parent = {t: None}
    depth = {t: 0}
    frontier = deque([t])
    truncated = False
    while frontier:
        u = frontier.popleft()
        rs = redexes(trs, u)
        for r in rs:
            if r.position == ():
                trace = [(u, r.position, r.rule_index)]
                while parent[u] is not None:
                    u, pos, idx = parent[u]
                    trace.append((u, pos, idx))
                return HeadNormalVerdict(True, trace[::-1])
        if depth[u] >= max_steps:
            continue
        for r in rs:
            v = step(trs, u, r)
            if v in parent:
                continue
            if len(parent) >= max_terms:
                truncated = True
                continue
            parent[v] = (u, r.position, r.rule_index)
            depth[v] = depth[u] + 1
            frontier.append(v)
    return HeadNormalVerdict(False, truncated=truncated)


def parallel_outermost_step(trs: TRS, t: Term) -> Optional[Term]:
    """Contract all outermost redexes at once (first matching rule each)."""
    chosen = {}
    for r in outermost_redexes(trs, t):
        chosen.setdefault(r.position, r)
    if not chosen:
        return None
    # outermost redexes are pairwise parallel, so replacement order is irrelevant
    for r in chosen.values():
        t = step(trs, t, r)
    return t


def rewrite_sequence(
    next_term: Callable[[Term], Optional[Term]], t: Term, max_steps: int
) -> List[Term]:
    seq = [t]
    for _ in range(max_steps):
        t = next_term(t)
        if t is None:
            break
        seq.append(t)
    return seq


__all__ = [
    "Rule",
    "TRS",
    "Redex",
    "RuleError",
    "InvalidRedex",
    "redexes",
    "is_redex_at",
    "contract",
    "step",
    "innermost_redexes",
    "outermost_redexes",
    "successors",
    "closure",
    "closure_plus",
    "reachable",
    "HeadNormalVerdict",
    "is_head_normal_bounded",
    "parallel_outermost_step",
    "rewrite_sequence",
]
