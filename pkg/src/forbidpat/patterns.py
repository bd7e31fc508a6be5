"""Rewriting restricted by forbidden patterns.

A pattern ``<u, o, mode>`` forbids, wherever ``u`` matches at some position
``q'`` of a term, reduction exactly at ``q'.o`` (mode ``h``), strictly below it
(``b``) or strictly above it (``a``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from .rewriting import TRS, Redex, Rule, redexes, step
from .terms import (
    App,
    Position,
    PositionError,
    Signature,
    Substitution,
    Term,
    TermError,
    Var,
    flat,
    format_pos,
    fresh_var,
    has_position,
    is_linear,
    is_prefix,
    iter_positions,
    match,
    rename_apart,
    replace_at,
    subterm_at,
    unify,
    variables,
)


class Mode(str, enum.Enum):
    HERE = "h"
    BELOW = "b"
    ABOVE = "a"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ForbiddenPattern:
    term: Term
    pos: Position
    mode: Mode

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "pos", tuple(self.pos))
        if not has_position(self.term, self.pos):
            raise PositionError(
                f"position {format_pos(self.pos)} is not a position of {self.term}"
            )

    def __str__(self):
        return f"<{self.term}, {format_pos(self.pos)}, {self.mode}>"


class PatternSystem:
    """A TRS together with a finite sequence of forbidden patterns."""

    def __init__(self, trs: TRS, patterns: Iterable[ForbiddenPattern] = ()):
        self.trs = trs
        self.patterns: Tuple[ForbiddenPattern, ...] = tuple(patterns)
        for pat in self.patterns:
            trs.signature.check_term(pat.term)

    @property
    def signature(self) -> Signature:
        return self.trs.signature

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return self.trs.rules

    def __repr__(self):
        return f"PatternSystem({len(self.rules)} rules, {len(self.patterns)} patterns)"


@dataclass(frozen=True)
class ForbidWitness:
    pattern_index: int
    match_position: Position
    matcher: Substitution = field(compare=False, hash=False)

    def __str__(self):
        return f"pattern #{self.pattern_index} matched at {format_pos(self.match_position)}"


class ForbiddenRedex(TermError):
    def __init__(self, redex: Redex, witness: ForbidWitness):
        super().__init__(f"redex at {format_pos(redex.position)} is forbidden by {witness}")
        self.redex = redex
        self.witness = witness


def _mode_hits(mode: Mode, p: Position, target: Position) -> bool:
    if mode is Mode.HERE:
        return p == target
    if mode is Mode.BELOW:
        return p != target and is_prefix(target, p)
    return p != target and is_prefix(p, target)


def forbidden(
    patterns: Sequence[ForbiddenPattern], t: Term, p: Position
) -> Optional[ForbidWitness]:
    """First witness (by pattern index, then match position) that forbids
    reduction of ``t`` at ``p``, or None when ``p`` is allowed."""
    if isinstance(patterns, PatternSystem):
        patterns = patterns.patterns
    subterm_at(t, p)
    occurrences = list(iter_positions(t))
    for i, pat in enumerate(patterns):
        for q, s in occurrences:
            if not _mode_hits(pat.mode, p, q + pat.pos):
                continue
            sigma = match(pat.term, s)
            if sigma is not None:
                return ForbidWitness(i, q, sigma)
    return None


def pi_redexes(sys: PatternSystem, t: Term) -> List[Redex]:
    return [r for r in redexes(sys.trs, t) if forbidden(sys.patterns, t, r.position) is None]


def forbidden_redexes(sys: PatternSystem, t: Term) -> List[Tuple[Redex, ForbidWitness]]:
    out = []
    for r in redexes(sys.trs, t):
        w = forbidden(sys.patterns, t, r.position)
        if w is not None:
            out.append((r, w))
    return out


def pi_step(sys: PatternSystem, t: Term, rdx: Redex) -> Term:
    w = forbidden(sys.patterns, t, rdx.position)
    if w is not None:
        raise ForbiddenRedex(rdx, w)
    return step(sys.trs, t, rdx)


def pi_successors(sys: PatternSystem, t: Term) -> List[Term]:
    return [step(sys.trs, t, r) for r in pi_redexes(sys, t)]


def is_pi_normal_form(sys: PatternSystem, t: Term) -> bool:
    return not pi_redexes(sys, t)


# ---------------------------------------------------------------------------
# Simple and canonical patterns


@dataclass
class CheckReport:
    verdict: bool
    violations: List[Tuple[int, str]] = field(default_factory=list)
    notes: List[Tuple[int, str]] = field(default_factory=list)

    def __bool__(self):
        return self.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "violations": [{"pattern": i, "message": m} for i, m in self.violations],
            "notes": [{"pattern": i, "message": m} for i, m in self.notes],
        }


def is_simple(patterns: Sequence[ForbiddenPattern]) -> CheckReport:
    if isinstance(patterns, PatternSystem):
        patterns = patterns.patterns
    violations = []
    for i, pat in enumerate(patterns):
        t, p = pat.term, pat.pos
        if pat.mode is Mode.ABOVE:
            violations.append((i, "above-patterns are not simple"))
        if pat.mode is Mode.HERE and p == ():
            violations.append((i, "here-pattern at the root is not simple"))
        if not is_linear(t):
            violations.append((i, f"{t} is not linear"))
        s = subterm_at(t, p)
        if isinstance(s, App) and not all(isinstance(a, Var) for a in s.args):
            violations.append(
                (i, f"subterm {s} at {format_pos(p)} is neither a variable nor flat")
            )
        for q, u in iter_positions(t):
            if not is_prefix(q, p) and not is_prefix(p, q) and isinstance(u, App):
                violations.append(
                    (
                        i,
                        f"position {format_pos(q)} is parallel to {format_pos(p)} "
                        f"but holds non-variable {u}",
                    )
                )
    return CheckReport(not violations, violations)


def _hole(t: Term, p: Position, avoid) -> Tuple[Term, Var]:
    x = fresh_var(subterm_at(t, p).sort, avoid, base="hole")
    return replace_at(t, p, x), x


def is_canonical(sys: PatternSystem) -> CheckReport:
    """Check that no pattern blocks a step needed to create a redex.

    Simplicity is checked first; a non-simple set is reported as such.
    """
    simple = is_simple(sys.patterns)
    if not simple:
        return CheckReport(False, list(simple.violations))
    violations = []
    notes = []
    for j, rule in enumerate(sys.rules):
        lhs = rule.lhs
        lhs_nonvar = [q for q, s in iter_positions(lhs) if isinstance(s, App)]
        for i, pat in enumerate(sys.patterns):
            p, mode = pat.pos, pat.mode
            t = rename_apart(pat.term, variables(lhs))
            t1, _ = _hole(t, p, variables(lhs) + variables(t))

            # the pattern sits inside a lhs instance, around the forbidden spot
            for q, s in iter_positions(t1):
                if q == () or isinstance(s, Var) or unify(s, lhs) is None:
                    continue
                for q2 in lhs_nonvar:
                    qq = q + q2
                    hit = qq == p if mode is Mode.HERE else (qq != p and is_prefix(p, qq))
                    if hit:
                        violations.append(
                            (
                                i,
                                f"overlaps rule {j} ({rule}): pattern subterm at "
                                f"{format_pos(q)} unifies with the lhs and "
                                f"{format_pos(qq)} is a non-variable lhs position",
                            )
                        )
                        if not has_position(pat.term, qq):
                            notes.append(
                                (i, f"position {format_pos(qq)} is not a position of {pat.term}")
                            )
                        break

            # the pattern lies within the lhs
            for q in lhs_nonvar:
                if unify(t1, subterm_at(lhs, q)) is None:
                    continue
                for q2 in lhs_nonvar:
                    if not is_prefix(q, q2):
                        continue
                    rest = q2[len(q):]
                    hit = rest == p if mode is Mode.HERE else (rest != p and is_prefix(p, rest))
                    if hit:
                        violations.append(
                            (
                                i,
                                f"overlaps rule {j} ({rule}): lhs subterm at "
                                f"{format_pos(q)} unifies with the pattern and "
                                f"{format_pos(q2)} is a non-variable lhs position",
                            )
                        )
                        break
    return CheckReport(not violations, violations, notes)


# ---------------------------------------------------------------------------
# Strategy encodings


class ReplacementMapError(TermError):
    pass


def encode_context_sensitive(
    mu: Mapping[str, Iterable[int]], signature: Signature
) -> List[ForbiddenPattern]:
    """Patterns forbidding reduction in every argument ``j`` not in ``mu[f]``.

    Symbols missing from ``mu`` keep all their arguments replacing.
    """
    out = []
    for name in mu:
        if name not in signature:
            raise ReplacementMapError(f"unknown symbol {name} in replacement map")
    for f in signature:
        allowed = set(mu.get(f.name, range(1, f.arity + 1)))
        if not allowed <= set(range(1, f.arity + 1)):
            raise ReplacementMapError(f"replacement map of {f.name} exceeds its arity")
        u = flat(f)
        for j in range(1, f.arity + 1):
            if j not in allowed:
                out.append(ForbiddenPattern(u, (j,), Mode.HERE))
                out.append(ForbiddenPattern(u, (j,), Mode.BELOW))
    return out


def encode_innermost(trs: TRS) -> List[ForbiddenPattern]:
    return [ForbiddenPattern(r.lhs, (), Mode.ABOVE) for r in trs.rules]


def encode_outermost(trs: TRS) -> List[ForbiddenPattern]:
    return [ForbiddenPattern(r.lhs, (), Mode.BELOW) for r in trs.rules]


def mu_replacing(mu: Mapping[str, Iterable[int]], t: Term, p: Position) -> bool:
    """Direct replacement-map check: every step on the path to ``p`` is allowed."""
    for i in p:
        if not isinstance(t, App):
            return False
        allowed = mu.get(t.name)
        if allowed is not None and i not in set(allowed):
            return False
        t = t.args[i - 1]
    return True


# ---------------------------------------------------------------------------
# Partial redexes


def prunings(lhs: Term) -> List[Tuple[Term, Tuple[Position, ...]]]:
    """Witnesses obtained from ``lhs`` by replacing the subterms at a set of
    pairwise parallel non-root non-variable positions with fresh variables.

    Returns ``(witness, pruned_positions)`` pairs; the unpruned lhs is included.
    """
    cands = [q for q, s in iter_positions(lhs) if q and isinstance(s, App)]
    out = []

    def rec(idx, chosen):
        if idx == len(cands):
            w = lhs
            avoid = set(variables(lhs))
            for q in chosen:
                x = fresh_var(subterm_at(lhs, q).sort, avoid, base="w")
                avoid.add(x)
                w = replace_at(w, q, x)
            out.append((w, tuple(chosen)))
            return
        q = cands[idx]
        rec(idx + 1, chosen)
        if all(not is_prefix(c, q) and not is_prefix(q, c) for c in chosen):
            rec(idx + 1, chosen + [q])

    rec(0, [])
    return out
