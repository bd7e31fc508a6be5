"""Transformation of a TRS with linear here-patterns into a plain TRS.

Rules are iteratively instantiated and embedded into one-layer contexts until
every surviving rule can fire in no forbidden context.  A unary ``top_s``
symbol per sort stands for the empty context, so for ground terms ``s`` and
``t`` a restricted step ``s -> t`` corresponds to ``top(s) -> top(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set

from .patterns import ForbiddenPattern, Mode, PatternSystem, forbidden
from .rewriting import TRS, Rule
from .terms import (
    App,
    FunSym,
    Position,
    Signature,
    Sort,
    Term,
    TermError,
    Var,
    apply,
    canonical_vars,
    depth,
    flat,
    format_pos,
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


class UnsupportedPattern(TermError):
    pass


class TransformDivergence(RuntimeError):
    pass


@dataclass(frozen=True)
class TaggedRule:
    rule: Rule
    tag: Position
    origin: int = field(default=-1, compare=False)

    @property
    def lhs(self) -> Term:
        return self.rule.lhs

    @property
    def rhs(self) -> Term:
        return self.rule.rhs

    def key(self) -> tuple:
        """Identity modulo variable renaming."""
        return canonical_vars((self.lhs, self.rhs)) + (self.tag,)

    def canonical(self) -> "TaggedRule":
        lhs, rhs = canonical_vars((self.lhs, self.rhs))
        return TaggedRule(Rule(lhs, rhs), self.tag, self.origin)

    def __str__(self):
        return f"<{self.rule}, {format_pos(self.tag)}>"


class ExtendedSignature(Signature):
    """Base signature plus one ``top_s : s -> s`` per sort."""

    def __init__(self, base: Signature, top_sorts: Optional[Iterable[Sort]] = None):
        self.base = base
        self.tops: Dict[Sort, FunSym] = {}
        taken = set(base.symbols)
        for s in base.sorts if top_sorts is None else top_sorts:
            name = f"top_{s}"
            while name in taken:
                name += "_"
            taken.add(name)
            self.tops[s] = FunSym(name, (s,), s)
        super().__init__(base.sorts, list(base) + list(self.tops.values()))

    def restricted_to(self, sorts: Iterable[Sort]) -> "ExtendedSignature":
        keep = set(sorts)
        ext = ExtendedSignature.__new__(ExtendedSignature)
        ext.base = self.base
        ext.tops = {s: f for s, f in self.tops.items() if s in keep}
        Signature.__init__(ext, self.base.sorts, list(self.base) + list(ext.tops.values()))
        return ext

    def is_top(self, sym: FunSym) -> bool:
        return self.tops.get(sym.sort) == sym

    def top(self, t: Term) -> App:
        return App(self.tops[t.sort], (t,))


def check_here_linear(patterns: Sequence[ForbiddenPattern]) -> None:
    for i, pat in enumerate(patterns):
        if pat.mode is not Mode.HERE:
            raise UnsupportedPattern(
                f"pattern #{i} {pat} has mode {pat.mode}; only here-patterns are supported"
            )
        if not is_linear(pat.term):
            raise UnsupportedPattern(f"pattern #{i} {pat} is not linear")


def _apart(pat: ForbiddenPattern, avoid) -> Term:
    return rename_apart(pat.term, avoid)


def relevant_vars(lhs: Term, tag: Position, patterns: Sequence[ForbiddenPattern]) -> Set[Var]:
    """Variables of ``lhs`` whose instantiation may complete a pattern match
    that covers the tagged position.

    Two overlaps are considered: a pattern subterm ``u|q`` unifying with the
    whole lhs where ``q.tag`` is the pattern position (pattern above or at
    the lhs root), and a whole pattern unifying with ``lhs|q`` where
    ``q.o == tag`` (pattern rooted inside the lhs).
    """
    check_here_linear(patterns)
    lvars = variables(lhs)
    out: Set[Var] = set()
    for pat in patterns:
        u = _apart(pat, lvars)
        o = pat.pos
        if len(o) >= len(tag) and o[len(o) - len(tag):] == tag:
            q = o[: len(o) - len(tag)]
            theta = unify(subterm_at(u, q), lhs)
            if theta is not None:
                out.update(x for x in lvars if not isinstance(theta.get(x, x), Var))
        if len(tag) >= len(o) and tag[len(tag) - len(o):] == o:
            q = tag[: len(tag) - len(o)]
            theta = unify(u, subterm_at(lhs, q))
            if theta is not None:
                out.update(x for x in lvars if not isinstance(theta.get(x, x), Var))
    return out


def instantiate(
    tr: TaggedRule, patterns: Sequence[ForbiddenPattern], signature: Signature
) -> List[TaggedRule]:
    """One-variable minimal instantiations of the relevant variables."""
    base = getattr(signature, "base", signature)
    out = []
    rv = relevant_vars(tr.lhs, tr.tag, patterns)
    for x in variables(tr.lhs):
        if x not in rv:
            continue
        avoid = set(variables(tr.lhs))
        for f in base.of_sort(x.sort):
            sigma = {x: flat(f, avoid)}
            out.append(
                TaggedRule(Rule(apply(sigma, tr.lhs), apply(sigma, tr.rhs)), tr.tag, tr.origin)
            )
    return out


def embedding_required(lhs: Term, tag: Position, patterns: Sequence[ForbiddenPattern]) -> bool:
    """Whether some pattern could cover the tagged position from strictly
    above the lhs root."""
    lvars = variables(lhs)
    for pat in patterns:
        o = pat.pos
        if len(o) > len(tag) and o[len(o) - len(tag):] == tag:
            u = _apart(pat, lvars)
            if unify(subterm_at(u, o[: len(o) - len(tag)]), lhs) is not None:
                return True
    return False


def embed(
    tr: TaggedRule, patterns: Sequence[ForbiddenPattern], signature: ExtendedSignature
) -> List[TaggedRule]:
    """Embeddings into every one-layer context ``g(x1, .., [], .., xn)``."""
    check_here_linear(patterns)
    if not embedding_required(tr.lhs, tr.tag, patterns):
        return []
    sort = tr.lhs.sort
    frames = list(signature.base)
    if sort in signature.tops:
        frames.append(signature.tops[sort])
    out = []
    avoid = set(variables(tr.lhs))
    for g in frames:
        for i, s in enumerate(g.arg_sorts, 1):
            if s != sort:
                continue
            ctx = flat(g, avoid)
            args_l = list(ctx.args)
            args_r = list(ctx.args)
            args_l[i - 1] = tr.lhs
            args_r[i - 1] = tr.rhs
            out.append(
                TaggedRule(Rule(App(g, args_l), App(g, args_r)), (i,) + tr.tag, tr.origin)
            )
    return out


def successors(
    tr: TaggedRule, patterns: Sequence[ForbiddenPattern], signature: ExtendedSignature
) -> List[TaggedRule]:
    return instantiate(tr, patterns, signature) + embed(tr, patterns, signature)


def is_obsolete(tr: TaggedRule, patterns: Sequence[ForbiddenPattern]) -> bool:
    """The lhs itself already contains a pattern instance covering the tag."""
    for pat in patterns:
        o = pat.pos
        if len(tr.tag) >= len(o) and tr.tag[len(tr.tag) - len(o):] == o:
            q = tr.tag[: len(tr.tag) - len(o)]
            if match(pat.term, subterm_at(tr.lhs, q)) is not None:
                return True
    return False


def is_stable(
    tr: TaggedRule, patterns: Sequence[ForbiddenPattern], signature: Optional[Signature] = None
) -> bool:
    """No context and substitution put the tagged position under a pattern.

    Decided exactly by overlap: a pattern occurrence covering the tagged
    position is rooted either at or above the lhs root (then a pattern
    subterm unifies with the lhs) or strictly inside the lhs (then the
    pattern unifies with a lhs subterm).  Top-rooted rules admit no context.
    """
    lhs, tag = tr.lhs, tr.tag
    lvars = variables(lhs)
    top_rooted = signature is not None and getattr(signature, "is_top", None) and (
        isinstance(lhs, App) and signature.is_top(lhs.sym)
    )
    for pat in patterns:
        u = _apart(pat, lvars)
        o = pat.pos
        if not top_rooted and len(o) >= len(tag) and o[len(o) - len(tag):] == tag:
            if unify(subterm_at(u, o[: len(o) - len(tag)]), lhs) is not None:
                return False
        if len(tag) > len(o) and tag[len(tag) - len(o):] == o:
            q = tag[: len(tag) - len(o)]
            if unify(u, subterm_at(lhs, q)) is not None:
                return False
    return True


@dataclass
class TransformResult:
    trs: TRS
    accepted: List[TaggedRule]
    dropped_obsolete: List[TaggedRule]
    iterations: int
    # every sort gets a top here, even if no accepted rule mentions it
    signature: ExtendedSignature

    def minimized(self) -> TRS:
        """Drop accepted rules whose steps are steps of another accepted rule."""
        return TRS(self.trs.signature, minimize_rules(self.trs.rules))


def _subsumed_by(a: Rule, b: Rule) -> bool:
    """Every ``a``-step is a ``b``-step: ``a = C[b sigma] -> C[b.rhs sigma]``."""
    b = Rule(*rename_apart((b.lhs, b.rhs), variables(a.lhs)))
    for q, s in iter_positions(a.lhs):
        if isinstance(s, Var):
            continue
        sigma = match(b.lhs, s)
        if sigma is None:
            continue
        if replace_at(a.lhs, q, apply(sigma, b.rhs)) == a.rhs:
            return True
    return False


def minimize_rules(rules: Sequence[Rule]) -> List[Rule]:
    rules = list(rules)
    keep = []
    for i, a in enumerate(rules):
        dominated = False
        for j, b in enumerate(rules):
            if i == j:
                continue
            if _subsumed_by(a, b):
                # among mutual subsumers (variants) keep the first
                if not _subsumed_by(b, a) or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(a)
    return keep


def _tidy(rule: Rule) -> Rule:
    sigma = {}
    for v in variables(rule.lhs):
        sigma[v] = Var(f"x{len(sigma) + 1}", v.sort)
    return Rule(apply(sigma, rule.lhs), apply(sigma, rule.rhs))


def _sort_key(tr: TaggedRule):
    lhs, rhs = canonical_vars((tr.lhs, tr.rhs))
    return (str(lhs), str(rhs), tr.tag)


def transform(sys: PatternSystem, max_iterations: int = 10_000) -> TransformResult:
    """Iterate stability/obsolescence filtering and one-step successors until
    no pending rule remains."""
    patterns = sys.patterns
    check_here_linear(patterns)
    ext = ExtendedSignature(sys.signature)

    pending = [TaggedRule(r, (), i) for i, r in enumerate(sys.rules)]
    seen = {tr.key() for tr in pending}
    accepted: List[TaggedRule] = []
    obsolete: List[TaggedRule] = []
    iterations = 0
    while pending:
        iterations += 1
        if iterations > max_iterations:
            raise TransformDivergence(f"no fixpoint after {max_iterations} iterations")
        nxt = []
        for tr in sorted(pending, key=_sort_key):
            if is_stable(tr, patterns, ext):
                accepted.append(tr.canonical())
                continue
            if is_obsolete(tr, patterns):
                obsolete.append(tr.canonical())
                continue
            succ = successors(tr, patterns, ext)
            if not succ:
                raise AssertionError(
                    f"{tr} has no successors but is neither stable nor obsolete"
                )
            for s in succ:
                k = s.key()
                if k not in seen:
                    seen.add(k)
                    nxt.append(s)
        pending = nxt

    used = set()
    for tr in accepted:
        for _, s in iter_positions(tr.lhs):
            if isinstance(s, App) and ext.is_top(s.sym):
                used.add(s.sort)
    out_sig = ext.restricted_to(used)
    accepted.sort(key=_sort_key)
    trs = TRS(out_sig, [_tidy(tr.rule) for tr in accepted])
    return TransformResult(trs, accepted, obsolete, iterations, ext)


# ---------------------------------------------------------------------------
# Bounded-search stability, an independent check of ``is_stable``


def _contexts(frames: Sequence[FunSym], sort: Sort, depth: int, avoid: set):
    """Single-hole contexts of hole depth <= ``depth``, built from flat frames,
    as ``(wrap, hole_position)`` pairs."""
    yield (lambda t: t), ()
    if depth == 0:
        return
    for g in frames:
        for i, s in enumerate(g.arg_sorts, 1):
            if s != sort:
                continue
            frame = flat(g, avoid)
            avoid.update(frame.args)
            for outer, pos in _contexts(frames, g.sort, depth - 1, avoid):
                def wrap(t, g=g, i=i, frame=frame, outer=outer):
                    args = list(frame.args)
                    args[i - 1] = t
                    return outer(App(g, args))

                yield wrap, pos + (i,)


def _aligned(t: Term, root: Position, u: Term, avoid: set) -> Term:
    """Instantiate the variables of linear ``t`` lying under ``root`` with the
    (renamed) subterms of ``u`` at the corresponding positions."""
    sigma = {}
    for p, s in iter_positions(t):
        if not isinstance(s, Var) or not is_prefix(root, p):
            continue
        w = p[len(root):]
        try:
            piece = subterm_at(u, w)
        except TermError:
            continue
        if isinstance(piece, App) and piece.sort == s.sort:
            piece = rename_apart(piece, avoid)
            avoid.update(variables(piece))
            sigma[s] = piece
    return apply(sigma, t)


def is_stable_bounded(
    tr: TaggedRule,
    patterns: Sequence[ForbiddenPattern],
    signature: ExtendedSignature,
    bound: Optional[int] = None,
) -> bool:
    """Search contexts and instances for a pattern occurrence covering the
    tag, deciding each candidate with ``forbidden``.

    Contexts are chains of flat frames over the pattern symbols with hole
    depth <= ``bound`` (default: the largest pattern depth minus one, the
    furthest a pattern root can sit above its forbidden position).  For each
    context and pattern placement, variables inside the pattern window are
    instantiated with the pattern's own subterms; for a linear lhs this
    covers every possible instance.
    """
    if not is_linear(tr.lhs):
        raise ValueError("bounded stability search needs a linear left-hand side")
    if bound is None:
        bound = max((depth(p.term) for p in patterns), default=1) - 1
    lhs = tr.lhs
    top_rooted = isinstance(lhs, App) and signature.is_top(lhs.sym)
    avoid = set(variables(lhs))
    if top_rooted:
        ctxs = [((lambda t: t), ())]
    else:
        frames = {s.sym for p in patterns for _, s in iter_positions(p.term) if isinstance(s, App)}
        ctxs = _contexts(sorted(frames, key=lambda f: f.name), lhs.sort, bound, avoid)
    for wrap, hole in ctxs:
        t = wrap(lhs)
        target = hole + tr.tag
        for pat in patterns:
            o = pat.pos
            if len(o) > len(target) or target[len(target) - len(o):] != o:
                continue
            root = target[: len(target) - len(o)]
            inst = _aligned(t, root, pat.term, set(avoid) | set(variables(t)))
            if forbidden(patterns, inst, target) is not None:
                return False
    return True
