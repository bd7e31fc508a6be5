"""Many-sorted first-order terms.

Terms are immutable and compared structurally.  Positions are tuples of
1-based argument indices; the empty tuple is the root.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union

Sort = str
Position = Tuple[int, ...]
ROOT: Position = ()


class TermError(ValueError):
    pass


class SortError(TermError):
    pass


class PositionError(TermError):
    pass


@dataclass(frozen=True)
class FunSym:
    name: str
    arg_sorts: Tuple[Sort, ...]
    sort: Sort

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self):
        return f"FunSym({self.name}: {' '.join(self.arg_sorts)} -> {self.sort})"


class Var:
    __slots__ = ("name", "sort", "_hash")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self.sort = sort
        self._hash = hash(("V", name, sort))

    def __eq__(self, other):
        return (
            isinstance(other, Var)
            and self.name == other.name
            and self.sort == other.sort
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r}, {self.sort!r})"

    def __str__(self):
        return self.name


class App:
    __slots__ = ("sym", "args", "_hash")

    def __init__(self, sym: FunSym, args: Iterable["Term"] = ()):
        args = tuple(args)
        if len(args) != sym.arity:
            raise SortError(
                f"{sym.name} expects {sym.arity} arguments, got {len(args)}"
            )
        for i, (a, s) in enumerate(zip(args, sym.arg_sorts), 1):
            if a.sort != s:
                raise SortError(
                    f"argument {i} of {sym.name} has sort {a.sort}, expected {s}"
                )
        self.sym = sym
        self.args = args
        self._hash = hash((sym.name, args))

    @property
    def sort(self) -> Sort:
        return self.sym.sort

    @property
    def name(self) -> str:
        return self.sym.name

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.sym == other.sym
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self})"

    def __str__(self):
        if not self.args:
            return self.sym.name
        return f"{self.sym.name}({', '.join(map(str, self.args))})"


Term = Union[Var, App]
Substitution = Dict[Var, Term]


def is_var(t: Term) -> bool:
    return isinstance(t, Var)


# ---------------------------------------------------------------------------
# Positions


class PosRelation(enum.Enum):
    EQUAL = "equal"
    ABOVE = "strictly_above"
    BELOW = "strictly_below"
    PARALLEL = "parallel"


def is_prefix(p: Position, q: Position) -> bool:
    """True iff ``p <= q`` in the prefix order."""
    return len(p) <= len(q) and q[: len(p)] == p


def compare(p: Position, q: Position) -> PosRelation:
    if p == q:
        return PosRelation.EQUAL
    if is_prefix(p, q):
        return PosRelation.ABOVE
    if is_prefix(q, p):
        return PosRelation.BELOW
    return PosRelation.PARALLEL


def format_pos(p: Position) -> str:
    return ".".join(map(str, p)) if p else "e"


def parse_pos(text: str) -> Position:
    text = text.strip()
    if text in ("e", "ε", ""):
        return ROOT
    try:
        pos = tuple(int(part) for part in text.split("."))
    except ValueError:
        raise PositionError(f"malformed position {text!r}") from None
    if any(i < 1 for i in pos):
        raise PositionError(f"position indices are 1-based: {text!r}")
    return pos


def iter_positions(t: Term, prefix: Position = ROOT) -> Iterator[Tuple[Position, Term]]:
    """Yield ``(position, subterm)`` in pre-order, i.e. lexicographic order."""
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            yield from iter_positions(a, prefix + (i,))


def positions(t: Term, nonvar_only: bool = False) -> list:
    return [p for p, s in iter_positions(t) if not (nonvar_only and isinstance(s, Var))]


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise PositionError(f"position {format_pos(p)} out of range")
        t = t.args[i - 1]
    return t


def has_position(t: Term, p: Position) -> bool:
    try:
        subterm_at(t, p)
    except PositionError:
        return False
    return True


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        if s.sort != t.sort:
            raise SortError(f"cannot replace a {t.sort} term by a {s.sort} term")
        return s
    if not isinstance(t, App) or not 1 <= p[0] <= len(t.args):
        raise PositionError(f"position {format_pos(p)} out of range")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], p[1:], s)
    return App(t.sym, args)


def depth(t: Term) -> int:
    """Height of ``t``; variables and constants have depth 1."""
    if isinstance(t, Var):
        return 1
    return 1 + max((depth(a) for a in t.args), default=0)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def variables(t: Term) -> list:
    """Variables of ``t`` in order of first occurrence."""
    seen: dict = {}
    for _, s in iter_positions(t):
        if isinstance(s, Var):
            seen.setdefault(s, None)
    return list(seen)


def is_ground(t: Term) -> bool:
    return all(not isinstance(s, Var) for _, s in iter_positions(t))


def is_linear(t: Term) -> bool:
    occ = [s for _, s in iter_positions(t) if isinstance(s, Var)]
    return len(occ) == len(set(occ))


def symbols(t: Term) -> set:
    return {s.sym for _, s in iter_positions(t) if isinstance(s, App)}


# ---------------------------------------------------------------------------
# Substitutions


def apply(sigma: Substitution, t: Term) -> Term:
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t, t)
    if not t.args:
        return t
    return App(t.sym, [apply(sigma, a) for a in t.args])


def match(pattern: Term, subject: Term, sigma: Optional[Substitution] = None) -> Optional[Substitution]:
    """Return ``sigma`` with ``apply(sigma, pattern) == subject``, or None.

    Variables occurring in ``subject`` are treated as constants.
    """
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            if p.sort != s.sort:
                return None
            bound = sigma.get(p)
            if bound is None:
                sigma[p] = s
            elif bound != s:
                return None
        elif isinstance(s, Var) or p.sym != s.sym:
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return sigma


def occurs(x: Var, t: Term) -> bool:
    return any(s == x for _, s in iter_positions(t))


def unify(s: Term, t: Term) -> Optional[Substitution]:
    """Idempotent most general unifier of ``s`` and ``t``, or None."""
    sigma: Substitution = {}

    def walk(u):
        while isinstance(u, Var) and u in sigma:
            u = sigma[u]
        return u

    def resolve(u):
        u = walk(u)
        if isinstance(u, Var) or not u.args:
            return u
        return App(u.sym, [resolve(a) for a in u.args])

    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a), walk(b)
        if a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            if a.sort != b.sort:
                return None
            if occurs(a, resolve(b)):
                return None
            sigma[a] = b
        elif a.sym != b.sym:
            return None
        else:
            stack.extend(zip(a.args, b.args))
    return {x: resolve(v) for x, v in sigma.items()}


_fresh_counter = itertools.count()


def fresh_var(sort: Sort, avoid: Iterable = (), base: str = "x") -> Var:
    names = {v.name if isinstance(v, Var) else v for v in avoid}
    while True:
        name = f"{base}_{next(_fresh_counter)}"
        if name not in names:
            return Var(name, sort)


def rename_apart(t, avoid: Iterable = ()):
    """Return a variant of ``t`` (a term or tuple of terms sharing variables)
    whose variables are disjoint from ``avoid``.

    ``avoid`` may contain variables or plain names.
    """
    terms = t if isinstance(t, tuple) else (t,)
    avoid_names = {v.name if isinstance(v, Var) else v for v in avoid}
    seen = []
    for u in terms:
        for v in variables(u):
            if v not in seen:
                seen.append(v)
    used = set(avoid_names) | {v.name for v in seen}
    sigma = {}
    for v in seen:
        base = v.name.split("_")[0] or "x"
        i = 0
        while f"{base}{i}" in used:
            i += 1
        name = f"{base}{i}"
        used.add(name)
        sigma[v] = Var(name, v.sort)
    out = tuple(apply(sigma, u) for u in terms)
    return out if isinstance(t, tuple) else out[0]


def canonical_vars(terms: Tuple[Term, ...]) -> Tuple[Term, ...]:
    """Rename variables to ``_0, _1, ...`` in order of first occurrence."""
    sigma = {}
    for u in terms:
        for v in variables(u):
            if v not in sigma:
                sigma[v] = Var(f"_{len(sigma)}", v.sort)
    return tuple(apply(sigma, u) for u in terms)


# ---------------------------------------------------------------------------
# Signatures


class Signature:
    """Sorts plus typed function symbols, keyed by name."""

    def __init__(self, sorts: Iterable[Sort], symbols: Iterable[FunSym] = ()):
        self.sorts: Tuple[Sort, ...] = tuple(dict.fromkeys(sorts))
        self.symbols: Dict[str, FunSym] = {}
        for f in symbols:
            self.add(f)

    def add(self, f: FunSym) -> FunSym:
        if f.name in self.symbols and self.symbols[f.name] != f:
            raise SortError(f"symbol {f.name} declared twice with different types")
        for s in f.arg_sorts + (f.sort,):
            if s not in self.sorts:
                raise SortError(f"symbol {f.name} uses undeclared sort {s}")
        self.symbols[f.name] = f
        return f

    def __getitem__(self, name: str) -> FunSym:
        return self.symbols[name]

    def __contains__(self, name) -> bool:
        return name in self.symbols

    def __iter__(self):
        return iter(self.symbols.values())

    def __len__(self):
        return len(self.symbols)

    def of_sort(self, sort: Sort) -> list:
        return [f for f in self.symbols.values() if f.sort == sort]

    def extend(self, sorts: Iterable[Sort] = (), symbols: Iterable[FunSym] = ()) -> "Signature":
        return Signature(self.sorts + tuple(sorts), list(self) + list(symbols))

    def check_term(self, t: Term) -> None:
        for _, s in iter_positions(t):
            if isinstance(s, App):
                if self.symbols.get(s.name) != s.sym:
                    raise SortError(f"symbol {s.name} is not in the signature")
            elif s.sort not in self.sorts:
                raise SortError(f"variable {s.name} has undeclared sort {s.sort}")
            elif s.name in self.symbols:
                raise SortError(f"variable {s.name} clashes with a function symbol")

    def __eq__(self, other):
        return (
            isinstance(other, Signature)
            and set(self.sorts) == set(other.sorts)
            and self.symbols == other.symbols
        )

    def __repr__(self):
        return f"Signature(sorts={list(self.sorts)}, symbols={list(self.symbols)})"


def const(sym: FunSym) -> App:
    return App(sym, ())


def flat(sym: FunSym, avoid: Iterable = ()) -> App:
    """``sym(x1, ..., xn)`` with pairwise distinct fresh variables."""
    avoid = set(avoid)
    args = []
    for s in sym.arg_sorts:
        v = fresh_var(s, avoid)
        avoid.add(v)
        args.append(v)
    return App(sym, args)
