"""Text format for pattern systems, and TPDB export.

Grammar (``;``-terminated statements, ``#`` starts a comment)::

    sorts Nat NatList ;
    fun cons : Nat NatList -> NatList ;
    var x y : Nat ;
    rule inf(x) -> cons(x, inf(s(x))) ;
    pattern < cons(x, cons(y, inf(z))), 2.2, h > ;

Positions are ``e`` (the root) or dot-separated 1-based indices.  Without a
``sorts`` statement a single implicit sort ``S`` is used and undeclared
function symbols get their arity from their first use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .patterns import ForbiddenPattern, Mode, PatternSystem
from .rewriting import TRS, Rule, RuleError
from .terms import (
    App,
    FunSym,
    PositionError,
    Signature,
    SortError,
    Term,
    Var,
    apply,
    format_pos,
    parse_pos,
    variables,
)

IMPLICIT_SORT = "S"

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<arrow>->)|(?P<punct>[(),;<>:])|(?P<name>[A-Za-z0-9_'.]+)"
)


class SystemSyntaxError(ValueError):
    """Parse failure; ``kind`` is one of ``syntax-error``, ``unknown-symbol``,
    ``sort-mismatch``, ``pattern-position-invalid``."""

    def __init__(self, kind: str, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{kind}: {message}")
        self.kind = kind
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SystemSyntaxError(
                "syntax-error", f"unexpected character {text[pos]!r}", line, pos - start + 1
            )
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    return out


class _Stream:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("", "", 0, 0)
            raise SystemSyntaxError("syntax-error", "unexpected end of input", last.line, last.col)
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise SystemSyntaxError(
                "syntax-error", f"expected {text!r}, found {tok.text!r}", tok.line, tok.col
            )
        return tok

    def name(self) -> Token:
        tok = self.next()
        if tok.kind != "name":
            raise SystemSyntaxError(
                "syntax-error", f"expected a name, found {tok.text!r}", tok.line, tok.col
            )
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text


class _Scope:
    """Signature and variable declarations used while reading terms."""

    def __init__(self, signature: Signature, vars: Dict[str, Var], implicit: bool):
        self.signature = signature
        self.vars = vars
        self.implicit = implicit

    def term(self, ts: _Stream) -> Term:
        tok = ts.name()
        if tok.text in self.vars and not ts.at("("):
            return self.vars[tok.text]
        args = []
        if ts.at("("):
            ts.next()
            if not ts.at(")"):
                args.append(self.term(ts))
                while ts.at(","):
                    ts.next()
                    args.append(self.term(ts))
            ts.expect(")")
        sym = self.signature.symbols.get(tok.text)
        if sym is None:
            if not self.implicit:
                raise SystemSyntaxError(
                    "unknown-symbol", f"unknown symbol {tok.text!r}", tok.line, tok.col
                )
            sym = self.signature.add(
                FunSym(tok.text, (IMPLICIT_SORT,) * len(args), IMPLICIT_SORT)
            )
        try:
            return App(sym, args)
        except SortError as e:
            raise SystemSyntaxError("sort-mismatch", str(e), tok.line, tok.col) from None


def _statements(tokens: List[Token]) -> List[List[Token]]:
    stmts, cur = [], []
    for tok in tokens:
        if tok.text == ";":
            if not cur:
                raise SystemSyntaxError("syntax-error", "empty statement", tok.line, tok.col)
            stmts.append(cur)
            cur = []
        else:
            cur.append(tok)
    if cur:
        raise SystemSyntaxError("syntax-error", "missing ';'", cur[-1].line, cur[-1].col)
    return stmts


_KEYWORDS = ("sorts", "fun", "var", "rule", "pattern")


def _declarations(stmts) -> Tuple[Signature, Dict[str, Var], bool]:
    sorts: List[str] = []
    implicit = not any(s[0].text == "sorts" for s in stmts)
    if implicit:
        sorts = [IMPLICIT_SORT]
    for st in stmts:
        if st[0].text not in _KEYWORDS:
            raise SystemSyntaxError(
                "syntax-error", f"unknown statement {st[0].text!r}", st[0].line, st[0].col
            )
        if st[0].text == "sorts":
            ts = _Stream(st[1:])
            if ts.peek() is None:
                raise SystemSyntaxError("syntax-error", "empty sorts statement", st[0].line, st[0].col)
            while ts.peek() is not None:
                sorts.append(ts.name().text)
    signature = Signature(sorts)

    def sort_name(tok):
        if tok.kind != "name" or tok.text not in signature.sorts:
            raise SystemSyntaxError("sort-mismatch", f"unknown sort {tok.text!r}", tok.line, tok.col)
        return tok.text

    vars: Dict[str, Var] = {}
    for st in stmts:
        ts = _Stream(st[1:])
        if st[0].text == "fun":
            name = ts.name()
            ts.expect(":")
            args = []
            while not ts.at("->"):
                args.append(sort_name(ts.next()))
            ts.expect("->")
            result = sort_name(ts.next())
            if ts.peek() is not None:
                tok = ts.peek()
                raise SystemSyntaxError("syntax-error", "trailing tokens", tok.line, tok.col)
            try:
                signature.add(FunSym(name.text, tuple(args), result))
            except SortError as e:
                raise SystemSyntaxError("sort-mismatch", str(e), name.line, name.col) from None
        elif st[0].text == "var":
            names = []
            while ts.peek() is not None and not ts.at(":"):
                tok = ts.next()
                if tok.text == ",":
                    continue
                if tok.kind != "name":
                    raise SystemSyntaxError("syntax-error", f"unexpected {tok.text!r}", tok.line, tok.col)
                names.append(tok)
            if ts.at(":"):
                ts.next()
                sort = sort_name(ts.next())
            elif implicit:
                sort = IMPLICIT_SORT
            else:
                raise SystemSyntaxError("syntax-error", "variable needs a sort", st[0].line, st[0].col)
            for tok in names:
                if tok.text in vars and vars[tok.text].sort != sort:
                    raise SystemSyntaxError(
                        "sort-mismatch", f"variable {tok.text} redeclared", tok.line, tok.col
                    )
                vars[tok.text] = Var(tok.text, sort)
    for name, v in vars.items():
        if name in signature:
            raise SystemSyntaxError("syntax-error", f"{name} declared as variable and symbol")
    return signature, vars, implicit


def parse_system(text: str) -> PatternSystem:
    stmts = _statements(tokenize(text))
    signature, vars, implicit = _declarations(stmts)
    scope = _Scope(signature, vars, implicit)
    rules: List[Rule] = []
    patterns: List[ForbiddenPattern] = []
    for st in stmts:
        head = st[0]
        ts = _Stream(st[1:])
        if head.text == "rule":
            lhs = scope.term(ts)
            ts.expect("->")
            rhs = scope.term(ts)
            try:
                rules.append(Rule(lhs, rhs))
            except SortError as e:
                raise SystemSyntaxError("sort-mismatch", str(e), head.line, head.col) from None
            except RuleError as e:
                raise SystemSyntaxError("syntax-error", str(e), head.line, head.col) from None
        elif head.text == "pattern":
            ts.expect("<")
            term = scope.term(ts)
            ts.expect(",")
            ptok = ts.name()
            ts.expect(",")
            mtok = ts.name()
            ts.expect(">")
            try:
                pos = parse_pos(ptok.text)
            except PositionError as e:
                raise SystemSyntaxError("syntax-error", str(e), ptok.line, ptok.col) from None
            if mtok.text not in ("h", "b", "a"):
                raise SystemSyntaxError(
                    "syntax-error", f"mode must be h, b or a, not {mtok.text!r}", mtok.line, mtok.col
                )
            try:
                patterns.append(ForbiddenPattern(term, pos, Mode(mtok.text)))
            except PositionError as e:
                raise SystemSyntaxError(
                    "pattern-position-invalid", str(e), ptok.line, ptok.col
                ) from None
        else:
            continue
        if ts.peek() is not None:
            tok = ts.peek()
            raise SystemSyntaxError("syntax-error", f"unexpected {tok.text!r}", tok.line, tok.col)
    return PatternSystem(TRS(signature, rules), patterns)


def parse_term(text: str, sys: Union[PatternSystem, TRS, Signature], vars: Optional[Dict[str, Var]] = None) -> Term:
    """Read a term over the signature of ``sys``.

    ``vars`` defaults to the variables occurring in the rules and patterns.
    """
    signature = sys if isinstance(sys, Signature) else sys.signature
    if vars is None:
        vars = {}
        if not isinstance(sys, Signature):
            for v in _system_vars(sys):
                vars.setdefault(v.name, v)
    ts = _Stream(tokenize(text))
    t = _Scope(signature, vars, False).term(ts)
    if ts.peek() is not None:
        tok = ts.peek()
        raise SystemSyntaxError("syntax-error", f"unexpected {tok.text!r}", tok.line, tok.col)
    return t


# ---------------------------------------------------------------------------
# Printing


def _system_terms(sys) -> List[Term]:
    trs = sys.trs if isinstance(sys, PatternSystem) else sys
    out = [t for r in trs.rules for t in (r.lhs, r.rhs)]
    if isinstance(sys, PatternSystem):
        out += [p.term for p in sys.patterns]
    return out


def _system_vars(sys) -> List[Var]:
    seen = {}
    for t in _system_terms(sys):
        for v in variables(t):
            seen.setdefault(v, None)
    return list(seen)


def _unclash(sys, reserved: Iterable[str]) -> Dict[Var, Var]:
    """Renaming making variable names unique across sorts and distinct from
    ``reserved`` names."""
    reserved = set(reserved)
    used: Dict[str, str] = {}
    ren: Dict[Var, Var] = {}
    for v in _system_vars(sys):
        name = v.name
        if name in reserved or (name in used and used[name] != v.sort):
            base = f"{name}_{v.sort}"
            name = base
            i = 0
            while name in reserved or (name in used and used[name] != v.sort):
                i += 1
                name = f"{base}{i}"
        used[name] = v.sort
        if name != v.name:
            ren[v] = Var(name, v.sort)
    return ren


def print_system(sys: Union[PatternSystem, TRS]) -> str:
    trs = sys.trs if isinstance(sys, PatternSystem) else sys
    sig = trs.signature
    ren = _unclash(sys, sig.symbols)
    lines = [f"sorts {' '.join(sig.sorts)} ;"]
    for f in sig:
        lines.append(f"fun {f.name} : {' '.join(f.arg_sorts + ('->', f.sort))} ;".replace(":  ->", ": ->"))
    by_sort: Dict[str, List[str]] = {}
    for v in _system_vars(sys):
        w = ren.get(v, v)
        names = by_sort.setdefault(w.sort, [])
        if w.name not in names:
            names.append(w.name)
    for s in sig.sorts:
        if s in by_sort:
            lines.append(f"var {' '.join(sorted(by_sort[s]))} : {s} ;")
    for r in trs.rules:
        lines.append(f"rule {apply(ren, r.lhs)} -> {apply(ren, r.rhs)} ;")
    if isinstance(sys, PatternSystem):
        for p in sys.patterns:
            lines.append(f"pattern < {apply(ren, p.term)}, {format_pos(p.pos)}, {p.mode} > ;")
    return "\n".join(lines) + "\n"


class TPDBExportError(ValueError):
    pass


_TPDB_BAD = re.compile(r"[\s(),\"|\\]|->|==")
_TPDB_RENAME = {":": "cons"}


def export_tpdb(trs: Union[TRS, PatternSystem]) -> str:
    """Plain (unsorted) termination-problem format."""
    if isinstance(trs, PatternSystem):
        trs = trs.trs
    names = {}
    for f in trs.signature:
        name = _TPDB_RENAME.get(f.name, f.name)
        if not name or _TPDB_BAD.search(name):
            raise TPDBExportError(f"symbol name {f.name!r} cannot be written in TPDB format")
        names[f.name] = name
    if len(set(names.values())) != len(names):
        raise TPDBExportError("symbol names collide after sanitizing")
    ren = _unclash(trs, names.values())
    # sorts are erased, so one name per variable suffices
    vars_out: List[str] = []
    for v in _system_vars(trs):
        n = ren.get(v, v).name
        if _TPDB_BAD.search(n):
            raise TPDBExportError(f"variable name {n!r} cannot be written in TPDB format")
        if n not in vars_out:
            vars_out.append(n)

    def show(t: Term) -> str:
        if isinstance(t, Var):
            return ren.get(t, t).name
        name = names[t.name]
        if not t.args:
            return name
        return f"{name}({','.join(show(a) for a in t.args)})"

    body = "".join(f"  {show(r.lhs)} -> {show(r.rhs)}\n" for r in trs.rules)
    return f"(VAR {' '.join(sorted(vars_out))})\n(RULES\n{body})\n"
