"""Concrete syntax: tokenizer, recursive-descent parser and printer.

Grammar (tightest binding first)::

    unary   ~ <> [] A E D  E>=n E<=n E=n  @[phi]  @'i
    binary  &   then   |   then   ->  (right associative)

Atoms are ``[a-z][a-z0-9_]*``; nominals carry a leading apostrophe; the
constants are ``true`` and ``false``.  ``&`` and ``|`` associate to the left.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    And, Bot, Box, CountEQ, CountGE, CountLE, DD, Diamond, Diff, Formula,
    Implies, NomAtom, Not, Or, PropAtom, SatOp, Somewhere, Top, Univ,
)

__all__ = ["ParseError", "parse", "to_text", "IDENT"]

IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    pos: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<count>E(?P<cop>>=|<=|=)(?P<num>[0-9]+)?)
  | (?P<arrow>->)
  | (?P<dia><>)
  | (?P<box>\[\])
  | (?P<nom>'[a-z][a-z0-9_]*)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<op>[A-Z])
  | (?P<punct>[()~&|@\[\]])
""", re.VERBOSE)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "ws":
            pass
        elif m.group("count") is not None:
            if m.group("num") is None:
                raise ParseError(f"counting operator E{m.group('cop')} needs a number", pos)
            tokens.append(Token("count", (m.group("cop"), int(m.group("num"))), pos))
        elif kind == "arrow":
            tokens.append(Token("->", None, pos))
        elif kind == "dia":
            tokens.append(Token("<>", None, pos))
        elif kind == "box":
            tokens.append(Token("[]", None, pos))
        elif kind == "nom":
            tokens.append(Token("nom", m.group("nom")[1:], pos))
        elif kind == "ident":
            word = m.group("ident")
            if word in ("true", "false"):
                tokens.append(Token(word, None, pos))
            else:
                tokens.append(Token("atom", word, pos))
        elif kind == "op":
            letter = m.group("op")
            if letter not in "AED":
                raise ParseError(f"unknown token {letter!r}", pos)
            tokens.append(Token(letter, None, pos))
        else:
            tokens.append(Token(m.group("punct"), None, pos))
        pos = m.end()
    tokens.append(Token("eof", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {_describe(tok)}", tok.pos)
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.next()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek().kind == "|":
            self.next()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek().kind == "&":
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.next()
        k = tok.kind
        if k == "~":
            return Not(self.unary())
        if k == "<>":
            return Diamond(self.unary())
        if k == "[]":
            return Box(self.unary())
        if k == "A":
            return Univ(self.unary())
        if k == "E":
            return Somewhere(self.unary())
        if k == "D":
            return Diff(self.unary())
        if k == "count":
            op, n = tok.value
            cls = {">=": CountGE, "<=": CountLE, "=": CountEQ}[op]
            return cls(n, self.unary())
        if k == "@":
            nxt = self.next()
            if nxt.kind == "nom":
                return SatOp(nxt.value, self.unary())
            if nxt.kind == "[":
                desc = self.formula()
                self.expect("]")
                return DD(desc, self.unary())
            raise ParseError(f"expected '[' or nominal after '@', found {_describe(nxt)}",
                             nxt.pos)
        if k == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if k == "atom":
            return PropAtom(tok.value)
        if k == "nom":
            return NomAtom(tok.value)
        if k == "true":
            return Top()
        if k == "false":
            return Bot()
        raise ParseError(f"unexpected {_describe(tok)}", tok.pos)


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.kind)


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula; raises :class:`ParseError`."""
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {_describe(tok)}", tok.pos)
    return f


# -- printing ----------------------------------------------------------------

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _prec(f: Formula) -> int:
    if isinstance(f, Implies):
        return _PREC_IMP
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_UNARY


def _wrap(f: Formula, need: int) -> str:
    s = to_text(f)
    return f"({s})" if _prec(f) < need else s


def to_text(f: Formula) -> str:
    """Canonical text; ``parse(to_text(f)) == f`` for every formula."""
    if isinstance(f, PropAtom):
        return f.name
    if isinstance(f, NomAtom):
        return "'" + f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Not):
        return "~" + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, Diamond):
        return "<>" + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, Box):
        return "[]" + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, Univ):
        return "A " + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, Somewhere):
        return "E " + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, Diff):
        return "D " + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, CountGE):
        return f"E>={f.n} " + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, CountLE):
        return f"E<={f.n} " + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, CountEQ):
        return f"E={f.n} " + _wrap(f.arg, _PREC_UNARY)
    if isinstance(f, DD):
        return f"@[{to_text(f.description)}] " + _wrap(f.body, _PREC_UNARY)
    if isinstance(f, SatOp):
        return f"@'{f.nominal} " + _wrap(f.body, _PREC_UNARY)
    if isinstance(f, And):
        return f"{_wrap(f.left, _PREC_AND)} & {_wrap(f.right, _PREC_AND + 1)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _PREC_OR)} | {_wrap(f.right, _PREC_OR + 1)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left, _PREC_IMP + 1)} -> {_wrap(f.right, _PREC_IMP)}"
    raise TypeError(f"not a formula: {f!r}")
