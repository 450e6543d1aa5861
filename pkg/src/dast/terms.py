"""Symbolic terms and the term grammar.

A term is one of

* ``Atom``      a symbol such as ``See`` or ``#S``
* ``Var``       a meta-variable, written ``$A``
* ``Compound``  ``head(arg, ...)``; the head is an atom or a variable
* ``Infix``     ``left op right`` with ``op`` a symbol (``is-a``, ``<>``, ``=>``, ...)

Grammar (whitespace insensitive)::

    expr     := operand (OP operand)*
    operand  := '?' operand | primary
    primary  := IDENT [ '(' expr (',' expr)* ')' ]
              | VAR   [ '(' expr (',' expr)* ')' ]
              | '(' expr ')'
    OP       := IDENT | SYMBOLIC

Infix operators have no precedence among themselves. An expression holding
more than one operator must use parentheses, except for chains of ``And``
which associate to the left. ``?x`` is sugar for the compound ``?(x)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .errors import DSLSyntaxError

AND = "And"
QUESTION = "?"

_IDENT_BODY = r"[\w↑][\w↑\-]*"
IDENT_RE = re.compile(rf"#?{_IDENT_BODY}")

_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<arrow>==>)
  | (?P<var>\${_IDENT_BODY})
  | (?P<ident>\#?{_IDENT_BODY})
  | (?P<symop>[<>=!~&*+/^%]+)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<pipe>\|)
  | (?P<qmark>\?)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "$" + self.name


@dataclass(frozen=True)
class Compound:
    head: Union[Atom, Var]
    args: tuple

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True)
class Infix:
    op: str
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return render_term(self)


Term = Union[Atom, Var, Compound, Infix]
Substitution = Mapping[str, Term]


def is_symbol(name: str) -> bool:
    return bool(name) and IDENT_RE.fullmatch(name) is not None


def is_text_symbol(name: str) -> bool:
    return name.startswith("#")


# --------------------------------------------------------------------------
# rendering


def _wrap(t: Term) -> str:
    s = render_term(t)
    return f"({s})" if isinstance(t, Infix) else s


def render_term(t: Term) -> str:
    """Canonical text form; ``parse_term(render_term(t)) == t``."""
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Var):
        return "$" + t.name
    if isinstance(t, Compound):
        head = render_term(t.head)
        return f"{head}({', '.join(render_term(a) for a in t.args)})"
    if isinstance(t, Infix):
        return f"{_wrap(t.left)} {t.op} {_wrap(t.right)}"
    raise TypeError(f"not a term: {t!r}")


# --------------------------------------------------------------------------
# structure helpers


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order, left-to-right walk over ``t`` and its argument terms.

    Compound heads and infix operators are symbols, not subterms.
    """
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Compound):
            stack.extend(reversed(cur.args))
        elif isinstance(cur, Infix):
            stack.append(cur.right)
            stack.append(cur.left)


def symbols(t: Term) -> set[str]:
    """Every symbol name mentioned in ``t`` (atoms, heads, operators)."""
    out: set[str] = set()
    for s in subterms(t):
        if isinstance(s, Atom):
            out.add(s.name)
        elif isinstance(s, Compound) and isinstance(s.head, Atom):
            out.add(s.head.name)
        elif isinstance(s, Infix):
            out.add(s.op)
    return out


def operators(t: Term) -> set[str]:
    out = set()
    for s in subterms(t):
        if isinstance(s, Infix):
            out.add(s.op)
        elif isinstance(s, Compound) and s.head == Atom(QUESTION):
            out.add(QUESTION)
    return out


def variables(t: Term) -> set[str]:
    out = set()
    for s in subterms(t):
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, Compound) and isinstance(s.head, Var):
            out.add(s.head.name)
    return out


def is_ground(t: Term) -> bool:
    return not variables(t)


def depth(t: Term) -> int:
    if isinstance(t, Compound):
        return 1 + max(depth(a) for a in t.args)
    if isinstance(t, Infix):
        return 1 + max(depth(t.left), depth(t.right))
    return 1


def substitute(t: Term, sub: Substitution) -> Term:
    """Instantiate ``t`` under ``sub``.

    Raises ``KeyError`` for an unbound variable and ``TypeError`` when a head
    variable is bound to something other than an atom.
    """
    if isinstance(t, Var):
        return sub[t.name]
    if isinstance(t, Atom):
        return t
    if isinstance(t, Compound):
        head = t.head
        if isinstance(head, Var):
            head = sub[head.name]
            if not isinstance(head, Atom):
                raise TypeError(
                    f"head variable ${t.head.name} bound to non-symbol {render_term(head)}"
                )
        return Compound(head, tuple(substitute(a, sub) for a in t.args))
    return Infix(t.op, substitute(t.left, sub), substitute(t.right, sub))


def replace_atoms(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace argument-position atoms named in ``mapping``."""
    if isinstance(t, Atom):
        return mapping.get(t.name, t)
    if isinstance(t, Compound):
        return Compound(t.head, tuple(replace_atoms(a, mapping) for a in t.args))
    if isinstance(t, Infix):
        return Infix(t.op, replace_atoms(t.left, mapping), replace_atoms(t.right, mapping))
    return t


def match_term(pattern: Term, term: Term, sub: dict | None = None) -> dict | None:
    """One-way match of ``pattern`` against the ground ``term``.

    Returns the extended substitution, or ``None`` if they do not match.
    The input substitution is never mutated.
    """
    sub = dict(sub) if sub else {}
    return sub if _match(pattern, term, sub) else None


def _bind(name: str, value: Term, sub: dict) -> bool:
    bound = sub.get(name)
    if bound is None:
        sub[name] = value
        return True
    return bound == value


def _match(p: Term, t: Term, sub: dict) -> bool:
    if isinstance(p, Var):
        return _bind(p.name, t, sub)
    if isinstance(p, Atom):
        return p == t
    if isinstance(p, Compound):
        if not isinstance(t, Compound) or len(p.args) != len(t.args):
            return False
        if isinstance(p.head, Var):
            if not _bind(p.head.name, t.head, sub):
                return False
        elif p.head != t.head:
            return False
        return all(_match(pa, ta, sub) for pa, ta in zip(p.args, t.args))
    if isinstance(p, Infix):
        return (
            isinstance(t, Infix)
            and p.op == t.op
            and _match(p.left, t.left, sub)
            and _match(p.right, t.right, sub)
        )
    return False


# --------------------------------------------------------------------------
# parsing


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, col_offset: int = 0, line: int = 0) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLSyntaxError(
                f"unexpected character {text[pos]!r}", line, col_offset + pos + 1
            )
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), col_offset + pos + 1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[Token], line: int, end_col: int):
        self.tokens = tokens
        self.i = 0
        self.line = line
        self.end_col = end_col

    def error(self, msg: str, tok: Token | None = None):
        col = tok.col if tok else self.end_col
        return DSLSyntaxError(msg, self.line, col)

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.error(f"expected {kind}", tok)
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def expr(self, split_and: bool) -> Term:
        first = self.peek()
        operands = [self.operand()]
        ops: list[Token] = []
        while True:
            tok = self.peek()
            if tok is None or tok.kind not in ("ident", "symop"):
                break
            if split_and and tok.text == AND:
                break
            if tok.text.startswith("#"):
                raise self.error(f"text symbol {tok.text} cannot be an operator", tok)
            self.i += 1
            ops.append(tok)
            operands.append(self.operand())
        if not ops:
            return operands[0]
        if len(ops) > 1 and any(o.text != AND for o in ops):
            raise self.error(
                "operators have no precedence; add parentheses", ops[1] if ops else first
            )
        acc = operands[0]
        for op, rhs in zip(ops, operands[1:]):
            acc = Infix(op.text, acc, rhs)
        return acc

    def operand(self) -> Term:
        tok = self.peek()
        if tok is not None and tok.kind == "qmark":
            self.i += 1
            return Compound(Atom(QUESTION), (self.operand(),))
        return self.primary()

    def primary(self) -> Term:
        tok = self.next()
        if tok.kind == "lparen":
            inner = self.expr(split_and=False)
            self.expect("rparen")
            return inner
        if tok.kind in ("ident", "var"):
            base: Union[Atom, Var] = Atom(tok.text) if tok.kind == "ident" else Var(tok.text[1:])
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lparen":
                self.i += 1
                args = [self.expr(split_and=False)]
                while self.peek() is not None and self.peek().kind == "comma":
                    self.i += 1
                    args.append(self.expr(split_and=False))
                self.expect("rparen")
                return Compound(base, tuple(args))
            return base
        raise self.error(f"unexpected {tok.text!r}", tok)


def _parser(text: str, line: int, col: int) -> _Parser:
    toks = tokenize(text, col, line)
    return _Parser(toks, line, col + len(text.rstrip()) + 1)


def parse_term(text: str, line: int = 0, col: int = 0) -> Term:
    """Parse a single term; a top-level ``And`` builds an infix term."""
    p = _parser(text, line, col)
    if p.at_end():
        raise p.error("empty term")
    t = p.expr(split_and=False)
    if not p.at_end():
        raise p.error(f"unexpected {p.peek().text!r}", p.peek())
    return t


def parse_conjuncts(text: str, line: int = 0, col: int = 0) -> list[list[Term]]:
    """Parse ``t1 And t2 | t3 And t4`` into alternatives of conjunct lists.

    Top-level ``And`` separates conjuncts and top-level ``|`` separates
    alternatives; both only act outside parentheses.
    """
    p = _parser(text, line, col)
    if p.at_end():
        raise p.error("empty side")
    alts: list[list[Term]] = [[]]
    while True:
        alts[-1].append(p.expr(split_and=True))
        tok = p.peek()
        if tok is None:
            break
        if tok.kind == "ident" and tok.text == AND:
            p.i += 1
        elif tok.kind == "pipe":
            p.i += 1
            alts.append([])
        else:
            raise p.error(f"unexpected {tok.text!r}", tok)
        if p.at_end():
            raise p.error("dangling separator", tok)
    return alts


def render_conjuncts(terms) -> str:
    """Inverse of a single alternative of ``parse_conjuncts``."""
    parts = []
    for t in terms:
        s = render_term(t)
        parts.append(f"({s})" if isinstance(t, Infix) and t.op == AND else s)
    return f" {AND} ".join(parts)
