"""Semantic Logic rule bases: the DSL, its canonical rendering, quantization
of texts onto intuition symbols, and summary statistics.

File format (UTF-8, one statement per line)::

    # a comment: '#' followed by whitespace or end of line
    define #S = How(Ability(See(Unseen)))
    text #S: How do you observe something you can't see?

    theory Question-Theory:
        intuitions: Question, Abduction, P, Not
        fact: How is-a Question
        rule: Question(Ability($S)) ==> Abduction(P(Not($S)))
        rule[lift]: $A($B) And ($A is-a $C) ==> $C($B)
        rule: To-Feel ==> Cognition | Affection

``==>`` is the rule arrow. On either side a top-level ``And`` separates
conjuncts; on the conclusion side a top-level ``|`` separates alternatives,
each of which becomes its own rule with the same premises. Rule ids are
assigned 1, 2, ... in file order after that expansion.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from . import terms as T
from .errors import (
    CyclicBindingError,
    DSLSyntaxError,
    QuantizationError,
    RangeRestrictionError,
    UndeclaredSymbolError,
)
from .terms import Atom, Term

_COMMENT_RE = re.compile(r"(?:^|(?<=\s))#(?=\s|$)")
_THEORY_RE = re.compile(r"^theory\s+(?P<name>\S+?)\s*:\s*$")
_KEYWORD_RE = re.compile(r"^(?P<kw>intuitions|fact|rule)(?:\[(?P<tag>[^\]]*)\])?\s*:(?P<body>.*)$")
_DEFINE_RE = re.compile(r"^define\s+(?P<sym>\S+)\s*=(?!>)(?P<body>.*)$")
_TEXT_RE = re.compile(r"^text\s+(?P<sym>#\S+?)\s*:(?P<body>.*)$")
_WORD_RE = re.compile(r"[\w↑\-]+")


@dataclass(frozen=True)
class Rule:
    id: int
    theory: str
    premises: tuple
    conclusions: tuple
    tag: str | None = None

    def variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.premises:
            out |= T.variables(p)
        return out

    def __str__(self) -> str:
        tag = f"[{self.tag}]" if self.tag else ""
        return (
            f"rule{tag}: {T.render_conjuncts(self.premises)} ==> "
            f"{T.render_conjuncts(self.conclusions)}"
        )


@dataclass(frozen=True)
class Theory:
    name: str
    intuitions: tuple = ()
    rules: tuple = ()
    facts: tuple = ()


@dataclass(frozen=True)
class SemanticLogic:
    theories: tuple = ()
    bindings: dict = field(default_factory=dict)
    texts: dict = field(default_factory=dict)

    @property
    def rules(self) -> list[Rule]:
        return sorted((r for th in self.theories for r in th.rules), key=lambda r: r.id)

    @property
    def facts(self) -> list[Term]:
        return [f for th in self.theories for f in th.facts]

    def theory(self, name: str) -> Theory:
        for th in self.theories:
            if th.name == name:
                return th
        raise KeyError(name)

    def rule(self, rule_id: int) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def all_intuitions(self) -> set[str]:
        return {s for th in self.theories for s in th.intuitions}

    def expanded_bindings(self) -> dict[str, Term]:
        return expand_bindings(self.bindings)

    def expand(self, term: Term) -> Term:
        """Substitute text symbols by their (fully expanded) bindings."""
        return T.replace_atoms(term, self.expanded_bindings())

    def with_binding(self, symbol: str, term: Term) -> "SemanticLogic":
        if not T.is_text_symbol(symbol) or not T.is_symbol(symbol):
            raise DSLSyntaxError(f"binding target must be a #-symbol, got {symbol!r}")
        bindings = dict(self.bindings)
        bindings[symbol] = term
        expand_bindings(bindings)
        return SemanticLogic(self.theories, bindings, dict(self.texts))


@dataclass(frozen=True)
class LogicStats:
    theory_count: int = 0
    dependency_count: int = 0
    model_element_count: int = 0
    operator_count: int = 0
    rule_count: int = 0

    def as_tuple(self) -> tuple:
        return (
            self.theory_count,
            self.dependency_count,
            self.model_element_count,
            self.operator_count,
            self.rule_count,
        )


def expand_bindings(bindings: dict[str, Term]) -> dict[str, Term]:
    """Resolve bindings that mention other text symbols; reject cycles."""
    done: dict[str, Term] = {}

    def resolve(sym: str, trail: tuple) -> Term:
        if sym in done:
            return done[sym]
        if sym in trail:
            cycle = " -> ".join(trail + (sym,))
            raise CyclicBindingError(f"cyclic binding: {cycle}")
        term = bindings[sym]
        refs = {s for s in T.symbols(term) if s in bindings}
        mapping = {s: resolve(s, trail + (sym,)) for s in refs}
        done[sym] = T.replace_atoms(term, mapping)
        return done[sym]

    for sym in bindings:
        resolve(sym, ())
    return done


def logic_id(logic: SemanticLogic) -> str:
    return hashlib.sha256(render_logic(logic).encode("utf-8")).hexdigest()[:16]


# --------------------------------------------------------------------------
# parsing


def _strip_comment(line: str) -> str:
    m = _COMMENT_RE.search(line)
    return line[: m.start()] if m else line


class _Builder:
    def __init__(self, name: str):
        self.name = name
        self.intuitions: list[str] = []
        self.rules: list[Rule] = []
        self.facts: list[Term] = []

    def build(self) -> Theory:
        return Theory(self.name, tuple(self.intuitions), tuple(self.rules), tuple(self.facts))


def parse_logic(source: str, strict: bool = False) -> SemanticLogic:
    """Parse DSL text into a :class:`SemanticLogic`.

    With ``strict`` every symbol used by a theory's rules and facts must be
    declared as an intuition of some theory.
    """
    theories: list[_Builder] = []
    bindings: dict[str, Term] = {}
    texts: dict[str, str] = {}
    text_lines: dict[str, int] = {}
    next_id = 1

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = _strip_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())

        m = _THEORY_RE.match(stripped)
        if m:
            name = m.group("name")
            if not T.is_symbol(name):
                raise DSLSyntaxError(f"bad theory name {name!r}", lineno, indent + 1)
            if any(b.name == name for b in theories):
                raise DSLSyntaxError(f"duplicate theory {name!r}", lineno, indent + 1)
            theories.append(_Builder(name))
            continue

        m = _DEFINE_RE.match(stripped)
        if m:
            sym = m.group("sym")
            if not (T.is_text_symbol(sym) and T.is_symbol(sym)):
                raise DSLSyntaxError(
                    f"define target must be a #-symbol, got {sym!r}", lineno, indent + 8
                )
            if sym in bindings:
                raise DSLSyntaxError(f"duplicate define {sym}", lineno, indent + 1)
            term = T.parse_term(m.group("body"), lineno, indent + m.start("body"))
            if not T.is_ground(term):
                raise DSLSyntaxError(f"binding {sym} contains variables", lineno, indent + 1)
            bindings[sym] = term
            continue

        m = _TEXT_RE.match(stripped)
        if m:
            sym = m.group("sym")
            body = m.group("body").strip()
            if not body:
                raise DSLSyntaxError("empty text", lineno, indent + m.start("body") + 1)
            texts[sym] = body
            text_lines[sym] = lineno
            continue

        m = _KEYWORD_RE.match(stripped)
        if not m and theories and "==>" not in stripped:
            # a bare ground term inside a theory is a fact
            try:
                term = T.parse_term(stripped, lineno, indent)
            except DSLSyntaxError:
                term = None
            if term is not None and T.is_ground(term):
                theories[-1].facts.append(term)
                continue
        if not m:
            raise DSLSyntaxError(f"unrecognized statement: {stripped!r}", lineno, indent + 1)
        if not theories:
            raise DSLSyntaxError(f"{m.group('kw')} outside of a theory", lineno, indent + 1)
        cur = theories[-1]
        kw, tag, body = m.group("kw"), m.group("tag"), m.group("body")
        body_col = indent + m.start("body")
        if tag is not None and kw != "rule":
            raise DSLSyntaxError("only rules take a tag", lineno, indent + 1)

        if kw == "intuitions":
            for part in body.split(","):
                sym = part.strip()
                if not (T.is_symbol(sym) or re.fullmatch(r"[<>=!~&*+/^%]+|\?", sym)):
                    raise DSLSyntaxError(f"bad intuition symbol {sym!r}", lineno, body_col + 1)
                if sym not in cur.intuitions:
                    cur.intuitions.append(sym)
        elif kw == "fact":
            term = T.parse_term(body, lineno, body_col)
            if not T.is_ground(term):
                raise DSLSyntaxError("facts must be ground", lineno, body_col + 1)
            cur.facts.append(term)
        else:
            if tag is not None and not T.is_symbol(tag.strip()):
                raise DSLSyntaxError(f"bad rule tag {tag!r}", lineno, indent + 6)
            lhs, sep, rhs = body.partition("==>")
            if not sep:
                raise DSLSyntaxError("rule without '==>'", lineno, body_col + 1)
            rhs_col = body_col + len(lhs) + 3
            premises_alts = T.parse_conjuncts(lhs, lineno, body_col)
            if len(premises_alts) != 1:
                raise DSLSyntaxError("'|' is only allowed among conclusions", lineno, body_col + 1)
            premises = tuple(premises_alts[0])
            for alt in T.parse_conjuncts(rhs, lineno, rhs_col):
                rule = Rule(next_id, cur.name, premises, tuple(alt), tag.strip() if tag else None)
                _check_range(rule, lineno)
                cur.rules.append(rule)
                next_id += 1

    for sym, lineno in text_lines.items():
        if sym not in bindings:
            raise DSLSyntaxError(f"text for unbound symbol {sym}", lineno, 1)
    expand_bindings(bindings)
    logic = SemanticLogic(tuple(b.build() for b in theories), bindings, texts)
    if strict:
        check_declared(logic)
    return logic


def _check_range(rule: Rule, lineno: int = 0) -> None:
    bound = rule.variables()
    for c in rule.conclusions:
        free = T.variables(c) - bound
        if free:
            names = ", ".join("$" + v for v in sorted(free))
            where = f"line {lineno}: " if lineno else ""
            raise RangeRestrictionError(
                f"{where}conclusion variable(s) {names} do not occur in the premises"
            )


def check_declared(logic: SemanticLogic) -> None:
    """Raise if a rule or fact uses a symbol no theory declares."""
    known = logic.all_intuitions() | {T.AND, T.QUESTION} | set(logic.bindings)
    for th in logic.theories:
        used: set[str] = set()
        for f in th.facts:
            used |= T.symbols(f)
        for r in th.rules:
            for t in r.premises + r.conclusions:
                used |= T.symbols(t)
        missing = sorted(used - known)
        if missing:
            raise UndeclaredSymbolError(
                f"theory {th.name} uses undeclared symbol(s): {', '.join(missing)}"
            )


def load_logic(path, strict: bool = False) -> SemanticLogic:
    with open(path, encoding="utf-8") as fh:
        return parse_logic(fh.read(), strict=strict)


# --------------------------------------------------------------------------
# rendering


def render_logic(logic: SemanticLogic) -> str:
    lines: list[str] = []
    for sym, term in logic.bindings.items():
        lines.append(f"define {sym} = {T.render_term(term)}")
    for sym, txt in logic.texts.items():
        lines.append(f"text {sym}: {txt}")
    for th in logic.theories:
        if lines:
            lines.append("")
        lines.append(f"theory {th.name}:")
        if th.intuitions:
            lines.append(f"    intuitions: {', '.join(th.intuitions)}")
        for f in th.facts:
            lines.append(f"    fact: {T.render_term(f)}")
        for r in sorted(th.rules, key=lambda r: r.id):
            lines.append(f"    {r}")
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------------------
# quantization and statistics


def _normalize_text(s: str) -> str:
    return " ".join(s.split()).casefold()


def quantize_text(text: str, logic: SemanticLogic) -> list[Term]:
    """Initial working memory for ``text``.

    ``text`` may be a text symbol (``#S``), a sentence registered with a
    ``text`` statement, or free text whose words name intuition symbols.
    The result is the text's terms followed by every theory fact, with text
    symbols expanded and duplicates removed.
    """
    expanded = logic.expanded_bindings()
    key = text.strip()
    if key not in expanded:
        norm = _normalize_text(key)
        key = next((s for s, t in logic.texts.items() if _normalize_text(t) == norm), None)

    found: list[Term] = []
    if key is not None:
        found.append(expanded[key])
    else:
        by_fold = {}
        for th in logic.theories:
            for sym in th.intuitions:
                by_fold.setdefault(sym.casefold(), sym)
        for word in _WORD_RE.findall(text):
            sym = by_fold.get(word.casefold())
            if sym is not None:
                found.append(Atom(sym))
    if not found:
        raise QuantizationError(
            f"text {text!r} has no binding and mentions no intuition symbol"
        )
    out: list[Term] = []
    for t in found + [T.replace_atoms(f, expanded) for f in logic.facts]:
        if t not in out:
            out.append(t)
    return out


def _theory_symbols(th: Theory) -> set[str]:
    used: set[str] = set()
    for f in th.facts:
        used |= T.symbols(f)
    for r in th.rules:
        for t in r.premises + r.conclusions:
            used |= T.symbols(t)
    return used


def _theory_operators(th: Theory) -> set[str]:
    ops: set[str] = set()
    for f in th.facts:
        ops |= T.operators(f)
    for r in th.rules:
        for t in r.premises + r.conclusions:
            ops |= T.operators(t)
    return ops


def logic_stats(logic: SemanticLogic) -> LogicStats:
    """Counts describing a rule base.

    * dependencies: ordered theory pairs (A, B), A != B, where a rule or fact
      of A mentions an intuition declared by B
    * operators: symbols used as infix operators, plus the ``?`` prefix
    * model elements: every other symbol that is declared or used, text
      symbols excluded
    """
    declared = {th.name: set(th.intuitions) for th in logic.theories}
    deps = set()
    all_syms: set[str] = set()
    ops: set[str] = set()
    for th in logic.theories:
        used = _theory_symbols(th)
        all_syms |= used | set(th.intuitions)
        ops |= _theory_operators(th)
        for other, intuitions in declared.items():
            if other != th.name and used & intuitions:
                deps.add((th.name, other))
    for term in logic.bindings.values():
        all_syms |= T.symbols(term)
        ops |= T.operators(term)
    elements = {s for s in all_syms - ops if not T.is_text_symbol(s)}
    return LogicStats(
        theory_count=len(logic.theories),
        dependency_count=len(deps),
        model_element_count=len(elements),
        operator_count=len(ops),
        rule_count=sum(len(th.rules) for th in logic.theories),
    )
