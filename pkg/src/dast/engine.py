"""Forward-chaining derivation of semantic lattices.

Rules fire in rounds. In each round every rule (ascending id) is matched
against a snapshot of working memory taken at the start of the round, so
terms produced in round k only become matchable in round k + 1. A premise
matches a memory term or any of its subterms. A firing creates a lattice
node only if it produces at least one term not already in memory; the node
records exactly those new terms. Derivation stops at the first round that
adds nothing.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from . import terms as T
from .errors import DerivationError, LimitExceeded
from .logic import Rule, SemanticLogic, logic_id as compute_logic_id
from .terms import Atom, Compound, Infix, Term, Var

AXIOM = "axiom"


@dataclass(frozen=True)
class DerivationLimits:
    max_iterations: int = 10000
    max_term_depth: int = 64

    def __post_init__(self):
        if self.max_iterations < 1 or self.max_term_depth < 1:
            raise ValueError("derivation limits must be positive")


@dataclass(frozen=True)
class LatticeNode:
    id: int
    level: int
    rule_id: Union[int, str]
    produced: tuple
    premises: tuple = ()

    @property
    def is_axiom(self) -> bool:
        return self.rule_id == AXIOM


@dataclass(frozen=True)
class Lattice:
    nodes: tuple
    text: str = ""
    logic_id: str = ""

    def node(self, node_id: int) -> LatticeNode:
        node = self.nodes[node_id - 1]
        assert node.id == node_id
        return node

    def successors(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            for p in n.premises:
                out[p].append(n.id)
        return out

    def maximal_nodes(self) -> list[LatticeNode]:
        succ = self.successors()
        return [n for n in self.nodes if not succ[n.id]]

    def axiom_terms(self) -> list[Term]:
        return [t for n in self.nodes if n.is_axiom for t in n.produced]

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "logic_id": self.logic_id,
            "nodes": [
                {
                    "id": n.id,
                    "level": n.level,
                    "rule": n.rule_id,
                    "terms": [T.render_term(t) for t in n.produced],
                    "premises": list(n.premises),
                }
                for n in self.nodes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        nodes = []
        for raw in data["nodes"]:
            nodes.append(
                LatticeNode(
                    id=int(raw["id"]),
                    level=int(raw["level"]),
                    rule_id=raw["rule"],
                    produced=tuple(T.parse_term(s) for s in raw["terms"]),
                    premises=tuple(int(p) for p in raw["premises"]),
                )
            )
        return cls(tuple(nodes), data.get("text", ""), data.get("logic_id", ""))

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        return cls.from_dict(json.loads(text))


class WorkingMemory:
    """Insertion-ordered set of ground terms, each tagged with the lattice
    node that produced it."""

    def __init__(self, terms: Iterable[Term] = ()):
        self._owner: dict[Term, int] = {}
        for t in terms:
            self.add(t, 0)

    def add(self, term: Term, node_id: int) -> bool:
        if term in self._owner:
            return False
        if not T.is_ground(term):
            raise DerivationError(f"working memory terms must be ground: {term}")
        self._owner[term] = node_id
        return True

    def owner(self, term: Term) -> int:
        return self._owner[term]

    def items(self) -> list[tuple[Term, int]]:
        return list(self._owner.items())

    def __contains__(self, term) -> bool:
        return term in self._owner

    def __iter__(self) -> Iterator[Term]:
        return iter(self._owner)

    def __len__(self) -> int:
        return len(self._owner)


# --------------------------------------------------------------------------
# matching


def _shape_keys(t: Term) -> list[tuple]:
    if isinstance(t, Atom):
        return [("a", t.name)]
    if isinstance(t, Compound):
        return [("c", t.head.name, len(t.args)), ("c*", len(t.args))]
    if isinstance(t, Infix):
        return [("i", t.op)]
    return []


def _pattern_key(p: Term) -> tuple | None:
    if isinstance(p, Var):
        return None
    if isinstance(p, Compound) and isinstance(p.head, Var):
        return ("c*", len(p.args))
    return _shape_keys(p)[0]


class _Index:
    """Subterm occurrences of a memory snapshot, grouped by shape."""

    def __init__(self, items: Iterable[tuple[Term, int]]):
        self.all: list[tuple[Term, int]] = []
        self.by_key: dict[tuple, list[tuple[Term, int]]] = defaultdict(list)
        for term, owner in items:
            for st in T.subterms(term):
                self.all.append((st, owner))
                for k in _shape_keys(st):
                    self.by_key[k].append((st, owner))

    def candidates(self, pattern: Term) -> list[tuple[Term, int]]:
        key = _pattern_key(pattern)
        return self.all if key is None else self.by_key.get(key, [])


def _joint_matches(premises: tuple, index: _Index) -> list[tuple[dict, tuple]]:
    out: list[tuple[dict, tuple]] = []

    def rec(i: int, sub: dict, sources: tuple) -> None:
        if i == len(premises):
            out.append((sub, sources))
            return
        for st, owner in index.candidates(premises[i]):
            extended = T.match_term(premises[i], st, sub)
            if extended is not None:
                rec(i + 1, extended, sources + (owner,))

    rec(0, {}, ())
    return out


def match(pattern: Term, memory) -> list[dict]:
    """All substitutions making ``pattern`` equal to a memory term or one of
    its subterms, in memory order then pre-order subterm order."""
    items = memory.items() if isinstance(memory, WorkingMemory) else [(t, 0) for t in memory]
    out: list[dict] = []
    for sub, _ in _joint_matches((pattern,), _Index(items)):
        if sub not in out:
            out.append(sub)
    return out


def apply_rule(rule: Rule, sub) -> list[Term]:
    out = []
    for c in rule.conclusions:
        try:
            out.append(T.substitute(c, sub))
        except KeyError as exc:
            raise DerivationError(f"rule {rule.id}: unbound variable ${exc.args[0]}") from None
        except TypeError as exc:
            raise DerivationError(f"rule {rule.id}: {exc}") from None
    return out


# --------------------------------------------------------------------------
# derivation


def _expand_rule(rule: Rule, logic: SemanticLogic) -> Rule:
    if not logic.bindings:
        return rule
    return Rule(
        rule.id,
        rule.theory,
        tuple(logic.expand(p) for p in rule.premises),
        tuple(logic.expand(c) for c in rule.conclusions),
        rule.tag,
    )


def derive(
    initial: Iterable[Term],
    logic: SemanticLogic,
    limits: DerivationLimits | None = None,
    text: str = "",
) -> Lattice:
    """Saturate ``initial`` under the rules of ``logic``.

    Raises :class:`LimitExceeded` (carrying the partial lattice) when the
    round count exceeds ``max_iterations`` or a produced term is deeper than
    ``max_term_depth``.
    """
    limits = limits or DerivationLimits()
    initial = list(initial)
    if not initial:
        raise DerivationError("derivation needs at least one initial term")
    lid = compute_logic_id(logic)
    rules = [_expand_rule(r, logic) for r in logic.rules]

    memory = WorkingMemory()
    nodes: list[LatticeNode] = []

    def lattice() -> Lattice:
        return Lattice(tuple(nodes), text, lid)

    for t in initial:
        if not T.is_ground(t):
            raise DerivationError(f"initial term is not ground: {T.render_term(t)}")
        if t not in memory:
            node = LatticeNode(len(nodes) + 1, 1, AXIOM, (t,), ())
            nodes.append(node)
            memory.add(t, node.id)

    rounds = 0
    while True:
        rounds += 1
        if rounds > limits.max_iterations:
            raise LimitExceeded(
                f"no fixpoint after {limits.max_iterations} rounds", lattice()
            )
        index = _Index(memory.items())
        grew = False
        for rule in rules:
            for sub, sources in _joint_matches(rule.premises, index):
                produced: list[Term] = []
                for c in apply_rule(rule, sub):
                    if c not in memory and c not in produced:
                        produced.append(c)
                if not produced:
                    continue
                for c in produced:
                    if T.depth(c) > limits.max_term_depth:
                        raise LimitExceeded(
                            f"rule {rule.id} produced a term deeper than "
                            f"{limits.max_term_depth}",
                            lattice(),
                        )
                premises = tuple(dict.fromkeys(sources))
                level = 1 + max(nodes[p - 1].level for p in premises)
                node = LatticeNode(len(nodes) + 1, level, rule.id, tuple(produced), premises)
                nodes.append(node)
                for c in produced:
                    memory.add(c, node.id)
                grew = True
        if not grew:
            return lattice()


def lattice_terms(lattice: Lattice) -> set[Term]:
    return {t for n in lattice.nodes for t in n.produced}


def ordered_terms(lattice: Lattice) -> list[Term]:
    """Closure terms in production order (the "deductions" listing)."""
    return [t for n in lattice.nodes for t in n.produced]
