"""Complexity values on semantic lattices.

Node values follow the product schema: an axiom node is worth 1 and any
other node is worth ``1 + prod(values of its premise nodes)``, so a linear
chain of N derivations ends at N + 1. A sentence's semantic point has one
dimension per selected node term; its overall complexity is the point's
Euclidean distance from the origin. DASTEX counts the theories a derivation
involves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

from . import terms as T
from .engine import Lattice
from .errors import DerivationError
from .logic import SemanticLogic, logic_id

SCHEMAS = ("product", "tagged")


@dataclass(frozen=True)
class ValueConfig:
    schema: str = "product"
    tag_weights: dict = field(default_factory=dict)
    log_base: float = 2.0

    def __post_init__(self):
        if self.schema not in SCHEMAS:
            raise ValueError(f"unknown schema {self.schema!r}; expected one of {SCHEMAS}")
        if any(w <= 0 for w in self.tag_weights.values()):
            raise ValueError("tag weights must be positive")
        if self.log_base <= 0 or self.log_base == 1:
            raise ValueError("log base must be positive and different from 1")


@dataclass(frozen=True)
class DimensionPolicy:
    choice: str = "maximal"
    k: int | None = None

    def __post_init__(self):
        if self.choice not in ("maximal", "all", "top"):
            raise ValueError(f"unknown dimension policy {self.choice!r}")
        if self.choice == "top" and (self.k is None or self.k < 1):
            raise ValueError("top-k policy needs a positive k")

    @classmethod
    def parse(cls, spec: str) -> "DimensionPolicy":
        """``maximal``, ``all`` or ``top:K``."""
        if spec.startswith("top:"):
            return cls("top", int(spec[4:]))
        return cls(spec)


@dataclass(frozen=True)
class SemanticPoint:
    dims: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in self.dims.values():
            if v < 0 or not math.isfinite(v):
                raise ValueError("semantic point coordinates must be finite and >= 0")


def node_complexity(
    lattice: Lattice, config: ValueConfig | None = None, logic: SemanticLogic | None = None
) -> dict[int, Real]:
    """Value of every lattice node, keyed by node id.

    Under the ``tagged`` schema the premise product is multiplied by the
    weight of the firing rule's tag (1 when untagged or unlisted); that
    needs ``logic`` to look tags up.
    """
    config = config or ValueConfig()
    if config.schema == "tagged" and logic is None:
        raise ValueError("the tagged schema needs the logic to resolve rule tags")
    tags = {r.id: r.tag for r in logic.rules} if logic is not None else {}

    values: dict[int, Real] = {}
    # nodes are stored in creation order, so premises always come first
    for node in lattice.nodes:
        if node.is_axiom:
            values[node.id] = 1
            continue
        prod = math.prod(values[p] for p in node.premises)
        if config.schema == "tagged":
            weight = config.tag_weights.get(tags.get(node.rule_id), 1)
            if isinstance(weight, float) and weight.is_integer():
                weight = int(weight)
            prod = prod * weight
        values[node.id] = 1 + prod
    return values


def log_normalize(values: dict[int, Real], config: ValueConfig | None = None) -> dict[int, float]:
    """``v -> log_base(v + 1)``; strictly increasing, so order is kept."""
    base = (config or ValueConfig()).log_base
    out = {}
    for k, v in values.items():
        if v < 1:
            raise ValueError(f"node {k} has value {v} < 1")
        out[k] = math.log(v + 1, base)
    return out


def involved_theories(lattice: Lattice, logic: SemanticLogic) -> list[str]:
    if lattice.logic_id and lattice.logic_id != logic_id(logic):
        raise DerivationError(
            f"lattice was derived from logic {lattice.logic_id}, not {logic_id(logic)}"
        )
    fired = set()
    for node in lattice.nodes:
        if not node.is_axiom:
            fired.add(logic.rule(node.rule_id).theory)
    initial = set(lattice.axiom_terms())
    initial_syms: set[str] = set()
    for t in initial:
        initial_syms |= T.symbols(t)

    out = []
    for th in logic.theories:
        if (
            th.name in fired
            or any(logic.expand(f) in initial for f in th.facts)
            or initial_syms.intersection(th.intuitions)
        ):
            out.append(th.name)
    return out


def dastex(lattice: Lattice, logic: SemanticLogic) -> int:
    """Number of theories involved in the derivation: a rule of the theory
    fired, or one of its facts or intuition symbols is among the initial
    terms."""
    return len(involved_theories(lattice, logic))


def select_nodes(lattice: Lattice, values: dict[int, Real], policy: DimensionPolicy):
    if policy.choice == "all":
        return list(lattice.nodes)
    if policy.choice == "maximal":
        return lattice.maximal_nodes()
    ranked = sorted(lattice.nodes, key=lambda n: (-values[n.id], n.id))
    return sorted(ranked[: policy.k], key=lambda n: n.id)


def semantic_point(
    lattice: Lattice, values: dict[int, Real], policy: DimensionPolicy | None = None
) -> SemanticPoint:
    policy = policy or DimensionPolicy()
    dims = {}
    for node in select_nodes(lattice, values, policy):
        for t in node.produced:
            dims[t] = values[node.id]
    return SemanticPoint(dims)


def overall_complexity(point: SemanticPoint) -> float:
    return math.hypot(*(float(v) for v in point.dims.values()))


def relative_complexity(values) -> list[float]:
    """Each value's share of the total."""
    values = list(values)
    if any(v < 0 for v in values):
        raise ValueError("complexity values must be non-negative")
    total = math.fsum(values)
    if total <= 0:
        raise ValueError("at least one complexity value must be positive")
    return [v / total for v in values]


def sentence_complexity(
    lattice: Lattice,
    logic: SemanticLogic,
    measure: str = "overall",
    config: ValueConfig | None = None,
    policy: DimensionPolicy | None = None,
) -> float:
    """Scalar complexity used to compare sentences: ``overall`` or ``dastex``."""
    if measure == "dastex":
        return float(dastex(lattice, logic))
    if measure != "overall":
        raise ValueError(f"unknown complexity measure {measure!r}")
    values = node_complexity(lattice, config, logic)
    return overall_complexity(semantic_point(lattice, values, policy))


def fmt_number(x):
    """JSON-friendly number with at most 12 significant digits."""
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        x = float(x)
    return float(f"{x:.12g}")


def complexity_report(
    lattice: Lattice,
    logic: SemanticLogic,
    config: ValueConfig | None = None,
    policy: DimensionPolicy | None = None,
    normalize: bool = False,
) -> dict:
    config = config or ValueConfig()
    policy = policy or DimensionPolicy()
    values = node_complexity(lattice, config, logic)
    point = semantic_point(lattice, values, policy)
    report = {
        "text": lattice.text,
        "logic_id": lattice.logic_id,
        "schema": config.schema,
        "dimension_policy": policy.choice if policy.choice != "top" else f"top:{policy.k}",
        "node_values": {str(k): fmt_number(v) for k, v in values.items()},
        "dimensions": [
            {"term": T.render_term(t), "value": fmt_number(v)} for t, v in point.dims.items()
        ],
        "overall_complexity": fmt_number(overall_complexity(point)),
        "dastex": dastex(lattice, logic),
        "involved_theories": involved_theories(lattice, logic),
    }
    if normalize:
        report["log_base"] = fmt_number(config.log_base)
        report["normalized_values"] = {
            str(k): fmt_number(v) for k, v in log_normalize(values, config).items()
        }
    return report
