"""Five-sentence comparison bracket and judgment scoring.

The bracket has four comparison steps, each promoting the more complex of
two contenders::

    a = winner(s4, s5)
    b = winner(s2, s3)
    c = winner(a, b)
    d = winner(c, s1)      # the most complex sentence

On equal complexity both contenders advance together, so components of a
DAST judgment are sets. Human judgments always name one sentence per step.
A human component agrees with the DAST component when it is a member of it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataSchemaError

STEPS = ("a", "b", "c", "d")
SENTENCES = (1, 2, 3, 4, 5)
AGREEMENT_LEVELS = (0, 20, 40, 60, 80, 100)
HUMAN_CSV_HEADER = ("participant_id", "a", "b", "c", "d", "agreement")


@dataclass(frozen=True)
class JudgmentVector:
    a: frozenset
    b: frozenset
    c: frozenset
    d: frozenset

    def __post_init__(self):
        for step in STEPS:
            comp = frozenset(getattr(self, step))
            object.__setattr__(self, step, comp)
            if not comp:
                raise ValueError(f"component {step} is empty")
            if not comp <= set(SENTENCES):
                raise ValueError(f"component {step} has indices outside 1..5: {sorted(comp)}")

    @classmethod
    def single(cls, a: int, b: int, c: int, d: int) -> "JudgmentVector":
        return cls(frozenset([a]), frozenset([b]), frozenset([c]), frozenset([d]))

    def components(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def is_singleton(self) -> bool:
        return all(len(c) == 1 for c in self.components())

    def to_dict(self) -> dict:
        return {s: sorted(getattr(self, s)) for s in STEPS}

    @classmethod
    def from_dict(cls, data: dict) -> "JudgmentVector":
        try:
            return cls(*(frozenset(int(i) for i in data[s]) for s in STEPS))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataSchemaError(f"bad DAST judgment: {exc}") from None


@dataclass(frozen=True)
class HumanJudgmentSet:
    judgments: tuple
    agreements: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "judgments", tuple(self.judgments))
        if not self.judgments:
            raise DataSchemaError("a human judgment set needs at least one judgment")
        for i, j in enumerate(self.judgments):
            if not j.is_singleton:
                raise DataSchemaError(f"human judgment {i} is not single-valued")
        if self.agreements is not None:
            agreements = tuple(self.agreements)
            object.__setattr__(self, "agreements", agreements)
            if len(agreements) != len(self.judgments):
                raise DataSchemaError("one agreement level per judgment is required")
            bad = [a for a in agreements if a is not None and a not in AGREEMENT_LEVELS]
            if bad:
                raise DataSchemaError(f"agreement levels must be in {AGREEMENT_LEVELS}: {bad}")

    def __len__(self) -> int:
        return len(self.judgments)


@dataclass(frozen=True)
class PrecisionReport:
    overall: float
    no_deviation: float
    comp_steps: float
    deviation_shares: tuple


# --------------------------------------------------------------------------
# the bracket


def _winner(x: frozenset, y: frozenset, values: Sequence[float]) -> frozenset:
    vx = max(values[i - 1] for i in x)
    vy = max(values[i - 1] for i in y)
    if vx > vy:
        return x
    if vy > vx:
        return y
    return x | y


def dast_judge(values: Sequence[float]) -> JudgmentVector:
    """Run the bracket over the complexities of sentences 1..5."""
    values = list(values)
    if len(values) != 5:
        raise ValueError(f"the bracket needs 5 complexity values, got {len(values)}")
    if any(not math.isfinite(v) or v < 0 for v in values):
        raise ValueError("complexity values must be finite and non-negative")
    a = _winner(frozenset([4]), frozenset([5]), values)
    b = _winner(frozenset([2]), frozenset([3]), values)
    c = _winner(a, b, values)
    d = _winner(c, frozenset([1]), values)
    return JudgmentVector(a, b, c, d)


# --------------------------------------------------------------------------
# precision metrics


def matching_components(dj: JudgmentVector, hj: JudgmentVector) -> int:
    return sum(1 for q, h in zip(dj.components(), hj.components()) if h <= q)


def overall_result_precision(dj: JudgmentVector, hj: HumanJudgmentSet) -> float:
    hits = sum(1 for h in hj.judgments if h.d <= dj.d)
    return hits / len(hj)


def no_deviation_precision(dj: JudgmentVector, hj: HumanJudgmentSet) -> float:
    hits = sum(1 for h in hj.judgments if matching_components(dj, h) == 4)
    return hits / len(hj)


def comp_steps_precision(dj: JudgmentVector, hj: HumanJudgmentSet) -> float:
    hits = sum(matching_components(dj, h) for h in hj.judgments)
    return hits / (4 * len(hj))


def deviation_distribution(dj: JudgmentVector, hj: HumanJudgmentSet) -> list[float]:
    """Share of judgments deviating from ``dj`` in 0, 1, 2, 3 and 4 steps."""
    counts = Counter(4 - matching_components(dj, h) for h in hj.judgments)
    return [counts[k] / len(hj) for k in range(5)]


def precision_report(dj: JudgmentVector, hj: HumanJudgmentSet) -> PrecisionReport:
    return PrecisionReport(
        overall=overall_result_precision(dj, hj),
        no_deviation=no_deviation_precision(dj, hj),
        comp_steps=comp_steps_precision(dj, hj),
        deviation_shares=tuple(deviation_distribution(dj, hj)),
    )


def vote_values(hj: HumanJudgmentSet) -> list[float]:
    """Share of participants naming each sentence as the most complex."""
    counts = Counter(next(iter(h.d)) for h in hj.judgments)
    return [counts[s] / len(hj) for s in SENTENCES]


def judgment_path(h: JudgmentVector) -> int:
    """Index 0..15 of the choice path a consistent human judgment takes.

    One bit per step: a picks 5 over 4, b picks 3 over 2, c picks b's winner
    over a's, d picks s1 over c's winner.
    """
    a, b, c, d = (next(iter(x)) for x in h.components())
    if a not in (4, 5) or b not in (2, 3) or c not in (a, b) or d not in (c, 1):
        raise DataSchemaError(f"judgment {h.to_dict()} does not follow the bracket")
    bits = (a == 5, b == 3, c == b, d == 1)
    return sum(1 << i for i, bit in enumerate(bits) if bit)


def path_distribution(hj: HumanJudgmentSet) -> list[float]:
    """Shares of the 16 bracket paths, sorted ascending."""
    counts = Counter(judgment_path(h) for h in hj.judgments)
    return sorted(counts[p] / len(hj) for p in range(16))


def consensus_classes(hj: HumanJudgmentSet, dj: JudgmentVector) -> dict[int, float]:
    """Overall-result precision within each axiom-agreement class."""
    if hj.agreements is None or any(a is None for a in hj.agreements):
        raise DataSchemaError("consensus classes need an agreement level for every judgment")
    out = {}
    for level in AGREEMENT_LEVELS:
        members = [h for h, a in zip(hj.judgments, hj.agreements) if a == level]
        if members:
            out[level] = overall_result_precision(dj, HumanJudgmentSet(tuple(members)))
    return out


def multi_valued_share(judgments: Iterable[JudgmentVector]) -> float:
    """Fraction of DAST judgments whose final component names more than one
    sentence."""
    judgments = list(judgments)
    if not judgments:
        return 0.0
    return sum(1 for j in judgments if len(j.d) > 1) / len(judgments)


# --------------------------------------------------------------------------
# I/O


def read_human_csv(source) -> HumanJudgmentSet:
    """Parse ``participant_id,a,b,c,d[,agreement]`` rows.

    ``source`` is a path or an open text stream.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return _read_human(fh)
    return _read_human(source)


def parse_human_csv(text: str) -> HumanJudgmentSet:
    return _read_human(io.StringIO(text))


def _read_human(fh) -> HumanJudgmentSet:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        raise DataSchemaError("empty judgment CSV")
    missing = [c for c in HUMAN_CSV_HEADER[:5] if c not in reader.fieldnames]
    if missing:
        raise DataSchemaError(f"judgment CSV lacks column(s): {', '.join(missing)}")
    has_agreement = "agreement" in reader.fieldnames
    judgments, agreements = [], []
    for lineno, row in enumerate(reader, start=2):
        try:
            steps = [int(row[s]) for s in STEPS]
            judgments.append(JudgmentVector.single(*steps))
            raw = (row.get("agreement") or "").strip() if has_agreement else ""
            agreements.append(int(raw) if raw else None)
        except (TypeError, ValueError) as exc:
            raise DataSchemaError(f"judgment CSV line {lineno}: {exc}") from None
    if not judgments:
        raise DataSchemaError("judgment CSV has no rows")
    any_agreement = any(a is not None for a in agreements)
    return HumanJudgmentSet(tuple(judgments), tuple(agreements) if any_agreement else None)


def read_dast_json(path) -> JudgmentVector:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataSchemaError(f"bad DAST judgment JSON: {exc}") from None
    return JudgmentVector.from_dict(data)


def score_report(dj: JudgmentVector, hj: HumanJudgmentSet) -> dict:
    rep = precision_report(dj, hj)
    out = {
        "judgments": len(hj),
        "dast_judgment": dj.to_dict(),
        "precision": {
            "overall_result": rep.overall,
            "no_deviation": rep.no_deviation,
            "comp_steps": rep.comp_steps,
        },
        "deviation_shares": list(rep.deviation_shares),
        "vote_values": vote_values(hj),
    }
    try:
        out["path_shares"] = path_distribution(hj)
    except DataSchemaError as exc:
        out["path_shares"] = None
        out["path_error"] = str(exc)
    if hj.agreements is not None and all(a is not None for a in hj.agreements):
        out["consensus_classes"] = {str(k): v for k, v in consensus_classes(hj, dj).items()}
    return out
