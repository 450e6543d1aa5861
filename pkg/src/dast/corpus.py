"""Difficulty-ratio analysis over simple/hard paragraph pairs.

For a metric F and a pair (simple, hard) the difficulty ratio (DR) is
F(simple) / F(hard). A metric's DR curve is its per-pair DRs in ascending
order scaled so the largest is 1; its overall DR is the mean over simple
paragraphs divided by the mean over hard ones.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .errors import DataSchemaError
from .regression import linear_regression

METRICS = (
    "word_count",
    "fixation_time_ms",
    "readability_level",
    "flesch_kincaid",
    "gunning_fog",
    "smog",
    "ari",
    "coleman_liau",
    "dastex",
    "dast_eval_time_min",
)
CSV_HEADER = ("id", "topic", "genre_class", "variant") + METRICS
GENRES = ("history-literature", "geography-science")
VARIANTS = ("simple", "hard")

# Measure2: fixation duration per word, derived on the fly
FIXATION_PER_WORD = "fixation_time_per_word"
MEASURES = {"fixation_time": "fixation_time_ms", "fixation_time_per_word": FIXATION_PER_WORD}
DEFAULT_REFERENCES = ("fixation_time_ms", "word_count", "readability_level")


@dataclass(frozen=True)
class ParagraphRecord:
    id: str
    topic: str
    variant: str
    genre_class: str | None = None
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DataSchemaError(f"paragraph {self.id}: variant must be simple or hard")
        if self.genre_class is not None and self.genre_class not in GENRES:
            raise DataSchemaError(f"paragraph {self.id}: unknown genre {self.genre_class!r}")
        for name, v in self.metrics.items():
            if not math.isfinite(v):
                raise DataSchemaError(f"paragraph {self.id}: {name} is not finite")
        if "word_count" in self.metrics and self.metrics["word_count"] <= 0:
            raise DataSchemaError(f"paragraph {self.id}: word_count must be positive")

    def value(self, metric: str) -> float:
        if metric == FIXATION_PER_WORD:
            return self.value("fixation_time_ms") / self.value("word_count")
        try:
            return self.metrics[metric]
        except KeyError:
            raise KeyError(f"paragraph {self.id} has no {metric}") from None

    def has(self, metric: str) -> bool:
        if metric == FIXATION_PER_WORD:
            return self.has("fixation_time_ms") and self.has("word_count")
        return metric in self.metrics


@dataclass(frozen=True)
class PairRecord:
    topic: str
    simple: ParagraphRecord
    hard: ParagraphRecord

    def __post_init__(self):
        if self.simple.variant != "simple" or self.hard.variant != "hard":
            raise DataSchemaError(f"pair {self.topic}: variants out of place")
        if self.simple.topic != self.topic or self.hard.topic != self.topic:
            raise DataSchemaError(f"pair {self.topic}: paragraphs from different topics")

    @property
    def genre_class(self) -> str | None:
        return self.simple.genre_class or self.hard.genre_class


@dataclass(frozen=True)
class DRCurve:
    metric: str
    points: tuple


# --------------------------------------------------------------------------
# ingestion


def read_corpus(source) -> list[PairRecord]:
    """Path or text stream to pairs; see :func:`ingest_corpus`."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return ingest_corpus(fh)
    return ingest_corpus(source)


def ingest_corpus(stream) -> list[PairRecord]:
    """Read the corpus CSV and pair paragraphs by topic.

    Empty cells mean the metric is absent. Pairs come back sorted by topic.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        return []
    missing = [c for c in CSV_HEADER[:4] if c not in reader.fieldnames]
    if missing:
        raise DataSchemaError(f"corpus CSV lacks column(s): {', '.join(missing)}")
    unknown = [c for c in reader.fieldnames if c not in CSV_HEADER]
    if unknown:
        raise DataSchemaError(f"corpus CSV has unknown column(s): {', '.join(unknown)}")

    by_topic: dict[str, dict[str, ParagraphRecord]] = {}
    for lineno, row in enumerate(reader, start=2):
        metrics = {}
        for name in METRICS:
            raw = (row.get(name) or "").strip()
            if raw:
                try:
                    metrics[name] = float(raw)
                except ValueError:
                    raise DataSchemaError(
                        f"corpus CSV line {lineno}: {name}={raw!r} is not a number"
                    ) from None
        topic = (row["topic"] or "").strip()
        if not topic:
            raise DataSchemaError(f"corpus CSV line {lineno}: empty topic")
        rec = ParagraphRecord(
            id=(row["id"] or "").strip(),
            topic=topic,
            variant=(row["variant"] or "").strip(),
            genre_class=(row["genre_class"] or "").strip() or None,
            metrics=metrics,
        )
        slot = by_topic.setdefault(topic, {})
        if rec.variant in slot:
            raise DataSchemaError(
                f"corpus CSV line {lineno}: duplicate {rec.variant} paragraph for topic {topic!r}"
            )
        slot[rec.variant] = rec

    pairs = []
    for topic in sorted(by_topic):
        slot = by_topic[topic]
        absent = [v for v in VARIANTS if v not in slot]
        if absent:
            raise DataSchemaError(f"topic {topic!r} has no {absent[0]} paragraph")
        pairs.append(PairRecord(topic, slot["simple"], slot["hard"]))
    return pairs


# --------------------------------------------------------------------------
# ratios


def difficulty_ratio(metric: str, pair: PairRecord) -> float:
    hard = pair.hard.value(metric)
    if hard == 0:
        raise ZeroDivisionError(f"pair {pair.topic}: hard {metric} is zero")
    return pair.simple.value(metric) / hard


def overall_difficulty_ratio(metric: str, pairs: Sequence[PairRecord]) -> float:
    if not pairs:
        raise ValueError("no pairs")
    simple = math.fsum(p.simple.value(metric) for p in pairs) / len(pairs)
    hard = math.fsum(p.hard.value(metric) for p in pairs) / len(pairs)
    if hard == 0:
        raise ZeroDivisionError(f"mean hard {metric} is zero")
    return simple / hard


def dr_curve(metric: str, pairs: Sequence[PairRecord]) -> DRCurve:
    drs = sorted(difficulty_ratio(metric, p) for p in pairs)
    if not drs:
        return DRCurve(metric, ())
    top = drs[-1]
    if drs[0] <= 0:
        raise ValueError(f"{metric}: DR curves need positive ratios")
    return DRCurve(metric, tuple(d / top for d in drs))


def curve_distance(a: DRCurve, b: DRCurve) -> float:
    """Max-norm distance between two curves of equal length."""
    if len(a.points) != len(b.points):
        raise ValueError("curves differ in length")
    return max((abs(x - y) for x, y in zip(a.points, b.points)), default=0.0)


def dr_error_pct(metric_dr: float, reference_dr: float) -> float:
    """Relative distance of a DR from a reference DR, in percent."""
    if reference_dr <= 0:
        raise ValueError("reference DR must be positive")
    return 100.0 * abs(metric_dr - reference_dr) / reference_dr


def round_half_up(x: float, decimals: int) -> float:
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


# --------------------------------------------------------------------------
# genre-aware regression


def genre_split_regression(
    pairs: Sequence[PairRecord],
    measure: str = "fixation_time",
    exclude: Iterable[str] = (),
) -> dict:
    """Per genre class, regress DASTEX-DR on the measure's DR.

    ``measure`` is ``fixation_time`` or ``fixation_time_per_word``;
    ``exclude`` lists pair topics left out of the fit.
    """
    try:
        metric = MEASURES[measure]
    except KeyError:
        raise ValueError(f"unknown measure {measure!r}; expected one of {sorted(MEASURES)}") from None
    exclude = set(exclude)
    unknown = exclude - {p.topic for p in pairs}
    if unknown:
        raise ValueError(f"excluded pair(s) not in corpus: {', '.join(sorted(unknown))}")
    out = {}
    for genre in GENRES:
        members = [p for p in pairs if p.genre_class == genre]
        if not members:
            continue
        kept = [p for p in members if p.topic not in exclude]
        points = [(difficulty_ratio(metric, p), difficulty_ratio("dastex", p)) for p in kept]
        fit = linear_regression(points)
        out[genre] = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "n": len(points),
            "excluded": sorted(p.topic for p in members if p.topic in exclude),
        }
    return out


# --------------------------------------------------------------------------
# reports


def corpus_report(
    pairs: Sequence[PairRecord],
    metrics: Sequence[str] = METRICS,
    references: Sequence[str] = DEFAULT_REFERENCES,
    dr_decimals: int | None = None,
) -> dict:
    """DR table, curves, error matrix and curve distances.

    With ``dr_decimals`` the error percentages are computed from DRs rounded
    to that many decimals, the way a printed DR row would be compared.
    """
    table: dict[str, dict] = {}
    omitted: dict[str, str] = {}
    curves: dict[str, DRCurve] = {}
    for m in metrics:
        absent = [p.topic for p in pairs if not (p.simple.has(m) and p.hard.has(m))]
        if not pairs:
            omitted[m] = "no pairs"
            continue
        if absent:
            omitted[m] = f"missing for {len(absent)} pair(s)"
            continue
        try:
            dr = overall_difficulty_ratio(m, pairs)
        except ZeroDivisionError as exc:
            omitted[m] = str(exc)
            continue
        row = {
            "simple_mean": math.fsum(p.simple.value(m) for p in pairs) / len(pairs),
            "hard_mean": math.fsum(p.hard.value(m) for p in pairs) / len(pairs),
            "overall_dr": dr,
        }
        if dr_decimals is not None:
            row["overall_dr_rounded"] = round_half_up(dr, dr_decimals)
        try:
            curves[m] = dr_curve(m, pairs)
            row["curve"] = list(curves[m].points)
        except (ZeroDivisionError, ValueError) as exc:
            row["curve"] = None
            row["curve_error"] = str(exc)
        table[m] = row

    key = "overall_dr_rounded" if dr_decimals is not None else "overall_dr"
    errors = {}
    for ref in references:
        if ref not in table:
            continue
        errors[ref] = {m: dr_error_pct(row[key], table[ref][key]) for m, row in table.items()}

    names = sorted(curves)
    distances = {
        a: {b: curve_distance(curves[a], curves[b]) for b in names} for a in names
    }
    return {
        "pairs": len(pairs),
        "metrics": table,
        "omitted": omitted,
        "errors": errors,
        "curve_distances": distances,
    }


def report_to_csv(report: dict) -> str:
    refs = list(report["errors"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["metric", "simple_mean", "hard_mean", "overall_dr", "overall_dr_rounded"]
        + [f"error_vs_{r}" for r in refs]
        + ["curve"]
    )
    for m, row in report["metrics"].items():
        curve = row.get("curve")
        w.writerow(
            [m, _g(row["simple_mean"]), _g(row["hard_mean"]), _g(row["overall_dr"]),
             _g(row.get("overall_dr_rounded"))]
            + [_g(report["errors"][r].get(m)) for r in refs]
            + [";".join(_g(x) for x in curve) if curve else ""]
        )
    for m, why in report["omitted"].items():
        w.writerow([m, "", "", "", ""] + [""] * len(refs) + [f"omitted: {why}"])
    return buf.getvalue()


def _g(x) -> str:
    return "" if x is None else f"{x:.12g}"
