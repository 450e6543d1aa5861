from __future__ import annotations

import io
import json

import pytest
from hypothesis import given, strategies as st

from conftest import TABLE5, engineered_points, make_pair
from dast.corpus import (
    CSV_HEADER,
    corpus_report,
    curve_distance,
    difficulty_ratio,
    dr_curve,
    dr_error_pct,
    genre_split_regression,
    ingest_corpus,
    overall_difficulty_ratio,
    read_corpus,
    report_to_csv,
    round_half_up,
)
from dast.errors import DataSchemaError

# published DR row and the nine error cells against three references
DR_ROW = {
    "dastex": 0.64, "fixation_time_ms": 0.62, "word_count": 0.71, "readability_level": 0.58,
    "flesch_kincaid": 0.52, "gunning_fog": 0.54, "coleman_liau": 0.79, "smog": 0.68, "ari": 0.46,
}
ERROR_ROWS = {
    "fixation_time_ms": (3.23, 0.00, 14.52, 6.45, 16.13, 12.90, 27.42, 9.68, 25.81),
    "word_count": (9.86, 12.68, 0.00, 18.31, 26.76, 23.94, 11.27, 4.23, 35.21),
    "readability_level": (10.34, 6.90, 22.41, 0.00, 10.34, 6.90, 36.21, 17.24, 20.69),
}


def _row(**kw):
    base = {h: "" for h in CSV_HEADER}
    base.update({k: str(v) for k, v in kw.items()})
    return ",".join(base[h] for h in CSV_HEADER)


def _csv(*rows):
    return ",".join(CSV_HEADER) + "\n" + "\n".join(rows) + "\n"


def test_ingest_fixture():
    pairs = read_corpus(TABLE5)
    assert len(pairs) == 16
    assert [p.topic for p in pairs] == sorted(p.topic for p in pairs)
    assert {p.genre_class for p in pairs} == {"history-literature", "geography-science"}


def test_ingest_empty():
    assert ingest_corpus("") == []
    assert ingest_corpus(_csv()) == []


def test_ingest_duplicate_and_missing():
    a = _row(id="1", topic="t", variant="simple", dastex=1)
    b = _row(id="2", topic="t", variant="hard", dastex=2)
    c = _row(id="3", topic="t", variant="hard", dastex=3)
    with pytest.raises(DataSchemaError, match="duplicate"):
        ingest_corpus(_csv(a, b, c))
    with pytest.raises(DataSchemaError, match="no hard"):
        ingest_corpus(_csv(a))


def test_ingest_bad_values():
    with pytest.raises(DataSchemaError):
        ingest_corpus(_csv(_row(id="1", topic="t", variant="simple", dastex="abc")))
    with pytest.raises(DataSchemaError):
        ingest_corpus(_csv(_row(id="1", topic="t", variant="medium")))
    with pytest.raises(DataSchemaError):
        ingest_corpus(_csv(_row(id="1", topic="t", variant="simple", word_count=0)))
    with pytest.raises(DataSchemaError):
        ingest_corpus(_csv(_row(id="1", topic="t", variant="simple", dastex="nan")))
    with pytest.raises(DataSchemaError):
        ingest_corpus("id,topic,variant,colour\n")


def test_difficulty_ratio_examples():
    assert difficulty_ratio("dastex", make_pair("t", {"dastex": 3}, {"dastex": 3})) == 1.0
    assert difficulty_ratio("dastex", make_pair("t", {"dastex": 50}, {"dastex": 100})) == 0.5
    assert 24.19 / 37.81 == pytest.approx(0.64, abs=0.005)
    with pytest.raises(ZeroDivisionError):
        difficulty_ratio("dastex", make_pair("t", {"dastex": 1}, {"dastex": 0}))
    with pytest.raises(KeyError):
        difficulty_ratio("smog", make_pair("t", {"dastex": 1}, {"dastex": 1}))


def test_overall_ratio_examples():
    pairs = [make_pair("a", {"m": 2}, {"m": 4}), make_pair("b", {"m": 4}, {"m": 8})]
    assert overall_difficulty_ratio("m", pairs) == 0.5
    same = [make_pair("a", {"m": 5}, {"m": 5})]
    assert overall_difficulty_ratio("m", same) == 1.0
    assert 31308.59 / 50367.07 == pytest.approx(0.62, abs=0.005)


def test_dr_curve_examples():
    pairs = [
        make_pair("a", {"m": 0.4}, {"m": 1}),
        make_pair("b", {"m": 0.8}, {"m": 1}),
        make_pair("c", {"m": 0.6}, {"m": 1}),
    ]
    assert dr_curve("m", pairs).points == pytest.approx((0.5, 0.75, 1.0))
    assert dr_curve("m", pairs[:1]).points == (1.0,)
    same = [make_pair(t, {"m": 1}, {"m": 2}) for t in "xyz"]
    assert dr_curve("m", same).points == (1.0, 1.0, 1.0)


def test_error_pct_examples():
    assert dr_error_pct(0.64, 0.62) == pytest.approx(3.23, abs=0.005)
    assert dr_error_pct(0.64, 0.71) == pytest.approx(9.86, abs=0.005)
    assert dr_error_pct(0.3, 0.3) == 0
    with pytest.raises(ValueError):
        dr_error_pct(0.5, 0)


def test_published_error_cells_follow_from_dr_row():
    order = list(DR_ROW)
    for ref, cells in ERROR_ROWS.items():
        for metric, cell in zip(order, cells):
            assert dr_error_pct(DR_ROW[metric], DR_ROW[ref]) == pytest.approx(cell, abs=0.005)


def test_round_half_up():
    assert round_half_up(0.675, 2) == 0.68
    assert round_half_up(0.625, 2) == 0.63
    assert round_half_up(0.6398, 2) == 0.64


def test_table5_report():
    rep = corpus_report(read_corpus(TABLE5), dr_decimals=2)
    for m, dr in DR_ROW.items():
        assert rep["metrics"][m]["overall_dr"] == pytest.approx(dr, abs=0.005)
    order = list(DR_ROW)
    for ref, cells in ERROR_ROWS.items():
        for m, cell in zip(order, cells):
            assert rep["errors"][ref][m] == pytest.approx(cell, abs=0.05)
    assert "dast_eval_time_min" in rep["omitted"]


def test_single_pair_report():
    rep = corpus_report([make_pair("a", {"dastex": 2, "word_count": 50}, {"dastex": 3, "word_count": 80})])
    assert rep["metrics"]["dastex"]["curve"] == [1.0]
    assert rep["curve_distances"]["dastex"]["word_count"] == 0.0
    assert rep["omitted"]["smog"].startswith("missing")


def test_report_csv_and_json():
    rep = corpus_report(read_corpus(TABLE5), dr_decimals=2)
    json.dumps(rep)
    lines = report_to_csv(rep).splitlines()
    assert lines[0].startswith("metric,simple_mean")
    assert any(l.startswith("dast_eval_time_min") and "omitted" in l for l in lines)


def test_curve_distance():
    pairs = read_corpus(TABLE5)
    a, b = dr_curve("dastex", pairs), dr_curve("smog", pairs)
    assert curve_distance(a, a) == 0
    assert curve_distance(a, b) == curve_distance(b, a) > 0


# ---- genre regression


def _genre_pairs(points, genre, prefix):
    return [
        make_pair(f"{prefix}{i}", {"dastex": y, "fixation_time_ms": x, "word_count": 100},
                  {"dastex": 1.0, "fixation_time_ms": 1.0, "word_count": 50}, genre)
        for i, (x, y) in enumerate(points)
    ]


def test_genre_split_recovers_engineered_fit():
    pts = engineered_points([0.4, 0.5, 0.55, 0.6, 0.7, 0.75, 0.8, 0.9], 0.98)
    pairs = _genre_pairs(pts, "history-literature", "h") + _genre_pairs(
        [(0.3, 0.4), (0.5, 0.6)], "geography-science", "g"
    )
    out = genre_split_regression(pairs)
    assert out["history-literature"]["r_squared"] == pytest.approx(0.98, abs=1e-9)
    assert out["history-literature"]["slope"] == pytest.approx(1.0, abs=1e-9)
    assert out["geography-science"]["r_squared"] == pytest.approx(1.0)


def test_genre_split_exclusion_and_measure2():
    pts = [(0.4, 0.5), (0.5, 0.55), (0.6, 0.7), (0.7, 0.72)]
    pairs = _genre_pairs(pts, "history-literature", "h")
    out = genre_split_regression(pairs, exclude=["h2"])
    assert out["history-literature"]["n"] == 3
    assert out["history-literature"]["excluded"] == ["h2"]
    per_word = genre_split_regression(pairs, "fixation_time_per_word")["history-literature"]
    plain = genre_split_regression(pairs, "fixation_time")["history-literature"]
    # word-count DR is constant (2), so Measure2 DRs are Measure1 DRs halved
    assert per_word["slope"] == pytest.approx(2 * plain["slope"])
    assert per_word["r_squared"] == pytest.approx(plain["r_squared"])
    with pytest.raises(ValueError):
        genre_split_regression(pairs, "gaze")
    with pytest.raises(ValueError):
        genre_split_regression(pairs, exclude=["nope"])


# ---- invariances

positive = st.floats(0.01, 1e4, allow_nan=False)


@given(st.lists(st.tuples(positive, positive), min_size=1, max_size=12), st.floats(1e-3, 1e3))
def test_scale_invariance(values, c):
    pairs = [make_pair(f"t{i:02d}", {"m": s}, {"m": h}) for i, (s, h) in enumerate(values)]
    scaled = [make_pair(f"t{i:02d}", {"m": c * s}, {"m": c * h}) for i, (s, h) in enumerate(values)]
    for p, q in zip(pairs, scaled):
        assert difficulty_ratio("m", q) == pytest.approx(difficulty_ratio("m", p), rel=1e-12)
    assert overall_difficulty_ratio("m", scaled) == pytest.approx(overall_difficulty_ratio("m", pairs), rel=1e-12)
    assert dr_curve("m", scaled).points == pytest.approx(dr_curve("m", pairs).points, rel=1e-12)


@given(st.lists(st.tuples(positive, positive), min_size=1, max_size=12))
def test_curve_shape(values):
    pairs = [make_pair(f"t{i}", {"m": s}, {"m": h}) for i, (s, h) in enumerate(values)]
    pts = dr_curve("m", pairs).points
    assert all(a <= b for a, b in zip(pts, pts[1:]))
    assert pts[-1] == 1.0
    assert all(0 < p <= 1 for p in pts)


@given(positive, positive)
def test_error_zero_iff_equal(a, b):
    assert (dr_error_pct(a, b) == 0) == (a == b)
