from __future__ import annotations

from pathlib import Path

import pytest

from dast.logic import load_logic, parse_logic

DATA = Path(__file__).resolve().parents[1] / "src" / "dast" / "data"
SL1 = DATA / "semantic_logic_1.dast"
SL2 = DATA / "semantic_logic_2.dast"
TABLE5 = DATA / "table5_corpus.csv"
EXP1_HJ = DATA / "experiment1_judgments.csv"
EXP1_DJ = DATA / "experiment1_dast.json"


def chain_source(n: int) -> str:
    """A logic whose rules form a single chain s0 ==> s1 ==> ... ==> sn."""
    syms = ", ".join(f"s{i}" for i in range(n + 1))
    lines = ["theory Chain:", f"    intuitions: {syms}"]
    lines += [f"    rule: s{i} ==> s{i + 1}" for i in range(n)]
    return "\n".join(lines) + "\n"


def chain_logic(n: int):
    return parse_logic(chain_source(n))


@pytest.fixture(scope="session")
def sl1():
    return load_logic(SL1)


@pytest.fixture(scope="session")
def sl2():
    return load_logic(SL2)


# The twelve expected deductions for "#S = How(Ability(See(Unseen)))",
# copied as printed (spaced tokens, underscores, a few surplus closing
# parentheses). expected_terms() normalizes them.
DEDUCTIONS = """\
P ( Not ( Excitement ) )
Attention_Policy ( Excitement ( Wonder ( How ( Ability ( See ( Unseen ) ) ) ) ) ) )
Wonder ( How ( Ability ( See ( Unseen ) ) ) ) )
Attention_Policy
Positive_Sense ( Ability ( See ( Unseen ) ) )
Question ( Ability ( See ( Unseen ) ) )
Excitement ( Wonder ( How ( Ability ( See ( Unseen ) ) ) ) ) )
Engagement ( Ability ( See ( Unseen ) ) )
Abduction ( P ( Not ( See ( Unseen ) ) ) ) )
Attention_Policy ( Engagement ( Ability ( See ( Unseen ) ) ) )
P ( Not ( Promotion ) )
Propagation ( Engagement ( Ability ( See ( Unseen ) ) ) )
"""


def normalize_deduction(line: str) -> str:
    """Drop spacing, map ``_`` to ``-`` and trim unbalanced ``)``."""
    s = "".join(line.split()).replace("_", "-")
    while s.count(")") > s.count("("):
        s = s[:-1]
    return s


def expected_terms():
    from dast.terms import parse_term

    return [parse_term(normalize_deduction(l)) for l in DEDUCTIONS.splitlines() if l.strip()]


def engineered_points(xs, r2):
    """Points (x, x + e) with e orthogonal to x, zero-mean and scaled so the
    least-squares line has slope 1 and the given R²."""
    import numpy as np

    x = np.asarray(xs, dtype=float)
    xc = x - x.mean()
    raw = np.cos(np.arange(len(x)) * 2.1 + 0.3)
    raw = raw - raw.mean()
    raw = raw - (raw @ xc) / (xc @ xc) * xc
    e = raw * np.sqrt((xc @ xc) * (1 / r2 - 1) / (raw @ raw))
    return list(zip(x.tolist(), (x + e).tolist()))


def make_pair(topic, simple, hard, genre=None):
    from dast.corpus import PairRecord, ParagraphRecord

    return PairRecord(
        topic,
        ParagraphRecord(f"{topic}-s", topic, "simple", genre, dict(simple)),
        ParagraphRecord(f"{topic}-h", topic, "hard", genre, dict(hard)),
    )


def enumerate_deviation_pmf(alphas):
    """Sum the probability of every one of the 2^4 step-outcome paths."""
    import itertools
    import math

    pmf = [0.0] * (len(alphas) + 1)
    for path in itertools.product((0, 1), repeat=len(alphas)):
        pmf[sum(path)] += math.prod(a if dev else 1 - a for a, dev in zip(alphas, path))
    return pmf
