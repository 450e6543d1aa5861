"""Flesch-Kincaid grade level and the text statistics feeding it."""

from __future__ import annotations

import re
from typing import NamedTuple

_SENTENCE_END = re.compile(r"[.!?]+")
_WORD = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


class TextStats(NamedTuple):
    sentences: int
    words: int
    syllables: int
    avg_words_per_sentence: float
    avg_syllables_per_word: float


def flesch_kincaid(avg_words_per_sentence: float, avg_syllables_per_word: float) -> float:
    """Grade level ``0.39 * ASL + 11.8 * ASW - 15.59``."""
    if avg_words_per_sentence <= 0 or avg_syllables_per_word <= 0:
        raise ValueError("Flesch-Kincaid averages must be positive")
    return 0.39 * avg_words_per_sentence + 11.8 * avg_syllables_per_word - 15.59


def count_syllables(word: str) -> int:
    """Vowel-group heuristic.

    Each maximal run of ``aeiouy`` counts once; a final ``e`` that forms its
    own run is silent; every word has at least one syllable.
    """
    w = word.lower()
    n = len(_VOWEL_GROUP.findall(w))
    if n > 1 and w.endswith("e") and not re.search(r"[aeiouy]e$", w):
        n -= 1
    return max(n, 1)


def text_stats(text: str) -> TextStats:
    """Sentences are word-bearing spans ended by ``.``, ``!`` or ``?`` (or the
    end of the text); words are runs of letters and digits, with inner
    apostrophes kept."""
    if not text or not text.strip():
        raise ValueError("text is empty")
    sentences = sum(1 for span in _SENTENCE_END.split(text) if _WORD.search(span))
    words = _WORD.findall(text)
    if not words:
        raise ValueError("text contains no words")
    syllables = sum(count_syllables(w) for w in words)
    return TextStats(
        sentences,
        len(words),
        syllables,
        len(words) / sentences,
        syllables / len(words),
    )


def flesch_kincaid_text(text: str) -> float:
    stats = text_stats(text)
    return flesch_kincaid(stats.avg_words_per_sentence, stats.avg_syllables_per_word)
