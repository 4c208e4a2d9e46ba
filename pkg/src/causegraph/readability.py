"""Classic readability formulas over statement text.

Tokenization is deliberately simple and deterministic; see :func:`tokenize`.
"""

from __future__ import annotations

import logging
import os
import re
import statistics
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Mapping, Optional

logger = logging.getLogger(__name__)

__all__ = [
    "EmptyText",
    "MissingWordList",
    "TextStats",
    "tokenize",
    "split_sentences",
    "split_words",
    "count_syllables",
    "fre",
    "fkg",
    "ari",
    "cli_index",
    "dcrs",
    "load_easy_words",
    "score_text",
    "summarize",
    "corpus_summary",
    "READABILITY_METRICS",
    "EASY_WORDS_ENV",
]

READABILITY_METRICS = ("FRE", "FKG", "CLI", "ARI", "DCRS")
EASY_WORDS_ENV = "CAUSEGRAPH_EASY_WORDS"

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")
_VOWEL_RUN = re.compile(r"[aeiouy]+")
_NUMBER = re.compile(r"^[+-]?\d[\d.,]*%?$")


class EmptyText(ValueError):
    pass


class MissingWordList(RuntimeError):
    pass


@dataclass(frozen=True)
class TextStats:
    sentences: int
    words: int
    syllables: int
    characters: int
    letters: int
    difficult_words: Optional[int] = None


def _strip_punct(token: str) -> str:
    return "".join(ch for ch in token if not unicodedata.category(ch).startswith("P"))


def split_sentences(text: str) -> list:
    parts = [p.strip() for p in _SENTENCE_END.split(text)]
    return [p for p in parts if p]


def split_words(text: str) -> list:
    words = (_strip_punct(t) for t in text.split())
    return [w for w in words if w]


def count_syllables(word: str, overrides: Optional[Mapping[str, int]] = None) -> int:
    """Vowel-group syllable estimate, at least 1.

    >>> count_syllables("climate"), count_syllables("precipitation")
    (2, 5)
    """
    w = word.lower()
    if overrides and w in overrides:
        return max(1, int(overrides[w]))
    w = "".join(ch for ch in w if ch.isalpha())
    groups = _VOWEL_RUN.findall(w)
    n = len(groups)
    # lone final 'e' after a consonant is silent ("climate"), unless it is the only vowel
    if n > 1 and w.endswith("e") and groups[-1] == "e" and len(w) > 1 and w[-2] not in "aeiouy":
        n -= 1
    return max(1, n)


def _is_difficult(word: str, easy_words: FrozenSet[str]) -> bool:
    w = word.casefold()
    if _NUMBER.match(w) or not any(ch.isalpha() for ch in w):
        return False
    return w not in easy_words


def tokenize(text: str, easy_words: Optional[FrozenSet[str]] = None,
             syllable_overrides: Optional[Mapping[str, int]] = None) -> TextStats:
    """Count sentences, words, syllables and characters.

    Sentences end at ``.``, ``!`` or ``?`` followed by whitespace or the end
    of text; a text without terminal punctuation is one sentence. Words are
    whitespace tokens with Unicode punctuation removed. ``characters`` counts
    the non-space characters of the text; ``letters`` only alphabetic ones.
    """
    if text is None or not text.strip():
        raise EmptyText("text is empty")
    words = split_words(text)
    if not words:
        raise EmptyText("text has no words")
    sentences = max(1, len(split_sentences(text)))
    syllables = sum(count_syllables(w, syllable_overrides) for w in words)
    characters = sum(1 for ch in text if not ch.isspace())
    letters = sum(1 for ch in text if ch.isalpha())
    difficult = None
    if easy_words is not None:
        difficult = sum(1 for w in words if _is_difficult(w, easy_words))
    return TextStats(sentences, len(words), syllables, characters, letters, difficult)


def fre(s: TextStats) -> float:
    return 206.835 - 1.015 * s.words / s.sentences - 84.6 * s.syllables / s.words


def fkg(s: TextStats) -> float:
    return 0.39 * s.words / s.sentences + 11.8 * s.syllables / s.words - 15.59


def ari(s: TextStats) -> float:
    return 4.71 * s.characters / s.words + 0.5 * s.words / s.sentences - 21.43


def cli_index(s: TextStats) -> float:
    L = s.letters / s.words * 100
    S = s.sentences / s.words * 100
    return 0.0588 * L - 0.296 * S - 15.8


def dcrs(s: TextStats, adjusted: bool = False) -> float:
    """Dale-Chall score; ``adjusted`` adds 3.6365 when over 5% of words are difficult."""
    if s.difficult_words is None:
        raise MissingWordList("difficult-word count needs the easy-word list")
    pct = s.difficult_words / s.words * 100
    score = 0.1579 * pct + 0.0496 * s.words / s.sentences
    if adjusted and pct > 5:
        score += 3.6365
    return score


def _read_word_file(lines: Iterable[str]) -> FrozenSet[str]:
    out = set()
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            out.add(line.casefold())
    return frozenset(out)


def load_easy_words(path: Optional[os.PathLike] = None) -> FrozenSet[str]:
    """Load the easy-word list: explicit path, then $CAUSEGRAPH_EASY_WORDS, then the bundled copy."""
    if path is None:
        path = os.environ.get(EASY_WORDS_ENV) or None
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise MissingWordList(f"easy-word list not found: {p}")
        return _read_word_file(p.read_text(encoding="utf-8").splitlines())
    try:
        data = resources.files("causegraph").joinpath("data/dale_chall_easy_words.txt").read_text("utf-8")
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise MissingWordList("bundled easy-word list missing") from exc
    return _read_word_file(data.splitlines())


def score_text(text: str, easy_words: Optional[FrozenSet[str]] = None, dc_adjusted: bool = False,
               syllable_overrides: Optional[Mapping[str, int]] = None) -> Dict[str, float]:
    st = tokenize(text, easy_words, syllable_overrides)
    out = {"FRE": fre(st), "FKG": fkg(st), "CLI": cli_index(st), "ARI": ari(st)}
    if easy_words is not None:
        out["DCRS"] = dcrs(st, adjusted=dc_adjusted)
    return out


def summarize(values) -> Dict[str, float]:
    """median / mean / sample std / min / max; std is 0 for a single value."""
    vals = list(values)
    if not vals:
        raise ValueError("no values to summarize")
    return {
        "median": statistics.median(vals),
        "mean": statistics.fmean(vals),
        "std": statistics.stdev(vals) if len(vals) > 1 else 0.0,
        "min": min(vals),
        "max": max(vals),
    }


def corpus_summary(dataset, easy_words: Optional[FrozenSet[str]] = None, dc_adjusted: bool = False,
                   syllable_overrides: Optional[Mapping[str, int]] = None) -> Dict[str, Dict[str, float]]:
    """Per-metric summaries over every statement's text."""
    if not dataset.statements:
        raise ValueError("dataset has no statements")
    per_metric: Dict[str, list] = {}
    for meta in dataset.statements:
        for k, v in score_text(meta.text, easy_words, dc_adjusted, syllable_overrides).items():
            per_metric.setdefault(k, []).append(v)
    return {k: summarize(v) for k, v in per_metric.items()}
