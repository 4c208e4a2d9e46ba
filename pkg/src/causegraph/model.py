"""Typed records for one row of a causal-annotation dataset.

Every record is a frozen dataclass. Event identity across the toolkit is
the normalized ``no_quantifier`` string, see :func:`normalize_event`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

__all__ = [
    "EmptyEvent",
    "ConfidenceLevel",
    "Confidence",
    "Explicitness",
    "Polarity",
    "Combined",
    "StatementMeta",
    "EventSide",
    "AnnotatedRelation",
    "IPCC_ABBREVIATIONS",
    "normalize_event",
    "resolve_abbreviations",
    "parse_abbreviations",
    "format_abbreviations",
    "parse_confidence",
    "graph_key",
    "graph_equivalent",
]

_WS = re.compile(r"\s+")


class EmptyEvent(ValueError):
    """Raised when an event string is empty after trimming."""


class ConfidenceLevel(enum.IntEnum):
    LOW = 1
    LOW_TO_MEDIUM = 2
    MEDIUM = 3
    MEDIUM_TO_HIGH = 4
    HIGH = 5
    VERY_HIGH = 6


_CONFIDENCE_WORDS = {
    "low": ConfidenceLevel.LOW,
    "low to medium": ConfidenceLevel.LOW_TO_MEDIUM,
    "medium": ConfidenceLevel.MEDIUM,
    "medium to high": ConfidenceLevel.MEDIUM_TO_HIGH,
    "high": ConfidenceLevel.HIGH,
    "very high": ConfidenceLevel.VERY_HIGH,
}


@dataclass(frozen=True)
class Confidence:
    """A confidence label as written, plus its ordered level if recognised."""

    raw: str
    level: Optional[ConfidenceLevel] = None

    @property
    def known(self) -> bool:
        return self.level is not None


def parse_confidence(raw: Optional[str]) -> Optional[Confidence]:
    """Parse labels like ``"High confidence"`` or ``"medium-to-high"``.

    Matching is case-insensitive. Unrecognised labels keep their raw text
    with ``level=None``; the validator turns those into warnings.
    """
    if raw is None:
        return None
    text = raw.strip()
    if not text or text == "/":
        return None
    key = text.lower().strip("()[] ")
    key = re.sub(r"\bconfidence\b", " ", key)
    key = key.replace("-", " ").replace("_", " ")
    key = _WS.sub(" ", key).strip()
    return Confidence(raw=text, level=_CONFIDENCE_WORDS.get(key))


class Explicitness(enum.Enum):
    EXPLICIT = "E"
    IMPLICIT = "I"


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @property
    def sign(self) -> str:
        return "+" if self is Polarity.POSITIVE else "-"


class Combined(enum.Enum):
    YES = "yes"
    NO = "no"
    NOT_APPLICABLE = "n/a"


@dataclass(frozen=True)
class StatementMeta:
    statement_id: str
    text: str
    section: str = ""
    paragraph: str = ""
    series_ordinal: int = 1
    confidence: Optional[Confidence] = None
    causation: bool = True

    def __post_init__(self):
        if not self.statement_id:
            raise ValueError("statement_id must be nonempty")
        if not self.text.strip():
            raise ValueError(f"statement {self.statement_id!r} has empty text")
        if self.series_ordinal < 1:
            raise ValueError(f"series_ordinal must be >= 1, got {self.series_ordinal}")


@dataclass(frozen=True)
class EventSide:
    """Cause or effect of one relation.

    Empty strings stand for absent features ("/" in the source file).
    """

    np: str
    no_quantifier: str
    context: str = ""
    belongs_to: str = ""

    @property
    def node(self) -> str:
        """Graph node identity of this event."""
        return normalize_event(self.no_quantifier or self.np)


@dataclass(frozen=True)
class AnnotatedRelation:
    meta: StatementMeta
    cause: EventSide
    effect: EventSide
    explicitness: Explicitness
    relation_type: Polarity
    correlation: Polarity
    target: Optional[str] = None
    combined: Combined = Combined.NOT_APPLICABLE
    nested: bool = False
    abbreviations: tuple = ()
    confidence: Optional[Confidence] = None
    row: int = field(default=-1, compare=False)

    @property
    def statement_id(self) -> str:
        return self.meta.statement_id

    @property
    def has_overarching(self) -> bool:
        return bool(self.cause.belongs_to or self.effect.belongs_to)


# Resolved report abbreviations.
IPCC_ABBREVIATIONS = (
    ("AFOLU", "Agriculture, Forestry, and Other Land Use"),
    ("CH4", "Methane"),
    ("CO2", "Carbon dioxide"),
    ("CO2-FFI", "Carbon dioxide from fossil fuels and industrial processes"),
    ("CO2-LULUCF", "Carbon dioxide emissions from land use, land-use change and forestry"),
    ("GHG", "Greenhouse gases"),
    ("GDP", "Gross domestic product"),
    ("LDC", "Least Developed Countries"),
    ("N2O", "Nitrous oxide"),
    ("O3", "Tropospheric ozone"),
    ("SIDS", "Small Island Developing States"),
    ("SLCF", "Short-Lived Climate Forcers"),
)


def normalize_event(raw: str) -> str:
    """Trim, collapse internal whitespace and case-fold an event string.

    >>> normalize_event("GHG   emissions")
    'ghg emissions'
    """
    if raw is None:
        raise EmptyEvent("event is None")
    out = _WS.sub(" ", raw).strip().casefold()
    if not out:
        raise EmptyEvent("event string is empty")
    return out


def resolve_abbreviations(text: str, table: Iterable[Sequence[str]]) -> str:
    """Replace whole-token short forms with their long forms.

    Tokens are delimited by anything other than word characters and ``-``,
    so ``CO2`` never matches inside ``CO2-FFI``. Longer short forms win and
    the substitution runs in a single pass, so long forms are never
    rescanned.
    """
    mapping = {}
    for short, long in table:
        if not short:
            raise ValueError("abbreviation with empty short form")
        mapping.setdefault(short, long)
    if not mapping:
        return text
    alternatives = "|".join(re.escape(s) for s in sorted(mapping, key=len, reverse=True))
    pattern = re.compile(rf"(?<![\w-])(?:{alternatives})(?![\w-])")
    return pattern.sub(lambda m: mapping[m.group(0)], text)


def parse_abbreviations(raw: Optional[str]) -> tuple:
    """Parse ``"{GHG = greenhouse gases; AFOLU = ...}"`` into pairs.

    Malformed entries are kept with an empty side so validation can flag them.
    """
    if raw is None:
        return ()
    text = raw.strip()
    if not text or text == "/":
        return ()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        short, sep, long = chunk.partition("=")
        pairs.append((short.strip(), long.strip() if sep else ""))
    return tuple(pairs)


def format_abbreviations(pairs: Sequence[Sequence[str]]) -> str:
    if not pairs:
        return "/"
    return "; ".join(f"{s} = {l}" for s, l in pairs)


def graph_key(relation: AnnotatedRelation) -> tuple:
    """Normalized (cause, effect) pair; equal keys mean the same graph edge."""
    return (relation.cause.node, relation.effect.node)


def graph_equivalent(a: AnnotatedRelation, b: AnnotatedRelation) -> bool:
    return graph_key(a) == graph_key(b)
