"""Read a delimited annotation file into a :class:`Dataset` and lint it.

Parsing raises on structural problems (missing columns, unparseable enum
values, conflicting statement metadata). Everything the annotation
guidelines forbid but a file can still express ends up as an entry of a
:class:`ValidationReport` instead.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import re
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from typing import BinaryIO, Dict, List, Optional, Sequence, Tuple, Union

from .model import (
    AnnotatedRelation,
    Combined,
    Confidence,
    EmptyEvent,
    EventSide,
    Explicitness,
    Polarity,
    StatementMeta,
    format_abbreviations,
    graph_key,
    normalize_event,
    parse_abbreviations,
    parse_confidence,
)

logger = logging.getLogger(__name__)

__all__ = [
    "IngestError",
    "MissingColumn",
    "BadEnum",
    "BadOrdinal",
    "MetadataConflict",
    "IngestConfig",
    "Dataset",
    "Issue",
    "ValidationReport",
    "FeatureCounts",
    "COLUMNS",
    "parse_dataset",
    "load_dataset",
    "serialize_dataset",
    "validate",
    "compute_counts",
]


class IngestError(ValueError):
    """Base class for errors that make a file unreadable."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class MissingColumn(IngestError):
    pass


class BadEnum(IngestError):
    pass


class BadOrdinal(IngestError):
    pass


class MetadataConflict(IngestError):
    pass


# canonical key -> (header written on serialization, accepted squashed aliases)
COLUMNS: "OrderedDict[str, Tuple[str, Tuple[str, ...]]]" = OrderedDict(
    [
        ("statement_link", ("Statement link", ("statementlink", "link", "url", "statementurl", "statementid"))),
        ("section", ("Section", ("section", "sectiontitle"))),
        ("paragraph", ("Paragraph", ("paragraph", "paragraphid"))),
        ("series_ordinal", ("Series ordinal", ("seriesordinal", "ordinal"))),
        ("statement", ("Statement", ("statement", "statementtext", "text"))),
        ("confidence", ("Confidence level", ("confidencelevel", "confidence"))),
        ("causation", ("Causation", ("causation",))),
        ("target", ("Target", ("target", "targetword", "targetwords"))),
        ("explicitness", ("Explicitness", ("explicitness",))),
        ("cause_np", ("Cause--NP", ("causenp",))),
        ("cause_context", ("Cause--Context", ("causecontext",))),
        ("cause_no_quantifier", ("Cause--No_Quantifier", ("causenoquantifier", "causenoquantifiers"))),
        ("cause_belongs_to", ("Cause--Belongs_to", ("causebelongsto",))),
        ("effect_np", ("Effect--NP", ("effectnp",))),
        ("effect_context", ("Effect--Context", ("effectcontext",))),
        ("effect_no_quantifier", ("Effect--No_Quantifier", ("effectnoquantifier", "effectnoquantifiers"))),
        ("effect_belongs_to", ("Effect--Belongs_to", ("effectbelongsto",))),
        ("relation_type", ("Relation type", ("relationtype",))),
        ("correlation", ("Correlation", ("correlation",))),
        ("abbreviations", ("Abbreviations", ("abbreviations", "abbreviation"))),
        ("combined", ("Combined", ("combined",))),
        ("nested", ("Nested", ("nested", "nestedcausality"))),
    ]
)

REQUIRED = (
    "statement_link",
    "statement",
    "causation",
    "target",
    "explicitness",
    "cause_np",
    "cause_no_quantifier",
    "effect_np",
    "effect_no_quantifier",
    "relation_type",
    "correlation",
)

_YES = {"yes", "y", "true", "1"}
_NO = {"no", "n", "false", "0"}
_POLARITY = {
    "positive": Polarity.POSITIVE,
    "pos": Polarity.POSITIVE,
    "+": Polarity.POSITIVE,
    "negative": Polarity.NEGATIVE,
    "neg": Polarity.NEGATIVE,
    "-": Polarity.NEGATIVE,
}
_EXPLICITNESS = {
    "e": Explicitness.EXPLICIT,
    "explicit": Explicitness.EXPLICIT,
    "i": Explicitness.IMPLICIT,
    "implicit": Explicitness.IMPLICIT,
}


def _squash(header: str) -> str:
    return re.sub(r"[^a-z0-9]", "", header.lower())


def _clean(value: Optional[str]) -> str:
    """Strip a cell; the "/" sentinel and blanks become ""."""
    if value is None:
        return ""
    value = value.strip()
    return "" if value == "/" else value


@dataclass(frozen=True)
class IngestConfig:
    delimiter: str = ","
    encoding: str = "utf-8-sig"
    # "global": distinct (cause, effect) pairs over the file; "statement": per statement
    unique_relation_scope: str = "global"


@dataclass(frozen=True)
class Dataset:
    statements: tuple
    relations: tuple
    source_digest: str = ""

    def relations_of(self, statement_id: str) -> tuple:
        return self._by_statement.get(statement_id, ())

    @property
    def _by_statement(self) -> Dict[str, tuple]:
        cached = self.__dict__.get("_by_statement_cache")
        if cached is None:
            grouped: Dict[str, list] = {s.statement_id: [] for s in self.statements}
            for rel in self.relations:
                grouped.setdefault(rel.statement_id, []).append(rel)
            cached = {k: tuple(v) for k, v in grouped.items()}
            object.__setattr__(self, "_by_statement_cache", cached)
        return cached

    def __len__(self):
        return len(self.relations)


def _header_map(fieldnames: Sequence[str]) -> Dict[str, str]:
    lookup = {}
    for canonical, (_, aliases) in COLUMNS.items():
        for alias in aliases:
            lookup[alias] = canonical
    mapping: Dict[str, str] = {}
    for name in fieldnames:
        canonical = lookup.get(_squash(name or ""))
        if canonical is not None and canonical not in mapping:
            mapping[canonical] = name
    missing = [c for c in REQUIRED if c not in mapping]
    if missing:
        raise MissingColumn(
            "header lacks required feature(s): " + ", ".join(COLUMNS[c][0] for c in missing)
        )
    return mapping


def _yes_no(value: str, row: int, column: str, default: Optional[bool] = None) -> Optional[bool]:
    v = value.lower()
    if not v:
        return default
    if v in _YES:
        return True
    if v in _NO:
        return False
    raise BadEnum(f"expected yes/no, got {value!r}", row, column)


def _enum(value: str, table: dict, row: int, column: str, expected: str):
    if not value:
        raise BadEnum(f"missing value, expected {expected}", row, column)
    try:
        return table[value.lower()]
    except KeyError:
        raise BadEnum(f"expected {expected}, got {value!r}", row, column) from None


def _read_bytes(source: Union[bytes, str, os.PathLike, BinaryIO]) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def parse_dataset(source, config: IngestConfig = IngestConfig()) -> Dataset:
    """Parse delimited UTF-8 text (bytes, a path or a binary stream).

    One :class:`AnnotatedRelation` per data row of a causal statement; rows
    that share a statement link collapse into one :class:`StatementMeta`.
    Row numbers in errors are 1-based data-row indices (header excluded).
    """
    data = _read_bytes(source)
    digest = hashlib.sha256(data).hexdigest()
    text = data.decode(config.encoding)
    reader = csv.DictReader(io.StringIO(text, newline=""), delimiter=config.delimiter)
    if reader.fieldnames is None:
        raise MissingColumn("file has no header row")
    cols = _header_map(reader.fieldnames)

    statements: "OrderedDict[str, StatementMeta]" = OrderedDict()
    relations: List[AnnotatedRelation] = []
    for row_no, raw in enumerate(reader, start=1):
        get = lambda key: _clean(raw.get(cols[key])) if key in cols else ""  # noqa: E731
        if not any(_clean(v) for v in raw.values() if isinstance(v, str)):
            continue
        link = get("statement_link")
        if not link:
            raise IngestError("empty statement link", row_no, cols["statement_link"])
        ordinal_raw = get("series_ordinal")
        try:
            ordinal = int(ordinal_raw) if ordinal_raw else 1
        except ValueError:
            raise BadOrdinal(f"series ordinal {ordinal_raw!r} is not an integer", row_no,
                             cols.get("series_ordinal")) from None
        cause_np = get("cause_np")
        causation = _yes_no(get("causation"), row_no, cols["causation"], default=bool(cause_np))
        confidence = parse_confidence(get("confidence"))
        try:
            meta = StatementMeta(
                statement_id=link,
                text=raw.get(cols["statement"], "").strip(),
                section=get("section"),
                paragraph=get("paragraph"),
                series_ordinal=ordinal,
                confidence=confidence,
                causation=causation,
            )
        except ValueError as exc:
            if isinstance(exc, IngestError):
                raise
            raise IngestError(str(exc), row_no) from None

        seen = statements.get(link)
        if seen is None:
            statements[link] = meta
        else:
            for attr in ("text", "section", "paragraph", "series_ordinal", "causation"):
                if getattr(seen, attr) != getattr(meta, attr):
                    raise MetadataConflict(
                        f"statement {link!r} has conflicting {attr}: "
                        f"{getattr(seen, attr)!r} vs {getattr(meta, attr)!r}",
                        row_no,
                    )
            meta = seen

        if not any(get(k) for k in ("cause_np", "cause_no_quantifier", "effect_np", "effect_no_quantifier")):
            # statement-only row (no causation, or a causal statement awaiting annotation)
            continue

        cause = EventSide(
            np=cause_np,
            no_quantifier=get("cause_no_quantifier"),
            context=get("cause_context"),
            belongs_to=get("cause_belongs_to"),
        )
        effect = EventSide(
            np=get("effect_np"),
            no_quantifier=get("effect_no_quantifier"),
            context=get("effect_context"),
            belongs_to=get("effect_belongs_to"),
        )
        combined_flag = _yes_no(get("combined"), row_no, cols.get("combined", "combined"))
        if combined_flag is None:
            combined = Combined.NOT_APPLICABLE
        else:
            combined = Combined.YES if combined_flag else Combined.NO
        relations.append(
            AnnotatedRelation(
                meta=meta,
                cause=cause,
                effect=effect,
                explicitness=_enum(get("explicitness"), _EXPLICITNESS, row_no,
                                   cols["explicitness"], "E/I"),
                relation_type=_enum(get("relation_type"), _POLARITY, row_no,
                                    cols["relation_type"], "positive/negative"),
                correlation=_enum(get("correlation"), _POLARITY, row_no,
                                  cols["correlation"], "positive/negative"),
                target=get("target") or None,
                combined=combined,
                nested=bool(_yes_no(get("nested"), row_no, cols.get("nested", "nested"), False)),
                abbreviations=parse_abbreviations(get("abbreviations")),
                confidence=confidence,
                row=row_no,
            )
        )
    logger.debug("parsed %d statements, %d relations", len(statements), len(relations))
    return Dataset(statements=tuple(statements.values()), relations=tuple(relations),
                   source_digest=digest)


def load_dataset(path, config: IngestConfig = IngestConfig()) -> Dataset:
    return parse_dataset(os.fspath(path), config)


def _slash(value: Optional[str]) -> str:
    return value if value else "/"


def _confidence_text(conf: Optional[Confidence]) -> str:
    return conf.raw if conf is not None else "/"


def serialize_dataset(dataset: Dataset) -> bytes:
    """Write a dataset back out with canonical headers.

    Statements without relations get one row with empty relation fields.
    """
    out = io.StringIO(newline="")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([header for header, _ in COLUMNS.values()])

    def meta_cells(meta: StatementMeta, confidence):
        return [
            meta.statement_id,
            _slash(meta.section),
            _slash(meta.paragraph),
            str(meta.series_ordinal),
            meta.text,
            _confidence_text(confidence),
            "Yes" if meta.causation else "No",
        ]

    for meta in dataset.statements:
        rels = dataset.relations_of(meta.statement_id)
        if not rels:
            writer.writerow(meta_cells(meta, meta.confidence) + ["/"] * (len(COLUMNS) - 7))
            continue
        for rel in rels:
            if rel.combined is Combined.NOT_APPLICABLE:
                combined = "/"
            else:
                combined = "Yes" if rel.combined is Combined.YES else "No"
            writer.writerow(
                meta_cells(meta, rel.confidence)
                + [
                    _slash(rel.target),
                    rel.explicitness.value,
                    _slash(rel.cause.np),
                    _slash(rel.cause.context),
                    _slash(rel.cause.no_quantifier),
                    _slash(rel.cause.belongs_to),
                    _slash(rel.effect.np),
                    _slash(rel.effect.context),
                    _slash(rel.effect.no_quantifier),
                    _slash(rel.effect.belongs_to),
                    rel.relation_type.value.capitalize(),
                    rel.correlation.value.capitalize(),
                    format_abbreviations(rel.abbreviations),
                    combined,
                    "Yes" if rel.nested else "/",
                ]
            )
    return out.getvalue().encode("utf-8")


@dataclass(frozen=True)
class Issue:
    row: int
    rule: str
    message: str

    def to_dict(self):
        return {"row": self.row, "rule": self.rule, "message": self.message}


@dataclass
class ValidationReport:
    errors: List[Issue] = field(default_factory=list)
    warnings: List[Issue] = field(default_factory=list)
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "counts": dict(self.counts),
            "errors": [e.to_dict() for e in self.errors],
            "warnings": [w.to_dict() for w in self.warnings],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)


def overarching_kind(rel: AnnotatedRelation) -> str:
    """"combined", "examples" or "none" for the overarching-structure tally."""
    if rel.combined is Combined.YES:
        return "combined"
    if rel.combined is Combined.NO:
        return "examples"
    return "none"


def _table3_counts(dataset: Dataset, config: IngestConfig) -> Dict[str, int]:
    rels = dataset.relations
    stmts = dataset.statements
    kinds = Counter(overarching_kind(r) for r in rels)
    if config.unique_relation_scope == "statement":
        pairs = set()
        for r in rels:
            try:
                pairs.add((r.statement_id,) + graph_key(r))
            except EmptyEvent:
                pass
    else:
        pairs = set()
        for r in rels:
            try:
                pairs.add(graph_key(r))
            except EmptyEvent:
                pass
    targets = {normalize_event(r.target) for r in rels if r.target}
    return {
        "sections": len({s.section for s in stmts if s.section}),
        "paragraphs": len({s.paragraph for s in stmts if s.paragraph}),
        "statements": len(stmts),
        "causation_yes": sum(1 for s in stmts if s.causation),
        "causation_no": sum(1 for s in stmts if not s.causation),
        "relations": len(rels),
        "explicit": sum(1 for r in rels if r.explicitness is Explicitness.EXPLICIT),
        "implicit": sum(1 for r in rels if r.explicitness is Explicitness.IMPLICIT),
        "rel_pos": sum(1 for r in rels if r.relation_type is Polarity.POSITIVE),
        "rel_neg": sum(1 for r in rels if r.relation_type is Polarity.NEGATIVE),
        "corr_pos": sum(1 for r in rels if r.correlation is Polarity.POSITIVE),
        "corr_neg": sum(1 for r in rels if r.correlation is Polarity.NEGATIVE),
        "nested_yes": sum(1 for r in rels if r.nested),
        "nested_no": sum(1 for r in rels if not r.nested),
        "overarching_none": kinds["none"],
        "overarching_examples": kinds["examples"],
        "overarching_combined": kinds["combined"],
        "unique_relations": len(pairs),
        "unique_targets": len(targets),
    }


def _same_event(a: str, b: str) -> bool:
    try:
        return normalize_event(a) == normalize_event(b)
    except EmptyEvent:
        return False


def validate(dataset: Dataset, config: IngestConfig = IngestConfig()) -> ValidationReport:
    """Check every annotation rule; never raises on rule violations."""
    report = ValidationReport()
    err = lambda row, rule, msg: report.errors.append(Issue(row, rule, msg))  # noqa: E731
    warn = lambda row, rule, msg: report.warnings.append(Issue(row, rule, msg))  # noqa: E731

    for meta in dataset.statements:
        n = len(dataset.relations_of(meta.statement_id))
        if not meta.causation and n:
            err(-1, "no-relations-without-causation",
                f"statement {meta.statement_id} has causation=no but {n} relation(s)")
        if meta.causation and not n:
            warn(-1, "causation-without-relations",
                 f"statement {meta.statement_id} has causation=yes but no relations")
        if meta.confidence is not None and not meta.confidence.known:
            warn(-1, "unknown-confidence", f"unrecognised confidence label {meta.confidence.raw!r}")

    for rel in dataset.relations:
        row = rel.row
        if rel.target is None and rel.explicitness is Explicitness.EXPLICIT:
            err(row, "implicit-if-no-target", "target is absent but explicitness is E")
        for side_name, side in (("cause", rel.cause), ("effect", rel.effect)):
            if not side.np:
                err(row, f"{side_name}-np-required", f"{side_name} NP is empty")
            if side.np and not side.no_quantifier:
                err(row, f"{side_name}-no-quantifier-required",
                    f"{side_name} No_Quantifier is empty while NP is set")
            if side.context and side.no_quantifier and _same_event(side.context, side.no_quantifier):
                err(row, f"{side_name}-context-equals-event",
                    f"{side_name} context repeats the event {side.context!r}")
        if rel.combined is not Combined.NOT_APPLICABLE and not rel.has_overarching:
            err(row, "combined-needs-belongs-to",
                "Combined is set but neither side has a Belongs_to event")
        if rel.nested and not rel.effect.belongs_to:
            err(row, "nested-needs-effect-belongs-to", "nested relation without effect Belongs_to")
        for short, long in rel.abbreviations:
            if not short or not long:
                err(row, "abbreviation-nonempty", f"malformed abbreviation pair ({short!r}, {long!r})")
        try:
            cause_node, effect_node = graph_key(rel)
        except EmptyEvent:
            pass
        else:
            if cause_node == effect_node:
                err(row, "no-self-loop", f"cause and effect normalize to the same event {cause_node!r}")
        if rel.confidence is not None and not rel.confidence.known and rel.confidence != rel.meta.confidence:
            warn(row, "unknown-confidence", f"unrecognised confidence label {rel.confidence.raw!r}")

    report.counts = _table3_counts(dataset, config)
    return report


@dataclass(frozen=True)
class FeatureCounts:
    """2x2 tables, rows = correlation (positive, negative)."""

    explicitness: tuple  # cols: explicit, implicit
    relation_type: tuple  # cols: positive, negative
    nested: tuple  # cols: yes, no

    def as_dict(self) -> Dict[str, tuple]:
        return {
            "explicitness": self.explicitness,
            "relation_type": self.relation_type,
            "nested": self.nested,
        }


def compute_counts(dataset: Dataset) -> FeatureCounts:
    def table(column_of) -> tuple:
        cells = [[0, 0], [0, 0]]
        for rel in dataset.relations:
            r = 0 if rel.correlation is Polarity.POSITIVE else 1
            cells[r][column_of(rel)] += 1
        return tuple(tuple(row) for row in cells)

    return FeatureCounts(
        explicitness=table(lambda r: 0 if r.explicitness is Explicitness.EXPLICIT else 1),
        relation_type=table(lambda r: 0 if r.relation_type is Polarity.POSITIVE else 1),
        nested=table(lambda r: 0 if r.nested else 1),
    )
