"""
Clue catalog: parsing, validation and canonical serialization.

A catalog file is a sequence of line-oriented blocks:

    clue B.2.2.2
      type    metaphor-analogy
      comment comparison involving the meaning of a marker
      ssp     GN_0 GN_1 V_1 Adj_0 [prep] GN_2
      lm      Adj_0 = pareil
      target  GN_1
      source  GN_2
      relevance 28 3 2 12 15

An optional top-level `skip CAT...` line before the first block sets the
categories the matcher may step over. `#` starts a comment line.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .clue_models import (
    DEFAULT_SKIP_CATEGORIES, SKIPPABLE_LABELS, Catalog, ClueDefinition, ClueType, Diagnostic,
    ElementCategory, MarkerConstraint, PatternElement, RelevanceRecord, SlotRef,
)
from .relevance import RelevanceError, check_record, import_recorded
from .text_models import StkError

logger = logging.getLogger(__name__)

FIELD_ORDER = ("type", "comment", "ssp", "lm", "target", "source", "relevance")
REQUIRED_FIELDS = ("type", "ssp", "lm")


class CatalogError(StkError):
    """Raised when catalog text cannot be turned into a valid catalog"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ClueValidator:
    """Checks every ClueDefinition invariant and reports diagnostics"""

    @staticmethod
    def check_text(clue: ClueDefinition) -> List[Diagnostic]:
        """Name and comment must survive the line-oriented catalog format"""
        diagnostics = []
        if clue.name.split() != [clue.name]:
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="name-form",
                message=f"clue name {clue.name!r} must be a single non-blank word",
            ))
        comment = clue.comment
        if comment != comment.strip() or len(comment.splitlines()) > 1:
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="comment-form",
                message=f"comment {comment!r} must be one line without surrounding whitespace",
            ))
        return diagnostics

    @staticmethod
    def check_ssp(clue: ClueDefinition) -> List[Diagnostic]:
        diagnostics = []
        if not clue.ssp:
            diagnostics.append(Diagnostic(clue_name=clue.name, invariant="empty-ssp", message="ssp has no element"))
            return diagnostics

        seen = set()
        for element in clue.ssp:
            if element.slot in seen:
                diagnostics.append(Diagnostic(
                    clue_name=clue.name,
                    invariant="unique-slots",
                    message=f"slot {element.slot.label} appears more than once in ssp",
                ))
            seen.add(element.slot)

        if all(element.optional for element in clue.ssp):
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="required-element",
                message="ssp needs at least one required element",
            ))
        return diagnostics

    @staticmethod
    def check_slot(clue: ClueDefinition, slot: SlotRef, role: str) -> List[Diagnostic]:
        element = clue.element(slot)
        if element is None:
            return [Diagnostic(
                clue_name=clue.name,
                invariant="unknown-slot",
                message=f"unknown slot {slot.label} in {role}",
            )]
        if not element.labeled:
            return [Diagnostic(
                clue_name=clue.name,
                invariant="unlabeled-slot",
                message=f"{role} refers to unlabeled element {element}",
            )]
        return []

    @staticmethod
    def check_marker(clue: ClueDefinition) -> List[Diagnostic]:
        diagnostics = ClueValidator.check_slot(clue, clue.lm.slot, "lm")
        element = clue.element(clue.lm.slot)
        if element is not None and element.optional:
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="optional-marker",
                message=f"marker slot {clue.lm.slot.label} must not be optional",
            ))
        if not clue.lm.lexemes:
            diagnostics.append(Diagnostic(clue_name=clue.name, invariant="empty-lexemes", message="lm lists no lexeme"))
        for lexeme in sorted(clue.lm.lexemes):
            if not lexeme or any(ch.isspace() for ch in lexeme) or "|" in lexeme:
                diagnostics.append(Diagnostic(
                    clue_name=clue.name,
                    invariant="lexeme-form",
                    message=f"lexeme {lexeme!r} must be a single word",
                ))
        return diagnostics

    @staticmethod
    def check_roles(clue: ClueDefinition) -> List[Diagnostic]:
        diagnostics = []
        if clue.target_slot is not None:
            diagnostics += ClueValidator.check_slot(clue, clue.target_slot, "target")
        if clue.source_slot is not None:
            diagnostics += ClueValidator.check_slot(clue, clue.source_slot, "source")
        if clue.target_slot is not None and clue.target_slot == clue.source_slot:
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="distinct-roles",
                message=f"target and source both refer to {clue.target_slot.label}",
            ))
        return diagnostics

    @staticmethod
    def check_relevance(clue: ClueDefinition) -> List[Diagnostic]:
        record = clue.relevance
        if record is None:
            return []
        diagnostics = []
        if min(record.counts) < 0:
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="negative-count",
                message=f"relevance counts must not be negative: {record.counts}",
            ))
        if record.total > record.occurrences:
            diagnostics.append(Diagnostic(
                clue_name=clue.name,
                invariant="relevance-total",
                message=f"relevance total {record.total} exceeds occurrences {record.occurrences}",
            ))
        return diagnostics


def validate_clue(clue: ClueDefinition) -> List[Diagnostic]:
    """Empty iff every ClueDefinition invariant holds"""
    return (
        ClueValidator.check_text(clue)
        + ClueValidator.check_ssp(clue)
        + ClueValidator.check_marker(clue)
        + ClueValidator.check_roles(clue)
        + ClueValidator.check_relevance(clue)
    )


def check_catalog(catalog: Catalog) -> List[Diagnostic]:
    """Validation errors plus relevance warnings for a whole catalog"""
    diagnostics: List[Diagnostic] = []
    for clue in catalog.clues:
        diagnostics += validate_clue(clue)
        if clue.relevance is not None:
            diagnostics += check_record(clue.relevance, clue.name)
    return diagnostics


def parse_element(text: str) -> PatternElement:
    optional = text.startswith("[") and text.endswith("]")
    inner = text[1:-1] if optional else text
    name, sep, index = inner.rpartition("_")
    labeled = bool(sep) and index.isdigit()
    if not labeled:
        name, index = inner, "0"
    try:
        category = ElementCategory(name)
    except ValueError:
        raise ValueError(f"unknown ssp element {text!r}") from None
    return PatternElement(category=category, index=int(index), optional=optional, labeled=labeled)


def _parse_marker(value: str) -> MarkerConstraint:
    slot_text, sep, lexemes_text = value.partition("=")
    if not sep:
        raise ValueError(f"expected 'Slot_n = lexeme | ...', got {value!r}")
    lexemes = [lexeme.strip() for lexeme in lexemes_text.split("|")]
    if not any(lexemes):
        raise ValueError("lm lists no lexeme")
    return MarkerConstraint(slot=SlotRef.parse(slot_text), lexemes=frozenset(lexemes))


def _parse_relevance(value: str, clue_name: str) -> RelevanceRecord:
    try:
        counts = [int(part) for part in value.split()]
    except ValueError:
        raise ValueError(f"relevance expects 5 integers, got {value!r}") from None
    return import_recorded(counts, clue_name)


def _build_clue(name: str, fields: Dict[str, Tuple[str, int]], header_line: int) -> ClueDefinition:
    for key in REQUIRED_FIELDS:
        if key not in fields:
            raise CatalogError(f"clue {name!r} lacks a '{key}' field", header_line)

    def field(key: str, convert):
        value, line = fields[key]
        try:
            return convert(value)
        except (ValueError, RelevanceError) as e:
            raise CatalogError(str(e), line) from None

    clue = ClueDefinition(
        clue_type=field("type", ClueType),
        name=name,
        comment=fields["comment"][0] if "comment" in fields else "",
        ssp=field("ssp", lambda v: tuple(parse_element(part) for part in v.split())),
        lm=field("lm", _parse_marker),
        target_slot=field("target", SlotRef.parse) if "target" in fields else None,
        source_slot=field("source", SlotRef.parse) if "source" in fields else None,
        relevance=field("relevance", lambda v: _parse_relevance(v, name)) if "relevance" in fields else None,
    )
    errors = validate_clue(clue)
    if errors:
        raise CatalogError("; ".join(d.message for d in errors), header_line)
    return clue


def parse_catalog(text: str) -> Catalog:
    """Parse catalog text; raises CatalogError with the offending line number"""
    clues: List[ClueDefinition] = []
    names: Dict[str, int] = {}
    skip = DEFAULT_SKIP_CATEGORIES
    current: Optional[Tuple[str, int, Dict[str, Tuple[str, int]]]] = None

    def finish():
        if current is not None:
            name, line, fields = current
            clues.append(_build_clue(name, fields, line))

    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(None, 1)
        key, value = parts[0], (parts[1].strip() if len(parts) > 1 else "")

        if not raw[0].isspace():
            if key == "clue":
                finish()
                if not value or len(value.split()) != 1:
                    raise CatalogError("clue name must be a single word", number)
                if value in names:
                    raise CatalogError(f"duplicate clue name {value!r} (first at line {names[value]})", number)
                names[value] = number
                current = (value, number, {})
            elif key == "skip":
                if current is not None or clues:
                    raise CatalogError("'skip' must come before the first clue", number)
                labels = frozenset(value.split())
                unknown = sorted(labels - SKIPPABLE_LABELS)
                if unknown:
                    raise CatalogError(f"unknown skip categories: {', '.join(unknown)}", number)
                skip = labels
            else:
                raise CatalogError(f"unknown keyword {key!r}", number)
            continue

        if current is None:
            raise CatalogError(f"field {key!r} outside a clue block", number)
        if key not in FIELD_ORDER:
            raise CatalogError(f"unknown key {key!r}", number)
        fields = current[2]
        if key in fields:
            raise CatalogError(f"repeated key {key!r} in clue {current[0]!r}", number)
        fields[key] = (value, number)

    finish()
    catalog = Catalog(clues=tuple(clues), skip_categories=skip)
    logger.info(f"catalog parsed: {len(catalog.clues)} clues")
    return catalog


def load_catalog(path: Union[str, Path]) -> Catalog:
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


def serialize_clue(clue: ClueDefinition) -> str:
    lines = [f"clue {clue.name}", f"  type {clue.clue_type.value}"]
    if clue.comment:
        lines.append(f"  comment {clue.comment}")
    lines.append(f"  ssp {' '.join(str(element) for element in clue.ssp)}")
    lines.append(f"  lm {clue.lm.slot.label} = {' | '.join(sorted(clue.lm.lexemes))}")
    if clue.target_slot is not None:
        lines.append(f"  target {clue.target_slot.label}")
    if clue.source_slot is not None:
        lines.append(f"  source {clue.source_slot.label}")
    if clue.relevance is not None:
        lines.append(f"  relevance {' '.join(str(count) for count in clue.relevance.counts)}")
    return "\n".join(lines) + "\n"


def serialize_catalog(catalog: Catalog) -> str:
    """Canonical text: fixed key order, single spaces, one blank line between blocks"""
    blocks = []
    if catalog.skip_categories != DEFAULT_SKIP_CATEGORIES:
        blocks.append(" ".join(["skip", *sorted(catalog.skip_categories)]) + "\n")
    blocks.extend(serialize_clue(clue) for clue in catalog.clues)
    return "\n".join(blocks)
