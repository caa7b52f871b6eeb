from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .clue_models import DEFAULT_SKIP_CATEGORIES
from .pipeline_text import DEFAULT_ABBREVIATIONS
from .text_models import Span


class Match(BaseModel):
    """A successful application of one clue to one chunked sentence"""
    model_config = ConfigDict(frozen=True)

    clue_name: str
    unit_range: Tuple[int, int]
    bindings: Dict[str, int] = Field(description="slot label (e.g. GN_1) -> unit index")
    span: Span
    marker_surface: str
    target_span: Optional[Span] = None
    source_span: Optional[Span] = None


class AnnotationRecord(BaseModel):
    """One standoff annotation of a clue occurrence"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    doc_id: str
    sentence_index: int = Field(ge=0)
    clue_name: str
    span: Span
    target_span: Optional[Span] = None
    source_span: Optional[Span] = None
    marker_surface: str
    probability: Optional[Fraction] = None
    unit_index: int = Field(default=0, ge=0, description="first unit of the match, the judgment key")


class FileFailure(BaseModel):
    path: str
    error_message: str
    timestamp: datetime = Field(default_factory=datetime.utcnow)


class AnnotationResult(BaseModel):
    """Outcome of annotating a corpus"""
    success: bool
    message: str
    records: List[AnnotationRecord] = Field(default_factory=list)
    documents: Dict[str, str] = Field(default_factory=dict, description="doc id -> text")
    failures: List[FileFailure] = Field(default_factory=list)
    processing_time_ms: Optional[float] = None


class ClueStats(BaseModel):
    """Occurrence counts of one clue across a corpus"""
    clue_name: str
    documents: int = 0
    occurrences: int = 0
    min_per_document: int = 0
    max_per_document: int = 0


class KwicLine(BaseModel):
    """One keyword-in-context concordance line"""
    doc_id: str
    sentence_index: int
    span: Span
    left: str
    keyword: str
    right: str
    tag: str


def check_mark_delimiters(open_mark: str, close_mark: str) -> None:
    """Raises ValueError for delimiters that inline marks cannot tell apart from their tags"""
    if open_mark == close_mark:
        raise ValueError(f"mark delimiters must differ, got {open_mark!r} twice")
    # an open delimiter starting a tag body would read as an escaped literal
    if open_mark in ("/", "c"):
        raise ValueError(f"open mark {open_mark!r} collides with the mark tags")


class StkOptions(BaseModel):
    """Pipeline configuration; loaded from JSON, overridden by CLI flags"""
    catalog: Optional[Path] = None
    lexicon: Optional[Path] = None
    rules: Optional[Path] = None
    skip: Optional[List[str]] = Field(default=None, description="overrides the catalog skip set")
    all_matches: bool = False
    inline: bool = False
    out: Optional[Path] = None
    pretagged: bool = False
    abbreviations: List[str] = Field(default_factory=lambda: sorted(DEFAULT_ABBREVIATIONS))
    mark_open: str = Field(default="⟪", min_length=1, max_length=1)
    mark_close: str = Field(default="⟫", min_length=1, max_length=1)
    workers: int = Field(default=1, ge=1)
    judgments_template: Optional[Path] = None

    @model_validator(mode="after")
    def _distinct_marks(self) -> "StkOptions":
        check_mark_delimiters(self.mark_open, self.mark_close)
        return self

    def skip_set(self, fallback=DEFAULT_SKIP_CATEGORIES) -> frozenset:
        return frozenset(self.skip) if self.skip is not None else frozenset(fallback)
