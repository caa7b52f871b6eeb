"""
Per-clue relevance statistics.

Two ways to obtain a record: `compute_relevance` counts hand-made judgments
and always satisfies total = conventional + new + metaphoric_contexts;
`import_recorded` keeps five published numbers verbatim and only warns when
the category counts do not add up to the total.
"""

import logging
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from .clue_models import (
    Catalog, ClueDefinition, Diagnostic, Judgment, JudgmentLabel, RelevanceRecord, Severity,
)
from .text_models import StkError

logger = logging.getLogger(__name__)


class RelevanceError(StkError):
    """Raised when recorded counts are impossible"""
    pass


class DuplicateJudgmentError(StkError):
    """Raised when the same clue occurrence is judged twice"""

    def __init__(self, key: Tuple[str, str, int, int]):
        self.key = key
        clue, doc, sentence, unit = key
        super().__init__(f"duplicate judgment for clue {clue!r} in {doc!r} at sentence {sentence}, unit {unit}")


class JudgmentFormatError(StkError):
    """Raised on malformed judgment files"""
    pass


def compute_relevance(judgments: Iterable[Judgment], clue_name: str) -> RelevanceRecord:
    """Count the judgments of one clue; an unknown clue gives an all-zero record"""
    seen = set()
    labels: Counter = Counter()
    for judgment in judgments:
        if judgment.key in seen:
            raise DuplicateJudgmentError(judgment.key)
        seen.add(judgment.key)
        if judgment.clue_name == clue_name:
            labels[judgment.label] += 1

    occurrences = sum(labels.values())
    return RelevanceRecord(
        occurrences=occurrences,
        conventional=labels[JudgmentLabel.CONVENTIONAL],
        new=labels[JudgmentLabel.NEW],
        metaphoric_contexts=labels[JudgmentLabel.METAPHORIC_CONTEXT],
        total=occurrences - labels[JudgmentLabel.NONE],
    )


def check_record(record: RelevanceRecord, clue_name: Optional[str] = None) -> List[Diagnostic]:
    """Warnings for a record whose category counts do not sum to its total"""
    category_sum = record.conventional + record.new + record.metaphoric_contexts
    if category_sum == record.total:
        return []
    return [Diagnostic(
        severity=Severity.WARNING,
        clue_name=clue_name,
        invariant="relevance-sum",
        message=f"category counts sum to {category_sum}, total is {record.total} ({category_sum} != {record.total})",
    )]


def import_recorded(counts: Sequence[int], clue_name: Optional[str] = None) -> RelevanceRecord:
    """
    Store (occurrences, conventional, new, metaphoric_contexts, total)
    verbatim. A sum mismatch is logged as a warning; a total above the
    occurrence count or a negative count is an error.
    """
    if len(counts) != 5:
        raise RelevanceError(f"expected 5 counts, got {len(counts)}")
    occurrences, conventional, new, contexts, total = counts
    if min(counts) < 0:
        raise RelevanceError(f"negative count in {tuple(counts)}")
    if total > occurrences:
        raise RelevanceError(f"total {total} exceeds occurrences {occurrences}")

    record = RelevanceRecord(
        occurrences=occurrences,
        conventional=conventional,
        new=new,
        metaphoric_contexts=contexts,
        total=total,
    )
    for diagnostic in check_record(record, clue_name):
        logger.warning(str(diagnostic))
    return record


def nonliteral_probability(clue: ClueDefinition) -> Optional[Fraction]:
    """Relevance ratio of the clue, None without a record or occurrences"""
    if clue.relevance is None:
        return None
    return clue.relevance.ratio


def merge_records(records: Iterable[RelevanceRecord]) -> RelevanceRecord:
    merged = RelevanceRecord()
    for record in records:
        merged = merged + record
    return merged


def format_ratio(ratio: Optional[Fraction]) -> str:
    return "n/a" if ratio is None else f"{float(ratio):.4f}"


def parse_judgments(text: str) -> List[Judgment]:
    """Parse `clue<TAB>doc<TAB>sentence<TAB>unit<TAB>label` lines"""
    judgments: List[Judgment] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = raw.rstrip("\r\n").split("\t")
        if len(fields) != 5:
            raise JudgmentFormatError(f"line {number}: expected 5 tab-separated fields, got {len(fields)}")
        clue_name, doc_id, sentence, unit, label = (f.strip() for f in fields)
        try:
            judgments.append(Judgment(
                clue_name=clue_name,
                doc_id=doc_id,
                sentence_index=int(sentence),
                unit_index=int(unit),
                label=JudgmentLabel(label),
            ))
        except (ValueError, ValidationError) as e:
            raise JudgmentFormatError(f"line {number}: {e}") from None
    return judgments


def load_judgments(path: Union[str, Path]) -> List[Judgment]:
    return parse_judgments(Path(path).read_text(encoding="utf-8"))


class RelevanceRow(BaseModel):
    """One line of the relevance report"""
    name: str
    record: RelevanceRecord
    source: str = Field(description="computed, recorded or none")
    warnings: List[str] = Field(default_factory=list)

    def format(self) -> str:
        r = self.record
        return "\t".join([
            self.name, str(r.occurrences), str(r.conventional), str(r.new),
            str(r.metaphoric_contexts), str(r.total), format_ratio(r.ratio),
            "; ".join(self.warnings) or "-",
        ])


RELEVANCE_HEADER = "\t".join(["name", "occurrences", "conv", "new", "ctx", "total", "ratio", "warnings"])


def relevance_table(catalog: Catalog, judgments: Sequence[Judgment]) -> List[RelevanceRow]:
    """
    One row per catalog clue, in catalog order: computed from the judgments
    when any exist for the clue, otherwise the recorded counts.
    """
    known = {clue.name for clue in catalog.clues}
    for name in sorted({j.clue_name for j in judgments} - known):
        logger.warning(f"judgments name unknown clue {name!r}")

    judged = {j.clue_name for j in judgments}
    rows: List[RelevanceRow] = []
    for clue in catalog.clues:
        if clue.name in judged:
            record, source = compute_relevance(judgments, clue.name), "computed"
        elif clue.relevance is not None:
            record, source = clue.relevance, "recorded"
        else:
            record, source = RelevanceRecord(), "none"
        warnings = [d.message for d in check_record(record, clue.name)]
        rows.append(RelevanceRow(name=clue.name, record=record, source=source, warnings=warnings))
    return rows


def with_computed_relevance(catalog: Catalog, judgments: Sequence[Judgment]) -> Catalog:
    """Copy of the catalog whose judged clues carry their computed records"""
    judged = {j.clue_name for j in judgments}
    clues = tuple(
        clue.model_copy(update={"relevance": compute_relevance(judgments, clue.name)})
        if clue.name in judged else clue
        for clue in catalog.clues
    )
    return catalog.model_copy(update={"clues": clues})
