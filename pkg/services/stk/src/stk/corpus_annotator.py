"""
Corpus annotation: runs tokenize -> tag -> chunk -> match over documents
and turns matches into standoff records, inline marks and statistics.
"""

import logging
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import regex

from .annotation_models import (
    AnnotationRecord, AnnotationResult, ClueStats, FileFailure, KwicLine, Match, StkOptions,
    check_mark_delimiters,
)
from .chunker import chunk
from .clue_models import Catalog
from .matcher import match_all
from .pipeline_text import segment
from .relevance import nonliteral_probability
from .tagger import Lexicon, PretaggedFormatError, TransformationRule, read_pretagged, tag
from .text_models import Span, StkError, TaggedToken

logger = logging.getLogger(__name__)

STANDOFF_FIELDS = (
    "doc", "sentence", "clue", "start", "len", "target_start", "target_len",
    "source_start", "source_len", "marker", "prob",
)

_OPEN_TAG = regex.compile(r"clue (\S+) (target|source)")


class MarkSpanError(StkError):
    """Raised when a mark would fall outside the document or marks are malformed"""
    pass


class StandoffFormatError(StkError):
    """Raised on malformed standoff lines"""
    pass


class CorpusAnnotator:
    """
    Runs the whole pipeline over documents.

    The catalog, lexicon and rules are loaded once by the caller; the
    annotator is picklable so it can be shipped to worker processes.
    """

    def __init__(
        self,
        catalog: Catalog,
        lexicon: Optional[Lexicon],
        rules: Sequence[TransformationRule] = (),
        options: Optional[StkOptions] = None,
    ):
        self.catalog = catalog
        self.lexicon = lexicon if lexicon is not None else Lexicon(entries={})
        self.rules = list(rules)
        self.options = options or StkOptions()
        self.skip = self.options.skip_set(catalog.skip_categories)
        self.probabilities: Dict[str, Optional[Fraction]] = {
            clue.name: nonliteral_probability(clue) for clue in catalog.clues
        }
        self._clue_order = {clue.name: i for i, clue in enumerate(catalog.clues)}

    def tag_document(self, text: str) -> Tuple[str, List[List[TaggedToken]]]:
        """Tagged sentences of a document, and the text their spans refer to"""
        if self.options.pretagged:
            return read_pretagged(text)
        segmentation = segment(text, self.options.abbreviations)
        return text, [tag(tokens, self.lexicon, self.rules) for tokens in segmentation.tokens]

    def annotate_text(self, doc_id: str, text: str) -> Tuple[str, List[AnnotationRecord]]:
        document, sentences = self.tag_document(text)
        records: List[AnnotationRecord] = []
        for sentence_index, tagged in enumerate(sentences):
            units = chunk(tagged)
            for match in match_all(self.catalog, units, self.options.all_matches, self.skip):
                records.append(self.to_record(doc_id, sentence_index, match))
        logger.info(f"{doc_id}: {len(sentences)} sentences, {len(records)} matches")
        return document, records

    def to_record(self, doc_id: str, sentence_index: int, match: Match) -> AnnotationRecord:
        return AnnotationRecord(
            doc_id=doc_id,
            sentence_index=sentence_index,
            clue_name=match.clue_name,
            span=match.span,
            target_span=match.target_span,
            source_span=match.source_span,
            marker_surface=match.marker_surface,
            probability=self.probabilities.get(match.clue_name),
            unit_index=match.unit_range[0],
        )

    def annotate_path(self, path: Union[str, Path]) -> Tuple[str, Optional[str], List[AnnotationRecord], Optional[str]]:
        """(doc id, document text, records, error message) for one file"""
        doc_id = str(path)
        try:
            text = Path(path).read_text(encoding="utf-8")
            document, records = self.annotate_text(doc_id, text)
            return doc_id, document, records, None
        except (OSError, UnicodeDecodeError, PretaggedFormatError) as e:
            logger.warning(f"{doc_id}: {e}")
            return doc_id, None, [], str(e)

    def sort_records(self, records: Iterable[AnnotationRecord]) -> List[AnnotationRecord]:
        return sorted(
            records,
            key=lambda r: (r.doc_id, r.sentence_index, r.span.start, self._clue_order.get(r.clue_name, 0)),
        )

    def annotate_corpus(self, paths: Sequence[Union[str, Path]]) -> AnnotationResult:
        start_time = time.time()
        workers = min(self.options.workers, len(paths)) if paths else 1
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_annotate_one, [self] * len(paths), paths))
        else:
            outcomes = [self.annotate_path(path) for path in paths]

        records: List[AnnotationRecord] = []
        documents: Dict[str, str] = {}
        failures: List[FileFailure] = []
        for doc_id, document, doc_records, error in outcomes:
            if error is not None:
                failures.append(FileFailure(path=doc_id, error_message=error))
                continue
            documents[doc_id] = document
            records.extend(doc_records)

        processing_time = (time.time() - start_time) * 1000
        message = f"{len(documents)} documents annotated, {len(records)} records"
        if failures:
            message += f", {len(failures)} files failed"
        return AnnotationResult(
            success=not failures,
            message=message,
            records=self.sort_records(records),
            documents=documents,
            failures=failures,
            processing_time_ms=processing_time,
        )


def _annotate_one(annotator: CorpusAnnotator, path: Union[str, Path]):
    return annotator.annotate_path(path)


def annotate_corpus(
    paths: Sequence[Union[str, Path]],
    catalog: Catalog,
    lexicon: Optional[Lexicon],
    rules: Sequence[TransformationRule] = (),
    options: Optional[StkOptions] = None,
) -> AnnotationResult:
    """Annotate every file; unreadable files are reported in `failures`"""
    return CorpusAnnotator(catalog, lexicon, rules, options).annotate_corpus(paths)


def _escape(text: str, open_mark: str) -> str:
    return text.replace(open_mark, open_mark + open_mark)


def _delimiters(open_mark: str, close_mark: str) -> None:
    try:
        check_mark_delimiters(open_mark, close_mark)
    except ValueError as e:
        raise MarkSpanError(str(e)) from None


def mark_inline(
    text: str,
    records: Sequence[AnnotationRecord],
    open_mark: str = "⟪",
    close_mark: str = "⟫",
) -> str:
    """
    Wrap target and source spans in `⟪clue NAME role⟫...⟪/⟫` marks.
    Literal open delimiters in the text are doubled. A record whose role
    spans overlap an already marked span is left out with a warning.
    """
    _delimiters(open_mark, close_mark)
    marks: List[Tuple[Span, str, str]] = []
    taken: List[Span] = []
    for record in records:
        roles = [
            (role, span)
            for role, span in (("target", record.target_span), ("source", record.source_span))
            if span is not None
        ]
        for role, span in roles:
            if span.end > len(text):
                raise MarkSpanError(f"{role} span {span.start}-{span.end} of {record.clue_name} outside text of length {len(text)}")
        spans = [span for _, span in roles]
        clash = any(a.overlaps(b) for a in spans for b in taken) or (
            len(spans) == 2 and spans[0].overlaps(spans[1])
        )
        if clash:
            logger.warning(
                f"{record.doc_id}: {record.clue_name} at {record.span.start} overlaps another mark, kept in standoff only"
            )
            continue
        taken.extend(spans)
        marks.extend((span, record.clue_name, role) for role, span in roles)

    marks.sort(key=lambda m: (m[0].start, m[0].end))
    out: List[str] = []
    pos = 0
    for span, name, role in marks:
        out.append(_escape(text[pos:span.start], open_mark))
        out.append(f"{open_mark}clue {name} {role}{close_mark}")
        out.append(_escape(span.slice(text), open_mark))
        out.append(f"{open_mark}/{close_mark}")
        pos = span.end
    out.append(_escape(text[pos:], open_mark))
    return "".join(out)


def strip_marks(marked: str, open_mark: str = "⟪", close_mark: str = "⟫") -> str:
    """Inverse of mark_inline"""
    _delimiters(open_mark, close_mark)
    end_tag = "/" + close_mark
    out: List[str] = []
    pos = 0
    while True:
        j = marked.find(open_mark, pos)
        if j < 0:
            out.append(marked[pos:])
            return "".join(out)
        out.append(marked[pos:j])
        after = j + len(open_mark)
        if marked.startswith(open_mark, after):
            out.append(open_mark)
            pos = after + len(open_mark)
            continue
        if marked.startswith(end_tag, after):
            pos = after + len(end_tag)
            continue
        tag = _OPEN_TAG.match(marked, after)
        if tag is None or not marked.startswith(close_mark, tag.end()):
            raise MarkSpanError(f"malformed or unterminated mark at offset {j}")
        pos = tag.end() + len(close_mark)


def corpus_stats(records: Iterable[AnnotationRecord]) -> List[ClueStats]:
    """Per-clue document and occurrence counts, sorted by clue name"""
    per_clue: Dict[str, Counter] = defaultdict(Counter)
    for record in records:
        per_clue[record.clue_name][record.doc_id] += 1
    return [
        ClueStats(
            clue_name=name,
            documents=len(per_doc),
            occurrences=sum(per_doc.values()),
            min_per_document=min(per_doc.values()),
            max_per_document=max(per_doc.values()),
        )
        for name, per_doc in sorted(per_clue.items())
    ]


def merge_stats(left: Sequence[ClueStats], right: Sequence[ClueStats]) -> List[ClueStats]:
    """Field-wise merge of the stats of two disjoint document sets"""
    merged: Dict[str, ClueStats] = {s.clue_name: s for s in left}
    for s in right:
        if s.clue_name not in merged:
            merged[s.clue_name] = s
            continue
        m = merged[s.clue_name]
        merged[s.clue_name] = ClueStats(
            clue_name=s.clue_name,
            documents=m.documents + s.documents,
            occurrences=m.occurrences + s.occurrences,
            min_per_document=min(m.min_per_document, s.min_per_document),
            max_per_document=max(m.max_per_document, s.max_per_document),
        )
    return [merged[name] for name in sorted(merged)]


STATS_HEADER = "\t".join(["clue", "documents", "occurrences", "min", "max"])


def format_stats(stats: Sequence[ClueStats]) -> str:
    lines = [STATS_HEADER]
    lines += [
        f"{s.clue_name}\t{s.documents}\t{s.occurrences}\t{s.min_per_document}\t{s.max_per_document}"
        for s in stats
    ]
    return "\n".join(lines) + "\n"


def _span_fields(span: Optional[Span]) -> List[str]:
    return ["-", "-"] if span is None else [str(span.start), str(span.length)]


def format_standoff(records: Iterable[AnnotationRecord]) -> str:
    lines = []
    for r in records:
        fields = [r.doc_id, str(r.sentence_index), r.clue_name, str(r.span.start), str(r.span.length)]
        fields += _span_fields(r.target_span) + _span_fields(r.source_span)
        fields += [r.marker_surface, "-" if r.probability is None else str(r.probability)]
        lines.append("\t".join(fields) + "\n")
    return "".join(lines)


def _parse_span(start: str, length: str) -> Optional[Span]:
    if start == "-" and length == "-":
        return None
    return Span(start=int(start), end=int(start) + int(length))


def parse_standoff(text: str) -> List[AnnotationRecord]:
    """Read records back from format_standoff output; unit_index is not stored and reads as 0"""
    records: List[AnnotationRecord] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != len(STANDOFF_FIELDS):
            raise StandoffFormatError(f"line {number}: expected {len(STANDOFF_FIELDS)} fields, got {len(fields)}")
        doc, sentence, clue, start, length, t_start, t_len, s_start, s_len, marker, prob = fields
        try:
            records.append(AnnotationRecord(
                doc_id=doc,
                sentence_index=int(sentence),
                clue_name=clue,
                span=_parse_span(start, length),
                target_span=_parse_span(t_start, t_len),
                source_span=_parse_span(s_start, s_len),
                marker_surface=marker,
                probability=None if prob == "-" else Fraction(prob),
            ))
        except ValueError as e:
            raise StandoffFormatError(f"line {number}: {e}") from None
    return records


def judgment_template(records: Iterable[AnnotationRecord]) -> str:
    """One `clue doc sentence unit none` line per record, ready for hand labelling"""
    seen = set()
    lines = []
    for r in records:
        key = (r.clue_name, r.doc_id, r.sentence_index, r.unit_index)
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"{r.clue_name}\t{r.doc_id}\t{r.sentence_index}\t{r.unit_index}\tnone\n")
    return "".join(lines)


def _context(text: str) -> str:
    return " ".join(text.split())


def concordance(
    doc_id: str,
    text: str,
    lemmas: Iterable[str],
    lexicon: Optional[Lexicon] = None,
    rules: Sequence[TransformationRule] = (),
    width: int = 30,
    options: Optional[StkOptions] = None,
) -> List[KwicLine]:
    """Keyword-in-context lines for every token whose lemma or surface is in `lemmas`"""
    wanted = {lemma.lower() for lemma in lemmas}
    annotator = CorpusAnnotator(Catalog(), lexicon, rules, options)
    document, sentences = annotator.tag_document(text)
    lines: List[KwicLine] = []
    for sentence_index, tagged in enumerate(sentences):
        for t in tagged:
            if t.lemma.lower() not in wanted and t.token.surface.lower() not in wanted:
                continue
            span = t.token.span
            lines.append(KwicLine(
                doc_id=doc_id,
                sentence_index=sentence_index,
                span=span,
                left=_context(document[max(0, span.start - width):span.start])[-width:],
                keyword=t.token.surface,
                right=_context(document[span.end:span.end + width])[:width],
                tag=str(t.tag),
            ))
    return lines


def format_kwic(line: KwicLine, width: int = 30) -> str:
    return f"{line.doc_id}:{line.sentence_index}\t{line.left:>{width}} [{line.keyword}] {line.right:<{width}}\t{line.tag}"
