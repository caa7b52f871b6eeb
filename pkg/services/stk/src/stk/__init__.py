from .annotation_models import (
    AnnotationRecord, AnnotationResult, ClueStats, FileFailure, KwicLine, Match, StkOptions,
)
from .chunker import chunk
from .clue_catalog import (
    CatalogError, ClueValidator, check_catalog, load_catalog, parse_catalog, serialize_catalog,
    validate_clue,
)
from .clue_models import (
    Catalog, ClueDefinition, ClueType, Diagnostic, ElementCategory, Judgment, JudgmentLabel,
    MarkerConstraint, PatternElement, RelevanceRecord, SlotRef,
)
from .corpus_annotator import (
    CorpusAnnotator, MarkSpanError, annotate_corpus, concordance, corpus_stats, format_standoff,
    judgment_template, mark_inline, merge_stats, parse_standoff, strip_marks,
)
from .matcher import match_all, match_clue
from .pipeline_text import reassemble, segment, split_sentences, tokenize
from .relevance import (
    DuplicateJudgmentError, RelevanceError, check_record, compute_relevance, import_recorded,
    merge_records, nonliteral_probability, parse_judgments,
)
from .tagger import (
    Lexicon, LexiconError, RuleSyntaxError, TransformationRule, load_lexicon, load_rules,
    parse_lexicon, parse_rules, read_pretagged, tag, write_pretagged,
)
from .text_models import PosTag, Span, StkError, TaggedToken, Token, Unit, UnitKind
