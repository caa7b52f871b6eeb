"""
Command-line entry point.

    stk tokenize FILE...
    stk tag FILE... --lexicon LEX [--rules RULES]
    stk chunk FILE... --lexicon LEX
    stk catalog check|format CATALOG
    stk match FILE... --catalog CAT --lexicon LEX
    stk annotate FILE... --catalog CAT --lexicon LEX [--inline] [--out PATH]
    stk relevance --catalog CAT --judgments FILE [--write-catalog OUT]
    stk stats STANDOFF
    stk search --lemma LEMMA FILE... --lexicon LEX

Options come from, in increasing priority: built-in defaults, the JSON file
named by STK_CONFIG, the file given with --config, and command-line flags.
Exit codes: 0 clean, 1 partial failure, 2 configuration error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from .annotation_models import StkOptions
from .chunker import chunk
from .clue_catalog import CatalogError, check_catalog, load_catalog, serialize_catalog
from .clue_models import SKIPPABLE_LABELS, Catalog, Severity
from .corpus_annotator import (
    CorpusAnnotator, StandoffFormatError, concordance, corpus_stats, format_kwic, format_standoff,
    format_stats, judgment_template, mark_inline, parse_standoff,
)
from .pipeline_text import segment
from .relevance import (
    RELEVANCE_HEADER, DuplicateJudgmentError, JudgmentFormatError, load_judgments, relevance_table,
    with_computed_relevance,
)
from .tagger import (
    Lexicon, LexiconError, PretaggedFormatError, RuleSyntaxError, TransformationRule, load_lexicon,
    load_rules, write_pretagged,
)
from .text_models import StkError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class ConfigError(StkError):
    """Raised when options, catalogs, lexicons or rules cannot be loaded"""
    pass


def configure_logging(verbose: bool = False):
    if verbose:
        level = logging.DEBUG
    else:
        name = os.getenv("STK_LOG_LEVEL", "WARNING").upper()
        level = getattr(logging, name, None)
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def _read_options_file(path: Path) -> Dict[str, Any]:
    try:
        options = StkOptions.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read options file {path}: {e}") from None
    except ValidationError as e:
        raise ConfigError(f"invalid options file {path}: {e}") from None
    return options.model_dump(exclude_unset=True)


def _parse_skip(value: str) -> List[str]:
    labels = [label for label in value.replace(",", " ").split() if label]
    unknown = sorted(set(labels) - SKIPPABLE_LABELS)
    if unknown:
        raise ConfigError(f"unknown skip categories: {', '.join(unknown)}")
    return labels


def resolve_options(args: argparse.Namespace) -> StkOptions:
    """defaults < STK_CONFIG < --config < flags"""
    settings: Dict[str, Any] = {}
    env_config = os.getenv("STK_CONFIG")
    if env_config:
        settings.update(_read_options_file(Path(env_config)))
    if getattr(args, "config", None):
        settings.update(_read_options_file(Path(args.config)))

    flags = {
        "catalog": getattr(args, "catalog", None),
        "lexicon": getattr(args, "lexicon", None),
        "rules": getattr(args, "rules", None),
        "out": getattr(args, "out", None),
        "workers": getattr(args, "workers", None),
        "judgments_template": getattr(args, "judgments_template", None),
    }
    settings.update({key: value for key, value in flags.items() if value is not None})
    if getattr(args, "skip", None) is not None:
        settings["skip"] = _parse_skip(args.skip)
    for switch in ("all_matches", "inline", "pretagged"):
        if getattr(args, switch, False):
            settings[switch] = True

    try:
        return StkOptions(**settings)
    except ValidationError as e:
        raise ConfigError(f"invalid options: {e}") from None


def _load_catalog(options: StkOptions) -> Catalog:
    if options.catalog is None:
        raise ConfigError("no catalog: pass --catalog or set 'catalog' in the options file")
    try:
        return load_catalog(options.catalog)
    except OSError as e:
        raise ConfigError(f"cannot read catalog {options.catalog}: {e}") from None
    except CatalogError as e:
        raise ConfigError(f"{options.catalog}: {e}") from None


def _load_lexicon(options: StkOptions) -> Optional[Lexicon]:
    if options.lexicon is None:
        if options.pretagged:
            return None
        raise ConfigError("no lexicon: pass --lexicon or set 'lexicon' in the options file")
    try:
        return load_lexicon(options.lexicon)
    except OSError as e:
        raise ConfigError(f"cannot read lexicon {options.lexicon}: {e}") from None
    except LexiconError as e:
        raise ConfigError(f"{options.lexicon}: {e}") from None


def _load_rules(options: StkOptions) -> List[TransformationRule]:
    if options.rules is None:
        return []
    try:
        return load_rules(options.rules)
    except OSError as e:
        raise ConfigError(f"cannot read rules {options.rules}: {e}") from None
    except RuleSyntaxError as e:
        raise ConfigError(f"{options.rules}: {e}") from None


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info(f"wrote {out}")


def _read_inputs(files: Sequence[str]):
    """Yield (path, text) per file; text is None when the file cannot be read"""
    for name in files:
        try:
            yield name, Path(name).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            logger.error(f"{name}: {e}")
            yield name, None


def cmd_tokenize(args: argparse.Namespace, options: StkOptions) -> int:
    failed = 0
    lines: List[str] = []
    for name, text in _read_inputs(args.files):
        if text is None:
            failed += 1
            continue
        for tokens in segment(text, options.abbreviations).tokens:
            lines.extend(f"{t.span.start}\t{t.span.length}\t{t.kind.value}\t{t.surface}\n" for t in tokens)
            lines.append("\n")
    _emit("".join(lines), options.out)
    return EXIT_PARTIAL if failed else EXIT_OK


def _tagged_documents(args: argparse.Namespace, options: StkOptions):
    annotator = CorpusAnnotator(Catalog(), _load_lexicon(options), _load_rules(options), options)
    for name, text in _read_inputs(args.files):
        if text is None:
            yield name, None
            continue
        try:
            yield name, annotator.tag_document(text)[1]
        except PretaggedFormatError as e:
            logger.error(f"{name}: {e}")
            yield name, None


def cmd_tag(args: argparse.Namespace, options: StkOptions) -> int:
    failed = 0
    parts: List[str] = []
    for _, sentences in _tagged_documents(args, options):
        if sentences is None:
            failed += 1
            continue
        parts.append(write_pretagged(sentences))
    _emit("\n".join(parts), options.out)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_chunk(args: argparse.Namespace, options: StkOptions) -> int:
    failed = 0
    lines: List[str] = []
    for _, sentences in _tagged_documents(args, options):
        if sentences is None:
            failed += 1
            continue
        for tagged in sentences:
            for unit in chunk(tagged):
                surfaces = " ".join(t.token.surface for t in unit.tokens)
                lines.append(f"{unit.kind.value}\t{unit.head.token.surface}\t{surfaces}\n")
            lines.append("\n")
    _emit("".join(lines), options.out)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_catalog(args: argparse.Namespace, options: StkOptions) -> int:
    if args.file:
        options = options.model_copy(update={"catalog": Path(args.file)})
    if args.action == "format":
        _emit(serialize_catalog(_load_catalog(options)), options.out)
        return EXIT_OK

    if options.catalog is None:
        raise ConfigError("no catalog to check")
    try:
        catalog = load_catalog(options.catalog)
    except OSError as e:
        raise ConfigError(f"cannot read catalog {options.catalog}: {e}") from None
    except CatalogError as e:
        print(f"error: {e}")
        return EXIT_PARTIAL
    diagnostics = check_catalog(catalog)
    for diagnostic in diagnostics:
        print(diagnostic)
    errors = [d for d in diagnostics if d.severity == Severity.ERROR]
    print(f"{len(catalog.clues)} clues, {len(errors)} errors, {len(diagnostics) - len(errors)} warnings")
    return EXIT_PARTIAL if errors else EXIT_OK


def cmd_match(args: argparse.Namespace, options: StkOptions) -> int:
    catalog = _load_catalog(options)
    annotator = CorpusAnnotator(catalog, _load_lexicon(options), _load_rules(options), options)
    result = annotator.annotate_corpus(args.files)
    _emit(format_standoff(result.records), options.out)
    for failure in result.failures:
        print(f"failed: {failure.path}: {failure.error_message}", file=sys.stderr)
    return EXIT_OK if result.success else EXIT_PARTIAL


def cmd_annotate(args: argparse.Namespace, options: StkOptions) -> int:
    catalog = _load_catalog(options)
    annotator = CorpusAnnotator(catalog, _load_lexicon(options), _load_rules(options), options)
    result = annotator.annotate_corpus(args.files)
    logger.info(f"{result.message} in {result.processing_time_ms:.0f} ms")

    if options.inline:
        views = []
        for doc_id, text in result.documents.items():
            records = [r for r in result.records if r.doc_id == doc_id]
            views.append(mark_inline(text, records, options.mark_open, options.mark_close))
        _emit("\n".join(views), options.out)
    else:
        _emit(format_standoff(result.records), options.out)

    if options.judgments_template is not None:
        options.judgments_template.write_text(judgment_template(result.records), encoding="utf-8")
        logger.info(f"wrote {options.judgments_template}")
    for failure in result.failures:
        print(f"failed: {failure.path}: {failure.error_message}", file=sys.stderr)
    return EXIT_OK if result.success else EXIT_PARTIAL


def cmd_relevance(args: argparse.Namespace, options: StkOptions) -> int:
    catalog = _load_catalog(options)
    judgments = []
    if args.judgments:
        try:
            judgments = load_judgments(args.judgments)
        except OSError as e:
            raise ConfigError(f"cannot read judgments {args.judgments}: {e}") from None
    try:
        rows = relevance_table(catalog, judgments)
    except DuplicateJudgmentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARTIAL

    _emit("\n".join([RELEVANCE_HEADER] + [row.format() for row in rows]) + "\n", options.out)
    if args.write_catalog:
        Path(args.write_catalog).write_text(
            serialize_catalog(with_computed_relevance(catalog, judgments)), encoding="utf-8"
        )
        logger.info(f"wrote {args.write_catalog}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, options: StkOptions) -> int:
    records = []
    for name, text in _read_inputs(args.standoff):
        if text is None:
            raise ConfigError(f"cannot read standoff file {name}")
        records.extend(parse_standoff(text))
    _emit(format_stats(corpus_stats(records)), options.out)
    return EXIT_OK


def cmd_search(args: argparse.Namespace, options: StkOptions) -> int:
    lexicon = _load_lexicon(options)
    rules = _load_rules(options)
    failed = 0
    lines: List[str] = []
    for name, text in _read_inputs(args.files):
        if text is None:
            failed += 1
            continue
        try:
            hits = concordance(name, text, args.lemma, lexicon, rules, args.width, options)
        except PretaggedFormatError as e:
            logger.error(f"{name}: {e}")
            failed += 1
            continue
        lines.extend(format_kwic(hit, args.width) + "\n" for hit in hits)
    _emit("".join(lines), options.out)
    return EXIT_PARTIAL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON options file (overrides STK_CONFIG)")
    common.add_argument("--catalog", type=Path, help="clue catalog file")
    common.add_argument("--lexicon", type=Path, help="lexicon file")
    common.add_argument("--rules", type=Path, help="transformation rules file")
    common.add_argument("--skip", help="skippable categories, e.g. PUNCT,ADV")
    common.add_argument("--all-matches", action="store_true", help="report overlapping matches too")
    common.add_argument("--inline", action="store_true", help="write inline marks instead of standoff")
    common.add_argument("--out", type=Path, help="output file (default stdout)")
    common.add_argument("--pretagged", action="store_true", help="inputs are surface/TAG/lemma lines")
    common.add_argument("--workers", type=int, help="documents annotated in parallel")
    common.add_argument("--judgments-template", type=Path, help="write a judgment file to fill in")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="stk", description="Textual clues for metaphor and analogy", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("tokenize", "print token offsets"),
        ("tag", "print tagged tokens"),
        ("chunk", "print GN/GV/TOK units"),
        ("match", "write standoff records of clue matches"),
        ("annotate", "write standoff records or inline marks"),
    ):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("files", nargs="*")

    p = sub.add_parser("catalog", help="check or reformat a catalog", parents=[common])
    p.add_argument("action", choices=["check", "format"])
    p.add_argument("file", nargs="?")

    p = sub.add_parser("relevance", help="relevance table from judgments", parents=[common])
    p.add_argument("--judgments", type=Path)
    p.add_argument("--write-catalog", type=Path, help="write the catalog with computed records")

    p = sub.add_parser("stats", help="per-clue counts of a standoff file", parents=[common])
    p.add_argument("standoff", nargs="+")

    p = sub.add_parser("search", help="keyword-in-context search by lemma", parents=[common])
    p.add_argument("--lemma", action="append", required=True)
    p.add_argument("--width", type=int, default=30)
    p.add_argument("files", nargs="*")
    return parser


COMMANDS = {
    "tokenize": cmd_tokenize,
    "tag": cmd_tag,
    "chunk": cmd_chunk,
    "catalog": cmd_catalog,
    "match": cmd_match,
    "annotate": cmd_annotate,
    "relevance": cmd_relevance,
    "stats": cmd_stats,
    "search": cmd_search,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(getattr(args, "verbose", False))
    try:
        options = resolve_options(args)
        return COMMANDS[args.command](args, options)
    except ConfigError as e:
        logger.error(str(e))
        print(f"stk: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (JudgmentFormatError, StandoffFormatError) as e:
        print(f"stk: {e}", file=sys.stderr)
        return EXIT_PARTIAL


def run():
    sys.exit(main())
