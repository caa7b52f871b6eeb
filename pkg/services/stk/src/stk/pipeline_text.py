"""
Sentence splitting and tokenization with exact character spans.

Every non-whitespace character of a document ends up in exactly one token,
and the whitespace between tokens is kept on the following token as its
`preceding_gap`, so a document can always be rebuilt byte for byte.
"""

import logging
from typing import Iterable, List, Optional

import regex
from pydantic import BaseModel, ConfigDict

from .text_models import Span, Token, TokenKind

logger = logging.getLogger(__name__)

DEFAULT_ABBREVIATIONS = frozenset({
    "m.", "mm.", "mme.", "mlle.", "dr.", "etc.", "cf.", "ex.", "p.", "vol.",
    "mr.", "mrs.", "ms.", "st.", "e.g.", "i.e.", "vs.",
})

ELISION_PREFIXES = ("l", "d", "j", "n", "s", "c", "qu", "m", "t")

# Terminator run followed by whitespace and a capital (optionally behind an
# opening quote), or by trailing whitespace only; or a blank line.
_BOUNDARY = regex.compile(
    r"(?P<term>[.!?]+)(?=\s+[\"«“(\[]?\p{Lu}|\s*\Z)"
    r"|(?P<para>\n[^\S\n]*\n)"
)

_TOKEN = regex.compile(
    r"(?P<elision>(?i:" + "|".join(ELISION_PREFIXES) + r")['’](?=\p{L}))"
    r"|(?P<number>\p{N}++(?:[.,]\p{N}++)*+(?![\p{L}\p{M}\p{N}_]))"
    r"|(?P<word>[\p{L}\p{M}\p{N}_]+(?:[-'’][\p{L}\p{M}\p{N}_]+)*)"
    r"|(?P<punctuation>\S)"
)

_SPACE = regex.compile(r"\s")

_KINDS = {
    "elision": TokenKind.WORD,
    "word": TokenKind.WORD,
    "number": TokenKind.NUMBER,
    "punctuation": TokenKind.PUNCTUATION,
}


class Segmentation(BaseModel):
    """A whole document cut into sentences and tokens"""
    model_config = ConfigDict(frozen=True)

    sentences: List[Span]
    tokens: List[List[Token]]
    trailing_gap: str = ""


def _normalize_abbreviations(abbreviations: Optional[Iterable[str]]) -> frozenset:
    if abbreviations is None:
        return DEFAULT_ABBREVIATIONS
    return frozenset(a.lower() for a in abbreviations)


def _rstrip_end(text: str, start: int, end: int) -> int:
    while end > start and _SPACE.match(text, end - 1):
        end -= 1
    return end


def _skip_space(text: str, pos: int) -> int:
    while pos < len(text) and _SPACE.match(text, pos):
        pos += 1
    return pos


def _word_before(text: str, start: int, stop: int) -> str:
    i = stop
    while i > start and not _SPACE.match(text, i - 1):
        i -= 1
    return text[i:stop].lstrip("\"'«“([{")


def split_sentences(text: str, abbreviations: Optional[Iterable[str]] = None) -> List[Span]:
    """
    Cut `text` into sentence spans.

    A sentence ends at a run of `.`, `!` or `?` followed by whitespace and a
    capital letter or by the end of the text, or at a blank line. A single
    `.` closing a listed abbreviation ("M.", "etc.") does not end a sentence.
    Spans never start or end on whitespace.
    """
    abbrevs = _normalize_abbreviations(abbreviations)
    spans: List[Span] = []
    start = _skip_space(text, 0)

    for m in _BOUNDARY.finditer(text):
        if m.start() < start:
            continue
        if m.group("term") is not None:
            if m.group("term") == "." and (_word_before(text, start, m.start()) + ".").lower() in abbrevs:
                continue
            end = m.end()
        else:
            end = _rstrip_end(text, start, m.start())
        if end > start:
            spans.append(Span(start=start, end=end))
        start = _skip_space(text, m.end())

    if start < len(text):
        end = _rstrip_end(text, start, len(text))
        if end > start:
            spans.append(Span(start=start, end=end))
    return spans


def tokenize(
    text: str,
    sentence: Span,
    abbreviations: Optional[Iterable[str]] = None,
) -> List[Token]:
    """
    Tokenize one sentence of `text`.

    Elided articles and pronouns split off at the apostrophe ("l'arbre" ->
    "l'", "arbre"), hyphenated words stay whole, listed abbreviations keep
    their final dot. The first token's gap reaches back over the whitespace
    separating this sentence from the previous one.
    """
    abbrevs = _normalize_abbreviations(abbreviations)
    tokens: List[Token] = []

    gap_start = sentence.start
    while gap_start > 0 and _SPACE.match(text, gap_start - 1):
        gap_start -= 1

    pos = sentence.start
    while pos < sentence.end:
        m = _TOKEN.search(text, pos, sentence.end)
        if m is None:
            break
        kind_name = m.lastgroup
        start, end = m.start(), m.end()
        if (
            kind_name == "word"
            and end < sentence.end
            and text[end] == "."
            and (text[start:end] + ".").lower() in abbrevs
        ):
            end += 1
        tokens.append(Token(
            surface=text[start:end],
            span=Span(start=start, end=end),
            preceding_gap=text[gap_start:start],
            kind=_KINDS[kind_name],
        ))
        gap_start = pos = end
    return tokens


def segment(text: str, abbreviations: Optional[Iterable[str]] = None) -> Segmentation:
    """Split and tokenize a whole document"""
    sentences = split_sentences(text, abbreviations)
    tokens = [tokenize(text, sentence, abbreviations) for sentence in sentences]
    last_end = sentences[-1].end if sentences else 0
    logger.debug(f"segmented {len(text)} characters into {len(sentences)} sentences")
    return Segmentation(sentences=sentences, tokens=tokens, trailing_gap=text[last_end:])


def reassemble(segmentation: Segmentation) -> str:
    """Rebuild the document text from gaps and surfaces"""
    parts = [t.preceding_gap + t.surface for sentence in segmentation.tokens for t in sentence]
    parts.append(segmentation.trailing_gap)
    return "".join(parts)
