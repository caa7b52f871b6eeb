"""
Lexicon-driven tagging corrected by ordered contextual transformation rules.

The baseline pass looks every word up in the lexicon (first reading wins),
falls back to the first matching suffix rule and then to the default tag.
Rules are applied afterwards, one full left-to-right pass per rule, each
pass reading the categories as they stood when the pass began.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .text_models import (
    Category, PosTag, Span, StkError, TaggedToken, Token, TokenKind,
)

logger = logging.getLogger(__name__)


class LexiconError(StkError):
    """Raised when a lexicon file cannot be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class RuleSyntaxError(StkError):
    """Raised when a transformation rule file cannot be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class PretaggedFormatError(StkError):
    """Raised on malformed pre-tagged input"""
    pass


class Reading(BaseModel):
    """One lexicon reading of a surface form"""
    model_config = ConfigDict(frozen=True)

    tag: PosTag
    lemma: str = Field(min_length=1)


class Lexicon(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: Mapping[str, Tuple[Reading, ...]]
    suffix_rules: Tuple[Tuple[str, PosTag], ...] = ()
    default_tag: PosTag = PosTag(category=Category.N)

    @field_validator("entries")
    @classmethod
    def _every_entry_has_readings(cls, entries: Mapping[str, Tuple[Reading, ...]]):
        for surface, readings in entries.items():
            if not readings:
                raise ValueError(f"entry {surface!r} has no reading")
        return dict(entries)

    def lookup(self, surface: str) -> Optional[Tuple[Reading, ...]]:
        return self.entries.get(surface.lower())

    def guess(self, surface: str) -> PosTag:
        lowered = surface.lower()
        for suffix, tag in self.suffix_rules:
            if lowered.endswith(suffix):
                return tag
        return self.default_tag


class RuleTrigger(str, Enum):
    PREV_TAG_IS = "prev_tag_is"
    NEXT_TAG_IS = "next_tag_is"
    PREV_WORD_IS = "prev_word_is"
    NEXT_WORD_IS = "next_word_is"
    SURROUNDED_BY_TAGS = "surrounded_by_tags"


_TRIGGER_ARITY = {
    RuleTrigger.PREV_TAG_IS: 1,
    RuleTrigger.NEXT_TAG_IS: 1,
    RuleTrigger.PREV_WORD_IS: 1,
    RuleTrigger.NEXT_WORD_IS: 1,
    RuleTrigger.SURROUNDED_BY_TAGS: 2,
}

_TAG_TRIGGERS = {RuleTrigger.PREV_TAG_IS, RuleTrigger.NEXT_TAG_IS, RuleTrigger.SURROUNDED_BY_TAGS}


class TransformationRule(BaseModel):
    """`from_tag` becomes `to_tag` wherever the trigger holds"""
    model_config = ConfigDict(frozen=True)

    trigger: RuleTrigger
    trigger_args: Tuple[str, ...]
    from_tag: Category
    to_tag: Category

    @model_validator(mode="after")
    def _check_rule(self) -> "TransformationRule":
        if self.from_tag == self.to_tag:
            raise ValueError(f"rule rewrites {self.from_tag.value} to itself")
        arity = _TRIGGER_ARITY[self.trigger]
        if len(self.trigger_args) != arity:
            raise ValueError(f"{self.trigger.value} takes {arity} argument(s), got {len(self.trigger_args)}")
        if self.trigger in _TAG_TRIGGERS:
            for arg in self.trigger_args:
                Category(arg)
        return self

    def fires(self, i: int, categories: Sequence[Category], words: Sequence[str]) -> bool:
        """Whether the trigger holds at position `i` of the snapshot"""
        args = self.trigger_args
        last = len(categories) - 1
        if self.trigger == RuleTrigger.PREV_TAG_IS:
            return i > 0 and categories[i - 1].value == args[0]
        if self.trigger == RuleTrigger.NEXT_TAG_IS:
            return i < last and categories[i + 1].value == args[0]
        if self.trigger == RuleTrigger.PREV_WORD_IS:
            return i > 0 and words[i - 1] == args[0]
        if self.trigger == RuleTrigger.NEXT_WORD_IS:
            return i < last and words[i + 1] == args[0]
        return (
            0 < i < last
            and categories[i - 1].value == args[0]
            and categories[i + 1].value == args[1]
        )

    def __str__(self) -> str:
        return f"{self.from_tag.value}>{self.to_tag.value} {self.trigger.value} {' '.join(self.trigger_args)}"


def _data_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, raw.rstrip("\r\n")


def parse_lexicon(text: str) -> Lexicon:
    """
    Parse lexicon text: `surface<TAB>CAT[:g][:n]<TAB>lemma` per line.

    `-suffix<TAB>TAG` lines declare suffix rules, a `*<TAB>TAG` line the
    default tag. Repeated surfaces merge their readings in file order.
    """
    entries: Dict[str, List[Reading]] = {}
    suffix_rules: List[Tuple[str, PosTag]] = []
    default_tag: Optional[PosTag] = None

    for number, line in _data_lines(text):
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) not in (2, 3) or not fields[0] or not fields[1]:
            raise LexiconError(f"expected 'surface<TAB>TAG<TAB>lemma', got {line.strip()!r}", number)
        surface, tag_text = fields[0], fields[1]
        try:
            tag = PosTag.parse(tag_text)
        except ValueError as e:
            raise LexiconError(str(e), number) from None

        if surface == "*":
            default_tag = tag
        elif surface.startswith("-") and len(surface) > 1:
            suffix_rules.append((surface[1:].lower(), tag))
        else:
            lemma = fields[2] if len(fields) == 3 and fields[2] else surface
            entries.setdefault(surface.lower(), []).append(Reading(tag=tag, lemma=lemma.lower()))

    if not entries:
        raise LexiconError("empty lexicon")

    lexicon = Lexicon(
        entries={surface: tuple(readings) for surface, readings in entries.items()},
        suffix_rules=tuple(suffix_rules),
        default_tag=default_tag or PosTag(category=Category.N),
    )
    logger.info(f"lexicon loaded: {len(entries)} forms, {len(suffix_rules)} suffix rules")
    return lexicon


def load_lexicon(path: Union[str, Path]) -> Lexicon:
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


def parse_rules(text: str) -> List[TransformationRule]:
    """Parse rule text: `FROM>TO TRIGGER arg...` per line."""
    rules: List[TransformationRule] = []
    for number, line in _data_lines(text):
        parts = line.split()
        if len(parts) < 2 or ">" not in parts[0]:
            raise RuleSyntaxError(f"expected 'FROM>TO TRIGGER arg...', got {line.strip()!r}", number)
        from_text, _, to_text = parts[0].partition(">")
        try:
            trigger = RuleTrigger(parts[1])
            args = parts[2:] if trigger in _TAG_TRIGGERS else [a.lower() for a in parts[2:]]
            rules.append(TransformationRule(
                trigger=trigger,
                trigger_args=tuple(args),
                from_tag=Category(from_text),
                to_tag=Category(to_text),
            ))
        except ValidationError as e:
            raise RuleSyntaxError("; ".join(err["msg"] for err in e.errors()), number) from None
        except ValueError as e:
            raise RuleSyntaxError(str(e), number) from None
    return rules


def load_rules(path: Union[str, Path]) -> List[TransformationRule]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


def _baseline(token: Token, lexicon: Lexicon) -> TaggedToken:
    if token.kind == TokenKind.PUNCTUATION:
        return TaggedToken(token=token, tag=PosTag(category=Category.PUNCT), lemma=token.surface)
    readings = lexicon.lookup(token.surface)
    if readings:
        return TaggedToken(token=token, tag=readings[0].tag, lemma=readings[0].lemma)
    if token.kind == TokenKind.NUMBER:
        return TaggedToken(token=token, tag=PosTag(category=Category.OTHER), lemma=token.surface)
    return TaggedToken(token=token, tag=lexicon.guess(token.surface), lemma=token.surface.lower())


def _retag(tagged: TaggedToken, category: Category, lexicon: Lexicon) -> TaggedToken:
    for reading in lexicon.lookup(tagged.token.surface) or ():
        if reading.tag.category == category:
            return TaggedToken(token=tagged.token, tag=reading.tag, lemma=reading.lemma)
    return TaggedToken(token=tagged.token, tag=tagged.tag.with_category(category), lemma=tagged.lemma)


def tag(
    tokens: Sequence[Token],
    lexicon: Lexicon,
    rules: Sequence[TransformationRule] = (),
) -> List[TaggedToken]:
    """Tag one sentence: baseline lookup, then every rule in order."""
    tagged = [_baseline(token, lexicon) for token in tokens]
    words = [token.surface.lower() for token in tokens]

    for rule in rules:
        snapshot = [t.category for t in tagged]
        for i, category in enumerate(snapshot):
            if category == rule.from_tag and rule.fires(i, snapshot, words):
                tagged[i] = _retag(tagged[i], rule.to_tag, lexicon)
    return tagged


def read_pretagged(text: str) -> Tuple[str, List[List[TaggedToken]]]:
    """
    Read `surface<TAB>TAG<TAB>lemma` lines, blank line between sentences.

    Returns the reconstructed document text (surfaces joined by one space,
    sentences by one newline) and the tagged sentences, whose spans refer to
    that text.
    """
    sentences: List[List[Tuple[str, PosTag, str]]] = [[]]
    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            if sentences[-1]:
                sentences.append([])
            continue
        fields = raw.split("\t")
        if len(fields) != 3 or not fields[0]:
            raise PretaggedFormatError(f"line {number}: expected 'surface<TAB>TAG<TAB>lemma'")
        try:
            pos_tag = PosTag.parse(fields[1])
        except ValueError as e:
            raise PretaggedFormatError(f"line {number}: {e}") from None
        sentences[-1].append((fields[0], pos_tag, fields[2]))
    if not sentences[-1]:
        sentences.pop()

    document: List[str] = []
    result: List[List[TaggedToken]] = []
    offset = 0
    for s_index, rows in enumerate(sentences):
        tagged_sentence: List[TaggedToken] = []
        for t_index, (surface, pos_tag, lemma) in enumerate(rows):
            gap = "" if t_index == 0 and s_index == 0 else ("\n" if t_index == 0 else " ")
            offset += len(gap)
            if pos_tag.category == Category.PUNCT:
                kind = TokenKind.PUNCTUATION
            elif surface.replace(",", "").replace(".", "").isdigit():
                kind = TokenKind.NUMBER
            else:
                kind = TokenKind.WORD
            token = Token(
                surface=surface,
                span=Span(start=offset, end=offset + len(surface)),
                preceding_gap=gap,
                kind=kind,
            )
            tagged_sentence.append(TaggedToken(token=token, tag=pos_tag, lemma=lemma or surface.lower()))
            document.append(gap + surface)
            offset += len(surface)
        result.append(tagged_sentence)
    return "".join(document), result


def write_pretagged(sentences: Sequence[Sequence[TaggedToken]]) -> str:
    blocks = [
        "".join(f"{t.token.surface}\t{t.tag}\t{t.lemma}\n" for t in sentence)
        for sentence in sentences if sentence
    ]
    return "\n".join(blocks)
