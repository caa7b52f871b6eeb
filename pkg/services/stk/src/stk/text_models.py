from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class StkError(Exception):
    """Base class for every error raised by the toolkit"""
    pass


class TokenKind(str, Enum):
    """Surface classes produced by the tokenizer"""
    WORD = "word"
    NUMBER = "number"
    PUNCTUATION = "punctuation"


class Category(str, Enum):
    """Grammatical categories of the tagset"""
    N = "N"
    V = "V"
    ADJ = "ADJ"
    ADV = "ADV"
    PREP = "PREP"
    DET = "DET"
    PRO = "PRO"
    CONJ = "CONJ"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


class Gender(str, Enum):
    MASCULINE = "m"
    FEMININE = "f"
    NONE = "none"


class Number(str, Enum):
    SINGULAR = "s"
    PLURAL = "p"
    NONE = "none"


# Only these categories carry gender/number features
FEATURED_CATEGORIES = frozenset({Category.N, Category.ADJ, Category.DET, Category.PRO})


class UnitKind(str, Enum):
    """Chunker output kinds"""
    GN = "GN"
    GV = "GV"
    TOK = "TOK"


class Span(BaseModel):
    """Character span, start inclusive, end exclusive"""
    model_config = ConfigDict(frozen=True)

    start: int = Field(ge=0)
    end: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_order(self) -> "Span":
        if self.start > self.end:
            raise ValueError(f"span start {self.start} is after end {self.end}")
        return self

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def slice(self, text: str) -> str:
        return text[self.start:self.end]


class Token(BaseModel):
    """A surface token with its exact position in the document"""
    model_config = ConfigDict(frozen=True)

    surface: str = Field(min_length=1)
    span: Span
    preceding_gap: str = ""
    kind: TokenKind

    @model_validator(mode="after")
    def _check_span(self) -> "Token":
        if self.span.length != len(self.surface):
            raise ValueError(
                f"token {self.surface!r} does not fit span {self.span.start}:{self.span.end}"
            )
        return self


class PosTag(BaseModel):
    """Part-of-speech tag with gender and number features"""
    model_config = ConfigDict(frozen=True)

    category: Category
    gender: Gender = Gender.NONE
    number: Number = Number.NONE

    @model_validator(mode="after")
    def _check_features(self) -> "PosTag":
        if self.category not in FEATURED_CATEGORIES and (
            self.gender != Gender.NONE or self.number != Number.NONE
        ):
            raise ValueError(f"category {self.category.value} carries no gender/number")
        return self

    @classmethod
    def parse(cls, text: str) -> "PosTag":
        """Parse `CAT[:gender][:number]`, e.g. `N:m:s`, `ADJ:p`, `V`."""
        parts = text.strip().split(":")
        try:
            category = Category(parts[0])
        except ValueError:
            raise ValueError(f"unknown category {parts[0]!r}") from None
        gender, number = Gender.NONE, Number.NONE
        for feature in parts[1:]:
            if feature in ("m", "f") and gender == Gender.NONE and number == Number.NONE:
                gender = Gender(feature)
            elif feature in ("s", "p") and number == Number.NONE:
                number = Number(feature)
            else:
                raise ValueError(f"bad feature {feature!r} in tag {text!r}")
        return cls(category=category, gender=gender, number=number)

    def with_category(self, category: Category) -> "PosTag":
        if category in FEATURED_CATEGORIES and self.category in FEATURED_CATEGORIES:
            return PosTag(category=category, gender=self.gender, number=self.number)
        return PosTag(category=category)

    def __str__(self) -> str:
        text = self.category.value
        if self.gender != Gender.NONE:
            text += f":{self.gender.value}"
        if self.number != Number.NONE:
            text += f":{self.number.value}"
        return text


class TaggedToken(BaseModel):
    model_config = ConfigDict(frozen=True)

    token: Token
    tag: PosTag
    lemma: str

    @model_validator(mode="after")
    def _check_lemma(self) -> "TaggedToken":
        if self.token.kind == TokenKind.WORD and not self.lemma:
            raise ValueError(f"word token {self.token.surface!r} has an empty lemma")
        return self

    @property
    def category(self) -> Category:
        return self.tag.category


class Unit(BaseModel):
    """One chunk: a nominal group, a verbal group or a free token"""
    model_config = ConfigDict(frozen=True)

    kind: UnitKind
    tokens: Tuple[TaggedToken, ...] = Field(min_length=1)
    head_index: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_head(self) -> "Unit":
        if self.head_index >= len(self.tokens):
            raise ValueError(f"head index {self.head_index} outside unit of {len(self.tokens)} tokens")
        head = self.tokens[self.head_index].category
        if self.kind == UnitKind.GN and head != Category.N:
            raise ValueError(f"GN head must be N, got {head.value}")
        if self.kind == UnitKind.GV and head != Category.V:
            raise ValueError(f"GV head must be V, got {head.value}")
        if self.kind == UnitKind.TOK and (len(self.tokens) != 1 or self.head_index != 0):
            raise ValueError("TOK units hold exactly one token")
        return self

    @property
    def head(self) -> TaggedToken:
        return self.tokens[self.head_index]

    @property
    def category(self) -> Category:
        return self.head.category

    @property
    def span(self) -> Span:
        return Span(start=self.tokens[0].token.span.start, end=self.tokens[-1].token.span.end)

    @property
    def text(self) -> str:
        """Surface of the unit including the gaps between its tokens"""
        first, *rest = self.tokens
        return first.token.surface + "".join(t.token.preceding_gap + t.token.surface for t in rest)

    def label(self) -> str:
        """Kind for groups, tag category for free tokens"""
        return self.kind.value if self.kind != UnitKind.TOK else self.category.value
