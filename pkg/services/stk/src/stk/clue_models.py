from enum import Enum
from fractions import Fraction
from typing import FrozenSet, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .text_models import Category, UnitKind


class ElementCategory(str, Enum):
    """Categories an SSP element can ask for"""
    GN = "GN"
    GV = "GV"
    V = "V"
    ADJ = "Adj"
    ADV = "Adv"
    PREP = "prep"
    DET = "det"
    PRO = "pro"
    CONJ = "conj"
    TOK = "tok"


class ClueType(str, Enum):
    METAPHOR_ANALOGY = "metaphor-analogy"
    METAPHOR = "metaphor"
    ANALOGY = "analogy"
    CONTEXT = "context"


class JudgmentLabel(str, Enum):
    """Hand-assigned reading of one clue occurrence"""
    CONVENTIONAL = "conventional"
    NEW = "new"
    METAPHORIC_CONTEXT = "metaphoric_context"
    NONE = "none"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


DEFAULT_SKIP_CATEGORIES: FrozenSet[str] = frozenset({Category.PUNCT.value, Category.ADV.value})

SKIPPABLE_LABELS: FrozenSet[str] = frozenset(
    [c.value for c in Category] + [UnitKind.GN.value, UnitKind.GV.value]
)


class SlotRef(BaseModel):
    """A (category, index) reference to an SSP element"""
    model_config = ConfigDict(frozen=True)

    category: ElementCategory
    index: int = Field(default=0, ge=0)

    @property
    def label(self) -> str:
        return f"{self.category.value}_{self.index}"

    @classmethod
    def parse(cls, text: str) -> "SlotRef":
        name, sep, index = text.strip().rpartition("_")
        if not sep or not index.isdigit():
            raise ValueError(f"slot {text!r} is not of the form Category_index")
        try:
            return cls(category=ElementCategory(name), index=int(index))
        except ValueError:
            raise ValueError(f"unknown category {name!r} in slot {text!r}") from None

    def __str__(self) -> str:
        return self.label


class PatternElement(BaseModel):
    """One SSP slot; unlabeled elements get index 0 and cannot carry a role"""
    model_config = ConfigDict(frozen=True)

    category: ElementCategory
    index: int = Field(default=0, ge=0)
    optional: bool = False
    labeled: bool = True

    @property
    def slot(self) -> SlotRef:
        return SlotRef(category=self.category, index=self.index)

    def __str__(self) -> str:
        text = self.slot.label if self.labeled else self.category.value
        return f"[{text}]" if self.optional else text


class MarkerConstraint(BaseModel):
    model_config = ConfigDict(frozen=True)

    slot: SlotRef
    lexemes: FrozenSet[str]

    @field_validator("lexemes")
    @classmethod
    def _lowercase(cls, lexemes: FrozenSet[str]) -> FrozenSet[str]:
        return frozenset(lexeme.lower() for lexeme in lexemes)


class RelevanceRecord(BaseModel):
    """Occurrence and judgment counts of one clue"""
    model_config = ConfigDict(frozen=True)

    occurrences: int = 0
    conventional: int = 0
    new: int = 0
    metaphoric_contexts: int = 0
    total: int = 0

    @property
    def counts(self) -> Tuple[int, int, int, int, int]:
        return (self.occurrences, self.conventional, self.new, self.metaphoric_contexts, self.total)

    @property
    def ratio(self) -> Optional[Fraction]:
        """total / occurrences, or None when nothing was counted"""
        if self.occurrences <= 0:
            return None
        return Fraction(self.total, self.occurrences)

    def __add__(self, other: "RelevanceRecord") -> "RelevanceRecord":
        return RelevanceRecord(
            occurrences=self.occurrences + other.occurrences,
            conventional=self.conventional + other.conventional,
            new=self.new + other.new,
            metaphoric_contexts=self.metaphoric_contexts + other.metaphoric_contexts,
            total=self.total + other.total,
        )


class ClueDefinition(BaseModel):
    """
    One catalog entry: a surface syntactic pattern, the lexical marker it
    frames, the slots bearing target and source, and relevance counts.
    Invariants are reported by `clue_catalog.validate_clue`, not enforced here.
    """
    model_config = ConfigDict(frozen=True)

    clue_type: ClueType
    name: str = Field(min_length=1)
    comment: str = ""
    ssp: Tuple[PatternElement, ...]
    lm: MarkerConstraint
    target_slot: Optional[SlotRef] = None
    source_slot: Optional[SlotRef] = None
    relevance: Optional[RelevanceRecord] = None

    def element(self, slot: SlotRef) -> Optional[PatternElement]:
        for element in self.ssp:
            if element.slot == slot:
                return element
        return None


class Catalog(BaseModel):
    model_config = ConfigDict(frozen=True)

    clues: Tuple[ClueDefinition, ...] = ()
    skip_categories: FrozenSet[str] = DEFAULT_SKIP_CATEGORIES

    @field_validator("skip_categories")
    @classmethod
    def _known_labels(cls, labels: FrozenSet[str]) -> FrozenSet[str]:
        unknown = sorted(labels - SKIPPABLE_LABELS)
        if unknown:
            raise ValueError(f"unknown skip categories: {', '.join(unknown)}")
        return labels

    @model_validator(mode="after")
    def _unique_names(self) -> "Catalog":
        seen = set()
        for clue in self.clues:
            if clue.name in seen:
                raise ValueError(f"duplicate clue name {clue.name!r}")
            seen.add(clue.name)
        return self

    def get(self, name: str) -> Optional[ClueDefinition]:
        for clue in self.clues:
            if clue.name == name:
                return clue
        return None


class Judgment(BaseModel):
    model_config = ConfigDict(frozen=True)

    clue_name: str
    doc_id: str
    sentence_index: int = Field(ge=0)
    unit_index: int = Field(ge=0)
    label: JudgmentLabel

    @property
    def key(self) -> Tuple[str, str, int, int]:
        return (self.clue_name, self.doc_id, self.sentence_index, self.unit_index)


class Diagnostic(BaseModel):
    """A validation finding; `invariant` names the rule that was broken"""
    severity: Severity = Severity.ERROR
    clue_name: Optional[str] = None
    invariant: str
    message: str

    def __str__(self) -> str:
        where = f"{self.clue_name}: " if self.clue_name else ""
        return f"{self.severity.value}: {where}{self.message} [{self.invariant}]"
