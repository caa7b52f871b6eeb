"""
Surface syntactic pattern matching over chunked sentences.

An alignment binds the SSP elements, in order, to strictly increasing units.
Units between two bindings must all be skippable; optional elements may
stay unbound. The marker slot's unit must carry one of the clue's lexemes
as its head lemma.

Among the alignments starting at a unit, the winner binds the most optional
elements, then ends earliest, then has the smallest binding vector (bound
before unbound, earlier units first). Scanning is leftmost, and by default
the next scan resumes after the previous match.
"""

import logging
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .annotation_models import Match
from .clue_models import Catalog, ClueDefinition, ElementCategory
from .text_models import Category, Span, Unit, UnitKind

logger = logging.getLogger(__name__)

_TOK_CATEGORIES = {
    ElementCategory.ADJ: Category.ADJ,
    ElementCategory.ADV: Category.ADV,
    ElementCategory.PREP: Category.PREP,
    ElementCategory.DET: Category.DET,
    ElementCategory.PRO: Category.PRO,
    ElementCategory.CONJ: Category.CONJ,
}

# (optional elements bound, last bound unit or -1, binding vector)
_Candidate = Tuple[int, int, Tuple[Tuple[int, int], ...]]

_UNBOUND = (1, 0)


def compatible(category: ElementCategory, unit: Unit) -> bool:
    """Whether an SSP element of `category` may bind `unit`"""
    if category == ElementCategory.GN:
        return unit.kind == UnitKind.GN
    if category == ElementCategory.GV:
        return unit.kind == UnitKind.GV
    if category == ElementCategory.V:
        return unit.kind == UnitKind.GV or (unit.kind == UnitKind.TOK and unit.category == Category.V)
    if category == ElementCategory.TOK:
        return unit.kind == UnitKind.TOK
    return unit.kind == UnitKind.TOK and unit.category == _TOK_CATEGORIES[category]


def is_skippable(unit: Unit, skip_categories: FrozenSet[str]) -> bool:
    return unit.label() in skip_categories


def marker_holds(unit: Unit, lexemes: FrozenSet[str]) -> bool:
    """Marker test at the unit's head token, case-insensitive on the lemma"""
    return unit.head.lemma.lower() in lexemes


def candidate_key(candidate: _Candidate):
    optionals, last, vector = candidate
    return (-optionals, last, vector)


class _Aligner:
    """Best alignment per start unit by dynamic programming over (element, unit)"""

    def __init__(self, clue: ClueDefinition, units: Sequence[Unit], skip_categories: FrozenSet[str]):
        self.clue = clue
        self.units = units
        self.ssp = clue.ssp
        self.skippable = [is_skippable(unit, skip_categories) for unit in units]
        self.marker_index = next(
            (i for i, element in enumerate(clue.ssp) if element.slot == clue.lm.slot), None
        )
        self._allowed: Dict[Tuple[int, int], bool] = {}
        self._memo: Dict[Tuple[int, int], Optional[_Candidate]] = {}

    def allowed(self, k: int, q: int) -> bool:
        key = (k, q)
        if key not in self._allowed:
            unit = self.units[q]
            ok = compatible(self.ssp[k].category, unit)
            if ok and k == self.marker_index:
                ok = marker_holds(unit, self.clue.lm.lexemes)
            self._allowed[key] = ok
        return self._allowed[key]

    def best_from(self, k: int, p: int) -> Optional[_Candidate]:
        """Best completion of elements k.. when the next binding may start at unit p"""
        if k == len(self.ssp):
            return (0, -1, ())
        key = (k, p)
        if key in self._memo:
            return self._memo[key]

        element = self.ssp[k]
        options: List[_Candidate] = []
        if element.optional:
            rest = self.best_from(k + 1, p)
            if rest is not None:
                options.append((rest[0], rest[1], (_UNBOUND,) + rest[2]))
        q = p
        while q < len(self.units):
            if self.allowed(k, q):
                rest = self.best_from(k + 1, q + 1)
                if rest is not None:
                    options.append((rest[0] + int(element.optional), max(q, rest[1]), ((0, q),) + rest[2]))
            if not self.skippable[q]:
                break
            q += 1

        best = min(options, key=candidate_key) if options else None
        self._memo[key] = best
        return best

    def best_at(self, s: int) -> Optional[_Candidate]:
        """Best alignment whose first bound unit is `s`"""
        options: List[_Candidate] = []
        for k0, element in enumerate(self.ssp):
            if self.allowed(k0, s):
                rest = self.best_from(k0 + 1, s + 1)
                if rest is not None:
                    options.append((
                        rest[0] + int(element.optional),
                        max(s, rest[1]),
                        (_UNBOUND,) * k0 + ((0, s),) + rest[2],
                    ))
            if not element.optional:
                break
        return min(options, key=candidate_key) if options else None

    def to_match(self, s: int, candidate: _Candidate) -> Match:
        _, last, vector = candidate
        bindings = {
            element.slot.label: unit
            for element, (unbound, unit) in zip(self.ssp, vector)
            if not unbound
        }

        def role_span(slot) -> Optional[Span]:
            if slot is None or slot.label not in bindings:
                return None
            return self.units[bindings[slot.label]].span

        marker_unit = self.units[bindings[self.clue.lm.slot.label]]
        return Match(
            clue_name=self.clue.name,
            unit_range=(s, last),
            bindings=bindings,
            span=Span(start=self.units[s].span.start, end=self.units[last].span.end),
            marker_surface=marker_unit.head.token.surface,
            target_span=role_span(self.clue.target_slot),
            source_span=role_span(self.clue.source_slot),
        )


def match_clue(
    clue: ClueDefinition,
    units: Sequence[Unit],
    skip_categories: FrozenSet[str],
    all_matches: bool = False,
) -> List[Match]:
    """
    Leftmost matches of one clue in one chunked sentence. Matches do not
    overlap unless `all_matches` is set, in which case the best alignment
    at every start unit is returned.
    """
    aligner = _Aligner(clue, units, frozenset(skip_categories))
    if aligner.marker_index is None or clue.ssp[aligner.marker_index].optional:
        logger.warning(f"clue {clue.name!r} has no required marker element, skipped")
        return []

    matches: List[Match] = []
    s = 0
    while s < len(units):
        candidate = aligner.best_at(s)
        if candidate is None:
            s += 1
            continue
        matches.append(aligner.to_match(s, candidate))
        s = s + 1 if all_matches else candidate[1] + 1
    return matches


def match_all(
    catalog: Catalog,
    units: Sequence[Unit],
    all_matches: bool = False,
    skip_categories: Optional[FrozenSet[str]] = None,
) -> List[Match]:
    """Matches of every clue, sorted by first unit then catalog order"""
    skip = catalog.skip_categories if skip_categories is None else skip_categories
    matches: List[Match] = []
    for clue in catalog.clues:
        matches.extend(match_clue(clue, units, skip, all_matches))
    return sorted(matches, key=lambda m: m.unit_range[0])
