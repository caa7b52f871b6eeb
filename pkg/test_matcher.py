#!/usr/bin/env python3
"""
SSP matching: worked examples, the subject-position negative, and agreement
with an exhaustive enumeration of alignments on random cases.
"""

import itertools
import logging
import random

from stk.chunker import chunk
from stk.clue_catalog import parse_element
from stk.clue_models import Catalog, ClueDefinition, ClueType, MarkerConstraint, PatternElement, SlotRef
from stk.matcher import compatible, is_skippable, match_all, match_clue
from stk.pipeline_text import segment
from stk.tagger import tag
from stk.text_models import Category, PosTag, Span, TaggedToken, Token, TokenKind, Unit, UnitKind

DEFAULT_SKIP = frozenset({"PUNCT", "ADV"})


def make_units(specs):
    """
    Units from (kind, category, lemma) triples. GN units get a determiner
    in front of their noun, so heads are not always the first token.
    """
    units = []
    offset = 0

    def token(surface, category):
        nonlocal offset
        kind = TokenKind.PUNCTUATION if category == Category.PUNCT else TokenKind.WORD
        t = Token(surface=surface, span=Span(start=offset, end=offset + len(surface)), preceding_gap=" ", kind=kind)
        offset += len(surface) + 1
        return TaggedToken(token=t, tag=PosTag(category=category), lemma=surface.lower())

    for kind, category, lemma in specs:
        if kind == "GN":
            units.append(Unit(kind=UnitKind.GN, tokens=(token("det", Category.DET), token(lemma, Category.N)), head_index=1))
        elif kind == "GV":
            units.append(Unit(kind=UnitKind.GV, tokens=(token(lemma, Category.V),)))
        else:
            units.append(Unit(kind=UnitKind.TOK, tokens=(token(lemma, category),)))
    return units


def make_clue(ssp, lm, lexemes, target=None, source=None, name="T"):
    return ClueDefinition(
        clue_type=ClueType.METAPHOR_ANALOGY,
        name=name,
        ssp=tuple(parse_element(e) for e in ssp.split()),
        lm=MarkerConstraint(slot=SlotRef.parse(lm), lexemes=frozenset(lexemes)),
        target_slot=SlotRef.parse(target) if target else None,
        source_slot=SlotRef.parse(source) if source else None,
    )


B2222 = make_clue("GN_0 GN_1 V_1 Adj_0 [prep] GN_2", "Adj_0", {"pareil"}, "GN_1", "GN_2", name="B.2.2.2")


def b2222_units(adjective="pareil", preposition=True):
    specs = [("GN", Category.N, "ville"), ("GN", Category.N, "centre"), ("GV", Category.V, "est"),
             ("TOK", Category.ADJ, adjective)]
    if preposition:
        specs.append(("TOK", Category.PREP, "à"))
    specs.append(("GN", Category.N, "ruche"))
    return make_units(specs)


def chunked(text, lexicon, rules):
    return [chunk(tag(tokens, lexicon, rules)) for tokens in segment(text).tokens]


def test_b2222_structure():
    units = b2222_units()
    [m] = match_clue(B2222, units, DEFAULT_SKIP)
    assert m.bindings == {"GN_0": 0, "GN_1": 1, "V_1": 2, "Adj_0": 3, "prep_0": 4, "GN_2": 5}
    assert m.unit_range == (0, 5)
    assert m.target_span == units[1].span
    assert m.source_span == units[5].span
    assert m.marker_surface == "pareil"
    assert m.span == Span(start=units[0].span.start, end=units[5].span.end)


def test_marker_lexeme_must_match():
    assert match_clue(B2222, b2222_units(adjective="grand"), DEFAULT_SKIP) == []


def test_marker_is_case_insensitive():
    units = b2222_units(adjective="Pareil")
    [m] = match_clue(B2222, units, DEFAULT_SKIP)
    assert m.marker_surface == "Pareil"


def test_optional_preposition_may_stay_unbound():
    [m] = match_clue(B2222, b2222_units(preposition=False), DEFAULT_SKIP)
    assert "prep_0" not in m.bindings
    assert m.bindings["GN_2"] == 4


def test_skippable_units_between_bindings():
    units = make_units([
        ("GN", Category.N, "ville"), ("TOK", Category.PUNCT, ","), ("GN", Category.N, "centre"),
        ("TOK", Category.ADV, "bien"), ("GV", Category.V, "est"), ("TOK", Category.ADJ, "pareil"),
        ("GN", Category.N, "ruche"),
    ])
    [m] = match_clue(B2222, units, DEFAULT_SKIP)
    assert m.bindings == {"GN_0": 0, "GN_1": 2, "V_1": 4, "Adj_0": 5, "GN_2": 6}
    assert match_clue(B2222, units, frozenset()) == []


def test_unskippable_unit_blocks_the_match():
    units = make_units([
        ("GN", Category.N, "ville"), ("TOK", Category.CONJ, "et"), ("GN", Category.N, "centre"),
        ("GV", Category.V, "est"), ("TOK", Category.ADJ, "pareil"), ("GN", Category.N, "ruche"),
    ])
    assert match_clue(B2222, units, DEFAULT_SKIP) == []
    [m] = match_clue(B2222, units, DEFAULT_SKIP | {"CONJ"})
    assert m.bindings["GN_1"] == 2


def test_subject_position_is_not_a_marker(lexicon, rules):
    clue = make_clue("GV_1 GN_1", "GN_1", {"metaphor"})
    [subject] = chunked("The metaphor extends the idea.", lexicon, rules)
    assert match_clue(clue, subject, DEFAULT_SKIP) == []

    [obj] = chunked("We extend the conventional metaphor.", lexicon, rules)
    [m] = match_clue(clue, obj, DEFAULT_SKIP)
    assert m.marker_surface == "metaphor"
    assert m.bindings == {"GV_1": 1, "GN_1": 2}


def test_lion_sentence(lexicon, rules, lion_catalog, lion_text):
    [units] = chunked(lion_text, lexicon, rules)
    [m] = match_all(lion_catalog, units)
    assert m.target_span.slice(lion_text) == "Peter"
    assert m.source_span.slice(lion_text) == "a lion"
    assert m.marker_surface == "like"
    assert m.unit_range == (5, 11)


def test_lion_sentence_needs_its_skip_set(lexicon, rules, lion_catalog, lion_text):
    [units] = chunked(lion_text, lexicon, rules)
    assert match_all(lion_catalog, units, skip_categories=DEFAULT_SKIP) == []


def test_most_optionals_then_earliest_binding_vector():
    clue = make_clue("GN_1 [GN_2] [GN_3] prep_0", "prep_0", {"like"})
    units = make_units([("GN", Category.N, "a"), ("GN", Category.N, "b"), ("TOK", Category.PREP, "like")])
    [m] = match_clue(clue, units, DEFAULT_SKIP)
    assert m.bindings == {"GN_1": 0, "GN_2": 1, "prep_0": 2}


def test_shortest_range_wins_among_equal_optionals():
    clue = make_clue("GN_1 prep_0", "prep_0", {"like"})
    units = make_units([("GN", Category.N, "a"), ("TOK", Category.PREP, "like"), ("TOK", Category.PREP, "like")])
    [m] = match_clue(clue, units, frozenset({"PREP"}))
    assert m.unit_range == (0, 1)


def test_leftmost_non_overlapping_and_all_matches():
    clue = make_clue("GN_1 GN_2", "GN_2", {"x"})
    units = make_units([("GN", Category.N, "x")] * 3)
    assert [m.unit_range for m in match_clue(clue, units, DEFAULT_SKIP)] == [(0, 1)]
    assert [m.unit_range for m in match_clue(clue, units, DEFAULT_SKIP, all_matches=True)] == [(0, 1), (1, 2)]


def test_v_element_binds_gv_or_bare_verb():
    gv = make_units([("GV", Category.V, "est")])[0]
    bare = make_units([("TOK", Category.V, "est")])[0]
    adj = make_units([("TOK", Category.ADJ, "grand")])[0]
    v = parse_element("V_1").category
    assert compatible(v, gv) and compatible(v, bare) and not compatible(v, adj)
    assert not compatible(parse_element("GV_1").category, bare)
    assert compatible(parse_element("tok").category, adj)
    assert is_skippable(adj, frozenset({"ADJ"})) and not is_skippable(gv, frozenset({"ADJ"}))


def test_optional_marker_clue_is_skipped(caplog):
    clue = make_clue("GN_1 [prep_0]", "prep_0", {"like"})
    units = make_units([("GN", Category.N, "a"), ("TOK", Category.PREP, "like")])
    with caplog.at_level(logging.WARNING):
        assert match_clue(clue, units, DEFAULT_SKIP) == []
    assert "no required marker" in caplog.text


def test_match_all():
    units = b2222_units()
    assert match_all(Catalog(), units) == []

    second = make_clue("GV_1 Adj_0", "Adj_0", {"pareil"}, name="X.1")
    catalog = Catalog(clues=(second, B2222))
    matches = match_all(catalog, units)
    assert [(m.clue_name, m.unit_range[0]) for m in matches] == [("B.2.2.2", 0), ("X.1", 2)]
    assert match_clue(B2222, units, DEFAULT_SKIP) == [matches[0]]


def test_match_all_keeps_catalog_order_at_equal_start():
    units = b2222_units()
    first = make_clue("GN_0 GN_1", "GN_1", {"centre"}, name="A.1")
    catalog = Catalog(clues=(B2222, first))
    assert [m.clue_name for m in match_all(catalog, units)] == ["B.2.2.2", "A.1"]


def test_two_disjoint_occurrences():
    clue = make_clue("GV_1 GN_1", "GN_1", {"metaphor"})
    units = make_units([
        ("GV", Category.V, "extend"), ("GN", Category.N, "metaphor"), ("TOK", Category.CONJ, "and"),
        ("GV", Category.V, "prune"), ("GN", Category.N, "metaphor"),
    ])
    assert [m.unit_range for m in match_clue(clue, units, DEFAULT_SKIP)] == [(0, 1), (3, 4)]


# Exhaustive reference: enumerate every subset of optional elements and every
# increasing unit assignment, keep the legal ones, pick the best per start.

def oracle(clue, units, skip, all_matches=False):
    marker = clue.lm.slot
    optional = [i for i, e in enumerate(clue.ssp) if e.optional]

    def legal(element, unit):
        if not compatible(element.category, unit):
            return False
        return element.slot != marker or unit.head.lemma.lower() in clue.lm.lexemes

    best = {}
    for r in range(len(optional) + 1):
        for chosen in itertools.combinations(optional, r):
            bound = [i for i, e in enumerate(clue.ssp) if not e.optional or i in chosen]
            for positions in itertools.combinations(range(len(units)), len(bound)):
                if not all(legal(clue.ssp[k], units[q]) for k, q in zip(bound, positions)):
                    continue
                if not all(
                    is_skippable(units[q], skip)
                    for a, b in zip(positions, positions[1:])
                    for q in range(a + 1, b)
                ):
                    continue
                where = dict(zip(bound, positions))
                vector = tuple((0, where[k]) if k in where else (1, 0) for k in range(len(clue.ssp)))
                key = (-r, positions[-1], vector)
                start = positions[0]
                if start not in best or key < best[start][0]:
                    best[start] = (key, {clue.ssp[k].slot.label: q for k, q in where.items()})

    found = []
    s = 0
    while s < len(units):
        if s not in best:
            s += 1
            continue
        key, bindings = best[s]
        found.append(((s, key[1]), bindings))
        s = s + 1 if all_matches else key[1] + 1
    return found


ELEMENTS = ["GN", "GN", "GV", "V", "Adj", "prep", "tok", "Adv"]
UNIT_SPECS = [
    ("GN", Category.N), ("GN", Category.N), ("GV", Category.V), ("TOK", Category.V),
    ("TOK", Category.ADJ), ("TOK", Category.PREP), ("TOK", Category.ADV), ("TOK", Category.PUNCT),
    ("TOK", Category.CONJ),
]
LEMMAS = ["like", "pareil", "x"]
SKIP_LABELS = ["PUNCT", "ADV", "GN", "PREP", "CONJ", "ADJ"]


def random_case(rng):
    n_elements = rng.randint(1, 6)
    elements = []
    used = set()
    while len(elements) < n_elements:
        category = parse_element(rng.choice(ELEMENTS)).category
        index = rng.randint(0, 2)
        if (category, index) in used:
            continue
        used.add((category, index))
        elements.append(PatternElement(category=category, index=index))

    marker_at = rng.randrange(len(elements))
    candidates = [i for i in range(len(elements)) if i != marker_at]
    for i in rng.sample(candidates, min(len(candidates), rng.randint(0, 2))):
        elements[i] = elements[i].model_copy(update={"optional": True})

    clue = ClueDefinition(
        clue_type=ClueType.METAPHOR,
        name="R",
        ssp=tuple(elements),
        lm=MarkerConstraint(slot=elements[marker_at].slot, lexemes=frozenset(rng.sample(LEMMAS, rng.randint(1, 2)))),
    )
    specs = []
    for _ in range(rng.randint(0, 12)):
        kind, category = rng.choice(UNIT_SPECS)
        specs.append((kind, category, rng.choice(LEMMAS)))
    skip = frozenset(rng.sample(SKIP_LABELS, rng.randint(0, 3)))
    return clue, make_units(specs), skip


def test_agrees_with_exhaustive_enumeration():
    rng = random.Random(1234)
    matched_cases = 0
    for _ in range(1200):
        clue, units, skip = random_case(rng)
        all_matches = rng.random() < 0.2
        got = [(m.unit_range, m.bindings) for m in match_clue(clue, units, skip, all_matches)]
        assert got == oracle(clue, units, skip, all_matches)
        matched_cases += bool(got)
    assert matched_cases > 100


def test_match_invariants_on_random_cases():
    rng = random.Random(99)
    for _ in range(500):
        clue, units, skip = random_case(rng)
        matches = match_clue(clue, units, skip)
        for m in matches:
            bound = [m.bindings[e.slot.label] for e in clue.ssp if e.slot.label in m.bindings]
            assert bound == sorted(set(bound))
            assert m.unit_range == (bound[0], bound[-1])
            for e in clue.ssp:
                if not e.optional:
                    assert e.slot.label in m.bindings
                if e.slot.label in m.bindings:
                    assert compatible(e.category, units[m.bindings[e.slot.label]])
            assert units[m.bindings[clue.lm.slot.label]].head.lemma in clue.lm.lexemes
        for a, b in zip(matches, matches[1:]):
            assert a.unit_range[1] < b.unit_range[0]
