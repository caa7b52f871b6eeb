#!/usr/bin/env python3
"""
Lexicon loading, baseline tagging, transformation rules and the pre-tagged
interchange format.
"""

import pytest

from stk.pipeline_text import segment
from stk.tagger import (
    LexiconError, PretaggedFormatError, RuleSyntaxError, RuleTrigger, TransformationRule, load_lexicon,
    parse_lexicon, parse_rules, read_pretagged, tag, write_pretagged,
)
from stk.text_models import Category, Gender, Number, PosTag


def tag_text(text, lexicon, rules=()):
    seg = segment(text)
    return [tag(tokens, lexicon, rules) for tokens in seg.tokens]


def categories(tagged):
    return [t.category.value for t in tagged]


def test_single_entry_lexicon():
    lexicon = parse_lexicon("chien\tN:m:s\tchien\n")
    readings = lexicon.lookup("chien")
    assert len(readings) == 1
    assert readings[0].tag == PosTag(category=Category.N, gender=Gender.MASCULINE, number=Number.SINGULAR)
    assert readings[0].lemma == "chien"


def test_repeated_surface_merges_readings_in_file_order():
    lexicon = parse_lexicon("ferme\tN:f:s\tferme\nferme\tV\tfermer\n")
    readings = lexicon.lookup("FERME")
    assert [r.tag.category for r in readings] == [Category.N, Category.V]
    assert [r.lemma for r in readings] == ["ferme", "fermer"]


def test_malformed_line_names_its_line():
    with pytest.raises(LexiconError) as excinfo:
        parse_lexicon("bad line")
    assert excinfo.value.line == 1

    with pytest.raises(LexiconError) as excinfo:
        parse_lexicon("# header\nchat\tN\tchat\nchien\tXYZ\tchien\n")
    assert excinfo.value.line == 3


def test_empty_lexicon_is_an_error():
    with pytest.raises(LexiconError, match="empty lexicon"):
        parse_lexicon("# nothing here\n\n")


def test_features_on_unfeatured_category_are_rejected():
    with pytest.raises(LexiconError):
        parse_lexicon("vite\tADV:m\tvite\n")


def test_lexicon_file(data_dir):
    lexicon = load_lexicon(data_dir / "lexicon.tsv")
    assert lexicon.lookup("like")[0].tag.category == Category.PREP
    assert lexicon.guess("quickly").category == Category.ADV
    assert lexicon.guess("xyzzy").category == Category.N


def test_empty_sentence():
    lexicon = parse_lexicon("le\tDET\tle\n")
    assert tag([], lexicon) == []


def test_baseline_lookup():
    lexicon = parse_lexicon("le\tDET\tle\nchien\tN:m:s\tchien\ndort\tV\tdormir\n")
    [tagged] = tag_text("le chien dort", lexicon)
    assert categories(tagged) == ["DET", "N", "V"]
    assert [t.lemma for t in tagged] == ["le", "chien", "dormir"]


def test_suffix_and_default_fallbacks():
    lexicon = parse_lexicon("*\tADJ\n-ment\tADV\nle\tDET\tle\n")
    [tagged] = tag_text("le Rapidement bleu !", lexicon)
    assert categories(tagged) == ["DET", "ADV", "ADJ", "PUNCT"]
    assert tagged[1].lemma == "rapidement"


def test_words_in_the_lexicon_never_get_the_default(lexicon):
    [tagged] = tag_text("The metaphor extends the idea.", lexicon)
    for t in tagged[:-1]:
        assert t.tag == lexicon.lookup(t.token.surface)[0].tag


def test_numbers_are_tagged_other():
    lexicon = parse_lexicon("le\tDET\tle\n")
    [tagged] = tag_text("le 12", lexicon)
    assert tagged[1].category == Category.OTHER


def test_rule_fixes_verb_after_determiner():
    lexicon = parse_lexicon("la\tDET:f:s\tle\nferme\tV\tfermer\nferme\tN:f:s\tferme\n")
    rules = parse_rules("V>N prev_tag_is DET\n")
    [tagged] = tag_text("la ferme", lexicon, rules)
    assert categories(tagged) == ["DET", "N"]
    assert tagged[1].lemma == "ferme"
    assert tagged[1].tag.gender == Gender.FEMININE


def test_rule_without_matching_reading_drops_features():
    lexicon = parse_lexicon("he\tPRO:m:s\the\nlion\tN:m:s\tlion\n")
    rules = parse_rules("N>V prev_tag_is PRO\n")
    [tagged] = tag_text("he lion", lexicon, rules)
    assert tagged[1].tag == PosTag(category=Category.V)
    assert tagged[1].lemma == "lion"


def test_each_rule_reads_the_tags_of_its_pass_start():
    lexicon = parse_lexicon("lion\tN\tlion\n")
    rules = parse_rules("N>V prev_tag_is N\n")
    [tagged] = tag_text("lion lion lion", lexicon, rules)
    assert categories(tagged) == ["N", "V", "V"]


def test_rules_apply_in_order(lexicon):
    first = parse_rules("PREP>V prev_word_is we\nV>ADJ prev_tag_is PRO\n")
    second = list(reversed(first))
    [a] = tag_text("We like lions.", lexicon, first)
    [b] = tag_text("We like lions.", lexicon, second)
    assert a[1].category == Category.ADJ
    assert b[1].category == Category.V


def test_word_triggers_and_fixture_rules(lexicon, rules):
    [tagged] = tag_text("We like the lion.", lexicon, rules)
    assert categories(tagged) == ["PRO", "V", "DET", "N", "PUNCT"]
    assert tagged[1].lemma == "like"


def test_surrounded_by_tags():
    rule = TransformationRule(
        trigger=RuleTrigger.SURROUNDED_BY_TAGS,
        trigger_args=("DET", "N"),
        from_tag=Category.V,
        to_tag=Category.ADJ,
    )
    lexicon = parse_lexicon("the\tDET\tthe\nrunning\tV\trun\nwater\tN\twater\n")
    [tagged] = tag_text("the running water", lexicon, [rule])
    assert categories(tagged) == ["DET", "ADJ", "N"]


def test_tagging_preserves_length_and_is_deterministic(lexicon, rules, lion_text):
    seg = segment(lion_text)
    first = tag(seg.tokens[0], lexicon, rules)
    assert len(first) == len(seg.tokens[0])
    assert first == tag(seg.tokens[0], lexicon, rules)


@pytest.mark.parametrize("line", [
    "N>N prev_tag_is DET",
    "N>V unknown_trigger DET",
    "N>V prev_tag_is",
    "N>V surrounded_by_tags DET",
    "N>V prev_tag_is NOPE",
    "NV prev_tag_is DET",
    "X>V prev_tag_is DET",
])
def test_bad_rules(line):
    with pytest.raises(RuleSyntaxError) as excinfo:
        parse_rules(f"# rules\n{line}\n")
    assert excinfo.value.line == 2


def test_rule_text_round_trips():
    text = "V>N prev_tag_is DET\nPREP>V prev_word_is we\nV>ADJ surrounded_by_tags DET N\n"
    assert "\n".join(str(rule) for rule in parse_rules(text)) + "\n" == text


def test_pretagged_round_trip(lexicon, rules):
    sentences = tag_text("Peter threw himself on the dessert. We like the lion.", lexicon, rules)
    text = write_pretagged(sentences)
    document, read_back = read_pretagged(text)

    assert document == "Peter threw himself on the dessert .\nWe like the lion ."
    assert [[(t.token.surface, t.tag, t.lemma) for t in s] for s in read_back] == [
        [(t.token.surface, t.tag, t.lemma) for t in s] for s in sentences
    ]
    for sentence in read_back:
        for t in sentence:
            assert t.token.span.slice(document) == t.token.surface
    assert write_pretagged(read_back) == text


def test_pretagged_format_errors():
    with pytest.raises(PretaggedFormatError, match="line 2"):
        read_pretagged("chien\tN\tchien\ndort\tV\n")
    with pytest.raises(PretaggedFormatError, match="line 1"):
        read_pretagged("chien\tNOUN\tchien\n")
