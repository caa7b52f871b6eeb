"""
Flat chunking of a tagged sentence into GN, GV and free tokens.

The grammar runs as an nltk.RegexpParser cascade over the category
sequence, noun groups first:

    GN: {<DET>?<ADJ>*<N><ADJ|N>*}    head: first N
    GV: {<ADV>*<V>+}                 head: first V

Anything the two groups do not absorb becomes a one-token TOK unit, which
keeps predicative adjectives free for patterns that bind them.
"""

from typing import List, Sequence

import nltk

from .text_models import Category, TaggedToken, Unit, UnitKind

GRAMMAR = r"""
    GN: {<DET>?<ADJ>*<N><ADJ|N>*}
    GV: {<ADV>*<V>+}
"""

_HEADS = {UnitKind.GN: Category.N, UnitKind.GV: Category.V}

_parser = nltk.RegexpParser(GRAMMAR)


def chunk(tagged: Sequence[TaggedToken]) -> List[Unit]:
    """Partition one tagged sentence into units, left to right, longest group first"""
    if not tagged:
        return []
    tree = _parser.parse([(i, t.category.value) for i, t in enumerate(tagged)])

    units: List[Unit] = []
    for node in tree:
        if isinstance(node, nltk.Tree):
            kind = UnitKind(node.label())
            members = tuple(tagged[i] for i, _ in node.leaves())
            head = next(k for k, t in enumerate(members) if t.category == _HEADS[kind])
            units.append(Unit(kind=kind, tokens=members, head_index=head))
        else:
            units.append(Unit(kind=UnitKind.TOK, tokens=(tagged[node[0]],)))
    return units
