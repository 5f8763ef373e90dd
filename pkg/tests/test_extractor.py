import pytest

from conftest import EXAMPLE_TRIPLES
from treegen import random_trees
from treetriples.extractor import (
    ExtractionSession, extract, object_noun_phrase, object_preposition_phrase,
    predicate_verb_phrase, subject_noun_phrase)
from treetriples.tree_model import Kind, covered_text, np_index, preorder, read_ptb

POLLS = ("(NP (NP (DT the) (NNS polls)) (PP (IN after) (NP (NP (NNS accusations))"
         " (PP (IN of) (NP (NN vote) (NN rigging))))))")


def tree_of(text):
    (tree,) = read_ptb(text)
    return tree


def triples(text, **kwargs):
    return [t.as_tuple() for t in extract(tree_of(text), **kwargs)]


def test_example_sentence(example_tree):
    assert [t.as_tuple() for t in extract(example_tree)] == EXAMPLE_TRIPLES


def test_example_sentence_verbless_fragments(example_tree):
    found = [t.as_tuple() for t in extract(example_tree, require_verb=False)]
    assert set(EXAMPLE_TRIPLES) < set(found)
    assert ("the polls", "after", "accusations") in found
    assert ("the only other name", "on", "the ballot") in found


def test_no_predicate_sibling():
    assert triples("(S (NP (DT the) (NN dog)))") == []


def test_intransitive_has_no_object():
    assert triples("(S (NP (DT the) (NN dog)) (VP (VB barked)))") == []


def test_two_vp_siblings():
    text = ("(S (NP (DT the) (NN dog)) (VP (VBD chased) (NP (DT a) (NN cat)))"
            " (VP (VBD ate) (NP (DT the) (NN food))))")
    assert triples(text) == [("the dog", "chased", "a cat"), ("the dog", "ate", "the food")]


def test_conjunction_sibling_is_skipped():
    text = "(S (NP (NNS dogs)) (CC and) (VP (VBP bark) (PP (IN at) (NP (NNS cats)))))"
    assert triples(text) == [("dogs", "bark", "at cats")]


def test_modal_joins_predicate():
    text = "(S (NP (PRP We)) (VP (MD will) (VP (VB win) (NP (DT the) (NN game)))))"
    assert triples(text) == [("We", "will win", "the game")]


def test_coordinated_verb_phrases():
    text = ("(S (NP (NNP Ann)) (VP (VP (VBD sang) (NP (NNS songs))) (CC and)"
            " (VP (VBD played) (NP (NN piano)))))")
    assert triples(text) == [("Ann", "sang", "songs"), ("Ann", "played", "piano")]


def test_sbar_seed_reaches_embedded_verb():
    text = ("(S (NP (NN man)) (SBAR (WHNP (WDT that)) (S (VP (VBD left)"
            " (NP (DT the) (NN room))))))")
    assert triples(text) == [("man", "left", "the room")]


def test_later_object_after_first_is_exhausted():
    text = ("(S (NP (PRP She)) (VP (VBD put) (NP (DT the) (NN book))"
            " (PP (IN on) (NP (DT the) (NN shelf)))))")
    assert triples(text) == [("She", "put", "the book"), ("She", "put", "on the shelf")]


def test_duplicates_removed():
    text = "(S (NP (NN it)) (VP (VBZ is) (NP (NN x))) (VP (VBZ is) (NP (NN x))))"
    assert triples(text) == [("it", "is", "x")]


def test_max_extractions(example_tree):
    assert [t.as_tuple() for t in extract(example_tree, max_extractions=2)] == EXAMPLE_TRIPLES[:2]


def test_triple_provenance(example_tree):
    nps = {id(n) for n in np_index(example_tree)}
    for t in extract(example_tree):
        assert id(t.subject_node) in nps
        assert t.subject == covered_text(t.subject_node, example_tree)
        assert t.subject_node.end <= t.predicate_span[0].start
        assert t.seed_node.kind in (Kind.VP, Kind.PP, Kind.SBAR)
        assert t.sentence_id == "1"
    spans = [t.object_span for t in extract(example_tree)]
    assert spans[:3] == [(5, 7), (5, 9), (5, 12)]


# -- the individual phrase functions --------------------------------------------

def session_for(text):
    tree = tree_of(text)
    return ExtractionSession(tree), tree


def test_progressive_object_calls():
    session, tree = session_for(POLLS)
    calls = [object_noun_phrase(session, tree.root) for _ in range(4)]
    assert calls == ["the polls", "the polls after accusations",
                     "the polls after accusations of vote rigging", None]


def test_bare_noun_phrase_base_case():
    session, tree = session_for("(NP (DT the) (NNS polls))")
    assert object_noun_phrase(session, tree.root) == "the polls"
    assert session.is_explored(tree.root)
    assert object_noun_phrase(session, tree.root) is None


def test_non_np_without_phrases_fails():
    session, tree = session_for("(ADJP (JJ happy))")
    assert object_noun_phrase(session, tree.root) is None


def test_preposition_phrase():
    session, tree = session_for("(PP (IN after) (NP (NNS accusations)))")
    assert object_preposition_phrase(session, tree.root) == "after accusations"
    assert object_preposition_phrase(session, tree.root) is None
    session, tree = session_for("(PP (IN of) (NP (NN vote) (NN rigging)))")
    assert object_preposition_phrase(session, tree.root) == "of vote rigging"


def test_preposition_with_explored_noun_fails():
    session, tree = session_for("(PP (IN of) (NP (NN vote)))")
    session.mark(tree.root.children[1])
    assert object_preposition_phrase(session, tree.root) is None
    assert session.is_explored(tree.root)


def test_predicate_verb_phrase_rounds(example_tree):
    first_clause = example_tree.root.children[0].children[0]
    vp = first_clause.children[1]
    session = ExtractionSession(example_tree)
    rounds = []
    while (r := predicate_verb_phrase(session, vp)) is not None:
        rounds.append(r)
    assert rounds == [("boycotted", "the polls"), ("boycotted", "the polls after accusations"),
                      ("boycotted", "the polls after accusations of vote rigging")]
    assert session.is_explored(vp)
    assert predicate_verb_phrase(session, vp) is None


def test_predicate_was(example_tree):
    vp = example_tree.root.children[0].children[3].children[1]
    session = ExtractionSession(example_tree)
    assert predicate_verb_phrase(session, vp) == ("was", "a little known challenger")


def test_subject_noun_phrase_covers_both_conjuncts(example_tree):
    session = ExtractionSession(example_tree)
    subject_noun_phrase(session, example_tree.root)
    subjects = {t.subject for t in session.triples}
    assert subjects == {"The principal opposition parties", "the only other name on the ballot"}
    assert len(session.loop_iterations) > 0


def test_explored_only_names_tree_nodes(example_tree):
    session = ExtractionSession(example_tree)
    vp = example_tree.root.children[0].children[0].children[1]
    before = set()
    while predicate_verb_phrase(session, vp) is not None:
        assert before <= session.explored
        before = set(session.explored)
    ids = {id(n) for n in preorder(example_tree)}
    assert session.explored <= ids


# -- invariants over many trees -------------------------------------------------

def test_session_isolation(example_tree, sample_trees):
    alone = [t.as_tuple() for t in extract(example_tree)]
    for other in sample_trees[:20]:
        extract(other)
    assert [t.as_tuple() for t in extract(example_tree)] == alone


@pytest.mark.parametrize("require_verb", [True, False])
def test_invariants_on_random_trees(require_verb):
    for tree in random_trees(300, seed=11):
        session = ExtractionSession(tree, require_verb=require_verb)
        subject_noun_phrase(session, tree.root)
        assert all(n <= session.node_total for n in session.loop_iterations)
        nps = {id(n) for n in np_index(tree)}
        last = {}
        for t in session.triples:
            assert t.subject and t.predicate and t.object
            assert id(t.subject_node) in nps
            assert t.subject_node.end <= t.predicate_span[0].start
            key = (id(t.subject_node), id(t.seed_node), tuple(map(id, t.predicate_span)))
            if key in last:
                (ps, pe), (s, e) = last[key], t.object_span
                assert e - s > pe - ps or s >= pe
            last[key] = t.object_span


def test_sample_corpus_extracts(sample_trees):
    found = [t.as_tuple() for tree in sample_trees for t in extract(tree)]
    assert ("The company", "reported", "a loss in the third quarter") in found
    assert ("The committee", "will review", "the proposal") in found
    assert ("The committee", "will review", "in March") in found
