"""Exit criteria for the package, one test per criterion."""

import io
import itertools
import random
import time

import pytest

from conftest import FIXTURES, EXAMPLE_TRIPLES
from oracles import max_matching_size
from treegen import random_trees
from treetriples.analytics import GoldTriple, evaluate, match_pairs, production_stats
from treetriples.cfg import cky_parse, enumerate_derivations, paper_grammar
from treetriples.extractor import ExtractionSession, predicate_verb_phrase, subject_noun_phrase
from treetriples.pipeline_io import TripleRecord, main, read_triples_tsv
from treetriples.tree_model import (
    EmptyTree, Kind, LabelWithoutToken, MalformedTree, PTBError, UnbalancedBrackets, read_ptb,
    write_ptb)


@pytest.mark.criterion("1 golden triples from the example sentence, exact, < 100 ms")
def test_golden_triples(example_path):
    main(["extract", "--input", example_path], io.StringIO(), io.StringIO())  # warm imports
    out, err = io.StringIO(), io.StringIO()
    start = time.perf_counter()
    status = main(["extract", "--input", example_path], out, err)
    elapsed = time.perf_counter() - start
    assert status == 0
    assert [r.as_tuple() for r in read_triples_tsv(io.StringIO(out.getvalue()))] == EXAMPLE_TRIPLES
    assert elapsed < 0.100


NESTED_OBJECTS = {
    0: "(NP (DT the) (NNS polls))",
    1: "(NP (NP (DT the) (NNS polls)) (PP (IN after) (NP (NNS accusations))))",
    2: ("(NP (NP (DT the) (NNS polls)) (PP (IN after) (NP (NP (NNS accusations))"
        " (PP (IN of) (NP (NN vote) (NN rigging))))))"),
}


@pytest.mark.criterion("2 progressive objects: k nested PPs give k+1 growing objects")
@pytest.mark.parametrize("k", [0, 1, 2], ids=lambda k: f"k={k}")
def test_progressive_objects(k):
    (tree,) = read_ptb(f"(S (NP (NNS parties)) (VP (VBD boycotted) {NESTED_OBJECTS[k]}))")
    vp = tree.root.children[1]
    session = ExtractionSession(tree)
    objects = []
    for _ in range(k + 2):
        result = predicate_verb_phrase(session, vp)
        if result is None:
            break
        objects.append(result[1])
    assert len(objects) == k + 1
    assert predicate_verb_phrase(session, vp) is None
    lengths = [len(o.split()) for o in objects]
    assert all(a < b for a, b in zip(lengths, lengths[1:]))


@pytest.mark.criterion("3 termination within |nodes| iterations and determinism, 500 trees")
def test_termination_and_determinism():
    trees = random_trees(500, seed=2024, max_depth=8, max_branch=5)
    runs = []
    for _ in range(3):
        run = []
        for tree in trees:
            session = ExtractionSession(tree, require_verb=False)
            subject_noun_phrase(session, tree.root)
            assert all(n <= session.node_total for n in session.loop_iterations)
            run.append([t.as_tuple() for t in session.triples])
        runs.append(run)
    assert runs[0] == runs[1] == runs[2]
    assert sum(map(len, runs[0])) > 0


@pytest.mark.criterion("4 CKY equals derivation oracle for every sentence of length <= 8")
def test_cky_oracle_equivalence():
    g = paper_grammar()
    # the demo lexicon has one tag per word; one representative per tag covers all sentences
    by_tags = {}
    for word, tags in sorted(g.lexicon.items()):
        by_tags.setdefault(tags, word)
    reps = list(by_tags.values())
    assert len(reps) == 4
    for n in range(1, 9):
        for words in itertools.product(reps, repeat=n):
            a = [write_ptb(t) for t in cky_parse(g, words)]
            b = [write_ptb(t) for t in enumerate_derivations(g, words)]
            assert a == b, words
    assert len(cky_parse(g, "the dog saw the man in the park".split())) == 2


@pytest.mark.criterion("5 precision 0.75 / recall 0.60 fixture; matching equals brute force")
def test_evaluation_arithmetic():
    out = io.StringIO()
    status = main(["eval", "--input", str(FIXTURES / "eval_corpus.ptb"),
                   "--gold", str(FIXTURES / "eval_gold.tsv")], out, io.StringIO())
    assert status == 0
    assert out.getvalue().splitlines()[-1] == "precision 0.75 recall 0.60"

    rng = random.Random(50)
    vocab = ["the dog", "dog", "a cat", "cat", "saw", "saw the", "chased", "in the park"]
    for _ in range(50):
        def triple():
            return (rng.choice(vocab[:4]), rng.choice(vocab[4:7]), rng.choice(vocab))
        n_ext = rng.randint(0, 10)
        n_gold = rng.randint(0, 20 - n_ext) if n_ext < 10 else rng.randint(0, 10)
        ext = [triple() for _ in range(n_ext)]
        gold = [triple() for _ in range(n_gold)]
        assert n_ext + n_gold <= 20
        for policy in ("exact", "containment"):
            assert len(match_pairs(ext, gold, policy)) == max_matching_size(ext, gold, policy)
        report = evaluate([TripleRecord("1", *t) for t in ext],
                          [GoldTriple("1", *t) for t in gold])
        assert report.matched_count == max_matching_size(ext, gold, "containment")


COMMON_RULES = {
    Kind.NP: {(Kind.NN,), (Kind.NP, Kind.PP), (Kind.DT, Kind.NN), (Kind.NN, Kind.NN)},
    Kind.VP: {(Kind.VB, Kind.NP), (Kind.VB, Kind.VP), (Kind.TO, Kind.VP), (Kind.VB, Kind.PP),
              (Kind.VB,)},
    Kind.PP: {(Kind.IN, Kind.NP), (Kind.TO, Kind.NP)},
}


@pytest.mark.criterion("6 phrase distribution shape on the bundled corpus")
def test_phrase_distribution_shape(sample_trees):
    assert len(sample_trees) >= 100
    rows = production_stats(sample_trees)
    groups = {}
    for row in rows:
        groups.setdefault(row.lhs, []).append(row)
    assert groups[Kind.PP][0].rhs == (Kind.IN, Kind.NP)
    for kind in (Kind.NP, Kind.VP):
        assert groups[kind][0].rhs in COMMON_RULES[kind]
        listed = sum(r.share for r in groups[kind] if r.rhs in COMMON_RULES[kind])
        assert listed >= 0.40


MALFORMED = [
    ("(S (NP (NN dog))", UnbalancedBrackets),
    (")", UnbalancedBrackets),
    ("()", EmptyTree),
    ("(S (NN))", LabelWithoutToken),
    ("(NP dog (NN cat))", MalformedTree),
    ("loose words", MalformedTree),
]


@pytest.mark.criterion("7 PTB round trip on all fixtures; malformed input diagnosed")
def test_round_trip_and_robustness(sample_trees, example_tree, tmp_path):
    with open(FIXTURES / "eval_corpus.ptb") as fh:
        corpus = sample_trees + [example_tree] + read_ptb(fh)
    for tree in corpus:
        assert read_ptb(write_ptb(tree)) == [tree]
    for i, (text, error) in enumerate(MALFORMED):
        with pytest.raises(error):
            read_ptb(text)
        path = tmp_path / f"bad{i}.ptb"
        path.write_text(text)
        for command in ("extract", "stats"):
            err = io.StringIO()
            status = main([command, "--input", str(path)], io.StringIO(), err)
            assert status == 1
            assert err.getvalue().strip()
    assert issubclass(MalformedTree, PTBError)
