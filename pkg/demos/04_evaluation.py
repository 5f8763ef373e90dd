# Score extractions against a small labeled gold file.
import io

from treetriples import evaluate, extract, read_gold, read_ptb

ptb = """
(S (NP (DT the) (NN dog)) (VP (VBD chased) (NP (DT the) (NN cat))))
(S (NP (NNP John)) (VP (VBD saw) (NP (NNP Mary))))
"""
gold = io.StringIO(
    "1\tthe dog\tchased\tthe cat\t1\n"
    "2\tJohn\tsaw\tMary\t1\n"
    "2\tMary\twas seen by\tJohn\t1\n")

triples = [t for tree in read_ptb(ptb) for t in extract(tree)]
report = evaluate(triples, read_gold(gold))
print(report.render())
