# The toy grammar attaches "in the park" to either the verb or the object.
from treetriples import cky_parse, enumerate_derivations, paper_grammar, write_ptb
from treetriples.cfg import dump_grammar

g = paper_grammar()
print(dump_grammar(g))

words = "the dog saw the man in the park".split()
parses = cky_parse(g, words)
for p in parses:
    print(write_ptb(p))

# the brute-force enumerator agrees
assert [write_ptb(p) for p in parses] == [write_ptb(p) for p in enumerate_derivations(g, words)]
print(len(parses), "parses")
