# Read a bracketed parse and pull triples out of it.
from treetriples import ExtractionSession, data_path, extract, read_ptb
from treetriples.extractor import predicate_verb_phrase

with open(data_path("example_sentence.ptb")) as fh:
    (tree,) = read_ptb(fh)

print(" ".join(tree.tokens))
for t in extract(tree):
    print(t.as_tuple())

# without the verb filter, PP-seeded fragments show up too
print(len(extract(tree, require_verb=False)), "triples without the filter")

# ask one VP for its object repeatedly: it widens until the VP is used up
vp = tree.root.children[0].children[0].children[1]
session = ExtractionSession(tree)
while (answer := predicate_verb_phrase(session, vp)) is not None:
    print("  ", answer)
