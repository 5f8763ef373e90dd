# Which productions dominate NP, VP and PP in the bundled sample corpus?
from treetriples import data_path, production_stats, read_ptb
from treetriples.analytics import group_rows

with open(data_path("sample_corpus.ptb")) as fh:
    trees = read_ptb(fh)
print(len(trees), "trees")

for kind, rows in group_rows(production_stats(trees)).items():
    print(kind.value)
    for row in rows[:4]:
        print(f"  {row}  {row.share:.0%}")
