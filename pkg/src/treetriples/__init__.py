"""Subject-predicate-object triples from constituency parse trees."""

from .analytics import (EvalReport, GoldTriple, ProductionCount, compare_runs, evaluate,
                        production_stats, read_gold)
from .cfg import Grammar, Rule, cky_parse, enumerate_derivations, load_grammar, paper_grammar
from .extractor import ExtractionSession, Triple, extract
from .tree_model import (Kind, ParseNode, ParseTree, Tag, build_tree, covered_text, np_index,
                         preorder, read_ptb, write_ptb)

__all__ = [
    "EvalReport", "GoldTriple", "ProductionCount", "compare_runs", "evaluate",
    "production_stats", "read_gold",
    "Grammar", "Rule", "cky_parse", "enumerate_derivations", "load_grammar", "paper_grammar",
    "ExtractionSession", "Triple", "extract",
    "Kind", "ParseNode", "ParseTree", "Tag", "build_tree", "covered_text", "np_index",
    "preorder", "read_ptb", "write_ptb",
]


def data_path(name: str) -> str:
    """Absolute path of a bundled data file (``sample_corpus.ptb``, ...)."""
    from importlib.resources import files
    return str(files(__name__) / "data" / name)
