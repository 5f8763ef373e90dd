"""A small context-free grammar, a CKY parser, and an exhaustive oracle.

The grammar ships with a demo lexicon so toy sentences such as "the dog saw
the man in the park" can be parsed end to end. ``cky_parse`` returns every
parse (ambiguity is preserved); ``enumerate_derivations`` finds the same set
by brute-force top-down expansion and exists to check the chart parser.
"""

from __future__ import annotations

import functools
import io
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO, Union

from .tree_model import Nested, ParseTree, build_tree, write_ptb


class GrammarError(ValueError):
    pass


class UnknownWord(ValueError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"word not in lexicon: {token!r}")


class EmptyInput(ValueError):
    pass


class BoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(self.rhs)}"


@dataclass(frozen=True)
class Grammar:
    nonterminals: frozenset[str]
    lexicon: Mapping[str, frozenset[str]]
    rules: tuple[Rule, ...]
    start: str

    def __post_init__(self):
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")
        symbols = self.nonterminals | self.preterminals
        for rule in self.rules:
            if rule.lhs not in self.nonterminals:
                raise GrammarError(f"{rule}: left-hand side is not a nonterminal")
            if not rule.rhs:
                raise GrammarError(f"{rule.lhs} -> : empty productions are not supported")
            for sym in rule.rhs:
                if sym not in symbols:
                    raise GrammarError(f"{rule}: unknown symbol {sym!r}")
        if len(set(self.rules)) != len(self.rules):
            raise GrammarError("duplicate rules")
        self._check_unary_cycles()

    @property
    def preterminals(self) -> frozenset[str]:
        return frozenset().union(*self.lexicon.values()) if self.lexicon else frozenset()

    def _check_unary_cycles(self) -> None:
        edges = defaultdict(set)
        for rule in self.rules:
            if len(rule.rhs) == 1:
                edges[rule.lhs].add(rule.rhs[0])
        state: dict[str, int] = {}

        def visit(sym: str) -> None:
            state[sym] = 1
            for nxt in edges[sym]:
                if state.get(nxt) == 1:
                    raise GrammarError(f"unary cycle through {sym!r} and {nxt!r}")
                if nxt not in state:
                    visit(nxt)
            state[sym] = 2

        for sym in list(edges):
            if sym not in state:
                visit(sym)

    @classmethod
    def create(cls, rules: Iterable[Union[Rule, tuple[str, Sequence[str]]]],
               lexicon: Mapping[str, Iterable[str]], start: str,
               nonterminals: Iterable[str] | None = None) -> "Grammar":
        """Convenience constructor; nonterminals default to lhs symbols plus
        preterminals."""
        rule_list = tuple(r if isinstance(r, Rule) else Rule(r[0], tuple(r[1]))
                          for r in rules)
        lex = {word: frozenset(tags) for word, tags in lexicon.items()}
        if nonterminals is None:
            nts = {r.lhs for r in rule_list} | {start}
            nts.update(*lex.values())
        else:
            nts = set(nonterminals)
        return cls(frozenset(nts), lex, rule_list, start)


TOY_RULES = (
    ("S", ("NP", "VP")),
    ("VP", ("VB",)),
    ("VP", ("VB", "NP")),
    ("VP", ("VP", "PP")),
    ("NP", ("DT", "NN")),
    ("NP", ("NP", "PP")),
    ("PP", ("IN", "NP")),
)

# The rules come without words; this lexicon is our own choice.
DEMO_LEXICON = {
    "the": {"DT"}, "a": {"DT"},
    "dog": {"NN"}, "man": {"NN"}, "park": {"NN"}, "telescope": {"NN"},
    "saw": {"VB"}, "walked": {"VB"},
    "in": {"IN"}, "with": {"IN"},
}


def paper_grammar() -> Grammar:
    """The seven-rule toy English grammar with start symbol S."""
    return Grammar.create(
        TOY_RULES, DEMO_LEXICON, "S",
        nonterminals={"S", "NP", "VP", "PP", "DT", "VB", "NN", "IN"},
    )


# -- grammar files ------------------------------------------------------------

def load_grammar(source: Union[str, TextIO]) -> Grammar:
    """Read ``LHS -> RHS ...`` rule lines and ``word : TAG ...`` lexicon lines.

    ``#`` starts a comment. The start symbol is the left-hand side of the
    first rule.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    rules: list[Rule] = []
    lexicon: dict[str, set[str]] = defaultdict(set)
    for lineno, line in enumerate(stream, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, _, rhs = line.partition("->")
            lhs, rhs_syms = lhs.strip(), rhs.split()
            if not lhs or len(lhs.split()) != 1:
                raise GrammarError(f"line {lineno}: bad left-hand side")
            rules.append(Rule(lhs, tuple(rhs_syms)))
        elif ":" in line:
            word, _, tags = line.partition(":")
            word, tag_list = word.strip(), tags.split()
            if not word or not tag_list:
                raise GrammarError(f"line {lineno}: bad lexicon entry")
            lexicon[word].update(tag_list)
        else:
            raise GrammarError(f"line {lineno}: expected 'A -> B C' or 'word : TAG'")
    if not rules:
        raise GrammarError("grammar file has no rules")
    return Grammar.create(rules, lexicon, rules[0].lhs)


def dump_grammar(grammar: Grammar) -> str:
    lines = [str(rule) for rule in grammar.rules]
    # start symbol is read back from the first rule
    lines.sort(key=lambda line: not line.startswith(grammar.start + " "))
    for word in sorted(grammar.lexicon):
        lines.append(f"{word} : {' '.join(sorted(grammar.lexicon[word]))}")
    return "\n".join(lines) + "\n"


# -- CKY ----------------------------------------------------------------------

def _binarize(grammar: Grammar):
    """Split rules into unary and binary tables.

    Rules longer than two symbols are chained right-branching through
    per-rule intermediate symbols ``@<rule>:<k>``, which contain ``@`` and so
    can never collide with grammar symbols.
    """
    unary: dict[str, list[str]] = defaultdict(list)      # child -> parents
    binary: dict[tuple[str, str], list[str]] = defaultdict(list)
    for idx, rule in enumerate(grammar.rules):
        rhs = rule.rhs
        if len(rhs) == 1:
            unary[rhs[0]].append(rule.lhs)
            continue
        lhs = rule.lhs
        for k in range(len(rhs) - 2):
            inter = f"@{idx}:{k}"
            binary[(rhs[k], inter)].append(lhs)
            lhs = inter
        binary[(rhs[-2], rhs[-1])].append(lhs)
    return unary, binary


def _unary_closure(cell: dict, unary: Mapping[str, list[str]]) -> None:
    agenda = list(cell)
    while agenda:
        child = agenda.pop()
        for parent in unary.get(child, ()):
            entry = ("unary", child)
            if parent not in cell:
                cell[parent] = [entry]
                agenda.append(parent)
            elif entry not in cell[parent]:
                cell[parent].append(entry)
                # acyclic unaries: re-propagating is bounded
                agenda.append(parent)


def _check_tokens(grammar: Grammar, tokens: Sequence[str]) -> None:
    if not tokens:
        raise EmptyInput("cannot parse an empty sentence")
    for tok in tokens:
        if tok not in grammar.lexicon:
            raise UnknownWord(tok)


def cky_parse(grammar: Grammar, tokens: Sequence[str]) -> list[ParseTree]:
    """All parses of ``tokens`` rooted at the start symbol.

    Trees are sorted by their bracketed form so the order is deterministic.
    """
    tokens = list(tokens)
    _check_tokens(grammar, tokens)
    n = len(tokens)
    unary, binary = _binarize(grammar)
    chart: dict[tuple[int, int], dict[str, list]] = {}
    for i, tok in enumerate(tokens):
        cell = {tag: [("word", tok)] for tag in grammar.lexicon[tok]}
        _unary_closure(cell, unary)
        chart[i, i + 1] = cell
    for width in range(2, n + 1):
        for i in range(n - width + 1):
            j = i + width
            cell: dict[str, list] = {}
            for k in range(i + 1, j):
                left, right = chart[i, k], chart[k, j]
                if not left or not right:
                    continue
                for b in left:
                    for c in right:
                        for a in binary.get((b, c), ()):
                            cell.setdefault(a, []).append(("binary", k, b, c))
            _unary_closure(cell, unary)
            chart[i, j] = cell

    @functools.lru_cache(maxsize=None)
    def expand(i: int, j: int, sym: str) -> tuple:
        # for intermediate symbols: tuple of child sequences; else tuple of nodes
        results = []
        for back in chart[i, j].get(sym, ()):
            if back[0] == "word":
                results.append((sym, back[1]))
            elif back[0] == "unary":
                for child in expand(i, j, back[1]):
                    results.append((sym, (child,)))
            else:
                _, k, b, c = back
                lefts = [(x,) for x in expand(i, k, b)]
                if c.startswith("@"):
                    rights = list(expand(k, j, c))
                else:
                    rights = [(x,) for x in expand(k, j, c)]
                for le in lefts:
                    for ri in rights:
                        seq = le + ri
                        results.append(seq if sym.startswith("@") else (sym, seq))
        return tuple(results)

    nested = set(expand(0, n, grammar.start))
    trees = [build_tree(_as_nested(t)) for t in nested]
    trees.sort(key=write_ptb)
    return trees


def _as_nested(item) -> Nested:
    label, body = item
    if isinstance(body, str):
        return (label, body)
    return (label, [_as_nested(c) for c in body])


# -- brute-force oracle ---------------------------------------------------------

def safe_depth_bound(grammar: Grammar, n_tokens: int) -> int:
    """A height no derivation of ``n_tokens`` words can exceed.

    Without empty rules a tree has at most ``n - 1`` branching nodes on any
    path, and acyclic unary chains are shorter than the number of symbols.
    """
    chain = len(grammar.nonterminals | grammar.preterminals)
    return n_tokens * (chain + 1) + 1


def enumerate_derivations(grammar: Grammar, tokens: Sequence[str],
                          depth_bound: int | None = None) -> list[ParseTree]:
    """Every parse tree of ``tokens``, by exhaustive top-down expansion.

    Height counts a preterminal as 1. If any derivation is taller than
    ``depth_bound``, ``BoundExceeded`` is raised instead of silently dropping
    it; ``depth_bound=None`` means ``safe_depth_bound``, which no derivation
    can exceed. Exponential; meant for sentences of ten words or fewer.
    """
    tokens = tuple(tokens)
    _check_tokens(grammar, tokens)
    if depth_bound is None:
        depth_bound = safe_depth_bound(grammar, len(tokens))
    by_lhs: dict[str, list[Rule]] = defaultdict(list)
    for rule in grammar.rules:
        by_lhs[rule.lhs].append(rule)

    def splits(i: int, j: int, parts: int):
        if parts == 1:
            yield ((i, j),)
            return
        for k in range(i + 1, j - parts + 2):
            for rest in splits(k, j, parts - 1):
                yield ((i, k),) + rest

    @functools.lru_cache(maxsize=None)
    def derive(sym: str, i: int, j: int) -> tuple:
        # (tree, height) pairs; terminates because the grammar has no empty
        # rules and no unary cycles
        found = []
        if j - i == 1 and sym in grammar.lexicon[tokens[i]]:
            found.append(((sym, tokens[i]), 1))
        for rule in by_lhs.get(sym, ()):
            if len(rule.rhs) > j - i:
                continue
            for pieces in splits(i, j, len(rule.rhs)):
                options = []
                for child, (a, b) in zip(rule.rhs, pieces):
                    sub = derive(child, a, b)
                    if not sub:
                        break
                    options.append(sub)
                if len(options) < len(rule.rhs):
                    continue
                for combo in _product(options):
                    children = tuple(tree for tree, _ in combo)
                    found.append(((sym, children), 1 + max(h for _, h in combo)))
        return tuple(found)

    found = derive(grammar.start, 0, len(tokens))
    tallest = max((h for _, h in found), default=0)
    if tallest > depth_bound:
        raise BoundExceeded(f"a derivation of height {tallest} exceeds depth bound {depth_bound}")
    trees = [build_tree(_as_nested(t)) for t in {tree for tree, _ in found}]
    trees.sort(key=write_ptb)
    return trees


def _product(options):
    if not options:
        yield ()
        return
    for head in options[0]:
        for tail in _product(options[1:]):
            yield (head,) + tail
