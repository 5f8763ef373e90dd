"""Constituency trees: tags, immutable nodes, Penn Treebank I/O and traversal.

Trees are read from the bracketed treebank format::

    (TOP (S (NP (DT the) (NN dog)) (VP (VBD barked))))

Every node carries a half-open token span ``(start, end)`` into the tree's
token list, so the surface text of any constituent can be recovered without
walking its leaves.
"""

from __future__ import annotations

import enum
import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO, Union


class Kind(enum.Enum):
    TOP = "TOP"
    S = "S"
    SBAR = "SBAR"
    NP = "NP"
    VP = "VP"
    PP = "PP"
    ADJP = "ADJP"
    ADVP = "ADVP"
    WHNP = "WHNP"
    DT = "DT"
    NN = "NN"
    VB = "VB"
    IN = "IN"
    TO = "TO"
    JJ = "JJ"
    RB = "RB"
    MD = "MD"
    CC = "CC"
    OTHER = "OTHER"


_FAMILIES = {
    "NNS": Kind.NN, "NNP": Kind.NN, "NNPS": Kind.NN,
    "VBD": Kind.VB, "VBG": Kind.VB, "VBN": Kind.VB, "VBP": Kind.VB, "VBZ": Kind.VB,
    "JJR": Kind.JJ, "JJS": Kind.JJ,
    "RBR": Kind.RB, "RBS": Kind.RB,
    "ROOT": Kind.TOP, "": Kind.TOP,
}

_FUNCTION_TAG = re.compile(r"[-=]")

TRACE_LABEL = "-NONE-"


def base_label(raw_label: str) -> str:
    """Strip function tags and indices: ``NP-SBJ-1`` -> ``NP``.

    Labels starting with ``-`` (``-NONE-``, ``-LRB-``) are returned unchanged.
    """
    if raw_label.startswith("-"):
        return raw_label
    return _FUNCTION_TAG.split(raw_label, 1)[0]


def classify(raw_label: str) -> Kind:
    label = base_label(raw_label)
    if label in _FAMILIES:
        return _FAMILIES[label]
    try:
        return Kind(label)
    except ValueError:
        return Kind.OTHER


@dataclass(frozen=True)
class Tag:
    kind: Kind
    raw_label: str

    @classmethod
    def from_label(cls, raw_label: str) -> "Tag":
        return cls(classify(raw_label), raw_label)

    def __str__(self) -> str:
        return self.raw_label


@dataclass(frozen=True)
class ParseNode:
    """A constituent. Preterminals have a ``token`` and no children."""

    tag: Tag
    children: tuple["ParseNode", ...]
    token: str | None
    span: tuple[int, int]

    @property
    def kind(self) -> Kind:
        return self.tag.kind

    @property
    def is_preterminal(self) -> bool:
        return self.token is not None

    @property
    def start(self) -> int:
        return self.span[0]

    @property
    def end(self) -> int:
        return self.span[1]

    @property
    def width(self) -> int:
        return self.span[1] - self.span[0]

    def __repr__(self) -> str:
        if self.token is not None:
            return f"ParseNode({self.tag.raw_label} {self.token!r} {self.span})"
        return f"ParseNode({self.tag.raw_label} {self.span} <{len(self.children)} children>)"


@dataclass(frozen=True)
class ParseTree:
    root: ParseNode
    tokens: tuple[str, ...]
    source_id: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return write_ptb(self)


class PTBError(ValueError):
    """Malformed bracketed input. ``position`` is a ``(line, column)`` pair."""

    def __init__(self, message: str, position: tuple[int, int] | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at line {position[0]}, column {position[1]}"
        super().__init__(message)


class UnbalancedBrackets(PTBError):
    pass


class EmptyTree(PTBError):
    pass


class LabelWithoutToken(PTBError):
    pass


class MalformedTree(PTBError):
    pass


# -- building -------------------------------------------------------------

# Nested structure accepted by ``build_tree``: ``(label, "word")`` for a
# preterminal or ``(label, [child, ...])`` for a phrase.
Nested = tuple[str, Union[str, Sequence["Nested"]]]


def build_tree(nested: Nested, source_id: str = "") -> ParseTree:
    """Build a ParseTree from a nested ``(label, children_or_word)`` tuple."""
    tokens: list[str] = []

    def build(item: Nested) -> ParseNode:
        label, body = item
        tag = Tag.from_label(label)
        if isinstance(body, str):
            tokens.append(body)
            return ParseNode(tag, (), body, (len(tokens) - 1, len(tokens)))
        if not body:
            raise EmptyTree(f"phrase {label!r} has no children")
        start = len(tokens)
        children = tuple(build(child) for child in body)
        return ParseNode(tag, children, None, (start, len(tokens)))

    root = build(nested)
    return ParseTree(root, tuple(tokens), source_id)


def to_nested(node: ParseNode) -> Nested:
    if node.token is not None:
        return (node.tag.raw_label, node.token)
    return (node.tag.raw_label, [to_nested(c) for c in node.children])


# -- reading ----------------------------------------------------------------

_ESCAPES = {
    "-LRB-": "(", "-RRB-": ")",
    "-LCB-": "{", "-RCB-": "}",
    "-LSB-": "[", "-RSB-": "]",
}
_UNESCAPES = {"(": "-LRB-", ")": "-RRB-", "{": "-LCB-", "}": "-RCB-"}

_LEXEME = re.compile(r"\(|\)|[^()\s]+")


def _lex(stream: TextIO) -> Iterator[tuple[str, tuple[int, int]]]:
    for lineno, line in enumerate(stream, 1):
        for m in _LEXEME.finditer(line):
            yield m.group(), (lineno, m.start() + 1)


class _Raw:
    """Mutable node used while reading; frozen into a ParseNode afterwards."""

    __slots__ = ("label", "children", "word", "pos")

    def __init__(self, label, pos):
        self.label = label
        self.children = []
        self.word = None
        self.pos = pos


def _strip_traces(raw: _Raw) -> _Raw | None:
    if base_label(raw.label) == TRACE_LABEL:
        return None
    if raw.word is not None:
        return raw
    kept = [c for c in (_strip_traces(c) for c in raw.children) if c is not None]
    if not kept:
        return None
    raw.children = kept
    return raw


def _to_nested(raw: _Raw) -> Nested:
    if raw.word is not None:
        return (raw.label, _ESCAPES.get(raw.word, raw.word))
    return (raw.label, [_to_nested(c) for c in raw.children])


def iter_ptb(source: Union[str, TextIO], start_index: int = 1,
             source_prefix: str = "") -> Iterator[ParseTree]:
    """Lazily read trees from a string or text stream.

    Trees get ``source_id`` values ``f"{source_prefix}{n}"`` counting from
    ``start_index``. Only one tree is held in memory at a time.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    stack: list[_Raw] = []
    expect_label = False
    index = start_index
    for lexeme, pos in _lex(stream):
        if lexeme == "(":
            if expect_label:
                # "( (S ...))": a wrapper bracket with no label
                node = stack[-1]
                node.label = ""
            node = _Raw(None, pos)
            if stack:
                parent = stack[-1]
                if parent.word is not None:
                    raise MalformedTree(
                        f"phrase {parent.label!r} mixes a bare word with subtrees", pos)
                parent.children.append(node)
            stack.append(node)
            expect_label = True
        elif lexeme == ")":
            if not stack:
                raise UnbalancedBrackets("unexpected ')'", pos)
            node = stack.pop()
            if node.label is None:
                raise EmptyTree("empty bracket pair", node.pos)
            if node.word is None and not node.children:
                raise LabelWithoutToken(
                    f"preterminal {node.label!r} has no word", node.pos)
            expect_label = False
            if not stack:
                pruned = _strip_traces(node)
                if pruned is None:
                    raise EmptyTree("tree contains only empty elements", node.pos)
                yield build_tree(_to_nested(pruned), f"{source_prefix}{index}")
                index += 1
        else:
            if not stack:
                raise MalformedTree(f"text {lexeme!r} outside brackets", pos)
            node = stack[-1]
            if expect_label:
                node.label = lexeme
                expect_label = False
            elif node.children:
                raise MalformedTree(
                    f"phrase {node.label!r} mixes a bare word with subtrees", pos)
            elif node.word is not None:
                raise MalformedTree(
                    f"preterminal {node.label!r} has more than one word", pos)
            else:
                node.word = lexeme
    if stack:
        raise UnbalancedBrackets("unclosed '('", stack[0].pos)


def read_ptb(source: Union[str, TextIO], start_index: int = 1,
             source_prefix: str = "") -> list[ParseTree]:
    return list(iter_ptb(source, start_index, source_prefix))


# -- writing ----------------------------------------------------------------

def _escape(word: str) -> str:
    return _UNESCAPES.get(word, word)


def write_node(node: ParseNode) -> str:
    parts: list[str] = []

    def emit(n: ParseNode) -> None:
        parts.append("(" + n.tag.raw_label)
        if n.token is not None:
            parts.append(" " + _escape(n.token) + ")")
            return
        for child in n.children:
            parts.append(" ")
            emit(child)
        parts.append(")")

    emit(node)
    return "".join(parts)


def write_ptb(tree: ParseTree) -> str:
    """Single-line bracketed form of ``tree`` using raw labels."""
    return write_node(tree.root)


# -- text and traversal -----------------------------------------------------

_NO_SPACE_BEFORE = frozenset([",", ".", ";", ":", "!", "?", "'", "'s", "n't", "%"])
_NO_SPACE_AFTER = frozenset(["(", "[", "{"])


def detokenize(words: Iterable[str]) -> str:
    out: list[str] = []
    prev = None
    for word in words:
        if out and word.lower() not in _NO_SPACE_BEFORE and prev not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(word)
        prev = word
    return "".join(out)


def covered_text(node: ParseNode, tree: ParseTree) -> str:
    return detokenize(tree.tokens[node.start:node.end])


def nodes_text(nodes: Iterable[ParseNode], tree: ParseTree) -> str:
    """Detokenized text of several constituents, in the order given."""
    words: list[str] = []
    for node in nodes:
        words.extend(tree.tokens[node.start:node.end])
    return detokenize(words)


def preorder(tree: Union[ParseTree, ParseNode]) -> Iterator[ParseNode]:
    """Parent before children, children left to right."""
    root = tree.root if isinstance(tree, ParseTree) else tree
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def np_index(tree: ParseTree) -> list[ParseNode]:
    return [node for node in preorder(tree) if node.kind is Kind.NP]


def node_count(tree: Union[ParseTree, ParseNode]) -> int:
    return sum(1 for _ in preorder(tree))


def height(node: ParseNode) -> int:
    """Preterminals have height 1."""
    if not node.children:
        return 1
    return 1 + max(height(c) for c in node.children)
