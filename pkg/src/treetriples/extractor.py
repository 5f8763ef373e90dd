"""Subject-predicate-object extraction by depth-first search over a parse tree.

The search pairs every NP with each later VP, PP or SBAR sibling. For one
pair it asks the sibling for a predicate and object over and over; each
answer marks at least one more constituent as explored, so the object grows
outward ("the polls", then "the polls after accusations", ...) until the
sibling has nothing left and reports failure.

Explored state lives in an :class:`ExtractionSession` and is reset for every
(subject, predicate sibling) pair, so objects widen independently per pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .tree_model import Kind, ParseNode, ParseTree, covered_text, node_count, nodes_text

PREDICATE_SEEDS = frozenset({Kind.VP, Kind.PP, Kind.SBAR})
PREDICATE_WORDS = frozenset({Kind.VB, Kind.JJ, Kind.RB, Kind.MD, Kind.TO,
                             Kind.ADVP, Kind.DT, Kind.NN, Kind.IN})
OBJECT_SLOTS = frozenset({Kind.NP, Kind.PP, Kind.ADJP, Kind.S, Kind.SBAR})
VERB_KINDS = frozenset({Kind.VB, Kind.MD})


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str
    subject_node: ParseNode = field(compare=False, repr=False)
    object_terminal_node: ParseNode = field(compare=False, repr=False)
    predicate_span: tuple[ParseNode, ...] = field(compare=False, repr=False)
    object_nodes: tuple[ParseNode, ...] = field(compare=False, repr=False, default=())
    seed_node: Optional[ParseNode] = field(compare=False, repr=False, default=None)
    sentence_id: str = ""

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)

    @property
    def object_span(self) -> tuple[int, int]:
        nodes = self.object_nodes or (self.object_terminal_node,)
        return (min(n.start for n in nodes), max(n.end for n in nodes))


class Clause(NamedTuple):
    """A successful predicate search: predicate words plus object pieces."""

    predicate_nodes: tuple[ParseNode, ...]
    object_nodes: tuple[ParseNode, ...]
    object_terminal: ParseNode


class _Object(NamedTuple):
    nodes: tuple[ParseNode, ...]
    terminal: ParseNode


@dataclass
class ExtractionSession:
    tree: ParseTree
    require_verb: bool = True
    max_extractions: Optional[int] = None
    explored: set[int] = field(default_factory=set)
    triples: list[Triple] = field(default_factory=list)
    # iterations of the widening loop, one entry per (subject, sibling) pair
    loop_iterations: list[int] = field(default_factory=list)
    _seen: set[tuple[str, str, str]] = field(default_factory=set, repr=False)

    def __post_init__(self):
        self.node_total = node_count(self.tree)

    def is_explored(self, node: ParseNode) -> bool:
        return id(node) in self.explored

    def mark(self, node: ParseNode) -> None:
        self.explored.add(id(node))

    @property
    def full(self) -> bool:
        return self.max_extractions is not None and len(self.triples) >= self.max_extractions

    def text(self, nodes) -> str:
        return nodes_text(nodes, self.tree)

    def emit(self, subject: ParseNode, seed: ParseNode, clause: Clause) -> Optional[Triple]:
        if self.full:
            return None
        if (self.require_verb and seed.kind is not Kind.VP
                and not any(n.kind in VERB_KINDS for n in clause.predicate_nodes)):
            return None
        triple = Triple(
            subject=covered_text(subject, self.tree),
            predicate=self.text(clause.predicate_nodes),
            object=self.text(clause.object_nodes),
            subject_node=subject,
            object_terminal_node=clause.object_terminal,
            predicate_span=clause.predicate_nodes,
            object_nodes=clause.object_nodes,
            seed_node=seed,
            sentence_id=self.tree.source_id,
        )
        if not triple.predicate or not triple.object:
            return None
        key = triple.as_tuple()
        if key in self._seen:
            return None
        self._seen.add(key)
        self.triples.append(triple)
        return triple


def extract(tree: ParseTree, require_verb: bool = True,
            max_extractions: Optional[int] = None) -> list[Triple]:
    """Triples for one sentence, in discovery order, exact duplicates dropped.

    With ``require_verb`` (the default) triples seeded by a PP or SBAR whose
    predicate has no verb or modal are discarded; these are mostly
    noun-preposition-noun fragments like ("the polls", "after", "accusations").
    """
    session = ExtractionSession(tree, require_verb=require_verb,
                                max_extractions=max_extractions)
    subject_noun_phrase(session, tree.root)
    return session.triples


def subject_noun_phrase(session: ExtractionSession, node: ParseNode) -> None:
    kids = node.children
    for i, kid in enumerate(kids):
        if session.full:
            return
        if kid.kind is Kind.NP:
            for sibling in kids[i + 1:]:
                # CC, WHNP and everything else not a seed is passed over
                if sibling.kind in PREDICATE_SEEDS:
                    _widen(session, kid, sibling)
        subject_noun_phrase(session, kid)


def _widen(session: ExtractionSession, subject: ParseNode, sibling: ParseNode) -> None:
    session.explored = set()
    limit = session.node_total
    iterations = 0
    while not session.is_explored(sibling):
        iterations += 1
        if iterations > limit:
            raise RuntimeError("widening loop failed to make progress")
        clause = _predicate(session, sibling, ())
        if clause is None:
            break
        session.emit(subject, sibling, clause)
    session.loop_iterations.append(iterations)


def predicate_verb_phrase(session: ExtractionSession, node: ParseNode) -> Optional[tuple[str, str]]:
    """One round of predicate search below ``node``.

    Returns ``(predicate, object)`` or None once ``node`` is exhausted.
    """
    clause = _predicate(session, node, ())
    if clause is None:
        return None
    return session.text(clause.predicate_nodes), session.text(clause.object_nodes)


def _predicate(session: ExtractionSession, node: ParseNode,
               prefix: tuple[ParseNode, ...]) -> Optional[Clause]:
    kids = node.children
    predicate = prefix
    for i, kid in enumerate(kids):
        if kid.kind in (Kind.VP, Kind.S):
            if not session.is_explored(kid):
                clause = _predicate(session, kid, predicate)
                if clause is not None:
                    return clause
        elif kid.kind in PREDICATE_WORDS:
            predicate = predicate + (kid,)
            slots = [s for s in kids[i + 1:] if s.kind in OBJECT_SLOTS]
            for slot in slots:
                if session.is_explored(slot):
                    continue
                if slot.kind is Kind.PP:
                    obj = _preposition(session, slot)
                else:
                    obj = _noun(session, slot)
                if obj is not None:
                    return Clause(predicate, obj.nodes, obj.terminal)
            if slots:
                # the object belongs to this predicate; later words are not predicate
                break
    session.mark(node)
    return None


def object_noun_phrase(session: ExtractionSession, node: ParseNode) -> Optional[str]:
    obj = _noun(session, node)
    return None if obj is None else session.text(obj.nodes)


def object_preposition_phrase(session: ExtractionSession, node: ParseNode) -> Optional[str]:
    obj = _preposition(session, node)
    return None if obj is None else session.text(obj.nodes)


def _noun(session: ExtractionSession, node: ParseNode) -> Optional[_Object]:
    if session.is_explored(node):
        return None
    found = False
    parts: tuple[ParseNode, ...] = ()
    for kid in node.children:
        if kid.kind in (Kind.NP, Kind.S, Kind.PP):
            found = True
            if not session.is_explored(kid):
                inner = _noun(session, kid) if kid.kind is not Kind.PP else _preposition(session, kid)
                if inner is not None:
                    return _Object(parts + inner.nodes, inner.terminal)
            # explored: the constituent is already part of the frontier
            parts = parts + (kid,)
        elif kid.kind in (Kind.IN, Kind.TO):
            parts = parts + (kid,)
    session.mark(node)
    if not found and node.kind is Kind.NP:
        return _Object((node,), node)
    return None


def _preposition(session: ExtractionSession, node: ParseNode) -> Optional[_Object]:
    if session.is_explored(node):
        return None
    parts: tuple[ParseNode, ...] = ()
    for kid in node.children:
        if kid.kind is Kind.NP and not session.is_explored(kid):
            inner = _noun(session, kid)
            if inner is not None:
                return _Object(parts + inner.nodes, inner.terminal)
        elif kid.kind is Kind.PP and not session.is_explored(kid):
            inner = _preposition(session, kid)
            if inner is not None:
                return _Object(parts + inner.nodes, inner.terminal)
        if kid.kind in (Kind.NP, Kind.PP):
            # explored (or just exhausted): keep the object text contiguous
            parts = parts + (kid,)
        elif kid.kind in (Kind.IN, Kind.TO, Kind.JJ, Kind.ADVP):
            parts = parts + (kid,)
    session.mark(node)
    return None
