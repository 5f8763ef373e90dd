"""Production statistics over a treebank and precision/recall scoring."""

from __future__ import annotations

import hashlib
import io
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO, Union

from .tree_model import Kind, ParseTree, preorder

REPORTED_GROUPS = (Kind.NP, Kind.VP, Kind.PP)


class EmptyCorpus(ValueError):
    pass


class UnknownSentenceId(KeyError):
    pass


class MismatchedGold(ValueError):
    pass


@dataclass(frozen=True)
class ProductionCount:
    lhs: Kind
    rhs: tuple[Kind, ...]
    count: int
    share: float

    def __str__(self) -> str:
        return f"{self.lhs.value} -> {' '.join(k.value for k in self.rhs)}"


def production_stats(trees: Iterable[ParseTree], all_groups: bool = False) -> list[ProductionCount]:
    """Count parent -> children productions by tag family.

    Shares are fractions of the lhs group, so NP rows sum to 1 among NP
    productions. Only NP, VP and PP groups are returned unless
    ``all_groups`` is set. Rows are ordered by group, then by descending
    share.
    """
    counts: Counter = Counter()
    seen = 0
    for tree in trees:
        seen += 1
        for node in preorder(tree):
            if node.children:
                counts[node.kind, tuple(c.kind for c in node.children)] += 1
    if not seen:
        raise EmptyCorpus("no trees to count")
    totals: Counter = Counter()
    for (lhs, _), n in counts.items():
        totals[lhs] += n
    if all_groups:
        order = list(REPORTED_GROUPS) + sorted(
            (k for k in totals if k not in REPORTED_GROUPS), key=lambda k: k.value)
    else:
        order = list(REPORTED_GROUPS)
    rank = {kind: i for i, kind in enumerate(order)}
    rows = [ProductionCount(lhs, rhs, n, n / totals[lhs])
            for (lhs, rhs), n in counts.items() if lhs in rank]
    rows.sort(key=lambda r: (rank[r.lhs], -r.count, [k.value for k in r.rhs]))
    return rows


def group_rows(rows: Sequence[ProductionCount]) -> dict[Kind, list[ProductionCount]]:
    grouped: dict[Kind, list[ProductionCount]] = {}
    for row in rows:
        grouped.setdefault(row.lhs, []).append(row)
    return grouped


# -- evaluation -----------------------------------------------------------------

@dataclass(frozen=True)
class GoldTriple:
    sentence_id: str
    subject: str
    predicate: str
    object: str
    correct: bool = True

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)


class GoldFormatError(ValueError):
    def __init__(self, errors: list[tuple[int, str]], message: str):
        self.errors = errors
        super().__init__(message)


def read_gold(source: Union[str, TextIO], max_bad_fraction: float = 0.1,
              diagnostics: Optional[list[tuple[int, str]]] = None) -> list[GoldTriple]:
    """Parse gold TSV rows ``sentence_id, subject, predicate, object, label``.

    Malformed rows are skipped and recorded as ``(line, message)`` in
    ``diagnostics``; if more than ``max_bad_fraction`` of the data rows are
    malformed, :class:`GoldFormatError` is raised.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    errors: list[tuple[int, str]] = []
    gold: list[GoldTriple] = []
    rows = 0
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        rows += 1
        cols = line.split("\t")
        if len(cols) != 5:
            errors.append((lineno, f"expected 5 tab-separated columns, found {len(cols)}"))
            continue
        sid, subj, pred, obj, label = (c.strip() for c in cols)
        if label not in ("0", "1"):
            errors.append((lineno, f"label must be 0 or 1, found {label!r}"))
            continue
        if not (sid and subj and pred and obj):
            errors.append((lineno, "empty field"))
            continue
        gold.append(GoldTriple(sid, subj, pred, obj, label == "1"))
    if diagnostics is not None:
        diagnostics.extend(errors)
    if rows and len(errors) > max_bad_fraction * rows:
        raise GoldFormatError(errors, f"{len(errors)} of {rows} gold rows are malformed")
    return gold


_SPACE = re.compile(r"\s+")


def normalize(text: str) -> str:
    return _SPACE.sub(" ", text.casefold()).strip()


def _contains(long: Sequence[str], short: Sequence[str]) -> bool:
    n = len(short)
    return any(tuple(long[i:i + n]) == tuple(short) for i in range(len(long) - n + 1))


def slots_match(a: Sequence[str], b: Sequence[str], policy: str = "containment") -> bool:
    """Compare two (subject, predicate, object) triples slot by slot."""
    for x, y in zip(a, b):
        x, y = normalize(x), normalize(y)
        if policy == "exact":
            if x != y:
                return False
        elif policy == "containment":
            xt, yt = x.split(), y.split()
            if not xt or not yt:
                return False
            if not (_contains(xt, yt) or _contains(yt, xt)):
                return False
        else:
            raise ValueError(f"unknown match policy {policy!r}")
    return True


def match_pairs(extracted: Sequence[Sequence[str]], gold: Sequence[Sequence[str]],
                policy: str = "containment") -> dict[int, int]:
    """One-to-one matching of extractions to gold entries, as ``{ext: gold}``.

    Extractions are taken in order and matched to the first compatible free
    gold entry; when none is free, an augmenting path reassigns earlier
    matches, which makes the result a maximum matching.
    """
    edges = [[g for g, gt in enumerate(gold) if slots_match(et, gt, policy)]
             for et in extracted]
    owner: dict[int, int] = {}

    def augment(e: int, visited: set[int]) -> bool:
        for g in edges[e]:
            if g in visited:
                continue
            visited.add(g)
            if g not in owner or augment(owner[g], visited):
                owner[g] = e
                return True
        return False

    for e in range(len(extracted)):
        free = next((g for g in edges[e] if g not in owner), None)
        if free is not None:
            owner[free] = e
        else:
            augment(e, set())
    return {e: g for g, e in owner.items()}


@dataclass
class SentenceScore:
    extracted: int = 0
    gold: int = 0
    matched: int = 0


@dataclass
class EvalReport:
    extracted_count: int
    gold_count: int
    matched_count: int
    # extractions paired with gold entries labeled incorrect
    incorrect_count: int = 0
    per_sentence: dict[str, SentenceScore] = field(default_factory=dict)
    gold_fingerprint: str = ""

    @property
    def precision(self) -> float:
        return self.matched_count / self.extracted_count if self.extracted_count else 0.0

    @property
    def recall(self) -> float:
        return self.matched_count / self.gold_count if self.gold_count else 0.0

    def render(self) -> str:
        return (f"extracted {self.extracted_count} gold {self.gold_count} "
                f"matched {self.matched_count}\n"
                f"precision {self.precision:.2f} recall {self.recall:.2f}")


def _fingerprint(gold: Sequence[GoldTriple]) -> str:
    h = hashlib.sha256()
    for g in sorted((g.sentence_id, *g.as_tuple(), str(g.correct)) for g in gold):
        h.update("\t".join(g).encode("utf-8") + b"\n")
    return h.hexdigest()


def evaluate(triples: Sequence, gold: Sequence[GoldTriple], policy: str = "containment",
             sentence_ids: Optional[Iterable[str]] = None) -> EvalReport:
    """Score extractions against labeled gold triples.

    ``triples`` are objects with ``sentence_id`` and ``as_tuple()``. Matching
    is per sentence and one-to-one. Only gold entries labeled correct count:
    precision is matches over extractions and recall is matched correct gold
    over all correct gold. If ``sentence_ids`` is given, any triple or gold
    row outside it raises :class:`UnknownSentenceId`.
    """
    if sentence_ids is not None:
        known = set(sentence_ids)
        for item in list(triples) + list(gold):
            if item.sentence_id not in known:
                raise UnknownSentenceId(item.sentence_id)
    ext_by: dict[str, list] = defaultdict(list)
    for t in triples:
        ext_by[t.sentence_id].append(t.as_tuple())
    good_by: dict[str, list] = defaultdict(list)
    bad_by: dict[str, list] = defaultdict(list)
    for g in gold:
        (good_by if g.correct else bad_by)[g.sentence_id].append(g.as_tuple())

    per: dict[str, SentenceScore] = {}
    matched = incorrect = 0
    for sid in sorted(set(ext_by) | set(good_by) | set(bad_by)):
        ext = ext_by.get(sid, [])
        pairs = match_pairs(ext, good_by.get(sid, []), policy)
        leftover = [t for i, t in enumerate(ext) if i not in pairs]
        incorrect += len(match_pairs(leftover, bad_by.get(sid, []), policy))
        per[sid] = SentenceScore(len(ext), len(good_by.get(sid, [])), len(pairs))
        matched += len(pairs)
    return EvalReport(
        extracted_count=len(triples),
        gold_count=sum(len(v) for v in good_by.values()),
        matched_count=matched,
        incorrect_count=incorrect,
        per_sentence=per,
        gold_fingerprint=_fingerprint(gold),
    )


@dataclass(frozen=True)
class RunComparison:
    """``a`` relative to ``b``. Ratios use ``inf`` for x/0 and 1.0 for 0/0."""

    matched_ratio: float
    extracted_ratio: float
    precision_delta: float
    recall_delta: float

    def render(self) -> str:
        def fmt(x: float) -> str:
            return "undefined" if math.isinf(x) else f"{x:.2f}"
        return (f"correct-extraction ratio {fmt(self.matched_ratio)}\n"
                f"extraction ratio {fmt(self.extracted_ratio)}\n"
                f"precision delta {self.precision_delta:+.2f}\n"
                f"recall delta {self.recall_delta:+.2f}")


def _ratio(a: int, b: int) -> float:
    if b == 0:
        return 1.0 if a == 0 else math.inf
    return a / b


def compare_runs(report_a: EvalReport, report_b: EvalReport) -> RunComparison:
    if (report_a.gold_count != report_b.gold_count
            or report_a.gold_fingerprint != report_b.gold_fingerprint):
        raise MismatchedGold("reports were scored against different gold sets")
    return RunComparison(
        matched_ratio=_ratio(report_a.matched_count, report_b.matched_count),
        extracted_ratio=_ratio(report_a.extracted_count, report_b.extracted_count),
        precision_delta=report_a.precision - report_b.precision,
        recall_delta=report_a.recall - report_b.recall,
    )
