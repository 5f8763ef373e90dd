"""Batch extraction, evaluation and statistics over files, and the CLI."""

from __future__ import annotations

import argparse
import itertools
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, TextIO

from . import analytics, cfg
from .extractor import Triple, extract
from .tree_model import ParseTree, PTBError, iter_ptb, write_ptb

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    inputs: Sequence[str]
    input_kind: str = "ptb"            # "ptb" or "raw"
    output_format: str = "tsv"         # "tsv" or "jsonl"
    grammar_path: Optional[str] = None
    policy: str = "containment"
    require_verb: bool = True
    max_extractions: Optional[int] = None
    all_groups: bool = False
    workers: int = 1

    def validate(self) -> None:
        if not self.inputs:
            raise ConfigError("no input files given")
        if self.input_kind not in ("ptb", "raw"):
            raise ConfigError(f"unknown input kind {self.input_kind!r}")
        if self.output_format not in ("tsv", "jsonl"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.policy not in ("exact", "containment"):
            raise ConfigError(f"unknown match policy {self.policy!r}")
        if self.max_extractions is not None and self.max_extractions < 1:
            raise ConfigError("--max-extractions must be at least 1")
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1")
        for path in self.inputs:
            try:
                with open(path, encoding="utf-8"):
                    pass
            except OSError as exc:
                raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


# -- serialization ------------------------------------------------------------------

_UNSAFE = re.compile(r"[\t\r\n]")


def _clean(text: str) -> str:
    return _UNSAFE.sub(" ", text)


def triple_to_tsv(triple: Triple) -> str:
    fields = (triple.sentence_id, triple.subject, triple.predicate, triple.object)
    return "\t".join(_clean(f) for f in fields)


def triple_to_record(triple: Triple) -> dict:
    return {
        "sentence_id": triple.sentence_id,
        "subject": triple.subject,
        "predicate": triple.predicate,
        "object": triple.object,
        "subject_span": list(triple.subject_node.span),
        "predicate_spans": [list(n.span) for n in triple.predicate_span],
        "object_span": list(triple.object_span),
    }


def triple_to_jsonl(triple: Triple) -> str:
    return json.dumps(triple_to_record(triple), ensure_ascii=False, sort_keys=True)


def read_jsonl(stream: TextIO) -> list[dict]:
    return [json.loads(line) for line in stream if line.strip()]


@dataclass(frozen=True)
class TripleRecord:
    """A triple read back from TSV output (no tree attached)."""

    sentence_id: str
    subject: str
    predicate: str
    object: str

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)


def read_triples_tsv(stream: TextIO) -> list[TripleRecord]:
    out = []
    for line in stream:
        line = line.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        sid, subj, pred, obj = line.split("\t")
        out.append(TripleRecord(sid, subj, pred, obj))
    return out


# -- input ------------------------------------------------------------------

@dataclass
class _Failure:
    sentence_id: str
    message: str


def iter_trees(config: RunConfig, err: TextIO) -> Iterator[ParseTree | _Failure]:
    """Trees from every input in order, numbered 1, 2, ... across files."""
    if config.input_kind == "raw":
        counter = itertools.count(1)
        if config.grammar_path is None:
            grammar = cfg.paper_grammar()
        else:
            with open(config.grammar_path, encoding="utf-8") as fh:
                grammar = cfg.load_grammar(fh)
        for path in config.inputs:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    tokens = line.split()
                    if not tokens:
                        continue
                    sid = str(next(counter))
                    try:
                        parses = cfg.cky_parse(grammar, tokens)
                    except cfg.UnknownWord as exc:
                        yield _Failure(sid, str(exc))
                        continue
                    if not parses:
                        yield _Failure(sid, "no parse")
                        continue
                    first = parses[0]
                    yield ParseTree(first.root, first.tokens, sid)
        return
    next_id = 1
    for path in config.inputs:
        with open(path, encoding="utf-8") as fh:
            try:
                for tree in iter_ptb(fh, start_index=next_id):
                    next_id = int(tree.source_id) + 1
                    yield tree
            except PTBError as exc:
                # the reader cannot resynchronize after a bracket error
                yield _Failure(path, str(exc))


def _extract_one(args) -> list[Triple]:
    tree, require_verb, cap = args
    return extract(tree, require_verb=require_verb, max_extractions=cap)


def iter_extractions(config: RunConfig, err: TextIO,
                     stats: Optional[dict] = None) -> Iterator[tuple[ParseTree, list[Triple]]]:
    """``(tree, triples)`` per sentence, in input order."""
    stats = stats if stats is not None else {}
    stats.setdefault("processed", 0)
    stats.setdefault("failed", 0)

    def on_failure(item: _Failure) -> None:
        stats["failed"] += 1
        print(f"warning: sentence {item.sentence_id}: {item.message}", file=err)

    items = iter_trees(config, err)
    if config.workers == 1:
        for item in items:
            if isinstance(item, _Failure):
                on_failure(item)
                continue
            stats["processed"] += 1
            yield item, extract(item, config.require_verb, config.max_extractions)
        return
    with ProcessPoolExecutor(config.workers) as pool:
        while True:
            batch = list(itertools.islice(items, config.workers * 8))
            if not batch:
                break
            trees = [b for b in batch if not isinstance(b, _Failure)]
            # map() yields results in submission order
            results = iter(pool.map(_extract_one, [(t, config.require_verb,
                                                    config.max_extractions) for t in trees]))
            for item in batch:
                if isinstance(item, _Failure):
                    on_failure(item)
                    continue
                stats["processed"] += 1
                yield item, next(results)


def _status(stats: dict) -> int:
    if stats["processed"] == 0 and stats["failed"] > 0:
        return EXIT_FAILURE
    return EXIT_OK


def run_extract(config: RunConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        config.validate()
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    try:
        grammar_check(config)
    except (cfg.GrammarError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    stats: dict = {}
    write = triple_to_jsonl if config.output_format == "jsonl" else triple_to_tsv
    for _, triples in iter_extractions(config, err, stats):
        for triple in triples:
            out.write(write(triple) + "\n")
    if stats["processed"] == 0 and stats["failed"] == 0:
        print("warning: no sentences in input", file=err)
    return _status(stats)


def grammar_check(config: RunConfig) -> None:
    if config.input_kind == "raw" and config.grammar_path is not None:
        with open(config.grammar_path, encoding="utf-8") as fh:
            cfg.load_grammar(fh)


def run_eval(config: RunConfig, gold_path: str, out: TextIO = sys.stdout,
             err: TextIO = sys.stderr) -> int:
    try:
        config.validate()
        grammar_check(config)
        with open(gold_path, encoding="utf-8") as fh:
            diagnostics: list = []
            try:
                gold = analytics.read_gold(fh, diagnostics=diagnostics)
            finally:
                for lineno, message in diagnostics:
                    print(f"{gold_path}:{lineno}: {message}", file=err)
    except analytics.GoldFormatError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAILURE
    except (ConfigError, cfg.GrammarError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    stats: dict = {}
    triples: list[Triple] = []
    sentence_ids: list[str] = []
    for tree, found in iter_extractions(config, err, stats):
        sentence_ids.append(tree.source_id)
        triples.extend(found)
    try:
        report = analytics.evaluate(triples, gold, config.policy, sentence_ids)
    except analytics.UnknownSentenceId as exc:
        print(f"error: gold refers to unknown sentence id {exc.args[0]}", file=err)
        return EXIT_FAILURE
    out.write(report.render() + "\n")
    return _status(stats)


def render_stats(rows: Sequence[analytics.ProductionCount]) -> str:
    lines = []
    for kind, group in analytics.group_rows(rows).items():
        lines.append(kind.value)
        width = max(len(str(r)) for r in group)
        for row in group:
            lines.append(f"  {str(row):<{width}}  {row.share * 100:.0f}%")
    return "\n".join(lines)


def run_stats(config: RunConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        config.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    stats: dict = {"processed": 0, "failed": 0}

    def trees() -> Iterator[ParseTree]:
        for item in iter_trees(config, err):
            if isinstance(item, _Failure):
                stats["failed"] += 1
                print(f"warning: sentence {item.sentence_id}: {item.message}", file=err)
                continue
            stats["processed"] += 1
            yield item

    try:
        rows = analytics.production_stats(trees(), all_groups=config.all_groups)
    except analytics.EmptyCorpus as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAILURE
    out.write(render_stats(rows) + "\n")
    return EXIT_OK


def run_parse(sentences: Iterable[str], grammar_path: Optional[str] = None,
              out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    """Print every toy-grammar parse of each sentence; blank line between sentences."""
    try:
        if grammar_path is None:
            grammar = cfg.paper_grammar()
        else:
            with open(grammar_path, encoding="utf-8") as fh:
                grammar = cfg.load_grammar(fh)
    except (cfg.GrammarError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    parsed = failed = 0
    for n, sentence in enumerate(s for s in sentences if s.strip()):
        if n:
            out.write("\n")
        try:
            trees = cfg.cky_parse(grammar, sentence.split())
        except cfg.UnknownWord as exc:
            print(f"warning: {sentence.strip()!r}: {exc}", file=err)
            failed += 1
            continue
        if not trees:
            print(f"warning: {sentence.strip()!r}: no parse", file=err)
        for tree in trees:
            out.write(write_ptb(tree) + "\n")
        parsed += 1
    return EXIT_FAILURE if failed and not parsed else EXIT_OK


# -- command line ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treetriples",
        description="Extract subject-predicate-object triples from constituency trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", nargs="+", required=True, metavar="PATH")
        p.add_argument("--grammar", metavar="PATH",
                       help="treat input as raw sentences parsed with this grammar file")
        p.add_argument("--raw", action="store_true",
                       help="treat input as raw sentences parsed with the built-in grammar")
        p.add_argument("--require-verb", action=argparse.BooleanOptionalAction, default=True,
                       help="drop PP/SBAR-seeded triples whose predicate has no verb")
        p.add_argument("--max-extractions", type=int, metavar="N")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("extract", help="write triples as TSV or JSONL")
    common(p)
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")

    p = sub.add_parser("eval", help="score extractions against a gold TSV file")
    common(p)
    p.add_argument("--gold", required=True, metavar="PATH")
    p.add_argument("--policy", choices=("exact", "containment"), default="containment")

    p = sub.add_parser("stats", help="production distribution of NP, VP and PP")
    p.add_argument("--input", nargs="+", required=True, metavar="PATH")
    p.add_argument("--all", action="store_true", help="report every lhs group")

    p = sub.add_parser("parse", help="parse sentences with the toy grammar")
    p.add_argument("sentence", nargs="*")
    p.add_argument("--input", nargs="+", metavar="PATH")
    p.add_argument("--grammar", metavar="PATH")
    return parser


def _config(args) -> RunConfig:
    raw = getattr(args, "raw", False) or getattr(args, "grammar", None) is not None
    return RunConfig(
        inputs=args.input,
        input_kind="raw" if raw else "ptb",
        output_format=getattr(args, "format", "tsv"),
        grammar_path=getattr(args, "grammar", None),
        policy=getattr(args, "policy", "containment"),
        require_verb=getattr(args, "require_verb", True),
        max_extractions=getattr(args, "max_extractions", None),
        all_groups=getattr(args, "all", False),
        workers=getattr(args, "workers", 1),
    )


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "parse":
        sentences = list(args.sentence)
        for path in args.input or ():
            try:
                with open(path, encoding="utf-8") as fh:
                    sentences.extend(fh)
            except OSError as exc:
                print(f"error: cannot read {path}: {exc.strerror}", file=err)
                return EXIT_CONFIG
        return run_parse(sentences, args.grammar, out, err)
    config = _config(args)
    if args.command == "extract":
        return run_extract(config, out, err)
    if args.command == "eval":
        return run_eval(config, args.gold, out, err)
    return run_stats(config, out, err)
