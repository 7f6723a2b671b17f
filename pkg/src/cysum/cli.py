"""Command-line entry point: ``cysum stats|summarize|evaluate``.

Exit codes: 0 on success, 1 for configuration errors, 2 when the corpus
cannot be loaded.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .corpus import CORPUS_FORMATS, DEFAULT_MIN_TOKENS, REFERENCE_KINDS, Corpus, corpus_stats, load_corpus
from .errors import BadHeader, ConfigError
from .graphrank import RankConfig
from .harness import DEFAULT_CAPS, EMBEDDING, EvalConfig, emit_report, format_stats, run_all
from .summarizers import SYSTEMS, SummaryRequest, summarize
from .vectorspace import EmbeddingTable, fit_tfidf, load_embeddings

log = logging.getLogger("cysum")

EXIT_OK, EXIT_CONFIG, EXIT_CORPUS = 0, 1, 2


class CorpusLoadError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors, not argparse's default status 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _caps(text: str) -> tuple[int | None, ...]:
    caps = []
    for item in _csv_list(text):
        if item.lower() == "none":
            caps.append(None)
            continue
        try:
            caps.append(int(item))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad cap {item!r}") from None
    return tuple(caps)


def _named_path(text: str) -> tuple[str, Path]:
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {text!r}")
    return name, Path(path)


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("corpus_root", type=Path)
    p.add_argument("--corpus-format", choices=CORPUS_FORMATS, default="tagged")
    p.add_argument("--min-tokens", type=int, default=DEFAULT_MIN_TOKENS)


def _add_rank_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threshold", type=float, default=RankConfig.edge_threshold,
                   help="cosine threshold for graph edges (default %(default)s)")
    p.add_argument("--damping", type=float, default=RankConfig.damping)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cysum", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    stats = sub.add_parser("stats", help="token statistics of a corpus")
    _add_corpus_args(stats)
    stats.add_argument("--format", choices=("table", "csv"), default="table")
    stats.add_argument("--out", type=Path)

    summ = sub.add_parser("summarize", help="write one summary file per article")
    _add_corpus_args(summ)
    summ.add_argument("--system", choices=SYSTEMS, required=True)
    summ.add_argument("--ratio", type=float, default=0.5)
    summ.add_argument("--embeddings", type=Path, help="word vectors for tfidf_embedding")
    _add_rank_args(summ)
    summ.add_argument("--out", type=Path, required=True, help="output directory")

    ev = sub.add_parser("evaluate", help="ROUGE evaluation of all systems")
    _add_corpus_args(ev)
    ev.add_argument("--systems", type=_csv_list, default=None,
                    help="comma-separated subset of: " + ", ".join(SYSTEMS))
    ev.add_argument("--caps", type=_caps, default=DEFAULT_CAPS,
                    help="comma-separated token caps, 'none' for uncapped")
    ev.add_argument("--beta", type=float, default=1.0)
    ev.add_argument("--refs", type=_csv_list, default=list(REFERENCE_KINDS))
    ev.add_argument("--multi-ref", choices=("best", "average"), default="best")
    ev.add_argument("--ratio", type=float, default=0.5)
    ev.add_argument("--embeddings", type=_named_path, action="append", default=[],
                    metavar="NAME=PATH", help="repeat for each embedding table")
    _add_rank_args(ev)
    ev.add_argument("--jobs", type=int, default=1)
    ev.add_argument("--format", choices=("csv", "json", "table"), default="table")
    ev.add_argument("--out", type=Path)
    return parser


def _load(args) -> Corpus:
    try:
        corpus = load_corpus(args.corpus_root, args.corpus_format, min_tokens=args.min_tokens)
    except OSError as exc:
        raise CorpusLoadError(str(exc)) from exc
    for f in corpus.report.failures:
        log.warning("%s: %s", f.source, f.reason)
    log.info("loaded %d articles (%d rejected)", len(corpus), len(corpus.rejected))
    return corpus


def _vocabulary(corpus: Corpus) -> set[str]:
    return {w for a in corpus.accepted for s in a.sentences for w in s.words}


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(data)


def cmd_stats(args) -> int:
    corpus = _load(args)
    _write(format_stats(corpus_stats(corpus), args.format), args.out)
    return EXIT_OK


def _rank_config(args) -> RankConfig:
    try:
        return RankConfig(damping=args.damping, edge_threshold=args.threshold)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_summarize(args) -> int:
    try:
        request = SummaryRequest(args.system, args.ratio)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.system == EMBEDDING and args.embeddings is None:
        raise ConfigError("--embeddings is required for tfidf_embedding")
    rank = _rank_config(args)
    corpus = _load(args)
    if not corpus.accepted:
        raise ConfigError("corpus has no accepted articles")
    model = fit_tfidf(corpus)
    table = None
    if args.embeddings is not None:
        table = _load_table(args.embeddings, None, _vocabulary(corpus))
    args.out.mkdir(parents=True, exist_ok=True)
    for article in corpus.accepted:
        summary = summarize(article, request, model=model, embeddings=table, rank=rank)
        (args.out / f"{article.id}.{args.system}.txt").write_text(summary.text + "\n", encoding="utf-8")
    log.info("wrote %d summaries to %s", len(corpus.accepted), args.out)
    return EXIT_OK


def _load_table(path: Path, name: str | None, vocabulary: set[str]) -> EmbeddingTable:
    try:
        return load_embeddings(path, source_name=name, restrict_to=vocabulary)
    except (OSError, BadHeader) as exc:
        raise ConfigError(f"cannot load embeddings {path}: {exc}") from exc


def cmd_evaluate(args) -> int:
    systems = args.systems
    if systems is None:
        systems = [s for s in SYSTEMS if s != EMBEDDING or args.embeddings]
    try:
        config = EvalConfig(
            caps=args.caps,
            beta=args.beta,
            systems=tuple(systems),
            reference_kinds=tuple(args.refs),
            multi_ref_policy=args.multi_ref,
            ratio=args.ratio,
            rank=_rank_config(args),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if EMBEDDING in config.systems and not args.embeddings:
        raise ConfigError("tfidf_embedding requested but no --embeddings NAME=PATH given")
    corpus = _load(args)
    if not corpus.accepted:
        raise ConfigError("corpus has no accepted articles")
    model = fit_tfidf(corpus)
    vocab = _vocabulary(corpus)
    tables = {name: _load_table(path, name, vocab) for name, path in args.embeddings}
    report = run_all(corpus, model, tables, config, jobs=args.jobs)
    _write(emit_report(report, args.format), args.out)
    return EXIT_OK


COMMANDS = {"stats": cmd_stats, "summarize": cmd_summarize, "evaluate": cmd_evaluate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except CorpusLoadError as exc:
        log.error("%s", exc)
        return EXIT_CORPUS


if __name__ == "__main__":
    sys.exit(main())
