"""Loading and validating the summarization dataset.

Three on-disk layouts are understood:

``tagged``
    ``articles/<id>.txt`` holding ``<title>``, ``<text>`` and ``<category>``
    elements, with plain-text references in ``references/wiki/<id>.txt`` and
    ``references/human/<id>.<author>.txt`` (optional first line
    ``quality: <1-5>``).
``json``
    ``*.json`` files holding one article object or a list of them, or
    ``*.jsonl`` with one object per line.
``csv``
    ``*.csv`` with columns ``id,title,category,text,wiki_summary``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Iterator, Literal, Mapping, Sequence

from .errors import MalformedFile
from .text_core import Sentence, count_tokens, split_sentences, words

log = logging.getLogger(__name__)

WIKI = "wiki"
HUMAN = "human"
REFERENCE_KINDS = (WIKI, HUMAN)
DEFAULT_MIN_TOKENS = 500
DEFAULT_BIN_EDGES = tuple(range(0, 5001, 500))

ReferenceKind = Literal["wiki", "human"]


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    body: str
    categories: tuple[str, ...]
    sentences: tuple[Sentence, ...]

    @classmethod
    def from_text(cls, id: str, title: str, body: str, categories: Iterable[str] = ()) -> Article:
        return cls(id, title, body, tuple(categories), tuple(split_sentences(body)))

    @property
    def token_count(self) -> int:
        return count_tokens(self.sentences)


@dataclass(frozen=True)
class ReferenceSummary:
    doc_id: str
    kind: ReferenceKind
    text: str
    tokens: tuple[str, ...]
    author_id: str | None = None
    quality: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in REFERENCE_KINDS:
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if self.kind == WIKI and (self.author_id is not None or self.quality is not None):
            raise ValueError("wiki references carry no author or quality")
        if self.quality is not None and self.quality not in (1, 2, 3, 4, 5):
            raise ValueError(f"quality must be in 1..5, got {self.quality!r}")

    @classmethod
    def from_text(
        cls,
        doc_id: str,
        kind: ReferenceKind,
        text: str,
        author_id: str | None = None,
        quality: int | None = None,
    ) -> ReferenceSummary:
        return cls(doc_id, kind, text, tuple(words(text)), author_id, quality)


@dataclass(frozen=True)
class Validation:
    accepted: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


def validate_article(article: Article, min_tokens: int = DEFAULT_MIN_TOKENS) -> Validation:
    """Accept articles with at least ``min_tokens`` word tokens (inclusive)."""
    n = article.token_count
    if n >= min_tokens:
        return Validation(True)
    return Validation(False, f"{n} tokens < minimum {min_tokens}")


@dataclass(frozen=True)
class ParseFailure:
    source: str
    reason: str


@dataclass(frozen=True)
class ParseReport:
    """Per-file problems collected during a load; never fatal."""

    failures: tuple[ParseFailure, ...] = ()
    reference_failures: tuple[ParseFailure, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.failures or self.reference_failures)


@dataclass(frozen=True)
class Corpus:
    articles: tuple[Article, ...]
    references: Mapping[str, tuple[ReferenceSummary, ...]]
    min_tokens: int = DEFAULT_MIN_TOKENS
    rejected: Mapping[str, str] = field(default_factory=dict)
    report: ParseReport = ParseReport()

    @classmethod
    def build(
        cls,
        articles: Iterable[Article],
        references: Iterable[ReferenceSummary] = (),
        min_tokens: int = DEFAULT_MIN_TOKENS,
        report: ParseReport = ParseReport(),
    ) -> Corpus:
        ordered = tuple(sorted(articles, key=lambda a: a.id))
        ids = [a.id for a in ordered]
        if len(set(ids)) != len(ids):
            raise ValueError("article ids must be unique")
        known = set(ids)
        refs: dict[str, list[ReferenceSummary]] = {i: [] for i in ids}
        for r in references:
            if r.doc_id not in known:
                raise ValueError(f"reference for unknown article {r.doc_id!r}")
            refs[r.doc_id].append(r)
        rejected = {}
        for a in ordered:
            v = validate_article(a, min_tokens)
            if not v:
                rejected[a.id] = v.reason
        return cls(
            ordered,
            {i: tuple(sorted(rs, key=_ref_order)) for i, rs in refs.items()},
            min_tokens,
            rejected,
            report,
        )

    @property
    def accepted(self) -> tuple[Article, ...]:
        return tuple(a for a in self.articles if a.id not in self.rejected)

    def references_for(self, doc_id: str, kind: str | None = None) -> tuple[ReferenceSummary, ...]:
        refs = self.references.get(doc_id, ())
        if kind is None:
            return refs
        return tuple(r for r in refs if r.kind == kind)

    def article(self, doc_id: str) -> Article:
        for a in self.articles:
            if a.id == doc_id:
                return a
        raise KeyError(doc_id)

    def __len__(self) -> int:
        return len(self.articles)


def _ref_order(r: ReferenceSummary) -> tuple:
    return (REFERENCE_KINDS.index(r.kind), r.author_id or "", r.text)


# -- tagged files -------------------------------------------------------------

_TAGS = ("title", "text", "category")


def _split_categories(raw: str, delimiter: str | None) -> tuple[str, ...]:
    parts = re.split(r"[\n,]", raw) if delimiter is None else raw.split(delimiter)
    return tuple(p.strip() for p in parts if p.strip())


def _element(content: str, tag: str) -> str:
    opening, closing = f"<{tag}>", f"</{tag}>"
    n_open, n_close = content.count(opening), content.count(closing)
    if n_open == 0:
        raise MalformedFile(f"missing <{tag}> element")
    if n_open > 1 or n_close > 1:
        raise MalformedFile(f"duplicated <{tag}> element")
    i = content.index(opening)
    j = content.find(closing)
    if j < i:
        raise MalformedFile(f"unclosed <{tag}> element")
    return content[i + len(opening) : j]


def parse_tagged(content: str, doc_id: str = "", category_delimiter: str | None = None) -> Article:
    """Parse one tagged article file.

    Each of ``<title>``, ``<text>`` and ``<category>`` must appear exactly
    once, in any order. Categories split on newlines or commas unless
    ``category_delimiter`` is given.
    """
    fields = {tag: _element(content, tag) for tag in _TAGS}
    return Article.from_text(
        doc_id,
        fields["title"].strip(),
        fields["text"].strip(),
        _split_categories(fields["category"], category_delimiter),
    )


def render_tagged(article: Article) -> str:
    return (
        f"<title>{article.title}</title>\n"
        f"<text>{article.body}</text>\n"
        f"<category>{', '.join(article.categories)}</category>\n"
    )


_QUALITY_RE = re.compile(r"\s*quality\s*:\s*(\S*)\s*$", re.IGNORECASE)


def parse_human_reference(content: str, doc_id: str, author_id: str) -> ReferenceSummary:
    first, _, rest = content.partition("\n")
    quality = None
    m = _QUALITY_RE.match(first)
    if m:
        try:
            quality = int(m.group(1))
        except ValueError:
            raise MalformedFile(f"bad quality value {m.group(1)!r}") from None
        if not 1 <= quality <= 5:
            raise MalformedFile(f"quality {quality} outside 1..5")
        content = rest
    return _reference(doc_id, HUMAN, content, author_id, quality)


def _reference(doc_id, kind, text, author_id=None, quality=None) -> ReferenceSummary:
    text = text.strip()
    if not words(text):
        raise MalformedFile("empty summary")
    return ReferenceSummary.from_text(doc_id, kind, text, author_id, quality)


def _read(path: Path) -> str:
    return path.read_bytes().decode("utf-8")


class _Loader:
    def __init__(self, category_delimiter: str | None) -> None:
        self.delimiter = category_delimiter
        self.articles: dict[str, Article] = {}
        self.references: list[tuple[str, ReferenceSummary]] = []
        self.failures: list[ParseFailure] = []
        self.reference_failures: list[ParseFailure] = []

    def add_article(self, source: str, build) -> None:
        try:
            article = build()
        except (MalformedFile, ValueError, KeyError, TypeError, UnicodeDecodeError, OSError) as exc:
            self.failures.append(ParseFailure(source, _reason(exc)))
            return
        if article.id in self.articles:
            self.failures.append(ParseFailure(source, f"duplicate article id {article.id!r}"))
            return
        self.articles[article.id] = article

    def add_reference(self, source: str, build) -> None:
        try:
            ref = build()
        except (MalformedFile, ValueError, KeyError, TypeError, UnicodeDecodeError, OSError) as exc:
            self.reference_failures.append(ParseFailure(source, _reason(exc)))
            return
        self.references.append((source, ref))

    def corpus(self, min_tokens: int) -> Corpus:
        refs = []
        for source, ref in self.references:
            if ref.doc_id in self.articles:
                refs.append(ref)
            else:
                self.reference_failures.append(
                    ParseFailure(source, f"no article with id {ref.doc_id!r}")
                )
        report = ParseReport(
            tuple(sorted(self.failures, key=lambda f: f.source)),
            tuple(sorted(self.reference_failures, key=lambda f: f.source)),
        )
        for f in report.failures + report.reference_failures:
            log.warning("skipped %s: %s", f.source, f.reason)
        return Corpus.build(self.articles.values(), refs, min_tokens, report)


def _reason(exc: BaseException) -> str:
    if isinstance(exc, KeyError):
        return f"missing field {exc.args[0]!r}"
    return str(exc) or type(exc).__name__


def _files(directory: Path, *suffixes: str) -> list[Path]:
    if not directory.is_dir():
        return []
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in suffixes)


def _load_tagged(root: Path, loader: _Loader) -> None:
    for path in _files(root / "articles", ".txt"):
        loader.add_article(
            str(path), lambda p=path: parse_tagged(_read(p), p.stem, loader.delimiter)
        )
    for path in _files(root / "references" / WIKI, ".txt"):
        loader.add_reference(str(path), lambda p=path: _reference(p.stem, WIKI, _read(p)))
    for path in _files(root / "references" / HUMAN, ".txt"):
        doc_id, dot, author = path.stem.rpartition(".")
        if not dot or not doc_id or not author:
            loader.reference_failures.append(
                ParseFailure(str(path), "expected <id>.<author>.txt")
            )
            continue
        loader.add_reference(
            str(path), lambda p=path, d=doc_id, a=author: parse_human_reference(_read(p), d, a)
        )


def _record_categories(raw, delimiter: str | None) -> tuple[str, ...]:
    if raw is None:
        return ()
    if isinstance(raw, str):
        return _split_categories(raw, delimiter)
    return tuple(str(c).strip() for c in raw if str(c).strip())


def _add_record(loader: _Loader, source: str, record: dict) -> None:
    def build_article() -> Article:
        if not isinstance(record, dict):
            raise TypeError("record is not an object")
        return Article.from_text(
            str(record["id"]),
            str(record["title"]).strip(),
            str(record["text"]).strip(),
            _record_categories(record.get("categories", record.get("category")), loader.delimiter),
        )

    before = len(loader.articles)
    loader.add_article(source, build_article)
    if len(loader.articles) == before:
        return
    doc_id = str(record["id"])
    wiki = record.get("wiki_summary")
    if wiki:
        loader.add_reference(f"{source}#wiki", lambda: _reference(doc_id, WIKI, str(wiki)))
    for k, human in enumerate(record.get("human_summaries") or ()):
        def build_human(h=human, k=k) -> ReferenceSummary:
            quality = h.get("quality")
            author = h.get("author")
            return _reference(
                doc_id,
                HUMAN,
                str(h["text"]),
                str(author) if author is not None else str(k),
                int(quality) if quality is not None else None,
            )

        loader.add_reference(f"{source}#human[{k}]", build_human)


def _load_json(root: Path, loader: _Loader) -> None:
    for path in _files(root, ".json", ".jsonl"):
        try:
            content = _read(path)
        except (UnicodeDecodeError, OSError) as exc:
            loader.failures.append(ParseFailure(str(path), _reason(exc)))
            continue
        if path.suffix == ".jsonl":
            for i, line in enumerate(content.splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except ValueError as exc:
                    loader.failures.append(ParseFailure(f"{path}:{i}", _reason(exc)))
                    continue
                _add_record(loader, f"{path}:{i}", record)
            continue
        try:
            data = json.loads(content)
        except ValueError as exc:
            loader.failures.append(ParseFailure(str(path), _reason(exc)))
            continue
        if isinstance(data, list):
            for i, record in enumerate(data):
                _add_record(loader, f"{path}[{i}]", record)
        else:
            _add_record(loader, str(path), data)


_CSV_COLUMNS = ("id", "title", "category", "text", "wiki_summary")


def _load_csv(root: Path, loader: _Loader) -> None:
    for path in _files(root, ".csv"):
        try:
            reader = csv.DictReader(io.StringIO(_read(path), newline=""))
            missing = [c for c in _CSV_COLUMNS if c not in (reader.fieldnames or ())]
            if missing:
                raise MalformedFile(f"missing columns {', '.join(missing)}")
            rows = list(reader)
        except (MalformedFile, csv.Error, UnicodeDecodeError, OSError) as exc:
            loader.failures.append(ParseFailure(str(path), _reason(exc)))
            continue
        for i, row in enumerate(rows, 2):
            _add_record(loader, f"{path}:{i}", row)


_FORMATS = {"tagged": _load_tagged, "json": _load_json, "csv": _load_csv}
CORPUS_FORMATS = tuple(_FORMATS)


def load_corpus(
    root: str | Path,
    format: str = "tagged",
    *,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    category_delimiter: str | None = None,
) -> Corpus:
    """Load every parsable article and reference under ``root``.

    Unreadable or malformed entries are listed in ``corpus.report`` and do
    not stop the load. Articles below ``min_tokens`` stay in the corpus but
    are listed in ``corpus.rejected``.
    """
    root = Path(root)
    if not root.exists():
        raise FileNotFoundError(f"corpus root {root} does not exist")
    if not root.is_dir():
        raise NotADirectoryError(f"corpus root {root} is not a directory")
    try:
        load = _FORMATS[format]
    except KeyError:
        raise ValueError(f"unknown corpus format {format!r}; expected one of {CORPUS_FORMATS}") from None
    loader = _Loader(category_delimiter)
    load(root, loader)
    return loader.corpus(min_tokens)


# -- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class HistogramBin:
    lower: int
    upper: int | None  # None marks the overflow bin
    count: int

    @property
    def label(self) -> str:
        return f">{self.lower}" if self.upper is None else f"{self.lower}-{self.upper}"


@dataclass(frozen=True)
class CorpusStats:
    article_count: int
    rejected_count: int
    bins: tuple[HistogramBin, ...]
    mean_article_tokens: float | None
    mean_summary_tokens: Mapping[str, float | None]

    @property
    def overflow(self) -> int:
        return self.bins[-1].count


def token_histogram(counts: Sequence[int], edges: Sequence[int] = DEFAULT_BIN_EDGES) -> tuple[HistogramBin, ...]:
    """Bin token counts into ``[e_i, e_{i+1})`` bins plus an overflow bin.

    The last regular bin is closed so that a count equal to the final edge
    is not overflow. Counts below the first edge land in the first bin.
    """
    if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("bin edges must be at least two strictly increasing values")
    tallies = [0] * len(edges)
    last = len(edges) - 2
    for c in counts:
        if c > edges[-1]:
            tallies[-1] += 1
            continue
        i = 0
        while i < last and c >= edges[i + 1]:
            i += 1
        tallies[i] += 1
    bins = [HistogramBin(edges[i], edges[i + 1], tallies[i]) for i in range(len(edges) - 1)]
    bins.append(HistogramBin(edges[-1], None, tallies[-1]))
    return tuple(bins)


def corpus_stats(corpus: Corpus, bin_edges: Sequence[int] = DEFAULT_BIN_EDGES) -> CorpusStats:
    accepted = corpus.accepted
    counts = [a.token_count for a in accepted]
    summary_means = {}
    for kind in REFERENCE_KINDS:
        lengths = [len(r.tokens) for a in accepted for r in corpus.references_for(a.id, kind)]
        summary_means[kind] = fmean(lengths) if lengths else None
    return CorpusStats(
        article_count=len(accepted),
        rejected_count=len(corpus.rejected),
        bins=token_histogram(counts, bin_edges),
        mean_article_tokens=fmean(counts) if counts else None,
        mean_summary_tokens=summary_means,
    )


def iter_references(corpus: Corpus) -> Iterator[ReferenceSummary]:
    for a in corpus.articles:
        yield from corpus.references_for(a.id)
