"""Batch evaluation: summarize every article with every system, score the
summaries against wiki and human references at each token cap, and
macro-average into a report with one block of rows per system and cap.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Literal, Mapping, Sequence

from .corpus import HUMAN, REFERENCE_KINDS, WIKI, Article, Corpus, CorpusStats, ReferenceSummary
from .errors import ConfigError, NoReferences
from .graphrank import RankConfig
from .rouge import VARIANTS, RougeConfig, RougeScore, rouge, truncate
from .summarizers import SYSTEMS, SummaryRequest, SystemSummary, summarize
from .vectorspace import EmbeddingTable, TfidfModel

log = logging.getLogger(__name__)

DEFAULT_CAPS: tuple[int | None, ...] = (50, 100, 150, 200, 250, None)
EMBEDDING = "tfidf_embedding"
SYSTEM_LABELS = {
    "first_sentence": "1stSent",
    "textrank": "TextRank",
    "lexrank": "LexRank",
    "tfidf": "TfIdf",
}
METRIC_LABELS = {"rouge1": "RGE-1", "rouge2": "RGE-2", "rougeL": "RGE-L", "rougeSU4": "RGE-SU4"}
KIND_LABELS = {WIKI: "Wiki Refs", HUMAN: "Human Refs"}

MultiRefPolicy = Literal["best", "average"]


@dataclass(frozen=True)
class EvalConfig:
    caps: tuple[int | None, ...] = DEFAULT_CAPS
    beta: float = 1.0
    systems: tuple[str, ...] = SYSTEMS
    reference_kinds: tuple[str, ...] = REFERENCE_KINDS
    multi_ref_policy: MultiRefPolicy = "best"
    metrics: tuple[str, ...] = VARIANTS
    ratio: float = 0.5
    rank: RankConfig = field(default_factory=RankConfig)

    def __post_init__(self) -> None:
        if not self.caps:
            raise ConfigError("at least one cap setting is required")
        for cap in self.caps:
            if cap is not None and (not isinstance(cap, int) or cap < 1):
                raise ConfigError(f"caps must be positive integers or None, got {cap!r}")
        if not self.systems:
            raise ConfigError("at least one system is required")
        for s in self.systems:
            if s not in SYSTEMS:
                raise ConfigError(f"unknown system {s!r}; choose from {', '.join(SYSTEMS)}")
        for k in self.reference_kinds:
            if k not in REFERENCE_KINDS:
                raise ConfigError(f"unknown reference kind {k!r}")
        if not self.reference_kinds:
            raise ConfigError("at least one reference kind is required")
        for m in self.metrics:
            if m not in VARIANTS:
                raise ConfigError(f"unknown metric {m!r}")
        if self.multi_ref_policy not in ("best", "average"):
            raise ConfigError(f"unknown multi-reference policy {self.multi_ref_policy!r}")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if not 0 < self.ratio <= 1:
            raise ConfigError("ratio must lie in (0, 1]")


# -- system naming --------------------------------------------------------------


def embedding_system(name: str) -> str:
    return f"{EMBEDDING}:{name}"


def base_system(system: str) -> str:
    return system.split(":", 1)[0]


def system_label(system: str) -> str:
    if system.startswith(EMBEDDING + ":"):
        return system.split(":", 1)[1]
    return SYSTEM_LABELS.get(system, system)


def system_order(systems: Iterable[str]) -> list[str]:
    """Canonical order: lead sentence, TextRank, LexRank, TFIDF, then each embedding
    variant in the order first seen."""
    seen = list(dict.fromkeys(systems))
    return sorted(seen, key=lambda s: (SYSTEMS.index(base_system(s)), seen.index(s)))


def cap_order(cap: int | None) -> tuple[int, int]:
    return (1, 0) if cap is None else (0, cap)


def expand_systems(systems: Sequence[str], embeddings: Mapping[str, EmbeddingTable]) -> list[str]:
    out = []
    for s in systems:
        if s == EMBEDDING:
            if not embeddings:
                raise ConfigError("tfidf_embedding requested but no embedding table supplied")
            out.extend(embedding_system(name) for name in embeddings)
        else:
            out.append(s)
    return system_order(out)


# -- scoring --------------------------------------------------------------------


def _tokens(x: SystemSummary | ReferenceSummary | Sequence[str]) -> Sequence[str]:
    return x.tokens if isinstance(x, (SystemSummary, ReferenceSummary)) else x


def prepare_pair(sys_tokens: Sequence[str], ref_tokens: Sequence[str], cap: int | None) -> tuple[list[str], list[str]]:
    """Truncate both sides of a system/reference pair to ``cap`` tokens."""
    return truncate(sys_tokens, cap), truncate(ref_tokens, cap)


def combine(scores: Sequence[RougeScore], policy: MultiRefPolicy) -> RougeScore:
    if not scores:
        raise NoReferences("no reference scores to combine")
    if policy == "best":
        # max() keeps the first of equal f1 values
        return max(scores, key=lambda s: s.f1)
    n = len(scores)
    return RougeScore(
        math.fsum(s.precision for s in scores) / n,
        math.fsum(s.recall for s in scores) / n,
        math.fsum(s.f1 for s in scores) / n,
    )


def evaluate_pair(
    sys: SystemSummary | Sequence[str],
    refs: Sequence[ReferenceSummary | Sequence[str]],
    config: EvalConfig,
    cap: int | None,
    metric: str,
) -> RougeScore:
    """Score a summary against its references at one cap, merged per policy."""
    if not refs:
        raise NoReferences("cannot score a summary without references")
    rc = RougeConfig(metric, config.beta, None)
    scores = []
    for ref in refs:
        s, r = prepare_pair(_tokens(sys), _tokens(ref), cap)
        scores.append(rouge(s, r, rc))
    return combine(scores, config.multi_ref_policy)


@dataclass(frozen=True)
class DocScore:
    doc_id: str
    system: str
    reference_kind: str
    cap: int | None
    metric: str
    score: RougeScore


def summarize_document(
    doc: Article,
    systems: Sequence[str],
    model: TfidfModel,
    embeddings: Mapping[str, EmbeddingTable],
    config: EvalConfig,
) -> dict[str, SystemSummary]:
    out = {}
    for system in systems:
        base = base_system(system)
        table = embeddings[system.split(":", 1)[1]] if base == EMBEDDING else None
        summary = summarize(
            doc, SummaryRequest(base, config.ratio), model=model, embeddings=table, rank=config.rank
        )
        out[system] = SystemSummary(summary.doc_id, system, summary.selected, summary.text, summary.tokens)
    return out


def score_document(
    doc: Article,
    references: Sequence[ReferenceSummary],
    systems: Sequence[str],
    model: TfidfModel,
    embeddings: Mapping[str, EmbeddingTable],
    config: EvalConfig,
) -> list[DocScore]:
    summaries = summarize_document(doc, systems, model, embeddings, config)
    out = []
    for kind in config.reference_kinds:
        refs = [r for r in references if r.kind == kind]
        if not refs:
            continue
        for system in systems:
            for cap in config.caps:
                for metric in config.metrics:
                    score = evaluate_pair(summaries[system], refs, config, cap, metric)
                    out.append(DocScore(doc.id, system, kind, cap, metric, score))
    return out


_worker_state: tuple | None = None


def _init_worker(systems, model, embeddings, config) -> None:
    global _worker_state
    _worker_state = (systems, model, embeddings, config)


def _score_in_worker(item: tuple[Article, tuple[ReferenceSummary, ...]]) -> list[DocScore]:
    systems, model, embeddings, config = _worker_state
    doc, refs = item
    return score_document(doc, refs, systems, model, embeddings, config)


def score_documents(
    corpus: Corpus,
    model: TfidfModel,
    embeddings: Mapping[str, EmbeddingTable] | EmbeddingTable | None = None,
    config: EvalConfig = EvalConfig(),
    jobs: int = 1,
) -> list[DocScore]:
    """Per-document scores for every accepted article, ordered by article id."""
    embeddings = _as_mapping(embeddings)
    systems = expand_systems(config.systems, embeddings)
    items = [(a, corpus.references_for(a.id)) for a in corpus.accepted]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(
            jobs, initializer=_init_worker, initargs=(systems, model, embeddings, config)
        ) as pool:
            chunks = list(pool.map(_score_in_worker, items, chunksize=max(1, len(items) // (4 * jobs))))
    else:
        chunks = [score_document(d, r, systems, model, embeddings, config) for d, r in items]
    return [s for chunk in chunks for s in chunk]


def _as_mapping(embeddings) -> dict[str, EmbeddingTable]:
    if embeddings is None:
        return {}
    if isinstance(embeddings, EmbeddingTable):
        return {embeddings.source_name or "embedding": embeddings}
    return dict(embeddings)


# -- reports --------------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    system: str
    reference_kind: str
    cap: int | None
    metric: str
    precision: float
    recall: float
    f1: float
    documents: int


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]
    corpus_size: int
    excluded: Mapping[str, int]
    systems: tuple[str, ...] = ()

    def row(self, system: str, reference_kind: str, cap: int | None, metric: str) -> ReportRow:
        for r in self.rows:
            if (r.system, r.reference_kind, r.cap, r.metric) == (system, reference_kind, cap, metric):
                return r
        raise KeyError((system, reference_kind, cap, metric))


def _row_key(r: ReportRow, systems: Sequence[str]) -> tuple:
    return (
        systems.index(r.system) if r.system in systems else len(systems),
        REFERENCE_KINDS.index(r.reference_kind),
        cap_order(r.cap),
        VARIANTS.index(r.metric),
    )


def aggregate(
    doc_scores: Iterable[DocScore],
    corpus_size: int,
    systems: Sequence[str],
    reference_kinds: Sequence[str] = REFERENCE_KINDS,
) -> EvalReport:
    """Macro-average per (system, reference kind, cap, metric)."""
    groups: dict[tuple, list[tuple[str, RougeScore]]] = {}
    docs_by_kind: dict[str, set[str]] = {k: set() for k in reference_kinds}
    for d in doc_scores:
        groups.setdefault((d.system, d.reference_kind, d.cap, d.metric), []).append((d.doc_id, d.score))
        docs_by_kind.setdefault(d.reference_kind, set()).add(d.doc_id)
    rows = []
    for (system, kind, cap, metric), items in groups.items():
        items.sort(key=lambda x: x[0])
        scores = [s for _, s in items]
        n = len(scores)
        rows.append(
            ReportRow(
                system, kind, cap, metric,
                math.fsum(s.precision for s in scores) / n,
                math.fsum(s.recall for s in scores) / n,
                math.fsum(s.f1 for s in scores) / n,
                n,
            )
        )
    systems = tuple(system_order(systems))
    rows.sort(key=lambda r: _row_key(r, systems))
    excluded = {k: corpus_size - len(docs_by_kind.get(k, ())) for k in reference_kinds}
    return EvalReport(tuple(rows), corpus_size, excluded, systems)


def run_all(
    corpus: Corpus,
    model: TfidfModel,
    embeddings: Mapping[str, EmbeddingTable] | EmbeddingTable | None = None,
    config: EvalConfig = EvalConfig(),
    jobs: int = 1,
) -> EvalReport:
    """Evaluate every configured system over the accepted articles of ``corpus``.

    Articles without a reference of some kind are left out of that kind's
    rows and counted in ``report.excluded``.
    """
    if not corpus.accepted:
        raise ConfigError("corpus has no accepted articles")
    tables = _as_mapping(embeddings)
    systems = expand_systems(config.systems, tables)
    scores = score_documents(corpus, model, tables, config, jobs)
    return aggregate(scores, len(corpus.accepted), systems, config.reference_kinds)


def _cap_text(cap: int | None) -> str:
    return "none" if cap is None else str(cap)


def _grouped(report: EvalReport) -> dict[tuple, dict[str, ReportRow]]:
    out: dict[tuple, dict[str, ReportRow]] = {}
    for r in report.rows:
        out.setdefault((r.system, r.reference_kind, r.cap), {})[r.metric] = r
    return out


def _emit_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["system", "label", "reference_kind", "cap", "documents"]
    header += [f"{m}_{c}" for m in VARIANTS for c in ("precision", "recall", "f1")]
    writer.writerow(header)
    for (system, kind, cap), by_metric in _grouped(report).items():
        docs = max(r.documents for r in by_metric.values())
        row = [system, system_label(system), kind, _cap_text(cap), docs]
        for m in VARIANTS:
            r = by_metric.get(m)
            row += [repr(r.precision), repr(r.recall), repr(r.f1)] if r else ["", "", ""]
        writer.writerow(row)
    return buf.getvalue()


def report_to_dict(report: EvalReport) -> dict:
    return {
        "corpus_size": report.corpus_size,
        "excluded": dict(report.excluded),
        "systems": list(report.systems),
        "rows": [asdict(r) for r in report.rows],
    }


def report_from_dict(data: Mapping) -> EvalReport:
    return EvalReport(
        tuple(ReportRow(**r) for r in data["rows"]),
        data["corpus_size"],
        dict(data["excluded"]),
        tuple(data.get("systems", ())),
    )


def parse_report(text: str | bytes) -> EvalReport:
    return report_from_dict(json.loads(text))


def _emit_table(report: EvalReport) -> str:
    kinds = [k for k in REFERENCE_KINDS if k in report.excluded] or list(REFERENCE_KINDS)
    name_w, stat_w, cell_w = 16, 4, 8
    lead = " " * (name_w + stat_w + 2)
    groups = " || ".join(f"{KIND_LABELS[k]:^{cell_w * len(VARIANTS) + 3 * (len(VARIANTS) - 1)}}" for k in kinds)
    metric_cells = " | ".join(f"{METRIC_LABELS[m]:>{cell_w}}" for m in VARIANTS)
    lines = [lead + "| " + groups, lead + "| " + " || ".join([metric_cells] * len(kinds))]
    lines.append("-" * len(lines[-1]))
    grouped = _grouped(report)
    systems = system_order({r.system for r in report.rows}) if not report.systems else list(report.systems)
    caps = sorted({r.cap for r in report.rows}, key=cap_order)
    for cap in caps:
        for system in systems:
            if not any((system, k, cap) in grouped for k in kinds):
                continue
            name = system_label(system) + ("" if cap is None else str(cap))
            for i, (stat, attr) in enumerate((("pre", "precision"), ("rec", "recall"), ("f1", "f1"))):
                cells = []
                for k in kinds:
                    by_metric = grouped.get((system, k, cap), {})
                    cells.append(" | ".join(
                        f"{100 * getattr(by_metric[m], attr):>{cell_w}.2f}" if m in by_metric else f"{'-':>{cell_w}}"
                        for m in VARIANTS
                    ))
                label = name if i == 0 else ""
                lines.append(f"{label:<{name_w}}  {stat:<{stat_w}}| " + " || ".join(cells))
            lines.append("-" * len(lines[1]))
    return "\n".join(lines) + "\n"


ReportFormat = Literal["csv", "json", "table"]


def emit_report(report: EvalReport, format: ReportFormat = "table") -> bytes:
    """Render ``report`` as UTF-8 bytes.

    ``table`` groups wiki and human columns with scores as percentages to two
    decimals; ``csv`` and ``json`` keep full float precision.
    """
    if format == "csv":
        text = _emit_csv(report)
    elif format == "json":
        text = json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"
    elif format == "table":
        text = _emit_table(report)
    else:
        raise ConfigError(f"unknown report format {format!r}")
    return text.encode("utf-8")


def format_stats(stats: CorpusStats, format: Literal["table", "csv"] = "table") -> bytes:
    """Render corpus statistics: the token histogram followed by the means."""
    means = [
        ("articles", stats.article_count),
        ("rejected", stats.rejected_count),
        ("mean_article_tokens", stats.mean_article_tokens),
    ] + [(f"mean_{k}_summary_tokens", v) for k, v in stats.mean_summary_tokens.items()]
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bin", "lower", "upper", "count"])
        for b in stats.bins:
            writer.writerow([b.label, b.lower, "" if b.upper is None else b.upper, b.count])
        writer.writerow([])
        writer.writerow(["statistic", "value"])
        for name, value in means:
            writer.writerow([name, "" if value is None else value])
        return buf.getvalue().encode("utf-8")
    if format != "table":
        raise ConfigError(f"unknown stats format {format!r}")
    lines = [f"{'tokens':>12}  articles"]
    for b in stats.bins:
        lines.append(f"{b.label:>12}  {b.count:>8}")
    lines.append("")
    for name, value in means:
        shown = "n/a" if value is None else (f"{value:.2f}" if isinstance(value, float) else str(value))
        lines.append(f"{name:<28}{shown:>10}")
    return ("\n".join(lines) + "\n").encode("utf-8")
