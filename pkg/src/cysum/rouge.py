"""ROUGE-1, ROUGE-2, ROUGE-L and ROUGE-SU4 over token lists.

All scores use clipped overlap counts, treat a zero denominator as a zero
ratio, and combine precision and recall with the F-beta formula in
:func:`f_measure`.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Literal, NamedTuple, Sequence

Variant = Literal["rouge1", "rouge2", "rougeL", "rougeSU4"]
VARIANTS: tuple[str, ...] = ("rouge1", "rouge2", "rougeL", "rougeSU4")
SU4_GAP = 4


class RougeScore(NamedTuple):
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class RougeConfig:
    variant: Variant = "rouge1"
    beta: float = 1.0
    cap: int | None = None

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown ROUGE variant {self.variant!r}")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        _check_cap(self.cap)


def _check_cap(cap: int | None) -> None:
    if cap is not None and cap < 1:
        raise ValueError(f"cap must be a positive integer or None, got {cap!r}")


def truncate(tokens: Sequence[str], cap: int | None) -> list[str]:
    """The first ``cap`` tokens; ``None`` keeps everything."""
    _check_cap(cap)
    return list(tokens) if cap is None else list(tokens[:cap])


def f_measure(precision: float, recall: float, beta: float = 1.0) -> float:
    """``(1 + b^2) * P * R / (R + b^2 * P)``, or 0 when the denominator is 0."""
    b2 = beta * beta
    denom = recall + b2 * precision
    if denom == 0:
        return 0.0
    return (1 + b2) * recall * precision / denom


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def score_counts(sys_units: Counter, ref_units: Counter, beta: float = 1.0) -> RougeScore:
    overlap = sum((sys_units & ref_units).values())
    p = _ratio(overlap, sum(sys_units.values()))
    r = _ratio(overlap, sum(ref_units.values()))
    return RougeScore(p, r, f_measure(p, r, beta))


def ngram_counts(tokens: Sequence[Hashable], n: int) -> Counter[tuple]:
    if n < 1:
        raise ValueError("n must be at least 1")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(sys: Sequence[str], ref: Sequence[str], n: int = 1, beta: float = 1.0) -> RougeScore:
    return score_counts(ngram_counts(sys, n), ngram_counts(ref, n), beta)


def lcs_length(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Length of the longest common subsequence.

    Bit-parallel row update (Hyyrö 2004): bit ``j`` of ``v`` is cleared once
    ``b[j]`` has been matched, so the answer is the count of cleared bits.
    Runs in ``O(len(a) * len(b) / wordsize)``.
    """
    if not a or not b:
        return 0
    masks: dict[Hashable, int] = {}
    for j, tok in enumerate(b):
        masks[tok] = masks.get(tok, 0) | (1 << j)
    full = (1 << len(b)) - 1
    v = full
    for tok in a:
        m = masks.get(tok)
        if m is None:
            continue
        u = v & m
        v = ((v + u) | (v - u)) & full
    return len(b) - v.bit_count()


def rouge_l(sys: Sequence[str], ref: Sequence[str], beta: float = 1.0) -> RougeScore:
    lcs = lcs_length(sys, ref)
    p = _ratio(lcs, len(sys))
    r = _ratio(lcs, len(ref))
    return RougeScore(p, r, f_measure(p, r, beta))


def skip_bigram_counts(tokens: Sequence[Hashable], max_gap: int = SU4_GAP) -> Counter[tuple]:
    """Ordered pairs with at most ``max_gap`` tokens between them."""
    if max_gap < 0:
        raise ValueError("max_gap must be non-negative")
    counts: Counter[tuple] = Counter()
    for distance in range(1, max_gap + 2):
        counts.update(zip(tokens, tokens[distance:]))
    return counts


def su4_units(tokens: Sequence[Hashable]) -> Counter[tuple]:
    # unigram keys are 1-tuples, so they never collide with pairs
    units = skip_bigram_counts(tokens, SU4_GAP)
    units.update(ngram_counts(tokens, 1))
    return units


def rouge_su4(sys: Sequence[str], ref: Sequence[str], beta: float = 1.0) -> RougeScore:
    return score_counts(su4_units(sys), su4_units(ref), beta)


def rouge(sys: Sequence[str], ref: Sequence[str], config: RougeConfig = RougeConfig()) -> RougeScore:
    """Score one system/reference pair, truncating both sides to ``config.cap``."""
    sys = truncate(sys, config.cap)
    ref = truncate(ref, config.cap)
    v = config.variant
    if v == "rouge1":
        return rouge_n(sys, ref, 1, config.beta)
    if v == "rouge2":
        return rouge_n(sys, ref, 2, config.beta)
    if v == "rougeL":
        return rouge_l(sys, ref, config.beta)
    return rouge_su4(sys, ref, config.beta)
