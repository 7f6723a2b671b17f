"""Tokenization and sentence segmentation for Welsh text.

Everything here is a pure function of its input, so results are stable
across runs and platforms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "Token",
    "Sentence",
    "TokenizerConfig",
    "DEFAULT_CONFIG",
    "SURFACE_CONFIG",
    "tokenize",
    "split_sentences",
    "count_tokens",
    "words",
    "join_words",
]


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    normalized: str

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("token surface must be non-empty")


@dataclass(frozen=True, slots=True)
class Sentence:
    index: int
    text: str
    tokens: tuple[Token, ...]
    start: int
    end: int

    @property
    def words(self) -> tuple[str, ...]:
        """Normalized token strings, the unit used by ROUGE and TFIDF."""
        return tuple(t.normalized for t in self.tokens)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    stopwords: frozenset[str] = field(default_factory=frozenset)


DEFAULT_CONFIG = TokenizerConfig()
SURFACE_CONFIG = TokenizerConfig(lowercase=False, strip_punctuation=False)

# Letters and digits, allowing decomposed diacritics (e.g. "w" + U+0302).
_WORD = r"[^\W_](?:[^\W_]|[\u0300-\u036f])*"
# Apostrophe-led clitics glued to the preceding word: mae'r, i'w, a'ch.
_CLITIC = r"(?<=[^\W_]|[\u0300-\u036f])['’](?i:ch|[rniuwm])(?![^\W_])"
_PUNCT = r"[^\w\s]|_"

_TOKEN_RE = re.compile(f"(?P<clitic>{_CLITIC})|(?P<word>{_WORD})|(?P<punct>{_PUNCT})")


def tokenize(text: str, config: TokenizerConfig = DEFAULT_CONFIG) -> list[Token]:
    """Split ``text`` into word, clitic and (optionally) punctuation tokens.

    >>> [t.normalized for t in tokenize("Mae'r gath")]
    ['mae', "'r", 'gath']
    """
    out: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        if m.lastgroup == "punct" and config.strip_punctuation:
            continue
        surface = m.group()
        normalized = surface.lower() if config.lowercase else surface
        if normalized in config.stopwords:
            continue
        out.append(Token(surface, normalized))
    return out


def words(text: str, config: TokenizerConfig = DEFAULT_CONFIG) -> list[str]:
    """Normalized token strings for ``text``."""
    return [t.normalized for t in tokenize(text, config)]


# Compared case-insensitively, without the trailing period.
ABBREVIATIONS = frozenset(
    {
        "dr", "mr", "mrs", "ms", "prof", "parch", "st", "syr",
        "e.e", "h.y", "a.y.b", "cyf", "gol", "tt", "rhif", "vs", "no",
    }
)

_TERMINAL_RE = re.compile(r"[.?!]+[\"'”’»)\]]*(?=\s)")
_PARAGRAPH_RE = re.compile(r"\n[^\S\n]*\n\s*")
_OPENERS = "\"'“‘«([-\u2013\u2014 \t\r\n\f\v"


def _is_abbreviation(text: str, period_pos: int) -> bool:
    i = period_pos
    while i > 0 and not text[i - 1].isspace():
        i -= 1
    word = text[i:period_pos].lstrip("\"'“‘([")
    if not word:
        return False
    if len(word) == 1 and word.isalpha():
        return True  # an initial such as "J."
    if "." in word:
        return True  # dotted forms: e.e., U.D.A.
    return word.lower() in ABBREVIATIONS


def _next_starts_sentence(text: str, pos: int) -> bool:
    n = len(text)
    while pos < n and text[pos] in _OPENERS:
        pos += 1
    if pos >= n:
        return False
    ch = text[pos]
    return ch.isupper() or ch.isdigit()


def _boundaries(text: str) -> list[int]:
    cuts = {m.start() for m in _PARAGRAPH_RE.finditer(text)}
    for m in _TERMINAL_RE.finditer(text):
        punct = m.group()
        if not _next_starts_sentence(text, m.end()):
            continue
        if punct.rstrip("\"'”’»)]") == "." and _is_abbreviation(text, m.start()):
            continue
        cuts.add(m.end())
    return sorted(cuts)


def split_sentences(text: str, config: TokenizerConfig = DEFAULT_CONFIG) -> list[Sentence]:
    """Rule-based sentence segmentation with character offsets.

    A boundary falls after ``.``, ``?`` or ``!`` when the next non-space
    character is uppercase or a digit, or at a blank line. Periods after
    known abbreviations and single-letter initials never split. Spans
    without any word token are dropped.
    """
    sentences: list[Sentence] = []
    prev = 0
    for cut in [*_boundaries(text), len(text)]:
        chunk = text[prev:cut]
        stripped = chunk.strip()
        if stripped:
            start = prev + (len(chunk) - len(chunk.lstrip()))
            end = start + len(stripped)
            tokens = tuple(tokenize(stripped, config))
            if tokens:
                sentences.append(Sentence(len(sentences), stripped, tokens, start, end))
        prev = cut
    return sentences


def count_tokens(sentences: Iterable[Sentence]) -> int:
    return sum(len(s.tokens) for s in sentences)


def join_words(sentences: Sequence[Sentence]) -> list[str]:
    """Concatenate the normalized tokens of ``sentences`` in order."""
    return [w for s in sentences for w in s.words]
