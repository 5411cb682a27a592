"""Text normalization and edit-distance helpers.

One normalization pipeline serves both the lexical-grounding metric and the
similarity vectorizer: lowercase, strip punctuation, split snake_case and
camelCase. "SortedList" and "sorted_list" both normalize to
["sorted", "list"].
"""

from __future__ import annotations

import re

_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


def normalize_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    for word in _WORD_RE.findall(text):
        for part in word.split("_"):
            for piece in _CAMEL_RE.findall(part):
                tokens.append(piece.lower())
    return tokens


def normalize_join(text: str) -> str:
    return " ".join(normalize_tokens(text))


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance; both inputs are short normalized strings."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            cost = 0 if ch_a == ch_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[len(b)]


def similarity_ratio(a: str, b: str) -> float:
    """1 - editDistance / maxLen; 1.0 when both strings are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest
