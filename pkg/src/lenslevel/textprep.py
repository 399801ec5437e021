"""Comment normalization: lowercase, emoji naming, link removal, tokenizing.

The pipeline order is fixed: lowercase -> emoji to short names -> delete
hyperlinks -> non-alphanumeric to spaces -> collapse whitespace -> drop
empty or stopword-only results. Accented letters survive (no
transliteration); the occupation matcher downstream relies on them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dataset import CommentRecord

_URL_RE = re.compile(r"(?:\w+://\S+|www\.\S+)")


@dataclass(frozen=True)
class CleanComment:
    comment_id: str
    tokens: tuple
    char_text: str
    original_length: int


@dataclass(frozen=True)
class Dropped:
    comment_id: str
    reason: str


def _bundled(name: str):
    return resources.files("lenslevel").joinpath("data", name)


def load_stopwords(path=None) -> frozenset:
    """One lowercase word per line; blank lines and # comments ignored."""
    src = Path(path) if path else _bundled("stopwords.txt")
    words = set()
    for line in src.read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)


def load_emoji_map(path=None) -> dict:
    """Codepoint-sequence -> short name, from a TSV of hex codepoints TAB name.

    Sequences are registered both verbatim and with variation selectors
    (U+FE0F) stripped, so bare and emoji-presentation forms both match.
    """
    src = Path(path) if path else _bundled("emoji_names.tsv")
    table = {}
    for line in src.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        codes, _, name = line.partition("\t")
        seq = "".join(chr(int(c, 16)) for c in codes.split())
        name = name.strip()
        table[seq] = name
        bare = seq.replace("️", "")
        if bare and bare != seq:
            table.setdefault(bare, name)
    return table


def _replace_emoji(text: str, emoji_map: dict) -> str:
    if not emoji_map:
        return text
    max_len = max(len(k) for k in emoji_map)
    out = []
    i = 0
    while i < len(text):
        matched = False
        for length in range(min(max_len, len(text) - i), 0, -1):
            name = emoji_map.get(text[i : i + length])
            if name is not None:
                out.append(f" {name} ")
                i += length
                matched = True
                break
        if not matched:
            out.append(text[i])
            i += 1
    return "".join(out)


def normalize_comment(raw: CommentRecord, stopwords: frozenset, emoji_map: dict):
    """Apply the six-step normalization; returns CleanComment or Dropped."""
    text = raw.raw_text.lower()
    text = _replace_emoji(text, emoji_map)
    text = _URL_RE.sub(" ", text)
    text = "".join(ch if ch.isalnum() else " " for ch in text)
    tokens = text.split()
    if not tokens:
        return Dropped(raw.comment_id, "empty")
    if all(t in stopwords for t in tokens):
        return Dropped(raw.comment_id, "stopwords-only")
    return CleanComment(
        comment_id=raw.comment_id,
        tokens=tuple(tokens),
        char_text=" ".join(tokens),
        original_length=len(raw.raw_text),
    )


def normalize_comments(comments, stopwords, emoji_map):
    """Normalize a batch; returns (clean list, dropped list) in input order."""
    clean, dropped = [], []
    for c in comments:
        result = normalize_comment(c, stopwords, emoji_map)
        if isinstance(result, CleanComment):
            clean.append(result)
        else:
            dropped.append(result)
    return clean, dropped
