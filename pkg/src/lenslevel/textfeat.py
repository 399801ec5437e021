"""Per-comment measures: sentiment, readability, entropy, and length.

Sentiment comes from a bundled lexicon (word -> polarity, subjectivity);
difficult-word counting uses a vowel-group syllable heuristic against a
bundled easy-word list; entropy is character-level Shannon entropy of the
normalized text. Absolute sentiment values depend on the bundled lexicon
version, so they are reproducible but not comparable across lexicons.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .dataset import CommentRecord
from .textprep import CleanComment, _bundled

READING_SECONDS_PER_CHAR = 0.01469

_VOWELS = set("aeiouy")


@dataclass(frozen=True)
class CommentFeatures:
    comment_id: str
    polarity: float
    subjectivity: float
    difficult_words: int
    reading_time_s: float
    entropy_bits: float
    length_chars: int


class SentimentLexicon:
    """Case-insensitive word -> (polarity, subjectivity) lookup."""

    def __init__(self, entries: dict):
        self.entries = {}
        for word, (pol, subj) in entries.items():
            if not (-1.0 <= pol <= 1.0):
                raise ValueError(f"polarity out of range for {word!r}: {pol}")
            if not (0.0 <= subj <= 1.0):
                raise ValueError(f"subjectivity out of range for {word!r}: {subj}")
            self.entries[word.lower()] = (float(pol), float(subj))

    def get(self, token: str):
        return self.entries.get(token.lower())

    def __len__(self):
        return len(self.entries)


def load_sentiment_lexicon(path=None) -> SentimentLexicon:
    src = Path(path) if path else _bundled("sentiment_lexicon.tsv")
    entries = {}
    for line in src.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, pol, subj = line.split("\t")
        entries[word] = (float(pol), float(subj))
    return SentimentLexicon(entries)


def load_easy_words(path=None) -> frozenset:
    src = Path(path) if path else _bundled("easy_words.txt")
    words = set()
    for line in src.read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def sentiment(c: CleanComment, lex: SentimentLexicon) -> tuple[float, float]:
    """Mean polarity/subjectivity over lexicon hits; (0, 0) with no hits."""
    hits = [lex.get(t) for t in c.tokens]
    hits = [h for h in hits if h is not None]
    if not hits:
        return 0.0, 0.0
    pol = sum(h[0] for h in hits) / len(hits)
    subj = sum(h[1] for h in hits) / len(hits)
    return pol, subj


def count_syllables(token: str) -> int:
    """Vowel-group heuristic: maximal aeiouy runs, silent trailing 'e' dropped."""
    groups = 0
    prev_vowel = False
    for ch in token:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if token.endswith("e") and groups > 1:
        groups -= 1
    return max(groups, 1)


def difficult_words(c: CleanComment, easy_words: frozenset) -> int:
    """Distinct tokens with >= 3 syllables that are not on the easy list."""
    return sum(
        1
        for t in set(c.tokens)
        if t not in easy_words and count_syllables(t) >= 3
    )


def reading_time(c: CleanComment, seconds_per_char: float = READING_SECONDS_PER_CHAR) -> float:
    return len(c.char_text) * seconds_per_char


def entropy(c: CleanComment) -> float:
    """Shannon entropy (base 2) of the character distribution of char_text."""
    if not c.char_text:
        raise ValueError("entropy undefined for empty text")
    counts = Counter(c.char_text)
    n = len(c.char_text)
    return -sum((k / n) * math.log2(k / n) for k in counts.values())


def comment_length(raw: CommentRecord) -> int:
    """Codepoint count of the raw (pre-normalization) text."""
    return len(raw.raw_text)


def compute_features(
    clean: CleanComment,
    lex: SentimentLexicon,
    easy_words: frozenset,
    seconds_per_char: float = READING_SECONDS_PER_CHAR,
) -> CommentFeatures:
    """All six measures for one retained comment.

    The raw-text character count is carried in on CleanComment, so the
    original record is not needed here.
    """
    pol, subj = sentiment(clean, lex)
    return CommentFeatures(
        comment_id=clean.comment_id,
        polarity=pol,
        subjectivity=subj,
        difficult_words=difficult_words(clean, easy_words),
        reading_time_s=reading_time(clean, seconds_per_char),
        entropy_bits=entropy(clean),
        length_chars=clean.original_length,
    )
