"""Ground-truth labels from self-reported occupations.

A user counts as a professional photographer when the unicode-lowercased
occupation contains one of thirteen multilingual photography substrings.
Matching is substring-based on purpose (the terms are stems), which
admits known false positives such as German "Bildhauer" (sculptor); the
per-user matched term is kept so those can be audited.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import UserRecord

PHOTOGRAPHY_TERMS = (
    "fot",
    "phot",
    "valokuv",
    "zdjęcie",      # zdjęcie
    "dealbh",
    "bild",
    "grianghraf",
    "nuotrauk",
    "pictur",
    "myndin",
    "billed",
    "ljósmyndari",  # ljósmyndari
    "ritratt",
)


@dataclass
class LabelVector:
    labels: dict            # user_id -> bool
    matched_terms: dict     # user_id -> term or None
    positive_count: int
    prevalence: float

    def __getitem__(self, user_id: str) -> bool:
        return self.labels[user_id]

    def __len__(self):
        return len(self.labels)


def matched_photography_term(occupation: str):
    """First matching term in list order, or None. Accents are preserved."""
    text = occupation.lower()
    for term in PHOTOGRAPHY_TERMS:
        if term in text:
            return term
    return None


def is_photography_occupation(occupation: str) -> bool:
    return matched_photography_term(occupation) is not None


def label_users(users: list[UserRecord]) -> LabelVector:
    """Label every user; empty occupations are negative."""
    if not users:
        raise ValueError("cannot label an empty user table")
    labels = {}
    matched = {}
    for u in users:
        term = matched_photography_term(u.occupation)
        labels[u.user_id] = term is not None
        matched[u.user_id] = term
    positives = sum(labels.values())
    return LabelVector(
        labels=labels,
        matched_terms=matched,
        positive_count=positives,
        prevalence=positives / len(labels),
    )
