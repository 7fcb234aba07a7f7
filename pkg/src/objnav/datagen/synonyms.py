"""Synonym table management and optional bridge-backed expansion."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..lexicon import ClassLexicon

log = logging.getLogger(__name__)

SYNONYM_PROMPT = (
    "Suggest additional everyday synonyms for the given object class. Reply "
    "with one instruction item per synonym whose text field is the synonym."
)


@dataclass
class SynonymTable:
    """Canonical class -> surface forms (the class itself always included)."""

    entries: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        owner: dict[str, str] = {}
        for cls, forms in self.entries.items():
            if cls not in forms:
                forms.insert(0, cls)
            for form in forms:
                if form in owner and owner[form] != cls:
                    raise ConfigError(
                        f"synonym {form!r} owned by both {owner[form]!r} and {cls!r}"
                    )
                owner[form] = cls

    def owner_of(self, form: str) -> str | None:
        for cls, forms in self.entries.items():
            if form in forms:
                return cls
        return None

    def add(self, cls: str, form: str) -> bool:
        """Add a synonym; duplicates are no-ops and collisions are rejected
        (first writer wins)."""
        current = self.owner_of(form)
        if current == cls:
            return False
        if current is not None:
            log.warning("synonym %r already maps to %r; rejecting %r",
                        form, current, cls)
            return False
        self.entries.setdefault(cls, [cls]).append(form)
        return True

    @classmethod
    def from_lexicon(cls, lexicon: ClassLexicon) -> "SynonymTable":
        entries: dict[str, list[str]] = {c: [c] for c in lexicon.classes}
        for form, canon in lexicon.synonyms.items():
            if form != canon:
                entries[canon].append(form)
        return cls(entries=entries)

    def to_lexicon(self, lexicon: ClassLexicon) -> ClassLexicon:
        synonyms = {}
        for canon, forms in self.entries.items():
            for form in forms:
                synonyms[form] = canon
        return ClassLexicon(
            classes=list(lexicon.classes),
            synonyms=synonyms,
            size_categories=dict(lexicon.size_categories),
        )


def expand_synonyms(lexicon: ClassLexicon, backend: str = "static",
                    bridge=None) -> SynonymTable:
    """Build the synonym table.

    "static" loads the shipped table; "bridge" additionally asks an external
    generator for more surface forms per class, deduplicating against the
    table and rejecting cross-class collisions.
    """
    if not lexicon.classes:
        raise ConfigError("lexicon is empty")
    table = SynonymTable.from_lexicon(lexicon)
    if backend == "static":
        return table
    if backend != "bridge":
        raise ConfigError(f"unknown synonym backend {backend!r}")
    if bridge is None:
        raise ConfigError("bridge backend requires a bridge client")
    for cls in lexicon.classes:
        reply = bridge.request({
            "system": SYNONYM_PROMPT,
            "task": f"synonyms: {cls}",
            "feedback": {"state": "running", "index": 0},
        })
        for item in reply.get("instructions", []):
            form = str(item.get("text", "")).strip().lower()
            if form:
                table.add(cls, form)
    return table
