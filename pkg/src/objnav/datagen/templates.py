"""Instruction paraphrase templates.

Every rendered clause conforms to the planner grammar

    [please] <verb> [to|toward|towards] <the|a> <surface form> at <speed> m/s

so plans parse exactly and the synonym lookup recovers the class. Speeds
render with two decimals, matching the numeric bucket tokens.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..lexicon import ClassLexicon, default_lexicon

MOTION_VERBS = ("go", "move", "run", "walk", "head", "navigate")
DIRECT_VERBS = ("find", "approach")
DIRECTIONS = ("to", "toward", "towards")
ARTICLES = ("the", "a")

SPEED_STEP = 0.05
SPEED_GRID = tuple(round(0.10 + SPEED_STEP * i, 2) for i in range(19))  # 0.10..1.00


def format_speed(speed: float) -> str:
    return f"{speed:.2f}"


@dataclass
class InstructionTemplate:
    """The clause-pattern space instructions are drawn from."""

    motion_verbs: tuple[str, ...] = MOTION_VERBS
    direct_verbs: tuple[str, ...] = DIRECT_VERBS
    directions: tuple[str, ...] = DIRECTIONS
    articles: tuple[str, ...] = ARTICLES
    connectives: tuple[str, ...] = ("then", "and then", "after that")
    speeds: tuple[float, ...] = SPEED_GRID
    lexicon: ClassLexicon = field(default_factory=default_lexicon)

    def surface_forms(self, cls: str) -> list[str]:
        return self.lexicon.synonyms_of(cls)

    def variants(self, cls: str) -> list[str]:
        """Every clause pattern for a class at a fixed speed placeholder.

        Used by tests to enumerate the surface-form space directly.
        """
        out = []
        for polite in ("", "please "):
            for article in self.articles:
                for form in self.surface_forms(cls):
                    for verb in self.direct_verbs:
                        out.append(f"{polite}{verb} {article} {form}")
                    for verb in self.motion_verbs:
                        for d in self.directions:
                            out.append(f"{polite}{verb} {d} {article} {form}")
        return out


def vary_instruction(template: InstructionTemplate, cls: str, speed: float,
                     rng: np.random.Generator) -> str:
    """Render one randomized, grammar-conformant instruction clause."""
    if not any(abs(speed - s) < 1e-9 for s in template.speeds):
        raise ValueError(f"speed {speed} not on the template grid")
    polite = "please " if rng.random() < 0.15 else ""
    article = template.articles[rng.integers(len(template.articles))]
    forms = template.surface_forms(cls)
    form = forms[rng.integers(len(forms))]
    if rng.random() < 0.25:
        verb = template.direct_verbs[rng.integers(len(template.direct_verbs))]
        body = f"{verb} {article} {form}"
    else:
        verb = template.motion_verbs[rng.integers(len(template.motion_verbs))]
        d = template.directions[rng.integers(len(template.directions))]
        body = f"{verb} {d} {article} {form}"
    return f"{polite}{body} at {format_speed(speed)} m/s"


def compose_task(clauses: list[str], rng: np.random.Generator | None = None,
                 template: InstructionTemplate | None = None) -> str:
    """Join instruction clauses into one long-horizon task description."""
    template = template or InstructionTemplate()
    if rng is None:
        joins = [template.connectives[0]] * (len(clauses) - 1)
    else:
        joins = [template.connectives[rng.integers(len(template.connectives))]
                 for _ in clauses[1:]]
    text = clauses[0]
    for join, clause in zip(joins, clauses[1:]):
        text += f" {join} {clause}"
    return text
