"""Success-threshold derivation for unseeded object classes."""

from __future__ import annotations

from ..errors import DataError
from ..executor import ThresholdTable
from ..lexicon import SIZE_LARGE, SIZE_MEDIUM, SIZE_SMALL, ClassLexicon, \
    default_lexicon

# relative apparent-size factor per category: bigger objects fill the frame
# earlier, so they succeed at larger normalized heights
_CATEGORY_FACTOR = {SIZE_SMALL: 0.8, SIZE_MEDIUM: 1.0, SIZE_LARGE: 1.2}
_CATEGORY_ORDER = (SIZE_SMALL, SIZE_MEDIUM, SIZE_LARGE)


def generate_thresholds(seed_examples: dict[str, float],
                        lexicon: ClassLexicon | None = None) -> ThresholdTable:
    """Extend seed thresholds to every lexicon class.

    Seeded classes keep their values. An unseeded class copies the mean seed
    of its own size category, or scales the nearest category's mean by the
    category factor ratio. Outputs are clamped inside (0, 1).
    """
    if not seed_examples:
        raise DataError("at least one seed threshold is required")
    lexicon = lexicon or default_lexicon()
    for cls, tau in seed_examples.items():
        if cls not in lexicon.class_set:
            raise DataError(f"seed class {cls!r} not in lexicon")
        if not 0.0 < tau < 1.0:
            raise DataError(f"seed threshold for {cls!r} outside (0,1): {tau}")

    by_category: dict[str, list[float]] = {}
    for cls, tau in seed_examples.items():
        by_category.setdefault(lexicon.size_categories[cls], []).append(tau)
    cat_mean = {cat: sum(v) / len(v) for cat, v in by_category.items()}

    out: dict[str, float] = {}
    for cls in lexicon.classes:
        if cls in seed_examples:
            out[cls] = seed_examples[cls]
            continue
        cat = lexicon.size_categories[cls]
        if cat in cat_mean:
            out[cls] = _clamp(cat_mean[cat])
            continue
        nearest = min(
            cat_mean,
            key=lambda c: abs(_CATEGORY_ORDER.index(c) - _CATEGORY_ORDER.index(cat)),
        )
        scale = _CATEGORY_FACTOR[cat] / _CATEGORY_FACTOR[nearest]
        out[cls] = _clamp(cat_mean[nearest] * scale)
    return ThresholdTable(thresholds=out)


def _clamp(tau: float) -> float:
    return min(0.95, max(0.05, tau))
