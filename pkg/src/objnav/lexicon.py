"""Detection class lexicon: canonical classes, synonyms, and size categories.

The default lexicon is the familiar 80-class everyday-object list used by
COCO-style detectors. Every class carries a size category (small / medium /
large) used when deriving success thresholds for classes without explicit
seeds, and a synonym list used by instruction paraphrasing and by the
deterministic object-extraction fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError

SIZE_SMALL = "small"
SIZE_MEDIUM = "medium"
SIZE_LARGE = "large"

# (class name, size category, synonyms). Synonyms are unique across classes;
# the loader enforces that. Each class implicitly lists itself as a synonym.
_DEFAULT_CLASSES: list[tuple[str, str, list[str]]] = [
    ("person", SIZE_MEDIUM, ["human", "pedestrian", "man", "woman", "individual"]),
    ("bicycle", SIZE_MEDIUM, ["bike", "cycle", "pushbike"]),
    ("car", SIZE_LARGE, ["automobile", "auto", "sedan", "hatchback"]),
    ("motorcycle", SIZE_MEDIUM, ["motorbike", "moped", "scooter"]),
    ("airplane", SIZE_LARGE, ["plane", "aircraft", "jet", "airliner"]),
    ("bus", SIZE_LARGE, ["coach", "minibus", "omnibus"]),
    ("train", SIZE_LARGE, ["locomotive", "railcar", "tram"]),
    ("truck", SIZE_LARGE, ["lorry", "pickup", "semi"]),
    ("boat", SIZE_LARGE, ["ship", "vessel", "dinghy", "canoe"]),
    ("traffic light", SIZE_MEDIUM, ["stoplight", "traffic signal", "signal light"]),
    ("fire hydrant", SIZE_MEDIUM, ["hydrant", "fireplug", "water hydrant"]),
    ("stop sign", SIZE_MEDIUM, ["halt sign", "octagonal sign", "stop signal"]),
    ("parking meter", SIZE_MEDIUM, ["meter", "pay station", "coin meter"]),
    ("bench", SIZE_MEDIUM, ["park bench", "garden bench", "bench seat"]),
    ("bird", SIZE_SMALL, ["fowl", "sparrow", "pigeon", "crow"]),
    ("cat", SIZE_SMALL, ["kitten", "feline", "kitty", "tabby"]),
    ("dog", SIZE_MEDIUM, ["puppy", "canine", "hound", "pooch"]),
    ("horse", SIZE_LARGE, ["pony", "stallion", "mare", "steed"]),
    ("sheep", SIZE_MEDIUM, ["lamb", "ewe", "ram"]),
    ("cow", SIZE_LARGE, ["cattle", "bull", "calf", "ox"]),
    ("elephant", SIZE_LARGE, ["pachyderm", "tusker", "jumbo"]),
    ("bear", SIZE_LARGE, ["grizzly", "black bear", "bruin"]),
    ("zebra", SIZE_LARGE, ["plains zebra", "mountain zebra", "striped equine"]),
    ("giraffe", SIZE_LARGE, ["camelopard", "giraffe bull", "giraffe calf"]),
    ("backpack", SIZE_MEDIUM, ["rucksack", "knapsack", "schoolbag", "daypack"]),
    ("umbrella", SIZE_MEDIUM, ["parasol", "brolly", "rain shade"]),
    ("handbag", SIZE_SMALL, ["purse", "clutch", "shoulder bag"]),
    ("tie", SIZE_SMALL, ["necktie", "cravat", "bow tie"]),
    ("suitcase", SIZE_MEDIUM, ["luggage", "valise", "travel case"]),
    ("frisbee", SIZE_SMALL, ["flying disc", "disc toy", "throwing disc"]),
    ("skis", SIZE_MEDIUM, ["ski pair", "snow skis", "ski set"]),
    ("snowboard", SIZE_MEDIUM, ["snow board", "riding board", "freestyle board"]),
    ("sports ball", SIZE_SMALL, ["ball", "game ball", "soccer ball", "basketball"]),
    ("kite", SIZE_MEDIUM, ["flying kite", "box kite", "stunt kite"]),
    ("baseball bat", SIZE_SMALL, ["bat", "slugger", "wooden bat"]),
    ("baseball glove", SIZE_SMALL, ["mitt", "catcher glove", "fielding glove"]),
    ("skateboard", SIZE_SMALL, ["skate deck", "longboard", "roller board"]),
    ("surfboard", SIZE_MEDIUM, ["surf board", "wave board", "shortboard"]),
    ("tennis racket", SIZE_SMALL, ["racket", "racquet", "tennis paddle"]),
    ("bottle", SIZE_SMALL, ["flask", "water bottle", "canteen"]),
    ("wine glass", SIZE_SMALL, ["goblet", "wineglass", "stemware"]),
    ("cup", SIZE_SMALL, ["mug", "teacup", "tumbler"]),
    ("fork", SIZE_SMALL, ["dinner fork", "salad fork", "table fork"]),
    ("knife", SIZE_SMALL, ["blade", "cutter", "table knife"]),
    ("spoon", SIZE_SMALL, ["teaspoon", "tablespoon", "ladle"]),
    ("bowl", SIZE_SMALL, ["dish bowl", "soup bowl", "cereal bowl"]),
    ("banana", SIZE_SMALL, ["plantain", "ripe banana", "banana bunch"]),
    ("apple", SIZE_SMALL, ["red apple", "green apple", "apple fruit"]),
    ("sandwich", SIZE_SMALL, ["sub", "hoagie", "panini", "burger"]),
    ("orange", SIZE_SMALL, ["tangerine", "mandarin", "citrus"]),
    ("broccoli", SIZE_SMALL, ["floret", "broccoli head", "green broccoli"]),
    ("carrot", SIZE_SMALL, ["carrot stick", "baby carrot", "orange root"]),
    ("hot dog", SIZE_SMALL, ["frankfurter", "wiener", "sausage"]),
    ("pizza", SIZE_SMALL, ["pizza pie", "flatbread pizza", "margherita"]),
    ("donut", SIZE_SMALL, ["doughnut", "glazed ring", "cruller"]),
    ("cake", SIZE_SMALL, ["gateau", "sponge cake", "birthday cake"]),
    ("chair", SIZE_MEDIUM, ["seat", "stool", "armchair"]),
    ("couch", SIZE_LARGE, ["sofa", "settee", "loveseat"]),
    ("potted plant", SIZE_MEDIUM, ["houseplant", "planter", "pot plant"]),
    ("bed", SIZE_LARGE, ["mattress", "bunk", "cot"]),
    ("dining table", SIZE_LARGE, ["dinner table", "kitchen table", "table"]),
    ("toilet", SIZE_MEDIUM, ["lavatory", "commode", "wc"]),
    ("tv", SIZE_MEDIUM, ["television", "telly", "flatscreen"]),
    ("laptop", SIZE_SMALL, ["notebook", "notebook computer", "ultrabook"]),
    ("mouse", SIZE_SMALL, ["computer mouse", "wireless mouse", "pointing device"]),
    ("remote", SIZE_SMALL, ["remote control", "clicker", "tv remote"]),
    ("keyboard", SIZE_SMALL, ["keypad", "typing board", "computer keyboard"]),
    ("cell phone", SIZE_SMALL, ["phone", "smartphone", "mobile", "handset"]),
    ("microwave", SIZE_MEDIUM, ["microwave oven", "micro cooker", "radar range"]),
    ("oven", SIZE_MEDIUM, ["stove", "cooker", "baking oven"]),
    ("toaster", SIZE_SMALL, ["bread toaster", "toast maker", "pop-up toaster"]),
    ("sink", SIZE_MEDIUM, ["washbasin", "kitchen sink", "wash stand"]),
    ("refrigerator", SIZE_LARGE, ["fridge", "icebox", "freezer"]),
    ("book", SIZE_SMALL, ["novel", "paperback", "hardcover", "textbook"]),
    ("clock", SIZE_SMALL, ["timepiece", "wall clock", "alarm clock"]),
    ("vase", SIZE_SMALL, ["flower vase", "urn", "ceramic vase"]),
    ("scissors", SIZE_SMALL, ["shears", "clippers", "snips"]),
    ("teddy bear", SIZE_SMALL, ["plush bear", "stuffed bear", "plushie"]),
    ("hair drier", SIZE_SMALL, ["hairdryer", "blow dryer", "hair dryer"]),
    ("toothbrush", SIZE_SMALL, ["tooth brush", "dental brush", "electric toothbrush"]),
]


@dataclass
class ClassLexicon:
    """Ordered set of detector classes plus a synonym -> canonical map."""

    classes: list[str]
    synonyms: dict[str, str]
    size_categories: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen: dict[str, str] = {}
        for syn, canon in self.synonyms.items():
            if canon not in self.class_set:
                raise ConfigError(f"synonym {syn!r} maps to unknown class {canon!r}")
            if syn in seen and seen[syn] != canon:
                raise ConfigError(f"synonym {syn!r} maps to two classes")
            seen[syn] = canon
        for cls in self.classes:
            # canonical classes map to themselves
            self.synonyms.setdefault(cls, cls)
            self.size_categories.setdefault(cls, SIZE_MEDIUM)

    @property
    def class_set(self) -> frozenset[str]:
        return frozenset(self.classes)

    def index_of(self, cls: str) -> int:
        return self.classes.index(cls)

    def canonical(self, phrase: str) -> str | None:
        """Resolve a word or phrase to its canonical class, if known."""
        return self.synonyms.get(phrase)

    def synonyms_of(self, cls: str) -> list[str]:
        """All surface forms of a class, canonical name first."""
        forms = [cls]
        forms += sorted(s for s, c in self.synonyms.items() if c == cls and s != cls)
        return forms

    def phrases_by_length(self) -> list[str]:
        """Every known surface form, longest (in words) first.

        Used for longest-match scanning so that e.g. "giraffe calf" resolves
        before "calf". Cached; adding synonyms goes through a new lexicon.
        """
        cached = self.__dict__.get("_phrases")
        if cached is None or len(cached) != len(self.synonyms):
            cached = sorted(self.synonyms, key=lambda p: (-len(p.split()), p))
            self.__dict__["_phrases"] = cached
        return cached


def default_lexicon() -> ClassLexicon:
    """A fresh copy of the shipped 80-class lexicon with its synonym table."""
    classes = [name for name, _, _ in _DEFAULT_CLASSES]
    synonyms: dict[str, str] = {}
    sizes: dict[str, str] = {}
    for name, size, syns in _DEFAULT_CLASSES:
        sizes[name] = size
        synonyms[name] = name
        for syn in syns:
            if syn in synonyms:
                raise ConfigError(f"shipped synonym {syn!r} duplicated")
            synonyms[syn] = name
    return ClassLexicon(classes=classes, synonyms=synonyms, size_categories=sizes)


_DEFAULT_CLASS_SET = frozenset(name for name, _, _ in _DEFAULT_CLASSES)


def default_class_set() -> frozenset[str]:
    """Shipped class names without building a full lexicon (hot paths)."""
    return _DEFAULT_CLASS_SET
