"""Long-horizon task decomposition and per-instruction object extraction.

The template backend parses clauses of the form

    <verb> [to|toward|towards] [the|a|an] <object phrase> [at <v> m/s]

joined by "then" / "and" / "after that". The same grammar is used by the
dataset generator, so every generated instruction parses here and every
parsed instruction is coverable by the token vocabulary.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .errors import BridgeError, PlanningError
from .lexicon import ClassLexicon, default_lexicon

log = logging.getLogger(__name__)

VERBS = ("go", "move", "run", "walk", "approach", "navigate", "find", "head")
DIRECTION_WORDS = ("to", "toward", "towards")
ARTICLES = ("the", "a", "an")
CONNECTIVES = ("then", "and then", "and", "after that")
POLITE_WORDS = ("please",)
UNIT_WORD = "m/s"

DEFAULT_SPEED = 0.40
MAX_SPEED = 1.0

DEFAULT_SYSTEM_PROMPT = (
    "You are the task planner of a mobile robot. Decompose the user's task "
    "into an ordered list of single-object navigation instructions, each "
    "naming one object class and a forward speed in m/s."
)

# Words the grammar can emit, used to build the token vocabulary.
GRAMMAR_WORDS = tuple(
    sorted(set(VERBS) | set(DIRECTION_WORDS) | set(ARTICLES) | set(POLITE_WORDS)
           | {w for c in CONNECTIVES for w in c.split()} | {UNIT_WORD})
)

_CONNECTIVE_RE = re.compile(
    r",?\s+(?:and\s+then|after\s+that|then|and)\s+", re.IGNORECASE
)
_SPEED_RE = re.compile(r"\s+at\s+([0-9]*\.?[0-9]+)\s*m/s\s*$", re.IGNORECASE)


@dataclass
class LongHorizonTask:
    """A free-form multi-goal task description."""

    text: str
    system_prompt: str = DEFAULT_SYSTEM_PROMPT

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise PlanningError("task text is empty")


@dataclass(frozen=True)
class MissionInstruction:
    """One atomic subtask: sentence, detector class, commanded speed."""

    text: str
    target_class: str
    speed: float

    def __post_init__(self) -> None:
        if not (0.0 < self.speed <= MAX_SPEED):
            raise PlanningError(
                f"speed {self.speed} outside (0, {MAX_SPEED}] m/s in {self.text!r}"
            )


@dataclass(frozen=True)
class PlannerFeedback:
    """Execution feedback driving plan advancement."""

    mission_state: str  # "success" | "running"
    instruction_index: int


def find_object_phrase(text: str, lexicon: ClassLexicon) -> tuple[str, str] | None:
    """Longest lexicon surface form occurring in `text` (word-aligned).

    Returns (matched phrase, canonical class) or None.
    """
    words = text.lower().split()
    best: tuple[str, str] | None = None
    best_len = 0
    for phrase in lexicon.phrases_by_length():
        pw = phrase.split()
        if len(pw) <= best_len:
            break  # phrases are sorted longest first
        for i in range(len(words) - len(pw) + 1):
            if words[i : i + len(pw)] == pw:
                best = (phrase, lexicon.synonyms[phrase])
                best_len = len(pw)
                break
    return best


def parse_clause(clause: str, lexicon: ClassLexicon) -> MissionInstruction:
    """Parse one instruction clause; raises PlanningError naming the clause."""
    text = clause.strip().rstrip(".!")
    if not text:
        raise PlanningError("empty instruction clause")

    speed = DEFAULT_SPEED
    m = _SPEED_RE.search(text)
    body = text
    if m:
        speed = float(m.group(1))
        body = text[: m.start()]

    words = body.lower().split()
    if not words:
        raise PlanningError(f"cannot parse clause: {clause!r}")
    if words[0] in POLITE_WORDS:
        words = words[1:]
    if not words or words[0] not in VERBS:
        raise PlanningError(f"clause does not start with a known verb: {clause!r}")

    match = find_object_phrase(" ".join(words[1:]), lexicon)
    if match is None:
        raise PlanningError(f"no known object class in clause: {clause!r}")
    _, target = match
    if not (0.0 < speed <= MAX_SPEED):
        raise PlanningError(f"speed {speed} out of range in clause: {clause!r}")
    return MissionInstruction(text=text, target_class=target, speed=speed)


def plan_template(task: LongHorizonTask, lexicon: ClassLexicon | None = None
                  ) -> list[MissionInstruction]:
    """Deterministic template planner: split on connectives, parse clauses."""
    lexicon = lexicon or default_lexicon()
    clauses = [c for c in _CONNECTIVE_RE.split(task.text) if c.strip()]
    if not clauses:
        raise PlanningError(f"no instruction clauses in task: {task.text!r}")
    return [parse_clause(c, lexicon) for c in clauses]


def plan(task: LongHorizonTask, backend: str = "template",
         lexicon: ClassLexicon | None = None, bridge=None,
         feedback: PlannerFeedback | None = None) -> list[MissionInstruction]:
    """Decompose a task into ordered mission instructions.

    backend "template" parses locally; "bridge" asks an external planner
    over the line protocol and falls back to the template parser on timeout
    or protocol failure.
    """
    if backend == "template":
        return plan_template(task, lexicon)
    if backend != "bridge":
        raise PlanningError(f"unknown planner backend {backend!r}")
    if bridge is None:
        raise PlanningError("bridge backend requires a bridge client")
    lexicon = lexicon or default_lexicon()
    fb = {"state": feedback.mission_state, "index": feedback.instruction_index} \
        if feedback else {"state": "running", "index": 0}
    try:
        reply = bridge.request(
            {"system": task.system_prompt, "task": task.text, "feedback": fb}
        )
        instructions = [
            MissionInstruction(
                text=item["text"],
                target_class=str(item["object"]),
                speed=float(item["speed"]),
            )
            for item in reply["instructions"]
        ]
        if not instructions:
            raise BridgeError("bridge returned an empty plan")
        for ins in instructions:
            if ins.target_class not in lexicon.class_set:
                raise BridgeError(f"bridge class {ins.target_class!r} not in lexicon")
        return instructions
    except (BridgeError, KeyError, TypeError, ValueError) as exc:
        log.warning("planner bridge failed (%s); falling back to template", exc)
        return plan_template(task, lexicon)


def advance(instructions: list[MissionInstruction], feedback: PlannerFeedback
            ) -> MissionInstruction | None:
    """Next instruction given feedback; None when the plan is complete."""
    idx = feedback.instruction_index
    if not 0 <= idx < len(instructions):
        raise PlanningError(f"feedback index {idx} outside plan of {len(instructions)}")
    if feedback.mission_state != "success":
        return instructions[idx]
    if idx + 1 < len(instructions):
        return instructions[idx + 1]
    return None


def extract_object(text: str, lexicon: ClassLexicon | None = None) -> str:
    """Deterministic synonym-table object extraction (the training oracle)."""
    lexicon = lexicon or default_lexicon()
    match = find_object_phrase(text, lexicon)
    if match is None:
        raise PlanningError(f"no lexicon word occurs in instruction: {text!r}")
    return match[1]


def ioe_extract(text: str, checkpoint=None, lexicon: ClassLexicon | None = None) -> str:
    """Instruction -> detection class.

    With a trained extractor checkpoint, returns its argmax class; otherwise
    falls back to the deterministic synonym lookup.
    """
    if checkpoint is None:
        return extract_object(text, lexicon)
    from .model.infer import classify_instruction  # local import: model depends on us

    return classify_instruction(checkpoint, text)


@dataclass
class Mission:
    """A plan plus a cursor; glue used by the harness run loop."""

    instructions: list[MissionInstruction]
    index: int = 0
    done: bool = False
    history: list[PlannerFeedback] = field(default_factory=list)

    @property
    def current(self) -> MissionInstruction:
        return self.instructions[self.index]

    def report(self, mission_state: str) -> MissionInstruction | None:
        """Feed back the executor's post-step mission state; maybe advance."""
        fb = PlannerFeedback(mission_state=mission_state, instruction_index=self.index)
        self.history.append(fb)
        nxt = advance(self.instructions, fb)
        if nxt is None:
            self.done = True
            return None
        if mission_state == "success":
            self.index += 1
        return nxt
