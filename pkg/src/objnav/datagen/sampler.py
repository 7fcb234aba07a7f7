"""Scenario drawing and rule-oracle labeling.

Every sample's targets come from running the executor's step function on the
sample's own input fields, so the corpus is consistent with the state machine
by construction and a full replay reproduces every target exactly. Continuous
fields are quantized to 6 decimals before labeling so the JSON round-trip
cannot perturb a label.

Replay convention: a record encodes the search-direction memory through its
input search state (searching_0 implies the target was last seen on the
right, searching_1 on the left or never), and the sampler only draws states
honoring that convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..executor import (
    ControllerGains,
    ExecState,
    SIDE_LEFT,
    SIDE_RIGHT,
    SEARCHING_0,
    SEARCHING_1,
    MISSION_RUNNING,
    MISSION_SUCCESS,
    ThresholdTable,
    step,
)
from ..lexicon import ClassLexicon, default_lexicon
from ..perception import Detection
from ..planner import MissionInstruction
from .templates import InstructionTemplate, SPEED_GRID, vary_instruction

# half a numeric bucket plus slack: keeps success-threshold comparisons away
# from any rounding boundary the model could alias on
THRESHOLD_MARGIN = 0.006

KIND_RUNNING = "running"
KIND_SEARCHING = "searching"
KIND_SUCCESS = "success"
KIND_NEW_MISSION = "new_mission"

DEFAULT_MIX = (
    (KIND_RUNNING, 0.60),
    (KIND_SEARCHING, 0.25),
    (KIND_SUCCESS, 0.10),
    (KIND_NEW_MISSION, 0.05),
)


def _q(x: float) -> float:
    return round(float(x), 6)


@dataclass
class ScenarioSampler:
    """Seeded scenario generator for one worker shard."""

    rng: np.random.Generator
    lexicon: ClassLexicon = field(default_factory=default_lexicon)
    template: InstructionTemplate | None = None
    thresholds: ThresholdTable = field(default_factory=ThresholdTable.shipped)
    gains: ControllerGains = field(default_factory=ControllerGains)
    mix: tuple[tuple[str, float], ...] = DEFAULT_MIX
    conf_range: tuple[float, float] = (0.25, 0.98)
    cy_range: tuple[float, float] = (0.15, 0.85)
    width_ratio: tuple[float, float] = (0.45, 0.75)
    speeds: tuple[float, ...] = SPEED_GRID

    def __post_init__(self) -> None:
        if self.template is None:
            self.template = InstructionTemplate(lexicon=self.lexicon)
        total = sum(w for _, w in self.mix)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"scenario mix weights sum to {total}, not 1")
        self._kinds = [k for k, _ in self.mix]
        self._weights = np.array([w for _, w in self.mix])

    def _speed(self) -> float:
        return self.speeds[self.rng.integers(len(self.speeds))]

    def _instruction(self, cls: str) -> tuple[str, float]:
        speed = self._speed()
        return vary_instruction(self.template, cls, speed, self.rng), speed

    def _search_state(self) -> str:
        return SEARCHING_1 if self.rng.random() < 0.5 else SEARCHING_0

    def _detection(self, label: str, h: float) -> Detection:
        conf = self.rng.uniform(*self.conf_range)
        cx = self.rng.random()
        cy = self.rng.uniform(*self.cy_range)
        w = min(1.0, h * self.rng.uniform(*self.width_ratio))
        return Detection(
            label=label,
            confidence=_q(conf),
            center=(_q(cx), _q(cy)),
            size=(_q(w), _q(h)),
        )

    def draw(self, cls: str) -> dict:
        """One labeled record for the given target class."""
        kind = self._kinds[self.rng.choice(len(self._kinds), p=self._weights)]
        im1, speed = self._instruction(cls)
        tau = self.thresholds.tau(cls)

        det: Detection | None = None
        sm = MISSION_RUNNING
        ss = self._search_state()

        if kind == KIND_NEW_MISSION:
            im0 = im1
            while im0 == im1:
                other = cls if self.rng.random() < 0.3 else \
                    self.lexicon.classes[self.rng.integers(len(self.lexicon.classes))]
                im0, _ = self._instruction(other)
            sm = MISSION_SUCCESS if self.rng.random() < 0.5 else MISSION_RUNNING
            r = self.rng.random()
            if r < 0.4:
                det = None
            elif r < 0.7:
                det = self._detection(cls, _q(self.rng.uniform(0.03, tau - THRESHOLD_MARGIN)))
            else:
                stale = self.lexicon.classes[self.rng.integers(len(self.lexicon.classes))]
                det = self._detection(stale, _q(self.rng.uniform(0.03, 0.9)))
        else:
            im0 = im1
            if kind == KIND_RUNNING:
                h = _q(self.rng.uniform(0.03, tau - THRESHOLD_MARGIN))
                det = self._detection(cls, h)
            elif kind == KIND_SEARCHING:
                if self.rng.random() < 0.2:
                    # wrong-class detection: unusable, same as absent
                    other = cls
                    while other == cls:
                        other = self.lexicon.classes[
                            self.rng.integers(len(self.lexicon.classes))]
                    det = self._detection(other, _q(self.rng.uniform(0.03, 0.9)))
                else:
                    det = None
            else:  # success: fresh trigger or absorbed continuation
                if self.rng.random() < 0.5:
                    h = _q(self.rng.uniform(tau + THRESHOLD_MARGIN, 0.99))
                    det = self._detection(cls, h)
                else:
                    sm = MISSION_SUCCESS
                    if self.rng.random() < 0.5:
                        det = self._detection(cls, _q(self.rng.uniform(0.03, 0.99)))

        record = {
            "im0": im0,
            "im1": im1,
            "obj": det.label if det is not None else "",
            "conf": det.confidence if det is not None else 0.0,
            "cx": det.x if det is not None else 0.0,
            "cy": det.y if det is not None else 0.0,
            "w": det.width if det is not None else 0.0,
            "h": det.height if det is not None else 0.0,
            "sm": sm,
            "ss": ss,
        }
        record["target"] = oracle_label(record, cls, speed, self.thresholds,
                                        self.gains, self.lexicon)
        return record


def exec_state_from_record(record: dict) -> ExecState:
    """Reconstruct the pre-step executor state a record encodes."""
    side = SIDE_RIGHT if record["ss"] == SEARCHING_0 else SIDE_LEFT
    return ExecState(
        mission_state=record["sm"],
        search_state=record["ss"],
        prev_instruction=record["im0"],
        last_seen_side=side,
    )


def detection_from_record(record: dict) -> Detection | None:
    if not record["obj"]:
        return None
    return Detection(
        label=record["obj"],
        confidence=record["conf"],
        center=(record["cx"], record["cy"]),
        size=(record["w"], record["h"]),
    )


def oracle_label(record: dict, cls: str, speed: float,
                 thresholds: ThresholdTable, gains: ControllerGains,
                 lexicon: ClassLexicon) -> dict:
    """Targets produced by the execution rules for a record's inputs."""
    instr = MissionInstruction(text=record["im1"], target_class=cls, speed=speed)
    cmd, post, _ = step(
        exec_state_from_record(record), instr, detection_from_record(record),
        thresholds, gains, lexicon)
    return {
        "v": [_q(cmd.v_x), _q(cmd.v_y), _q(cmd.theta)],
        "sm": post.mission_state,
        "ss": post.search_state,
    }


_REPLAY_DEFAULTS: dict = {}


def replay_targets(record: dict, thresholds: ThresholdTable | None = None,
                   gains: ControllerGains | None = None,
                   lexicon: ClassLexicon | None = None) -> dict:
    """Recompute a parsed record's targets from its input fields alone.

    Used by the oracle-consistency replay: the instruction is re-parsed from
    the record's text through the planner grammar. Parses are memoized since
    corpora repeat sentences heavily.
    """
    from ..planner import parse_clause

    if lexicon is None or thresholds is None or gains is None:
        if not _REPLAY_DEFAULTS:
            _REPLAY_DEFAULTS.update(
                lexicon=default_lexicon(),
                thresholds=ThresholdTable.shipped(),
                gains=ControllerGains(),
                parses={},
            )
        lexicon = lexicon or _REPLAY_DEFAULTS["lexicon"]
        thresholds = thresholds or _REPLAY_DEFAULTS["thresholds"]
        gains = gains or _REPLAY_DEFAULTS["gains"]
        parses = _REPLAY_DEFAULTS["parses"]
    else:
        parses = None

    text = record["im1"]
    instr = parses.get(text) if parses is not None else None
    if instr is None:
        instr = parse_clause(text, lexicon)
        if parses is not None:
            parses[text] = instr
    return oracle_label(record, instr.target_class, instr.speed,
                        thresholds, gains, lexicon)
