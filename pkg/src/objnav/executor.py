"""Functional execution logic: state machine, heading control, policies.

State -> motion mapping:

    success      [0, 0, 0]
    running      [v*, 0, theta_corr]
    searching_0  [0, 0, -0.3]   (rotate clockwise / toward the right)
    searching_1  [0, 0, +0.3]   (rotate counterclockwise / toward the left)

Sign conventions: image x grows rightward, so x_n < 0.5 means the target sits
in the left half of the view; positive angular velocity turns the robot
toward the left half (theta_corr = k_p * (0.5 - x_n) steers toward the
target). A target lost on the left is therefore re-acquired with the positive
rotation (searching_1) and one lost on the right with the negative rotation
(searching_0); with no sighting yet the tie-break is searching_1, which is
also the only state three-state mode uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .lexicon import ClassLexicon, default_class_set, default_lexicon
from .perception import Detection, DetectionSmoother
from .planner import MissionInstruction, PlannerFeedback

MISSION_SUCCESS = "success"
MISSION_RUNNING = "running"
SEARCHING_0 = "searching_0"
SEARCHING_1 = "searching_1"

SIDE_LEFT = "left"
SIDE_RIGHT = "right"
SIDE_UNKNOWN = "unknown"

SEARCH_RATE = 0.3   # rad/s rotation in either searching state
CONTROL_DT = 1.0 / 15.0  # control loop matched to a ~15 Hz camera


@dataclass
class ControllerGains:
    k_p: float = 1.0        # rad/s per unit of normalized image offset
    theta_max: float = 0.6  # heading-correction clamp, rad/s
    omega_search: float = SEARCH_RATE

    def __post_init__(self) -> None:
        if min(self.k_p, self.theta_max, self.omega_search) <= 0:
            raise ConfigError("controller gains must be positive")


@dataclass
class ThresholdTable:
    """Per-class success thresholds on normalized box height."""

    thresholds: dict[str, float] = field(default_factory=dict)
    default: float = 0.55

    def __post_init__(self) -> None:
        for cls, tau in self.thresholds.items():
            if not 0.0 < tau < 1.0:
                raise ConfigError(f"threshold for {cls!r} outside (0,1): {tau}")
        if not 0.0 < self.default < 1.0:
            raise ConfigError(f"default threshold outside (0,1): {self.default}")

    def tau(self, cls: str) -> float:
        return self.thresholds.get(cls, self.default)

    @classmethod
    def shipped(cls) -> "ThresholdTable":
        return cls(thresholds={
            "person": 0.60,
            "chair": 0.50,
            "backpack": 0.45,
            "car": 0.65,
            "sports ball": 0.40,
        })


@dataclass(frozen=True)
class MotionCommand:
    """[v_x, v_y, theta] velocity command; v_y is structurally zero."""

    v_x: float
    v_y: float
    theta: float

    def __post_init__(self) -> None:
        if self.v_y != 0.0:
            raise ConfigError("lateral velocity must be zero")
        if self.v_x < 0.0:
            raise ConfigError("forward velocity must be nonnegative")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.v_x, self.v_y, self.theta)


STOP = MotionCommand(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ExecState:
    """Mission/search state plus the memory the execution rules need."""

    mission_state: str = MISSION_RUNNING
    search_state: str = SEARCHING_1
    active: str = "mission"          # which state family governs the output
    prev_instruction: str = ""
    last_seen_side: str = SIDE_UNKNOWN
    states_mode: str = "four"        # "three" drops searching_0
    invalid_labels: int = 0          # detections outside the lexicon, ignored

    @property
    def searching(self) -> bool:
        return self.active == "search"


def heading_correction(x_n: float, gains: ControllerGains | None = None) -> float:
    """Proportional heading correction, clamped to +-theta_max."""
    gains = gains or ControllerGains()
    raw = gains.k_p * (0.5 - x_n)
    return max(-gains.theta_max, min(gains.theta_max, raw))


def resolve_command(state: str, commanded_speed: float = 0.0,
                    theta_corr: float = 0.0) -> MotionCommand:
    """State -> motion vector."""
    if state == MISSION_SUCCESS:
        return STOP
    if state == MISSION_RUNNING:
        return MotionCommand(commanded_speed, 0.0, theta_corr)
    if state == SEARCHING_0:
        return MotionCommand(0.0, 0.0, -SEARCH_RATE)
    if state == SEARCHING_1:
        return MotionCommand(0.0, 0.0, SEARCH_RATE)
    raise ConfigError(f"unknown state {state!r}")


def search_state_for_side(side: str, states_mode: str) -> str:
    """Which searching state re-acquires a target lost on `side`.

    Left means x_n < 0.5; the positive rotation (searching_1) turns toward
    the left half of the image, matching the heading-correction sign. Unknown
    side falls back to searching_1, and three-state mode always uses it.
    """
    if states_mode == "three":
        return SEARCHING_1
    if side == SIDE_RIGHT:
        return SEARCHING_0
    return SEARCHING_1


def step(state: ExecState, instr: MissionInstruction, det: Detection | None,
         thresholds: ThresholdTable | None = None,
         gains: ControllerGains | None = None,
         lexicon: ClassLexicon | None = None,
         ) -> tuple[MotionCommand, ExecState, PlannerFeedback]:
    """One control tick. Pure: returns a fresh state, never mutates.

    Rule priority: new instruction resets to running; an established success
    is absorbing; a qualifying detection completes the mission; a visible
    sub-threshold target is pursued; a lost target triggers the side-aware
    search; otherwise the current state holds.
    """
    thresholds = thresholds or ThresholdTable.shipped()
    gains = gains or ControllerGains()

    invalid = state.invalid_labels
    if det is not None:
        known = lexicon.class_set if lexicon is not None else default_class_set()
        if det.label not in known:
            invalid += 1
            det = None
        elif det.label != instr.target_class:
            # wrong class: unusable for this mission, treated as absent
            det = None

    # Rule: execute new mission
    if instr.text != state.prev_instruction:
        theta = heading_correction(det.x, gains) if det is not None else 0.0
        new = ExecState(
            mission_state=MISSION_RUNNING,
            search_state=SEARCHING_1,
            active="mission",
            prev_instruction=instr.text,
            last_seen_side=SIDE_UNKNOWN,
            states_mode=state.states_mode,
            invalid_labels=invalid,
        )
        if det is not None:
            new = replace(new, last_seen_side=_side_of(det.x))
        return resolve_command(MISSION_RUNNING, instr.speed, theta), new, _fb(new)

    # Rule: accomplish the mission (and success stays absorbing afterwards)
    if state.mission_state == MISSION_SUCCESS:
        new = replace(state, active="mission", invalid_labels=invalid)
        return STOP, new, _fb(new)
    if det is not None and det.height >= thresholds.tau(instr.target_class):
        new = replace(
            state,
            mission_state=MISSION_SUCCESS,
            active="mission",
            last_seen_side=_side_of(det.x),
            invalid_labels=invalid,
        )
        return STOP, new, _fb(new)

    # Rule: run to the object
    if det is not None:
        new = replace(
            state,
            mission_state=MISSION_RUNNING,
            active="mission",
            last_seen_side=_side_of(det.x),
            invalid_labels=invalid,
        )
        theta = heading_correction(det.x, gains)
        return resolve_command(MISSION_RUNNING, instr.speed, theta), new, _fb(new)

    # Rule: search for the lost object
    search = search_state_for_side(state.last_seen_side, state.states_mode)
    new = replace(
        state,
        mission_state=MISSION_RUNNING,
        search_state=search,
        active="search",
        invalid_labels=invalid,
    )
    return resolve_command(search), new, _fb(new)


def _side_of(x_n: float) -> str:
    return SIDE_LEFT if x_n < 0.5 else SIDE_RIGHT


def _fb(state: ExecState) -> PlannerFeedback:
    return PlannerFeedback(mission_state=state.mission_state, instruction_index=0)


@dataclass
class TickTrace:
    """Per-tick record matching the trace CSV columns."""

    t: int
    state: str
    command: MotionCommand
    det: Detection | None

    def csv_row(self) -> str:
        c = self.command
        if self.det is None:
            d = "0,,,,,"
        else:
            d = "1,%.6f,%.6f,%.6f,%.6f,%.6f" % (
                self.det.x, self.det.y, self.det.width, self.det.height,
                self.det.confidence,
            )
        return f"{self.t},{self.state},{c.v_x:.6f},{c.v_y:.6f},{c.theta:.6f},{d}"


TRACE_HEADER = "t,state,v_x,v_y,theta,det_present,x_n,y_n,w_n,h_n,conf"


class Policy:
    """Closed-loop policy driven by the simulator or the live frame loop.

    Per tick it bridges blur-dropped detections with the last clear one (when
    the gate is enabled), smooths the stream, and then either applies the
    execution rules directly (rule mode) or lets the trained model supply the
    motion vector while the rules keep supervising state transitions
    (learned mode). Searching and success ticks always emit the exact
    state-table command so the motion invariants hold in both modes.

    A bridged detection is as old as the blur streak, so its center is
    rotation-compensated by the commanded yaw integrated since the clear
    frame; without this the controller chases a frozen bearing and can spin
    itself past the target during a long streak.
    """

    def __init__(self, mode: str = "rule", checkpoint=None,
                 thresholds: ThresholdTable | None = None,
                 gains: ControllerGains | None = None,
                 states_mode: str = "four", gate_enabled: bool = True,
                 smoother_window: int = 5,
                 lexicon: ClassLexicon | None = None):
        if mode not in ("rule", "learned"):
            raise ConfigError(f"unknown policy mode {mode!r}")
        if mode == "learned" and checkpoint is None:
            raise ConfigError("learned mode requires a trained checkpoint")
        self.mode = mode
        self.checkpoint = checkpoint
        self.thresholds = thresholds or ThresholdTable.shipped()
        self.gains = gains or ControllerGains()
        self.states_mode = states_mode
        self.gate_enabled = gate_enabled
        self.lexicon = lexicon or default_lexicon()
        self.smoother = DetectionSmoother(window=smoother_window)
        self.state = ExecState(states_mode=states_mode)
        self.instruction: MissionInstruction | None = None
        self._last_clear_det: Detection | None = None
        self._yaw_since_clear = 0.0
        self._last_theta = 0.0
        self._forward_cache: dict[tuple[int, ...], tuple[float, float, float]] = {}
        self.search_entries = 0
        self.ticks = 0

    def set_instruction(self, instr: MissionInstruction, first: bool = False) -> None:
        """Switch the active subtask. The first instruction of a run seeds
        prev_instruction so the reset rule only fires on real changes."""
        self.instruction = instr
        if first:
            self.state = ExecState(states_mode=self.states_mode,
                                   prev_instruction=instr.text)
            self.smoother.reset()
            self._last_clear_det = None
            self._yaw_since_clear = 0.0
            self._last_theta = 0.0

    def tick(self, det: Detection | None, was_blur: bool = False
             ) -> tuple[MotionCommand, ExecState]:
        """Advance one tick; returns the emitted command and the new state."""
        if self.instruction is None:
            raise ConfigError("policy has no active instruction")
        self.ticks += 1
        self._yaw_since_clear += self._last_theta * CONTROL_DT

        if det is None and was_blur and self.gate_enabled:
            det = self._bridged_detection()
        elif det is not None and not was_blur:
            self._last_clear_det = det
            self._yaw_since_clear = 0.0

        smoothed = self.smoother.smooth(det)
        prev_searching = self.state.searching
        prev_mission = self.state.mission_state
        prev_text = self.state.prev_instruction  # model's I_m0 is the pre-step text

        cmd, new_state, _ = step(self.state, self.instruction, smoothed,
                                 self.thresholds, self.gains, self.lexicon)

        if self.mode == "learned" and new_state.mission_state == MISSION_RUNNING \
                and not new_state.searching:
            cmd = self._model_command(prev_text, smoothed, prev_mission,
                                      self.state.search_state)

        if new_state.searching and not prev_searching:
            self.search_entries += 1
        self.state = new_state
        self._last_theta = cmd.theta
        return cmd, new_state

    def _bridged_detection(self) -> Detection | None:
        """Last clear detection with its center corrected for the yaw
        commanded since that frame (positive yaw slides the image right)."""
        det = self._last_clear_det
        if det is None:
            return None
        x = det.x + math.degrees(self._yaw_since_clear) / 90.0
        if not 0.0 <= x <= 1.0:
            return None  # the remembered target has rotated out of view
        return Detection(label=det.label, confidence=det.confidence,
                         center=(x, det.y), size=det.size)

    def _model_command(self, prev_text: str, det: Detection | None,
                       mission_state: str, search_state: str) -> MotionCommand:
        from .model.infer import predict_motion  # lazy: model depends on executor types

        key = None
        if self.checkpoint is not None:
            key = self._cache_key(prev_text, det, mission_state, search_state)
            hit = self._forward_cache.get(key)
            if hit is not None:
                v_x, _, theta = hit
                return self._clamped(v_x, theta)
        v = predict_motion(
            self.checkpoint,
            prev_instruction=prev_text,
            instruction=self.instruction.text,
            detection=det,
            mission_state=mission_state,
            search_state=search_state,
        )
        if key is not None:
            if len(self._forward_cache) > 65536:
                self._forward_cache.clear()
            self._forward_cache[key] = v
        return self._clamped(v[0], v[2])

    def _clamped(self, v_x: float, theta: float) -> MotionCommand:
        theta = max(-self.gains.theta_max, min(self.gains.theta_max, theta))
        return MotionCommand(max(0.0, v_x), 0.0, theta)

    def _cache_key(self, prev_text, det, mission_state, search_state):
        if det is None:
            dkey = ()
        else:
            # detections quantize to 2 decimals inside the tokenizer anyway
            dkey = (det.label, round(det.confidence, 2), round(det.x, 2),
                    round(det.y, 2), round(det.width, 2), round(det.height, 2))
        return (prev_text, self.instruction.text, mission_state, search_state, dkey)


def make_policy(mode: str = "rule", checkpoint=None, **kwargs) -> Policy:
    """Construct a closed-loop policy (see Policy)."""
    return Policy(mode=mode, checkpoint=checkpoint, **kwargs)
