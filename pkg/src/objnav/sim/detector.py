"""Synthetic fan-of-view detector with blur-correlated dropout.

Detections drop with a probability that ramps with the tracker's angular
speed on the previous tick, scaled by a per-class difficulty multiplier
(person 1x, chair 2x, backpack 3x): harder classes lose detections at lower
rotation rates, emulating how motion blur hits small or textureless objects
first. Dropped-by-blur ticks are flagged so the gate analog can bridge them;
a target outside the fan is absent with no flag and cannot be bridged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..perception import Detection
from .world import VisibilityFan, World, bearing_to_target

DIFFICULTY_MULTIPLIERS = {"person": 1.0, "chair": 2.0, "backpack": 3.0}


@dataclass
class DetectorModel:
    """Blur-correlated dropout with two sources.

    Rotation blur (hard, dominant: frames smear while the camera pans) ramps
    with multiplier * |omega|; gait blur (sparse: body shake while trotting
    forward) ramps with multiplier * v_x. The default knees keep the easiest
    class strictly blur-free: its effective rotation tops out at the steering
    clamp (0.5 rad/s) below the rotation knee, and its gait term at commanded
    speeds stays below the gait knee.
    """

    h_ref: float = 0.9            # apparent box height at 1 m
    noise_sigma: float = 0.01     # gaussian noise on center and size
    rot_on: float = 0.52          # rad/s of multiplier * |omega| where blur starts
    rot_sat: float = 0.80
    rot_max: float = 0.93
    gait_on: float = 0.72         # m/s of multiplier * v_x where gait blur starts
    gait_sat: float = 3.0
    gait_max: float = 0.5
    ramp_gamma: float = 0.6      # concave ramp: blur bites soon after its knee
    dropout_cap: float = 0.98     # a clean frame always stays possible
    difficulty: dict[str, float] = field(
        default_factory=lambda: dict(DIFFICULTY_MULTIPLIERS))

    def multiplier(self, cls: str) -> float:
        return self.difficulty.get(cls, 1.0)

    def _ramp(self, value: float, on: float, sat: float, peak: float) -> float:
        if value <= on:
            return 0.0
        return peak * min(1.0, (value - on) / (sat - on)) ** self.ramp_gamma

    def blur_dropout(self, cls: str, omega: float, v_x: float = 0.0) -> float:
        mult = self.multiplier(cls)
        p = self._ramp(mult * abs(omega), self.rot_on, self.rot_sat,
                       self.rot_max)
        p += self._ramp(mult * abs(v_x), self.gait_on, self.gait_sat,
                        self.gait_max)
        return min(self.dropout_cap, p)


def project_detection(world: World, fan: VisibilityFan, detmodel: DetectorModel,
                      cls: str, rng: np.random.Generator, omega_prev: float = 0.0,
                      v_prev: float = 0.0) -> tuple[Detection | None, bool]:
    """(detection, blur_dropped) for the current world state.

    Returns (None, False) when the target is geometrically out of view and
    (None, True) when it was visible but the frame was blur-dropped; the
    dropout draw uses the previous tick's commanded motion (the blur happened
    during that exposure).
    """
    d = world.target_distance()
    if d > fan.radius or d <= 1e-9:
        return None, False
    bearing = bearing_to_target(world)  # positive = left of heading
    if abs(bearing) > math.radians(fan.half_angle_deg):
        return None, False

    if rng.random() < detmodel.blur_dropout(cls, omega_prev, v_prev):
        return None, True

    sigma = detmodel.noise_sigma
    # image x grows rightward: left-of-heading targets land below 0.5
    x_n = 0.5 - math.degrees(bearing) / 90.0 + rng.normal(0.0, sigma)
    y_n = 0.5 + rng.normal(0.0, sigma)
    h_n = detmodel.h_ref / d + rng.normal(0.0, sigma)
    w_n = 0.6 * h_n + rng.normal(0.0, sigma)
    conf = 1.0 - d / fan.radius + rng.normal(0.0, sigma)

    clamp = lambda v: min(1.0, max(0.0, v))
    return Detection(
        label=cls,
        confidence=clamp(conf),
        center=(clamp(x_n), clamp(y_n)),
        size=(clamp(w_n), clamp(h_n)),
    ), False
