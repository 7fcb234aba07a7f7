"""Kinematic 2D world: one tracker, one target, a bounded arena.

Conventions: headings are measured counterclockwise from +x and positive
angular velocity turns counterclockwise (toward the left half of the image).
The camera's image x axis grows to the right, so a target at bearing b to
the right of the heading appears at x_n = 0.5 + b/90deg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..executor import MotionCommand

TICK_DT = 1.0 / 15.0  # simulator tick matched to a ~15 Hz camera


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


@dataclass
class World:
    tracker_x: float = 0.0
    tracker_y: float = 0.0
    heading: float = 0.0
    target_x: float = 0.0
    target_y: float = 0.0
    bound: float = 25.0  # arena half-size; positions clamp inside
    dt: float = TICK_DT

    def clamp(self) -> None:
        b = self.bound
        self.tracker_x = min(b, max(-b, self.tracker_x))
        self.tracker_y = min(b, max(-b, self.tracker_y))
        self.target_x = min(b, max(-b, self.target_x))
        self.target_y = min(b, max(-b, self.target_y))

    def target_distance(self) -> float:
        return math.hypot(self.target_x - self.tracker_x,
                          self.target_y - self.tracker_y)


@dataclass
class VisibilityFan:
    half_angle_deg: float = 45.0
    radius: float = 7.5

    def __post_init__(self) -> None:
        if self.half_angle_deg <= 0 or self.radius <= 0:
            raise ValueError("fan angle and radius must be positive")


def bearing_to_target(world: World) -> float:
    """Signed bearing (rad); positive when the target is left of heading."""
    angle = math.atan2(world.target_y - world.tracker_y,
                       world.target_x - world.tracker_x)
    return wrap_angle(angle - world.heading)


def in_fan(world: World, fan: VisibilityFan) -> bool:
    if world.target_distance() > fan.radius:
        return False
    return abs(bearing_to_target(world)) <= math.radians(fan.half_angle_deg)


def step_world(world: World, cmd: MotionCommand, script=None, tick: int = 0
               ) -> World:
    """Advance one tick: rotate, then translate along the new heading, then
    move the target per its script; positions clamp to the arena."""
    world.heading = wrap_angle(world.heading + cmd.theta * world.dt)
    world.tracker_x += cmd.v_x * world.dt * math.cos(world.heading)
    world.tracker_y += cmd.v_x * world.dt * math.sin(world.heading)
    if script is not None:
        world.target_x, world.target_y = script.update(world, tick)
    world.clamp()
    return world
