"""Scripted target trajectories.

Four benchmark suites (analogs of increasingly irregular environments) plus
the slow wander used by the search-efficiency ablation:

    stationary       target never moves
    straight         constant-velocity walk away from the tracker
    zigzag           straight walk with the heading flipping +-35deg
    random_waypoint  seeded waypoints inside an annulus around the spawn
    wander           random_waypoint confined to a small disc, low speed
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .world import World, TICK_DT


@dataclass
class TrajectoryScript:
    """Base: stationary target."""

    speed: float = 0.0
    suite: str = "stationary"

    def update(self, world: World, tick: int) -> tuple[float, float]:
        return world.target_x, world.target_y


@dataclass
class StraightScript(TrajectoryScript):
    direction: float = 0.0  # world-frame heading of the walk

    def update(self, world: World, tick: int) -> tuple[float, float]:
        dx = self.speed * TICK_DT * math.cos(self.direction)
        dy = self.speed * TICK_DT * math.sin(self.direction)
        return world.target_x + dx, world.target_y + dy


@dataclass
class ZigzagScript(TrajectoryScript):
    direction: float = 0.0
    amplitude_deg: float = 35.0
    period_s: float = 3.0

    def update(self, world: World, tick: int) -> tuple[float, float]:
        phase = int(tick * TICK_DT / self.period_s) % 2
        offset = math.radians(self.amplitude_deg) * (1 if phase == 0 else -1)
        d = self.direction + offset
        return (world.target_x + self.speed * TICK_DT * math.cos(d),
                world.target_y + self.speed * TICK_DT * math.sin(d))


@dataclass
class WaypointScript(TrajectoryScript):
    """Walk toward seeded random waypoints; re-draw on arrival.

    With keep_distance set, waypoint draws reject walks whose direction
    approaches the tracker, so a followed target never charges the camera.
    """

    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    center: tuple[float, float] = (0.0, 0.0)
    radius_range: tuple[float, float] = (2.5, 5.0)
    keep_distance: bool = False
    _waypoint: tuple[float, float] | None = None

    def _draw(self, world: World) -> tuple[float, float]:
        for _ in range(16):
            r = self.rng.uniform(*self.radius_range)
            a = self.rng.uniform(-math.pi, math.pi)
            wp = (self.center[0] + r * math.cos(a),
                  self.center[1] + r * math.sin(a))
            if not self.keep_distance:
                return wp
            walk = (wp[0] - world.target_x, wp[1] - world.target_y)
            radial = (world.target_x - world.tracker_x,
                      world.target_y - world.tracker_y)
            if walk[0] * radial[0] + walk[1] * radial[1] >= 0.0:
                return wp
        return wp  # vanishingly rare; one approaching walk is survivable

    def update(self, world: World, tick: int) -> tuple[float, float]:
        if self._waypoint is None:
            self._waypoint = self._draw(world)
        wx, wy = self._waypoint
        dx, dy = wx - world.target_x, wy - world.target_y
        dist = math.hypot(dx, dy)
        step = self.speed * TICK_DT
        if dist <= step:
            self._waypoint = None
            return wx, wy
        return world.target_x + step * dx / dist, world.target_y + step * dy / dist


SUITES = ("stationary", "straight", "zigzag", "random_waypoint")


def make_script(suite: str, rng: np.random.Generator, away_direction: float = 0.0,
                speed: float | None = None) -> TrajectoryScript:
    """Instantiate a suite's script; `away_direction` points from tracker to
    the target's spawn so walking targets recede rather than charge."""
    if suite == "stationary":
        return TrajectoryScript(suite=suite)
    if suite == "straight":
        return StraightScript(suite=suite, speed=speed if speed is not None else 0.055,
                              direction=away_direction)
    if suite == "zigzag":
        return ZigzagScript(suite=suite, speed=speed if speed is not None else 0.05,
                            direction=away_direction)
    if suite == "random_waypoint":
        return WaypointScript(suite=suite, rng=rng,
                              speed=speed if speed is not None else 0.05,
                              radius_range=(2.5, 5.0), keep_distance=True)
    if suite == "wander":
        return WaypointScript(suite=suite, rng=rng,
                              speed=speed if speed is not None else 0.08,
                              radius_range=(0.2, 1.2))
    raise ValueError(f"unknown trajectory suite {suite!r}")
