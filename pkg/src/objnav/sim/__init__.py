"""2D kinematic tracking/navigation benchmark."""

from .world import World, VisibilityFan, step_world, bearing_to_target
from .detector import DetectorModel, project_detection
from .scripts import TrajectoryScript, make_script, SUITES
from .episodes import EpisodeResult, run_episode, run_benchmark
from .ablation import run_search_ablation, ABLATION_CONFIGS

__all__ = [
    "ABLATION_CONFIGS",
    "DetectorModel",
    "EpisodeResult",
    "SUITES",
    "TrajectoryScript",
    "VisibilityFan",
    "World",
    "bearing_to_target",
    "make_script",
    "project_detection",
    "run_benchmark",
    "run_episode",
    "run_search_ablation",
    "step_world",
]
