"""Synthetic training-corpus generation with rule-oracle labels."""

from .synonyms import SynonymTable, expand_synonyms
from .templates import InstructionTemplate, vary_instruction
from .thresholds import generate_thresholds
from .sampler import ScenarioSampler, oracle_label, replay_targets
from .writer import generate_dataset

__all__ = [
    "InstructionTemplate",
    "ScenarioSampler",
    "SynonymTable",
    "expand_synonyms",
    "generate_dataset",
    "generate_thresholds",
    "oracle_label",
    "replay_targets",
    "vary_instruction",
]
