"""Sharded, deterministic JSONL corpus generation.

Each shard derives its RNG from (seed, shard index) and classes rotate
through seeded per-block permutations, so output bytes depend only on (n,
seed, sampler settings) and never on the worker count. Exact-duplicate lines
are dropped and deterministic replacements are appended at the end of the
file from a dedicated reserve stream, keeping earlier bytes stable.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from ..errors import DataError
from ..executor import ControllerGains, ThresholdTable
from ..lexicon import ClassLexicon, default_lexicon
from .sampler import ScenarioSampler

SHARD_SIZE = 65536
_DEDUP_STREAM = 0xD3D


def render_line(record: dict) -> str:
    """Fixed-layout JSON rendering (floats via repr for exact round-trip)."""
    t = record["target"]
    return (
        '{"im0": "%s", "im1": "%s", "obj": "%s", "conf": %r, "cx": %r, '
        '"cy": %r, "w": %r, "h": %r, "sm": "%s", "ss": "%s", '
        '"target": {"v": [%r, %r, %r], "sm": "%s", "ss": "%s"}}'
        % (
            record["im0"], record["im1"], record["obj"], record["conf"],
            record["cx"], record["cy"], record["w"], record["h"],
            record["sm"], record["ss"],
            t["v"][0], t["v"][1], t["v"][2], t["sm"], t["ss"],
        )
    )


def _make_sampler(seed: int, stream: int, lexicon: ClassLexicon,
                  thresholds: ThresholdTable, gains: ControllerGains
                  ) -> ScenarioSampler:
    rng = np.random.default_rng(np.random.SeedSequence((seed, stream)))
    return ScenarioSampler(rng=rng, lexicon=lexicon, thresholds=thresholds,
                           gains=gains)


class _ClassRotor:
    """Seeded round-robin over classes, reshuffled each full block; keeps
    every class at an equal share of samples."""

    def __init__(self, classes: list[str], rng: np.random.Generator):
        self.classes = classes
        self.rng = rng
        self._block: list[str] = []

    def next(self) -> str:
        if not self._block:
            order = self.rng.permutation(len(self.classes))
            self._block = [self.classes[i] for i in order]
        return self._block.pop()


def _gen_shard(args) -> tuple[list[str], dict[str, int], dict[str, int]]:
    seed, shard_idx, count, lexicon, thresholds, gains = args
    sampler = _make_sampler(seed, shard_idx, lexicon, thresholds, gains)
    rotor = _ClassRotor(sampler.lexicon.classes, sampler.rng)
    lines: list[str] = []
    class_counts: dict[str, int] = {}
    state_counts: dict[str, int] = {}
    for _ in range(count):
        cls = rotor.next()
        record = sampler.draw(cls)
        lines.append(render_line(record))
        class_counts[cls] = class_counts.get(cls, 0) + 1
        key = record["target"]["sm"] + "/" + record["target"]["ss"]
        state_counts[key] = state_counts.get(key, 0) + 1
    return lines, class_counts, state_counts


@dataclass
class CorpusStats:
    n: int
    seed: int
    duplicates_dropped: int = 0
    class_counts: dict = field(default_factory=dict)
    state_mix: dict = field(default_factory=dict)
    elapsed_s: float = 0.0
    samples_per_s: float = 0.0
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "duplicates_dropped": self.duplicates_dropped,
            "class_counts": self.class_counts,
            "state_mix": self.state_mix,
            "elapsed_s": round(self.elapsed_s, 3),
            "samples_per_s": round(self.samples_per_s, 1),
            "thresholds": self.thresholds,
        }


def generate_dataset(n: int, seed: int, out_path: str | Path, workers: int = 1,
                     lexicon: ClassLexicon | None = None,
                     thresholds: ThresholdTable | None = None,
                     gains: ControllerGains | None = None,
                     shard_size: int = SHARD_SIZE) -> CorpusStats:
    """Stream n labeled samples to out_path; byte-identical for a fixed seed.

    Tallies count drawn samples (including any that dedup later drops), so
    they describe the generating distribution.
    """
    if n < 1:
        raise DataError(f"sample count must be >= 1, got {n}")
    lexicon = lexicon or default_lexicon()
    thresholds = thresholds or ThresholdTable.shipped()
    gains = gains or ControllerGains()

    t0 = time.perf_counter()
    shards = [(seed, i, min(shard_size, n - i * shard_size), lexicon,
               thresholds, gains)
              for i in range((n + shard_size - 1) // shard_size)]

    stats = CorpusStats(n=n, seed=seed)
    seen: set[bytes] = set()
    dropped = 0
    out_path = Path(out_path)

    def _merge(class_counts, state_counts):
        for k, v in class_counts.items():
            stats.class_counts[k] = stats.class_counts.get(k, 0) + v
        for k, v in state_counts.items():
            stats.state_mix[k] = stats.state_mix.get(k, 0) + v

    def _emit(f, line: str) -> bool:
        digest = hashlib.blake2b(line.encode(), digest_size=16).digest()
        if digest in seen:
            return False
        seen.add(digest)
        f.write(line)
        f.write("\n")
        return True

    try:
        with open(out_path, "w", encoding="utf-8") as f:
            if workers > 1:
                with Pool(workers) as pool:
                    for lines, cc, sc in pool.imap(_gen_shard, shards, chunksize=1):
                        _merge(cc, sc)
                        dropped += sum(not _emit(f, line) for line in lines)
            else:
                for shard in shards:
                    lines, cc, sc = _gen_shard(shard)
                    _merge(cc, sc)
                    dropped += sum(not _emit(f, line) for line in lines)
            if dropped:
                # deterministic replacements from the reserve stream
                reserve = _make_sampler(seed, _DEDUP_STREAM, lexicon,
                                        thresholds, gains)
                rotor = _ClassRotor(reserve.lexicon.classes, reserve.rng)
                need = dropped
                while need:
                    cls = rotor.next()
                    record = reserve.draw(cls)
                    if _emit(f, render_line(record)):
                        _merge({cls: 1},
                               {record["target"]["sm"] + "/" +
                                record["target"]["ss"]: 1})
                        need -= 1
    except OSError as exc:
        raise DataError(f"cannot write corpus to {out_path}: {exc}") from exc

    stats.duplicates_dropped = dropped
    stats.elapsed_s = time.perf_counter() - t0
    stats.samples_per_s = n / stats.elapsed_s if stats.elapsed_s else 0.0
    stats.thresholds = dict(thresholds.thresholds)
    return stats


def write_stats(stats: CorpusStats, path: str | Path) -> None:
    import json

    Path(path).write_text(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")
