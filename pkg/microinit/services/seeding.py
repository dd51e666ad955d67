"""
Seed derivation

Every random stream is keyed by (master seed, run id, stage tag), so a stage of
one run can be replayed without touching any other stream.
"""

import zlib

import numpy as np


def tag_code(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def derive_seed(master: int, run_id: int, tag: str) -> int:
    sequence = np.random.SeedSequence(entropy=master, spawn_key=(run_id, tag_code(tag)))
    return int(sequence.generate_state(1, np.uint32)[0])


def stage_rng(master: int, tag: str, run_id: int = 0) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=master, spawn_key=(run_id, tag_code(tag)))
    return np.random.default_rng(sequence)
