"""
Seed derivation for reproducible runs.

Every random stream in a run is derived from one integer seed and a role
tag, so two runs with the same seed see identical fading draws, Gaussian
perturbations, weights and Monte Carlo samples.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

ROLE_TAGS: tuple[str, ...] = (
    "fading",
    "gaussian_s",
    "gaussian_r",
    "weights",
    "baseline_mc",
    "policy_init",
    "diag",
)


def role_seed(seed: int, role: str) -> int:
    """Derive the sub-seed of ``role`` from ``seed``.

    Args:
        seed (int): Run seed, nonnegative.
        role (str): Role tag, e.g. ``"fading"``.

    Raises:
        ValueError: If the seed is negative.

    Returns:
        int: A 64-bit sub-seed, a pure function of ``(seed, role)``.
    """
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    tag = zlib.crc32(role.encode("utf-8"))
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_generator(sub_seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) for a sub-seed."""
    return np.random.Generator(np.random.Philox(sub_seed))


@dataclass(frozen=True)
class SubSeeds:
    seed: int
    fading: int
    gaussian_s: int
    gaussian_r: int
    weights: int
    baseline_mc: int
    policy_init: int
    diag: int

    def generator(self, role: str) -> np.random.Generator:
        if role not in ROLE_TAGS:
            raise ValueError(f"Unknown role tag: {role}")
        return make_generator(getattr(self, role))


def seed_everything(seed: int) -> SubSeeds:
    """Derive all sub-seeds of a run.

    Args:
        seed (int): Run seed.

    Returns:
        SubSeeds: One sub-seed per role tag.
    """
    return SubSeeds(seed=int(seed), **{role: role_seed(seed, role) for role in ROLE_TAGS})
