"""Labeled seed derivation.

Every run owns a single integer root seed.  Sub-seeds for independent jobs
(trials, rounds, roles like "gen" vs "fit") are derived by hashing the job's
label into extra entropy words, so that adding or reordering jobs never
shifts the stream of an unrelated job.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed_sequence(root_seed: int, *labels: object) -> np.random.SeedSequence:
    """SeedSequence for the job identified by ``labels`` under ``root_seed``.

    Labels are joined with '/' and hashed; equal labels give equal streams,
    distinct labels give independent streams.
    """
    tag = "/".join(str(part) for part in labels)
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    return np.random.SeedSequence([int(root_seed) & 0xFFFFFFFFFFFFFFFF, *words])


def derive_rng(root_seed: int, *labels: object) -> np.random.Generator:
    """Generator seeded by :func:`derive_seed_sequence`."""
    return np.random.default_rng(derive_seed_sequence(root_seed, *labels))
