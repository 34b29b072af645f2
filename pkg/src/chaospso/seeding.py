"""Deterministic 64-bit seed derivation."""

import hashlib

from ._pure import MASK64, splitmix64


def stable_hash(text):
    """64-bit hash of a string that does not depend on PYTHONHASHSEED."""
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def mix64(*parts):
    """Fold integers into one 64-bit value through chained splitmix64 steps."""
    h = 0
    for p in parts:
        h, _ = splitmix64((h ^ int(p)) & MASK64)
    return h


def derive_seed(master, source_id, function_id, run_index):
    """Seed for one PSO run, re-derivable in isolation."""
    return mix64(master, stable_hash(source_id), function_id, run_index)


def analysis_seed(master, source_id, purpose, index):
    """Seed for sequence-analysis orbits; ``purpose`` separates the streams."""
    return mix64(master, stable_hash(source_id), stable_hash(purpose), index)
