"""Deterministic seed derivation.

Every random choice in the toolkit flows from a single root seed.
Components never share a generator; instead each (stage, key...) pair
derives its own named substream so that adding or reordering one stage
cannot perturb the randomness of another.
"""

import hashlib

import numpy as np

_DIGEST_WORDS = 8


def derive_seed(root_seed: int, *names) -> np.random.SeedSequence:
    """Derive a child SeedSequence for a named substream.

    The substream is identified by the textual names, e.g.
    ``derive_seed(7, "synth", "stock", 3, "day", 1)``. Identical
    arguments always yield an identical stream, independent of platform
    and of any other substream that was derived before.
    """
    tag = "/".join(str(n) for n in names)
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    words = np.frombuffer(digest, dtype=np.uint32)[:_DIGEST_WORDS]
    return np.random.SeedSequence([int(root_seed) & 0xFFFFFFFF] + words.tolist())


def rng_for(root_seed: int, *names) -> np.random.Generator:
    """Generator on the named substream of the root seed."""
    return np.random.Generator(np.random.PCG64(derive_seed(root_seed, *names)))
