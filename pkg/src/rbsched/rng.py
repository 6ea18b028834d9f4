"""Named, independent random streams derived from one integer seed."""

from __future__ import annotations

import numpy as np

# stable ids; never renumber, or recorded seeds stop reproducing
STREAMS = {"sequence": 1, "movement": 2}


def stream(seed: int, name: str) -> np.random.Generator:
    """Counter-based (Philox) generator for one decision category."""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, STREAMS[name]])))


def random_sequence(seed: int, num_buses: int) -> list[int]:
    """A random release order of bus ids 1..num_buses."""
    return [int(x) + 1 for x in stream(seed, "sequence").permutation(num_buses)]
