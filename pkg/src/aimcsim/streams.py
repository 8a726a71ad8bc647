"""Named random-number streams derived from one global seed.

Every stochastic ingredient of a simulation run (programming errors, drift
coefficients, read noise, output noise, ...) draws from its own named stream.
Streams are derived with ``numpy.random.SeedSequence(seed, spawn_key=...)``,
so consuming more numbers from one stream never shifts the draws of another,
and a run is reproducible from the single global seed alone.

The optional ``index`` argument gives each repeat / worker / realization an
independent substream, which keeps parallel reductions deterministic: worker
``i`` always owns stream ``(name, i)`` no matter which thread finishes first.
"""

from __future__ import annotations

import numpy as np

# Fixed purpose -> spawn-key assignment. Append only; renumbering existing
# entries would silently change every seeded result.
STREAM_IDS = {
    "weight-gen": 0,
    "input-gen": 1,
    "programming": 2,
    "drift": 3,
    "read-noise": 4,
    "output-noise": 5,
    "weight-noise": 6,
    "faults": 7,
    "polarity": 8,
    "s-shape": 9,
    "drift-probes": 10,
    "data-gen": 11,
    "data-shuffle": 12,
    "train-init": 13,
    "train-noise": 14,
}


def stream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Return the generator for purpose ``name`` (substream ``index``)."""
    try:
        sid = STREAM_IDS[name]
    except KeyError:
        raise KeyError(
            f"unknown stream name {name!r}; known: {sorted(STREAM_IDS)}"
        ) from None
    if index < 0:
        raise ValueError("stream index must be >= 0")
    ss = np.random.SeedSequence(seed, spawn_key=(sid, index))
    return np.random.Generator(np.random.PCG64(ss))


class RngPool:
    """Convenience wrapper binding a global seed to :func:`stream`."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def get(self, name: str, index: int = 0) -> np.random.Generator:
        return stream(self.seed, name, index)

    def __repr__(self) -> str:
        return f"RngPool(seed={self.seed})"
