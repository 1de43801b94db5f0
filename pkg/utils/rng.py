import numpy as np

# Philox4x64-10 is counter based: a (seed, stream...) pair always yields the same draws.
ALGORITHM = "Philox4x64-10 seeded through numpy.random.SeedSequence"

MAX_SEED = 2**64 - 1


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Build a generator for one independent stream

    Args:
        seed: user-facing 64-bit seed
        stream: extra integers identifying the stream (restart index, customer index, ...)

    Returns:
        numpy Generator backed by Philox
    """
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2^64), got {seed}")
    entropy = [int(seed), *[int(s) for s in stream]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
