"""Process-wide switches read from the environment."""
import os

import numpy as np

#: Set ``OSCIDYN_DISABLE_JIT=1`` to force the pure-numpy kernels.
JIT_ENV = "OSCIDYN_DISABLE_JIT"
SEED_ENV = "OSCIDYN_SEED"
DEFAULT_SEED = 0


def jit_requested():
    return os.environ.get(JIT_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


def seed_from_env():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    return int(raw)


def make_rng(seed=None):
    """Return a Generator seeded from *seed*, or from ``OSCIDYN_SEED`` when None."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed_from_env() if seed is None else seed)
