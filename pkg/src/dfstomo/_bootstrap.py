from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def bootstrap_means(values: np.ndarray, reps: int, seed: int = 0, workers: int = 1) -> np.ndarray:
    """Nonparametric bootstrap of the sample mean.

    ``values`` has shape ``(N,)`` or ``(N, k)``; the result has shape ``(reps,)``
    or ``(reps, k)``.  Replicate ``r`` always draws from the ``r``-th child of
    ``SeedSequence(seed)``, so the output does not depend on ``workers``.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n == 0:
        raise ValueError("cannot bootstrap an empty sample")
    if reps < 2:
        raise ValueError("need at least two bootstrap replicates")
    children = np.random.SeedSequence(int(seed)).spawn(reps)
    out = np.empty((reps,) + values.shape[1:])

    def one(r):
        rng = np.random.Generator(np.random.Philox(children[r]))
        counts = np.bincount(rng.integers(0, n, n), minlength=n).astype(float)
        out[r] = counts @ values / n

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(reps)))
    else:
        for r in range(reps):
            one(r)
    return out


def bootstrap_stderr(values: np.ndarray, reps: int, seed: int = 0, workers: int = 1):
    return bootstrap_means(values, reps, seed, workers).std(axis=0, ddof=1)
