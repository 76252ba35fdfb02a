"""Synthetic benchmark dataset generators."""

import numpy as np

BENCH_KINDS = ("two-normals-1d", "highdim")


def generate_two_normals_1d(n, seed):
    """n points, half N(-3, 1) and half N(+3, 1), as an (n, 1) matrix."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    n_lo = n // 2
    lo = rng.standard_normal(n_lo) - 3.0
    hi = rng.standard_normal(n - n_lo) + 3.0
    return np.concatenate([lo, hi]).reshape(-1, 1)


def generate_highdim(n, d, seed):
    """n points, half N(+2*1_d, I) and half N(-2*1_d, I), as an (n, d) matrix."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if d < 1:
        raise ValueError("d must be at least 1")
    rng = np.random.default_rng(seed)
    n_hi = n // 2
    hi = rng.standard_normal((n_hi, d)) + 2.0
    lo = rng.standard_normal((n - n_hi, d)) - 2.0
    return np.vstack([hi, lo])


def generate_bench(kind, n, d, seed):
    if kind == "two-normals-1d":
        return generate_two_normals_1d(n, seed)
    if kind == "highdim":
        return generate_highdim(n, d, seed)
    raise ValueError(f"unknown benchmark kind '{kind}'; expected one of {BENCH_KINDS}")
