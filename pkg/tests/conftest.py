"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from matvecnet import Fnn, Layer


def random_fnn(
    rng: np.random.Generator,
    n_in: int | None = None,
    depth: int | None = None,
    n_out: int | None = None,
    max_width: int = 6,
    zero_frac: float = 0.3,
) -> Fnn:
    """A small random network with a realistic share of exact-zero weights."""
    if n_in is None:
        n_in = int(rng.integers(1, max_width + 1))
    if depth is None:
        depth = int(rng.integers(1, 5))
    widths = [n_in] + [int(rng.integers(1, max_width + 1)) for _ in range(depth - 1)]
    widths.append(n_out if n_out is not None else int(rng.integers(1, max_width + 1)))
    layers = []
    for k in range(depth):
        w = rng.uniform(-2.0, 2.0, (widths[k + 1], widths[k]))
        w[rng.random(w.shape) < zero_frac] = 0.0
        b = rng.uniform(-1.0, 1.0, widths[k + 1])
        b[rng.random(b.shape) < zero_frac] = 0.0
        layers.append(Layer(w, b))
    return Fnn(tuple(layers))
