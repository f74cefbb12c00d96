"""Dataset generation and input packing for product networks.

The packing convention is fixed across the whole package: a matrix argument
enters as its column-major vectorization, followed by the vector argument.
The complex layout is [vec(W1), vec(W2), x1, x2]. Pack/unpack helpers below
are the single source of truth for these layouts.

Generation is deterministic per sample index (see :mod:`.rng`): row i of a
dataset depends only on (seed, i), never on `count` or on any partitioning
of the generation loop. Rayleigh-style channel entries are produced by the
fixed-consumption Box-Muller transform, scaled so each real component has
variance 1/2, then hard-clipped so every entry is certain to lie inside the
approximation domain; the number of clipped entries lands in the meta block.
A final all-zero-channel probe row is appended to that dataset so the exact
vanishing behaviour of the product networks is exercised by construction.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .rng import normals, stream

__all__ = [
    "Dataset",
    "pack_matvec",
    "unpack_matvec",
    "pack_complex",
    "unpack_complex",
    "equispaced_real_dataset",
    "qpsk_rayleigh_dataset",
    "save_dataset",
    "load_dataset",
    "save_dataset_csv",
    "load_dataset_csv",
]


@dataclass(frozen=True)
class Dataset:
    """Paired inputs and targets plus a record of how they were generated."""

    inputs: np.ndarray
    targets: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        inputs = np.asarray(self.inputs, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if inputs.ndim != 2 or targets.ndim != 2:
            raise ValueError("inputs and targets must be 2-D arrays")
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError(
                f"inputs have {inputs.shape[0]} rows but targets have {targets.shape[0]}"
            )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return self.inputs.shape[0]


def pack_matvec(W: np.ndarray, x: np.ndarray) -> np.ndarray:
    """[vec(W) column-major, x] as one flat vector."""
    W = np.asarray(W, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if W.ndim != 2 or x.ndim != 1 or W.shape[1] != x.shape[0]:
        raise ValueError(f"incompatible shapes {W.shape} and {x.shape}")
    return np.concatenate([W.flatten(order="F"), x])


def unpack_matvec(v: np.ndarray, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (m * n + n,):
        raise ValueError(f"expected a vector of width {m * n + n}, got {v.shape}")
    W = v[: m * n].reshape((m, n), order="F")
    return W, v[m * n:].copy()


def pack_complex(W1, W2, x1, x2) -> np.ndarray:
    """[vec(W1), vec(W2), x1, x2] with column-major matrix blocks."""
    W1 = np.asarray(W1, dtype=np.float64)
    W2 = np.asarray(W2, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if W1.shape != W2.shape or x1.shape != x2.shape:
        raise ValueError("real and imaginary parts must have matching shapes")
    if W1.ndim != 2 or x1.ndim != 1 or W1.shape[1] != x1.shape[0]:
        raise ValueError(f"incompatible shapes {W1.shape} and {x1.shape}")
    return np.concatenate([
        W1.flatten(order="F"),
        W2.flatten(order="F"),
        x1,
        x2,
    ])


def unpack_complex(v: np.ndarray, m: int, n: int):
    v = np.asarray(v, dtype=np.float64)
    block = m * n
    if v.shape != (2 * block + 2 * n,):
        raise ValueError(f"expected a vector of width {2 * block + 2 * n}, got {v.shape}")
    W1 = v[:block].reshape((m, n), order="F")
    W2 = v[block: 2 * block].reshape((m, n), order="F")
    x1 = v[2 * block: 2 * block + n].copy()
    x2 = v[2 * block + n:].copy()
    return W1, W2, x1, x2


def equispaced_real_dataset(
    m: int,
    n: int,
    count: int,
    half_width: float = 2.0,
    grid_points: int = 1025,
    seed: int = 0,
) -> Dataset:
    """Random (W, x) pairs with entries on an equispaced grid of [-h, h].

    Every entry of W and x is drawn independently and uniformly from the
    grid {-h + 2h j / (grid_points - 1) : j = 0 .. grid_points - 1}. Targets
    are the double-precision products W x. Row i is a deterministic function
    of (seed, i).
    """
    if m < 1 or n < 1 or count < 1:
        raise ValueError("m, n and count must be positive")
    if grid_points < 2:
        raise ValueError(f"grid_points must be at least 2, got {grid_points}")
    if not half_width > 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    h = float(half_width)
    entries = m * n + n
    inputs = np.empty((count, entries))
    targets = np.empty((count, m))
    for i in range(count):
        gen = stream(seed, i)
        u = gen.random(entries)
        j = np.floor(u * grid_points).astype(np.int64)
        np.clip(j, 0, grid_points - 1, out=j)
        row = -h + (2.0 * h) * (j / (grid_points - 1))
        inputs[i] = row
        W, x = unpack_matvec(row, m, n)
        targets[i] = W @ x
    meta = {
        "kind": "equispaced_real",
        "m": m,
        "n": n,
        "count": count,
        "seed": int(seed),
        "half_width": h,
        "grid_points": int(grid_points),
        "grid": f"{grid_points} equispaced points on [{-h}, {h}]",
        "packing": f"[vec(W) column-major ({m * n}), x ({n})]",
    }
    return Dataset(inputs, targets, meta)


_QPSK_LEVEL = 1.0 / math.sqrt(2.0)


def qpsk_rayleigh_dataset(
    m: int,
    n: int,
    count: int,
    clip: float = 3.0,
    seed: int = 0,
) -> Dataset:
    """Clipped complex Gaussian channels applied to random QPSK symbols.

    Each channel entry has independent real and imaginary components of
    variance 1/2 (unit-variance complex entries), generated by Box-Muller
    and clipped to [-clip, clip]. Symbol components are +-1/sqrt(2), chosen
    by fair coin flips. Targets stack the real part W1 x1 - W2 x2 over the
    imaginary part W1 x2 + W2 x1 of the complex product.

    The returned dataset has count + 1 rows: one extra probe row with the
    channel forced to zero (symbols drawn as usual), whose target is the
    zero vector. ``meta["clipped_entries"]`` counts how many channel
    components the clip actually touched.
    """
    if m < 1 or n < 1 or count < 1:
        raise ValueError("m, n and count must be positive")
    if not clip > 0:
        raise ValueError(f"clip must be positive, got {clip}")
    block = m * n
    inputs = np.empty((count + 1, 2 * block + 2 * n))
    targets = np.empty((count + 1, 2 * m))
    clipped = 0
    for i in range(count + 1):
        gen = stream(seed, i)
        z = normals(gen, 2 * block) * _QPSK_LEVEL
        su = gen.random(2 * n)
        symbols = np.where(su < 0.5, -_QPSK_LEVEL, _QPSK_LEVEL)
        if i == count:
            z = np.zeros(2 * block)
        else:
            clipped += int(np.count_nonzero(np.abs(z) > clip))
            z = np.clip(z, -clip, clip)
        W1 = z[:block].reshape((m, n), order="F")
        W2 = z[block:].reshape((m, n), order="F")
        x1 = symbols[:n]
        x2 = symbols[n:]
        inputs[i] = pack_complex(W1, W2, x1, x2)
        targets[i, :m] = W1 @ x1 - W2 @ x2
        targets[i, m:] = W1 @ x2 + W2 @ x1
    meta = {
        "kind": "qpsk_rayleigh",
        "m": m,
        "n": n,
        "count": count,
        "rows": count + 1,
        "probe_rows": 1,
        "seed": int(seed),
        "clip": float(clip),
        "clipped_entries": clipped,
        "grid": "channel components N(0, 1/2) clipped, symbols +-1/sqrt(2)",
        "packing": (
            f"[vec(W1) column-major ({block}), vec(W2) column-major ({block}), "
            f"x1 ({n}), x2 ({n})]"
        ),
    }
    return Dataset(inputs, targets, meta)


def dataset_document(ds: Dataset) -> dict[str, Any]:
    return {
        "meta": dict(ds.meta),
        "inputs": ds.inputs.tolist(),
        "targets": ds.targets.tolist(),
    }


def dataset_from_document(doc: dict[str, Any]) -> Dataset:
    return Dataset(
        np.asarray(doc["inputs"], dtype=np.float64),
        np.asarray(doc["targets"], dtype=np.float64),
        dict(doc.get("meta", {})),
    )


def save_dataset(ds: Dataset, path) -> None:
    text = json.dumps(dataset_document(ds), indent=1, allow_nan=False)
    Path(path).write_text(text + "\n")


def load_dataset(path) -> Dataset:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a valid dataset file: {path}: {exc}") from exc
    if not isinstance(doc, dict) or "inputs" not in doc or "targets" not in doc:
        raise ValueError(f"not a valid dataset file: {path}")
    return dataset_from_document(doc)


def save_dataset_csv(ds: Dataset, path) -> None:
    """One sample per row, inputs then targets, shortest round-trip floats."""
    width_in = ds.inputs.shape[1]
    width_out = ds.targets.shape[1]
    header = [f"in_{j}" for j in range(width_in)] + [f"tgt_{j}" for j in range(width_out)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for a, b in zip(ds.inputs, ds.targets):
            writer.writerow([repr(float(v)) for v in a] + [repr(float(v)) for v in b])


def load_dataset_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"empty dataset file: {path}") from None
        width_in = sum(1 for name in header if name.startswith("in_"))
        width_out = sum(1 for name in header if name.startswith("tgt_"))
        if width_in + width_out != len(header) or width_in == 0 or width_out == 0:
            raise ValueError(f"unrecognized dataset header in {path}")
        rows = [[float(v) for v in row] for row in reader]
    data = np.asarray(rows, dtype=np.float64).reshape(len(rows), width_in + width_out)
    return Dataset(data[:, :width_in], data[:, width_in:], {"source": str(path)})
