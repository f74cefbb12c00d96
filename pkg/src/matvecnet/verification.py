"""Empirical error estimators, size-budget checks, and report plumbing.

The sup-norm estimators here are Monte-Carlo lower bounds of the true sup:
a reported value above the guarantee is a definitive counterexample, while
a value below it is evidence, not proof. Random samples are drawn from the
per-index streams of :mod:`.rng`, so reports are bit-reproducible for a
given (network, seed, sample count) and the sample set for k samples is a
prefix of the set for any larger count.

Alongside the random samples, :func:`sup_error_matvec` always evaluates a
deterministic probe set: the origin, the all +D and all -D corners, the two
one-factor-zero points (W = 0 with x at +D, and x = 0 with W at +D), and
all sign patterns of +-D on the first min(N_0, 8) coordinates with the
remaining coordinates at +D. Probes participate in the sup only; the mean
squared error averages over the random samples alone, so its value has a
clean interpretation as an expectation under the uniform distribution.

Worker counts never change results: the sample index range is cut into
fixed chunks, each chunk is processed identically whether inline or on a
thread pool, max-reductions are order-independent, and sum-reductions
combine the per-chunk partial sums in chunk index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .constructors import BoundBudget, square_net_of_order
from .datasets import Dataset, unpack_matvec
from .network import (
    Fnn,
    NetworkMetrics,
    evaluate,
    evaluate_batch,
    jacobian,
    metrics,
    preactivations,
)
from .rng import stream

__all__ = [
    "ErrorReport",
    "BudgetCompliance",
    "REPORT_COLUMNS",
    "matvec_truth",
    "probe_inputs",
    "sup_error_matvec",
    "sobolev_error_matvec",
    "dataset_error_report",
    "mse_on_dataset",
    "square_error_curve",
    "square_slope_sup",
    "check_budget",
    "report_row",
    "report_lines",
]

REDUCE_CHUNK = 2048

KINK_TOL = 1e-9

MAX_RESAMPLE_ATTEMPTS = 100


@dataclass(frozen=True)
class ErrorReport:
    """Empirical error summary of one verification run.

    ``sup_error`` is the max over all evaluated points (random samples plus
    any probes) of the max-norm deviation; ``mse`` is the mean over the
    random samples of the per-sample mean squared coordinate error;
    ``grad_sup_error`` is the max-norm Jacobian deviation when a derivative
    check ran, else None. ``kinks_skipped`` counts sample indices abandoned
    after repeated draws kept landing on rectifier kinks.
    """

    sup_error: float
    mse: float
    grad_sup_error: float | None
    sample_count: int
    seed: int
    domain_half_width: float
    kinks_skipped: int = 0


@dataclass(frozen=True)
class BudgetCompliance:
    """Measured metrics against a predicted budget, per-metric and overall.

    Depth compares against the ceiling of the (real-valued) depth bound.
    Connectivity and neuron flags are None when the budget claims no bound
    for them; None flags do not affect ``passed``.
    """

    measured: NetworkMetrics
    budget: BoundBudget
    depth_ok: bool
    width_ok: bool
    weight_ok: bool
    connectivity_ok: bool | None
    neuron_ok: bool | None

    @property
    def passed(self) -> bool:
        checked = [self.depth_ok, self.width_ok, self.weight_ok]
        checked += [x for x in (self.connectivity_ok, self.neuron_ok) if x is not None]
        return all(checked)


def matvec_truth(W: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Reference double-precision product the network outputs are judged by."""
    return np.asarray(W) @ np.asarray(x)


def _chunks(total: int, size: int = REDUCE_CHUNK) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def _map_chunks(work: Callable, spans: Sequence[tuple[int, int]], jobs: int) -> list:
    """Run `work` over index spans, inline or on a thread pool, in span order."""
    if jobs <= 1 or len(spans) <= 1:
        return [work(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(work, lo, hi) for lo, hi in spans]
        return [f.result() for f in futures]


def probe_inputs(m: int, n: int, D: float) -> np.ndarray:
    """Deterministic probe points for the packed matvec domain [-D, D]^N0."""
    width = n * (m + 1)
    rows = [np.zeros(width), np.full(width, D), np.full(width, -D)]
    w_zero = np.full(width, D)
    w_zero[: m * n] = 0.0
    x_zero = np.full(width, D)
    x_zero[m * n:] = 0.0
    rows += [w_zero, x_zero]
    signed = min(width, 8)
    for pattern in range(2 ** signed):
        row = np.full(width, D)
        for bit in range(signed):
            if pattern >> bit & 1:
                row[bit] = -D
        rows.append(row)
    return np.vstack(rows)


def _check_matvec_shape(f: Fnn, m: int, n: int) -> None:
    width = n * (m + 1)
    if f.input_dim != width or f.output_dim != m:
        raise ValueError(
            f"packing mismatch: network is {f.input_dim} -> {f.output_dim}, "
            f"but a matvec of shape ({m}, {n}) packs {width} -> {m}"
        )


def _matvec_targets(xs: np.ndarray, m: int, n: int) -> np.ndarray:
    out = np.empty((xs.shape[0], m))
    for i, row in enumerate(xs):
        W, x = unpack_matvec(row, m, n)
        out[i] = matvec_truth(W, x)
    return out


def _uniform_rows(seed: int, lo: int, hi: int, width: int, D: float) -> np.ndarray:
    rows = np.empty((hi - lo, width))
    for i in range(lo, hi):
        rows[i - lo] = stream(seed, i).random(width) * (2.0 * D) - D
    return rows


def sup_error_matvec(
    f: Fnn,
    m: int,
    n: int,
    D: float,
    samples: int,
    seed: int,
    jobs: int = 1,
) -> ErrorReport:
    """Empirical sup and mean squared error of a matvec-packed network.

    Draws `samples` uniform points with entries in [-D, D], adds the
    deterministic probes, and compares against the exact product. The probes
    enter the sup only, never the mean.
    """
    _check_matvec_shape(f, m, n)
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    width = n * (m + 1)

    def work(lo: int, hi: int) -> tuple[float, float]:
        xs = _uniform_rows(seed, lo, hi, width, D)
        err = np.abs(evaluate_batch(f, xs) - _matvec_targets(xs, m, n))
        per_sample_sq = np.mean(err * err, axis=1)
        return float(np.max(err)), float(np.sum(per_sample_sq))

    parts = _map_chunks(work, _chunks(samples), jobs)
    sup = max(part[0] for part in parts)
    total_sq = 0.0
    for part in parts:
        total_sq += part[1]

    probes = probe_inputs(m, n, D)
    probe_err = np.abs(evaluate_batch(f, probes) - _matvec_targets(probes, m, n))
    sup = max(sup, float(np.max(probe_err)))

    return ErrorReport(
        sup_error=sup,
        mse=total_sq / samples,
        grad_sup_error=None,
        sample_count=samples,
        seed=int(seed),
        domain_half_width=float(D),
    )


def _matvec_jacobian_truth(row: np.ndarray, m: int, n: int) -> np.ndarray:
    """d(Wx)/d[vec(W), x]: x entries in the W block, W entries in the x block."""
    W, x = unpack_matvec(row, m, n)
    J = np.zeros((m, n * (m + 1)))
    for i in range(m):
        for j in range(n):
            J[i, j * m + i] = x[j]
            J[i, n * m + j] = W[i, j]
    return J


def sobolev_error_matvec(
    f: Fnn,
    m: int,
    n: int,
    D: float,
    samples: int,
    seed: int,
    jobs: int = 1,
) -> ErrorReport:
    """Value and first-derivative deviation at kink-avoiding random points.

    A draw is rejected when any hidden pre-activation magnitude falls below
    KINK_TOL, since the network Jacobian is ambiguous on a kink; rejected
    indices redraw on fresh stream lanes, up to MAX_RESAMPLE_ATTEMPTS, then
    get skipped and counted. No probes here: the deterministic probes sit
    exactly on kinks by design.
    """
    _check_matvec_shape(f, m, n)
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    width = n * (m + 1)

    def work(lo: int, hi: int) -> tuple[float, float, float, int, int]:
        sup = 0.0
        grad = 0.0
        total_sq = 0.0
        used = 0
        skipped = 0
        for i in range(lo, hi):
            row = None
            for lane in range(MAX_RESAMPLE_ATTEMPTS):
                cand = stream(seed, i, lane).random(width) * (2.0 * D) - D
                pres = preactivations(f, cand)
                if all(z.size == 0 or np.min(np.abs(z)) >= KINK_TOL for z in pres):
                    row = cand
                    break
            if row is None:
                skipped += 1
                continue
            W, x = unpack_matvec(row, m, n)
            err = np.abs(evaluate(f, row) - matvec_truth(W, x))
            sup = max(sup, float(np.max(err)))
            total_sq += float(np.mean(err * err))
            dev = np.abs(jacobian(f, row) - _matvec_jacobian_truth(row, m, n))
            grad = max(grad, float(np.max(dev)))
            used += 1
        return sup, grad, total_sq, used, skipped

    parts = _map_chunks(work, _chunks(samples), jobs)
    sup = max(part[0] for part in parts)
    grad = max(part[1] for part in parts)
    total_sq = 0.0
    used = 0
    skipped = 0
    for part in parts:
        total_sq += part[2]
        used += part[3]
        skipped += part[4]

    return ErrorReport(
        sup_error=sup,
        mse=total_sq / used if used else 0.0,
        grad_sup_error=grad,
        sample_count=samples,
        seed=int(seed),
        domain_half_width=float(D),
        kinks_skipped=skipped,
    )


def mse_on_dataset(f: Fnn, ds: Dataset) -> float:
    """Mean over samples of the per-coordinate mean squared deviation."""
    if ds.inputs.shape[1] != f.input_dim or ds.targets.shape[1] != f.output_dim:
        raise ValueError(
            f"dimension mismatch: dataset is {ds.inputs.shape[1]} -> "
            f"{ds.targets.shape[1]}, network is {f.input_dim} -> {f.output_dim}"
        )
    err = evaluate_batch(f, ds.inputs) - ds.targets
    return float(np.mean(np.mean(err * err, axis=1)))


def dataset_error_report(f: Fnn, ds: Dataset) -> ErrorReport:
    """Sup and mean squared error of a network against stored targets."""
    if ds.inputs.shape[1] != f.input_dim or ds.targets.shape[1] != f.output_dim:
        raise ValueError(
            f"dimension mismatch: dataset is {ds.inputs.shape[1]} -> "
            f"{ds.targets.shape[1]}, network is {f.input_dim} -> {f.output_dim}"
        )
    err = np.abs(evaluate_batch(f, ds.inputs) - ds.targets)
    half = ds.meta.get("clip", ds.meta.get("half_width", 0.0))
    return ErrorReport(
        sup_error=float(np.max(err)),
        mse=float(np.mean(np.mean(err * err, axis=1))),
        grad_sup_error=None,
        sample_count=len(ds),
        seed=int(ds.meta.get("seed", 0)),
        domain_half_width=float(half),
    )


def square_error_curve(max_order: int) -> list[tuple[int, float]]:
    """Observed sup of |f_m(x) - x^2| on the 2^14 + 1 point grid, per order.

    The grid contains the dyadic midpoints where the interpolation error
    peaks for every order up to 12, so up there the observed sup equals the
    law 2^(-2(m+1)) up to evaluation roundoff.
    """
    if not 0 <= max_order <= 24:
        raise ValueError(f"max_order must lie in [0, 24], got {max_order}")
    grid = np.linspace(0.0, 1.0, 2 ** 14 + 1)
    xs = grid[:, None]
    curve = []
    for order in range(max_order + 1):
        net = square_net_of_order(order)
        err = np.abs(evaluate_batch(net, xs)[:, 0] - grid * grid)
        curve.append((order, float(np.max(err))))
    return curve


def square_slope_sup(net: Fnn, points: int = 4096) -> float:
    """Max |derivative| of a squaring network over off-kink interior points.

    Evaluates the Jacobian at the midpoints (i + 1/2) / points of [0, 1];
    with points a power of two at least 2^(order + 1), every midpoint keeps
    a positive distance from the sawtooth kinks, which all sit on dyadic
    grid points.
    """
    sup = 0.0
    for i in range(points):
        x = np.array([(i + 0.5) / points])
        sup = max(sup, float(np.max(np.abs(jacobian(net, x)))))
    return sup


def check_budget(f: Fnn, budget: BoundBudget) -> BudgetCompliance:
    """Compare a network's measured size against a predicted budget."""
    got = metrics(f)
    return BudgetCompliance(
        measured=got,
        budget=budget,
        depth_ok=got.depth <= math.ceil(budget.depth_bound),
        width_ok=got.max_width <= budget.width_bound,
        weight_ok=got.max_weight <= budget.weight_bound,
        connectivity_ok=(
            None if budget.connectivity_bound is None
            else got.connectivity <= budget.connectivity_bound
        ),
        neuron_ok=(
            None if budget.neuron_bound is None
            else got.neurons <= budget.neuron_bound
        ),
    )


REPORT_COLUMNS = [
    "kind",
    "m",
    "n",
    "D",
    "eps",
    "samples",
    "seed",
    "sup_error",
    "mse",
    "grad_sup_error",
    "L",
    "M",
    "N",
    "W",
    "B",
    "depth_ok",
    "width_ok",
    "weight_ok",
]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "pass" if value else "FAIL"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_row(
    f: Fnn,
    report: ErrorReport,
    compliance: BudgetCompliance | None = None,
) -> list[str]:
    """One CSV row in REPORT_COLUMNS order. Floats use round-trip repr."""
    record = f.record
    got = compliance.measured if compliance is not None else metrics(f)
    values = [
        record.kind if record is not None else "",
        record.m if record is not None else None,
        record.n if record is not None else None,
        record.D if record is not None else None,
        record.eps if record is not None else None,
        report.sample_count,
        report.seed,
        report.sup_error,
        report.mse,
        report.grad_sup_error,
        got.depth,
        got.connectivity,
        got.neurons,
        got.max_width,
        got.max_weight,
        compliance.depth_ok if compliance is not None else None,
        compliance.width_ok if compliance is not None else None,
        compliance.weight_ok if compliance is not None else None,
    ]
    return [_cell(v) for v in values]


def report_lines(
    f: Fnn,
    report: ErrorReport,
    compliance: BudgetCompliance | None = None,
) -> list[str]:
    """Human-readable summary mirroring the CSV row."""
    got = compliance.measured if compliance is not None else metrics(f)
    record = f.record
    lines = []
    if record is not None:
        params = ", ".join(
            f"{name}={value}"
            for name, value in (
                ("m", record.m), ("n", record.n),
                ("D", record.D), ("eps", record.eps),
                ("sawtooth_order", record.sawtooth_order),
            )
            if value is not None
        )
        lines.append(f"network: {record.kind} ({params})")
        lines.append(f"packing: {record.input_packing}")
    lines.append(
        "metrics: "
        f"L={got.depth} M={got.connectivity} N={got.neurons} "
        f"W={got.max_width} B={_cell(got.max_weight)}"
    )
    lines.append(
        f"errors: sup={_cell(report.sup_error)} mse={_cell(report.mse)}"
        + (
            f" grad_sup={_cell(report.grad_sup_error)}"
            if report.grad_sup_error is not None
            else ""
        )
        + f" samples={report.sample_count} seed={report.seed}"
    )
    if report.kinks_skipped:
        lines.append(f"kink-skipped samples: {report.kinks_skipped}")
    if compliance is not None:
        b = compliance.budget
        lines.append(
            "budget: "
            f"depth {got.depth} <= ceil({_cell(b.depth_bound)}) "
            f"[{_cell(compliance.depth_ok)}], "
            f"width {got.max_width} <= {_cell(b.width_bound)} "
            f"[{_cell(compliance.width_ok)}], "
            f"weight {_cell(got.max_weight)} <= {_cell(b.weight_bound)} "
            f"[{_cell(compliance.weight_ok)}]"
        )
        lines.append(f"budget overall: {_cell(compliance.passed)}")
    return lines
