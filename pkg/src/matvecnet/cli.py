"""Command-line front end: build networks, verify bounds, generate data.

Exit codes separate scientific findings from plumbing problems:

* 0: requested work done, all checked bounds hold;
* 1: a verified bound was violated (a definitive counterexample, since the
  empirical sup is a lower bound of the true sup);
* 2: bad usage, out-of-range parameters, or a malformed input file;
* 3: the work was valid but an I/O operation failed.

``--eps`` accepts a decimal ("0.03125") or a power-of-two literal ("2^-5");
the latter avoids decimal-to-binary drift in reports. Verification honors
``--jobs`` without changing any reported number (see the verification
module's fixed-reduction contract).
"""

from __future__ import annotations

import argparse
import csv
import glob
import re
import sys
from pathlib import Path

import numpy as np

from .constructors import (
    complex_matvec_net,
    dot_product_net,
    matvec_net,
    predicted_budget,
    scalar_product_net,
    square_net,
)
from .datasets import (
    equispaced_real_dataset,
    qpsk_rayleigh_dataset,
    save_dataset,
    save_dataset_csv,
)
from .interchange import load_fnn, save_fnn
from .network import evaluate_batch
from .verification import (
    REPORT_COLUMNS,
    ErrorReport,
    check_budget,
    dataset_error_report,
    report_lines,
    report_row,
    sobolev_error_matvec,
    sup_error_matvec,
)

__all__ = ["main", "parse_eps"]

_BUILD_KINDS = ("square", "scalar_product", "dot_product", "matvec", "complex_matvec")


def parse_eps(text: str) -> float:
    """Accuracy from a decimal or a "2^-k" power-of-two literal."""
    match = re.fullmatch(r"2\^(-?\d+)", text.strip())
    if match:
        return 2.0 ** int(match.group(1))
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse eps {text!r}; use a decimal or 2^-k") from None


def _build_network(kind: str, args: argparse.Namespace):
    if kind == "square":
        return square_net(args.eps)
    if args.D is None:
        raise ValueError(f"--D is required to build a {kind} network")
    if kind == "scalar_product":
        return scalar_product_net(args.D, args.eps)
    if args.n is None:
        raise ValueError(f"--n is required to build a {kind} network")
    if kind == "dot_product":
        return dot_product_net(args.n, args.D, args.eps)
    if args.m is None:
        raise ValueError(f"--m is required to build a {kind} network")
    if kind == "matvec":
        return matvec_net(args.m, args.n, args.D, args.eps)
    return complex_matvec_net(args.m, args.n, args.D, args.eps)


def cmd_build(args: argparse.Namespace) -> int:
    if args.eps is None:
        raise ValueError("--eps is required")
    net = _build_network(args.kind, args)
    record = net.record
    budget = predicted_budget(
        args.kind, m=record.m, n=record.n, D=record.D, eps=args.eps, C=args.C,
    )
    compliance = check_budget(net, budget)
    got = compliance.measured
    out = args.out or f"{args.kind}.json"
    save_fnn(net, out, extra_meta={
        "metrics": {
            "L": got.depth,
            "M": got.connectivity,
            "N": got.neurons,
            "W": got.max_width,
            "B": got.max_weight,
        },
        "budget": {
            "target_eps": budget.target_eps,
            "depth_bound": budget.depth_bound,
            "width_bound": budget.width_bound,
            "weight_bound": budget.weight_bound,
            "depth_constant": budget.depth_constant,
        },
    })
    print(f"wrote {out}")
    print(f"packing: {record.input_packing}")
    print(
        f"metrics: L={got.depth} M={got.connectivity} N={got.neurons} "
        f"W={got.max_width} B={got.max_weight!r}"
    )
    if args.kind == "square":
        guaranteed = 2.0 ** (-2 * (record.sawtooth_order + 1))
        print(f"sawtooth order {record.sawtooth_order}, guaranteed sup error {guaranteed!r}")
    print(
        f"budget: depth {got.depth} <= ceil({budget.depth_bound!r}) "
        f"[{'pass' if compliance.depth_ok else 'FAIL'}], "
        f"width {got.max_width} <= {budget.width_bound!r} "
        f"[{'pass' if compliance.width_ok else 'FAIL'}], "
        f"weight {got.max_weight!r} <= {budget.weight_bound!r} "
        f"[{'pass' if compliance.weight_ok else 'FAIL'}]"
    )
    return 0 if compliance.passed else 1


def _append_report(path, net, report, compliance) -> None:
    target = Path(path)
    fresh = not target.exists()
    with open(target, "a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(REPORT_COLUMNS)
        writer.writerow(report_row(net, report, compliance))


def _verify_square(net, args) -> tuple[ErrorReport, float]:
    grid = np.linspace(0.0, 1.0, 2 ** 14 + 1)
    err = np.abs(evaluate_batch(net, grid[:, None])[:, 0] - grid * grid)
    report = ErrorReport(
        sup_error=float(np.max(err)),
        mse=float(np.mean(err * err)),
        grad_sup_error=None,
        sample_count=grid.size,
        seed=int(args.seed),
        domain_half_width=1.0,
    )
    return report, report.sup_error


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        net = load_fnn(args.network)
    except OSError as exc:
        raise ValueError(f"cannot read network file {args.network}: {exc}") from exc
    record = net.record
    if record is None:
        raise ValueError("network file carries no construction record to verify against")
    if record.kind.startswith("affine"):
        raise ValueError("affine networks carry no target accuracy to verify")
    eps = record.eps
    if eps is None:
        raise ValueError("construction record has no eps")
    budget = predicted_budget(
        record.kind, m=record.m, n=record.n, D=record.D, eps=eps, C=args.C,
    )
    compliance = check_budget(net, budget)

    if record.kind == "square":
        if args.sobolev:
            raise ValueError("--sobolev applies to matvec-packed networks only")
        report, worst = _verify_square(net, args)
    elif record.kind == "complex_matvec":
        if args.sobolev:
            raise ValueError("--sobolev applies to matvec-packed networks only")
        ds = qpsk_rayleigh_dataset(
            record.m, record.n, args.samples, clip=record.D, seed=args.seed,
        )
        report = dataset_error_report(net, ds)
        worst = report.sup_error
    else:
        rows = 1 if record.kind in ("scalar_product", "dot_product") else record.m
        cols = 1 if record.kind == "scalar_product" else record.n
        report = sup_error_matvec(
            net, rows, cols, record.D, args.samples, args.seed, jobs=args.jobs,
        )
        worst = report.sup_error
        if args.sobolev:
            sob = sobolev_error_matvec(
                net, rows, cols, record.D, args.samples, args.seed, jobs=args.jobs,
            )
            report = ErrorReport(
                sup_error=report.sup_error,
                mse=report.mse,
                grad_sup_error=sob.grad_sup_error,
                sample_count=report.sample_count,
                seed=report.seed,
                domain_half_width=report.domain_half_width,
                kinks_skipped=sob.kinks_skipped,
            )
            worst = max(worst, sob.sup_error, sob.grad_sup_error)

    for line in report_lines(net, report, compliance):
        print(line)
    _append_report(args.out or "reports.csv", net, report, compliance)
    ok = worst <= eps and compliance.passed
    print(f"verdict: {'ok' if ok else 'BOUND VIOLATED'} (eps={eps!r})")
    return 0 if ok else 1


def cmd_data(args: argparse.Namespace) -> int:
    if args.kind == "equispaced":
        ds = equispaced_real_dataset(
            args.m, args.n, args.count,
            half_width=args.half_width, grid_points=args.grid_points, seed=args.seed,
        )
    else:
        ds = qpsk_rayleigh_dataset(
            args.m, args.n, args.count, clip=args.clip, seed=args.seed,
        )
    out = args.out or f"{args.kind}.csv"
    if str(out).endswith(".json"):
        save_dataset(ds, out)
    else:
        save_dataset_csv(ds, out)
    print(f"wrote {out}")
    print(
        f"rows={len(ds)} input_width={ds.inputs.shape[1]} "
        f"target_width={ds.targets.shape[1]}"
    )
    if "clipped_entries" in ds.meta:
        print(f"clipped entries: {ds.meta['clipped_entries']}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    paths: list[str] = []
    for pattern in args.inputs:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits if hits else [pattern])
    if not paths:
        raise ValueError("no report files given")
    rows: list[list[str]] = []
    for path in paths:
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if row and row[0] != REPORT_COLUMNS[0]:
                    rows.append(row)
    if not rows:
        raise ValueError("no report rows found in the given files")
    widths = [len(name) for name in REPORT_COLUMNS]
    for row in rows:
        for i, cell in enumerate(row[: len(widths)]):
            widths[i] = max(widths[i], len(cell))
    header = "  ".join(name.ljust(widths[i]) for i, name in enumerate(REPORT_COLUMNS))
    print(header)
    print("-" * len(header))
    for row in rows:
        padded = [
            cell.ljust(widths[i]) if i < len(widths) else cell
            for i, cell in enumerate(row)
        ]
        print("  ".join(padded))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matvecnet",
        description="construct, evaluate, and verify product-approximating ReLU networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="construct a network and write it to disk")
    build.add_argument("--kind", choices=_BUILD_KINDS, required=True)
    build.add_argument("--m", type=int, default=None)
    build.add_argument("--n", type=int, default=None)
    build.add_argument("--D", type=float, default=None)
    build.add_argument("--eps", type=parse_eps, default=None)
    build.add_argument("--C", type=float, default=2.0, help="depth-bound constant")
    build.add_argument("--out", default=None)
    build.set_defaults(func=cmd_build)

    verify = sub.add_parser("verify", help="estimate errors of a stored network")
    verify.add_argument("network", help="interchange file produced by build")
    verify.add_argument("--samples", type=int, default=100000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--jobs", type=int, default=1)
    verify.add_argument("--C", type=float, default=2.0)
    verify.add_argument("--sobolev", action="store_true",
                        help="also check the Jacobian against the exact product")
    verify.add_argument("--out", default=None, help="CSV file to append the report row to")
    verify.set_defaults(func=cmd_verify)

    data = sub.add_parser("data", help="generate a verification dataset")
    data.add_argument("--kind", choices=("equispaced", "qpsk"), required=True)
    data.add_argument("--m", type=int, required=True)
    data.add_argument("--n", type=int, required=True)
    data.add_argument("--count", type=int, required=True)
    data.add_argument("--seed", type=int, default=0)
    data.add_argument("--half-width", type=float, default=2.0)
    data.add_argument("--grid-points", type=int, default=1025)
    data.add_argument("--clip", type=float, default=3.0)
    data.add_argument("--out", default=None)
    data.set_defaults(func=cmd_data)

    report = sub.add_parser("report", help="tabulate rows from verify CSV files")
    report.add_argument("inputs", nargs="*", help="CSV files or globs")
    report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
