"""Constructions of approximating and exact networks for products.

The starting point is the classical sawtooth approximation of squaring on
[0,1]: with the hat function g(x) = 2rho(x) - 4rho(x - 1/2) + 2rho(x - 1)
and its s-fold composition g_s, the piecewise-linear interpolant of x^2 on
the dyadic grid of level m is

    f_m(x) = x - sum_{s=1}^{m} g_s(x) / 4^s,

and sup_{[0,1]} |f_m(x) - x^2| = 2^(-2(m+1)), attained at the grid
midpoints. :func:`square_net_of_order` realizes f_m with width-4 layers: one
channel triple tracks (rho(g_{s-1}), rho(g_{s-1} - 1/2), rho(g_{s-1} - 1))
and a fourth carries the running partial sum, which is nonnegative on [0,1]
and therefore passes through the rectifier unchanged.

Squaring upgrades to multiplication through the polarization identity

    w x = 2 D^2 ( (|w+x| / 2D)^2 - (|w| / 2D)^2 - (|x| / 2D)^2 ),

valid on [-D, D]^2 where every |.| / 2D lands in [0, 1]. Absolute values
cost one layer via |t| = rho(t) + rho(-t), the 1/(2D) scaling folds into the
square networks' first layers, and the 2D^2 output scaling folds into the
last layer, so only the rectified layers contribute depth. Dot products sum
n such pair networks, matrix-vector products stack m dot products over a
shared packed input, and the complex version combines four real blocks into
real and imaginary parts.

Two accuracy knobs drive the sawtooth order m of the embedded square
networks. The value bound needs 3 * 2D^2 * 2^(-2(m+1)) <= eps, i.e.
2^(-2(m+1)) <= eps / (6 D^2). The slopes of f_m satisfy
|f_m'(t) - 2t| <= 2^(-m) away from kinks, which propagates through the
polarization to a gradient deviation of at most 2D * 2^(-m) per partial
derivative, so the order is raised until 2D * 2^(-m) <= eps as well. That
makes every product network here accurate to eps in value and in (almost
everywhere) gradient on its domain, at the price of a few extra layers over
what the value bound alone would need.

Exactness guarantees worth knowing about:

* every product network returns exactly 0.0 when either factor is zero,
  because the three embedded square networks then receive pairwise equal or
  zero inputs and their contributions cancel termwise in the final
  accumulation (see :func:`scalar_product_net` for the mechanism);
* :func:`affine_representation` computes Wx exactly (up to the usual dot
  product rounding), with closed-form connectivity counts;
* f_m interpolates x^2 at dyadic points, so e.g. square_net(eps)(1/2) is
  0.25 on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2
from typing import Any, Mapping

import numpy as np

from .calculus import (
    compose_selection,
    concatenate,
    identity_fnn,
    parallelize_shared,
    superpose,
)
from .network import Fnn, Layer

__all__ = [
    "KINDS",
    "ConstructionRecord",
    "BoundBudget",
    "sawtooth_order",
    "square_net_of_order",
    "square_net",
    "scalar_product_net",
    "dot_product_net",
    "matvec_net",
    "complex_matvec_net",
    "affine_representation",
    "predicted_budget",
]

KINDS = frozenset({
    "square",
    "scalar_product",
    "dot_product",
    "matvec",
    "complex_matvec",
    "affine_v1",
    "affine_v2",
    "affine_v3",
})


@dataclass(frozen=True)
class ConstructionRecord:
    """Provenance attached to a constructed network.

    ``kind`` names the construction family, the numeric fields are the
    parameters it was built from (unused ones stay None), ``sawtooth_order``
    is the order of the embedded squaring networks, and ``input_packing``
    spells out the coordinate layout the network expects.
    """

    kind: str
    input_packing: str
    m: int | None = None
    n: int | None = None
    D: float | None = None
    eps: float | None = None
    sawtooth_order: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown construction kind {self.kind!r}")

    def as_meta(self) -> dict[str, Any]:
        """JSON-safe dict for the interchange file's meta block."""
        return {
            "kind": self.kind,
            "input_packing": self.input_packing,
            "m": self.m,
            "n": self.n,
            "D": self.D,
            "eps": self.eps,
            "sawtooth_order": self.sawtooth_order,
        }

    @classmethod
    def from_meta(cls, meta: Mapping[str, Any]) -> "ConstructionRecord":
        m = meta.get("m")
        n = meta.get("n")
        saw = meta.get("sawtooth_order")
        D = meta.get("D")
        eps = meta.get("eps")
        return cls(
            kind=str(meta["kind"]),
            input_packing=str(meta.get("input_packing", "")),
            m=None if m is None else int(m),
            n=None if n is None else int(n),
            D=None if D is None else float(D),
            eps=None if eps is None else float(eps),
            sawtooth_order=None if saw is None else int(saw),
        )


@dataclass(frozen=True)
class BoundBudget:
    """Size budget predicted by the closed-form bounds for a construction.

    ``depth_bound`` is the real number depth_constant * log2(...); callers
    compare against its ceiling. It may come out nonpositive (accuracy looser
    than the domain allows, eps >= D^2), in which case no network can comply
    and the check reports that honestly. Width and weight bounds are exact
    positive numbers a compliant network must not exceed. Connectivity and
    neuron bounds stay None where no closed form is claimed.
    """

    target_eps: float
    depth_bound: float
    width_bound: float
    weight_bound: float
    connectivity_bound: float | None = None
    neuron_bound: float | None = None
    depth_constant: float = 2.0

    def __post_init__(self) -> None:
        if not self.target_eps > 0:
            raise ValueError("target_eps must be positive")
        if not self.depth_constant > 0:
            raise ValueError("depth_constant must be positive")
        if not np.isfinite(self.depth_bound):
            raise ValueError(f"depth_bound must be finite, got {self.depth_bound}")
        for label, value in (
            ("width_bound", self.width_bound),
            ("weight_bound", self.weight_bound),
            ("connectivity_bound", self.connectivity_bound),
            ("neuron_bound", self.neuron_bound),
        ):
            if value is not None and not value > 0:
                raise ValueError(f"{label} must be positive, got {value}")


def sawtooth_order(delta: float) -> int:
    """Smallest order m with 2^(-2(m+1)) <= delta.

    This is the interpolation level at which f_m approximates x^2 on [0,1]
    to within delta. Powers of two are exact in binary floating point, so
    the loop below is free of rounding subtleties.
    """
    if not delta > 0:
        raise ValueError(f"accuracy must be positive, got {delta}")
    order = 0
    while 2.0 ** (-2 * (order + 1)) > delta:
        order += 1
    return order


def square_net_of_order(order: int) -> Fnn:
    """Width-4 network computing the interpolant f_order of x^2 on [0,1].

    Order 0 is the identity (f_0(x) = x). For order >= 1 the depth is
    order + 1: one splitting layer, order - 1 sawtooth transitions, and an
    affine readout. Weight magnitudes never exceed 4.
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    if order == 0:
        net = identity_fnn(1, 1)
    else:
        hat = np.array([2.0, -4.0, 2.0, 0.0])
        thresholds = np.array([0.0, -0.5, -1.0])
        layers = [Layer(np.ones((4, 1)), np.array([0.0, -0.5, -1.0, 0.0]))]
        for s in range(1, order):
            w = np.vstack([
                np.vstack([hat, hat, hat]),
                np.array([-2.0 / 4.0 ** s, 4.0 / 4.0 ** s, -2.0 / 4.0 ** s, 1.0]),
            ])
            layers.append(Layer(w, np.append(thresholds, 0.0)))
        readout = np.array([[-2.0 / 4.0 ** order, 4.0 / 4.0 ** order,
                             -2.0 / 4.0 ** order, 1.0]])
        layers.append(Layer(readout, np.zeros(1)))
        net = Fnn(tuple(layers))
    record = ConstructionRecord(
        kind="square",
        input_packing="x (scalar in [0,1])",
        sawtooth_order=order,
    )
    return net.with_record(record)


def square_net(eps: float) -> Fnn:
    """Approximate squaring on [0,1] with sup error at most eps.

    Picks the smallest sawtooth order meeting the bound; the resulting
    error is exactly 2^(-2(order+1)), attained midway between neighbouring
    dyadic grid points. The network output at 0 is exactly 0.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    order = sawtooth_order(eps)
    net = square_net_of_order(order)
    record = ConstructionRecord(
        kind="square",
        input_packing="x (scalar in [0,1])",
        eps=float(eps),
        sawtooth_order=order,
    )
    return net.with_record(record)


_ABS_PAIRS = np.array([
    [1.0, 1.0],
    [-1.0, -1.0],
    [1.0, 0.0],
    [-1.0, 0.0],
    [0.0, 1.0],
    [0.0, -1.0],
])


def _product_order(D: float, eps: float) -> int:
    """Sawtooth order for a scalar product accurate to eps in value and slope.

    The value requirement is 2^(-2(m+1)) <= eps / (6 D^2); the slope
    requirement, coming from |f_m'(t) - 2t| <= 2^(-m) pushed through the
    polarization identity, is 2D * 2^(-m) <= eps. The returned m is the
    smallest satisfying both.
    """
    order = sawtooth_order(eps / (6.0 * D * D))
    while 2.0 * D * 2.0 ** (-order) > eps:
        order += 1
    return order


def scalar_product_net(D: float, eps: float) -> Fnn:
    """Network approximating (w, x) -> w*x on [-D, D]^2 to within eps.

    Structure, front to back: a 6-neuron layer computing rho(+-(w+x)),
    rho(+-w), rho(+-x); three parallel squaring networks reading the channel
    pair sums scaled by 1/(2D); a 3-neuron layer holding the three square
    outputs (nonnegative, so rectification is the identity on them); and a
    readout row 2D^2 * (1, -1, -1).

    Keeping the three square outputs as separate neurons makes the
    vanishing guarantee exact rather than approximate: at w = 0 the first
    and third squaring networks receive bitwise identical inputs and the
    second receives zero, so the readout computes q - 0 - q = 0.0 in
    floating point, and symmetrically at x = 0. Folding the readout into
    the previous layer would interleave the three partial sums and lose
    this cancellation.

    Width is at most 12 and weight magnitudes at most max(4, 2 D^2, 1/(2D)).
    For D >= 1/8 the last term is dominated, matching the claimed bound
    max(4, 2 D^2).
    """
    if not D > 0:
        raise ValueError(f"D must be positive, got {D}")
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    order = _product_order(D, eps)
    square = square_net_of_order(order)
    gamma = 1.0 / (2.0 * D)
    branches = []
    for pair in range(3):
        row = np.zeros((1, 6))
        row[0, 2 * pair] = gamma
        row[0, 2 * pair + 1] = gamma
        branches.append(concatenate(square, Fnn((Layer(row, np.zeros(1)),))))
    combined = parallelize_shared(branches)
    absolute = Fnn((
        Layer(_ABS_PAIRS, np.zeros(6)),
        Layer(np.eye(6), np.zeros(6)),
    ))
    core = concatenate(combined, absolute)
    scale = 2.0 * D * D
    readout = Fnn((
        Layer(np.eye(3), np.zeros(3)),
        Layer(np.array([[scale, -scale, -scale]]), np.zeros(1)),
    ))
    net = concatenate(readout, core)
    record = ConstructionRecord(
        kind="scalar_product",
        input_packing="(w, x)",
        D=float(D),
        eps=float(eps),
        sawtooth_order=order,
    )
    return net.with_record(record)


def dot_product_net(n: int, D: float, eps: float) -> Fnn:
    """Network approximating (w, x) -> <w, x> on [-D, D]^(2n) to within eps.

    Input packing is (w_1 ... w_n, x_1 ... x_n). The network is the sum of n
    scalar product networks of accuracy eps / n, each rewired to read its
    coordinate pair (w_i, x_i); errors add up to at most eps. Zeroing either
    w or x zeroes the output exactly, term by term.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    scalar = scalar_product_net(D, eps / n)
    terms = []
    for i in range(n):
        selector = np.zeros((2, 2 * n))
        selector[0, i] = 1.0
        selector[1, n + i] = 1.0
        terms.append(compose_selection(scalar, selector))
    net = superpose(terms, [1.0] * n, shared_input=True)
    record = ConstructionRecord(
        kind="dot_product",
        input_packing=f"(w_1..w_{n}, x_1..x_{n})",
        n=n,
        D=float(D),
        eps=float(eps),
        sawtooth_order=scalar.record.sawtooth_order,
    )
    return net.with_record(record)


def _matvec_branches(m: int, n: int, D: float, eps: float) -> list[Fnn]:
    """The m row networks of a matrix-vector product over packed input.

    The packed input is [vec(W) column-major (m*n entries), x (n entries)],
    so entry W[i, j] sits at coordinate j*m + i and x[j] at n*m + j. Branch
    i reads (W[i, :], x) through a selection and approximates <W[i, :], x>.
    """
    dot = dot_product_net(n, D, eps)
    width = n * (m + 1)
    branches = []
    for i in range(m):
        selector = np.zeros((2 * n, width))
        for j in range(n):
            selector[j, j * m + i] = 1.0
            selector[n + j, n * m + j] = 1.0
        branches.append(compose_selection(dot, selector))
    return branches


def matvec_net(m: int, n: int, D: float, eps: float) -> Fnn:
    """Network approximating (W, x) -> Wx with entries in [-D, D].

    Input packing is [vec(W) column-major, x]; output has m coordinates,
    each accurate to eps in sup norm. Built as m dot product networks of
    accuracy eps over a shared packed input. Width stays at or below 12mn
    and weights below max(4, 2D^2) for D >= 1/8. W = 0 or x = 0 gives the
    exact zero vector.
    """
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be at least 1, got m={m}, n={n}")
    net = parallelize_shared(_matvec_branches(m, n, D, eps))
    record = ConstructionRecord(
        kind="matvec",
        input_packing=f"[vec(W) column-major ({m * n}), x ({n})]",
        m=m,
        n=n,
        D=float(D),
        eps=float(eps),
        sawtooth_order=_product_order(D, eps / n),
    )
    return net.with_record(record)


def complex_matvec_net(m: int, n: int, D: float, eps: float) -> Fnn:
    """Network approximating complex Wx, given as real and imaginary parts.

    Input packing is [vec(W1), vec(W2), x1, x2] (column-major matrix blocks,
    width 2n(m+1)); the output stacks p1 = W1 x1 - W2 x2 over
    p2 = W1 x2 + W2 x1, each coordinate accurate to eps when all entries lie
    in [-D, D]. Four real matrix-vector blocks of accuracy eps / 4 are
    paired off by superposition into the two parts, so each part's error is
    at most eps / 2. Width stays at or below 48mn.
    """
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be at least 1, got m={m}, n={n}")
    core = matvec_net(m, n, D, eps / 4.0)
    block = n * m
    width = 2 * n * (m + 1)

    def picked(w_offset: int, x_offset: int) -> Fnn:
        selector = np.zeros((n * (m + 1), width))
        for c in range(block):
            selector[c, w_offset + c] = 1.0
        for j in range(n):
            selector[block + j, x_offset + j] = 1.0
        return compose_selection(core, selector)

    w1, w2, x1, x2 = 0, block, 2 * block, 2 * block + n
    real_part = superpose([picked(w1, x1), picked(w2, x2)], [1.0, -1.0],
                          shared_input=True)
    imag_part = superpose([picked(w1, x2), picked(w2, x1)], [1.0, 1.0],
                          shared_input=True)
    net = parallelize_shared([real_part, imag_part])
    record = ConstructionRecord(
        kind="complex_matvec",
        input_packing=(
            f"[vec(W1) column-major ({block}), vec(W2) column-major ({block}), "
            f"x1 ({n}), x2 ({n})]"
        ),
        m=m,
        n=n,
        D=float(D),
        eps=float(eps),
        sawtooth_order=_product_order(D, eps / (4.0 * n)),
    )
    return net.with_record(record)


def affine_representation(W, variant: int, K: int | None = None) -> Fnn:
    """Exact network realizations of x -> Wx with known connectivity.

    Variant 1 is the depth-2 form: split into (rho(Wx), rho(-Wx)) and
    recombine, using 2 nnz(W) + 2m nonzero weights. Variants 2 and 3 take a
    prescribed depth K >= 3 and differ in where the matrix sits: variant 2
    transports (rho(x), rho(-x)) through identity layers and applies
    [[W, -W], [-W, W]] second to last, costing 2m + 2(K-2)n + 4 nnz(W);
    variant 3 applies the matrix first and transports the split image,
    costing 2Km + 2 nnz(W). Either way the computed function is exactly Wx
    because at every stage one channel of each (+, -) pair is zero.
    """
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2:
        raise ValueError("W must be a matrix")
    m, n = W.shape
    if variant not in (1, 2, 3):
        raise ValueError(f"variant must be 1, 2 or 3, got {variant}")
    if variant == 1:
        if K is not None and K != 2:
            raise ValueError("variant 1 has depth 2; do not pass K")
        layers = (
            Layer(np.vstack([W, -W]), np.zeros(2 * m)),
            Layer(np.hstack([np.eye(m), -np.eye(m)]), np.zeros(m)),
        )
    else:
        if K is None or K < 3:
            raise ValueError(f"variants 2 and 3 need a depth K >= 3, got {K}")
        if variant == 2:
            eye = np.eye(n)
            layers = (
                (Layer(np.vstack([eye, -eye]), np.zeros(2 * n)),)
                + tuple(Layer(np.eye(2 * n), np.zeros(2 * n)) for _ in range(K - 3))
                + (
                    Layer(np.block([[W, -W], [-W, W]]), np.zeros(2 * m)),
                    Layer(np.hstack([np.eye(m), -np.eye(m)]), np.zeros(m)),
                )
            )
        else:
            eye = np.eye(m)
            layers = (
                (
                    Layer(np.vstack([W, -W]), np.zeros(2 * m)),
                    Layer(np.block([[eye, -eye], [-eye, eye]]), np.zeros(2 * m)),
                )
                + tuple(Layer(np.eye(2 * m), np.zeros(2 * m)) for _ in range(K - 3))
                + (Layer(np.hstack([eye, -eye]), np.zeros(m)),)
            )
    record = ConstructionRecord(
        kind=f"affine_v{variant}",
        input_packing=f"x ({n})",
        m=m,
        n=n,
    )
    return Fnn(layers).with_record(record)


def predicted_budget(
    kind: str,
    m: int | None = None,
    n: int | None = None,
    D: float | None = None,
    eps: float | None = None,
    C: float = 2.0,
) -> BoundBudget:
    """Closed-form size budget a constructed network is expected to meet.

    Depth bounds are C * log2 of the relevant accuracy ratio (1/eps for
    squaring, n D^2 / eps for dot and matrix-vector products with an extra
    factor 4 in the complex case); compare actual depth against the
    ceiling. Width bounds are 4, 12, 12n, 12mn, 48mn along the same scale,
    and the weight bound is max(4, 2 D^2) whenever a domain half-width is
    involved. No closed-form connectivity or neuron bounds are claimed, so
    those stay None.
    """
    if eps is None or not 0.0 < eps:
        raise ValueError("eps must be given and positive")
    if kind == "square":
        return BoundBudget(
            target_eps=eps,
            depth_bound=C * log2(1.0 / eps),
            width_bound=4.0,
            weight_bound=4.0,
            depth_constant=C,
        )
    if D is None or not D > 0:
        raise ValueError("D must be given and positive")
    weight = max(4.0, 2.0 * D * D)
    if kind == "scalar_product":
        return BoundBudget(
            target_eps=eps,
            depth_bound=C * log2(D * D / eps),
            width_bound=12.0,
            weight_bound=weight,
            depth_constant=C,
        )
    if n is None or n < 1:
        raise ValueError("n must be given and at least 1")
    if kind == "dot_product":
        return BoundBudget(
            target_eps=eps,
            depth_bound=C * log2(n * D * D / eps),
            width_bound=12.0 * n,
            weight_bound=weight,
            depth_constant=C,
        )
    if m is None or m < 1:
        raise ValueError("m must be given and at least 1")
    if kind == "matvec":
        return BoundBudget(
            target_eps=eps,
            depth_bound=C * log2(n * D * D / eps),
            width_bound=12.0 * m * n,
            weight_bound=weight,
            depth_constant=C,
        )
    if kind == "complex_matvec":
        return BoundBudget(
            target_eps=eps,
            depth_bound=C * log2(4.0 * n * D * D / eps),
            width_bound=48.0 * m * n,
            weight_bound=weight,
            depth_constant=C,
        )
    raise ValueError(f"no budget formula for kind {kind!r}")
