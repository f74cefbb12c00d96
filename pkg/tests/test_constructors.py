"""Product approximators and exact affine forms.

The squaring network interpolates x^2 on a dyadic grid, so a lot of what
looks approximate is actually exact at grid points, and the worst-case error
is an exact power of two. Tests lean on that: bit equality where the
construction promises it, tolerances only where rounding genuinely enters.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matvecnet import (
    BoundBudget,
    ConstructionRecord,
    affine_representation,
    check_budget,
    complex_matvec_net,
    dot_product_net,
    evaluate,
    evaluate_batch,
    matvec_net,
    metrics,
    pack_complex,
    pack_matvec,
    predicted_budget,
    sawtooth_order,
    scalar_product_net,
    square_net,
    square_net_of_order,
)


# ---------------------------------------------------------------- squaring


def test_sawtooth_order_at_exact_powers():
    for m in range(11):
        assert sawtooth_order(2.0 ** (-2 * (m + 1))) == m
    assert sawtooth_order(0.25) == 0
    assert sawtooth_order(0.24) == 1
    with pytest.raises(ValueError):
        sawtooth_order(0.0)


def test_square_net_of_order_shape():
    assert square_net_of_order(0).depth == 1
    for order in (1, 3, 7):
        net = square_net_of_order(order)
        got = metrics(net)
        assert got.depth == order + 1
        assert got.max_width == 4
        # the hat rows carrying the -4 only appear from the first transition
        # layer on, so order 1 tops out at 1
        assert got.max_weight == (4.0 if order >= 2 else 1.0)
        assert got.connectivity == 15 * order - 5
    with pytest.raises(ValueError):
        square_net_of_order(-1)


def test_square_net_exact_at_dyadic_grid():
    net = square_net_of_order(4)
    for k in range(17):
        x = k / 16.0
        assert evaluate(net, np.array([x]))[0] == x * x


def test_square_net_midpoint_error_is_exact_power_of_two():
    for order in (1, 2, 5):
        net = square_net_of_order(order)
        worst = 2.0 ** (-2 * (order + 1))
        for k in (0, 1, 2 ** order - 1):
            x = (2 * k + 1) / 2.0 ** (order + 1)
            err = evaluate(net, np.array([x]))[0] - x * x
            assert err == worst


def test_square_net_picks_minimal_order():
    net = square_net(2.0 ** -6)
    assert net.record.sawtooth_order == sawtooth_order(2.0 ** -6) == 2
    grid = np.linspace(0.0, 1.0, 1025)[:, None]
    err = np.abs(evaluate_batch(net, grid)[:, 0] - grid[:, 0] ** 2)
    assert err.max() == 2.0 ** (-2 * (2 + 1))
    assert err.max() <= 2.0 ** -6


def test_square_net_rejects_out_of_range_eps():
    for bad in (0.0, 0.5, 0.75, -0.1):
        with pytest.raises(ValueError):
            square_net(bad)


@settings(deadline=None, max_examples=25)
@given(order=st.integers(min_value=0, max_value=8), k=st.integers(min_value=0, max_value=255))
def test_square_net_never_exceeds_its_error_law(order, k):
    net = square_net_of_order(order)
    x = k / 255.0
    err = abs(evaluate(net, np.array([x]))[0] - x * x)
    assert err <= 2.0 ** (-2 * (order + 1))


# ---------------------------------------------------------------- scalar product


def test_scalar_product_grid_accuracy():
    D, eps = 2.0, 2.0 ** -5
    net = scalar_product_net(D, eps)
    axis = np.linspace(-D, D, 129)
    w, x = np.meshgrid(axis, axis)
    pts = np.column_stack([w.ravel(), x.ravel()])
    out = evaluate_batch(net, pts)[:, 0]
    assert np.abs(out - pts[:, 0] * pts[:, 1]).max() <= eps


def test_scalar_product_vanishes_exactly_on_zero_factor():
    net = scalar_product_net(3.0, 2.0 ** -4)
    rng = np.random.default_rng(17)
    for _ in range(100):
        t = rng.uniform(-3.0, 3.0)
        assert evaluate(net, np.array([0.0, t]))[0] == 0.0
        assert evaluate(net, np.array([t, 0.0]))[0] == 0.0


def test_scalar_product_is_symmetric_to_rounding():
    # swapping the factors swaps two addends in the readout, which can move
    # the result by a few ulps but no more
    net = scalar_product_net(2.0, 2.0 ** -5)
    rng = np.random.default_rng(18)
    pts = rng.uniform(-2.0, 2.0, size=(5000, 2))
    fwd = evaluate_batch(net, pts)[:, 0]
    rev = evaluate_batch(net, pts[:, ::-1])[:, 0]
    assert np.abs(fwd - rev).max() <= 1e-14


def test_scalar_product_depth_tracks_sawtooth_order():
    net = scalar_product_net(2.0, 2.0 ** -5)
    assert net.record.sawtooth_order == 7
    assert net.depth == 7 + 3
    got = metrics(net)
    assert got.max_width <= 12
    assert got.max_weight == 8.0  # the 2 D^2 output scale


def test_scalar_product_order_zero_degenerates_gracefully():
    net = scalar_product_net(0.1, 0.4)
    assert net.record.sawtooth_order == 0
    assert net.depth == 3
    rng = np.random.default_rng(19)
    pts = rng.uniform(-0.1, 0.1, size=(500, 2))
    out = evaluate_batch(net, pts)[:, 0]
    assert np.abs(out - pts[:, 0] * pts[:, 1]).max() <= 0.4


def test_scalar_product_small_domain_weight_excess_is_reported():
    # for D < 1/8 the folded 1/(2D) input scaling exceeds the claimed
    # max(4, 2 D^2) weight bound; the budget check must say so rather than
    # the construction silently rescaling
    D = 1.0 / 16.0
    net = scalar_product_net(D, 2.0 ** -5)
    assert metrics(net).max_weight == 8.0
    budget = predicted_budget("scalar_product", D=D, eps=2.0 ** -5)
    assert budget.weight_bound == 4.0
    assert check_budget(net, budget).weight_ok is False


def test_scalar_product_rejects_bad_arguments():
    with pytest.raises(ValueError):
        scalar_product_net(0.0, 0.1)
    with pytest.raises(ValueError):
        scalar_product_net(1.0, 0.5)


# ---------------------------------------------------------------- dot product


def test_dot_product_single_pair_matches_scalar_network():
    one = dot_product_net(1, 2.0, 2.0 ** -4)
    scalar = scalar_product_net(2.0, 2.0 ** -4)
    assert one.depth == scalar.depth
    for got, want in zip(one.layers, scalar.layers):
        assert np.array_equal(got.weights, want.weights)
        assert np.array_equal(got.bias, want.bias)


def test_dot_product_accuracy_and_vanishing():
    n, D, eps = 3, 1.5, 2.0 ** -4
    net = dot_product_net(n, D, eps)
    rng = np.random.default_rng(23)
    pts = rng.uniform(-D, D, size=(2000, 2 * n))
    out = evaluate_batch(net, pts)[:, 0]
    truth = np.sum(pts[:, :n] * pts[:, n:], axis=1)
    assert np.abs(out - truth).max() <= eps
    for _ in range(30):
        x = rng.uniform(-D, D, size=n)
        assert evaluate(net, np.concatenate([np.zeros(n), x]))[0] == 0.0
        assert evaluate(net, np.concatenate([x, np.zeros(n)]))[0] == 0.0


def test_dot_product_width_scales_linearly():
    net = dot_product_net(4, 1.0, 2.0 ** -3)
    assert metrics(net).max_width <= 12 * 4
    assert net.input_dim == 8


# ---------------------------------------------------------------- matvec


def test_matvec_accuracy_against_dense_product():
    m, n, D, eps = 2, 3, 1.5, 2.0 ** -4
    net = matvec_net(m, n, D, eps)
    rng = np.random.default_rng(29)
    for _ in range(50):
        W = rng.uniform(-D, D, size=(m, n))
        x = rng.uniform(-D, D, size=n)
        out = evaluate(net, pack_matvec(W, x))
        assert np.abs(out - W @ x).max() <= eps


def test_matvec_vanishing_and_budget():
    m, n, D, eps = 2, 2, 1.0, 2.0 ** -4
    net = matvec_net(m, n, D, eps)
    rng = np.random.default_rng(31)
    x = rng.uniform(-D, D, size=n)
    W = rng.uniform(-D, D, size=(m, n))
    assert np.array_equal(evaluate(net, pack_matvec(np.zeros((m, n)), x)), np.zeros(m))
    assert np.array_equal(evaluate(net, pack_matvec(W, np.zeros(n))), np.zeros(m))
    budget = predicted_budget("matvec", m=m, n=n, D=D, eps=eps)
    compliance = check_budget(net, budget)
    assert compliance.passed
    assert metrics(net).max_width <= 12 * m * n


def test_matvec_packing_is_column_major():
    # W[i, j] sits at coordinate j*m + i: bump one entry and only row i moves
    m, n, D, eps = 3, 2, 1.0, 2.0 ** -3
    net = matvec_net(m, n, D, eps)
    W = np.zeros((m, n))
    W[2, 1] = 0.75
    x = np.array([0.5, 0.5])
    packed = pack_matvec(W, x)
    assert packed[1 * m + 2] == 0.75
    out = evaluate(net, packed)
    assert out[0] == 0.0 and out[1] == 0.0
    assert abs(out[2] - 0.375) <= eps


def test_matvec_frozen_operating_point():
    net = matvec_net(8, 4, 2.0, 2.0 ** -5)
    assert net.record.sawtooth_order == 9
    assert net.depth == 12
    got = metrics(net)
    assert got.max_width == 384
    assert got.max_weight == 8.0


def test_matvec_rejects_bad_shape_arguments():
    with pytest.raises(ValueError):
        matvec_net(0, 2, 1.0, 0.1)
    with pytest.raises(ValueError):
        matvec_net(2, 0, 1.0, 0.1)


# ---------------------------------------------------------------- complex matvec


def test_complex_matvec_accuracy():
    m, n, D, eps = 2, 2, 1.0, 2.0 ** -4
    net = complex_matvec_net(m, n, D, eps)
    rng = np.random.default_rng(37)
    for _ in range(40):
        W = rng.uniform(-D, D, size=(m, n)) + 1j * rng.uniform(-D, D, size=(m, n))
        x = rng.uniform(-D, D, size=n) + 1j * rng.uniform(-D, D, size=n)
        out = evaluate(net, pack_complex(W.real, W.imag, x.real, x.imag))
        product = W @ x
        assert np.abs(out[:m] - product.real).max() <= eps
        assert np.abs(out[m:] - product.imag).max() <= eps


def test_complex_matvec_real_inputs_give_exact_zero_imaginary_part():
    m, n = 2, 2
    net = complex_matvec_net(m, n, 1.0, 2.0 ** -4)
    rng = np.random.default_rng(41)
    W1 = rng.uniform(-1.0, 1.0, size=(m, n))
    x1 = rng.uniform(-1.0, 1.0, size=n)
    out = evaluate(net, pack_complex(W1, np.zeros((m, n)), x1, np.zeros(n)))
    assert np.array_equal(out[m:], np.zeros(m))


def test_complex_matvec_width_and_frozen_point():
    net = complex_matvec_net(8, 4, 3.0, 2.0 ** -5)
    assert net.record.sawtooth_order == 12
    assert net.depth == 15
    got = metrics(net)
    assert got.max_width == 1536
    assert got.max_width <= 48 * 8 * 4
    assert got.max_weight == 18.0


# ---------------------------------------------------------------- affine forms


def affine_nnz(W):
    return int(np.count_nonzero(W))


def test_affine_variant1_connectivity_and_value():
    rng = np.random.default_rng(43)
    W = rng.normal(size=(3, 4))
    W[rng.random(W.shape) < 0.3] = 0.0
    net = affine_representation(W, 1)
    assert net.depth == 2
    assert metrics(net).connectivity == 2 * affine_nnz(W) + 2 * 3
    for _ in range(20):
        x = rng.normal(size=4)
        want = W @ x
        scale = max(1.0, np.abs(want).max())
        assert np.abs(evaluate(net, x) - want).max() <= 1e-9 * scale


def test_affine_variant2_connectivity_formula():
    rng = np.random.default_rng(47)
    W = rng.normal(size=(3, 4))
    W[rng.random(W.shape) < 0.3] = 0.0
    K = 6
    net = affine_representation(W, 2, K=K)
    assert net.depth == K
    expected = 2 * 3 + 2 * (K - 2) * 4 + 4 * affine_nnz(W)
    assert metrics(net).connectivity == expected


def test_affine_variant3_hand_counted_example():
    W = np.array([
        [1.0, 0.0, 2.0],
        [0.0, 3.0, 0.0],
    ])
    W2 = np.array([[4.0], [5.0]])
    W = np.hstack([W, W2])  # 2 x 4 with 5 nonzeros
    net = affine_representation(W, 3, K=4)
    assert net.depth == 4
    assert metrics(net).connectivity == 2 * 4 * 2 + 2 * 5  # 2Km + 2 nnz = 26
    x = np.array([1.0, -2.0, 0.5, 0.25])
    assert np.abs(evaluate(net, x) - W @ x).max() <= 1e-12


def test_affine_variants_agree_on_random_matrices():
    rng = np.random.default_rng(53)
    for _ in range(10):
        m, n = rng.integers(1, 5, size=2)
        W = rng.normal(size=(m, n))
        W[rng.random(W.shape) < 0.4] = 0.0
        K = int(rng.integers(3, 7))
        nets = [
            affine_representation(W, 1),
            affine_representation(W, 2, K=K),
            affine_representation(W, 3, K=K),
        ]
        for _ in range(20):
            x = rng.normal(size=n)
            want = W @ x
            scale = max(1.0, np.abs(want).max())
            for net in nets:
                assert np.abs(evaluate(net, x) - want).max() <= 1e-9 * scale


def test_affine_rejects_bad_arguments():
    W = np.eye(2)
    with pytest.raises(ValueError):
        affine_representation(W, 4)
    with pytest.raises(ValueError):
        affine_representation(W, 1, K=3)
    with pytest.raises(ValueError):
        affine_representation(W, 2, K=2)
    with pytest.raises(ValueError):
        affine_representation(W, 3)
    with pytest.raises(ValueError):
        affine_representation(np.ones(3), 1)


# ---------------------------------------------------------------- budgets, records


def test_predicted_budget_matvec_example():
    budget = predicted_budget("matvec", m=8, n=4, D=2.0, eps=2.0 ** -5, C=2.0)
    assert budget.depth_bound == 18.0
    assert budget.width_bound == 384.0
    assert budget.weight_bound == 8.0
    assert budget.connectivity_bound is None


def test_predicted_budget_complex_example():
    budget = predicted_budget("complex_matvec", m=8, n=4, D=3.0, eps=2.0 ** -5, C=1.0)
    assert abs(budget.depth_bound - np.log2(4608.0)) <= 1e-12
    assert int(np.ceil(budget.depth_bound)) == 13
    assert budget.width_bound == 1536.0
    assert budget.weight_bound == 18.0


def test_predicted_budget_rejects_missing_parameters():
    with pytest.raises(ValueError):
        predicted_budget("matvec", m=8, n=4, D=2.0)
    with pytest.raises(ValueError):
        predicted_budget("dot_product", eps=0.1)
    with pytest.raises(ValueError):
        predicted_budget("nonsense", D=1.0, eps=0.1, m=1, n=1)


def test_bound_budget_validates_positivity():
    with pytest.raises(ValueError):
        BoundBudget(target_eps=0.0, depth_bound=1.0, width_bound=1.0, weight_bound=1.0)
    with pytest.raises(ValueError):
        BoundBudget(target_eps=0.1, depth_bound=1.0, width_bound=-1.0, weight_bound=1.0)
    # a nonpositive depth bound is a legitimate vacuous claim, not an error
    vacuous = BoundBudget(target_eps=0.1, depth_bound=-6.0, width_bound=12.0, weight_bound=4.0)
    assert vacuous.depth_bound == -6.0


def test_construction_record_round_trip():
    nets = [
        square_net(2.0 ** -4),
        scalar_product_net(1.0, 2.0 ** -3),
        matvec_net(2, 3, 1.0, 2.0 ** -3),
        complex_matvec_net(2, 2, 1.0, 2.0 ** -3),
        affine_representation(np.eye(2), 1),
    ]
    for net in nets:
        meta = net.record.as_meta()
        assert ConstructionRecord.from_meta(meta) == net.record


def test_construction_record_rejects_unknown_kind():
    with pytest.raises(ValueError):
        ConstructionRecord(kind="mystery", input_packing="x")
