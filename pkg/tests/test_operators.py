import numpy as np

from fracloop.loops import loop_product, make_loop
from fracloop.operators import (
    BlockOperator, ModeWindow, commutator, interior_restrict,
    sign_operator, toeplitz_embed,
)
from fracloop.sampling import random_loop, rng_for


def test_mode_window_indexing():
    w = ModeWindow(3, 2)
    assert w.dim == 14
    assert w.flat(-3) == 0
    assert w.flat(0, 1) == 7
    assert w.mode_slice(3) == slice(12, 14)


def test_sign_operator_is_an_involution():
    w = ModeWindow(5, 2)
    eps = sign_operator(w).entries
    assert np.array_equal(eps @ eps, np.eye(w.dim))
    # sgn(0) = +1 on the zero-mode block
    assert np.array_equal(eps[w.mode_slice(0), w.mode_slice(0)], np.eye(2))


def test_toeplitz_embedding_is_multiplicative_on_the_interior():
    rng = rng_for(11, "ops")
    x = random_loop(rng, bandwidth=2, d=2)
    y = random_loop(rng, bandwidth=2, d=2)
    w = ModeWindow(12, 2)
    prod = toeplitz_embed(x, w) @ toeplitz_embed(y, w)
    direct = toeplitz_embed(loop_product(x, y), w)
    margin = x.bandwidth + y.bandwidth
    assert np.max(np.abs(interior_restrict(prod, margin)
                         - interior_restrict(direct, margin))) < 1e-13


def test_commutator_with_sign_operator_is_offdiagonal():
    rng = rng_for(11, "ops2")
    x = random_loop(rng, bandwidth=1, d=1)
    w = ModeWindow(8, 1)
    c = commutator(BlockOperator(w, sign_operator(w).entries),
                   toeplitz_embed(x, w)).entries
    # [eps, M_x] only couples modes of opposite sign regions
    for i, m in enumerate(w.modes()):
        for j, k in enumerate(w.modes()):
            if (m >= 0) == (k >= 0):
                assert abs(c[i, j]) < 1e-15


def test_support_radius_detects_corners():
    w = ModeWindow(6, 1)
    m = np.zeros((w.dim, w.dim), dtype=complex)
    m[w.flat(2), w.flat(-1)] = 1.0
    assert BlockOperator(w, m).support_radius() == 2
