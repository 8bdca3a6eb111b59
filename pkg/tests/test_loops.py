import numpy as np
import pytest

from fracloop.loops import (
    LoopElement, LoopError, frac_dirac_loop, leibniz_defect,
    loop_commutator, loop_product, make_loop, sobolev_norm,
)
from fracloop.sampling import rng_for, sobolev_loop, truncate_loop


def test_antihermitian_flag_is_enforced():
    with pytest.raises(LoopError):
        LoopElement({1: np.eye(2)}, antihermitian=True)
    # X_1 = A, X_{-1} = -A^* is fine
    a = np.array([[1.0, 2j], [0.5, -1.0]])
    LoopElement({1: a, -1: -a.conj().T}, antihermitian=True)


def test_product_convolves_coefficients():
    x = make_loop({1: [[2.0]]})
    y = make_loop({2: [[3.0]], -1: [[1.0]]})
    z = loop_product(x, y)
    assert z.modes() == [0, 3]
    assert z.coeff(3)[0, 0] == 6.0
    assert z.coeff(0)[0, 0] == 2.0


def test_commutator_of_scalars_vanishes():
    rng = rng_for(3, "loops")
    x = sobolev_loop(rng, 4, 1.0)
    y = sobolev_loop(rng, 4, 1.0)
    comm = loop_commutator(x, y)
    assert all(np.max(np.abs(c)) < 1e-15 for c in comm.coeffs.values())


def test_leibniz_defect_vanishes_only_at_q1():
    x = make_loop({1: [[1.0]]})
    y = make_loop({2: [[1.0]]})
    assert leibniz_defect(1.0, x, y) < 1e-14
    assert leibniz_defect(0.5, x, y) > 0.1


def test_frac_dirac_is_odd_in_mode():
    x = make_loop({2: [[1.0]], -2: [[1.0]]})
    dx = frac_dirac_loop(x, 0.5)
    assert np.allclose(dx.coeff(2), 2 ** 0.5)
    assert np.allclose(dx.coeff(-2), -(2 ** 0.5))


def test_sobolev_loop_is_deterministic_and_nested():
    a = sobolev_loop(rng_for(7, "s"), 16, 0.75)
    b = sobolev_loop(rng_for(7, "s"), 16, 0.75)
    assert a.coeffs.keys() == b.coeffs.keys()
    for n in a.coeffs:
        assert np.array_equal(a.coeff(n), b.coeff(n))
    # truncation of the wide draw agrees with the narrow modes
    wide = sobolev_loop(rng_for(7, "s"), 16, 0.75)
    cut = truncate_loop(wide, 8)
    assert cut.bandwidth <= 8
    for n in cut.coeffs:
        assert np.array_equal(cut.coeff(n), wide.coeff(n))


def test_sobolev_norm_scales_with_regularity():
    x = make_loop({4: [[1.0]]})
    assert sobolev_norm(x, 1.0) > sobolev_norm(x, 0.0)
