import pytest

import fracloop.dressed as dr


def test_bracket_table(dctx):
    res = dr.bracket_residuals(dctx, level=1)
    for key, val in res.items():
        assert val < 1e-9, key


def test_supercharge_square_and_flow(dctx):
    res = dr.supercharge_residuals(dctx, level=1)
    assert res["supercharge_square"] < 1e-9
    assert res["supercharge_hamiltonian"] < 1e-9


def test_gradient_rows(dctx):
    res = dr.gradient_residuals(dctx, level=1)
    for key, val in res.items():
        assert val < 1e-9, key


def test_hamiltonian_rows_at_mode_zero(dctx):
    res = dr.hamiltonian_residuals(dctx, modes=(0,), level=1)
    assert res["fermion_hamiltonian"] < 1e-9
    assert res["hamiltonian_current"] < 1e-9


def test_vacuum_gradient_after_calibration(dctx):
    res = dr.vacuum_residuals(dctx)
    assert max(res["phi_gradient"], res["vacuum_annihilation"]) < 1e-8
    assert res["phi_kappa"] == pytest.approx(-2.0, abs=1e-10)


def test_smooth_limit_degenerates_with_audited_constant():
    dctx0 = dr.build_dressed_context(n_f=3, p=0, seed=7, zero_b=True)
    audit = dr.smooth_limit_audit(dctx0)
    assert audit["eta_max"] < 1e-12
    assert audit["c_over_smooth_spread"] < 1e-10
    assert audit["c_off_diagonal"] < 1e-10
    # the constant itself is recorded, not assumed: rho = k_bar / c0_hat
    assert audit["c_over_smooth"] == pytest.approx(2.0, abs=1e-10)


@pytest.fixture(scope="module")
def nonzero_mode_rows(dctx):
    wk = dr.seed_witnesses(dctx)[:2]
    return dr.hamiltonian_residuals(dctx, modes=(1,), witness_keys=wk)


@pytest.mark.xfail(
    strict=True,
    reason="finite fermion window: the quadratic mode sums in h lose their "
           "shift-reindex cancellation at n != 0, leaving O(1) edge "
           "operators at modes +-(N_f+1); exact only in the inductive "
           "limit (see window_boundary_op)")
def test_hamiltonian_current_row_at_nonzero_mode(nonzero_mode_rows):
    assert nonzero_mode_rows["hamiltonian_current_boundary"] < 1e-9


def test_boundary_correction_localizes_the_defect(nonzero_mode_rows):
    # the closed-form loop-sector boundary terms remove a definite part of
    # the defect; the remainder sits in fermion-edge terms with no closed
    # form inside the truncation
    boundary = nonzero_mode_rows["hamiltonian_current_boundary"]
    corrected = nonzero_mode_rows["hamiltonian_current_corrected"]
    assert corrected < 0.7 * boundary
    # the fermion row has no such defect at any mode
    assert nonzero_mode_rows["fermion_hamiltonian"] < 1e-9
