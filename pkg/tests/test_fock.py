import numpy as np
import pytest
import scipy.sparse as sp

import fracloop.fock as fk
from fracloop.sampling import rng_for


def test_structure_constants_su2():
    sc = fk.build_structure_constants("su2")
    assert sc.n == 3
    assert sc.h_dual == 2
    # lambda^{abc} = eps^{abc}/sqrt(2), totally antisymmetric
    assert sc.lam[0, 1, 2] == pytest.approx(1 / np.sqrt(2))
    assert np.max(np.abs(sc.lam + np.swapaxes(sc.lam, 0, 1))) < 1e-15


def test_fock_dimension_and_vacuum(fock):
    assert fock.dim == 1024
    v = fock.vacuum()
    assert np.vdot(v, v) == pytest.approx(1.0)


def test_car_relations(fock):
    ident = sp.identity(fock.dim, format="csr", dtype=complex)
    for (a, n), (b, m) in [((0, 1), (0, -1)), ((0, 2), (1, -2)),
                           ((2, 0), (2, 0)), ((1, 3), (1, 3))]:
        acm = fk.anticommutator_s(fock.psi(a, n), fock.psi(b, m))
        if a == b and n == -m:
            acm = acm - 2.0 * ident
        assert acm.nnz == 0 or np.max(np.abs(acm.data)) < 1e-13


def test_central_term_is_half_level(fock):
    v = fock.vacuum()
    kp, km = fk.K_current(fock, 1, 1), fk.K_current(fock, 1, -1)
    central = complex(np.vdot(v, kp @ (km @ v) - km @ (kp @ v)))
    assert central == pytest.approx(0.5, abs=1e-10)


def test_supercharge_squares_to_hamiltonian(fock):
    q, h = fk.supercharge(fock), fk.hamiltonian(fock)
    assert np.max(np.abs(fock.restrict(q @ q - h, 2))) < 1e-10


def test_vacuum_energy_is_n_over_24(fock):
    v = fock.vacuum()
    q = fk.supercharge(fock)
    assert complex(np.vdot(v, q @ (q @ v))) == pytest.approx(3 / 24, abs=1e-10)


def test_coupled_supercharge_equivariance(fock):
    af = fk.random_gauge_field(rng_for(21, "gauge"), fock.sc, bandwidth=1)
    cd = fk.coupling_for(fock, af)
    qa = fk.coupled_supercharge(fock, cd)
    ha = fk.coupled_hamiltonian(fock, cd)
    assert np.max(np.abs(fock.restrict(qa @ qa - ha, 2))) < 1e-10
    for a in range(3):
        for n in (-1, 0, 1):
            lhs = fk.commutator_s(fk.S_current(fock, a, n), qa)
            rhs = fk.equivariance_rhs(fock, cd, a, n)
            assert np.max(np.abs(fock.restrict(lhs - rhs, 1))) < 1e-10


def test_mode_budget_counts_level_plus_mode_range(fock):
    assert fock.mode_budget(2, 0)
    assert not fock.mode_budget(2, 1)
    assert fock.mode_budget(1, 1)
