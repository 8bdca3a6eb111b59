"""Acceptance gate: every stated identity at its stated tolerance and budget.

Each test runs the corresponding verification suite with its default
(mandated) configuration and asserts the individual check residuals and
the wall-clock budget.
"""

import time

import pytest

from fracloop.suites import RunConfig, run_suite

pytestmark = pytest.mark.acceptance


def _run(suite):
    t0 = time.time()
    rep = run_suite(RunConfig(suite=suite))
    return rep, time.time() - t0


def _by_id(rep):
    return {c.id: c for c in rep.checks}


@pytest.fixture(scope="module")
def schatten_run():
    return _run("schatten")


@pytest.fixture(scope="module")
def spectral_run():
    return _run("spectral-triple")


@pytest.fixture(scope="module")
def cocycles_run():
    return _run("cocycles")


@pytest.fixture(scope="module")
def wzw_run():
    return _run("wzw")


@pytest.fixture(scope="module")
def dressed_run():
    return _run("dressed")


# 1. Schatten law: 20 seeded band-limited g (mode <= 4, d <= 2), p in
#    {1,2,3}, relative error < 1e-10, under 10 s.
def test_criterion_1_schatten_law(schatten_run):
    rep, dt = schatten_run
    checks = _by_id(rep)
    for p in (1, 2, 3):
        c = checks[f"schatten-law-p{p}"]
        assert c.passed and c.residual < 1e-10
    assert dt < 10.0


# 2. Boundedness vs non-tameness: for q in {0.25, 0.5} the commutator norm
#    moves < 1% between K = 64 and 128 while the ad^2 probe grows > 10%,
#    under 30 s.
def test_criterion_2_bounded_vs_nontame(spectral_run):
    rep, dt = spectral_run
    checks = _by_id(rep)
    for q in (0.25, 0.5):
        assert checks[f"bounded-commutator-q{q}"].residual < 0.01
        assert checks[f"nontame-q{q}"].passed
        assert rep.recorded[f"nontame_growth_q{q}"] > 0.10
    assert dt < 30.0


# 3. Dixmier summability: qp = 1 averages within 0.05 of 1 at N = 1e6;
#    qp = 0.5 averages more than double from N = 1e3 to 1e4, under 5 s.
def test_criterion_3_dixmier(spectral_run):
    rep, dt = spectral_run
    checks = _by_id(rep)
    assert checks["dixmier-qp1"].residual < 0.05
    assert checks["dixmier-qp05"].passed
    assert rep.recorded["dixmier_qp05_decade_ratio"] > 2.0
    assert dt < 5.0


# 4. Cocycle suite: 50 seeded triples per p in {0,1,2} at K = 24(p+1);
#    antisymmetry, coboundary 1e-10, two-route 1e-9, vanishing 1e-10,
#    recursion 1e-10, c2_F identity 1e-10, window-independence 1e-12,
#    under 2 min.
def test_criterion_4_cocycle_suite(cocycles_run):
    rep, dt = cocycles_run
    checks = _by_id(rep)
    for p in (0, 1, 2):
        assert checks[f"cocycle-antisym-p{p}"].residual < 1e-12
        assert checks[f"cocycle-coboundary-p{p}"].residual < 1e-10
        assert checks[f"cocycle-two-route-p{p}"].residual < 1e-9
        assert checks[f"cocycle-vanishing-p{p}"].residual < 1e-10
        assert checks[f"cocycle-window-p{p}"].residual < 1e-12
    for p in (0, 1):
        assert checks[f"cocycle-recursion-p{p}"].residual < 1e-10
    assert checks["c2f-identity"].residual < 1e-10
    assert dt < 120.0


# 5. Normalization audit: the constants relating the c0 conventions agree
#    across 20 seeded pairs (spread < 1e-10) and are reported; the sign
#    relation is recorded, never asserted.
def test_criterion_5_normalization_audit(cocycles_run):
    rep, _ = cocycles_run
    assert _by_id(rep)["normalization-spread"].residual < 1e-10
    for key in ("c0_eps_over_smooth", "c0_blocks_over_smooth",
                "c0_closed_p0_over_smooth"):
        assert key in rep.recorded


# 6. Fermionic current algebra, su(2), N_f = 3, level 2 (dim 1024): CAR to
#    1e-13, vacuum central term 0.5, Q^2 = h to 1e-10, vacuum energy 1/8,
#    equivariance and coupled square for 5 seeded gauge fields, under 2 min.
def test_criterion_6_wzw_suite(wzw_run):
    rep, dt = wzw_run
    checks = _by_id(rep)
    assert checks["car"].residual < 1e-13
    assert abs(rep.recorded["central_term"] - 0.5) < 1e-10
    assert checks["supercharge-square"].residual < 1e-10
    assert abs(rep.recorded["vacuum_energy"] - 0.125) < 1e-10
    assert checks["equivariance"].residual < 1e-10
    assert checks["coupled-square"].residual < 1e-10
    assert dt < 120.0


# 7. Dressed algebra with flat B (loop bandwidth 1), p in {0,1}: every
#    bracket-table row to 1e-9 on the safe subspace, [Q,h] = 0 to 1e-9,
#    dressed vacuum < 1e-8 after calibration, B = 0 degenerates with the
#    audited constant.  The [h, S] row at nonzero mode is a documented
#    finite-window defect, covered by the strict xfail in test_dressed.
def test_criterion_7_dressed_algebra(dressed_run):
    rep, _ = dressed_run
    checks = _by_id(rep)
    for p in (0, 1):
        for row in ("car", "current_fermion", "current_current",
                    "fermion_supercharge", "current_supercharge",
                    "gradient_current", "gradient_supercharge",
                    "gradient_hamiltonian", "fermion-hamiltonian",
                    "hamiltonian-current", "supercharge-square"):
            assert checks[f"dressed-{row}-p{p}"].residual < 1e-9, (row, p)
        assert checks[f"dressed-supercharge-hamiltonian-p{p}"].residual < 1e-9
        assert checks[f"dressed-vacuum-p{p}"].residual < 1e-8
    assert checks["dressed-smooth-limit-eta"].passed
    assert checks["dressed-smooth-limit-spread"].passed
    assert "smooth_limit_ratio" in rep.recorded


# 8. Retraction: 10 seeded unitaries with decay s in {0.6, 1.0}; F(g)
#    unitary to 1e-9 and the fitted decay exponent gains >= s - 0.5,
#    under 30 s.
def test_criterion_8_retraction(schatten_run):
    rep, dt = schatten_run
    checks = _by_id(rep)
    for s in (0.6, 1.0):
        assert checks[f"retraction-unitary-s{s}"].residual < 1e-9
        assert checks[f"retraction-decay-s{s}"].passed
    assert dt < 30.0


# 9. Determinism: repeated runs with the same seed/config produce
#    bit-identical report bodies.
def test_criterion_9_determinism():
    for suite in ("schatten", "wzw"):
        first = run_suite(RunConfig(suite=suite)).to_json()
        second = run_suite(RunConfig(suite=suite)).to_json()
        assert first == second
