import numpy as np
import pytest

from fracloop.operators import BlockOperator, ModeWindow, toeplitz_embed
from fracloop.sampling import (
    cs_unitary_with_decay, random_loop, random_single_mode_loop, rng_for,
    sobolev_loop, truncate_loop,
)
from fracloop.schatten import (
    bounded_commutator_scan, decay_exponent, dixmier_scan,
    epsilon_commutator_law, offdiag_singular_profile, schatten_norm,
    tameness_probe, up_retract,
)


def test_schatten_methods_agree_at_hilbert_schmidt():
    rng = rng_for(5, "sch")
    x = random_loop(rng, bandwidth=3, d=2)
    op = toeplitz_embed(x, ModeWindow(10, 2))
    rep = schatten_norm(op, 2)
    assert rep.value_sv == pytest.approx(rep.value_basis, rel=1e-12)


def test_epsilon_law_exact_for_multimode_at_p1():
    rng = rng_for(5, "law1")
    g = random_loop(rng, bandwidth=4, d=2)
    lhs, rhs = epsilon_commutator_law(g, 1, ModeWindow(12, 2))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_epsilon_law_exact_for_single_mode_at_higher_p():
    for p in (2, 3):
        g = random_single_mode_loop(rng_for(5, "law2", p), max_mode=4, d=2)
        lhs, rhs = epsilon_commutator_law(g, p, ModeWindow(12, 2))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_dixmier_averages_converge_iff_qp_is_one():
    conv = dict(dixmier_scan(1.0, 1.0, 10 ** 5))
    assert abs(conv[max(conv)] - 1.0) < 0.06
    div = dict(dixmier_scan(0.5, 1.0, 10 ** 4))
    keys = sorted(div)
    assert div[keys[-1]] / div[keys[0]] > 2.0


def test_tameness_probe_constant_for_band_limited_loops():
    x = random_loop(rng_for(5, "tame"), bandwidth=2, d=1, antihermitian=True)
    probe = tameness_probe(0.5, 2, x, [ModeWindow(16, 1), ModeWindow(32, 1)])
    assert probe[0][1] == pytest.approx(probe[1][1], rel=1e-12)


def test_tameness_probe_grows_for_critical_sobolev_loops():
    q = 0.5
    xr = sobolev_loop(rng_for(5, "rough"), 64, q + 0.5)
    probe = (tameness_probe(q, 2, truncate_loop(xr, 32), [ModeWindow(32, 1)])
             + tameness_probe(q, 2, xr, [ModeWindow(64, 1)]))
    assert probe[1][1] / probe[0][1] > 1.10


def test_commutator_norm_stabilizes_for_band_limited_loops():
    x = random_loop(rng_for(5, "bdd"), bandwidth=2, d=1, antihermitian=True)
    scan = bounded_commutator_scan(0.25, x, (32, 64))
    assert abs(scan[1][1] - scan[0][1]) / scan[0][1] < 0.01


def test_retraction_keeps_unitarity_and_improves_decay():
    w = ModeWindow(48, 1)
    g = BlockOperator(w, cs_unitary_with_decay(rng_for(5, "ret"), 48, 0.6))
    fg = up_retract(g)
    assert np.max(np.abs(fg.entries.conj().T @ fg.entries
                         - np.eye(w.dim))) < 1e-9
    before = decay_exponent(offdiag_singular_profile(g))
    after = decay_exponent(offdiag_singular_profile(fg))
    assert after - before >= 0.6 - 0.5


def test_decay_exponent_recovers_power_law():
    j = np.arange(1, 200, dtype=float)
    assert decay_exponent(j ** -1.5) == pytest.approx(1.5, abs=1e-6)
