"""Verification suites: named batches of identity checks with budgets.

Each suite assembles checks from the library modules and returns a
deterministic ``VerificationReport``.  Suite selection, parameters and
seeds come from a flat ``RunConfig``; budgets are validated before any
computation starts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, asdict
from typing import Dict, Optional, Sequence

import numpy as np

from . import dressed as dr
from . import fock as fk
from .cocycles import (
    GrassmannConnection, WordContext, c0_cochain, c2_f, eta_f_cochain,
    c_p_closed_cochain, c_p_coboundary_route, grassmann_point,
    normalization_audit, normalized_c_p, palais_delta,
    theorem2_recursion_residual,
)
from .loops import LoopElement
from .operators import ModeWindow
from .report import CheckResult, VerificationReport, inputs_digest
from .sampling import (
    blaschke_unitary_loop, cs_unitary_with_decay, random_loop,
    random_single_mode_loop, rng_for, sobolev_loop, truncate_loop,
)
from .schatten import (
    bounded_commutator_scan, decay_exponent, dixmier_scan,
    epsilon_commutator_law, offdiag_singular_profile, tameness_probe,
    up_retract,
)

SUITES = ("cocycles", "schatten", "spectral-triple", "wzw", "dressed", "all")


class BudgetError(ValueError):
    """Raised before computation when the configured budgets are invalid."""


@dataclass
class RunConfig:
    suite: str = "all"
    group_tag: str = "su2"
    q_list: Sequence[float] = (0.25, 0.5)
    p_list: Sequence[int] = (0, 1, 2)
    window_k: int = 24
    bandwidth: int = 2
    n_f: int = 3
    level: int = 2
    k: float = 0.0
    seed: int = 7
    tol: Dict[str, float] = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "json"

    def tolerance(self, check_id: str, default: float) -> float:
        return float(self.tol.get(check_id, default))

    def validate(self):
        if self.suite not in SUITES:
            raise BudgetError(
                f"unknown suite {self.suite!r}; choose one of {SUITES}")
        max_p = max(self.p_list) if self.p_list else 0
        need_k = (2 * max_p + 5) * self.bandwidth
        if self.window_k < need_k:
            raise BudgetError(
                f"window K={self.window_k} too small: the cocycle words of "
                f"order p={max_p} at bandwidth {self.bandwidth} reach "
                f"{need_k} modes; increase --window or lower --p")
        # mode-0 identities run at level L; mode range 1 checks drop to L-1
        if self.n_f < self.level + 1:
            raise BudgetError(
                f"N_f={self.n_f} too small for safe level L={self.level}: "
                f"need N_f >= L + mode range + 1 = {self.level + 1}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["q_list"] = list(self.q_list)
        d["p_list"] = list(self.p_list)
        return d


def _threshold(value_ok: bool, margin: float) -> float:
    """Encode a one-sided threshold check as a residual: 0 when satisfied,
    the (positive) shortfall when not."""
    return 0.0 if value_ok else float(margin)


# ---------------------------------------------------------------------------
# schatten suite: norm law and the unitary retraction
# ---------------------------------------------------------------------------

def suite_schatten(cfg: RunConfig, rep: VerificationReport):
    # exact Schatten embedding law on seeded single-mode band-limited loops
    for p in (1, 2, 3):
        worst = 0.0
        for j in range(20):
            rng = rng_for(cfg.seed, "schatten-law", j)
            g = random_single_mode_loop(rng, max_mode=4, d=2)
            w = ModeWindow(max(2 * g.bandwidth, 12), 2)
            lhs, rhs = epsilon_commutator_law(g, p, w)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        rep.check(f"schatten-law-p{p}",
                  "basis norm ||[eps,M_g]||_{2p}^{2p} = 2^{2p} sum |n||g_n|^{2p}",
                  worst, cfg.tolerance(f"schatten-law-p{p}", 1e-10),
                  digest=inputs_digest(cfg.seed, "schatten-law", p))

    # retraction: unitarity of F(g) and decay improvement by >= s - 0.5
    for s in (0.6, 1.0):
        worst_unitary, worst_shortfall = 0.0, 0.0
        for j in range(5):
            rng = rng_for(cfg.seed, "retraction", repr(s), j)
            w = ModeWindow(48, 1)
            g = cs_unitary_with_decay(rng, 48, s)
            from .operators import BlockOperator
            gop = BlockOperator(w, g)
            fg = up_retract(gop)
            ident = np.eye(w.dim)
            worst_unitary = max(worst_unitary, float(np.max(np.abs(
                fg.entries.conj().T @ fg.entries - ident))))
            before = decay_exponent(offdiag_singular_profile(gop))
            after = decay_exponent(offdiag_singular_profile(fg))
            gain = after - before
            worst_shortfall = max(worst_shortfall,
                                  max(0.0, (s - 0.5) - gain))
        rep.check(f"retraction-unitary-s{s}",
                  "F(g) = h(g)^{-1} g stays unitary",
                  worst_unitary,
                  cfg.tolerance(f"retraction-unitary-s{s}", 1e-9),
                  digest=inputs_digest(cfg.seed, "retraction", s))
        rep.check(f"retraction-decay-s{s}",
                  "off-diagonal singular-value decay exponent gains >= s "
                  "(margin 0.5)",
                  worst_shortfall,
                  cfg.tolerance(f"retraction-decay-s{s}", 1e-12),
                  digest=inputs_digest(cfg.seed, "retraction", s))


# ---------------------------------------------------------------------------
# spectral-triple suite: bounded commutator, non-tameness, Dixmier averages
# ---------------------------------------------------------------------------

def suite_spectral_triple(cfg: RunConfig, rep: VerificationReport):
    rng = rng_for(cfg.seed, "spectral-triple")
    x = random_loop(rng, bandwidth=2, d=1, antihermitian=True)
    for q in cfg.q_list:
        scan = bounded_commutator_scan(q, x, (64, 128))
        rel = abs(scan[1][1] - scan[0][1]) / abs(scan[0][1])
        rep.check(f"bounded-commutator-q{q}",
                  "||[D^q, M_X]|| stabilizes in the window radius",
                  rel, cfg.tolerance(f"bounded-commutator-q{q}", 0.01),
                  digest=inputs_digest(cfg.seed, "bounded", q))
        # the divergence witness needs a loop of critical regularity:
        # band-limited X makes ad^2 exactly window-independent, while at
        # s = q + 1/2 the probe norm squared grows like sum k^{2q-1}
        xr = sobolev_loop(rng_for(cfg.seed, "rough", repr(q)), 128, q + 0.5)
        probe = (tameness_probe(q, 2, truncate_loop(xr, 64),
                                [ModeWindow(64, 1)])
                 + tameness_probe(q, 2, xr, [ModeWindow(128, 1)]))
        growth = probe[1][1] / probe[0][1] - 1.0
        rep.check(f"nontame-q{q}",
                  "||ad^2_{|D|^q}(M_X) psi|| grows with the window "
                  "(non-tameness witness)",
                  _threshold(growth > 0.10, 0.10 - growth),
                  cfg.tolerance(f"nontame-q{q}", 1e-12),
                  digest=inputs_digest(cfg.seed, "nontame", q))
        rep.recorded[f"nontame_growth_q{q}"] = growth

    conv = dict(dixmier_scan(1.0, 1.0, 10 ** 6))
    a_final = conv[max(conv)]
    rep.check("dixmier-qp1",
              "logarithmic averages of k^{-qp} converge to 1 at qp = 1",
              abs(a_final - 1.0), cfg.tolerance("dixmier-qp1", 0.05),
              digest=inputs_digest("dixmier", 1.0))
    div = dict(dixmier_scan(0.5, 1.0, 10 ** 4))
    keys = sorted(div)
    lo = min(keys, key=lambda n: abs(n - 10 ** 3))
    ratio = div[keys[-1]] / div[lo]
    rep.check("dixmier-qp05",
              "logarithmic averages diverge for qp < 1 (ratio > 2 per decade)",
              _threshold(ratio > 2.0, 2.0 - ratio),
              cfg.tolerance("dixmier-qp05", 1e-12),
              digest=inputs_digest("dixmier", 0.5))
    rep.recorded["dixmier_qp05_decade_ratio"] = ratio


# ---------------------------------------------------------------------------
# cocycles suite: the renormalized cocycle tower on flat connections
# ---------------------------------------------------------------------------

def _seeded_triple(cfg: RunConfig, p: int, j: int, ctx: WordContext):
    rng = rng_for(cfg.seed, "cocycles", p, j)
    d = ctx.window.d
    x = random_loop(rng, bandwidth=cfg.bandwidth, d=d, antihermitian=True)
    y = random_loop(rng, bandwidth=cfg.bandwidth, d=d, antihermitian=True)
    z = random_loop(rng, bandwidth=cfg.bandwidth, d=d, antihermitian=True)
    g, ginv = blaschke_unitary_loop(rng, factors=2, d=d, mixed=True)
    b = grassmann_point(g, ctx.window, ginv)
    return x, y, z, b, g, ginv


def _negative_part(x: LoopElement) -> LoopElement:
    return LoopElement({n: c for n, c in x.coeffs.items() if n < 0})


def _positive_part(x: LoopElement) -> LoopElement:
    return LoopElement({n: c for n, c in x.coeffs.items() if n > 0})


def suite_cocycles(cfg: RunConfig, rep: VerificationReport,
                   triples: int = 50):
    d = 2
    for p in cfg.p_list:
        K = cfg.window_k * (p + 1)
        w = ModeWindow(K, d)
        ctx = WordContext(w)
        wide = WordContext(ModeWindow(K + 8, d))
        worst = {"antisym": 0.0, "coboundary": 0.0, "two-route": 0.0,
                 "vanishing": 0.0, "recursion": 0.0, "window": 0.0}
        for j in range(triples):
            x, y, z, b, g, ginv = _seeded_triple(cfg, p, j, ctx)
            bm = ctx.wrap(b.op)
            cp = c_p_closed_cochain(ctx, p)
            v_xy = cp(x, y).evaluate(bm)
            v_yx = cp(y, x).evaluate(bm)
            worst["antisym"] = max(worst["antisym"], abs(v_xy + v_yx))
            dl = palais_delta(cp, [x, y, z]).evaluate(bm)
            worst["coboundary"] = max(worst["coboundary"], abs(dl))
            route = c_p_coboundary_route(x, y, ctx, p).evaluate(bm)
            worst["two-route"] = max(worst["two-route"], abs(v_xy - route))
            xm, ym = _negative_part(x), _negative_part(y)
            xp, yp = _positive_part(x), _positive_part(y)
            worst["vanishing"] = max(
                worst["vanishing"],
                abs(cp(xm, ym).evaluate(bm)), abs(cp(xp, yp).evaluate(bm)))
            if p < max(cfg.p_list):
                worst["recursion"] = max(
                    worst["recursion"],
                    theorem2_recursion_residual(x, y, b, ctx, p))
            # window-independence: same data on the K+8 window
            b8 = grassmann_point(g, wide.window, ginv)
            v8 = c_p_closed_cochain(wide, p)(x, y).evaluate(
                wide.wrap(b8.op))
            worst["window"] = max(worst["window"], abs(v_xy - v8))
        tols = {"antisym": 1e-12, "coboundary": 1e-10, "two-route": 1e-9,
                "vanishing": 1e-10, "recursion": 1e-10, "window": 1e-12}
        anchors = {
            "antisym": "c_p(X,Y;B) = -c_p(Y,X;B)",
            "coboundary": "(delta c_p)(X,Y,Z;B) = 0 on flat B",
            "two-route": "closed-form c_p equals the coboundary-reduction "
                         "route",
            "vanishing": "c_p vanishes on pure-negative and pure-positive "
                         "mode pairs",
            "recursion": "rescaled recursion c_{p+1} = c_p - delta eta_p "
                         "on flat B",
            "window": "c_p value is window-independent under K -> K+8",
        }
        for key, val in worst.items():
            if key == "recursion" and p == max(cfg.p_list):
                continue
            cid = f"cocycle-{key}-p{p}"
            rep.check(cid, anchors[key], val, cfg.tolerance(cid, tols[key]),
                      digest=inputs_digest(cfg.seed, "cocycles", p, key))

    # c2_F = c0 + delta eta_F at the basepoint, p-independent
    w = ModeWindow(cfg.window_k, d)
    ctx = WordContext(w)
    worst = 0.0
    for j in range(20):
        x, y, z, b, _, _ = _seeded_triple(cfg, 0, 1000 + j, ctx)
        bm = ctx.wrap(b.op)
        lhs = c2_f(x, y, ctx).evaluate(bm)
        rhs = (c0_cochain(ctx)(x, y)
               + palais_delta(eta_f_cochain(ctx), [x, y])).evaluate(bm)
        worst = max(worst, abs(lhs - rhs))
    rep.check("c2f-identity",
              "finite-difference 2-cocycle equals c0 + delta eta_F",
              worst, cfg.tolerance("c2f-identity", 1e-10),
              digest=inputs_digest(cfg.seed, "c2f"))

    # normalization audit: constants recorded, spread asserted
    pairs = []
    for j in range(20):
        rng = rng_for(cfg.seed, "audit", j)
        pairs.append((random_loop(rng, bandwidth=2, d=d, antihermitian=True),
                      random_loop(rng, bandwidth=2, d=d, antihermitian=True)))
    audit = normalization_audit(pairs, ctx)
    rep.check("normalization-spread",
              "the constants relating the c0 conventions are input-"
              "independent",
              audit.spread, cfg.tolerance("normalization-spread", 1e-10),
              digest=inputs_digest(cfg.seed, "audit"))
    rep.recorded["c0_eps_over_smooth"] = audit.eps_over_smooth
    rep.recorded["c0_blocks_over_smooth"] = audit.blocks_over_smooth
    rep.recorded["c0_closed_p0_over_smooth"] = audit.closed_p0_over_smooth


# ---------------------------------------------------------------------------
# wzw suite: the current algebra on the fermionic Fock space
# ---------------------------------------------------------------------------

def suite_wzw(cfg: RunConfig, rep: VerificationReport):
    import scipy.sparse as sp

    f = fk.FockSpace(fk.build_structure_constants(cfg.group_tag), cfg.n_f)
    nc = f.sc.n
    ident = sp.identity(f.dim, format="csr", dtype=complex)
    # CAR: {psi^a_n, psi^b_m} = 2 delta^{ab} delta_{n,-m}
    worst = 0.0
    for a in range(nc):
        for b in range(nc):
            for n in range(-f.n_f, f.n_f + 1):
                for m in range(-f.n_f, f.n_f + 1):
                    acm = fk.anticommutator_s(f.psi(a, n), f.psi(b, m))
                    if a == b and n == -m:
                        acm = acm - 2.0 * ident
                    if acm.nnz:
                        worst = max(worst, float(np.max(np.abs(acm.data))))
    rep.check("car",
              "{psi^a_n, psi^b_m} = 2 delta^{ab} delta_{n,-m}",
              worst, cfg.tolerance("car", 1e-13),
              digest=inputs_digest(cfg.group_tag, cfg.n_f, "car"))

    vac = f.vacuum()
    k1p, k1m = fk.K_current(f, 1, 1), fk.K_current(f, 1, -1)
    central = complex(np.vdot(vac, (k1p @ (k1m @ vac))
                              - k1m @ (k1p @ vac)))
    rep.check("central-term",
              "vacuum central term of [K^1_1, K^1_{-1}] equals 1/2",
              abs(central - 0.5), cfg.tolerance("central-term", 1e-10),
              digest=inputs_digest(cfg.group_tag, cfg.n_f, "central"))
    rep.recorded["central_term"] = central

    q = fk.supercharge(f)
    h = fk.hamiltonian(f)
    rep.check("supercharge-square",
              "Q^2 = h on the safe subspace",
              float(np.max(np.abs(f.restrict(q @ q - h, cfg.level)))),
              cfg.tolerance("supercharge-square", 1e-10),
              digest=inputs_digest(cfg.group_tag, cfg.n_f, "q2h"))

    vac_energy = complex(np.vdot(vac, q @ (q @ vac)))
    rep.check("vacuum-energy",
              "vacuum energy of Q^2 equals N/24 at k = 0",
              abs(vac_energy - f.sc.n / 24.0),
              cfg.tolerance("vacuum-energy", 1e-10),
              digest=inputs_digest(cfg.group_tag, cfg.n_f, "vacuum"))
    rep.recorded["vacuum_energy"] = vac_energy

    # minimal coupling: equivariance and Q(A)^2 = h(A), 5 seeded fields
    worst_eq, worst_sq = 0.0, 0.0
    for j in range(5):
        rng = rng_for(cfg.seed, "wzw-gauge", j)
        af = fk.random_gauge_field(rng, f.sc, bandwidth=1)
        cd = fk.coupling_for(f, af)
        qa = fk.coupled_supercharge(f, cd)
        ha = fk.coupled_hamiltonian(f, cd)
        worst_sq = max(worst_sq, float(np.max(np.abs(
            f.restrict(qa @ qa - ha, cfg.level)))))
        for a in range(nc):
            for n in (-1, 0, 1):
                lhs = fk.commutator_s(fk.S_current(f, a, n), qa)
                rhs = fk.equivariance_rhs(f, cd, a, n)
                worst_eq = max(worst_eq, float(np.max(np.abs(
                    f.restrict(lhs - rhs, min(cfg.level, 1))))))
    rep.check("equivariance",
              "[S^a_n, Q(A)] = i k_bar (n psi^a_n + lambda psi A)",
              worst_eq, cfg.tolerance("equivariance", 1e-10),
              digest=inputs_digest(cfg.seed, "equivariance"))
    rep.check("coupled-square",
              "Q(A)^2 = h(A) on the safe subspace",
              worst_sq, cfg.tolerance("coupled-square", 1e-10),
              digest=inputs_digest(cfg.seed, "coupled-square"))


# ---------------------------------------------------------------------------
# dressed suite: the current algebra dressed by a flat odd connection
# ---------------------------------------------------------------------------

def suite_dressed(cfg: RunConfig, rep: VerificationReport,
                  p_list: Sequence[int] = (0, 1)):
    level = 1
    for p in p_list:
        dctx = dr.build_dressed_context(n_f=cfg.n_f, p=p, seed=cfg.seed)
        tag = f"-p{p}"
        dig = inputs_digest(cfg.seed, "dressed", p)
        anchors = {
            "car": "{psi, psi} = 2 delta delta in the dressed module",
            "current_fermion": "[S(X), psi] = lambda psi",
            "current_current": "[S(X), S(Y)] = lambda S + c(X,Y;B)",
            "fermion_supercharge": "{psi, Q} = 2i S",
            "current_supercharge": "[S(X), Q] = i c(X, .;B) psi",
        }
        res = dr.bracket_residuals(dctx, level=level)
        for key, val in res.items():
            cid = f"dressed-{key}{tag}"
            rep.check(cid, anchors[key], val, cfg.tolerance(cid, 1e-9),
                      digest=dig)

        sres = dr.supercharge_residuals(dctx, level=level)
        rep.check(f"dressed-supercharge-square{tag}",
                  "Q^2 equals its closed-form expansion h",
                  sres["supercharge_square"],
                  cfg.tolerance(f"dressed-supercharge-square{tag}", 1e-9),
                  digest=dig)
        rep.check(f"dressed-supercharge-hamiltonian{tag}",
                  "[Q, h] = 0",
                  sres["supercharge_hamiltonian"],
                  cfg.tolerance(f"dressed-supercharge-hamiltonian{tag}",
                                1e-9),
                  digest=dig)

        gres = dr.gradient_residuals(dctx, level=level)
        ganchors = {
            "gradient_current": "[S(X), f] = L_X f",
            "gradient_supercharge": "[Q, f] = i psi L f",
            "gradient_hamiltonian": "[h, f] = -2 S(L f) + psi psi (L L f)",
        }
        for key, val in gres.items():
            cid = f"dressed-{key}{tag}"
            rep.check(cid, ganchors[key], val, cfg.tolerance(cid, 1e-9),
                      digest=dig)

        # the nonzero-mode boundary diagnostic is expensive and its value
        # does not depend on p (it is fixed by n_f); probe it once at p=0
        modes = (0, 1) if p == min(p_list) else (0,)
        hres = dr.hamiltonian_residuals(dctx, modes=modes, level=level)
        rep.check(f"dressed-fermion-hamiltonian{tag}",
                  "[psi, h] = -2 c psi",
                  hres["fermion_hamiltonian"],
                  cfg.tolerance(f"dressed-fermion-hamiltonian{tag}", 1e-9),
                  digest=dig)
        rep.check(f"dressed-hamiltonian-current{tag}",
                  "[h, S(X)] = 2 c S + psi psi (L c) at mode 0",
                  hres["hamiltonian_current"],
                  cfg.tolerance(f"dressed-hamiltonian-current{tag}", 1e-9),
                  digest=dig)
        if "hamiltonian_current_boundary" in hres:
            rep.recorded[f"hamiltonian_current_boundary_p{p}"] = \
                hres["hamiltonian_current_boundary"]
            rep.recorded[f"hamiltonian_current_corrected_p{p}"] = \
                hres["hamiltonian_current_corrected"]

        vres = dr.vacuum_residuals(dctx)
        rep.check(f"dressed-vacuum{tag}",
                  "eta is the gradient of the calibrated vacuum potential",
                  max(vres["phi_gradient"], vres["vacuum_annihilation"]),
                  cfg.tolerance(f"dressed-vacuum{tag}", 1e-8),
                  digest=dig)
        rep.recorded[f"phi_kappa_p{p}"] = vres["phi_kappa"]

    # smooth limit: at B = 0 the cochain terms vanish and the central
    # constant degenerates to the audited multiple of k_bar n
    dctx0 = dr.build_dressed_context(n_f=cfg.n_f, p=0, seed=cfg.seed,
                                     zero_b=True)
    audit = dr.smooth_limit_audit(dctx0)
    rep.check("dressed-smooth-limit-eta",
              "the dressing cochain vanishes at B = 0",
              audit["eta_max"],
              cfg.tolerance("dressed-smooth-limit-eta", 1e-12),
              digest=inputs_digest(cfg.seed, "smooth-limit"))
    rep.check("dressed-smooth-limit-spread",
              "the B = 0 central constant is mode-independent and diagonal",
              max(audit["c_over_smooth_spread"], audit["c_off_diagonal"]),
              cfg.tolerance("dressed-smooth-limit-spread", 1e-10),
              digest=inputs_digest(cfg.seed, "smooth-limit"))
    rep.recorded["smooth_limit_ratio"] = audit["c_over_smooth"]


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

_SUITE_FNS = {
    "schatten": (suite_schatten,),
    "spectral-triple": (suite_spectral_triple,),
    "cocycles": (suite_cocycles,),
    "wzw": (suite_wzw,),
    "dressed": (suite_dressed,),
    "all": (suite_schatten, suite_spectral_triple, suite_cocycles,
            suite_wzw, suite_dressed),
}


def run_suite(cfg: RunConfig) -> VerificationReport:
    """Run the configured suite and return its deterministic report.

    Budgets are validated up front; numeric failures inside a check
    surface as a failing check with an infinite residual, not a crash.
    """
    cfg.validate()
    rep = VerificationReport(suite=cfg.suite, config=cfg.as_dict())
    for fn in _SUITE_FNS[cfg.suite]:
        t0 = time.time()
        try:
            fn(cfg, rep)
        except Exception as exc:  # surface as a failed check, not a crash
            rep.check(f"{fn.__name__}-error",
                      f"suite body raised: {type(exc).__name__}: {exc}",
                      float("inf"), 0.0,
                      digest=inputs_digest(cfg.seed, fn.__name__))
        for c in rep.checks:
            if c.wall_time == 0.0:
                c.wall_time = time.time() - t0
    if cfg.out:
        rep.emit(cfg.fmt, cfg.out)
    return rep


# ---------------------------------------------------------------------------
# parameter scans (long-format tables for external plotting)
# ---------------------------------------------------------------------------

def scan(cfg: RunConfig, axis: str):
    """Long-format rows (axis, value, observable, observed) for one sweep."""
    rows = []
    if axis == "N":
        for qp in (0.5, 1.0, 2.0):
            for n, a in dixmier_scan(qp, 1.0, 10 ** 6):
                rows.append(("N", n, f"dixmier_average_qp{qp}", a))
    elif axis == "K":
        rng = rng_for(cfg.seed, "scan-K")
        x = random_loop(rng, bandwidth=2, d=1, antihermitian=True)
        ks = (16, 32, 64, 128)
        for q in cfg.q_list:
            for k, v in bounded_commutator_scan(q, x, ks):
                rows.append(("K", k, f"commutator_norm_q{q}", v))
            for n_ad in (1, 2):
                probe = tameness_probe(q, n_ad, x,
                                       [ModeWindow(k, 1) for k in ks])
                for k, v in probe:
                    rows.append(("K", k, f"ad{n_ad}_norm_q{q}", v))
    elif axis == "q":
        rng = rng_for(cfg.seed, "scan-q")
        x = random_loop(rng, bandwidth=2, d=1, antihermitian=True)
        for q in np.linspace(0.1, 0.9, 9):
            scan_v = bounded_commutator_scan(float(q), x, (cfg.window_k,))
            rows.append(("q", float(q), "commutator_norm", scan_v[0][1]))
    else:
        raise BudgetError(f"unknown scan axis {axis!r}; use N, K or q")
    return rows


def scan_csv(rows) -> str:
    import io as _io
    import csv as _csv
    buf = _io.StringIO()
    w = _csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "value", "observable", "observed"])
    for r in rows:
        w.writerow([r[0], r[1], r[2], repr(float(r[3]))])
    return buf.getvalue()
