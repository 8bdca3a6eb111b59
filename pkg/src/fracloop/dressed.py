"""Current algebra dressed by a flat odd connection.

The fermionic currents S^a_n act on sections v(B) of (Fock space) x
(functions on the flat connection locus): each current picks up a scalar
1-cochain eta^a_n(B) and the gauge derivative L^a_n along the loop
X^a_n = e^{inx} T^a, the supercharge picks up i psi^a_n (eta^a_{-n} +
L^a_{-n}), and the central term of the current bracket becomes the
B-dependent 2-cocycle c = c_0 + delta eta.

Operators are kept as flat term lists

    (coeff, matrix factors, cochain monomial, derivation word),

composed with the Leibniz rule (a derivation word distributes over the
scalar monomial of the term to its right as a sum over ordered
subsequences).  Bracket identities are verified by applying both sides
to witness sections v tensor f(B), with f either constant or a seeded
trace word, and evaluating all cochain scalars at the given flat B.
The scale rho that matches the cocycle normalization to the measured
Fock central term is calibrated, not assumed.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .cocycles import (B_TOKEN, ETA_P_RECURSION_SCALE, GrassmannConnection,
                       TraceWordSum, WordContext, c0_cochain, calibrate_phi,
                       eta_p_cochain, grassmann_point, phi_gradient_residual)
from .fock import FockError, FockSpace, S_current, supercharge
from .loops import LoopElement, loop_commutator, make_loop
from .operators import ModeWindow
from .sampling import blaschke_unitary_loop, rng_for

LoopKey = Tuple[str, int, int]          # ("X", color, mode)
AtomKey = Tuple                          # ("eta", a, n) or ("wit", j)
Factor = Tuple[Tuple[LoopKey, ...], AtomKey]
Mono = Tuple[Factor, ...]                # sorted product of derived cochains
Term = Tuple[complex, tuple, Mono, tuple]


class DressedContext:
    """Fock space + word context + flat connection, with cochain caches."""

    def __init__(self, fock: FockSpace, word_ctx: WordContext,
                 b: GrassmannConnection, p: int = 0):
        if fock.sc.fiber_rep() is None:
            raise FockError("a fiber representation of the color algebra "
                            "is required to dress the currents")
        self.fock = fock
        self.ctx = word_ctx
        self.b = b
        # classify the connection once; evaluate() would otherwise redo
        # the band scan on every cochain evaluation
        self.b_mat = word_ctx.wrap(b.op)
        self.p = p
        self.rep = fock.sc.fiber_rep()
        self.lam = fock.sc.lam
        self._check_rep()
        self._eta = eta_p_cochain(word_ctx, p)
        self._eta_scale = ETA_P_RECURSION_SCALE(p)
        self._c0 = c0_cochain(word_ctx)
        self._s_b = self._mode_transfer(b.op.entries)
        self._loops: Dict[LoopKey, LoopElement] = {}
        self._atoms: Dict[AtomKey, TraceWordSum] = {}
        self._atom_meta: Dict[AtomKey, Tuple[int, int]] = {}
        self._values: Dict[Tuple[tuple, AtomKey], complex] = {}
        self._c0_vals: Dict[Tuple[int, int, int, int], complex] = {}
        self._s0: Dict[Tuple[int, int], sp.csr_matrix] = {}
        self._q0: Optional[sp.csr_matrix] = None
        self.k_bar = self._measure_central()
        self.rho = self.k_bar / self._c0_value(0, 1, 0, -1)

    # -- color algebra in the fiber ---------------------------------------
    def _check_rep(self):
        for a in range(len(self.rep)):
            for b in range(len(self.rep)):
                comm = self.rep[a] @ self.rep[b] - self.rep[b] @ self.rep[a]
                comm -= sum(self.lam[a, b, c] * self.rep[c]
                            for c in range(len(self.rep)))
                if np.max(np.abs(comm)) > 1e-13:
                    raise FockError("fiber representation does not satisfy "
                                    "the color structure constants")

    def _mode_transfer(self, entries: np.ndarray) -> int:
        """Largest Fourier-mode shift m - k carried by the connection."""
        w = self.ctx.window
        out = 0
        for m in w.modes():
            for k in w.modes():
                if m != k and np.max(np.abs(
                        entries[w.mode_slice(int(m)), w.mode_slice(int(k))])) > 1e-13:
                    out = max(out, abs(int(m) - int(k)))
        return out

    def loop(self, key: LoopKey) -> LoopElement:
        if key not in self._loops:
            _, a, n = key
            self._loops[key] = make_loop({n: self.rep[a]})
        return self._loops[key]

    # -- matrix generators --------------------------------------------------
    def psi(self, a: int, n: int) -> sp.csr_matrix:
        return self.fock.psi(a, n)

    def s0(self, a: int, n: int) -> sp.csr_matrix:
        if (a, n) not in self._s0:
            self._s0[(a, n)] = S_current(self.fock, a, n)
        return self._s0[(a, n)]

    def q0(self) -> sp.csr_matrix:
        if self._q0 is None:
            self._q0 = supercharge(self.fock)
        return self._q0

    def _measure_central(self) -> float:
        """Vacuum expectation of [S0^1_1, S0^1_{-1}] (no S0_0 admixture)."""
        v = self.fock.vacuum()
        sm, sp_ = self.s0(0, -1), self.s0(0, 1)
        val = np.vdot(v, sp_ @ (sm @ v) - sm @ (sp_ @ v))
        if abs(val.imag) > 1e-12 or abs(val) < 1e-12:
            raise FockError(f"unusable measured central term {val}")
        return float(val.real)

    # -- cochain scalars ------------------------------------------------------
    def atom(self, key: AtomKey) -> TraceWordSum:
        if key not in self._atoms:
            if key[0] != "eta":
                raise KeyError(f"unregistered cochain atom {key}")
            _, a, n = key
            self._atoms[key] = (self.rho * self._eta_scale) * self._eta(
                self.loop(("X", a, n)))
            # mode offset n, absorbable by 2p+1 connection factors
            self._atom_meta[key] = (n, (2 * self.p + 1) * self._s_b)
        return self._atoms[key]

    def add_witness(self, j: int, tws: TraceWordSum,
                    mode_offset: int = 0, mode_slack: Optional[int] = None):
        self._atoms[("wit", j)] = tws
        if mode_slack is None:
            # conservative: never prefilter this atom
            mode_slack = 10 ** 6
        self._atom_meta[("wit", j)] = (mode_offset, mode_slack)

    def value(self, lword: tuple, akey: AtomKey) -> complex:
        """(L_{x1} ... L_{xk} atom)(B), cached.

        Gauge derivatives insert Toeplitz factors of known mode, so a
        trace word whose total Fourier shift exceeds what the banded
        connection factors can absorb vanishes identically; those are
        skipped without touching the trace machinery.
        """
        key = (lword, akey)
        if key not in self._values:
            self.atom(akey)
            offset, slack = self._atom_meta[akey]
            if abs(offset + sum(x[2] for x in lword)) > slack:
                self._values[key] = 0.0j
            else:
                t = self._atoms[akey]
                for xk in reversed(lword):
                    t = t.lie_derivative(self.loop(xk))
                self._values[key] = t.evaluate(self.b_mat)
        return self._values[key]

    def mono_value(self, mono: Mono) -> complex:
        out = 1.0 + 0.0j
        for lword, akey in mono:
            out *= self.value(lword, akey)
            if out == 0:
                return 0.0j
        return out

    def _c0_value(self, a: int, n: int, b: int, m: int) -> complex:
        key = (a, n, b, m)
        if key not in self._c0_vals:
            self._c0_vals[key] = self._c0(
                self.loop(("X", a, n)), self.loop(("X", b, m))).evaluate()
        return self._c0_vals[key]

    def c0_dressed(self, a: int, n: int, b: int, m: int) -> complex:
        """rho-scaled smooth cocycle on the Fourier generators."""
        return self.rho * self._c0_value(a, n, b, m)


# ---------------------------------------------------------------------------
# the term calculus
# ---------------------------------------------------------------------------

def _merge(m1: Mono, m2: Mono) -> Mono:
    return tuple(sorted(m1 + m2))


def _derive_once(mono: Mono, x: LoopKey) -> List[Mono]:
    """L_x of a product of derived cochains; product rule, coefficients 1."""
    out = []
    for i, (lword, akey) in enumerate(mono):
        lifted = ((x,) + lword, akey)
        out.append(tuple(sorted(mono[:i] + (lifted,) + mono[i + 1:])))
    return out


def _derive_word(mono: Mono, word: tuple) -> List[Mono]:
    monos = [mono]
    for x in reversed(word):
        monos = [m2 for m in monos for m2 in _derive_once(m, x)]
    return monos


def _leibniz_splits(word: tuple, mono: Mono):
    """All ways D_word can act through a scalar monomial.

    Yields (derived mono, leftover word): each ordered subsequence of the
    word differentiates the monomial, the complement passes to the right.
    """
    k = len(word)
    for mask in range(1 << k):
        act = tuple(word[i] for i in range(k) if mask >> i & 1)
        rest = tuple(word[i] for i in range(k) if not mask >> i & 1)
        for dm in _derive_word(mono, act):
            yield dm, rest


class DressedOp:
    """Flat list of (coeff, matrix factors, cochain monomial, derivation word)."""

    __slots__ = ("dctx", "terms")

    def __init__(self, dctx: DressedContext, terms: Sequence[Term]):
        self.dctx = dctx
        self.terms = list(terms)

    def __add__(self, other: "DressedOp") -> "DressedOp":
        return DressedOp(self.dctx, self.terms + other.terms)

    def __sub__(self, other: "DressedOp") -> "DressedOp":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "DressedOp":
        return DressedOp(self.dctx,
                         [(scalar * c, m, s, w) for c, m, s, w in self.terms])

    def __matmul__(self, other: "DressedOp") -> "DressedOp":
        out = []
        for c1, m1, s1, w1 in self.terms:
            for c2, m2, s2, w2 in other.terms:
                for ds2, rest in _leibniz_splits(w1, s2):
                    out.append((c1 * c2, m1 + m2, _merge(s1, ds2), rest + w2))
        return DressedOp(self.dctx, out)

    def apply(self, block: np.ndarray, witness: Mono = ()) -> np.ndarray:
        """Apply to the section (columns of block) x (witness monomial).

        Scalar parts are evaluated first and aggregated per distinct
        matrix chain, so the matrix work scales with the number of
        distinct chains rather than the number of terms.
        """
        dctx = self.dctx
        chains: Dict[tuple, tuple] = {}
        agg: Dict[tuple, complex] = {}
        for coeff, mats, mono, word in self.terms:
            val = 0.0j
            for dm in _derive_word(witness, word):
                val += dctx.mono_value(_merge(mono, dm))
            if val == 0:
                continue
            key = tuple(id(m) for m in mats)
            chains[key] = mats
            agg[key] = agg.get(key, 0.0j) + coeff * val
        out = np.zeros(block.shape, dtype=complex)
        for key, c in agg.items():
            if c == 0:
                continue
            v = block
            for m in reversed(chains[key]):
                v = m @ v
            out += c * v
        return out


def commut(a: DressedOp, b: DressedOp) -> DressedOp:
    return a @ b - b @ a


def anticommut(a: DressedOp, b: DressedOp) -> DressedOp:
    return a @ b + b @ a


# ---------------------------------------------------------------------------
# dressed generators
# ---------------------------------------------------------------------------

def psi_op(dctx: DressedContext, a: int, n: int) -> DressedOp:
    return DressedOp(dctx, [(1.0, (dctx.psi(a, n),), (), ())])


def s_op(dctx: DressedContext, a: int, n: int) -> DressedOp:
    """S^a_n = S0^a_n + eta^a_n(B) + L^a_n."""
    return DressedOp(dctx, [
        (1.0, (dctx.s0(a, n),), (), ()),
        (1.0, (), (((), ("eta", a, n)),), ()),
        (1.0, (), (), (("X", a, n),)),
    ])


def q_op(dctx: DressedContext) -> DressedOp:
    """Q = Q0 + i psi^a_n (eta^a_{-n} + L^a_{-n}), summed over the window."""
    terms: List[Term] = [(1.0, (dctx.q0(),), (), ())]
    n_colors = dctx.fock.sc.n
    for a in range(n_colors):
        for n in range(-dctx.fock.n_f, dctx.fock.n_f + 1):
            psi = dctx.psi(a, n)
            terms.append((1.0j, (psi,), (((), ("eta", a, -n)),), ()))
            terms.append((1.0j, (psi,), (), (("X", a, -n),)))
    return DressedOp(dctx, terms)


def scalar_op(dctx: DressedContext, mono: Mono, coeff=1.0) -> DressedOp:
    """Multiplication by a product of (derived) cochains."""
    return DressedOp(dctx, [(coeff, (), mono, ())])


def c_terms(dctx: DressedContext, a: int, n: int, b: int, m: int,
            prefactor=1.0, extra_mats: tuple = ()) -> List[Term]:
    """c^{a,b}_{n,m}(B) = c0 + (delta eta)(X^a_n, X^b_m), as flat terms.

    delta eta(X, Y) = L_X eta(Y) - L_Y eta(X) - eta([X, Y]); the commutator
    reduces through the fiber representation, [X^a_n, X^b_m] =
    lambda^{abc} X^c_{n+m}.
    """
    terms: List[Term] = []
    c0 = prefactor * dctx.c0_dressed(a, n, b, m)
    if c0 != 0:
        terms.append((c0, extra_mats, (), ()))
    terms.append((prefactor, extra_mats,
                  (((("X", a, n),), ("eta", b, m)),), ()))
    terms.append((-prefactor, extra_mats,
                  (((("X", b, m),), ("eta", a, n)),), ()))
    for c in range(dctx.fock.sc.n):
        lam = dctx.lam[a, b, c]
        if lam != 0:
            terms.append((-prefactor * lam, extra_mats,
                          (((), ("eta", c, n + m)),), ()))
    return terms


def c_op(dctx: DressedContext, a: int, n: int, b: int, m: int,
         prefactor=1.0) -> DressedOp:
    return DressedOp(dctx, c_terms(dctx, a, n, b, m, prefactor))

# ---------------------------------------------------------------------------
# witness sections and residuals
# ---------------------------------------------------------------------------

def seed_witnesses(dctx: DressedContext, seed: int = 11, count: int = 2):
    """Register seeded trace-word witnesses f_j(B) = Str(B^3 X_j).

    Generic words with nonvanishing derivatives of all orders in B; the
    constant section is always used alongside them.
    """
    from .sampling import random_loop

    keys = []
    for j in range(count):
        rng = rng_for(seed, "dressed-witness", j)
        x = random_loop(rng, bandwidth=2, d=dctx.ctx.window.d,
                        antihermitian=True)
        dctx.add_witness(j, TraceWordSum.single(
            dctx.ctx, 1.0, "trc", (B_TOKEN,) * 3 + (dctx.ctx.embed(x),)),
            mode_offset=0, mode_slack=2 + 3 * dctx._s_b)
        keys.append(("wit", j))
    return keys


def _safe_block(dctx: DressedContext, level: int):
    idx = dctx.fock.safe_indices(level)
    block = np.zeros((dctx.fock.dim, len(idx)), dtype=complex)
    block[idx, np.arange(len(idx))] = 1.0
    return idx, block


def op_residual(dctx: DressedContext, op: DressedOp, level: int,
                witnesses: Sequence[Mono]) -> float:
    """Largest safe-subspace matrix element of op across witness sections."""
    idx, block = _safe_block(dctx, level)
    worst = 0.0
    for w in witnesses:
        out = op.apply(block, w)
        worst = max(worst, float(np.max(np.abs(out[idx, :]))))
    return worst


def bracket_residuals(dctx: DressedContext, modes=(-1, 0, 1), level: int = 1,
                      witness_keys: Optional[Sequence[AtomKey]] = None
                      ) -> Dict[str, float]:
    """Residuals of the dressed bracket table at the stored flat B.

    Every entry is LHS - RHS applied to the safe-subspace basis tensored
    with constant and seeded witness sections; exact identities evaluate
    to machine zero.
    """
    if witness_keys is None:
        witness_keys = seed_witnesses(dctx)
    wits: List[Mono] = [()] + [(((), k),) for k in witness_keys]
    nc = dctx.fock.sc.n
    n_f = dctx.fock.n_f
    q = q_op(dctx)
    res: Dict[str, float] = {}

    def track(name, op, level_=level, wlist=None):
        r = op_residual(dctx, op, level_, wits if wlist is None else wlist)
        res[name] = max(res.get(name, 0.0), r)

    for a in range(nc):
        for n in modes:
            s_an = s_op(dctx, a, n)
            # {psi^a_n, Q} = 2i S^a_n
            track("fermion_supercharge",
                  anticommut(psi_op(dctx, a, n), q) - 2j * s_an)
            # [S^a_n, Q] = i sum_m c^{a,b}_{n,-m} psi^b_m
            rhs_terms: List[Term] = []
            for b in range(nc):
                for m in range(-n_f, n_f + 1):
                    rhs_terms += c_terms(dctx, a, n, b, -m, prefactor=1.0j,
                                         extra_mats=(dctx.psi(b, m),))
            track("current_supercharge",
                  commut(s_an, q) - DressedOp(dctx, rhs_terms))
            for b in range(nc):
                for m in modes:
                    # {psi, psi} and [S, psi] = lambda psi
                    lam_psi = DressedOp(dctx, [
                        (dctx.lam[a, b, c], (dctx.psi(c, n + m),), (), ())
                        for c in range(nc) if dctx.lam[a, b, c] != 0])
                    car = anticommut(psi_op(dctx, a, n), psi_op(dctx, b, m))
                    if a == b and n == -m:
                        car = car - DressedOp(dctx, [(2.0, (), (), ())])
                    track("car", car)
                    track("current_fermion",
                          commut(s_an, psi_op(dctx, b, m)) - lam_psi)
                    # [S^a_n, S^b_m] = lambda S^c_{n+m} + c^{a,b}_{n,m}
                    rhs = c_op(dctx, a, n, b, m)
                    for c in range(nc):
                        if dctx.lam[a, b, c] != 0:
                            rhs = rhs + dctx.lam[a, b, c] * s_op(dctx, c, n + m)
                    track("current_current",
                          commut(s_an, s_op(dctx, b, m)) - rhs)
    return res


def hamiltonian_op(dctx: DressedContext) -> DressedOp:
    """h = Q^2, expanded once into a flat term list."""
    q = q_op(dctx)
    return q @ q


def _hamiltonian_current_rhs(dctx: DressedContext, a: int, n: int
                             ) -> DressedOp:
    """Formal right side of [h, S^a_n]:

        2 c^{a,b}_{n,-m} S^b_m + psi^c_p psi^b_m (L^c_{-p} c^{a,b}_{n,-m}),

    with the cochain scalar multiplying after the dressed current acts
    (its gauge derivative does not reach the scalar) and the derived
    fermion index on the left.
    """
    nc = dctx.fock.sc.n
    n_f = dctx.fock.n_f
    rhs = DressedOp(dctx, [])
    for b in range(nc):
        for m in range(-n_f, n_f + 1):
            cmat = DressedOp(dctx, c_terms(dctx, a, n, b, -m))
            rhs = rhs + 2.0 * (cmat @ s_op(dctx, b, m))
            for c in range(nc):
                for p_ in range(-n_f, n_f + 1):
                    mats = (dctx.psi(c, p_), dctx.psi(b, m))
                    dterms: List[Term] = []
                    for t0, m0, s0_, _ in c_terms(dctx, a, n, b, -m):
                        for ds in _derive_once(s0_, ("X", c, -p_)):
                            dterms.append((t0, mats + m0, ds, ()))
                    rhs = rhs + DressedOp(dctx, dterms)
    return rhs


def window_boundary_op(dctx: DressedContext, a: int, n: int) -> DressedOp:
    """Mode-window boundary defect of [h, S^a_n] for n != 0 (partial).

    The quadratic mode sums in h = Q^2,

        -(1/2) sum_p {L^b_{-p}, L^b_p}   and   -2 sum_p S0^b_p L^b_{-p},

    run over the finite fermion window p in [-N, N].  Commuting with
    S^a_n shifts one index by n; the shift-reindexing that cancels these
    sums pairwise in the untruncated algebra then misses its partner for
    the |n| boundary values of p, leaving

        W1 = - sum_b lambda^{bae} {L^b_{-p}, L^e_{p+n}},
        W2 = -2 sum_b lambda^{bae} S0^{e,p+n} L^b_{-p}     (p at the top
             edge, with the mirrored sign-flipped terms at the bottom),

    so [h, S^a_n] = RHS + W1 + W2 + (fermion-window defect).  W1 and W2
    are returned here; the remaining defect lives in the psi psi L sums
    whose boundary commutators involve currents beyond the fermion
    window and has no closed form inside the truncation.
    """
    nc = dctx.fock.sc.n
    n_f = dctx.fock.n_f
    p_range = set(range(-n_f, n_f + 1))
    p_shift = set(range(-n_f - n, n_f - n + 1))
    ts: List[Term] = []
    for b in range(nc):
        for e in range(nc):
            l = dctx.lam[b, a, e]
            if l == 0:
                continue
            for p in p_range:
                if (-p - n) not in p_range:
                    ts.append((-l, (), (),
                               (("X", b, -p), ("X", e, p + n))))
                    ts.append((-l, (), (),
                               (("X", e, p + n), ("X", b, -p))))
            for p in p_range - p_shift:
                ts.append((-2.0 * l, (S_current(dctx.fock, e, p + n),),
                           (), (("X", b, -p),)))
            for p in p_shift - p_range:
                ts.append((+2.0 * l, (S_current(dctx.fock, e, p + n),),
                           (), (("X", b, -p),)))
    return DressedOp(dctx, ts)


def hamiltonian_residuals(dctx: DressedContext, modes=(-1, 0, 1),
                          level: int = 1,
                          witness_keys: Optional[Sequence[AtomKey]] = None
                          ) -> Dict[str, float]:
    """Bracket-table entries involving h = Q^2.

    In the conventions forced by {psi, Q} = 2i S (the eta-term of Q
    carries an explicit i) the measured identities are

        [psi^a_n, h] = -2 c^{a,b}_{n,-m} psi^b_m,
        [h, S^a_n]   = 2 c^{a,b}_{n,-m} S^b_m
                       + psi^c_p psi^b_m (L^c_{-p} c^{a,b}_{n,-m}).

    Both follow from [X, Q^2] = [{X, Q}, Q]_-+ and the verified Q-rows,
    but only formally: on a finite mode window the quadratic sums in h
    acquire boundary defects under the index shift by n (see
    ``window_boundary_op``), so the current row holds to machine
    precision only at n = 0.  Returned keys:

    - ``fermion_hamiltonian``: asserted, all modes (exact).
    - ``hamiltonian_current``: asserted, the n = 0 row (exact).
    - ``hamiltonian_current_boundary``: recorded, the raw n != 0 defect.
    - ``hamiltonian_current_corrected``: recorded, the n != 0 defect
      after subtracting the closed-form loop-sector boundary terms; the
      reduction localizes the deviation at the window boundary.
    """
    if witness_keys is None:
        witness_keys = seed_witnesses(dctx)
    wits: List[Mono] = [()] + [(((), k),) for k in witness_keys]
    nc = dctx.fock.sc.n
    n_f = dctx.fock.n_f
    q = q_op(dctx)
    h = q @ q
    res: Dict[str, float] = {}
    for a in range(nc):
        for n in modes:
            # [psi^a_n, h] = -2 sum c psi (sign measured; the i forced
            # into the eta-term of Q flips it against the formal table)
            rhs_terms: List[Term] = []
            for b in range(nc):
                for m in range(-n_f, n_f + 1):
                    rhs_terms += c_terms(dctx, a, n, b, -m, prefactor=-2.0,
                                         extra_mats=(dctx.psi(b, m),))
            lhs = commut(psi_op(dctx, a, n), h)
            r = op_residual(dctx, lhs - DressedOp(dctx, rhs_terms),
                            level, wits)
            res["fermion_hamiltonian"] = max(
                res.get("fermion_hamiltonian", 0.0), r)
            # [h, S^a_n]; the n != 0 boundary diagnostics are recorded,
            # not asserted, so one color suffices for them
            if n != 0 and a != 0:
                continue
            defect = commut(h, s_op(dctx, a, n)) \
                - _hamiltonian_current_rhs(dctx, a, n)
            r = op_residual(dctx, defect, level, wits)
            if n == 0:
                res["hamiltonian_current"] = max(
                    res.get("hamiltonian_current", 0.0), r)
            else:
                res["hamiltonian_current_boundary"] = max(
                    res.get("hamiltonian_current_boundary", 0.0), r)
                rc = op_residual(
                    dctx, defect - window_boundary_op(dctx, a, n),
                    level, wits)
                res["hamiltonian_current_corrected"] = max(
                    res.get("hamiltonian_current_corrected", 0.0), rc)
    return res

# ---------------------------------------------------------------------------
# the Hamiltonian as an explicit expansion of Q^2
# ---------------------------------------------------------------------------

def hamiltonian_display_op(dctx: DressedContext) -> DressedOp:
    """Closed-form expansion of Q^2 in dressed generators.

    With Q = Q0 + i psi^a_n (eta^a_{-n} + L^a_{-n}) the square works out,
    through the canonical anticommutators and the Leibniz rule, to

        h = Q0^2 - 2 eta^a_n S^a_{-n} + eta^2
            - psi^a_n psi^b_m (L^a_{-n} eta^b_{-m})
            - 2 S0^a_n L^a_{-n}
            - (1/2) {L^a_{-n}, L^a_n}
            - (1/2) psi^a_n psi^b_m lambda^{abc} L^c_{-n-m},

    where S is the dressed current and eta^2 = eta^a_n eta^a_{-n}.  The
    scalar signs differ from a formal square of Q0 + psi(eta) because the
    eta-term of Q must carry an explicit i for {psi, Q} = 2i S to hold;
    the derivation tail annihilates constant sections.  Verified against
    the term-calculus square Q @ Q.
    """
    nc = dctx.fock.sc.n
    n_f = dctx.fock.n_f
    span = [(a, n) for a in range(nc) for n in range(-n_f, n_f + 1)]
    q0 = dctx.q0()
    terms: List[Term] = [(1.0, (q0, q0), (), ())]
    out = DressedOp(dctx, terms)
    for a, n in span:
        eta_mono: Mono = (((), ("eta", a, n)),)
        # -2 eta^a_n S^a_{-n}  (scalar on the left of the dressed current)
        out = out + (-2.0) * (scalar_op(dctx, eta_mono) @ s_op(dctx, a, -n))
        # + eta^a_n eta^a_{-n}
        out = out + scalar_op(
            dctx, _merge(eta_mono, (((), ("eta", a, -n)),)))
        # -2 S0^a_n L^a_{-n}
        out = out + DressedOp(dctx, [
            (-2.0, (dctx.s0(a, n),), (), (("X", a, -n),))])
        # -(1/2) {L^a_{-n}, L^a_n}
        out = out + DressedOp(dctx, [
            (-0.5, (), (), (("X", a, -n), ("X", a, n))),
            (-0.5, (), (), (("X", a, n), ("X", a, -n)))])
    for a, n in span:
        for b, m in span:
            mats = (dctx.psi(a, n), dctx.psi(b, m))
            # - psi psi (L eta)
            out = out + DressedOp(dctx, [
                (-1.0, mats, (((("X", a, -n),), ("eta", b, -m)),), ())])
            # -(1/2) psi psi lambda L
            for c in range(nc):
                if dctx.lam[a, b, c] != 0:
                    out = out + DressedOp(dctx, [
                        (-0.5 * dctx.lam[a, b, c], mats, (),
                         (("X", c, -n - m),))])
    return out


def supercharge_residuals(dctx: DressedContext, level: int = 1,
                          witness_keys: Optional[Sequence[AtomKey]] = None
                          ) -> Dict[str, float]:
    """h = Q^2 expansion and [Q, h] = 0, with h in the expanded form."""
    if witness_keys is None:
        witness_keys = seed_witnesses(dctx)
    wits: List[Mono] = [()] + [(((), k),) for k in witness_keys]
    q = q_op(dctx)
    h_disp = hamiltonian_display_op(dctx)
    res = {
        "supercharge_square": op_residual(
            dctx, q @ q - h_disp, level, wits),
        "supercharge_hamiltonian": op_residual(
            dctx, commut(q, h_disp), level, wits),
    }
    return res


# ---------------------------------------------------------------------------
# gradient rows: brackets against multiplication by f(B)
# ---------------------------------------------------------------------------

def gradient_residuals(dctx: DressedContext, modes=(-1, 0, 1), level: int = 1,
                       witness_keys: Optional[Sequence[AtomKey]] = None
                       ) -> Dict[str, float]:
    """[S^a_n, f] = L^a_n f, [Q, f] = i psi^a_n L^a_{-n} f and
    [h, f] = -2 S^a_n L^a_{-n} f + psi^a_n psi^d_q L^d_{-q} L^a_{-n} f,
    for f a seeded trace word, applied to witness sections."""
    if witness_keys is None:
        witness_keys = seed_witnesses(dctx)
    wits: List[Mono] = [()] + [(((), k),) for k in witness_keys]
    nc = dctx.fock.sc.n
    n_f = dctx.fock.n_f
    f_key = witness_keys[0]
    mult_f = scalar_op(dctx, (((), f_key),))
    res: Dict[str, float] = {}

    def lf_mono(*lkeys) -> Mono:
        return (((tuple(lkeys)), f_key),)

    for a in range(nc):
        for n in modes:
            lhs = commut(s_op(dctx, a, n), mult_f)
            rhs = scalar_op(dctx, lf_mono(("X", a, n)))
            r = op_residual(dctx, lhs - rhs, level, wits)
            res["gradient_current"] = max(res.get("gradient_current", 0.0), r)

    q = q_op(dctx)
    rhs = DressedOp(dctx, [
        (1.0j, (dctx.psi(a, n),), lf_mono(("X", a, -n)), ())
        for a in range(nc) for n in range(-n_f, n_f + 1)])
    res["gradient_supercharge"] = op_residual(
        dctx, commut(q, mult_f) - rhs, level, wits)

    h = hamiltonian_display_op(dctx)
    rhs = DressedOp(dctx, [])
    for a in range(nc):
        for n in range(-n_f, n_f + 1):
            rhs = rhs + (-2.0) * (
                s_op(dctx, a, n) @ scalar_op(dctx, lf_mono(("X", a, -n))))
            for d in range(nc):
                for qm in range(-n_f, n_f + 1):
                    rhs = rhs + DressedOp(dctx, [
                        (1.0, (dctx.psi(a, n), dctx.psi(d, qm)),
                         lf_mono(("X", d, -qm), ("X", a, -n)), ())])
    res["gradient_hamiltonian"] = op_residual(
        dctx, commut(h, mult_f) - rhs, level, wits)
    return res


# ---------------------------------------------------------------------------
# vacuum dressing and the smooth limit
# ---------------------------------------------------------------------------

def vacuum_residuals(dctx: DressedContext, max_mode: int = 2) -> Dict[str, float]:
    """Dressed-vacuum consistency on the negative-mode subalgebra.

    The bare currents annihilate the Fock vacuum on strictly negative
    modes, so S(X)|0> = eta(X;B)|0> there; the scalar part is matched
    against the gradient of the calibrated potential Phi(B).
    """
    probes = [dctx.loop(("X", a, -n))
              for a in range(dctx.fock.sc.n) for n in range(1, max_mode + 1)]
    cal = calibrate_phi(dctx.b, dctx.ctx, dctx.p, probes)
    grad = max(phi_gradient_residual(x, dctx.b, dctx.ctx, dctx.p, cal)
               for x in probes)
    v = dctx.fock.vacuum()
    annih = max(float(np.max(np.abs(dctx.s0(a, -n) @ v)))
                for a in range(dctx.fock.sc.n)
                for n in range(1, max_mode + 1))
    etas = [abs(dctx.value((), ("eta", a, -n)))
            for a in range(dctx.fock.sc.n) for n in range(1, max_mode + 1)]
    return {
        "phi_gradient": grad,
        "phi_kappa": cal.kappa,
        "vacuum_annihilation": annih,
        "eta_probe_max": max(etas),
    }


def smooth_limit_audit(dctx0: DressedContext, modes=(-2, -1, 1, 2)) -> Dict:
    """Degeneration of the dressed table at B = 0.

    eta(X; 0) = 0 for every loop, so the dressed generators reduce to the
    bare ones; the central term c(X,Y;0) stays proportional to the smooth
    cocycle k n delta^{ab} delta_{n,-m}, with a measured constant (the
    delta-eta part of c does not vanish at B = 0 for p = 0; the ratio is
    recorded, not assumed to be 1).
    """
    if abs(complex(np.max(np.abs(dctx0.b.op.entries)))) > 1e-14:
        raise ValueError("smooth-limit audit expects the zero connection")
    nc = dctx0.fock.sc.n
    eta_max = max(abs(dctx0.value((), ("eta", a, n)))
                  for a in range(nc) for n in modes)

    def c_value(a, n, b, m):
        val = 0.0j
        for coeff, _, mono, _ in c_terms(dctx0, a, n, b, m):
            val += coeff * dctx0.mono_value(mono)
        return val

    ratios = []
    off_diag = 0.0
    for a in range(nc):
        for b in range(nc):
            for n in modes:
                for m in modes:
                    val = c_value(a, n, b, m)
                    if a == b and n == -m:
                        ratios.append(val / (dctx0.k_bar * n))
                    else:
                        off_diag = max(off_diag, abs(val))
    ratios = np.array(ratios)
    return {
        "eta_max": eta_max,
        "c_over_smooth": complex(np.mean(ratios)),
        "c_over_smooth_spread": float(np.max(np.abs(ratios - np.mean(ratios)))),
        "c_off_diagonal": off_diag,
    }


# ---------------------------------------------------------------------------
# context builder
# ---------------------------------------------------------------------------

def build_dressed_context(n_f: int = 3, p: int = 0, window_k: int = 24,
                          seed: int = 5, zero_b: bool = False,
                          fock: Optional[FockSpace] = None) -> DressedContext:
    """su(2) Fock space plus a seeded mixed unitary flat connection.

    The connection source is a product of two opposite-winding rank-one
    factors, so its loop bandwidth is exactly 1 while the dressing
    cochains stay away from the degenerate one-directional slice.
    """
    from .fock import build_structure_constants

    if fock is None:
        fock = FockSpace(build_structure_constants("su2"), n_f=n_f)
    d = fock.sc.fiber_rep()[0].shape[0]
    w = ModeWindow(K=window_k, d=d)
    ctx = WordContext(w)
    if zero_b:
        b = grassmann_point(make_loop({0: np.eye(d)}), w,
                            g_inv=make_loop({0: np.eye(d)}))
    else:
        rng = rng_for(seed, "dressed-connection")
        g, g_inv = blaschke_unitary_loop(rng, factors=2, d=d, mixed=True)
        b = grassmann_point(g, w, g_inv=g_inv)
    return DressedContext(fock, ctx, b, p=p)
