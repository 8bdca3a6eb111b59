"""Graded differential algebra, trace-word cochains and the Palais coboundary.

Cochains are stored as formal linear combinations of cyclic trace words
whose slots are either concrete window matrices or the symbolic connection
B.  The gauge Lie derivative L_X acts exactly, by replacing one B slot at a
time with [B, M_X] + dM_X, so coboundary identities can be checked to
machine precision without finite differences.

Every word evaluated here contains at least one corner-supported factor
(a connection slot or a dX), which makes traces of band-limited data exact
on a finite window and lets evaluation run on a reduced sub-window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .loops import LoopElement, loop_commutator
from .operators import (
    BlockOperator,
    ModeWindow,
    WindowError,
    commutator,
    sign_operator,
    toeplitz_embed,
)

B_TOKEN = "B"


class Mat:
    """Concrete word slot: a window matrix plus its sparsity metadata.

    reach semantics: a "corner" factor pins every trace cycle to modes
    |k| <= radius; a "banded" factor only shifts indices by at most its
    bandwidth.  Reduced-window evaluation relies on this split.
    """

    __slots__ = ("m", "kind", "radius")

    def __init__(self, m: np.ndarray, window: ModeWindow):
        self.m = np.asarray(m, dtype=complex)
        corner = BlockOperator(window, self.m).support_radius()
        band = self._bandwidth(window)
        if corner < 0:
            self.kind, self.radius = "corner", 0
        elif band < corner:
            self.kind, self.radius = "banded", band
        else:
            self.kind, self.radius = "corner", corner

    def _bandwidth(self, w: ModeWindow) -> int:
        n, d = len(w.modes()), w.d
        blocks = np.abs(self.m).reshape(n, d, n, d).max(axis=(1, 3))
        rows, cols = np.nonzero(blocks > 1e-13)
        off = rows != cols
        if not off.any():
            return 0
        return int(np.abs(rows[off] - cols[off]).max())


class WordContext:
    """Shared window, sign operator, and loop-embedding cache."""

    def __init__(self, window: ModeWindow):
        self.window = window
        self.eps = np.diag(
            np.repeat(np.where(window.modes() >= 0, 1.0, -1.0), window.d)
        ).astype(complex)
        self.eps_mat = Mat(self.eps, window)
        self._embed_cache: dict = {}
        # trace values keyed by the cyclically-canonical word; entries
        # keep the word's matrices alive so the id-based keys stay valid
        self._trace_cache: dict = {}

    def embed(self, x: LoopElement) -> Mat:
        # key by id but keep the loop alive: a freed loop's id can be
        # reused by CPython, which would alias unrelated cache entries
        key = (id(x), "m")
        if key not in self._embed_cache:
            self._embed_cache[key] = (
                x, Mat(toeplitz_embed(x, self.window).entries, self.window))
        return self._embed_cache[key][1]

    def d_embed(self, x: LoopElement) -> Mat:
        """dM_X = [eps, M_X] (corner supported for band-limited x)."""
        key = (id(x), "d")
        if key not in self._embed_cache:
            mx = self.embed(x).m
            self._embed_cache[key] = (
                x, Mat(self.eps @ mx - mx @ self.eps, self.window))
        return self._embed_cache[key][1]

    def wrap(self, m) -> Mat:
        if isinstance(m, Mat):
            return m
        if isinstance(m, BlockOperator):
            return Mat(m.entries, self.window)
        return Mat(np.asarray(m), self.window)


def _word_reach(word, b_mat: Optional[Mat]) -> Optional[int]:
    """Safe pinning radius for a trace cycle through the word, or None."""
    corner = -1
    banded = 0
    for tok in word:
        mat = b_mat if tok is B_TOKEN else tok
        if mat is None:
            return None
        if mat.kind == "corner":
            corner = max(corner, mat.radius)
        else:
            banded += mat.radius
    if corner < 0:
        return None  # no pinning factor; must evaluate on the full window
    return corner + banded


class TraceWordSum:
    """Linear combination of trace words; terms are (coeff, kind, word).

    kind "tr" is the plain trace; "trc" the conditional trace
    (1/2) Tr(X + eps X eps), which the graded trace reduces to for odd
    Fredholm modules (Gamma = 1).
    """

    def __init__(self, ctx: WordContext, terms=None):
        self.ctx = ctx
        self.terms = list(terms) if terms is not None else []

    # -- algebra ---------------------------------------------------------
    def __add__(self, other: "TraceWordSum") -> "TraceWordSum":
        return TraceWordSum(self.ctx, self.terms + other.terms)

    def __sub__(self, other: "TraceWordSum") -> "TraceWordSum":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "TraceWordSum":
        return TraceWordSum(self.ctx, [(scalar * c, k, w) for c, k, w in self.terms])

    @classmethod
    def single(cls, ctx: WordContext, coeff, kind: str, word) -> "TraceWordSum":
        return cls(ctx, [(complex(coeff), kind, tuple(word))])

    # -- exact gauge Lie derivative ---------------------------------------
    def lie_derivative(self, x: LoopElement) -> "TraceWordSum":
        """L_X: substitute one B slot at a time with [B, M_X] + dM_X."""
        mx = self.ctx.embed(x)
        dx = self.ctx.d_embed(x)
        out = []
        for coeff, kind, word in self.terms:
            for i, tok in enumerate(word):
                if tok is not B_TOKEN:
                    continue
                head, tail = word[:i], word[i + 1:]
                out.append((coeff, kind, head + (B_TOKEN, mx) + tail))
                out.append((-coeff, kind, head + (mx, B_TOKEN) + tail))
                out.append((coeff, kind, head + (dx,) + tail))
        return TraceWordSum(self.ctx, out)

    # -- evaluation --------------------------------------------------------
    def evaluate(self, b=None, check_support: bool = True) -> complex:
        ctx = self.ctx
        b_mat = ctx.wrap(b) if b is not None else None
        cache = ctx._trace_cache
        bid = id(b_mat) if b_mat is not None else None
        total = 0.0 + 0.0j
        K, d = ctx.window.K, ctx.window.d
        for coeff, kind, raw_word in self.terms:
            if not raw_word:
                raise ValueError("empty trace word")
            # traces are cyclic, so rotate the word to a canonical start;
            # repeated words across Lie-derivative expansions then share
            # one cached evaluation
            ids = tuple(-1 if tok is B_TOKEN else id(tok) for tok in raw_word)
            rot = min(range(len(ids)), key=lambda i: ids[i:] + ids[:i])
            key = (kind, ids[rot:] + ids[:rot], bid, check_support)
            hit = cache.get(key)
            if hit is not None:
                total += coeff * hit[0]
                continue
            word = raw_word[rot:] + raw_word[:rot]
            reach = _word_reach(word, b_mat)
            if reach is None:
                if any(tok is B_TOKEN for tok in word) and b_mat is None:
                    raise ValueError("word contains B but no connection was given")
                sl = slice(0, ctx.window.dim)
                radius = K
            else:
                radius = min(reach, K)
                lo = (K - radius) * d
                sl = slice(lo, ctx.window.dim - lo)
            if check_support and reach is not None and reach >= K:
                raise WindowError(
                    f"trace word reach {reach} touches the window boundary K={K}")
            prod = None
            for tok in word:
                mat = (b_mat if tok is B_TOKEN else tok).m[sl, sl]
                prod = mat if prod is None else prod @ mat
            if kind == "tr":
                val = np.trace(prod)
            elif kind == "trc":
                eps = ctx.eps[sl, sl]
                val = 0.5 * (np.trace(prod) + np.trace(eps @ prod @ eps))
            else:
                raise ValueError(f"unknown trace kind {kind!r}")
            cache[key] = (val, word, b_mat)
            total += coeff * val
        return complex(total)


# ---------------------------------------------------------------------------
# traces and the differential on window operators
# ---------------------------------------------------------------------------

def conditional_trace(x: BlockOperator, boundary_check: bool = True) -> complex:
    """Tr_C(X) = (1/2) Tr(X + eps X eps); refuses boundary-touching support."""
    if boundary_check and x.support_radius() >= x.window.K:
        raise WindowError("operand support touches the window boundary")
    eps = sign_operator(x.window).entries
    return complex(0.5 * (np.trace(x.entries) + np.trace(eps @ x.entries @ eps)))


def _mode_reflection(w: ModeWindow) -> np.ndarray:
    # k -> -(k+1) anticommutes with eps under the sgn(0)=+1 convention;
    # mode K has no image inside the window and is zeroed, which is harmless
    # for interior-supported integrands.
    gamma = np.zeros((w.dim, w.dim))
    for k in range(-w.K, w.K):
        gamma[w.mode_slice(-(k + 1)), w.mode_slice(k)] = np.eye(w.d)
    return gamma


def graded_trace(x: BlockOperator, module_parity: str = "odd") -> complex:
    """Str(X): Gamma = 1 for odd modules; a mode reflection for even ones.

    The even-case grading operator is a recorded convention, not fixed by
    the construction; headline identities are checked in the odd case.
    """
    if module_parity == "odd":
        return conditional_trace(x)
    if module_parity == "even":
        gamma = _mode_reflection(x.window)
        return conditional_trace(BlockOperator(x.window, gamma @ x.entries))
    raise ValueError("module_parity must be 'odd' or 'even'")


def d_operator(x: BlockOperator) -> BlockOperator:
    """dX = [eps, X] on even forms, {eps, X} on odd forms; d^2 = 0."""
    if x.parity is None:
        raise ValueError("d requires a parity tag")
    eps = BlockOperator(x.window, sign_operator(x.window).entries)
    if x.parity % 2 == 0:
        out = eps @ x - x @ eps
    else:
        out = eps @ x + x @ eps
    return out.with_parity((x.parity + 1) % 2)


# ---------------------------------------------------------------------------
# the Grassmannian connection
# ---------------------------------------------------------------------------

@dataclass
class GrassmannConnection:
    op: BlockOperator                 # odd-parity connection form B
    source: Optional[LoopElement] = None
    flatness_residual: float = field(default=np.nan)

    @property
    def window(self) -> ModeWindow:
        return self.op.window


def grassmann_point(g: LoopElement, w: ModeWindow,
                    g_inv: Optional[LoopElement] = None,
                    cond_bound: float = 1e8) -> GrassmannConnection:
    """B = M_g^{-1} [eps, M_g]; flat by construction (dB + B^2 = 0).

    Supplying the pointwise inverse loop keeps B exactly band-limited on
    the window; otherwise the truncated Toeplitz matrix is inverted.
    """
    from .operators import invert_multiplication

    mg = toeplitz_embed(g, w)
    if g_inv is not None:
        mginv = toeplitz_embed(g_inv, w)
    else:
        mginv = invert_multiplication(g, w, cond_bound=cond_bound)
    eps = BlockOperator(w, sign_operator(w).entries)
    b = (mginv @ commutator(eps, mg)).with_parity(1)
    db = (eps @ b + b @ eps).entries
    flat = float(np.linalg.norm(db + b.entries @ b.entries))
    return GrassmannConnection(op=b, source=g, flatness_residual=flat)


def gauge_action_on_b(b: GrassmannConnection, x: LoopElement) -> BlockOperator:
    """L_X B = [B, M_X] + dM_X."""
    w = b.window
    mx = toeplitz_embed(x, w)
    eps = BlockOperator(w, sign_operator(w).entries)
    return commutator(b.op, mx) + commutator(eps, mx)


# ---------------------------------------------------------------------------
# Palais coboundary
# ---------------------------------------------------------------------------

def palais_delta(omega: Callable[..., TraceWordSum],
                 args: Sequence[LoopElement]) -> TraceWordSum:
    """Coboundary of a k-cochain, evaluated at k+1 loop arguments.

    omega maps k loops to a TraceWordSum (symbolic in B); the Lie
    derivative terms are exact slot substitutions.
    """
    args = list(args)
    n = len(args)
    result: Optional[TraceWordSum] = None

    def acc(t: TraceWordSum):
        nonlocal result
        result = t if result is None else result + t

    for j in range(n):
        rest = args[:j] + args[j + 1:]
        term = omega(*rest).lie_derivative(args[j])
        acc(((-1.0) ** j) * term)       # (-1)^{j+1} with 1-based j
    for i in range(n):
        for j in range(i + 1, n):
            rest = [a for k, a in enumerate(args) if k not in (i, j)]
            term = omega(loop_commutator(args[i], args[j]), *rest)
            acc(((-1.0) ** (i + j)) * term)  # (-1)^{i+j} with 1-based i,j
    assert result is not None
    return result


def delta_cochain(omega: Callable[..., TraceWordSum]) -> Callable[..., TraceWordSum]:
    """delta as a cochain-to-cochain map, so delta^2 = 0 can be iterated."""

    def wrapped(*args: LoopElement) -> TraceWordSum:
        return palais_delta(omega, args)

    return wrapped


def lie_derivative_fd(omega_value: Callable[[np.ndarray], complex],
                      b: np.ndarray, x: LoopElement, ctx: WordContext,
                      h: float = 1e-4) -> complex:
    """Central finite difference of f(e^{-tX} B e^{tX} + t dX); cross-check only."""
    import scipy.linalg

    mx = ctx.embed(x).m
    dx = ctx.d_embed(x).m
    vals = []
    for t in (h, -h):
        conj = scipy.linalg.expm(-t * mx) @ b @ scipy.linalg.expm(t * mx)
        vals.append(omega_value(conj + t * dx))
    return (vals[0] - vals[1]) / (2 * h)


# ---------------------------------------------------------------------------
# the cochain family
# ---------------------------------------------------------------------------

def c0_form(x: LoopElement, y: LoopElement, ctx: WordContext,
            form: str = "smooth") -> complex:
    """Central-extension cocycle in its three guises.

    Under the sgn(0)=+1 convention the measured relation is
    epsilon_bracket = smooth = -blocks; the constants are audited, not
    assumed.
    """
    eps = ctx.eps
    mx, my = ctx.embed(x).m, ctx.embed(y).m
    a = eps @ mx - mx @ eps
    b = eps @ my - my @ eps
    if form == "epsilon_bracket":
        return complex(np.trace(eps @ (a @ b - b @ a)) / 8.0)
    if form == "smooth":
        return complex(0.5 * np.trace(mx @ b))
    if form == "blocks":
        w = ctx.window
        cut = w.flat(0)
        x_pm, x_mp = mx[cut:, :cut], mx[:cut, cut:]
        y_pm, y_mp = my[cut:, :cut], my[:cut, cut:]
        return complex(np.trace(x_pm @ y_mp) - np.trace(y_pm @ x_mp))
    raise ValueError(f"unknown c0 form {form!r}")


def c0_cochain(ctx: WordContext) -> Callable[..., TraceWordSum]:
    """The smooth form (1/2) Tr(X dY) as a (B-independent) trace word."""

    def omega(x: LoopElement, y: LoopElement) -> TraceWordSum:
        return TraceWordSum.single(
            ctx, 0.5, "tr", (ctx.embed(x), ctx.d_embed(y)))

    return omega


def eta_f_cochain(ctx: WordContext) -> Callable[..., TraceWordSum]:
    """eta(X; F) = -(1/16) Tr([X, eps][F, eps]) with F = eps + B."""

    def omega(x: LoopElement) -> TraceWordSum:
        mx, e = ctx.embed(x), ctx.eps_mat
        # [X, eps][B, eps] expanded; [F, eps] = [B, eps]
        terms = []
        for c1, w1 in ((1.0, (mx, e)), (-1.0, (e, mx))):
            for c2, w2 in ((1.0, (B_TOKEN, e)), (-1.0, (e, B_TOKEN))):
                terms.append((-c1 * c2 / 16.0, "tr", w1 + w2))
        return TraceWordSum(ctx, terms)

    return omega


def c2_f(x: LoopElement, y: LoopElement, ctx: WordContext) -> TraceWordSum:
    """(1/8) Tr([[eps,X],[eps,Y]] (eps - F)) = -(1/8) Tr([dX, dY] B)."""
    ab = ctx.d_embed(x).m @ ctx.d_embed(y).m - ctx.d_embed(y).m @ ctx.d_embed(x).m
    return TraceWordSum.single(ctx, -1.0 / 8.0, "tr",
                               (ctx.wrap(ab), B_TOKEN))


def tilde_c_p_cochain(ctx: WordContext, p: int) -> Callable[..., TraceWordSum]:
    """2^{2p} Str(sum_k (-1)^k (B^{2p+1-k} X B^k Y - B^{2p+1-k} Y B^k X))."""
    if p < 0:
        raise ValueError("p must be >= 0")

    def omega(x: LoopElement, y: LoopElement) -> TraceWordSum:
        mx, my = ctx.embed(x), ctx.embed(y)
        scale = 2.0 ** (2 * p)
        terms = []
        for k in range(p + 1):
            sgn = (-1.0) ** k
            left = (B_TOKEN,) * (2 * p + 1 - k)
            mid = (B_TOKEN,) * k
            terms.append((scale * sgn, "trc", left + (mx,) + mid + (my,)))
            terms.append((-scale * sgn, "trc", left + (my,) + mid + (mx,)))
        return TraceWordSum(ctx, terms)

    return omega


def tilde_eta_p_cochain(ctx: WordContext, p: int) -> Callable[..., TraceWordSum]:
    """tilde eta_p(X; B) = Str(B^{2p+1} X)."""

    def omega(x: LoopElement) -> TraceWordSum:
        return TraceWordSum.single(
            ctx, 1.0, "trc", (B_TOKEN,) * (2 * p + 1) + (ctx.embed(x),))

    return omega


def c_p_closed_cochain(ctx: WordContext, p: int) -> Callable[..., TraceWordSum]:
    """Closed form -2^{2p} sum_m Str(B^{2m} dX B^{2p-2m} Y - B^{2m} dY B^{2p-2m} X)."""

    def omega(x: LoopElement, y: LoopElement) -> TraceWordSum:
        mx, my = ctx.embed(x), ctx.embed(y)
        dx, dy = ctx.d_embed(x), ctx.d_embed(y)
        scale = -(2.0 ** (2 * p))
        terms = []
        for m in range(p + 1):
            left = (B_TOKEN,) * (2 * m)
            mid = (B_TOKEN,) * (2 * p - 2 * m)
            terms.append((scale, "trc", left + (dx,) + mid + (my,)))
            terms.append((-scale, "trc", left + (dy,) + mid + (mx,)))
        return TraceWordSum(ctx, terms)

    return omega


def c_p_coboundary_route(x: LoopElement, y: LoopElement, ctx: WordContext,
                         p: int) -> TraceWordSum:
    """c_p = tilde_c_p - 2^{2p} delta(tilde_eta_p); re-proves the reduction."""
    tc = tilde_c_p_cochain(ctx, p)(x, y)
    dteta = palais_delta(tilde_eta_p_cochain(ctx, p), [x, y])
    return tc - (2.0 ** (2 * p)) * dteta


def eta_p_cochain(ctx: WordContext, p: int) -> Callable[..., TraceWordSum]:
    """eta_p(X; B) = 2^{2p+1} Tr(eps B^{2p+1} dX)."""

    def omega(x: LoopElement) -> TraceWordSum:
        return TraceWordSum.single(
            ctx, 2.0 ** (2 * p + 1), "tr",
            (ctx.eps_mat,) + (B_TOKEN,) * (2 * p + 1) + (ctx.d_embed(x),))

    return omega


# Measured once over seeded flat connections and recorded here: with the
# Appendix-normalized c_p, the coboundary recursion holds exactly on flat B
# only after rescaling c_p by 2^{-(4p+2)} (which makes the p=0 cocycle equal
# (1/2) Tr(X dY) on the nose) and eta_p by 2^{-(4p+4)}.  Off the flat locus
# the relation fails, consistent with the dB = -B^2 reductions behind it.
C_P_RECURSION_SCALE = lambda p: 2.0 ** (-(4 * p + 2))
ETA_P_RECURSION_SCALE = lambda p: 2.0 ** (-(4 * p + 4))


def normalized_c_p(x: LoopElement, y: LoopElement, ctx: WordContext,
                   p: int) -> TraceWordSum:
    """c_p rescaled so that p=0 reproduces the central-extension cocycle."""
    return C_P_RECURSION_SCALE(p) * c_p_closed_cochain(ctx, p)(x, y)


def theorem2_recursion_residual(x: LoopElement, y: LoopElement,
                                b: GrassmannConnection, ctx: WordContext,
                                p: int) -> float:
    """| c^_{p+1}(X,Y;B) - c^_p(X,Y;B) + (delta eta^_p)(X,Y;B) |, flat B.

    c^ and eta^ are the rescaled cochains above; the residual is zero to
    machine precision on flat connections for p = 0, 1, 2.
    """
    bm = ctx.wrap(b.op)
    c_next = normalized_c_p(x, y, ctx, p + 1).evaluate(bm)
    c_here = normalized_c_p(x, y, ctx, p).evaluate(bm)
    deta = ETA_P_RECURSION_SCALE(p) * palais_delta(
        eta_p_cochain(ctx, p), [x, y]).evaluate(bm)
    return abs(c_next - c_here + deta)


def eta_f_sum_audit(b: GrassmannConnection, ctx: WordContext, p: int,
                    probes: Sequence[LoopElement]) -> dict:
    """Record how eta(X;F) relates to the rescaled eta_k family at this B.

    Measured: eta_F equals -eta^_0 exactly on flat connections, while the
    eta^_k for different k are mutually proportional with a B-dependent
    ratio, so the literal sum -sum_k eta_k matches only up to the recorded
    constant.  Both ratios are reported, not asserted.
    """
    bm = ctx.wrap(b.op)
    r0, rsum = [], []
    for x in probes:
        ef = eta_f_cochain(ctx)(x).evaluate(bm)
        e0 = ETA_P_RECURSION_SCALE(0) * eta_p_cochain(ctx, 0)(x).evaluate(bm)
        esum = sum(
            ETA_P_RECURSION_SCALE(k) * eta_p_cochain(ctx, k)(x).evaluate(bm)
            for k in range(p))
        if abs(e0) > 1e-11:
            r0.append(ef / e0)
        if abs(esum) > 1e-11:
            rsum.append(ef / esum)
    return {
        "ratio_to_eta0": complex(np.mean(r0)) if r0 else None,
        "ratio_to_eta0_spread": float(np.max(np.abs(np.array(r0) - np.mean(r0)))) if r0 else None,
        "ratio_to_sum": complex(np.mean(rsum)) if rsum else None,
        "ratio_to_sum_spread": float(np.max(np.abs(np.array(rsum) - np.mean(rsum)))) if rsum else None,
    }


def phi_cochain(ctx: WordContext, p: int, kappa: complex = 1.0) -> Callable[[], TraceWordSum]:
    """Vacuum potential Phi(B) = kappa Tr(eps B^{2p+1}) (0-cochain in the loops)."""

    def omega() -> TraceWordSum:
        return TraceWordSum.single(
            ctx, kappa, "tr", (ctx.eps_mat,) + (B_TOKEN,) * (2 * p + 1))

    return omega


@dataclass
class PhiCalibration:
    kappa: complex
    residuals: list
    spread: float


def calibrate_phi(b: GrassmannConnection, ctx: WordContext, p: int,
                  probes: Sequence[LoopElement],
                  spread_tol: float = 1e-8) -> PhiCalibration:
    """Fit kappa in Phi(B) = kappa Tr(eps B^{2p+1}) against eta_p on L g_-.

    Least squares over a batch of negative-mode probe loops; a large
    residual spread signals a convention mismatch and is raised.
    """
    bm = ctx.wrap(b.op)
    unit_phi = phi_cochain(ctx, p, kappa=1.0)
    etas, grads = [], []
    for x in probes:
        etas.append(eta_p_cochain(ctx, p)(x).evaluate(bm))
        grads.append(unit_phi().lie_derivative(x).evaluate(bm))
    etas, grads = np.array(etas), np.array(grads)
    denom = float(np.sum(np.abs(grads) ** 2))
    kappa = complex(np.sum(np.conj(grads) * etas) / denom) if denom > 0 else 0.0
    residuals = list(np.abs(etas - kappa * grads))
    spread = float(max(residuals) - min(residuals)) if residuals else 0.0
    if residuals and max(residuals) > spread_tol and spread > spread_tol:
        raise WindowError(
            f"Phi calibration inconsistent: residuals up to {max(residuals):.3g}")
    return PhiCalibration(kappa=kappa, residuals=residuals, spread=spread)


def phi_gradient_residual(x: LoopElement, b: GrassmannConnection,
                          ctx: WordContext, p: int,
                          cal: PhiCalibration) -> float:
    """| eta_p(X;B) - L_X Phi(B) | with the calibrated kappa."""
    bm = ctx.wrap(b.op)
    eta = eta_p_cochain(ctx, p)(x).evaluate(bm)
    grad = phi_cochain(ctx, p, kappa=cal.kappa)().lie_derivative(x).evaluate(bm)
    return abs(eta - grad)


@dataclass
class NormalizationAudit:
    """Measured constants relating the c0 forms and the p=0 closed form."""

    eps_over_smooth: complex
    blocks_over_smooth: complex
    closed_p0_over_smooth: complex
    spread: float


def normalization_audit(pairs: Sequence, ctx: WordContext,
                        b: Optional[GrassmannConnection] = None) -> NormalizationAudit:
    """Measure the relations between the c0 conventions on seeded pairs."""
    r_eps, r_blk, r_cls = [], [], []
    bm = ctx.wrap(b.op) if b is not None else None
    for x, y in pairs:
        smooth = c0_form(x, y, ctx, "smooth")
        if abs(smooth) < 1e-9:
            continue
        r_eps.append(c0_form(x, y, ctx, "epsilon_bracket") / smooth)
        r_blk.append(c0_form(x, y, ctx, "blocks") / smooth)
        closed = c_p_closed_cochain(ctx, 0)(x, y).evaluate(bm)
        r_cls.append(closed / smooth)
    if not r_eps:
        raise ValueError("no usable pairs (all c0 values vanish)")
    arrays = [np.array(r) for r in (r_eps, r_blk, r_cls)]
    spread = float(max(np.max(np.abs(a - np.mean(a))) for a in arrays))
    return NormalizationAudit(
        eps_over_smooth=complex(np.mean(arrays[0])),
        blocks_over_smooth=complex(np.mean(arrays[1])),
        closed_p0_over_smooth=complex(np.mean(arrays[2])),
        spread=spread,
    )
