"""Mode-window truncations: block-Toeplitz embeddings and diagonal operators.

The Hilbert space L^2(S^1, C^d) is truncated to Fourier modes -K..K.  Basis
ordering is (mode, fiber) with flat index (k + K) * d + i, so mode-diagonal
operators are block diagonal with d x d identity blocks.

Sign conventions: the sign operator eps takes the value +1 at mode 0, while
the fractional Dirac operator D^q takes the value 0 there.  The two
conventions deliberately coexist (eps != D^q/|D^q| at k = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .loops import LoopElement, LoopError


class WindowError(ValueError):
    """Window too small or ill-conditioned for the requested operation."""


@dataclass(frozen=True)
class ModeWindow:
    K: int
    d: int = 1

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("window radius K must be >= 1")
        if self.d < 1:
            raise ValueError("fiber dimension d must be >= 1")

    @property
    def dim(self) -> int:
        return (2 * self.K + 1) * self.d

    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def flat(self, mode: int, fiber: int = 0) -> int:
        return (mode + self.K) * self.d + fiber

    def mode_slice(self, mode: int) -> slice:
        lo = (mode + self.K) * self.d
        return slice(lo, lo + self.d)


class BlockOperator:
    """Dense operator on a mode window, optionally tagged with form parity.

    parity 0 = even form (commutes-type), 1 = odd form; None = untagged.
    """

    __slots__ = ("window", "entries", "parity")

    def __init__(self, window: ModeWindow, entries: np.ndarray,
                 parity: Optional[int] = None):
        entries = np.asarray(entries, dtype=complex)
        if entries.shape != (window.dim, window.dim):
            raise ValueError("entry matrix does not match window dimension")
        self.window = window
        self.entries = entries
        self.parity = parity

    def with_parity(self, parity: Optional[int]) -> "BlockOperator":
        return BlockOperator(self.window, self.entries, parity)

    def adjoint(self) -> "BlockOperator":
        return BlockOperator(self.window, self.entries.conj().T, self.parity)

    def block(self, m: int, k: int) -> np.ndarray:
        return self.entries[self.window.mode_slice(m), self.window.mode_slice(k)]

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        parity = None
        if self.parity is not None and other.parity is not None:
            parity = (self.parity + other.parity) % 2
        return BlockOperator(self.window, self.entries @ other.entries, parity)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        parity = self.parity if self.parity == other.parity else None
        return BlockOperator(self.window, self.entries + other.entries, parity)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "BlockOperator":
        return BlockOperator(self.window, scalar * self.entries, self.parity)

    def _check(self, other: "BlockOperator"):
        if self.window != other.window:
            raise ValueError("window mismatch")

    def norm(self, kind: str = "fro") -> float:
        if kind == "fro":
            return float(np.linalg.norm(self.entries))
        if kind == "op":
            return float(np.linalg.norm(self.entries, 2))
        raise ValueError(f"unknown norm kind {kind!r}")

    def support_radius(self, atol: float = 1e-13) -> int:
        """Largest |mode| carrying an entry above atol, or -1 if zero."""
        w = self.window
        mags = np.abs(self.entries)
        rad = -1
        for m in w.modes():
            sl = w.mode_slice(m)
            if mags[sl, :].max() > atol or mags[:, sl].max() > atol:
                rad = max(rad, abs(int(m)))
        return rad

    def __repr__(self):
        return f"BlockOperator(K={self.window.K}, d={self.window.d}, parity={self.parity})"


def commutator(a: BlockOperator, b: BlockOperator) -> BlockOperator:
    return a @ b - b @ a


def anticommutator(a: BlockOperator, b: BlockOperator) -> BlockOperator:
    return a @ b + b @ a


def zero_operator(w: ModeWindow, parity: Optional[int] = None) -> BlockOperator:
    return BlockOperator(w, np.zeros((w.dim, w.dim), dtype=complex), parity)


def identity_operator(w: ModeWindow) -> BlockOperator:
    return BlockOperator(w, np.eye(w.dim, dtype=complex), parity=0)


def toeplitz_embed(x: LoopElement, w: ModeWindow) -> BlockOperator:
    """Multiplication operator M_x on the window: block (m, k) is x_{m-k}."""
    if x.d != w.d:
        raise LoopError("loop dimension does not match window fiber dimension")
    out = np.zeros((w.dim, w.dim), dtype=complex)
    for n, c in x.coeffs.items():
        for k in range(max(-w.K, -w.K - n), min(w.K, w.K - n) + 1):
            out[w.mode_slice(k + n), w.mode_slice(k)] = c
    return BlockOperator(w, out, parity=0)


def _mode_diagonal(values: np.ndarray, w: ModeWindow) -> BlockOperator:
    return BlockOperator(w, np.diag(np.repeat(values.astype(complex), w.d)))


def diagonal_operator(kind: str, w: ModeWindow, q: Optional[float] = None) -> BlockOperator:
    """Mode-diagonal operators: sign, frac_dirac, abs_frac_dirac, weyl.

    sign uses sgn(0) = +1; the Dirac family uses sgn(0)|0|^q = 0.
    """
    k = w.modes().astype(float)
    if kind == "sign":
        vals = np.where(k >= 0, 1.0, -1.0)
        return _mode_diagonal(vals, w).with_parity(None)
    if q is None or not (0.0 < q <= 1.0):
        raise ValueError("fractional kinds need q in (0, 1]")
    if kind == "frac_dirac":
        vals = np.sign(k) * np.abs(k) ** q
    elif kind == "abs_frac_dirac":
        vals = np.abs(k) ** q
    elif kind == "weyl":
        vals = np.exp(1j * q * np.pi * np.sign(k) / 2.0) * np.abs(k) ** q
    else:
        raise ValueError(f"unknown diagonal kind {kind!r}")
    return _mode_diagonal(vals, w)


def sign_operator(w: ModeWindow) -> BlockOperator:
    return diagonal_operator("sign", w)


def ym_connection(alpha: LoopElement, beta: LoopElement, q: float,
                  w: ModeWindow) -> BlockOperator:
    """Fractional Yang-Mills connection A = M_alpha [D^q, M_beta]."""
    dq = diagonal_operator("frac_dirac", w, q=q)
    return toeplitz_embed(alpha, w) @ commutator(dq, toeplitz_embed(beta, w))


def invert_multiplication(g: LoopElement, w: ModeWindow,
                          cond_bound: float = 1e8) -> BlockOperator:
    """Inverse of M_g on the window; refuses when M_g is ill-conditioned.

    Conditioning of the truncated Toeplitz matrix stands in for pointwise
    invertibility of the loop.
    """
    mg = toeplitz_embed(g, w)
    cond = np.linalg.cond(mg.entries)
    if not np.isfinite(cond) or cond > cond_bound:
        raise WindowError(
            f"M_g condition number {cond:.3g} exceeds bound {cond_bound:.3g}; "
            "enlarge the window or check invertibility of g")
    return BlockOperator(w, np.linalg.inv(mg.entries))


def gauge_transform(a: BlockOperator, g: LoopElement, q: float,
                    g_inv: Optional[LoopElement] = None,
                    cond_bound: float = 1e8) -> BlockOperator:
    """Gauge action A -> g^{-1} A g + g^{-1} [D^q, g] on the window.

    When the pointwise inverse loop is known (g_inv), it is embedded
    directly, keeping everything exactly band-limited.
    """
    w = a.window
    mg = toeplitz_embed(g, w)
    if g_inv is not None:
        mginv = toeplitz_embed(g_inv, w)
    else:
        mginv = invert_multiplication(g, w, cond_bound=cond_bound)
    dq = diagonal_operator("frac_dirac", w, q=q)
    return mginv @ a @ mg + mginv @ commutator(dq, mg)


def infinitesimal_gauge(a: BlockOperator, x: LoopElement, q: float) -> BlockOperator:
    """L_X A = [A, M_X] + [D^q, M_X]."""
    w = a.window
    mx = toeplitz_embed(x, w)
    dq = diagonal_operator("frac_dirac", w, q=q)
    return commutator(a, mx) + commutator(dq, mx)


def interior_restrict(a: BlockOperator, margin: int) -> np.ndarray:
    """Entries restricted to modes |k| <= K - margin (for K-independence checks)."""
    w = a.window
    if margin < 0 or margin > w.K:
        raise ValueError("bad interior margin")
    lo = w.flat(-(w.K - margin))
    hi = w.flat(w.K - margin) + w.d
    return a.entries[lo:hi, lo:hi]
