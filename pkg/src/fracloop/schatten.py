"""Schatten norms, the commutator norm law, summability scans and the
unitary retraction U_p -> U_{p/2}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .loops import LoopElement, constant_loop
from .operators import (
    BlockOperator,
    ModeWindow,
    WindowError,
    commutator,
    diagonal_operator,
    sign_operator,
    toeplitz_embed,
)


@dataclass
class SchattenReport:
    two_p: float
    value_sv: float
    value_basis: float
    K: int


def _schatten_sv(mat: np.ndarray, two_p: float) -> float:
    sv = np.linalg.svd(mat, compute_uv=False)
    return float(np.sum(sv ** two_p) ** (1.0 / two_p))


def _schatten_basis(mat: np.ndarray, two_p: float) -> float:
    colnorms = np.sqrt(np.sum(np.abs(mat) ** 2, axis=0))
    return float(np.sum(colnorms ** two_p) ** (1.0 / two_p))


def schatten_norm(a: BlockOperator, two_p: float, method: str = "singular_values"):
    """Schatten 2p-norm, by singular values or by the column-basis formula.

    The two methods agree for two_p = 2 (Hilbert-Schmidt); otherwise the
    basis form is merely equivalent, kept because the embedding law is
    computed with it.
    """
    if two_p < 2:
        raise ValueError("two_p must be >= 2")
    if method == "singular_values":
        val = _schatten_sv(a.entries, two_p)
    elif method == "basis":
        val = _schatten_basis(a.entries, two_p)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SchattenReport(
        two_p=two_p,
        value_sv=val if method == "singular_values" else _schatten_sv(a.entries, two_p),
        value_basis=val if method == "basis" else _schatten_basis(a.entries, two_p),
        K=a.window.K,
    )


def epsilon_commutator_law(g: LoopElement, p: float, w: ModeWindow):
    """Compare ||[eps, M_g]||_{2p}^{2p} (basis form) with 2^{2p} sum |n| |g_n|^{2p}.

    The closed form is exact whenever each column of [eps, M_g] carries a
    single nonzero block, i.e. for single-mode loops; for p = 1 it is exact
    for every band-limited loop.
    """
    if w.K < 2 * g.bandwidth:
        raise WindowError("window must satisfy K >= 2 * bandwidth")
    comm = commutator(sign_operator(w), toeplitz_embed(g, w))
    # aggregate fiber columns per mode so the block Frobenius norm enters
    lhs = 0.0
    for k in w.modes():
        sl = w.mode_slice(int(k))
        lhs += float(np.sum(np.abs(comm.entries[:, sl]) ** 2)) ** p
    rhs = 0.0
    for n, c in g.coeffs.items():
        rhs += abs(n) * float(np.sum(np.abs(c) ** 2)) ** p
    rhs *= 2.0 ** (2 * p)
    return lhs, rhs


def dixmier_scan(q: float, p: float, n_max: int, points: int = 30) -> list:
    """Partial logarithmic averages a_N = (1/log N) sum_{k<=N} k^{-qp}.

    Returns [(N, a_N)] on a log-spaced grid; a_N converges iff qp >= 1.
    """
    if q <= 0 or p <= 0:
        raise ValueError("q and p must be positive")
    if n_max < 100:
        raise ValueError("n_max must be >= 100")
    k = np.arange(1, n_max + 1, dtype=float)
    csum = np.cumsum(k ** (-q * p))
    grid = np.unique(np.logspace(2, np.log10(n_max), points).astype(int))
    return [(int(n), float(csum[n - 1] / np.log(n))) for n in grid]


def tameness_probe(q: float, n: int, x: LoopElement,
                   windows: Sequence[ModeWindow]) -> list:
    """||ad^n_{|D|^q}(M_X) psi|| for psi the constant loop, per window.

    For band-limited X every column of the iterated commutator is exact
    once the window clears the bandwidth, so the probe is constant in K;
    the non-tameness witness requires X whose modes fill the window with
    critical Sobolev decay (see ``sampling.sobolev_loop``), for which the
    n = 2 probe grows without bound while n = 1 stays bounded.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for w in windows:
        absd = diagonal_operator("abs_frac_dirac", w, q=q)
        op = toeplitz_embed(x, w)
        for _ in range(n):
            op = commutator(absd, op)
        psi = np.zeros(w.dim, dtype=complex)
        psi[w.flat(0)] = 1.0
        out.append((w.K, float(np.linalg.norm(op.entries @ psi))))
    return out


def bounded_commutator_scan(q: float, x: LoopElement, ks: Iterable[int]) -> list:
    """Operator norm of [D^q, M_X] per window radius K."""
    out = []
    for K in ks:
        w = ModeWindow(K, x.d)
        dq = diagonal_operator("frac_dirac", w, q=q)
        out.append((K, commutator(dq, toeplitz_embed(x, w)).norm("op")))
    return out


@dataclass
class BlockDecomposition:
    """Blocks of an operator w.r.t. the eps eigenspaces (H+ = modes >= 0)."""

    pp: np.ndarray
    pm: np.ndarray
    mp: np.ndarray
    mm: np.ndarray
    window: ModeWindow

    def reassemble(self) -> np.ndarray:
        top = np.hstack([self.mm, self.mp])
        bot = np.hstack([self.pm, self.pp])
        return np.vstack([top, bot])


def block_decompose(a: BlockOperator) -> BlockDecomposition:
    """Split by the polarization; [eps, A] = 2 [[0, A_pm], [-A_mp, 0]] exactly."""
    w = a.window
    cut = w.flat(0)  # first index of the mode-0 block; H- is everything below
    e = a.entries
    return BlockDecomposition(
        pp=e[cut:, cut:], pm=e[cut:, :cut], mp=e[:cut, cut:], mm=e[:cut, :cut],
        window=w,
    )


def up_retract(g: BlockOperator, unitary_tol: float = 1e-10) -> BlockOperator:
    """One step of the retraction U_p -> U_{p/2}.

    With blocks (alpha, beta; gamma, delta) w.r.t. the polarization, forms
    x = alpha gamma^* - beta delta^*, h = exp([[0, -x/2], [x^*/2, 0]]) and
    returns F(g) = h^{-1} g, which is unitary with a smaller off-diagonal
    Schatten tail.
    """
    dim = g.window.dim
    if np.max(np.abs(g.entries.conj().T @ g.entries - np.eye(dim))) > unitary_tol:
        raise ValueError("input operator is not unitary on the window")
    blocks = block_decompose(g)
    alpha, beta = blocks.pp, blocks.pm
    gamma, delta = blocks.mp, blocks.mm
    x = alpha @ gamma.conj().T - beta @ delta.conj().T
    gen = np.zeros((dim, dim), dtype=complex)
    cut = g.window.flat(0)
    # antihermitian generator [[0, x^*/2], [-x/2, 0]] in (H-, H+) ordering
    gen[:cut, cut:] = x.conj().T / 2.0
    gen[cut:, :cut] = -x / 2.0
    h = scipy.linalg.expm(gen)
    return BlockOperator(g.window, h.conj().T @ g.entries)


def offdiag_singular_profile(g: BlockOperator) -> np.ndarray:
    """Nonincreasing singular values of the (+,-) block."""
    return np.linalg.svd(block_decompose(g).pm, compute_uv=False)


def decay_exponent(profile: np.ndarray, floor: float = 1e-14) -> float:
    """Least-squares slope of log sigma_j vs log j over the middle half.

    The middle half avoids both the leading constants and the window-edge
    tail of the profile.
    """
    sv = np.asarray(profile, dtype=float)
    sv = sv[sv > floor]
    n = len(sv)
    if n < 8:
        raise ValueError("profile too short for a decay fit")
    lo, hi = n // 4, (3 * n) // 4
    j = np.arange(1, n + 1, dtype=float)[lo:hi]
    y = np.log(sv[lo:hi])
    slope = np.polyfit(np.log(j), y, 1)[0]
    return float(-slope)


def constant_loop_of(d: int) -> LoopElement:
    return constant_loop(np.eye(d))
