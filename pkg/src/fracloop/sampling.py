"""Seeded random inputs: loops, flat connections, window unitaries.

All distributions are documented here so that a seed pins down a run
exactly: Fourier coefficients are independent complex Gaussians, followed
by an antihermitian projection when a Lie-algebra-valued loop is wanted.
"""

from __future__ import annotations

import zlib

import numpy as np

from .loops import LoopElement, loop_product, make_loop


def rng_for(seed: int, *tags) -> np.random.Generator:
    """Independent stream per (seed, tag...) so checks stay order-free.

    Tags are folded in with crc32, which is stable across processes
    (unlike hash()), so reports stay bit-identical for a fixed seed.
    """
    folded = [zlib.crc32(repr(t).encode()) for t in tags]
    return np.random.default_rng([seed & 0xFFFFFFFF, *folded])


def _gaussian_matrix(rng, d: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))


def random_loop(rng, bandwidth: int, d: int = 1, scale: float = 1.0,
                antihermitian: bool = False,
                modes: str = "all") -> LoopElement:
    """Band-limited loop with iid complex Gaussian coefficients.

    modes: "all", "negative" (n < 0 only) or "positive" (n > 0 only).
    """
    if modes == "all":
        span = range(-bandwidth, bandwidth + 1)
    elif modes == "negative":
        span = range(-bandwidth, 0)
    elif modes == "positive":
        span = range(1, bandwidth + 1)
    else:
        raise ValueError(f"unknown mode selector {modes!r}")
    coeffs = {n: _gaussian_matrix(rng, d, scale) for n in span}
    if not antihermitian:
        return LoopElement(coeffs)
    # project: X_n -> (X_n - X_{-n}^*)/2 enforces X_n^* = -X_{-n}
    proj = {}
    for n in span:
        a = coeffs.get(n, np.zeros((d, d), dtype=complex))
        b = coeffs.get(-n, np.zeros((d, d), dtype=complex))
        proj[n] = (a - b.conj().T) / 2.0
    return LoopElement(proj, antihermitian=True)


def sobolev_loop(rng, bandwidth: int, s: float) -> LoopElement:
    """Scalar antihermitian loop with |X_n| ~ |n|^{-s} Gaussian amplitudes.

    Fills every mode up to the bandwidth, so truncations of one sample
    give nested loops of prescribed Sobolev regularity; at s = q + 1/2
    the loop sits at the boundary of H^q.
    """
    coeffs = {}
    for n in range(1, bandwidth + 1):
        c = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
        c *= float(n) ** (-s)
        coeffs[n] = np.array([[c]])
        coeffs[-n] = np.array([[-np.conj(c)]])
    return LoopElement(coeffs, antihermitian=True)


def truncate_loop(x: LoopElement, bandwidth: int) -> LoopElement:
    """Drop all modes beyond the bandwidth."""
    return LoopElement({n: c for n, c in x.coeffs.items()
                        if abs(n) <= bandwidth})


def random_single_mode_loop(rng, max_mode: int, d: int = 1) -> LoopElement:
    """Loop supported on one nonzero Fourier mode (Gaussian coefficient)."""
    n = int(rng.integers(1, max_mode + 1)) * (1 if rng.random() < 0.5 else -1)
    return LoopElement({n: _gaussian_matrix(rng, d)})


def random_unitary(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def blaschke_unitary_loop(rng, factors: int, d: int, mixed: bool = True) -> tuple:
    """Unitary-valued loop with a band-limited pointwise inverse.

    Product of factors U (P e^{±ix} + (1 - P)) with P a rank-1 projection
    and U a constant unitary; the inverse swaps the sign of the exponent.
    Both g and g^{-1} have bandwidth <= factors, so everything downstream
    stays exactly band-limited on a finite window.

    mixed alternates the winding direction of consecutive factors.  Purely
    one-directional products land on a degenerate slice of the flat locus
    where eta_p and the Phi gradient vanish identically, which makes
    calibration checks vacuous; mixed products avoid it.
    """
    g = make_loop({0: np.eye(d)})
    ginv = make_loop({0: np.eye(d)})
    for j in range(factors):
        u = random_unitary(rng, d)
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v = v / np.linalg.norm(v)
        proj = np.outer(v, v.conj())
        sgn = -1 if (mixed and j % 2 == 1) else 1
        factor = LoopElement({0: u @ (np.eye(d) - proj), sgn: u @ proj})
        factor_inv = LoopElement({0: (np.eye(d) - proj) @ u.conj().T,
                                  -sgn: proj @ u.conj().T})
        g = loop_product(g, factor)
        ginv = loop_product(factor_inv, ginv)
    return g, ginv


def cs_unitary_with_decay(rng, K: int, s: float, amplitude: float = 0.05) -> np.ndarray:
    """Window unitary whose off-diagonal singular values decay like j^{-s}.

    Built from the CS parametrization g = exp([[0, -Z],[Z^*, 0]]) with
    Z = U diag(theta_j) V^*, theta_j = amplitude * j^{-s}; the (+,-) block
    then has singular values sin(theta_j) ~ amplitude * j^{-s} exactly.
    """
    n_minus = K          # modes -K..-1
    n_plus = K + 1       # modes 0..K
    r = min(n_minus, n_plus)
    theta = amplitude * np.arange(1, r + 1, dtype=float) ** (-s)
    u = random_unitary(rng, n_plus)[:, :r]
    v = random_unitary(rng, n_minus)[:, :r]
    z = (u * theta) @ v.conj().T  # maps H- -> H+
    dim = n_minus + n_plus
    gen = np.zeros((dim, dim), dtype=complex)
    gen[:n_minus, n_minus:] = -z.conj().T
    gen[n_minus:, :n_minus] = z
    import scipy.linalg

    return scipy.linalg.expm(gen)
