"""Finite-cutoff fermionic Fock space: CAR algebra, currents, supercharge.

Fermions psi^a_n (colors a < N, modes |n| <= N_f) are realized by a
Jordan-Wigner chain, normalized so {psi^a_n, psi^b_m} = 2 delta^{ab}
delta_{n,-m}.  Zero modes are hermitian Clifford generators: one qubit per
pair, plus (for odd N) the phase-fixed total parity operator, which squares
to one and anticommutes with every other generator.

Identities are asserted on the "safe subspace" of excitation level <= L,
where mode truncation is invisible provided N_f >= L + |n| + 1 per current
index involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp


class FockError(ValueError):
    pass


# ---------------------------------------------------------------------------
# structure constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureConstants:
    """Totally antisymmetric lambda^{abc} with Casimir lambda^{abc}lambda^{acb} = -N."""

    n: int
    lam: np.ndarray
    h_dual: float
    group_tag: str = "custom"

    def validate(self, atol: float = 1e-12):
        lam = self.lam
        if lam.shape != (self.n, self.n, self.n):
            raise FockError("lambda tensor has wrong shape")
        for perm, sgn in (((0, 2, 1), -1), ((1, 0, 2), -1), ((1, 2, 0), 1)):
            if np.max(np.abs(np.transpose(lam, perm) - sgn * lam)) > atol:
                raise FockError("lambda is not totally antisymmetric")
        jac = (np.einsum("abe,ecd->abcd", lam, lam)
               + np.einsum("bce,ead->abcd", lam, lam)
               + np.einsum("cae,ebd->abcd", lam, lam))
        if np.max(np.abs(jac)) > atol:
            raise FockError("lambda violates the Jacobi identity")
        casimir = float(np.einsum("abc,acb->", lam, lam))
        if abs(casimir + self.n) > 1e-10:
            raise FockError(f"Casimir {casimir} != -N = {-self.n}")

    def fiber_rep(self) -> Optional[list]:
        """d x d matrices T^a with [T^a, T^b] = lambda^{abc} T^c (su2 only)."""
        if self.group_tag != "su2":
            return None
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
        sz = np.array([[1, 0], [0, -1]], dtype=complex)
        return [-1j * s / (2 * np.sqrt(2)) for s in (sx, sy, sz)]


def build_structure_constants(group_tag: str = "su2",
                              lam: Optional[np.ndarray] = None,
                              h_dual: Optional[float] = None) -> StructureConstants:
    if group_tag == "su2":
        eps = np.zeros((3, 3, 3))
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            eps[a, b, c] = 1.0
            eps[a, c, b] = -1.0
        sc = StructureConstants(3, eps / np.sqrt(2), h_dual=2.0, group_tag="su2")
    elif group_tag == "custom":
        if lam is None:
            raise FockError("custom structure constants need a lambda tensor")
        lam = np.asarray(lam, dtype=float)
        n = lam.shape[0]
        if h_dual is None:
            # lambda^{acd} lambda^{bcd} = (h_dual/2) delta^{ab}
            m = np.einsum("acd,bcd->ab", lam, lam)
            h_dual = float(2.0 * np.trace(m) / n)
            if np.max(np.abs(m - (h_dual / 2) * np.eye(n))) > 1e-10:
                raise FockError("lambda contraction is not proportional to identity")
        sc = StructureConstants(n, lam, h_dual=float(h_dual))
    else:
        raise FockError(f"unknown group tag {group_tag!r}")
    sc.validate()
    return sc


# ---------------------------------------------------------------------------
# Fock space
# ---------------------------------------------------------------------------

_ID2 = sp.identity(2, format="csr", dtype=complex)
_Z = sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex))
_X = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
_Y = sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex))
_ANNIHILATE = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))


class FockSpace:
    """Jordan-Wigner chain for one or two independent CAR families.

    Qubit layout: family 0 mode qubits (a fastest, then n = 1..N_f), then
    family 0 zero-mode qubits, then the same for family 1 if present.
    Basis index bits follow kron order: qubit 0 is the most significant.
    """

    def __init__(self, sc: StructureConstants, n_f: int,
                 realization: str = "trivial_k0", dim_cap: int = 2 ** 20):
        if n_f < 1:
            raise FockError("N_f must be >= 1")
        if realization not in ("trivial_k0", "second_fermion"):
            raise FockError(f"unknown bosonic realization {realization!r}")
        self.sc = sc
        self.n_f = n_f
        self.realization = realization
        self.n_families = 2 if realization == "second_fermion" else 1
        self.z_qubits = sc.n // 2 + (sc.n % 2)  # ceil(N/2): pairs + parity share
        # qubits per family: N*N_f mode qubits + floor(N/2) zero-mode qubits
        self._zpairs = sc.n // 2
        self._per_family = sc.n * n_f + self._zpairs
        self.n_qubits = self.n_families * self._per_family
        self.dim = 2 ** self.n_qubits
        if self.dim > dim_cap:
            raise FockError(
                f"Fock dimension 2^{self.n_qubits} exceeds cap {dim_cap}")
        self._op_cache: Dict[Tuple, sp.csr_matrix] = {}
        self.levels = self._excitation_levels()

    # -- chain helpers -----------------------------------------------------
    def _mode_qubit(self, family: int, a: int, n: int) -> int:
        # n >= 1; a fastest so neighboring colors share short strings
        return family * self._per_family + (n - 1) * self.sc.n + a

    def _zero_qubit(self, family: int, pair: int) -> int:
        return family * self._per_family + self.sc.n * self.n_f + pair

    def _chain(self, target: int, mat: sp.csr_matrix) -> sp.csr_matrix:
        """Z-string up to target, mat at target, identity after."""
        out = sp.identity(1, format="csr", dtype=complex)
        for j in range(self.n_qubits):
            if j < target:
                out = sp.kron(out, _Z, format="csr")
            elif j == target:
                out = sp.kron(out, mat, format="csr")
            else:
                out = sp.kron(out, sp.identity(
                    2 ** (self.n_qubits - j), format="csr", dtype=complex),
                    format="csr")
                break
        return out

    def _parity(self, family: int) -> sp.csr_matrix:
        """Product of Z over this family's qubits with strings over earlier ones."""
        out = sp.identity(1, format="csr", dtype=complex)
        lo = family * self._per_family
        hi = lo + self._per_family
        for j in range(self.n_qubits):
            out = sp.kron(out, _Z if j < hi else sp.identity(
                2, format="csr", dtype=complex), format="csr")
        return out

    def _excitation_levels(self) -> np.ndarray:
        lv = np.zeros(self.dim, dtype=np.int64)
        idx = np.arange(self.dim)
        for fam in range(self.n_families):
            for n in range(1, self.n_f + 1):
                for a in range(self.sc.n):
                    q = self._mode_qubit(fam, a, n)
                    bit = (idx >> (self.n_qubits - 1 - q)) & 1
                    lv += n * bit
        return lv

    # -- fermions ------------------------------------------------------------
    def psi(self, a: int, n: int, family: int = 0) -> sp.csr_matrix:
        """psi^a_n with {psi^a_n, psi^b_m} = 2 delta^{ab} delta_{n,-m}."""
        if not (0 <= a < self.sc.n):
            raise FockError(f"color {a} out of range")
        if abs(n) > self.n_f:
            raise FockError(f"mode {n} outside the window N_f={self.n_f}")
        if family >= self.n_families:
            raise FockError("family not present in this realization")
        key = ("psi", family, a, n)
        if key in self._op_cache:
            return self._op_cache[key]
        if n > 0:
            op = np.sqrt(2.0) * self._chain(
                self._mode_qubit(family, a, n), _ANNIHILATE.T.tocsr())
        elif n < 0:
            op = self.psi(a, -n, family).conj().T.tocsr()
        else:
            if a < 2 * self._zpairs:
                mat = _X if a % 2 == 0 else _Y
                op = self._chain(self._zero_qubit(family, a // 2), mat)
            else:
                # odd N: the last zero mode is the family parity operator,
                # hermitian with square one, anticommuting with all fermions
                op = self._parity(family)
        self._op_cache[key] = op
        return op

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    # -- safe subspace -------------------------------------------------------
    def safe_indices(self, level: int) -> np.ndarray:
        return np.nonzero(self.levels <= level)[0]

    def restrict(self, op: sp.spmatrix, level: int) -> np.ndarray:
        idx = self.safe_indices(level)
        return np.asarray(op.tocsr()[np.ix_(idx, idx)].todense())

    def mode_budget(self, level: int, *mode_indices: int) -> bool:
        """True when identities at these current modes are exact at this level."""
        return self.n_f >= level + sum(abs(int(n)) for n in mode_indices) + 1


def normal_order_pair(i: int, j: int) -> Tuple[int, Tuple[int, int]]:
    """Order a fermion bilinear with positive Fourier indices to the left.

    Returns (sign, (left, right)).  Zero-mode pairs are left as written
    (definition boundary, recorded convention).
    """
    if j > 0 and j > i:
        return -1, (j, i)
    return 1, (i, j)


def K_current(f: FockSpace, a: int, n: int, family: int = 0) -> sp.csr_matrix:
    """K^a_n = -(1/4) lambda^{abc} : psi^b_{n-m} psi^c_m :, truncated to N_f."""
    key = ("K", family, a, n)
    if key in f._op_cache:
        return f._op_cache[key]
    sc = f.sc
    out = sp.csr_matrix((f.dim, f.dim), dtype=complex)
    for m in range(-f.n_f, f.n_f + 1):
        i = n - m
        if abs(i) > f.n_f:
            continue
        sgn, (left, right) = normal_order_pair(i, m)
        swapped = (left, right) != (i, m)
        for b in range(sc.n):
            for c in range(sc.n):
                coeff = sc.lam[a, b, c]
                if coeff == 0.0:
                    continue
                bb, cc = (c, b) if swapped else (b, c)
                out = out - 0.25 * coeff * sgn * (
                    f.psi(bb, left, family) @ f.psi(cc, right, family))
    out = out.tocsr()
    f._op_cache[key] = out
    return out


def bosonic_current(f: FockSpace, a: int, n: int) -> sp.csr_matrix:
    """T^a_n: zero at level k=0, or a second-fermion K-type bilinear (k = h_dual)."""
    if f.realization == "trivial_k0":
        return sp.csr_matrix((f.dim, f.dim), dtype=complex)
    return K_current(f, a, n, family=1)


def S_current(f: FockSpace, a: int, n: int) -> sp.csr_matrix:
    return bosonic_current(f, a, n) + K_current(f, a, n)


def level_k(f: FockSpace) -> float:
    return 0.0 if f.realization == "trivial_k0" else f.sc.h_dual


# ---------------------------------------------------------------------------
# coupling data, supercharge and Hamiltonian
# ---------------------------------------------------------------------------

@dataclass
class CouplingData:
    """Level data and an optional gauge field A^a_n with (A^a_n)^* = -A^a_{-n}."""

    k: float
    h_dual: float
    a_field: Optional[Dict[Tuple[int, int], complex]] = None

    @property
    def k_bar(self) -> float:
        return (self.k + self.h_dual) / 4.0

    def validate(self, atol: float = 1e-12):
        if self.a_field:
            for (a, n), v in self.a_field.items():
                other = self.a_field.get((a, -n), 0.0)
                if abs(np.conj(v) + other) > atol:
                    raise FockError("gauge field violates (A^a_n)^* = -A^a_{-n}")

    def a_coeff(self, a: int, n: int) -> complex:
        if not self.a_field:
            return 0.0
        return self.a_field.get((a, n), 0.0)


def coupling_for(f: FockSpace,
                 a_field: Optional[Dict[Tuple[int, int], complex]] = None) -> CouplingData:
    cd = CouplingData(k=level_k(f), h_dual=f.sc.h_dual, a_field=a_field)
    cd.validate()
    return cd


def random_gauge_field(rng, sc: StructureConstants, bandwidth: int,
                       scale: float = 0.3) -> Dict[Tuple[int, int], complex]:
    """Seeded A^a_n with the antihermitian reality condition."""
    out: Dict[Tuple[int, int], complex] = {}
    for a in range(sc.n):
        for n in range(0, bandwidth + 1):
            c = scale * (rng.standard_normal() + 1j * rng.standard_normal())
            if n == 0:
                out[(a, 0)] = 1j * c.imag  # purely imaginary at n = 0
            else:
                out[(a, n)] = c
                out[(a, -n)] = -np.conj(c)
    return out


def supercharge(f: FockSpace) -> sp.csr_matrix:
    """Q = i psi^a_n (T^a_{-n} + (1/3) K^a_{-n}), summed over the window."""
    key = ("Q",)
    if key in f._op_cache:
        return f._op_cache[key]
    out = sp.csr_matrix((f.dim, f.dim), dtype=complex)
    for a in range(f.sc.n):
        for n in range(-f.n_f, f.n_f + 1):
            t = bosonic_current(f, a, -n)
            kc = K_current(f, a, -n)
            out = out + 1j * (f.psi(a, n) @ (t + kc / 3.0))
    out = out.tocsr()
    f._op_cache[key] = out
    return out


def hamiltonian(f: FockSpace) -> sp.csr_matrix:
    """h = -:T^a_n T^a_{-n}: + (k_bar/2) : n psi^a_n psi^a_{-n} : + N/24."""
    key = ("h",)
    if key in f._op_cache:
        return f._op_cache[key]
    kbar = coupling_for(f).k_bar
    out = (f.sc.n / 24.0) * sp.identity(f.dim, format="csr", dtype=complex)
    for a in range(f.sc.n):
        # fermion part: n>0 and n<0 terms combine to 2n psi_n psi_{-n}
        for n in range(1, f.n_f + 1):
            out = out + kbar * n * (f.psi(a, n) @ f.psi(a, -n))
        if f.realization == "second_fermion":
            t0 = bosonic_current(f, a, 0)
            out = out - t0 @ t0
            for n in range(1, f.n_f + 1):
                out = out - 2.0 * (bosonic_current(f, a, n)
                                   @ bosonic_current(f, a, -n))
    out = out.tocsr()
    f._op_cache[key] = out
    return out


def coupled_supercharge(f: FockSpace, cd: CouplingData) -> sp.csr_matrix:
    """Q(A) = Q + i k_bar psi^a_n A^a_{-n}."""
    out = supercharge(f).copy()
    for a in range(f.sc.n):
        for n in range(-f.n_f, f.n_f + 1):
            c = cd.a_coeff(a, -n)
            if c != 0.0:
                out = out + 1j * cd.k_bar * c * f.psi(a, n)
    return out.tocsr()


def coupled_hamiltonian(f: FockSpace, cd: CouplingData) -> sp.csr_matrix:
    """h(A) = h - k_bar (2 S^a_n A^a_{-n} + k_bar A^a_n A^a_{-n})."""
    out = hamiltonian(f).copy()
    kbar = cd.k_bar
    scal = 0.0
    for a in range(f.sc.n):
        for n in range(-f.n_f, f.n_f + 1):
            c = cd.a_coeff(a, -n)
            if c != 0.0:
                out = out - 2.0 * kbar * c * S_current(f, a, n)
            scal += cd.a_coeff(a, n) * cd.a_coeff(a, -n)
    out = out - (kbar ** 2) * scal * sp.identity(f.dim, format="csr", dtype=complex)
    return out.tocsr()


def equivariance_rhs(f: FockSpace, cd: CouplingData, a: int, n: int) -> sp.csr_matrix:
    """i k_bar (n psi^a_n + lambda^{abc} psi^c_{n+m} A^b_{-m})."""
    out = (1j * cd.k_bar * n) * f.psi(a, n)
    for b in range(f.sc.n):
        for c in range(f.sc.n):
            coeff = f.sc.lam[a, b, c]
            if coeff == 0.0:
                continue
            for m in range(-f.n_f, f.n_f + 1):
                av = cd.a_coeff(b, -m)
                if av != 0.0 and abs(n + m) <= f.n_f:
                    out = out + 1j * cd.k_bar * coeff * av * f.psi(c, n + m)
    return out.tocsr()


def commutator_s(x: sp.spmatrix, y: sp.spmatrix) -> sp.csr_matrix:
    return (x @ y - y @ x).tocsr()


def anticommutator_s(x: sp.spmatrix, y: sp.spmatrix) -> sp.csr_matrix:
    return (x @ y + y @ x).tocsr()
