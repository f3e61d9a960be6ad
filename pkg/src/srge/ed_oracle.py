"""Dense exact-diagonalization reference for small fermion chains.

States are stored in the full 2^N occupation basis (site 0 is the most
significant bit) with creation operators ordered by site.  Every state
has a definite particle number, so generalized reduced density matrices
are block diagonal in the subsystem particle number N_A; blocks are kept
separately.  The subsystem charge is Q_A = N_A - l/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .xx_lattice import MomentumState

__all__ = [
    "N_MAX",
    "DenseState",
    "GeneralizedRDM",
    "EmptySectorError",
    "popcounts",
    "reduce",
    "charge_projector",
    "sector_trace",
    "srre",
    "srre_fourier",
    "sector_weights",
    "charged_moment_ed",
    "two_point",
]

N_MAX = 14


class EmptySectorError(ValueError):
    """The requested charge sector carries zero weight."""


def popcounts(n_bits: int) -> np.ndarray:
    idx = np.arange(2**n_bits)
    out = np.zeros(2**n_bits, dtype=int)
    for b in range(n_bits):
        out += (idx >> b) & 1
    return out


@dataclass(frozen=True, eq=False)
class DenseState:
    N: int
    amplitudes: np.ndarray
    particle_number: int

    def __post_init__(self):
        if not 1 <= self.N <= N_MAX:
            raise ValueError(f"dense states need 1 <= N <= {N_MAX}")
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (2**self.N,):
            raise ValueError("amplitude vector has the wrong dimension")
        pc = popcounts(self.N)
        if np.any(np.abs(amp[pc != self.particle_number]) > 1e-12):
            raise ValueError("amplitudes leave the declared particle-number sector")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def from_occupations(cls, occ) -> "DenseState":
        occ = [int(x) for x in occ]
        N = len(occ)
        idx = sum(b << (N - 1 - j) for j, b in enumerate(occ))
        amp = np.zeros(2**N, dtype=complex)
        amp[idx] = 1.0
        return cls(N, amp, sum(occ))

    @classmethod
    def from_orbitals(cls, orbitals: np.ndarray) -> "DenseState":
        """Slater determinant prod_a (sum_j V_ja c_j^dag) |vac>."""
        N, p = orbitals.shape
        amp = np.zeros(2**N, dtype=complex)
        for sites in combinations(range(N), p):
            idx = sum(1 << (N - 1 - j) for j in sites)
            amp[idx] = np.linalg.det(orbitals[list(sites), :]) if p else 1.0
        return cls(N, amp, p)

    @classmethod
    def from_momentum_state(cls, state: MomentumState) -> "DenseState":
        return cls.from_orbitals(state.orbitals())

    @classmethod
    def random(cls, N: int, p: int, rng: np.random.Generator) -> "DenseState":
        pc = popcounts(N)
        amp = np.zeros(2**N, dtype=complex)
        sel = pc == p
        amp[sel] = rng.normal(size=sel.sum()) + 1j * rng.normal(size=sel.sum())
        return cls(N, amp / np.linalg.norm(amp), p)


@dataclass(frozen=True, eq=False)
class GeneralizedRDM:
    """Tr_{A^c} |psi_in><psi_out| as blocks indexed by the subsystem particle number."""

    ell: int
    blocks: dict

    @property
    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks.values()))

    def matrix(self) -> np.ndarray:
        pc = popcounts(self.ell)
        out = np.zeros((2**self.ell, 2**self.ell), dtype=complex)
        for q, b in self.blocks.items():
            sel = np.flatnonzero(pc == q)
            out[np.ix_(sel, sel)] = b
        return out


def reduce(psi_in: DenseState, psi_out: DenseState, ell: int) -> GeneralizedRDM:
    """Partial trace of |psi_in><psi_out| over the sites l..N-1."""
    if psi_in.N != psi_out.N:
        raise ValueError("states live on chains of different length")
    if psi_in.particle_number != psi_out.particle_number:
        raise ValueError("generalized RDMs need states with equal particle number")
    N = psi_in.N
    if not 1 <= ell < N:
        raise ValueError(f"subsystem size must satisfy 1 <= l < N, got {ell}")
    m_in = psi_in.amplitudes.reshape(2**ell, 2 ** (N - ell))
    m_out = psi_out.amplitudes.reshape(2**ell, 2 ** (N - ell))
    pa, pb = popcounts(ell), popcounts(N - ell)
    p = psi_in.particle_number
    blocks = {}
    for q in range(ell + 1):
        rows = np.flatnonzero(pa == q)
        cols = np.flatnonzero(pb == p - q)
        if cols.size == 0:
            blocks[q] = np.zeros((rows.size, rows.size), dtype=complex)
            continue
        a = m_in[np.ix_(rows, cols)]
        b = m_out[np.ix_(rows, cols)]
        blocks[q] = a @ b.conj().T
    return GeneralizedRDM(ell, blocks)


def charge_projector(ell: int, q: int) -> np.ndarray:
    """Dense projector onto N_A = q on l sites."""
    return np.diag((popcounts(ell) == q).astype(float))


def _product_block(rdms, q):
    out = rdms[0].blocks[q]
    for r in rdms[1:]:
        out = r.blocks[q] @ out
    return out


def sector_trace(rdms, q: int) -> complex:
    """Tr_A[rho_{2n-1,2n} ... rho_{12} Pi_q] with rdms = [rho_12, rho_34, ...]."""
    ell = rdms[0].ell
    if not 0 <= q <= ell:
        return 0j
    return complex(np.trace(_product_block(rdms, q)))


def srre(rdms, q: int, ground: GeneralizedRDM | None = None, tol: float = 1e-14) -> complex:
    """Resolved Renyi entropy of index n = len(rdms) by projectors.

    With ``ground`` this is the generalized entropy
    log(Tr[rho ... rho Pi_q] / Tr[rho_0^n Pi_q]) / (1 - n); without it
    the rdms must be equal and the diagonal definition
    log(Tr[rho^n Pi_q] / Tr[rho Pi_q]^n) / (1 - n) is used.
    """
    n = len(rdms)
    if n < 2:
        raise ValueError("resolved Renyi entropies need n >= 2")
    num = sector_trace(rdms, q)
    if ground is not None:
        den = sector_trace([ground] * n, q)
    else:
        den = sector_trace(rdms[:1], q) ** n
    if abs(den) <= tol:
        raise EmptySectorError(f"charge sector N_A={q} has zero weight")
    return complex(np.log(num / den) / (1 - n))


def charged_moment_ed(states, ell: int, theta: float, n: int | None = None) -> complex:
    """Tr_A[rho_{2n-1,2n} ... rho_{12} e^{i theta Q_A}] by dense algebra."""
    states = list(states)
    if n is None:
        n = len(states) // 2
    if len(states) != 2 * n:
        raise ValueError("need 2n states")
    rdms = [reduce(states[2 * i], states[2 * i + 1], ell) for i in range(n)]
    return _moment_from_rdms(rdms, theta)


def _moment_from_rdms(rdms, theta):
    ell = rdms[0].ell
    return complex(sum(np.exp(1j * theta * (q - ell / 2)) * sector_trace(rdms, q) for q in range(ell + 1)))


def sector_weights(moment, ell: int) -> np.ndarray:
    """Coefficients c_q (q = 0..l) of moment(theta) = sum_q c_q e^{i theta (q - l/2)}.

    Exact discrete transform on l + 1 nodes theta_k = 2 pi k / (l + 1).
    """
    nodes = 2 * np.pi * np.arange(ell + 1) / (ell + 1)
    vals = np.array([moment(t) * np.exp(0.5j * t * ell) for t in nodes])
    return np.fft.fft(vals) / (ell + 1)


def srre_fourier(moment, ground_moment, ell: int, q: int, n: int) -> complex:
    """Generalized resolved entropy through the Fourier transforms of the moments."""
    if n < 2:
        raise ValueError("resolved Renyi entropies need n >= 2")
    c = sector_weights(moment, ell)[q]
    c0 = sector_weights(ground_moment, ell)[q]
    return complex(np.log(c / c0) / (1 - n))


def two_point(state: DenseState) -> np.ndarray:
    """C_ij = <c_i^dag c_j> with Jordan-Wigner signs."""
    N = state.N
    amp = state.amplitudes
    out = np.zeros((N, N), dtype=complex)
    idx = np.arange(2**N)
    bits = [(idx >> (N - 1 - j)) & 1 for j in range(N)]
    for i in range(N):
        out[i, i] = np.sum(np.abs(amp) ** 2 * bits[i])
        for j in range(N):
            if i == j:
                continue
            # c_i^dag c_j |x>: needs x_j = 1, x_i = 0
            ok = (bits[j] == 1) & (bits[i] == 0)
            lo, hi = min(i, j), max(i, j)
            between = np.zeros_like(idx)
            for s in range(lo + 1, hi):
                between += bits[s]
            sign = (-1.0) ** between
            src = idx[ok]
            dst = src ^ (1 << (N - 1 - j)) ^ (1 << (N - 1 - i))
            out[i, j] = np.sum(np.conj(amp[dst]) * sign[ok] * amp[src])
    return out
