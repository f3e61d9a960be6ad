"""Charged moments of momentum eigenstates of the periodic XX chain.

Eigenstates are Slater determinants of plane waves e^{2 pi i k j / N} / sqrt(N)
with half-integer k.  Diagonal moments use the Majorana correlation matrix
of the subsystem; off-diagonal ones compose number-conserving Gaussian
transition operators.  The subsystem charge is Q_A = N_A - l/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "MomentumState",
    "MajoranaCorrelation",
    "BranchTrackingError",
    "CompositionError",
    "OrthogonalCompositionError",
    "charge_matrix",
    "one_body_correlation",
    "correlation_matrix",
    "diagonal_charged_moment",
    "diagonal_charged_moment_direct",
    "generalized_charged_moment",
    "normalized_moment",
    "level2_lattice_states",
]


class BranchTrackingError(RuntimeError):
    """The square-root branch could not be followed; refine the theta step."""


class CompositionError(RuntimeError):
    pass


class OrthogonalCompositionError(CompositionError):
    """A transition operator has zero normalization even after regularization."""


def _as_half(k) -> Fraction:
    f = Fraction(k).limit_denominator(2)
    if f.denominator != 2 or abs(float(f) - float(k)) > 1e-12:
        raise ValueError(f"momentum label {k} is not a half-integer")
    return f


@dataclass(frozen=True)
class MomentumState:
    """Slater determinant c^dag_{k_1} ... c^dag_{k_p} |vac> with k_1 < ... < k_p."""

    N: int
    occupied: tuple

    def __post_init__(self):
        if self.N < 2 or self.N % 2:
            raise ValueError(f"chain length must be even, got {self.N}")
        ks = sorted({_as_half(k) for k in self.occupied})
        if len(ks) != len(self.occupied):
            raise ValueError("repeated momentum label")
        for k in ks:
            if not -self.N / 2 < k < self.N / 2:
                raise ValueError(f"momentum {k} outside the Brillouin zone of N={self.N}")
        object.__setattr__(self, "occupied", tuple(ks))

    @classmethod
    def ground(cls, N: int) -> "MomentumState":
        """Half filling: the N/2 momenta with |k| < N/4."""
        return cls(N, tuple(Fraction(2 * j + 1, 2) for j in range(-N // 2, N // 2) if abs(2 * j + 1) < N / 2))

    def excite(self, remove=(), add=()) -> "MomentumState":
        occ = set(self.occupied)
        for k in remove:
            k = _as_half(k)
            if k not in occ:
                raise ValueError(f"cannot remove unoccupied momentum {k}")
            occ.discard(k)
        for k in add:
            k = _as_half(k)
            if k in occ:
                raise ValueError(f"momentum {k} already occupied")
            occ.add(k)
        return MomentumState(self.N, tuple(occ))

    @property
    def particle_number(self) -> int:
        return len(self.occupied)

    def orbitals(self) -> np.ndarray:
        """N x p matrix of occupied single-particle wavefunctions."""
        j = np.arange(self.N)[:, None]
        k = np.array([float(x) for x in self.occupied])[None, :]
        return np.exp(2j * np.pi * k * j / self.N) / math.sqrt(self.N)


@dataclass(frozen=True, eq=False)
class MajoranaCorrelation:
    """Gamma_{ab} = <a_a a_b> - delta_ab with a_{2m-1} = c^dag + c, a_{2m} = i (c^dag - c)."""

    gamma: np.ndarray

    @property
    def ell(self) -> int:
        return self.gamma.shape[0] // 2


def charge_matrix(ell: int) -> np.ndarray:
    """Q~ with (Q~)_{2m,2m-1} = -(Q~)_{2m-1,2m} = -i (1-based)."""
    q = np.zeros((2 * ell, 2 * ell), dtype=complex)
    for m in range(ell):
        q[2 * m + 1, 2 * m] = -1j
        q[2 * m, 2 * m + 1] = 1j
    return q


def one_body_correlation(state: MomentumState, ell: int) -> np.ndarray:
    """C_{ij} = <c_i^dag c_j> for sites i, j < ell."""
    v = state.orbitals()[:ell]
    return (v.conj() @ v.T)


def correlation_matrix(state: MomentumState, ell: int) -> MajoranaCorrelation:
    """Majorana correlation matrix on the first ``ell`` sites.

    The 2x2 block (m, n) holds g1 = C_mn - C_nm on the diagonal and
    g2 = <a_{2m-1} a_{2n}> = i (delta_mn - C_mn - C_nm) off the diagonal.
    """
    if not 1 <= ell <= state.N:
        raise ValueError(f"subsystem size {ell} out of range for N={state.N}")
    c = one_body_correlation(state, ell)
    eye = np.eye(ell)
    g1 = c - c.T
    g2 = 1j * (eye - c - c.T)
    g2m = -1j * (eye - c - c.T)  # <a_{2m} a_{2n-1}>
    gam = np.empty((2 * ell, 2 * ell), dtype=complex)
    gam[0::2, 0::2] = g1
    gam[1::2, 1::2] = g1
    gam[0::2, 1::2] = g2
    gam[1::2, 0::2] = g2m
    return MajoranaCorrelation(gam)


def _moment_det(corr: MajoranaCorrelation, n: int):
    g = corr.gamma
    eye = np.eye(g.shape[0])
    pm = np.linalg.matrix_power((eye - g) / 2, n)
    pp = np.linalg.matrix_power((eye + g) / 2, n)
    q = charge_matrix(corr.ell)
    ppq = pp @ q

    def det(theta):
        # e^{-i theta Q~} = cos(theta) - i sin(theta) Q~ since Q~^2 = 1
        return np.linalg.det(pm + math.cos(theta) * pp - 1j * math.sin(theta) * ppq)

    return det


def diagonal_charged_moment(state: MomentumState, ell: int, theta: float, n: int = 1,
                            max_step: float = 0.05, min_step: float = 1e-6,
                            max_jump: float = math.pi / 4, zero_tol: float = 1e-24) -> complex:
    """Tr(rho_A^n e^{i theta Q_A}) = sqrt(det[((1-G)/2)^n + ((1+G)/2)^n e^{-i theta Q~}]).

    In this Majorana convention a filled mode has G = -Q~ on its 2x2 block,
    so e^{+i theta Q~} would count holes; the minus sign makes the result
    refer to Q_A = N_A - l/2 like every other route in this module.
    The square root follows the phase of the determinant continuously from
    theta = 0, where it is real and positive.  Steps are halved whenever
    the phase jumps by more than ``max_jump``.
    """
    if n < 1:
        raise ValueError("replica index must be >= 1")
    det = _moment_det(correlation_matrix(state, ell), n)
    d0 = det(0.0)
    phase = 0.0
    t, prev = 0.0, d0
    sign = 1.0 if theta >= 0 else -1.0
    target = abs(theta)
    step = max_step
    while t < target:
        h = min(step, target - t)
        d = det(sign * (t + h))
        if abs(d) <= zero_tol * abs(d0):
            # zeros only occur at |theta| = pi where modes sit at nu = 1/2
            if t + h >= target:
                return 0j
            raise BranchTrackingError(f"moment vanishes inside the path near theta={sign * (t + h):.6g}")
        jump = np.angle(d / prev)
        if abs(jump) > max_jump:
            step = h / 2
            if step < min_step:
                raise BranchTrackingError(
                    f"lost the square-root branch near theta={sign * t:.6g}; use a finer theta step")
            continue
        phase += jump
        t += h
        prev = d
        step = min(max_step, 2 * step)
    mag = math.sqrt(abs(prev)) if target > 0 else math.sqrt(abs(d0))
    return complex(mag * np.exp(0.5j * phase))


def diagonal_charged_moment_direct(state: MomentumState, ell: int, theta: float, n: int = 1) -> complex:
    """Branch-free route: prod over eigenvalues nu of C_A of nu^n e^{i theta/2} + (1-nu)^n e^{-i theta/2}."""
    nu = np.linalg.eigvalsh(one_body_correlation(state, ell))
    nu = np.clip(nu, 0.0, 1.0)
    return complex(np.prod(nu**n * np.exp(0.5j * theta) + (1 - nu) ** n * np.exp(-0.5j * theta)))


def _transition(ket: np.ndarray, bra: np.ndarray, ell: int):
    """Overlap <bra|ket> and the restricted transition matrix K = D_AA."""
    s = bra.conj().T @ ket
    ov = np.linalg.det(s)
    d = ket[:ell] @ np.linalg.solve(s, bra[:ell].conj().T)
    return ov, d


def _regularized_kets(ket: MomentumState, bra: MomentumState):
    """Kets of the form a_i + z b_i on differing orbitals, for z on the roots of unity.

    The moment is a polynomial of degree d in z whose constant term is the
    target, so averaging over d + 1 roots of unity recovers it exactly.
    """
    vk = ket.orbitals()
    only_ket = [i for i, k in enumerate(ket.occupied) if k not in bra.occupied]
    only_bra = [k for k in bra.occupied if k not in ket.occupied]
    d = len(only_ket)
    if d == 0:
        return [(1.0 + 0j, vk)]
    extra = MomentumState(bra.N, tuple(only_bra)).orbitals()
    out = []
    for j in range(d + 1):
        z = np.exp(2j * np.pi * j / (d + 1))
        v = vk.copy()
        v[:, only_ket] += z * extra
        out.append((1.0 / (d + 1), v))
    return out


def generalized_charged_moment(states, ell: int, theta: float, n: int | None = None,
                               overlap_tol: float = 1e-10) -> complex:
    """Tr_A[rho_{2n-1,2n} ... rho_{12} e^{i theta Q_A}] with rho_{ij} = Tr_{A^c} |Omega_i><Omega_j|.

    Each |Omega_i><Omega_j| with nonzero overlap is <Omega_j|Omega_i> times a
    Gaussian operator with restricted transition matrix K = D_AA,
    D = V_i (V_j^dag V_i)^{-1} V_j^dag.  For n = 1 the trace is
    det(1 - K + K w); for n = 2 it is det[(1 - K_34)(1 - K_12) + K_34 K_12 w]
    with w = e^{i theta}.  Orthogonal pairs go through _regularized_kets.
    """
    states = list(states)
    if n is None:
        n = len(states) // 2
    if len(states) != 2 * n or n not in (1, 2):
        raise ValueError("need 2 states for n = 1 or 4 states for n = 2")
    N = states[0].N
    if any(s.N != N for s in states):
        raise ValueError("states live on chains of different length")
    if not 1 <= ell <= N:
        raise ValueError(f"subsystem size {ell} out of range for N={N}")
    pairs = [(states[2 * i], states[2 * i + 1]) for i in range(n)]
    for ket, bra in pairs:
        if ket.particle_number != bra.particle_number:
            raise ValueError("each ket/bra pair must share the particle number")
    w = np.exp(1j * theta)
    eye = np.eye(ell)

    def pair_terms(ket, bra):
        vb = bra.orbitals()
        ov, _ = _transition(ket.orbitals(), vb, ell)
        if abs(ov) > overlap_tol:
            return [(1.0, ) + _transition(ket.orbitals(), vb, ell)]
        terms = []
        for weight, vk in _regularized_kets(ket, bra):
            ov_z, k_z = _transition(vk, vb, ell)
            if abs(ov_z) <= overlap_tol:
                raise OrthogonalCompositionError("regularized transition still has zero overlap")
            terms.append((weight, ov_z, k_z))
        return terms

    t12 = pair_terms(*pairs[0])
    total = 0j
    if n == 1:
        for wt, ov, k in t12:
            total += wt * ov * np.linalg.det(eye - k + k * w)
    else:
        t34 = pair_terms(*pairs[1])
        for wa, ova, ka in t12:
            for wb, ovb, kb in t34:
                m = (eye - kb) @ (eye - ka) + (kb @ ka) * w
                total += wa * wb * ova * ovb * np.linalg.det(m)
    return complex(total * np.exp(-0.5j * theta * ell))


def normalized_moment(states, ell: int, theta: float) -> complex:
    """Generalized moment divided by the ground-state moment at the same (l, theta, n)."""
    states = list(states)
    n = len(states) // 2
    ground = MomentumState.ground(states[0].N)
    return generalized_charged_moment(states, ell, theta, n) / diagonal_charged_moment_direct(ground, ell, theta, n)


def level2_lattice_states(N: int) -> dict:
    """Lattice counterparts of low-lying CFT states at half filling.

    Keys: ``ground``, ``dphi`` (particle-hole pair at the right Fermi
    point), ``vertex`` (one added particle) and the two level-2
    realizations ``level2_a`` (hole N/4-1/2, particle N/4+3/2) and
    ``level2_b`` (hole N/4-3/2, particle N/4+1/2).  Values are
    (MomentumState, weight).  The two level-2 states are charge conjugates:
    the moments of ``level2_b`` at theta equal those of ``level2_a`` at
    -theta, so they are averaged as (a(theta) + b(-theta)) / 2.
    """
    if N % 4:
        raise ValueError(f"the state dictionary needs N divisible by 4, got {N}")
    g = MomentumState.ground(N)
    kf = Fraction(N, 4)
    h = Fraction(1, 2)
    return {
        "ground": (g, 1.0),
        "dphi": (g.excite(remove=[kf - h], add=[kf + h]), 1.0),
        "vertex": (g.excite(add=[kf + h]), 1.0),
        "level2_a": (g.excite(remove=[kf - h], add=[kf + 3 * h]), 0.5),
        "level2_b": (g.excite(remove=[kf - 3 * h], add=[kf + h]), 0.5),
    }
