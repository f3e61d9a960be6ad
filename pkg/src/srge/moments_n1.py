"""Normalized n = 1 generalized charged moments of the compact boson.

F_1(theta; psi_1, psi_2) factorizes into a chiral and an anti-chiral
piece.  The chiral piece is exp(i beta theta r alpha) times a polynomial
in theta assembled from vertex contractions L(k) and equal-multiset
pairings of the remaining modes.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core_types import (
    BosonState,
    ChiralModeList,
    Geometry,
    ModelParams,
    ModulatedPolynomial,
    conjugate_modulated,
    mul_modulated,
    normalization_factor,
)
from .wick_engine import M_MAX, _insertion_tables, contraction_sum, kernel

__all__ = [
    "N1Request",
    "vertex_factor_n1",
    "f1_chiral",
    "f1_chiral_generic",
    "f1_full",
    "f1_excited_diagonal",
    "delta_z1",
    "delta_z1_closed_form",
]


@dataclass(frozen=True)
class N1Request:
    params: ModelParams
    geometry: Geometry
    psi_in: BosonState
    psi_out: BosonState
    zero_momentum_convention: bool = True
    v_over_L: float = 0.0


def vertex_factor_n1(beta: float, r: float, k: int, sigma: int) -> complex:
    """L(k) = sigma beta (exp(-sigma 2 pi i r k) - 1)."""
    return sigma * beta * (np.exp(-sigma * 2j * np.pi * r * k) - 1.0)


def _modes(x) -> ChiralModeList:
    return x if isinstance(x, ChiralModeList) else ChiralModeList(tuple(x))


def _xi_rate(modes_in, modes_out, v_over_L):
    return 2 * np.pi * v_over_L * (sum(modes_in.modes) - sum(modes_out.modes))


def f1_chiral(params: ModelParams, r: float, modes_in, modes_out, alpha: float,
              alpha_out: float | None = None, v_over_L: float | None = None) -> ModulatedPolynomial:
    """Chiral n = 1 moment by the subset-removal sum.

    Each subset S of insertion positions is contracted with the flux
    vertex, contributing (-theta / 2 pi)^|S| prod_{i in S} L(k_i); the rest
    must pair in-modes with out-modes of equal k, which happens iff the
    remaining multisets agree.  The normalization of the removed modes is
    N_full / N_remaining.  A charge mismatch gives an identically-zero
    polynomial.  ``v_over_L`` restores the momentum phase xi.
    """
    modes_in, modes_out = _modes(modes_in), _modes(modes_out)
    m = len(modes_in) + len(modes_out)
    if m > M_MAX:
        raise ValueError(f"{m} insertions exceed the bound {M_MAX}")
    if alpha_out is not None and not math.isclose(alpha, alpha_out, rel_tol=0, abs_tol=1e-12):
        return ModulatedPolynomial.zero()
    beta = params.beta
    ks = list(modes_in.modes) + list(modes_out.modes)
    sig = [1] * len(modes_in) + [-1] * len(modes_out)
    lk = [vertex_factor_n1(beta, r, k, s) for k, s in zip(ks, sig)]
    n_full = normalization_factor(modes_in) * normalization_factor(modes_out)
    coeffs = np.zeros(m + 1, dtype=complex)
    idx = range(m)
    for size in range(m + 1):
        if (m - size) % 2:
            continue
        for sub in combinations(idx, size):
            rem = [i for i in idx if i not in sub]
            rin = Counter(ks[i] for i in rem if sig[i] == 1)
            rout = Counter(ks[i] for i in rem if sig[i] == -1)
            if rin != rout:
                continue
            n_rem = normalization_factor(list(rin.elements())) ** 2
            term = n_full / n_rem
            for i in sub:
                term = term * lk[i]
            coeffs[size] += term * (-1.0 / (2 * np.pi)) ** size
    rate = beta * r * alpha
    if v_over_L is not None:
        rate_xi = _xi_rate(modes_in, modes_out, v_over_L)
        coeffs = coeffs * np.exp(1j * rate_xi)
    return ModulatedPolynomial(rate, coeffs)


def f1_chiral_generic(params: ModelParams, r: float, modes_in, modes_out, alpha: float) -> ModulatedPolynomial:
    """Chiral n = 1 moment by explicit residues (keeps the alpha dependence).

    Independent of f1_chiral: vertex factors come from residues of the full
    <V dphi> propagator sum and pair values from double residues.
    """
    modes_in, modes_out = _modes(modes_in), _modes(modes_out)
    kern = kernel(1, float(r))
    sheets = [0] * len(modes_in) + [1] * len(modes_out)
    ks = list(modes_in.modes) + list(modes_out.modes)
    v, w = _insertion_tables(kern, sheets, ks, (alpha, -alpha), params.beta)
    n_full = normalization_factor(modes_in) * normalization_factor(modes_out)
    return ModulatedPolynomial(params.beta * r * alpha, n_full * contraction_sum(v, w))


def f1_full(req: N1Request) -> ModulatedPolynomial:
    """Chiral times anti-chiral moment; the anti-chiral factor is conjugated."""
    beta, r = req.params.beta, req.geometry.ratio
    a_in, a_out = req.psi_in.alpha(beta), req.psi_out.alpha(beta)
    b_in, b_out = req.psi_in.alphabar(beta), req.psi_out.alphabar(beta)
    vol = None if req.zero_momentum_convention else req.v_over_L
    left = f1_chiral(req.params, r, req.psi_in.left, req.psi_out.left, a_in, a_out, v_over_L=vol)
    right = f1_chiral(req.params, r, req.psi_in.right, req.psi_out.right, b_in, b_out, v_over_L=vol)
    return mul_modulated(left, conjugate_modulated(right))


def _laguerre_product(beta, r, modes: ChiralModeList) -> np.ndarray:
    """Coefficients in theta of prod_k L_{n_k}(x_k theta^2)."""
    poly = np.array([1.0])
    for k, nk in sorted(modes.multiplicity.items()):
        x = beta**2 * math.sin(k * math.pi * r) ** 2 / (math.pi**2 * k)
        # L_n(y) = sum_s C(n, s) (-y)^s / s!
        factor = np.zeros(2 * nk + 1)
        for s in range(nk + 1):
            factor[2 * s] = math.comb(nk, s) * (-x) ** s / math.factorial(s)
        poly = np.convolve(poly, factor)
    return poly


def f1_excited_diagonal(params: ModelParams, r: float, state: BosonState) -> ModulatedPolynomial:
    """F_1(theta; psi, psi) in closed form, as a product of Laguerre polynomials.

    Each mode k with multiplicity n_k contributes L_{n_k}(beta^2 theta^2
    sin^2(k pi r) / (pi^2 k)).  Used as an independent check of f1_full.
    """
    beta = params.beta
    left = _laguerre_product(beta, r, state.left)
    right = _laguerre_product(beta, r, state.right)
    rate = beta * r * (state.alpha(beta) - state.alphabar(beta))
    return ModulatedPolynomial(rate, np.convolve(left, right))


def delta_z1(params: ModelParams, r: float, theta: float) -> complex:
    """Level-2 chiral combination minus its theta = 0 value."""
    f = lambda a, b: f1_chiral(params, r, a, b, 0.0)
    poly = ModulatedPolynomial(
        0.0,
        0.5 * (_pad(f((1, 1), (1, 1)).coeffs, 5) + _pad(f((2,), (2,)).coeffs, 5))
        + _pad(f((1, 1), (2,)).coeffs, 5),
    )
    return poly(theta) - poly(0.0)


def delta_z1_closed_form(beta: float, r: float, theta: float) -> complex:
    s = math.sin(math.pi * r)
    bt = beta * theta
    return -(bt**2 / (4 * math.pi**2)) * s**2 * (
        -(bt**2) / math.pi**2 * s**2 + 4 + 4 * math.cos(math.pi * r) ** 2
        + 2j * bt / math.pi * math.sin(2 * math.pi * r)
    )


def _pad(c, n):
    out = np.zeros(n, dtype=complex)
    out[: len(c)] = c
    return out
