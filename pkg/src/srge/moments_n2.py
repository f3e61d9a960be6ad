"""Normalized n = 2 generalized charged moments of the compact boson.

The replica plane carries four image points y_1..y_4 = +-e^{+-i pi r/2}
(in-states on odd labels, out-states on even labels).  The chiral moment
is K(alpha) * prod N_i * sum over Wick contractions, where every vertex
contraction and every pair contraction is an exact residue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

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
from .wick_engine import M_MAX, _insertion_tables, contraction_sum, kernel, pair_value

__all__ = [
    "N2Request",
    "charge_balanced",
    "k_prefactor",
    "half_system_c",
    "f2_chiral",
    "f2_chiral_half",
    "f2_full",
    "delta_z2",
    "delta_z2_all_terms",
    "LEVEL2_STATES",
]

SIGNED = np.array([1, -1, 1, -1])


@dataclass(frozen=True)
class N2Request:
    params: ModelParams
    geometry: Geometry
    psi: tuple
    zero_momentum_convention: bool = True
    v_over_L: float = 0.0
    sign_convention: str = "positive"


def charge_balanced(alphas, tol: float = 1e-12) -> bool:
    a1, a2, a3, a4 = alphas
    return abs(a1 + a3 - a2 - a4) <= tol


def k_prefactor(params: ModelParams, r: float, v_over_L: float, alphas,
                sign_convention: str = "positive"):
    """Vertex-only factor K(alpha_i) as (theta-independent scale, phase rate).

    scale = s * exp(i pi r (a2-a1)(a2-a3)) * exp(i pi v/L (a1^2+a3^2-a2^2-a4^2))
            * cos(pi r/2)^((a2-a3)^2) * sin(pi r/2)^((a1-a2)^2)

    With ``sign_convention="literal"`` s = (-1)^E with
    E = a2^2 - a3^2 + (a1^2 - a3^2)/2 + a1 - a2 - a1 a2 - a1 a3 + a2 a3
    on the principal branch; the default ``"positive"`` takes s = 1, which
    keeps theta = 0 purities real and positive.

    The phase rate is beta (r (a1 + a3) + a3 - a4) / 2: the flux vertex at
    the origin sees the charges at arguments pi r/2, -pi r/2, pi + pi r/2,
    pi - pi r/2, with the log cut along the image of the subsystem that
    joins sheet 1 to sheet 2.
    """
    if not charge_balanced(alphas):
        raise ValueError(f"charges {tuple(alphas)} violate a1 + a3 = a2 + a4")
    a1, a2, a3, a4 = (float(a) for a in alphas)
    if sign_convention == "literal":
        e = a2**2 - a3**2 + 0.5 * (a1**2 - a3**2) + a1 - a2 - a1 * a2 - a1 * a3 + a2 * a3
        sign = np.exp(1j * np.pi * e)
    elif sign_convention == "positive":
        sign = 1.0
    else:
        raise ValueError(f"unknown sign convention {sign_convention!r}")
    scale = (
        sign
        * np.exp(1j * np.pi * r * (a2 - a1) * (a2 - a3))
        * np.exp(1j * np.pi * v_over_L * (a1**2 + a3**2 - a2**2 - a4**2))
        * np.cos(np.pi * r / 2) ** ((a2 - a3) ** 2)
        * np.sin(np.pi * r / 2) ** ((a1 - a2) ** 2)
    )
    rate = params.beta * (r * (a1 + a3) + a3 - a4) / 2.0
    return complex(scale), float(rate)


def _layout(modes):
    lists = [m if isinstance(m, ChiralModeList) else ChiralModeList(tuple(m)) for m in modes]
    if len(lists) != 4:
        raise ValueError("n = 2 moments need four mode lists")
    sheets, ks = [], []
    for i, ml in enumerate(lists):
        for k in ml.modes:
            sheets.append(i)
            ks.append(k)
    if len(ks) > M_MAX:
        raise ValueError(f"{len(ks)} insertions exceed the bound {M_MAX}")
    norm = float(np.prod([normalization_factor(ml) for ml in lists]))
    return lists, sheets, ks, norm


def _assemble(params, r, lists, coeffs, alphas, v_over_L, sign_convention):
    scale, rate = k_prefactor(params, r, v_over_L or 0.0, alphas, sign_convention)
    if v_over_L is not None:
        momentum = sum(s * sum(ml.modes) for s, ml in zip(SIGNED, lists))
        scale *= np.exp(2j * np.pi * v_over_L * momentum)
    return ModulatedPolynomial(rate, scale * coeffs)


def f2_chiral(params: ModelParams, r: float, modes, alphas=(0, 0, 0, 0),
              v_over_L: float | None = None, sign_convention: str = "positive") -> ModulatedPolynomial:
    """Chiral n = 2 moment for four mode lists and chiral charges.

    Returns an identically-zero polynomial when the charges are unbalanced.
    ``v_over_L=None`` drops the momentum-dependent phases.
    """
    if not charge_balanced(alphas):
        return ModulatedPolynomial.zero()
    lists, sheets, ks, norm = _layout(modes)
    kern = kernel(2, float(r))
    v, w = _insertion_tables(kern, sheets, ks, SIGNED * np.asarray(alphas, float), params.beta)
    return _assemble(params, r, lists, norm * contraction_sum(v, w), alphas, v_over_L, sign_convention)


def half_system_c(s: int) -> Fraction:
    """c_s = binom(2s, s) / 2^(2s+1)."""
    return Fraction(math.comb(2 * s, s), 2 ** (2 * s + 1))


def _half_vertex(beta: float, m: int, k: int, alphas):
    """(g2, g1 / theta) at r = 1/2 for an insertion of level k on sheet m (0-based)."""
    a1, a2, a3, a4 = alphas
    g1 = beta if k % 2 else 0.0
    s = k // 2
    c = float(half_system_c(s))
    if m in (0, 2):
        g2 = 2j * np.pi * c * (a2 - a4) if k % 2 else 2 * np.pi * c * (a1 - a3)
    else:
        g2 = 2j * np.pi * c * (a1 - a3) if k % 2 else -2 * np.pi * c * (a2 - a4)
    if m >= 2:
        g2 = -g2
    return g2, g1


def f2_chiral_half(params: ModelParams, modes, alphas=(0, 0, 0, 0),
                   v_over_L: float | None = None, sign_convention: str = "positive") -> ModulatedPolynomial:
    """f2_chiral at r = 1/2 with closed-form vertex contractions."""
    if not charge_balanced(alphas):
        return ModulatedPolynomial.zero()
    r = 0.5
    lists, sheets, ks, norm = _layout(modes)
    kern = kernel(2, r)
    m = len(ks)
    v = np.zeros((m, 2), dtype=complex)
    w = np.zeros((m, m), dtype=complex)
    for a in range(m):
        g2, g1 = _half_vertex(params.beta, sheets[a], ks[a], alphas)
        v[a] = kern.sigma[sheets[a]] * np.array([g2, g1]) / (2 * np.pi)
        for b in range(a + 1, m):
            w[a, b] = w[b, a] = pair_value(kern, sheets[a], sheets[b], ks[a], ks[b]) / (4 * np.pi**2)
    return _assemble(params, r, lists, norm * contraction_sum(v, w), alphas, v_over_L, sign_convention)


def f2_full(req: N2Request) -> ModulatedPolynomial:
    """Chiral times conjugated anti-chiral moment."""
    beta, r = req.params.beta, req.geometry.ratio
    psi = req.psi
    if len(psi) != 4:
        raise ValueError("n = 2 moments need four states")
    vol = None if req.zero_momentum_convention else req.v_over_L
    a = [p.alpha(beta) for p in psi]
    ab = [p.alphabar(beta) for p in psi]
    left = f2_chiral(req.params, r, [p.left for p in psi], a, vol, req.sign_convention)
    right = f2_chiral(req.params, r, [p.right for p in psi], ab, vol, req.sign_convention)
    return mul_modulated(left, conjugate_modulated(right))


LEVEL2_STATES = ((1, 1), (2,))


def _level2_poly(params, r, terms):
    out = np.zeros(9, dtype=complex)
    for weight, modes in terms:
        c = f2_chiral(params, r, modes).coeffs
        out[: len(c)] += weight * c
    return ModulatedPolynomial(0.0, out)


def delta_z2(params: ModelParams, r: float, theta: float) -> complex:
    """Level-2 n = 2 combination minus its theta = 0 value (seven grouped terms)."""
    a, b = LEVEL2_STATES
    terms = [
        (1.0, (a, a, a, b)),
        (1.0, (a, b, b, b)),
        (0.5, (a, b, b, a)),
        (0.5, (a, a, b, b)),
        (0.5, (a, b, a, b)),
        (0.25, (a, a, a, a)),
        (0.25, (b, b, b, b)),
    ]
    poly = _level2_poly(params, r, terms)
    return poly(theta) - poly(0.0)


def delta_z2_all_terms(params: ModelParams, r: float, theta: float) -> complex:
    """Same quantity from all sixteen orderings with weight 1/4 each."""
    import itertools

    terms = [(0.25, combo) for combo in itertools.product(LEVEL2_STATES, repeat=4)]
    poly = _level2_poly(params, r, terms)
    return poly(theta) - poly(0.0)
