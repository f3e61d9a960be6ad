"""Residue and contraction kernels for chiral charged moments.

A chiral moment is a sum over Wick contractions of the oscillator
insertions.  Each insertion is a contour integral around one of the 2n
image points y_i of the in/out states on the uniformized replica plane,
with integrand u_i(z)^k = f_i(z)^k / (z - y_i)^k.  Contracting an
insertion with a vertex operator gives a single residue, contracting two
insertions gives a double residue.  Residues are read off exactly from
truncated Taylor series.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "M_MAX",
    "TaylorSeries",
    "deriv_at",
    "ContractionSplit",
    "splits",
    "perfect_matchings",
    "ReplicaKernel",
    "kernel",
    "pair_value",
    "pair_value_n1",
    "pair_value_n2",
    "vertex_value",
    "contraction_sum",
    "contraction_sum_enumerated",
]

M_MAX = 14


class TaylorSeries:
    """Truncated power series sum_j c_j (z - center)^j, j = 0..ord."""

    __slots__ = ("center", "coeffs")

    def __init__(self, center, coeffs):
        self.center = complex(center)
        self.coeffs = np.asarray(coeffs, dtype=complex)

    @property
    def ord(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, center, value, order):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(center, c)

    @classmethod
    def variable(cls, center, order):
        """The series of z itself."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = center
        if order >= 1:
            c[1] = 1.0
        return cls(center, c)

    def _coerce(self, other):
        if isinstance(other, TaylorSeries):
            if other.center != self.center:
                raise ValueError("series expanded around different centers")
            return other
        return TaylorSeries.constant(self.center, other, self.ord)

    def _trim(self, other):
        n = min(self.ord, other.ord) + 1
        return self.coeffs[:n], other.coeffs[:n]

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self._trim(other)
        return TaylorSeries(self.center, a + b)

    __radd__ = __add__

    def __neg__(self):
        return TaylorSeries(self.center, -self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.center, self.coeffs * other)
        other = self._coerce(other)
        a, b = self._trim(other)
        return TaylorSeries(self.center, np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series has vanishing constant term")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for n in range(1, len(a)):
            b[n] = -np.dot(a[1 : n + 1], b[n - 1 :: -1][:n]) / a[0]
        return TaylorSeries(self.center, b)

    def __truediv__(self, other):
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.center, self.coeffs / other)
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.reciprocal() ** (-k)
        out = TaylorSeries.constant(self.center, 1.0, self.ord)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        return f"TaylorSeries(center={self.center!r}, coeffs={self.coeffs.tolist()!r})"


def deriv_at(f: TaylorSeries, order: int) -> complex:
    """order-th derivative of the series at its center."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > f.ord:
        raise ValueError(f"series of order {f.ord} cannot give derivative {order}")
    return complex(math.factorial(order) * f.coeffs[order])


@dataclass(frozen=True)
class ContractionSplit:
    """Positions contracted with vertex operators vs. among themselves."""

    vertex_set: tuple
    pair_set: tuple


def splits(modes: Sequence, m_max: int = M_MAX) -> Iterator[ContractionSplit]:
    """All 2^M positional splits of the insertions into (vertex, pair) sets."""
    m = len(modes)
    if m > m_max:
        raise ValueError(f"{m} insertions exceed the bound {m_max}")
    idx = range(m)
    for size in range(m + 1):
        for vs in itertools.combinations(idx, size):
            rest = tuple(i for i in idx if i not in vs)
            yield ContractionSplit(tuple(vs), rest)


def perfect_matchings(positions: Sequence) -> Iterator[list]:
    """All (2l-1)!! pairings of an even-sized list; nothing for odd size."""
    positions = list(positions)
    if len(positions) % 2:
        return
    if not positions:
        yield []
        return
    first = positions[0]
    for i in range(1, len(positions)):
        rest = positions[1:i] + positions[i + 1 :]
        for m in perfect_matchings(rest):
            yield [(first, positions[i])] + m


class ReplicaKernel:
    """Image points y_i, orientations sigma_i and the numerators f_i.

    n = 1: y = (e^{i pi r}, e^{-i pi r}), f_i(z) = z - conj(y_i).
    n = 2: y = (e^{i pi r/2}, e^{-i pi r/2}, -e^{i pi r/2}, -e^{-i pi r/2}),
           f_i(z) = (z^2 - conj(y_i^2)) / (z + y_i).
    Indices are 0-based here; sigma = +1 for in-states (even index).
    """

    def __init__(self, n: int, r: float):
        if n not in (1, 2):
            raise ValueError("only n = 1 and n = 2 are supported")
        self.n = n
        self.r = float(r)
        if n == 1:
            y1 = np.exp(1j * np.pi * r)
            self.points = np.array([y1, np.conj(y1)])
        else:
            y1 = np.exp(0.5j * np.pi * r)
            self.points = np.array([y1, np.conj(y1), -y1, -np.conj(y1)])
        self.sigma = np.array([1 if i % 2 == 0 else -1 for i in range(2 * n)])

    def f_series(self, i: int, order: int) -> TaylorSeries:
        y = self.points[i]
        z = TaylorSeries.variable(y, order)
        if self.n == 1:
            return z - np.conj(y)
        return (z * z - np.conj(y * y)) / (z + y)

    def f_eval(self, i: int, z):
        y = self.points[i]
        if self.n == 1:
            return z - np.conj(y)
        return (z * z - np.conj(y * y)) / (z + y)

    def u_power_series(self, i: int, k: int, order: int) -> TaylorSeries:
        """Taylor coefficients of f_i^k at y_i."""
        return _fk_series(self.n, self.r, i, k, order)


@lru_cache(maxsize=64)
def kernel(n: int, r: float) -> ReplicaKernel:
    return ReplicaKernel(n, r)


@lru_cache(maxsize=4096)
def _fk_series(n, r, i, k, order):
    return kernel(n, r).f_series(i, order) ** k


def _double_residue(kern: ReplicaKernel, p: int, q: int, kp: int, kq: int) -> complex:
    """Res_{z_p = y_p} Res_{z_q = y_q} u_p^{kp} u_q^{kq} (-1/(z_p - z_q)^2).

    The z_q contour is the inner one.
    """
    yq = kern.points[q]
    a = kern.u_power_series(q, kq, kq).coeffs  # f_q^kq around y_q
    if p != q:
        yp = kern.points[p]
        # h(z) = -sum_j a_j (kq - j) / (z - y_q)^(kq - j + 1), expanded at y_p
        order = kp - 1
        h = TaylorSeries.constant(yp, 0.0, order)
        dz = TaylorSeries.variable(yp, order) - yq
        inv = dz.reciprocal()
        for j in range(kq):
            h = h - a[j] * (kq - j) * inv ** (kq - j + 1)
        prod = kern.u_power_series(p, kp, order) * h
        return complex(prod.coeffs[kp - 1])
    fp = kern.u_power_series(p, kp, kp + kq).coeffs
    total = 0j
    for j in range(kq):
        total += -a[j] * (kq - j) * fp[kp + kq - j]
    return complex(total)


def pair_value(kern: ReplicaKernel, p: int, q: int, kp: int, kq: int) -> complex:
    """d(p, q, kp, kq) = (2 pi i)^2 sigma_p sigma_q x double residue (0-based)."""
    rr = _double_residue(kern, p, q, kp, kq)
    return complex(-4.0 * np.pi**2 * kern.sigma[p] * kern.sigma[q] * rr)


def pair_value_n1(p: int, r_idx: int, kp: int, kr: int) -> complex:
    """Closed form on two sheets (1-based sheet labels)."""
    if p not in (1, 2) or r_idx not in (1, 2):
        raise ValueError("sheet labels must be 1 or 2")
    if p != r_idx and kp == kr:
        return complex(4.0 * np.pi**2 * kp)
    return 0j


def pair_value_n2(p: int, r_idx: int, kp: int, kr: int, r: float) -> complex:
    """Pair contraction value for n = 2 (1-based sheet labels 1..4)."""
    if not (1 <= p <= 4 and 1 <= r_idx <= 4):
        raise ValueError("sheet labels must lie in 1..4")
    return pair_value(kernel(2, r), p - 1, r_idx - 1, kp, kr)


def vertex_value(kern: ReplicaKernel, i: int, k: int, alphas_signed, beta: float):
    """Vertex contraction of one insertion, as (constant, theta-coefficient).

    Returns the bracket g = g1 + g2 of the Wick expansion: the residue
    at y_i of u_i^k times the sum of <V dphi> propagators from the flux
    vertex at the origin (charge beta theta / 2 pi) and from the state
    vertices (signed charges alphas_signed), multiplied by 2 pi i.
    """
    y = kern.points[i]
    fk = kern.u_power_series(i, k, k).coeffs
    order = k - 1
    z = TaylorSeries.variable(y, order)
    # flux vertex: -i beta theta / (2 pi z)
    g1 = 2j * np.pi * (fk[: k] * (1.0 / z).coeffs[:k][::-1]).sum() * (-1j * beta / (2 * np.pi))
    g2 = 0j
    for mu, a in enumerate(alphas_signed):
        if a == 0:
            continue
        if mu == i:
            g2 += 2j * np.pi * (-1j * a) * fk[k]
        else:
            prop = 1.0 / (kern.points[mu] - z)
            g2 += 2j * np.pi * 1j * a * (fk[:k] * prop.coeffs[:k][::-1]).sum()
    return complex(g2), complex(g1)


def _insertion_tables(kern, sheets, ks, alphas_signed, beta):
    """Per-insertion vertex factors and pairwise factors including -1/(2 pi)."""
    m = len(ks)
    v = np.zeros((m, 2), dtype=complex)
    w = np.zeros((m, m), dtype=complex)
    for a in range(m):
        c0, c1 = vertex_value(kern, sheets[a], ks[a], alphas_signed, beta)
        s = kern.sigma[sheets[a]]
        # (-1/2pi) * (-sigma) * g
        v[a] = s * np.array([c0, c1]) / (2 * np.pi)
    for a in range(m):
        for b in range(a + 1, m):
            w[a, b] = w[b, a] = pair_value(kern, sheets[a], sheets[b], ks[a], ks[b]) / (4 * np.pi**2)
    return v, w


def contraction_sum(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum over splits of prod(vertex factors) * hafnian(pair block).

    v[a] = (c0, c1) is linear in theta; returns polynomial coefficients in
    theta of length M + 1.  Memoized recursion on the set of unused
    insertions (a loop hafnian).
    """
    m = len(v)
    if m > M_MAX:
        raise ValueError(f"{m} insertions exceed the bound {M_MAX}")
    full = (1 << m) - 1
    memo = {0: np.array([1.0 + 0j])}

    def rec(mask):
        if mask in memo:
            return memo[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        sub = rec(rest)
        out = np.zeros(len(sub) + 1, dtype=complex)
        out[:-1] += v[i, 0] * sub
        out[1:] += v[i, 1] * sub
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            j_mask &= j_mask - 1
            if w[i, j] != 0:
                s2 = rec(rest & ~(1 << j))
                out[: len(s2)] += w[i, j] * s2
        memo[mask] = out
        return out

    res = rec(full)
    out = np.zeros(m + 1, dtype=complex)
    out[: len(res)] = res
    return out


def contraction_sum_enumerated(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Same as contraction_sum by literal enumeration of splits and pairings."""
    m = len(v)
    out = np.zeros(m + 1, dtype=complex)
    for sp in splits(range(m)):
        poly = np.array([1.0 + 0j])
        for a in sp.vertex_set:
            poly = np.convolve(poly, v[a])
        haf = 0j
        for pairing in perfect_matchings(sp.pair_set):
            term = 1.0 + 0j
            for a, b in pairing:
                term *= w[a, b]
            haf += term
        out[: len(poly)] += haf * poly
    return out
