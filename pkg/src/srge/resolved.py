"""Fourier layer: charge distributions and resolved second Renyi entropies.

The ground-state moment is Gaussian in theta,
exp(-beta^2 theta^2 log(l') / (2 pi^2 n)), and normalized moments are
polynomials in theta (times a phase).  All transforms run over the real
line, so they reduce to Gaussian moments and close in Hermite
polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite_e

from .core_types import Geometry, ModelParams, ModulatedPolynomial

__all__ = [
    "GroundMoment",
    "MomentCoefficients",
    "ChargeDistribution",
    "OddPowerError",
    "ApproximationDomainError",
    "ground_charged_moment",
    "theta_variance",
    "extract_coefficients",
    "modulated_gaussian_fourier",
    "relative_fourier",
    "prel_series",
    "gaussian_charge_distribution",
    "charge_distribution",
    "s2_series",
    "delta_s2_excited",
    "s2_compact",
    "s2_numeric",
    "delta_s2_numeric",
]


class OddPowerError(ValueError):
    """Raised when a series formula is fed a polynomial with odd powers."""


class ApproximationDomainError(ValueError):
    """Raised when log(l') is too small for a Gaussian approximation."""


def theta_variance(params: ModelParams, geometry: Geometry, n: int = 1) -> float:
    """Variance in theta of the ground-state Gaussian, pi^2 n / (beta^2 log l')."""
    return math.pi**2 * n / (params.beta**2 * geometry.log_cutoff)


@dataclass(frozen=True)
class GroundMoment:
    """Ground-state n-th charged moment up to a theta-independent scale.

    The dropped scale holds the boundary g-functions and the
    exp((1/n - n) log(l') / 6) factor; it cancels in every ratio we expose.
    """

    n: int
    beta: float
    log_cutoff: float

    def __call__(self, theta):
        return np.exp(-self.beta**2 * np.asarray(theta) ** 2 * self.log_cutoff / (2 * math.pi**2 * self.n))

    @property
    def theta_variance(self) -> float:
        return math.pi**2 * self.n / (self.beta**2 * self.log_cutoff)

    @property
    def charge_variance(self) -> float:
        return 1.0 / self.theta_variance


def ground_charged_moment(params: ModelParams, geometry: Geometry, n: int = 1) -> GroundMoment:
    return GroundMoment(n, params.beta, geometry.log_cutoff)


@dataclass(frozen=True)
class MomentCoefficients:
    """c_0 + beta^2 c_2 theta^2 + beta^4 c_4 theta^4 (h's for n=1, f's for n=2)."""

    c0: complex
    c2: complex
    c4: complex


def extract_coefficients(p: ModulatedPolynomial, beta: float, tol: float = 1e-12) -> MomentCoefficients:
    if abs(p.phase_rate) > tol:
        raise OddPowerError("series formulas need a moment without phase factor")
    c = np.zeros(max(5, len(p.coeffs)), dtype=complex)
    c[: len(p.coeffs)] = p.coeffs
    if np.any(np.abs(c[1::2]) > tol):
        raise OddPowerError("moment has odd powers of theta; use modulated_gaussian_fourier instead")
    return MomentCoefficients(c[0], c[2] / beta**2, c[4] / beta**4)


def modulated_gaussian_fourier(p: ModulatedPolynomial, variance: float, q):
    """int dtheta/2pi e^{-i theta q} p(theta) e^{-theta^2 / (2 variance)} over the real line.

    With x = q - a (a the phase rate) the theta^j term gives
    (-i)^j v^{j/2} He_j(sqrt(v) x) sqrt(v / 2 pi) e^{-v x^2 / 2}.
    """
    if not variance > 0:
        raise ValueError("variance must be positive")
    v = float(variance)
    x = np.asarray(q, dtype=float) - p.phase_rate
    j = np.arange(len(p.coeffs))
    weights = p.coeffs * (-1j) ** j * v ** (j / 2.0)
    poly = hermite_e.hermeval(math.sqrt(v) * x, weights)
    out = poly * math.sqrt(v / (2 * math.pi)) * np.exp(-v * x**2 / 2)
    return complex(out) if out.ndim == 0 else out


def relative_fourier(p: ModulatedPolynomial, params: ModelParams, geometry: Geometry, q, n: int = 1):
    """FT[p G_n](q) / FT[G_n](q): moment-weighted over ground-state transform."""
    v = theta_variance(params, geometry, n)
    num = modulated_gaussian_fourier(p, v, q)
    den = modulated_gaussian_fourier(ModulatedPolynomial.one(), v, q)
    return num / den


def prel_series(h2: float, h4: float, params: ModelParams, geometry: Geometry, q) -> float:
    """Ground-normalized charge distribution through order (log l')^-2."""
    lg = geometry.log_cutoff
    q = np.asarray(q, dtype=float)
    return 1 + h2 * math.pi**2 / lg + (3 * h4 - h2 * q**2 / params.beta**2) * math.pi**4 / lg**2


@dataclass(frozen=True, eq=False)
class ChargeDistribution:
    charges: np.ndarray
    values: np.ndarray
    kind: str = "absolute"

    def __post_init__(self):
        if self.kind not in ("absolute", "ground_relative"):
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "charges", np.asarray(self.charges))
        object.__setattr__(self, "values", np.asarray(self.values))

    def total(self) -> float:
        return float(np.sum(self.values))

    def mean(self) -> float:
        return float(np.sum(self.charges * self.values) / np.sum(self.values))


def gaussian_charge_distribution(h2: float, params: ModelParams, geometry: Geometry,
                                 q_window, phase_rate: float = 0.0) -> ChargeDistribution:
    """Gaussian approximation exp(-pi^2 (q - a)^2 / (2 beta^2 b1)), b1 = log l' - 2 pi^2 h2.

    Normalized to one over ``q_window``.
    """
    b1 = geometry.log_cutoff - 2 * math.pi**2 * h2
    if b1 <= 0:
        raise ApproximationDomainError(f"shifted variance b1 = {b1:.4g} is not positive")
    q = np.asarray(q_window, dtype=float)
    w = np.exp(-math.pi**2 * (q - phase_rate) ** 2 / (2 * params.beta**2 * b1))
    return ChargeDistribution(np.asarray(q_window), w / w.sum(), "absolute")


def charge_distribution(p: ModulatedPolynomial, params: ModelParams, geometry: Geometry,
                        q_window, kind: str = "absolute") -> ChargeDistribution:
    """Charge distribution from a full n = 1 moment by the real-line transform.

    ``absolute`` normalizes the window to one; ``ground_relative`` returns
    the ratio to the ground-state distribution.
    """
    q = np.asarray(q_window, dtype=float)
    v = theta_variance(params, geometry, 1)
    if kind == "ground_relative":
        vals = relative_fourier(p, params, geometry, q, 1)
        return ChargeDistribution(np.asarray(q_window), np.real_if_close(vals), kind)
    vals = modulated_gaussian_fourier(p, v, q)
    vals = np.real_if_close(vals, tol=1e6)
    return ChargeDistribution(np.asarray(q_window), vals / vals.sum(), kind)


def _check_f0(f0):
    if not f0 > 0:
        raise ValueError("f0 must be positive")


def s2_series(f0: float, f2: float, f4: float, params: ModelParams, geometry: Geometry, q) -> float:
    """Resolved generalized second Renyi entropy through (log l')^-2."""
    _check_f0(f0)
    lg = geometry.log_cutoff
    q = np.asarray(q, dtype=float)
    return (-math.log(f0) - 2 * f2 / f0 * math.pi**2 / lg
            + (2 * f2**2 / f0**2 - 12 * f4 / f0 + 4 * f2 / (f0 * params.beta**2) * q**2) * math.pi**4 / lg**2)


def delta_s2_excited(f0, f2, f4, h2, h4, params: ModelParams, geometry: Geometry, q) -> float:
    """Excited minus ground resolved second Renyi entropy through (log l')^-2."""
    _check_f0(f0)
    lg = geometry.log_cutoff
    b2 = params.beta**2
    q = np.asarray(q, dtype=float)
    return (-math.log(f0) + 2 * (h2 - f2 / f0) * math.pi**2 / lg
            + 2 * (f2**2 / f0**2 - 6 * f4 / f0 - h2**2 / 2 + 3 * h4
                   + (2 * f2 / (f0 * b2) - h2 / b2) * q**2) * math.pi**4 / lg**2)


def s2_compact(f0, f2, h2, params: ModelParams, geometry: Geometry, q, g_a: float = 1.0) -> float:
    """Gaussian-approximation form with the double-log correction.

    delta = exp(-4 pi^2 (h2 - f2/f0)), kappa = exp(-pi^2 (h2 + 2 f2/f0)).
    """
    _check_f0(f0)
    lg = geometry.log_cutoff
    beta = params.beta
    delta = math.exp(-4 * math.pi**2 * (h2 - f2 / f0))
    kappa = math.exp(-math.pi**2 * (h2 + 2 * f2 / f0))
    inner = lg + math.log(delta)
    lk = lg + math.log(kappa)
    if inner <= 0 or math.log(inner) <= -np.inf or lk <= 0:
        raise ApproximationDomainError("log(l') too small for the compact form")
    q = np.asarray(q, dtype=float)
    ratio = 2 * f2 / f0 - h2
    return (0.25 * lg - 0.5 * math.log(inner) - math.log(2 * beta * f0 / math.sqrt(math.pi))
            + 2 * math.log(g_a) - 2 * math.pi**4 * ratio**2 / lg**2
            + 2 * math.pi**4 * q**2 * (h2 - 2 * f2 / f0) / (beta**2 * lk**2))


def s2_numeric(f2_poly: ModulatedPolynomial, params: ModelParams, geometry: Geometry, q):
    """-log of the ground-normalized transform of an n = 2 moment."""
    return -np.log(relative_fourier(f2_poly, params, geometry, q, 2))


def delta_s2_numeric(f2_poly: ModulatedPolynomial, f1_poly: ModulatedPolynomial,
                     params: ModelParams, geometry: Geometry, q):
    """S_2(q; psi,psi,psi,psi) + 2 log P^rel(q; psi, psi) by exact transforms."""
    return s2_numeric(f2_poly, params, geometry, q) + 2 * np.log(
        relative_fourier(f1_poly, params, geometry, q, 1))
