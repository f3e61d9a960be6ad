"""Lattice versus CFT comparisons for the level-2 moment differences.

The lattice value at subsystem size l is averaged with l + 1 and compared
with the CFT curve at the midpoint ratio r = (l + 1/2) / N, which removes
the parity oscillation at leading order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_types import ModelParams
from .moments_n1 import delta_z1
from .moments_n2 import delta_z2
from .xx_lattice import MomentumState, diagonal_charged_moment, level2_lattice_states

__all__ = [
    "ComparisonRow",
    "Comparison",
    "lattice_delta_z",
    "cft_delta_z",
    "compare_delta_z",
    "ground_scaling_fit",
]


def _moment_ratio(state, ground, ell, theta, n):
    return diagonal_charged_moment(state, ell, theta, n) / diagonal_charged_moment(ground, ell, theta, n)


def lattice_delta_z(N: int, ell: int, theta: float, n: int) -> complex:
    """Level-2 moment ratio minus its theta = 0 value on the XX chain.

    The two lattice realizations are charge conjugates, so b enters at -theta.
    """
    st = level2_lattice_states(N)
    g, a, b = st["ground"][0], st["level2_a"][0], st["level2_b"][0]

    def avg(t):
        return 0.5 * (_moment_ratio(a, g, ell, t, n) + _moment_ratio(b, g, ell, -t, n))

    return avg(theta) - avg(0.0)


def cft_delta_z(r: float, theta: float, n: int) -> complex:
    params = ModelParams(1.0)
    if n == 1:
        return complex(delta_z1(params, r, theta))
    if n == 2:
        return complex(delta_z2(params, r, theta))
    raise ValueError("only n = 1, 2 are available")


@dataclass
class ComparisonRow:
    ell: int
    r: float
    cft: complex
    raw: complex
    parity_avg: complex

    @property
    def abs_dev(self) -> float:
        return abs(self.parity_avg - self.cft)

    @property
    def rel_dev(self) -> float:
        return self.abs_dev / abs(self.cft) if self.cft != 0 else math.inf


@dataclass
class Comparison:
    N: int
    theta: float
    n: int
    rows: list = field(default_factory=list)
    oscillation: float = 0.0

    def max_dev(self, part: str = "abs") -> float:
        return max(_part(r.parity_avg - r.cft, part) for r in self.rows)

    def mean_dev(self, part: str = "abs") -> float:
        return float(np.mean([_part(r.parity_avg - r.cft, part) for r in self.rows]))


def _part(z, part):
    if part == "re":
        return abs(z.real)
    if part == "im":
        return abs(z.imag)
    return abs(z)


def compare_delta_z(N: int, theta: float, n: int, r_min: float = 0.15, r_max: float = 0.85,
                    lattice=lattice_delta_z, cft=cft_delta_z) -> Comparison:
    """Per-l rows and the oscillation amplitude, half the mean |value(l) - value(l+1)|."""
    ells = [l for l in range(1, N - 1) if r_min <= (l + 0.5) / N <= r_max]
    if not ells:
        raise ValueError("no subsystem sizes inside the requested ratio window")
    vals = {l: lattice(N, l, theta, n) for l in range(ells[0], ells[-1] + 2)}
    out = Comparison(N, theta, n)
    jumps = []
    for l in ells:
        r = (l + 0.5) / N
        pa = 0.5 * (vals[l] + vals[l + 1])
        out.rows.append(ComparisonRow(l, r, cft(r, theta, n), vals[l], pa))
        jumps.append(abs(vals[l] - vals[l + 1]))
    out.oscillation = 0.5 * float(np.mean(jumps))
    return out


def ground_scaling_fit(N: int, ells, thetas=None, n: int = 1):
    """Fit log|Tr(rho_A^n e^{i theta Q_A})| = s theta^2 + c for each l, then s against log l_chord.

    Returns (slopes, r2 values, log chord lengths, fitted coefficient, offset).
    """
    if thetas is None:
        thetas = np.linspace(0.0, 1.0, 21)
    thetas = np.asarray(thetas, dtype=float)
    g = MomentumState.ground(N)
    x = thetas**2
    design = np.vstack([x, np.ones_like(x)]).T
    slopes, r2 = [], []
    for ell in ells:
        y = np.array([math.log(abs(diagonal_charged_moment(g, ell, t, n))) for t in thetas])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = design @ coef - y
        r2.append(1 - np.sum(resid**2) / np.sum((y - y.mean()) ** 2))
        slopes.append(coef[0])
    logs = np.log(N / np.pi * np.sin(np.pi * np.asarray(ells) / N))
    coefficient, offset = np.polyfit(logs, slopes, 1)
    return np.array(slopes), np.array(r2), logs, float(coefficient), float(offset)
