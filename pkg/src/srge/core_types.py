"""Shared value types for the compact-boson charged-moment engines.

Everything here is immutable.  States are described by their oscillator
content (multisets of positive mode numbers for each chirality) together
with the momentum and winding integers of the highest-weight state.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Geometry",
    "ModelParams",
    "ChiralModeList",
    "BosonState",
    "ModulatedPolynomial",
    "StateSpecError",
    "normalization_factor",
    "eval_modulated",
    "mul_modulated",
    "conjugate_modulated",
    "parse_state",
    "format_state",
]


@dataclass(frozen=True)
class Geometry:
    """Interval of ratio ``r`` on a circle of circumference ``total_length``.

    ``cutoff_ratio`` is l' = l / eps with l the chord length.  Only l'
    enters normalized quantities, so eps itself is never stored.
    """

    total_length: float
    ratio: float
    cutoff_ratio: float

    def __post_init__(self):
        if not self.total_length > 0:
            raise ValueError("total_length must be positive")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")
        if not self.cutoff_ratio > 1.0:
            raise ValueError("cutoff_ratio must exceed 1 so that log(l') > 0")

    @property
    def chord_length(self) -> float:
        return self.total_length / math.pi * math.sin(math.pi * self.ratio)

    @property
    def log_cutoff(self) -> float:
        return math.log(self.cutoff_ratio)

    @classmethod
    def from_log_cutoff(cls, ratio: float, log_cutoff: float, total_length: float = 1.0):
        return cls(total_length, ratio, math.exp(log_cutoff))


@dataclass(frozen=True)
class ModelParams:
    """Compact boson with radius 1/beta, resolved with respect to U(1) winding."""

    beta: float = 1.0
    symmetry: str = "winding"

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.symmetry != "winding":
            raise ValueError("only the winding U(1) is supported")


@dataclass(frozen=True)
class ChiralModeList:
    """Multiset of creation-mode numbers k >= 1, stored sorted."""

    modes: tuple = ()

    def __post_init__(self):
        modes = tuple(int(k) for k in self.modes)
        for k in modes:
            if k < 1:
                raise ValueError(f"mode numbers must be >= 1, got {k}")
        object.__setattr__(self, "modes", tuple(sorted(modes)))

    @property
    def multiplicity(self) -> dict:
        return dict(Counter(self.modes))

    @property
    def level(self) -> int:
        return sum(self.modes)

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)


def _as_modes(modes) -> ChiralModeList:
    if isinstance(modes, ChiralModeList):
        return modes
    return ChiralModeList(tuple(modes))


@dataclass(frozen=True)
class BosonState:
    """Oscillator content on top of the highest-weight state |n, m>."""

    left: ChiralModeList = field(default_factory=ChiralModeList)
    right: ChiralModeList = field(default_factory=ChiralModeList)
    n: int = 0
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "left", _as_modes(self.left))
        object.__setattr__(self, "right", _as_modes(self.right))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    def alpha(self, beta: float) -> float:
        return self.n * beta + self.m / (2.0 * beta)

    def alphabar(self, beta: float) -> float:
        return self.n * beta - self.m / (2.0 * beta)


def normalization_factor(modes) -> float:
    """Norm prod_k 1 / (k^{n_k/2} sqrt(n_k!)) of a product of creation modes."""
    modes = _as_modes(modes)
    out = 1.0
    for k, nk in modes.multiplicity.items():
        out /= k ** (nk / 2.0) * math.sqrt(math.factorial(nk))
    return out


@dataclass(frozen=True, eq=False)
class ModulatedPolynomial:
    """exp(i a theta) * sum_j c_j theta^j."""

    phase_rate: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "phase_rate", float(self.phase_rate))

    @classmethod
    def zero(cls):
        return cls(0.0, [0.0])

    @classmethod
    def one(cls):
        return cls(0.0, [1.0])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, theta):
        return eval_modulated(self, theta)

    def __mul__(self, other):
        if isinstance(other, ModulatedPolynomial):
            return mul_modulated(self, other)
        return ModulatedPolynomial(self.phase_rate, self.coeffs * other)

    __rmul__ = __mul__

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def allclose(self, other, atol=1e-12) -> bool:
        if not math.isclose(self.phase_rate, other.phase_rate, abs_tol=atol):
            return False
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(self.coeffs, (0, n - len(self.coeffs)))
        b = np.pad(other.coeffs, (0, n - len(other.coeffs)))
        return bool(np.allclose(a, b, rtol=0, atol=atol))

    def __repr__(self):
        return f"ModulatedPolynomial(phase_rate={self.phase_rate!r}, coeffs={self.coeffs.tolist()!r})"


def eval_modulated(p: ModulatedPolynomial, theta):
    """Evaluate exp(i a theta) * sum_j c_j theta^j (theta scalar or array)."""
    theta = np.asarray(theta, dtype=float)
    poly = np.polynomial.polynomial.polyval(theta, p.coeffs)
    out = np.exp(1j * p.phase_rate * theta) * poly
    return complex(out) if out.ndim == 0 else out


def mul_modulated(p: ModulatedPolynomial, q: ModulatedPolynomial) -> ModulatedPolynomial:
    return ModulatedPolynomial(p.phase_rate + q.phase_rate, np.convolve(p.coeffs, q.coeffs))


def conjugate_modulated(p: ModulatedPolynomial) -> ModulatedPolynomial:
    """The polynomial theta -> conj(p(theta)) for real theta."""
    return ModulatedPolynomial(-p.phase_rate, np.conj(p.coeffs))


# state-spec strings: L=[k,...];R=[k,...];n=<int>;m=<int>

class StateSpecError(ValueError):
    def __init__(self, text: str, pos: int, expected: str):
        self.text, self.pos, self.expected = text, pos, expected
        got = text[pos:pos + 8] or "end of input"
        super().__init__(f"bad state spec {text!r} at position {pos}: expected {expected}, got {got!r}")


_FIELD_ORDER = ("L", "R", "n", "m")
_INT = re.compile(r"[+-]?\d+")


def parse_state(text: str) -> BosonState:
    """Parse ``L=[k,...];R=[k,...];n=<int>;m=<int>``.

    Fields must appear in this order; all four are required.
    """
    pos = 0
    values = {}

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def expect(tok):
        nonlocal pos
        skip_ws()
        if not text.startswith(tok, pos):
            raise StateSpecError(text, pos, repr(tok))
        pos += len(tok)

    def read_int(positive=False):
        nonlocal pos
        skip_ws()
        mt = _INT.match(text, pos)
        if not mt:
            raise StateSpecError(text, pos, "positive integer" if positive else "integer")
        v = int(mt.group())
        if positive and v < 1:
            raise StateSpecError(text, pos, "positive integer")
        pos = mt.end()
        return v

    for i, name in enumerate(_FIELD_ORDER):
        if i:
            expect(";")
        expect(name)
        expect("=")
        if name in ("L", "R"):
            expect("[")
            skip_ws()
            modes = []
            if pos < len(text) and text[pos] == "]":
                pos += 1
            else:
                while True:
                    modes.append(read_int(positive=True))
                    skip_ws()
                    if pos < len(text) and text[pos] == ",":
                        pos += 1
                        continue
                    expect("]")
                    break
            values[name] = tuple(modes)
        else:
            values[name] = read_int()
    skip_ws()
    if pos != len(text):
        raise StateSpecError(text, pos, "end of input")
    return BosonState(values["L"], values["R"], values["n"], values["m"])


def format_state(state: BosonState) -> str:
    def lst(ml):
        return "[" + ",".join(str(k) for k in ml.modes) + "]"

    return f"L={lst(state.left)};R={lst(state.right)};n={state.n};m={state.m}"
