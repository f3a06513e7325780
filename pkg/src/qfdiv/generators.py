"""Divergence generators and the classical f-divergence.

A generator is a convex function f on [0, inf) with f(0) = 0, together with
the analytic data the divergence machinery needs: the recession constant
lim_{y->inf} f(y)/y (may be +inf, never -inf), the second derivative at 1,
and an operator-convexity flag.  Built-ins cover the standard families

    xlogx           y log y
    neg_power:a     -y^a          0 < a <= 1
    power:a         y^a           1 < a <= 2
    square          y^2
    psi:t           -y / (y + t)  t > 0

all operator convex on [0, inf).  Natural logarithm throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (InvalidDistribution, MissingRecession,
                     UnsupportedGenerator)

INF = math.inf


@dataclass(frozen=True)
class DivergenceGenerator:
    """A scalar function f with the analytic side data used by divergences.

    ``fn`` must be vectorized (accept and return float arrays) and satisfy
    fn(0) == 0.  ``recession`` is lim f(y)/y for y -> inf; None means the
    user did not declare it and recession_value() will refuse to guess.
    ``mu_full_support`` records whether the measure in the operator-convex
    integral representation of f has full support on (0, inf); it gates the
    multiplicative-domain sub-check of the channel equality checker.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    recession: float | None
    second_deriv_at_1: float | None = None
    operator_convex: bool = False
    mu_full_support: bool = False

    def eval(self, y):
        return self.fn(np.asarray(y, dtype=float))

    def __call__(self, y):
        return self.eval(y)


def _xlogx(y: np.ndarray) -> np.ndarray:
    safe = np.where(y > 0, y, 1.0)
    return np.where(y > 0, y * np.log(safe), 0.0)


def builtin(name: str, param: float | None = None) -> DivergenceGenerator:
    """Construct a built-in generator by name.

    neg_power and power take the exponent as parameter, psi the pole
    location; xlogx and square take none.
    """
    if name == "xlogx":
        return DivergenceGenerator(
            "xlogx", _xlogx, recession=INF, second_deriv_at_1=1.0,
            operator_convex=True, mu_full_support=True)
    if name == "square":
        return DivergenceGenerator(
            "square", lambda y: y * y, recession=INF, second_deriv_at_1=2.0,
            operator_convex=True, mu_full_support=False)
    if name == "neg_power":
        if param is None or not 0.0 < param <= 1.0:
            raise UnsupportedGenerator(
                f"neg_power needs an exponent in (0, 1], got {param}")
        a = float(param)
        # a = 1 is linear: recession -1, curvature 0.
        rec = 0.0 if a < 1.0 else -1.0
        return DivergenceGenerator(
            f"neg_power:{a:g}", lambda y, a=a: -(y ** a), recession=rec,
            second_deriv_at_1=a * (1.0 - a), operator_convex=True,
            mu_full_support=True)
    if name == "power":
        if param is None or not 1.0 < param <= 2.0:
            raise UnsupportedGenerator(
                f"power needs an exponent in (1, 2] for operator convexity, "
                f"got {param}")
        a = float(param)
        return DivergenceGenerator(
            f"power:{a:g}", lambda y, a=a: y ** a, recession=INF,
            second_deriv_at_1=a * (a - 1.0), operator_convex=True,
            mu_full_support=True)
    if name == "psi":
        if param is None or param <= 0.0:
            raise UnsupportedGenerator(f"psi needs a pole t > 0, got {param}")
        t = float(param)
        return DivergenceGenerator(
            f"psi:{t:g}", lambda y, t=t: -y / (y + t), recession=0.0,
            second_deriv_at_1=2.0 * t / (1.0 + t) ** 3, operator_convex=True,
            mu_full_support=False)
    raise UnsupportedGenerator(f"unknown generator {name!r}")


def from_spec(spec: str) -> DivergenceGenerator:
    """Parse a generator spec string like "xlogx" or "neg_power:0.5"."""
    name, _, param = spec.partition(":")
    if param:
        try:
            value = float(param)
        except ValueError:
            raise UnsupportedGenerator(f"bad parameter in spec {spec!r}")
        return builtin(name.strip(), value)
    return builtin(name.strip())


def custom(name: str, fn: Callable, recession: float | None = None,
           second_deriv_at_1: float | None = None,
           operator_convex: bool = False) -> DivergenceGenerator:
    """Wrap a user-supplied scalar function as a generator.

    fn(0) must be exactly zero; recession must be declared explicitly for
    the generator to be usable on support-deficient pairs.
    """
    value0 = float(np.asarray(fn(np.asarray(0.0))))
    if value0 != 0.0:
        raise UnsupportedGenerator(f"generator must satisfy f(0) = 0, got {value0}")
    if recession is not None and recession == -INF:
        raise UnsupportedGenerator("recession constant cannot be -inf")
    return DivergenceGenerator(name, fn, recession, second_deriv_at_1,
                               operator_convex)


def recession_value(f: DivergenceGenerator) -> float:
    """The declared recession constant lim f(y)/y (no numerical guessing)."""
    if f.recession is None:
        raise MissingRecession(
            f"generator {f.name!r} has no declared recession constant")
    return f.recession


def _as_weights(v, label: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    scale = max(1.0, float(np.abs(v).max())) if v.size else 1.0
    if v.size and v.min() < -1e-12 * scale:
        raise InvalidDistribution(f"{label} has negative entries")
    return np.maximum(v, 0.0)


def classical_f_divergence(p, q, f: DivergenceGenerator) -> float:
    """D_f(p||q) = sum_x q(x) f(p(x)/q(x)) with the recession convention.

    Entries with q(x) = 0 < p(x) contribute p(x) times the recession
    constant; entries with p(x) = q(x) = 0 contribute nothing.  The result
    lives in (-inf, +inf].
    """
    p = _as_weights(p, "p")
    q = _as_weights(q, "q")
    if p.shape != q.shape:
        raise InvalidDistribution(
            f"length mismatch: p has {p.size} entries, q has {q.size}")
    total = 0.0
    pos = q > 0
    if pos.any():
        vals = np.asarray(f.eval(p[pos] / q[pos]), dtype=float)
        if np.isnan(vals).any():
            from .errors import DomainError
            raise DomainError("generator returned NaN on a likelihood ratio")
        total += float(np.dot(q[pos], vals))
    escaped = float(p[~pos].sum())
    if escaped > 0.0:
        rec = recession_value(f)
        if rec == INF:
            return INF
        total += escaped * rec
    return total


@dataclass(frozen=True)
class LownerForm:
    """Finite quadrature form  a y + b y^2 + sum_j w_j (y/(1+t_j) + psi_{t_j}(y)).

    Used only as a verification device for the integral representation of
    operator convex functions; continuous measures enter through
    caller-supplied quadrature atoms (t_j, w_j).
    """

    a: float
    b: float
    atoms: tuple[tuple[float, float], ...] = ()

    def eval(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = self.a * y + self.b * y * y
        for t, w in self.atoms:
            out = out + w * (y / (1.0 + t) - y / (y + t))
        return out


def lowner_quadrature_check(f: DivergenceGenerator, form: LownerForm,
                            grid) -> float:
    """Max absolute deviation of the quadrature form from f on the grid."""
    grid = np.asarray(grid, dtype=float)
    return float(np.abs(form.eval(grid) - f.eval(grid)).max())


def lebesgue_atoms(t_min: float = 1e-6, t_max: float = 1e8,
                   n: int = 4000) -> tuple[tuple[float, float], ...]:
    """Trapezoidal quadrature atoms for the Lebesgue measure dt on a
    log-spaced grid; the atoms that represent xlogx exactly in the limit."""
    t = np.logspace(math.log10(t_min), math.log10(t_max), n)
    w = np.empty_like(t)
    w[1:-1] = (t[2:] - t[:-2]) / 2
    w[0] = (t[1] - t[0]) / 2
    w[-1] = (t[-1] - t[-2]) / 2
    return tuple(zip(t.tolist(), w.tolist()))
