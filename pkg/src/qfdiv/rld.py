"""Right-logarithmic-derivative Fisher metric and its divergence Hessian.

The mixed second derivative of the divergence along two Hermitian
perturbation directions equals f''(1) times the real part of the RLD metric
tr X rho^{-1} Y.  This module evaluates the metric and verifies the identity
by central finite differences, in the three perturbation layouts that all
share that limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .divergence import d_prime
from .errors import StepError, SupportError, UnsupportedGenerator
from .generators import DivergenceGenerator

DEFAULT_STEP = 1e-3


def _check_in_support(rho, X, label: str, rank_tol=None) -> np.ndarray:
    X = linalg.as_hermitian(X)
    pi = linalg.support_projector(rho, rank_tol)
    scale = max(1.0, float(np.abs(X).max()))
    if float(np.abs(X - pi @ X @ pi).max()) > 1e-10 * scale:
        raise SupportError(f"{label} is not supported inside supp rho")
    return X


def rld_metric(rho, X, Y, rank_tol: float | None = None) -> complex:
    """RLD Fisher metric tr X rho^{-1} Y (generalized inverse).

    Hermitian in its arguments: J(X, Y) = conj(J(Y, X)).  Requires X and Y
    supported inside supp rho.
    """
    rho = linalg.require_psd(rho)
    X = _check_in_support(rho, X, "X", rank_tol)
    Y = _check_in_support(rho, Y, "Y", rank_tol)
    rho_inv = linalg.gen_inverse(rho, rank_tol)
    return complex(np.trace(X @ rho_inv @ Y))


@dataclass(frozen=True)
class TangentPerturbation:
    """A traceless Hermitian direction attached to a full-rank-on-support base.

    base + s * direction stays PSD for |s| <= step_bound.
    """

    base: np.ndarray
    direction: np.ndarray
    step_bound: float


def tangent_perturbation(rho, direction, rank_tol: float | None = None) -> TangentPerturbation:
    """Validate a perturbation direction and compute its PSD step bound."""
    rho = linalg.require_psd(rho)
    X = _check_in_support(rho, direction, "direction", rank_tol)
    if abs(float(np.trace(X).real)) > 1e-12 * max(1.0, float(np.abs(X).max())):
        raise SupportError("perturbation direction must be traceless")
    evals = np.linalg.eigvalsh(rho)
    lam_min = float(evals[evals > (rank_tol or linalg.default_rank_tol(rho.shape[0]))
                          * evals.max()].min())
    norm = float(np.linalg.norm(X, 2))
    bound = lam_min / norm if norm > 0 else np.inf
    return TangentPerturbation(rho, X, bound)


def random_tangent(rho, seed_or_rng, rank_tol: float | None = None) -> TangentPerturbation:
    """Draw a random normalized traceless direction inside supp rho."""
    rng = (seed_or_rng if isinstance(seed_or_rng, np.random.Generator)
           else np.random.default_rng(seed_or_rng))
    rho = linalg.require_psd(rho)
    n = rho.shape[0]
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X = (G + G.conj().T) / 2
    pi = linalg.support_projector(rho, rank_tol)
    X = pi @ X @ pi
    rank = round(float(np.trace(pi).real))
    X = X - (np.trace(X).real / rank) * pi
    X = (X + X.conj().T) / 2
    X = X / max(float(np.linalg.norm(X, 2)), 1e-300)
    return tangent_perturbation(rho, X, rank_tol)


@dataclass(frozen=True)
class SecondDerivativeResult:
    """Finite-difference estimates of the divergence Hessian.

    fd_value is the mixed difference of D(rho + sX || rho - tY); variants
    holds that value together with the two one-sided layouts
    D(rho || rho + sX + tY) and D(rho + sX + tY || rho), which share the
    same limit.  analytic is f''(1) * Re tr X rho^{-1} Y.
    """

    fd_value: float
    analytic: float
    abs_err: float
    variants: tuple[float, float, float]
    imag_part: float


def _mixed_difference(values, s, t) -> float:
    """(D(s,t) - D(s,-t) - D(-s,t) + D(-s,-t)) / (4 s t)."""
    dpp, dpm, dmp, dmm = values
    return (dpp - dpm - dmp + dmm) / (4.0 * s * t)


def second_derivative_check(rho, X, Y, f: DivergenceGenerator,
                            step: float = DEFAULT_STEP,
                            rank_tol: float | None = None) -> SecondDerivativeResult:
    """Compare the mixed finite difference of the divergence with the metric.

    The raw step is rescaled by lambda_min(rho)/||direction|| per direction
    so the perturbed operators stay PSD; StepError if they do not.
    """
    if f.second_deriv_at_1 is None:
        raise UnsupportedGenerator(
            f"generator {f.name!r} has no declared second derivative at 1")
    rho = linalg.require_psd(rho)
    X = _check_in_support(rho, X, "X", rank_tol)
    Y = _check_in_support(rho, Y, "Y", rank_tol)

    evals = np.linalg.eigvalsh(rho)
    cut = (rank_tol or linalg.default_rank_tol(rho.shape[0])) * float(evals.max())
    lam_min = float(evals[evals > cut].min())
    norm_x = float(np.linalg.norm(X, 2))
    norm_y = float(np.linalg.norm(Y, 2))
    s = step * lam_min / norm_x if norm_x > 0 else step
    t = step * lam_min / norm_y if norm_y > 0 else step

    def _psd(M):
        if float(np.linalg.eigvalsh(M).min()) < -1e-12 * max(1.0, float(np.abs(M).max())):
            raise StepError("finite-difference step leaves the PSD cone")
        return M

    def probe(first, second) -> float:
        return d_prime(_psd(first), _psd(second), f, rank_tol)

    fd1 = _mixed_difference(
        [probe(rho + a * s * X, rho - b * t * Y)
         for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1))], s, t)
    fd2 = _mixed_difference(
        [probe(rho, rho + a * s * X + b * t * Y)
         for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1))], s, t)
    fd3 = _mixed_difference(
        [probe(rho + a * s * X + b * t * Y, rho)
         for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1))], s, t)

    metric = rld_metric(rho, X, Y, rank_tol)
    analytic = f.second_deriv_at_1 * metric.real
    return SecondDerivativeResult(
        fd_value=fd1, analytic=analytic, abs_err=abs(fd1 - analytic),
        variants=(fd1, fd2, fd3), imag_part=metric.imag)
