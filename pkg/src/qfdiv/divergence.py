"""Maximal f-divergence, the commutative Radon-Nikodym derivative, and the
minimal reverse test.

For PSD rho, sigma with supp rho inside supp sigma the divergence is the
spectral value  tr sigma f(d)  with  d = sigma^{-1/2} rho sigma^{-1/2}.
Outside that regime the pair is reduced by the Schur complement of rho
against supp sigma; the mass that cannot be pushed into supp sigma is
weighted by the recession constant of f.  The minimal reverse test realizes
the same value as a classical f-divergence and reconstructs the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, SupportError, UnsupportedGenerator, ZeroSigma
from .generators import DivergenceGenerator, classical_f_divergence, recession_value

# Relative trace below which leftover mass outside supp sigma is ignored
# (numerical Schur complements leave dust; implements 0 * inf = 0).
MASS_TOL = 1e-10


def _check_pair(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    rho = linalg.require_psd(rho)
    sigma = linalg.require_psd(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch("rho and sigma must have equal dimensions")
    if float(np.linalg.eigvalsh(sigma).max()) <= 0.0:
        raise ZeroSigma("sigma is the zero operator")
    return rho, sigma


def rn_derivative(rho, sigma, rank_tol: float | None = None,
                  check_support: bool = True) -> np.ndarray:
    """Commutative Radon-Nikodym derivative sigma^{-1/2} rho sigma^{-1/2}.

    Requires supp rho inside supp sigma (generalized inverse on the kernel);
    the output is symmetrized to suppress roundoff asymmetry.
    """
    rho, sigma = _check_pair(rho, sigma)
    if check_support and not linalg.support_dominates(sigma, rho, rank_tol):
        raise SupportError("supp rho is not contained in supp sigma")
    s_inv = linalg.gen_inverse_sqrt(sigma, rank_tol)
    d = s_inv @ rho @ s_inv
    return (d + d.conj().T) / 2


def _spectral_weights(rho, sigma, rank_tol=None):
    """Eigenvalues of d(rho, sigma) paired with their sigma-weights.

    Returns (evals, weights) with weights_i = <v_i| sigma |v_i>; eigenvalues
    below the kernel floor are snapped to exact zero so that f(0) = 0 holds
    exactly for them.
    """
    d = rn_derivative(rho, sigma, rank_tol, check_support=False)
    evals, vecs = np.linalg.eigh(d)
    lam_max = float(np.abs(evals).max()) if evals.size else 0.0
    floor = linalg.KERNEL_FLOOR * d.shape[0] * lam_max
    evals = np.where(evals > floor, evals, 0.0)
    weights = np.einsum("ij,jk,ki->i", vecs.conj().T, sigma, vecs).real
    weights = np.maximum(weights, 0.0)
    return evals, weights


def _dominated_value(rho, sigma, f: DivergenceGenerator, rank_tol=None) -> float:
    evals, weights = _spectral_weights(rho, sigma, rank_tol)
    vals = np.asarray(f.eval(evals), dtype=float)
    if np.isnan(vals).any():
        from .errors import DomainError
        raise DomainError(f"generator {f.name!r} undefined on the spectrum of d")
    return float(np.dot(weights, vals))


def d_prime(rho, sigma, f: DivergenceGenerator,
            rank_tol: float | None = None) -> float:
    """The divergence tr sigma f(d(rho, sigma)), extended to all PSD pairs.

    When supp rho is not inside supp sigma, the value is
    d_prime(rho_tilde, sigma) + tr(rho - rho_tilde) * recession(f)
    with rho_tilde the Schur reduction of rho; +inf exactly when the
    recession is infinite and mass is left outside supp sigma.
    """
    rho, sigma = _check_pair(rho, sigma)
    if linalg.support_dominates(sigma, rho, rank_tol):
        return _dominated_value(rho, sigma, f, rank_tol)
    tilde = linalg.schur_tilde(rho, sigma, rank_tol, MASS_TOL)
    missing = float(np.trace(rho).real - np.trace(tilde).real)
    base = _dominated_value(tilde, sigma, f, rank_tol)
    if missing <= MASS_TOL * max(float(np.trace(rho).real), 1.0):
        return base
    rec = recession_value(f)
    if rec == math.inf:
        return math.inf
    return base + missing * rec


def d_max(rho, sigma, f: DivergenceGenerator,
          rank_tol: float | None = None) -> float:
    """Maximal f-divergence: the infimum of D_f(p||q) over reverse tests.

    Computed in closed form (it coincides with d_prime for operator convex
    generators); refuses generators not flagged operator convex, since the
    closed form is only valid for them.
    """
    if not f.operator_convex:
        raise UnsupportedGenerator(
            f"d_max requires an operator convex generator, {f.name!r} is not "
            "flagged as one")
    return d_prime(rho, sigma, f, rank_tol)


@dataclass(frozen=True)
class ReverseTest:
    """A finite family of unit-trace PSD outputs with weight vectors p, q.

    Represents the classical-to-quantum simulation  Gamma(p) = rho,
    Gamma(q) = sigma,  where Gamma maps the point mass at x to outputs[x].
    """

    outputs: tuple[np.ndarray, ...]
    p: np.ndarray
    q: np.ndarray
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.outputs)

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        """(Gamma(p), Gamma(q)) assembled from the atoms."""
        dim = self.outputs[0].shape[0]
        rho = np.zeros((dim, dim), dtype=complex)
        sigma = np.zeros((dim, dim), dtype=complex)
        for w_p, w_q, out in zip(self.p, self.q, self.outputs):
            rho += w_p * out
            sigma += w_q * out
        return rho, sigma


def minimal_reverse_test(rho, sigma, tol: float = MASS_TOL,
                         rank_tol: float | None = None,
                         cluster_tol: float = linalg.DEFAULT_CLUSTER_TOL) -> ReverseTest:
    """The reverse test achieving d_max, built from the spectrum of d.

    One atom per clustered eigenvalue d_x of d(rho_tilde, sigma):
    q(x) = tr sigma P_x, p(x) = d_x q(x), output sigma^{1/2} P_x sigma^{1/2}
    normalized.  When mass of rho is left outside supp sigma (more than tol
    relative to tr rho), one extra atom carries it with q = 0.
    """
    rho, sigma = _check_pair(rho, sigma)
    tilde = linalg.schur_tilde(rho, sigma, rank_tol, tol)
    d = rn_derivative(tilde, sigma, rank_tol, check_support=False)
    dec = linalg.herm_eig(d, cluster_tol)
    s_half = linalg.matrix_sqrt(sigma, rank_tol)
    lam_max = float(np.abs(dec.eigenvalues).max()) if len(dec.eigenvalues) else 0.0
    floor = linalg.KERNEL_FLOOR * d.shape[0] * lam_max
    tr_sigma = float(np.trace(sigma).real)
    q_floor = 1e-14 * tr_sigma

    outputs: list[np.ndarray] = []
    p_list: list[float] = []
    q_list: list[float] = []
    labels: list[str] = []
    for i, (dx, proj) in enumerate(zip(dec.eigenvalues, dec.projectors)):
        qx = float(np.trace(sigma @ proj).real)
        if qx <= q_floor:
            continue
        dx = float(dx) if dx > floor else 0.0
        out = s_half @ proj @ s_half / qx
        outputs.append((out + out.conj().T) / 2)
        p_list.append(dx * qx)
        q_list.append(qx)
        labels.append(str(len(labels)))

    missing = float(np.trace(rho).real - np.trace(tilde).real)
    if missing > tol * max(float(np.trace(rho).real), 1.0):
        rest = (rho - tilde) / missing
        outputs.append((rest + rest.conj().T) / 2)
        p_list.append(missing)
        q_list.append(0.0)
        labels.append("x0")

    return ReverseTest(tuple(outputs), np.array(p_list), np.array(q_list),
                       tuple(labels))


def reverse_test_value(rt: ReverseTest, f: DivergenceGenerator) -> float:
    """The classical f-divergence D_f(p||q) of a reverse test."""
    return classical_f_divergence(rt.p, rt.q, f)


def perturbation_limit_probe(rho, sigma, f: DivergenceGenerator,
                             epsilons) -> list[tuple[float, float]]:
    """Evaluate d_prime(rho || sigma + eps * 1) along a descending eps grid.

    The sequence is non-decreasing as eps decreases; for finite recession it
    converges to d_max(rho||sigma), otherwise it diverges when supp rho is
    not inside supp sigma.
    """
    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps):
        raise ValueError("epsilons must be positive")
    if any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly descending")
    rho, sigma = _check_pair(rho, sigma)
    eye = np.eye(sigma.shape[0])
    return [(e, d_prime(rho, sigma + e * eye, f)) for e in eps]
