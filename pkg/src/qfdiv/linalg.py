"""Dense complex Hermitian linear algebra.

Spectral decompositions with eigenvalue clustering, functional calculus,
support projectors, generalized inverses, and the Schur-complement reduction
that pushes a positive operator into the support of another.  All functions
are pure: inputs are never mutated and outputs are freshly allocated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidOperator, NotPSD

# Relative gap below which eigenvalues are merged into one projector.
DEFAULT_CLUSTER_TOL = 1e-8

# Eigenvalues of a functional-calculus argument below this multiple of the
# spectral radius are treated as an exact kernel (so f(0) = 0 applies).
KERNEL_FLOOR = 100 * np.finfo(float).eps


def default_rank_tol(dim: int) -> float:
    """Relative eigenvalue cutoff for numerical rank decisions."""
    return dim * 1e-12


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidOperator(f"expected a square matrix, got shape {A.shape}")
    return A


def as_hermitian(A, tol: float | None = None) -> np.ndarray:
    """Check Hermiticity and return the symmetrized (A + A†)/2."""
    A = as_matrix(A)
    scale = max(1.0, float(np.abs(A).max())) if A.size else 1.0
    if tol is None:
        tol = 1e-12 * scale
    if float(np.abs(A - A.conj().T).max()) > tol:
        raise InvalidOperator("matrix is not Hermitian within tolerance")
    return (A + A.conj().T) / 2


def require_psd(A, tol: float | None = None) -> np.ndarray:
    """Check positive semidefiniteness (within tol) and return A symmetrized."""
    A = as_hermitian(A)
    evals = np.linalg.eigvalsh(A)
    scale = max(1.0, float(np.abs(evals).max())) if evals.size else 1.0
    if tol is None:
        tol = default_rank_tol(A.shape[0]) * scale * 100
    if evals.size and evals[0] < -tol:
        raise NotPSD(f"minimum eigenvalue {evals[0]:.3e} below -{tol:.3e}")
    return A


def is_psd(A, tol: float = 1e-10) -> bool:
    """True iff A is Hermitian and its spectrum is above -tol."""
    try:
        A = as_hermitian(A)
    except InvalidOperator:
        return False
    evals = np.linalg.eigvalsh(A)
    return bool(evals.size == 0 or evals[0] >= -tol)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clustered spectral decomposition  A = sum_x d_x P_x.

    ``eigenvalues`` holds one representative per cluster (ascending), each
    the multiplicity-weighted mean of the merged eigenvalues; ``projectors``
    are the corresponding orthogonal eigenprojectors.
    """

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]
    multiplicities: np.ndarray

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def reconstruct(self) -> np.ndarray:
        out = np.zeros_like(self.projectors[0])
        for lam, proj in zip(self.eigenvalues, self.projectors):
            out = out + lam * proj
        return out


def herm_eig(A, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectralDecomposition:
    """Eigendecomposition with near-degenerate eigenvalues merged.

    Consecutive eigenvalues whose gap is at most cluster_tol times the
    spectral radius share one projector.
    """
    A = as_hermitian(A)
    evals, vecs = np.linalg.eigh(A)
    scale = float(np.abs(evals).max()) if evals.size else 0.0
    gap = cluster_tol * scale
    groups: list[list[int]] = [[0]]
    for i in range(1, evals.size):
        if evals[i] - evals[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    reps = np.array([evals[g].mean() for g in groups])
    projs = []
    for g in groups:
        V = vecs[:, g]
        P = V @ V.conj().T
        projs.append((P + P.conj().T) / 2)
    mults = np.array([len(g) for g in groups], dtype=int)
    return SpectralDecomposition(reps, tuple(projs), mults)


def support_projector(A, rank_tol: float | None = None) -> np.ndarray:
    """Orthogonal projector onto the range of a PSD operator.

    Eigenvalues at or below rank_tol times the largest eigenvalue count as
    kernel.  Default rank_tol is dim * 1e-12.
    """
    A = require_psd(A)
    n = A.shape[0]
    if rank_tol is None:
        rank_tol = default_rank_tol(n)
    evals, vecs = np.linalg.eigh(A)
    lam_max = float(evals.max()) if evals.size else 0.0
    if lam_max <= 0.0:
        return np.zeros_like(A)
    keep = evals > rank_tol * lam_max
    V = vecs[:, keep]
    P = V @ V.conj().T
    return (P + P.conj().T) / 2


def support_dominates(B, A, rank_tol: float | None = None, tol: float = 1e-8) -> bool:
    """True iff supp A is contained in supp B (both PSD), within tolerance."""
    pa = support_projector(A, rank_tol)
    pb = support_projector(B, rank_tol)
    resid = pa - pb @ pa
    return float(np.abs(resid).max()) <= tol


def _spectral_map(A, fn, rank_tol: float | None = None) -> np.ndarray:
    """Apply fn to the spectrum of PSD A, with kernel cut at rank_tol."""
    A = require_psd(A)
    n = A.shape[0]
    if rank_tol is None:
        rank_tol = default_rank_tol(n)
    evals, vecs = np.linalg.eigh(A)
    lam_max = float(evals.max()) if evals.size else 0.0
    vals = np.where(evals > rank_tol * lam_max, fn(np.maximum(evals, 0.0)), 0.0)
    out = (vecs * vals) @ vecs.conj().T
    return (out + out.conj().T) / 2


def gen_inverse_sqrt(A, rank_tol: float | None = None) -> np.ndarray:
    """A^{-1/2} on supp A, zero on the kernel (generalized inverse)."""
    return _spectral_map(A, lambda w: 1.0 / np.sqrt(np.where(w > 0, w, 1.0)), rank_tol)


def gen_inverse(A, rank_tol: float | None = None) -> np.ndarray:
    """Generalized (Moore-Penrose) inverse of a PSD operator."""
    return _spectral_map(A, lambda w: 1.0 / np.where(w > 0, w, 1.0), rank_tol)


def matrix_sqrt(A, rank_tol: float | None = None) -> np.ndarray:
    """Principal square root of a PSD operator."""
    return _spectral_map(A, np.sqrt, rank_tol)


def apply_scalar_function(A, h) -> np.ndarray:
    """Spectral functional calculus h(A) = sum_x h(d_x) P_x.

    h must accept a float array; a NaN or an exception from h raises
    DomainError.
    """
    from .errors import DomainError

    A = as_hermitian(A)
    evals, vecs = np.linalg.eigh(A)
    try:
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.asarray(h(evals), dtype=float)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise DomainError(f"scalar function failed on spectrum: {exc}") from exc
    if vals.shape != evals.shape:
        vals = np.broadcast_to(vals, evals.shape)
    if np.isnan(vals).any():
        bad = evals[np.isnan(vals)]
        raise DomainError(f"scalar function undefined at eigenvalue(s) {bad}")
    out = (vecs * vals) @ vecs.conj().T
    return (out + out.conj().T) / 2


def schur_tilde(rho, sigma, rank_tol: float | None = None,
                mass_tol: float = 1e-10) -> np.ndarray:
    """Largest PSD operator below rho that is supported inside supp sigma.

    Blocks are taken against pi = supp projector of sigma and the smallest
    complement projector pibar covering the rest of supp rho:
    returns rho_11 - rho_12 rho_22^{-1} rho_21.  If supp rho is already
    inside supp sigma, rho itself is returned.  A result whose trace is
    below mass_tol * tr(rho) is snapped to exact zero.
    """
    rho = require_psd(rho)
    sigma = require_psd(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch("rho and sigma must have equal dimensions")
    pi_s = support_projector(sigma, rank_tol)
    if support_dominates(sigma, rho, rank_tol):
        return rho
    eye = np.eye(rho.shape[0])
    off = (eye - pi_s) @ rho @ (eye - pi_s)
    pibar = support_projector(off, rank_tol)
    r11 = pi_s @ rho @ pi_s
    r12 = pi_s @ rho @ pibar
    r22 = pibar @ rho @ pibar
    tilde = r11 - r12 @ gen_inverse(r22, rank_tol) @ r12.conj().T
    tilde = (tilde + tilde.conj().T) / 2
    if float(np.trace(tilde).real) <= mass_tol * max(float(np.trace(rho).real), 1e-300):
        return np.zeros_like(rho)
    return tilde


def block_positivity_check(X, C, Y, tol: float = 1e-10) -> bool:
    """True iff the block matrix [[X, C], [C†, Y]] is PSD within tol."""
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape != (X.shape[0], Y.shape[0]):
        raise DimensionMismatch(
            f"off-diagonal block shape {C.shape} incompatible with "
            f"{X.shape[0]}x{Y.shape[0]}")
    top = np.hstack([X, C])
    bottom = np.hstack([C.conj().T, Y])
    return is_psd(np.vstack([top, bottom]), tol)


def commutator_norm(A, B) -> float:
    """Frobenius norm of [A, B]."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return float(np.linalg.norm(A @ B - B @ A))
