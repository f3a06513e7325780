"""Independent brute-force evaluators used to cross-check the main path.

Nothing here reuses the divergence engine's computation route: the
commutative oracle goes through joint diagonalization, the entropy
comparisons through direct matrix logarithms, and the alternative reverse
tests through nonnegative least squares on vectorized reconstruction
constraints.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import nnls

from . import linalg
from .divergence import ReverseTest
from .errors import NonCommuting
from .generators import DivergenceGenerator, classical_f_divergence


def joint_eigenvalues(rho, sigma, comm_tol: float = 1e-10):
    """Simultaneously diagonalize a commuting PSD pair.

    Returns (p, q): the eigenvalues of rho and sigma in a common eigenbasis.
    Raises NonCommuting when ||[rho, sigma]||_F exceeds comm_tol.
    """
    rho = linalg.require_psd(rho)
    sigma = linalg.require_psd(sigma)
    if linalg.commutator_norm(rho, sigma) > comm_tol:
        raise NonCommuting("inputs do not commute within tolerance")
    w, V = np.linalg.eigh(sigma)
    n = w.size
    scale = max(1.0, float(np.abs(w).max()))
    gap = linalg.default_rank_tol(n) * scale
    p = np.empty(n)
    q = np.empty(n)
    start = 0
    for stop in range(1, n + 1):
        if stop < n and w[stop] - w[stop - 1] <= gap:
            continue
        idx = slice(start, stop)
        B = V[:, idx]
        block = B.conj().T @ rho @ B
        wr, U = np.linalg.eigh((block + block.conj().T) / 2)
        p[idx] = wr
        q[idx] = np.diag(U.conj().T @ np.diag(w[idx]) @ U).real
        start = stop
    # snap diagonalization dust to exact zero so a vanishing entry cannot
    # masquerade as escaped mass and trigger a recession term
    for v in (p, q):
        floor = linalg.KERNEL_FLOOR * n * max(float(np.abs(v).max()), 0.0)
        v[np.abs(v) <= floor] = 0.0
    return np.maximum(p, 0.0), np.maximum(q, 0.0)


def classical_oracle(rho, sigma, f: DivergenceGenerator,
                     comm_tol: float = 1e-10) -> float:
    """Brute-force divergence of a commuting pair via its joint spectrum."""
    p, q = joint_eigenvalues(rho, sigma, comm_tol)
    return classical_f_divergence(p, q, f)


def _logm_psd(A, rank_tol=None) -> np.ndarray:
    return linalg._spectral_map(A, np.log, rank_tol)


def umegaki_relative_entropy(rho, sigma) -> float:
    """tr rho (log rho - log sigma) for an invertible pair (nats)."""
    rho = linalg.require_psd(rho)
    sigma = linalg.require_psd(sigma)
    return float(np.trace(rho @ (_logm_psd(rho) - _logm_psd(sigma))).real)


def bs_relative_entropy(rho, sigma) -> float:
    """The largest quantum relative entropy tr rho log(rho^{1/2} sigma^{-1} rho^{1/2})."""
    rho = linalg.require_psd(rho)
    sigma = linalg.require_psd(sigma)
    r_half = linalg.matrix_sqrt(rho)
    M = r_half @ linalg.gen_inverse(sigma) @ r_half
    return float(np.trace(rho @ _logm_psd(M)).real)


def _solve_nonneg(outputs, target, tol: float) -> np.ndarray | None:
    """Nonnegative weights w with sum_x w_x outputs_x = target, or None."""
    dim = target.shape[0]
    cols = []
    for out in outputs:
        cols.append(np.concatenate([out.real.ravel(), out.imag.ravel()]))
    A = np.array(cols).T
    b = np.concatenate([target.real.ravel(), target.imag.ravel()])
    w, resid = nnls(A, b)
    if resid > tol * max(1.0, float(np.linalg.norm(b))):
        return None
    return w


def _rank1_resolution(A, rng, n):
    """A = sum_j |c_j><c_j| with c_j the columns of A^{1/2} U, U Haar."""
    root = linalg.matrix_sqrt(A)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    U, _ = np.linalg.qr(G)
    cols = root @ U
    outs, weights = [], []
    for j in range(n):
        c = cols[:, j]
        w = float(np.vdot(c, c).real)
        if w > 1e-14:
            outs.append(np.outer(c, c.conj()) / w)
            weights.append(w)
    return outs, weights


def disjoint_reverse_test(rho, sigma, rng: np.random.Generator) -> ReverseTest:
    """The always-valid reverse test from separate rank-1 ensembles.

    rho-atoms carry q = 0 and sigma-atoms carry p = 0, so its divergence is
    tr(rho) times the recession constant; exact by construction.
    """
    rho = linalg.require_psd(rho)
    sigma = linalg.require_psd(sigma)
    n = rho.shape[0]
    outs_r, w_r = _rank1_resolution(rho, rng, n)
    outs_s, w_s = _rank1_resolution(sigma, rng, n)
    outputs = tuple(outs_r + outs_s)
    p = np.array(w_r + [0.0] * len(outs_s))
    q = np.array([0.0] * len(outs_r) + w_s)
    return ReverseTest(outputs, p, q,
                       tuple(str(i) for i in range(len(outputs))))


def refine_reverse_test(rt: ReverseTest, rng: np.random.Generator,
                        splits: int = 2) -> ReverseTest:
    """Split every atom into copies with independently divided p and q mass.

    Classical post-processing maps the refinement back onto rt, so it is an
    exact reverse test of the same pair; its divergence can only be larger.
    """
    outputs, p, q, labels = [], [], [], []
    for x, out in enumerate(rt.outputs):
        a = rng.dirichlet(np.ones(splits))
        b = rng.dirichlet(np.ones(splits))
        for j in range(splits):
            outputs.append(out)
            p.append(rt.p[x] * a[j])
            q.append(rt.q[x] * b[j])
            labels.append(f"{rt.labels[x]}.{j}")
    return ReverseTest(tuple(outputs), np.array(p), np.array(q), tuple(labels))


def concat_reverse_tests(first: ReverseTest, second: ReverseTest,
                         weight: float) -> ReverseTest:
    """Convex combination of two reverse tests of the same pair."""
    outputs = first.outputs + second.outputs
    p = np.concatenate([weight * first.p, (1 - weight) * second.p])
    q = np.concatenate([weight * first.q, (1 - weight) * second.q])
    labels = (tuple(f"a{l}" for l in first.labels)
              + tuple(f"b{l}" for l in second.labels))
    return ReverseTest(outputs, p, q, labels)


def random_reverse_test(rho, sigma, rng: np.random.Generator,
                        extra_atoms: int = 2,
                        tol: float = 1e-10) -> ReverseTest | None:
    """A random valid (generally suboptimal) reverse test of the pair.

    Atoms are random rank-1 resolutions of rho and sigma plus a few random
    states; the weight vectors are recovered by nonnegative least squares.
    Returns None when the solver cannot match the pair within tolerance or
    when it leaves ambiguous near-zero weights (solver dust that a
    divergence with infinite slope at 0 would amplify past any tolerance).
    """
    rho = linalg.require_psd(rho)
    sigma = linalg.require_psd(sigma)
    n = rho.shape[0]
    outs_r, _ = _rank1_resolution(rho, rng, n)
    outs_s, _ = _rank1_resolution(sigma, rng, n)
    outputs = outs_r + outs_s
    for _ in range(extra_atoms):
        G = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        M = G @ G.conj().T
        outputs.append(M / np.trace(M).real)

    p = _solve_nonneg(outputs, rho, tol)
    q = _solve_nonneg(outputs, sigma, tol)
    if p is None or q is None:
        return None
    for v in (p, q):
        if v.max() > 0 and ((v > 0) & (v < 1e-6 * v.max())).any():
            return None
    labels = tuple(str(i) for i in range(len(outputs)))
    return ReverseTest(tuple(outputs), p, q, labels)


def shrunk_feasible_operator(rho, sigma, tilde, rng: np.random.Generator,
                             rank_tol=None) -> np.ndarray:
    """A random PSD rho_1 with supp rho_1 in supp sigma and rho_1 <= rho.

    Built as a convex mix of the Schur reduction with a scaled compression
    pi_sigma rho pi_sigma, the compression shrunk until it fits under rho.
    Any such operator must sit below the Schur reduction.
    """
    rho = linalg.require_psd(rho)
    pi_s = linalg.support_projector(sigma, rank_tol)
    comp = pi_s @ rho @ pi_s
    comp = (comp + comp.conj().T) / 2
    pi_r = linalg.support_projector(rho, rank_tol)
    eye = np.eye(rho.shape[0])
    leak = (eye - pi_r) @ comp @ (eye - pi_r)
    if float(np.abs(leak).max()) > 1e-10 * max(1.0, float(np.abs(comp).max())):
        s_max = 0.0
    else:
        r_inv = linalg.gen_inverse_sqrt(rho, rank_tol)
        lam = float(np.linalg.eigvalsh(r_inv @ comp @ r_inv).max())
        s_max = 0.0 if lam <= 0 else 1.0 / lam
    t = rng.uniform(0.0, 1.0)
    s = rng.uniform(0.0, 1.0)
    rho1 = t * tilde + (1.0 - t) * (s * s_max) * comp
    return (rho1 + rho1.conj().T) / 2
