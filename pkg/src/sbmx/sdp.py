"""Semidefinite relaxation of min-bisection and its dual certificate.

The relaxation maximizes Tr(B X) over correlation matrices X (unit diagonal,
PSD), where B is the signed adjacency: +1 on edges, -1 on non-edges, zero
diagonal. For a planted balanced labeling t, the matrix

    M = 2 * L + ones(n, n),      L = D_within - D_cross - A,

annihilates t exactly; when M is PSD with a strictly positive second-smallest
eigenvalue, t t^T is the unique optimum of the relaxation, so checking M's
bottom spectrum certifies exact recovery without solving anything.

The solver itself is a low-rank factorized ascent (unit-norm rows, projected
gradient with backtracking), which needs no external SDP solver at the sizes
used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .model import Graph, SbmParams, require_labeling
from .seeding import derive_seed

__all__ = [
    "ConvergenceError",
    "CertificateReport",
    "SdpConfig",
    "SdpSolution",
    "EigResult",
    "adjacency_matrix",
    "signed_adjacency",
    "sbm_laplacian",
    "certificate_matrix",
    "certificate_check",
    "expected_certificate_matrix",
    "smallest_eigenvalues",
    "sdp_solve",
    "round_solution",
]


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance within its cap."""


@dataclass(frozen=True)
class CertificateReport:
    """Bottom spectrum of the certificate matrix and the resulting verdict."""

    lambda_min: float
    lambda_2: float
    g_residual: float
    certified: bool

    def to_dict(self) -> dict:
        return {
            "lambda_min": self.lambda_min,
            "lambda_2": self.lambda_2,
            "g_residual": self.g_residual,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class SdpConfig:
    rank: int | None = None
    restarts: int = 5
    max_iter: int = 5000
    grad_tol: float = 1e-6
    seed: int = 0


@dataclass
class SdpSolution:
    """Low-rank feasible point: factor has unit-norm rows, X = F F^T."""

    factor: np.ndarray
    objective: float
    rounded: np.ndarray
    rounds_used: int


class EigResult(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray


def adjacency_matrix(g: Graph, dtype=np.int64) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=dtype)
    if g.m:
        u, v = g.edges[:, 0], g.edges[:, 1]
        a[u, v] = 1
        a[v, u] = 1
    return a


def signed_adjacency(g: Graph) -> np.ndarray:
    """+1 on edges, -1 on non-edges, zero diagonal."""
    a = adjacency_matrix(g, dtype=np.float64)
    b = 2.0 * a - 1.0
    np.fill_diagonal(b, 0.0)
    return b


def _degree_split(g: Graph, truth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    within = np.zeros(g.n, dtype=np.int64)
    cross = np.zeros(g.n, dtype=np.int64)
    if g.m:
        u, v = g.edges[:, 0], g.edges[:, 1]
        same = truth[u] == truth[v]
        np.add.at(within, u[same], 1)
        np.add.at(within, v[same], 1)
        np.add.at(cross, u[~same], 1)
        np.add.at(cross, v[~same], 1)
    return within, cross


def sbm_laplacian(g: Graph, truth) -> np.ndarray:
    """D_within - D_cross - A, in exact integer arithmetic; annihilates truth."""
    arr = require_labeling(truth, g.n)
    if int(arr.sum()) != 0:
        raise ValueError("the planted labeling must be balanced")
    within, cross = _degree_split(g, arr)
    lap = -adjacency_matrix(g, dtype=np.int64)
    np.fill_diagonal(lap, within - cross)
    return lap


def certificate_matrix(g: Graph, truth) -> np.ndarray:
    """2 * laplacian + all-ones, integer exact.

    This is Y - B for the diagonal dual witness Y = 2(D_within - D_cross) + I,
    which matches Tr(B t t^T) by construction.
    """
    return 2 * sbm_laplacian(g, truth) + np.ones((g.n, g.n), dtype=np.int64)


def certificate_check(
    g: Graph,
    truth,
    *,
    psd_tol_factor: float = 1e-8,
    gap_tol_factor: float = 1e-6,
) -> CertificateReport:
    """Decide whether the planted labeling is certifiably the unique optimum.

    certified requires lambda_min >= -tol_psd, lambda_2 > tol_gap, and a
    vanishing residual ||M t||_inf, with tolerances scaled by ||M||_F to the
    eigensolver's accuracy floor.
    """
    arr = require_labeling(truth, g.n)
    m_int = certificate_matrix(g, arr)
    residual = float(np.max(np.abs(m_int @ arr.astype(np.int64))))
    mat = m_int.astype(np.float64)
    fro = float(np.linalg.norm(mat))
    eig = smallest_eigenvalues(mat, 2)
    tol_psd = psd_tol_factor * fro
    tol_gap = gap_tol_factor * fro
    lam_min, lam_2 = float(eig.values[0]), float(eig.values[1])
    certified = (lam_min >= -tol_psd) and (lam_2 > tol_gap) and (residual <= tol_psd)
    return CertificateReport(
        lambda_min=lam_min, lambda_2=lam_2, g_residual=residual, certified=certified
    )


def expected_certificate_matrix(params: SbmParams) -> np.ndarray:
    """Entrywise expectation of the certificate matrix for sorted communities.

    Block structure: diagonal d = (alpha-beta)log n - 2 alpha log(n)/n + 1,
    within-block off-diagonal a = 1 - 2 alpha log(n)/n, cross-block
    b = 1 - 2 beta log(n)/n. Spectrum: n - 2 beta log n (on the all-ones
    vector), 0 (on the labeling), and (alpha-beta) log n with multiplicity
    n - 2.
    """
    n = params.n
    log_n = math.log(n)
    a = 1.0 - 2.0 * params.alpha * log_n / n
    b = 1.0 - 2.0 * params.beta * log_n / n
    d = (params.alpha - params.beta) * log_n - 2.0 * params.alpha * log_n / n + 1.0
    half = n // 2
    mat = np.full((n, n), b)
    mat[:half, :half] = a
    mat[half:, half:] = a
    np.fill_diagonal(mat, d)
    return mat


def _lanczos_round(
    mat: np.ndarray,
    deflate: np.ndarray | None,
    tol_abs: float,
    seed: int,
) -> tuple[float, np.ndarray, float]:
    """One deflated Lanczos run returning the smallest eigenpair.

    Full reorthogonalization against both the Krylov basis and the deflation
    space; the Krylov space may grow to the full deflated dimension, at which
    point the Ritz values are exact up to rounding.
    """
    n = mat.shape[0]
    n_found = 0 if deflate is None else deflate.shape[1]
    limit = n - n_found
    rng = np.random.Generator(np.random.PCG64(seed))

    def project_out(w: np.ndarray) -> np.ndarray:
        if deflate is not None:
            w = w - deflate @ (deflate.T @ w)
        return w

    q = project_out(rng.standard_normal(n))
    norm = np.linalg.norm(q)
    attempts = 0
    while norm < 1e-12 and attempts < 5:
        q = project_out(rng.standard_normal(n))
        norm = np.linalg.norm(q)
        attempts += 1
    if norm < 1e-12:
        raise ConvergenceError("could not build a start vector outside the deflation space")
    q /= norm

    basis = np.empty((n, limit))
    alphas: list[float] = []
    betas: list[float] = []
    basis[:, 0] = q
    k = 0
    while True:
        w = mat @ basis[:, k]
        w = project_out(w)
        alphas.append(float(basis[:, k] @ w))
        w -= alphas[k] * basis[:, k]
        if k > 0:
            w -= betas[k - 1] * basis[:, k - 1]
        # full reorthogonalization, twice for stability
        for _ in range(2):
            w -= basis[:, : k + 1] @ (basis[:, : k + 1].T @ w)
            w = project_out(w)
        beta = float(np.linalg.norm(w))
        exhausted = (k + 1 == limit) or (beta < 1e-14 * max(tol_abs, 1e-300))
        if exhausted or (k + 1) % 8 == 0:
            vals, vecs = eigh_tridiagonal(np.array(alphas), np.array(betas))
            pos = int(np.argmin(vals))
            theta = float(vals[pos])
            ritz = basis[:, : k + 1] @ vecs[:, pos]
            ritz /= np.linalg.norm(ritz)
            res = float(np.linalg.norm(mat @ ritz - theta * ritz))
            if res <= tol_abs:
                return theta, ritz, res
            if exhausted:
                raise ConvergenceError(
                    f"Lanczos exhausted its Krylov space with residual {res:.3e} "
                    f"above tolerance {tol_abs:.3e}"
                )
        betas.append(beta)
        basis[:, k + 1] = w / beta
        k += 1


def smallest_eigenvalues(mat: np.ndarray, k: int, tol: float = 1e-9, seed: int = 7) -> EigResult:
    """k smallest eigenvalues (with multiplicity) of a symmetric matrix.

    Deflated Lanczos with deterministic seed-derived start vectors. Each
    accepted eigenpair satisfies ||M v - lambda v||_2 <= tol * ||M||_F;
    failure to converge raises ConvergenceError rather than returning junk.
    """
    mat = np.asarray(mat, dtype=np.float64)
    n = mat.shape[0]
    if mat.ndim != 2 or mat.shape[1] != n:
        raise ValueError("matrix must be square")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(mat).max())):
        raise ValueError("matrix must be symmetric")
    fro = float(np.linalg.norm(mat))
    if fro == 0.0:
        return EigResult(np.zeros(k), np.eye(n)[:, :k], np.zeros(k))
    tol_abs = tol * fro
    values = []
    vectors = []
    residuals = []
    for round_idx in range(k):
        deflate = np.column_stack(vectors) if vectors else None
        theta, vec, res = _lanczos_round(
            mat, deflate, tol_abs, derive_seed(seed, round_idx)
        )
        values.append(theta)
        vectors.append(vec)
        residuals.append(res)
    order = np.argsort(values)
    return EigResult(
        np.array(values)[order],
        np.column_stack(vectors)[:, order],
        np.array(residuals)[order],
    )


def _row_normalize(f: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(f, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return f / norms


def _ascend(b: np.ndarray, f: np.ndarray, config: SdpConfig, fro: float) -> tuple[np.ndarray, float]:
    """Projected gradient ascent with backtracking; objective never decreases."""
    obj = float(np.sum(f * (b @ f)))
    step = 1.0 / max(fro, 1e-12)
    iters_left = config.max_iter
    while iters_left > 0:
        g_mat = b @ f
        row_dots = np.sum(f * g_mat, axis=1, keepdims=True)
        grad = 2.0 * (g_mat - row_dots * f)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= config.grad_tol * fro:
            # stationary; a row anti-aligned with its field marks a flip saddle,
            # and flipping the worst one is a strict ascent
            worst = int(np.argmin(row_dots[:, 0]))
            if row_dots[worst, 0] >= -1e-12 * max(fro, 1.0):
                break
            f = f.copy()
            f[worst] = -f[worst]
            new_obj = float(np.sum(f * (b @ f)))
            assert new_obj >= obj - 1e-9 * max(1.0, abs(obj)), "objective decreased"
            obj = new_obj
            iters_left -= 1
            continue
        accepted = False
        while step >= 1e-18:
            trial = _row_normalize(f + step * grad)
            trial_obj = float(np.sum(trial * (b @ trial)))
            if trial_obj >= obj + 5e-5 * step * grad_norm**2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        assert trial_obj >= obj - 1e-9 * max(1.0, abs(obj)), "objective decreased"
        f, obj = trial, trial_obj
        step *= 1.25
        iters_left -= 1
    return f, obj


def sdp_solve(b: np.ndarray, config: SdpConfig | None = None) -> SdpSolution:
    """Low-rank ascent for max Tr(B X), X_ii = 1, X PSD.

    Factor rank max(2, ceil(sqrt(2n))) puts the problem in the regime where
    the factorized landscape has no spurious local optima. Restarts run from
    seed-derived starts and merge by best objective, ties to the lowest
    restart index. Optimality is only ever certified via certificate_check.
    """
    b = np.asarray(b, dtype=np.float64)
    n = b.shape[0]
    if b.ndim != 2 or b.shape[1] != n:
        raise ValueError("B must be square")
    if not np.allclose(b, b.T):
        raise ValueError("B must be symmetric")
    if np.any(np.diagonal(b) != 0.0):
        raise ValueError("B must have a zero diagonal")
    config = config or SdpConfig()
    rank = config.rank or max(2, math.ceil(math.sqrt(2 * n)))
    fro = float(np.linalg.norm(b))
    best_obj = -np.inf
    best_f = None
    for restart in range(config.restarts):
        rng = np.random.Generator(np.random.PCG64(derive_seed(config.seed, restart)))
        f0 = _row_normalize(rng.standard_normal((n, rank)))
        f, obj = _ascend(b, f0, config, fro)
        if obj > best_obj:
            best_obj, best_f = obj, f
    rounded = round_solution(
        SdpSolution(factor=best_f, objective=best_obj, rounded=None, rounds_used=config.restarts)
    )
    return SdpSolution(
        factor=best_f, objective=best_obj, rounded=rounded, rounds_used=config.restarts
    )


def round_solution(sol) -> np.ndarray:
    """Balanced sign rounding of the leading eigenvector of X.

    Accepts an SdpSolution (leading direction computed from the factor) or a
    dense X. If the sign vector is unbalanced, the excess side's entries with
    the smallest absolute coordinate are flipped, ties broken by vertex index.
    """
    if isinstance(sol, SdpSolution):
        f = np.asarray(sol.factor, dtype=np.float64)
        gram = f.T @ f
        vals, vecs = np.linalg.eigh(gram)
        lead = f @ vecs[:, -1]
    else:
        x = np.asarray(sol, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise ValueError("X must be square")
        vals, vecs = np.linalg.eigh(x)
        # scale by the eigenvalue so a PSD-zero matrix reads as degenerate
        lead = vecs[:, -1] * math.sqrt(max(float(vals[-1]), 0.0))
    norm = float(np.linalg.norm(lead))
    if norm < 1e-12:
        raise ConvergenceError("degenerate leading eigenvector in rounding")
    lead = lead / norm
    n = lead.shape[0]
    if n % 2 != 0:
        raise ValueError("rounding needs an even number of vertices")
    signs = np.where(lead >= 0.0, 1, -1).astype(np.int8)
    excess = int(signs.sum())
    if excess == 0:
        return signs
    side = 1 if excess > 0 else -1
    flips = abs(excess) // 2
    candidates = np.flatnonzero(signs == side)
    order = candidates[np.lexsort((candidates, np.abs(lead[candidates])))]
    signs[order[:flips]] = -side
    return signs
