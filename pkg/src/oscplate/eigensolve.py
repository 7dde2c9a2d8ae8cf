"""Smallest eigenpairs of a symmetric pencil ``Q x = lambda M x`` (M > 0)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import InvalidArgument, NumericalFailure

DENSE_LIMIT = 200
MAX_K = 32


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, M-orthonormal
    residuals: np.ndarray     # ||Q x - lambda M x|| / ||Q x||
    converged: bool = True


def _matrices(pencil):
    if hasattr(pencil, "Q"):
        return pencil.Q, pencil.M
    Q, M = pencil
    return Q, M


def _m_orthonormalize(X, M):
    """Gram-Schmidt in the M inner product (via Cholesky of the Gram matrix)."""
    G = X.T @ (M @ X)
    G = 0.5 * (G + G.T)
    R = la.cholesky(G)
    return la.solve_triangular(R, X.T, trans="T").T


def smallest_eigenpairs(pencil, k: int = 1, tol: float = 1e-10, *, sigma: float = 0.0,
                        seed: int = 0, dense: bool | None = None) -> EigenResult:
    """The ``k`` smallest eigenpairs of the pencil.

    Shift-invert Lanczos around ``sigma`` (``Q - sigma M`` is factorised once
    by sparse LU); below ``DENSE_LIMIT`` unknowns a dense symmetric solver is
    used instead.  Eigenvectors are M-orthonormalised afterwards and each
    eigenvalue is replaced by its Rayleigh quotient.

    Shift-invert returns the eigenvalues closest to ``sigma``; they are the
    smallest ones only if ``sigma`` lies below the spectrum.  That holds for
    ``sigma = 0`` whenever ``Q`` is positive definite; an indefinite ``Q``
    needs an explicit lower bound.
    """
    Q, M = _matrices(pencil)
    n = Q.shape[0]
    if not 1 <= k <= MAX_K:
        raise InvalidArgument(f"k must lie in 1..{MAX_K}")
    if k > n:
        raise InvalidArgument("k exceeds the pencil size")
    if tol < 1e-10:
        raise InvalidArgument("tol must be >= 1e-10")
    if dense is None:
        dense = n < DENSE_LIMIT
    # Jacobi equilibration: Hermite dofs mix values and derivatives whose
    # scales differ by powers of h, which otherwise inflates the residual floor
    Q0, M0 = Q, M
    dq = Q.diagonal() if sp.issparse(Q) else np.diag(np.asarray(Q, float))
    if np.any(dq <= 0):
        raise NumericalFailure("Q has a non-positive diagonal entry")
    D = sp.diags(1.0 / np.sqrt(dq))
    Q = D @ Q @ D
    M = D @ M @ D
    if dense:
        Qd = Q.toarray() if sp.issparse(Q) else np.asarray(Q, float)
        Md = M.toarray() if sp.issparse(M) else np.asarray(M, float)
        try:
            lam, X = la.eigh(Qd, Md, subset_by_index=(0, k - 1))
        except la.LinAlgError as exc:
            raise NumericalFailure(f"dense eigensolver failed: {exc}") from exc
    else:
        Q = sp.csc_matrix(Q)
        M = sp.csc_matrix(M)
        try:
            lu = spla.splu((Q - sigma * M).tocsc(), permc_spec="COLAMD")
        except RuntimeError as exc:
            raise NumericalFailure(f"factorisation of Q - sigma M failed: {exc}") from exc
        OPinv = spla.LinearOperator((n, n), matvec=lu.solve, dtype=float)
        v0 = np.random.default_rng(seed).standard_normal(n)
        ncv = min(n, max(2 * k + 1, 20))
        try:
            lam, X = spla.eigsh(Q, k=k, M=M, sigma=sigma, which="LM", OPinv=OPinv,
                                v0=v0, ncv=ncv, tol=tol * 1e-2)
        except spla.ArpackNoConvergence as exc:
            lam, X = exc.eigenvalues, exc.eigenvectors
            if len(lam) == 0:
                raise NumericalFailure("eigensolver did not converge") from exc
    order = np.argsort(lam)
    X = np.asarray(X)[:, order]
    X = _m_orthonormalize(X, M)
    # Rayleigh-Ritz on the converged subspace keeps clustered pairs clean
    A = X.T @ (Q @ X)
    lam, C = la.eigh(0.5 * (A + A.T))
    X = X @ C
    for j in range(X.shape[1]):  # deterministic sign: largest entry positive
        if X[np.argmax(np.abs(X[:, j])), j] < 0:
            X[:, j] = -X[:, j]
    X = D @ X
    Q, M = Q0, M0
    QX, MX = Q @ X, M @ X
    res = np.linalg.norm(QX - MX * lam, axis=0) / np.linalg.norm(QX, axis=0)
    return EigenResult(lam, X, res, bool(len(lam) == k and np.all(res <= tol)))
