"""Assembly of the symmetric pencils ``(Q, M)`` for ``Q u = lambda M u``.

``Q(u, v) = int D^2 u : D^2 v + u v`` and ``M(u, v) = int u v``.  The limit
problems are assembled directly on ``Omega``; the oscillating-domain problem
uses the trial space ``{phi o Phi_eps}`` and is integrated in reference
coordinates, where every point ``r`` is pulled back through
``x = Phi_eps^{-1}(r)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument, NumericalFailure
from .geometry import DomainSpec, _h_all, invert_phi
from .plate_fem import (BCKind, DofMap, Grid, Intermediate, StrangeTerm,
                        build_dofmap, cell_basis)

logger = logging.getLogger(__name__)

_IXX, _IXY, _IYY = 3, 4, 5  # positions of second derivatives in DERIVS


def gauss01(n: int, n_sub: int = 1):
    """Composite Gauss-Legendre rule on [0, 1] with ``n_sub`` equal pieces."""
    t, w = np.polynomial.legendre.leggauss(n)
    t, w = 0.5 * (t + 1), 0.5 * w
    k = np.arange(n_sub)[:, None]
    return ((k + t) / n_sub).ravel(), np.tile(w / n_sub, n_sub)


@dataclass
class FormPencil:
    """Reduced (constraints eliminated) pencil plus what is needed to map
    reduced vectors back onto the grid."""

    Q: sp.csr_matrix
    M: sp.csr_matrix
    grid: Grid
    dofmap: DofMap
    bc: BCKind
    domain: DomainSpec | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def expand(self, x):
        return self.dofmap.expand(x)


def _element_matrices(hx: float, hy: float, gauss: int):
    """Energy and mass element matrices of an affine ``hx x hy`` cell."""
    t, w = gauss01(gauss)
    XI, ETA = np.meshgrid(t, t, indexing="ij")
    W = np.outer(w, w).ravel() * hx * hy
    B = cell_basis(hx, hy, XI.ravel(), ETA.ravel())
    v, bxx, bxy, byy = B[:, 0], B[:, _IXX], B[:, _IXY], B[:, _IYY]
    M = np.einsum("ap,bp,p->ab", v, v, W)
    K = (np.einsum("ap,bp,p->ab", bxx, bxx, W)
         + 2 * np.einsum("ap,bp,p->ab", bxy, bxy, W)
         + np.einsum("ap,bp,p->ab", byy, byy, W))
    return K + M, M


def _edge_matrix(hx: float, hy: float, gauss: int):
    """``int (d phi_a/dy)(d phi_b/dy) dx`` along the top edge of a cell."""
    t, w = gauss01(gauss)
    B = cell_basis(hx, hy, t, np.ones_like(t))[:, 2]
    return np.einsum("ap,bp,p->ab", B, B, w * hx)


class _Triplets:
    def __init__(self):
        self.rows, self.cols, self.q, self.m = [], [], [], []

    def add(self, dofs, Qe, Me):
        """``dofs (ncell, 16)``; ``Qe, Me`` either ``(16, 16)`` or ``(ncell, 16, 16)``."""
        nc = dofs.shape[0]
        self.rows.append(np.repeat(dofs, 16, axis=1).ravel())
        self.cols.append(np.tile(dofs, (1, 16)).ravel())
        self.q.append(np.broadcast_to(Qe, (nc, 16, 16)).ravel())
        self.m.append(np.broadcast_to(Me, (nc, 16, 16)).ravel())

    def build(self, n):
        r, c = np.concatenate(self.rows), np.concatenate(self.cols)
        Q = sp.coo_matrix((np.concatenate(self.q), (r, c)), shape=(n, n)).tocsr()
        M = sp.coo_matrix((np.concatenate(self.m), (r, c)), shape=(n, n)).tocsr()
        return Q, M


def _reduce(A, free):
    A = A.tocsr()[free][:, free].tocsr()
    # exact symmetry; assembly is symmetric up to summation order only
    return ((A + A.T) * 0.5).tocsr()


def _add_limit_rows(trip: _Triplets, grid: Grid, rows, gauss: int):
    cache = {}
    for j in rows:
        key = round(float(grid.hy[j]), 15)
        if key not in cache:
            cache[key] = _element_matrices(grid.hx, grid.hy[j], gauss)
        Qe, Me = cache[key]
        trip.add(grid.cell_dofs[j], Qe, Me)


def strange_matrix(grid: Grid, gauss: int = 5) -> sp.csr_matrix:
    """Full-size matrix of ``int_W (du/dx_N)(dv/dx_N) dx`` on the top edge."""
    j = grid.ny - 1
    Se = _edge_matrix(grid.hx, grid.hy[j], gauss)
    dofs = grid.cell_dofs[j]
    nc = dofs.shape[0]
    r = np.repeat(dofs, 16, axis=1).ravel()
    c = np.tile(dofs, (1, 16)).ravel()
    v = np.broadcast_to(Se, (nc, 16, 16)).ravel()
    return sp.coo_matrix((v, (r, c)), shape=(grid.n_dofs,) * 2).tocsr()


def assemble_limit(grid: Grid, bc: BCKind, *, gauss: int = 5) -> FormPencil:
    """Pencil of the limit operator on ``Omega`` for the boundary condition ``bc``.

    For ``StrangeTerm(gamma, sign)`` the form is
    ``Q + sign * gamma * int_W (du/dx_N)(dv/dx_N)``.
    """
    if isinstance(bc, StrangeTerm) and bc.gamma < 0:
        raise InvalidArgument("gamma must be non-negative")
    dm = build_dofmap(grid, bc)
    trip = _Triplets()
    _add_limit_rows(trip, grid, range(grid.ny), gauss)
    Q, M = trip.build(grid.n_dofs)
    if isinstance(bc, StrangeTerm) and bc.gamma != 0:
        Q = Q + bc.sign * bc.gamma * strange_matrix(grid, gauss)
    return FormPencil(_reduce(Q, dm.free), _reduce(M, dm.free), grid, dm, bc,
                      meta={"gauss": gauss})


def layer_rows(grid: Grid, eps: float) -> np.ndarray:
    """Rows of cells lying above ``x_N = -eps``."""
    return np.flatnonzero(grid.y[:-1] >= -eps - 1e-12)


def check_perturbed_grid(spec: DomainSpec, grid: Grid, min_cells_per_period: int = 8):
    if abs(grid.L - spec.L) > 1e-12 * spec.L:
        raise InvalidArgument("grid and domain have different widths")
    if not grid.has_line(-spec.eps):
        raise InvalidArgument(f"grid has no line at x_N = -eps = {-spec.eps:.6g}")
    per = grid.nx * spec.eps / spec.L
    if per < min_cells_per_period - 1e-9:
        raise InvalidArgument(
            f"{per:.3g} cells per oscillation period, need >= {min_cells_per_period}")


def perturbed_row_matrices(spec: DomainSpec, grid: Grid, j: int, *, gauss: int = 5,
                           n_sub: int = 4, n_sub_x: int = 1, det_bound: float = 10.0):
    """Element matrices ``(nx, 16, 16)`` of one layer row for the pulled-back
    space, integrated in reference coordinates."""
    hx, hy = grid.hx, grid.hy[j]
    tx, wx = gauss01(gauss, n_sub_x)
    ty, wy = gauss01(gauss, n_sub)
    XI, ETA = np.meshgrid(tx, ty, indexing="ij")
    XI, ETA = XI.ravel(), ETA.ravel()
    W = np.outer(wx, wy).ravel() * hx * hy  # (nq,)
    B = cell_basis(hx, hy, XI, ETA)  # (16, 6, nq), identical for every cell of the row

    rx = grid.x[:-1, None] + hx * XI[None, :]  # (nx, nq)
    ry = np.broadcast_to(grid.y[j] + hy * ETA[None, :], rx.shape)
    xn = invert_phi(spec, rx, np.minimum(ry, 0.0))
    h = _h_all(spec, rx, xn, check=False)  # (6, nx, nq)
    hx_, hn = h[1], h[2]
    hxx, hxn, hnn = h[3], h[4], h[5]
    det = 1.0 - hn
    if det.min() < 1 / det_bound or det.max() > det_bound:
        raise NumericalFailure(
            f"Jacobian determinant range [{det.min():.3g}, {det.max():.3g}] outside "
            f"[{1 / det_bound:.3g}, {det_bound:.3g}]")

    py = B[:, 2][None]
    pxx, pxy, pyy = B[:, _IXX][None], B[:, _IXY][None], B[:, _IYY][None]
    a = -hx_[:, None, :]  # d Phi^N / dx
    d = det[:, None, :]   # d Phi^N / dx_N
    # Hessian of phi o Phi_eps by the chain rule (Phi^x = x is affine)
    Hxx = pxx + 2 * a * pxy + a * a * pyy - py * hxx[:, None, :]
    Hxn = d * pxy + a * d * pyy - py * hxn[:, None, :]
    Hnn = d * d * pyy - py * hnn[:, None, :]
    wq = (W[None, :] / det)[:, None, :]  # dx = dr / det
    Me = np.einsum("ap,bp,cp->cab", B[:, 0], B[:, 0], wq[:, 0, :])
    Ke = (np.einsum("cap,cbp->cab", Hxx * wq, Hxx)
          + 2 * np.einsum("cap,cbp->cab", Hxn * wq, Hxn)
          + np.einsum("cap,cbp->cab", Hnn * wq, Hnn))
    return Ke + Me, Me, (float(det.min()), float(det.max()))


def assemble_perturbed(spec: DomainSpec, grid: Grid, *, gauss: int = 5, n_sub: int = 4,
                       n_sub_x: int = 1, det_bound: float = 10.0,
                       min_cells_per_period: int = 8) -> FormPencil:
    """Pencil of the hinged problem on ``Omega_eps`` in the pulled-back space.

    Rows below ``x_N = -eps`` are untouched by ``Phi_eps`` and reuse the affine
    element matrices; rows above are integrated with ``n_sub`` composite Gauss
    pieces in the vertical direction.
    """
    check_perturbed_grid(spec, grid, min_cells_per_period)
    dm = build_dofmap(grid, Intermediate())
    rows = layer_rows(grid, spec.eps)
    trip = _Triplets()
    _add_limit_rows(trip, grid, np.setdiff1d(np.arange(grid.ny), rows), gauss)
    dets = []
    for j in rows:
        Ke, Me, dr = perturbed_row_matrices(spec, grid, j, gauss=gauss, n_sub=n_sub,
                                            n_sub_x=n_sub_x, det_bound=det_bound)
        dets.append(dr)
        trip.add(grid.cell_dofs[j], Ke, Me)
    Q, M = trip.build(grid.n_dofs)
    dets = np.array(dets) if dets else np.ones((1, 2))
    meta = {"gauss": gauss, "n_sub": n_sub, "n_sub_x": n_sub_x,
            "det_range": (float(dets[:, 0].min()), float(dets[:, 1].max())),
            "layer_rows": len(rows)}
    logger.debug("perturbed pencil: %d dofs, %d layer rows", len(dm.free), len(rows))
    return FormPencil(_reduce(Q, dm.free), _reduce(M, dm.free), grid, dm, Intermediate(),
                      domain=spec, meta=meta)


def dump_coo(A, path) -> None:
    """Write ``A`` as ``row col value`` lines (0-based indices)."""
    A = sp.coo_matrix(A)
    with open(path, "w") as fh:
        fh.write(f"% {A.shape[0]} {A.shape[1]} {A.nnz}\n")
        for r, c, v in zip(A.row, A.col, A.data):
            fh.write(f"{r} {c} {v:.17g}\n")
