"""Anisotropic unfolding of fields on ``Omega`` and the boundary-layer check.

For ``eps`` with ``L / eps`` an integer the eps-cells
``C_k = eps k + eps Y``, ``Y = (-1/2, 1/2)``, tile the periodic interval
``W = (0, L)`` (cell ``k = 0`` wraps around ``x = 0``), and the unfolding is

    u_hat(xbar, ybar, y_N) = u(eps [xbar / eps] + eps ybar, eps y_N).

A *field* here is any callable ``f(x, x_N, deriv=(0, 0))`` returning values or
first derivatives; :class:`~oscplate.plate_fem.PlateField` qualifies, and
:func:`pulled_back` wraps a reference-domain solution of the perturbed problem.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .assembly import gauss01
from .cell import CellSolution
from .errors import InvalidArgument
from .geometry import DomainSpec, _h_all
from .plate_fem import PlateField


def n_cells(L: float, eps: float) -> int:
    """Number of eps-cells in ``(0, L)``; ``L / eps`` must be an integer."""
    if eps <= 0 or L <= 0:
        raise InvalidArgument("L and eps must be positive")
    n = L / eps
    if abs(n - round(n)) > 1e-9 * max(n, 1.0):
        raise InvalidArgument(f"L / eps = {n:.12g} is not an integer")
    return int(round(n))


def cell_index(xbar, eps: float, L: float):
    """``[xbar / eps]`` with respect to ``Y``, taken modulo the number of cells."""
    nc = n_cells(L, eps)
    return np.mod(np.floor(np.asarray(xbar, float) / eps + 0.5).astype(np.int64), nc)


def _field_width(field, L):
    if L is not None:
        return float(L)
    if isinstance(field, PlateField):
        return field.grid.L
    raise InvalidArgument("width L is required for fields that are not PlateField")


@dataclass
class UnfoldedField:
    """Samples of ``u_hat`` on ``cells x ybar x yN``.

    ``u_hat`` is constant in ``xbar`` on every eps-cell, so one slab per cell
    holds all the information; :meth:`at` looks up the slab of a point ``xbar``.
    """

    eps: float
    L: float
    ybar: np.ndarray
    yN: np.ndarray
    values: np.ndarray  # (n_cells, len(ybar), len(yN))

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    @property
    def centers(self) -> np.ndarray:
        return self.eps * np.arange(self.n_cells)

    def cell_of(self, xbar):
        return cell_index(xbar, self.eps, self.L)

    def at(self, xbar):
        """Slab(s) ``u_hat(xbar, ., .)``."""
        return self.values[self.cell_of(xbar)]


def _call(field, L, x, xn, deriv=(0, 0)):
    """Evaluate with broadcasting, ``x`` wrapped into ``[0, L)``."""
    x, xn = np.broadcast_arrays(np.mod(np.asarray(x, float), L), np.asarray(xn, float))
    if tuple(deriv) == (0, 0):
        out = field(x, xn)
    else:
        out = field(x, xn, deriv)
    return np.broadcast_to(np.asarray(out, float), x.shape)


def _macro(eps, k, ybar):
    return eps * (np.asarray(k)[:, None] + np.asarray(ybar)[None, :])


def unfold(field, eps: float, a: float, *, L: float | None = None, ybar=None,
           yN=None, n_ybar: int = 16, n_yN: int = 32) -> UnfoldedField:
    """Sample the unfolding of ``field`` on ``(a / eps, 0)`` in ``y_N``.

    Default sample points are equispaced, ``ybar`` on ``[-1/2, 1/2)`` and
    ``yN`` on ``[a / eps, 0]``.
    """
    if a >= 0:
        raise InvalidArgument("depth a must be negative")
    L = _field_width(field, L)
    nc = n_cells(L, eps)
    ybar = (np.arange(n_ybar) / n_ybar - 0.5) if ybar is None else np.asarray(ybar, float)
    yN = np.linspace(a / eps, 0.0, n_yN) if yN is None else np.asarray(yN, float)
    if np.any(np.abs(ybar) > 0.5) or np.any(yN > 0) or np.any(yN < a / eps - 1e-12):
        raise InvalidArgument("sample points outside Y x (a / eps, 0)")
    X = _macro(eps, np.arange(nc), ybar)[:, :, None]
    XN = np.broadcast_to(eps * yN[None, None, :], (nc, len(ybar), len(yN)))
    vals = _call(field, L, X, XN)
    return UnfoldedField(eps, L, ybar, yN, np.array(vals))


def _pieces(breaks, lo, hi):
    b = np.asarray(breaks, float)
    b = b[(b > lo) & (b < hi)]
    return np.unique(np.concatenate([[lo], b, [hi]]))


def _composite(breaks, gauss):
    t, w = gauss01(gauss)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    return (lo + (hi - lo) * t).ravel(), ((hi - lo) * w).ravel()


def check_exact_integration(field, eps: float, a: float, *, L: float | None = None,
                            x_breaks=None, y_breaks=None, gauss: int = 4):
    """Both sides of ``int_{W x (a,0)} u = eps int_{W x Y x (a/eps, 0)} u_hat``.

    The left side is integrated directly; the right side samples ``u_hat``
    through :func:`unfold`, using that it is constant in ``xbar`` per cell.
    Breakpoints of the field's piecewise-polynomial structure default to the
    grid lines of a :class:`PlateField`; every cell boundary is added as well,
    so Gauss rules with ``gauss`` points are exact for bicubic fields.

    Returns ``(lhs, rhs, |lhs - rhs|)``.
    """
    if not -1.0 <= a < 0:
        raise InvalidArgument("need -1 <= a < 0")
    L = _field_width(field, L)
    nc = n_cells(L, eps)
    if isinstance(field, PlateField):
        x_breaks = field.grid.x if x_breaks is None else x_breaks
        y_breaks = field.grid.y if y_breaks is None else y_breaks
    x_breaks = np.append(np.asarray([] if x_breaks is None else x_breaks, float), 0.0)
    y_breaks = np.asarray([] if y_breaks is None else y_breaks, float)
    cell_edges = eps * (np.arange(nc + 1) - 0.5)

    # left side: direct quadrature over (-eps/2, L - eps/2), i.e. W up to a shift
    xb = np.concatenate([x_breaks, x_breaks - L, cell_edges])
    xq, wx = _composite(_pieces(xb, -eps / 2, L - eps / 2), gauss)
    yq, wy = _composite(_pieces(y_breaks, a, 0.0), gauss)
    lhs = float(wx @ _call(field, L, xq[:, None], yq[None, :]) @ wy)

    # right side: per cell the ybar breakpoints are the images of x_breaks
    yNq, wN = _composite(_pieces(y_breaks / eps, a / eps, 0.0), gauss)
    ext = np.concatenate([x_breaks - L, x_breaks, x_breaks + L])
    rhs = 0.0
    for k in range(nc):
        yb, wb = _composite(_pieces((ext - eps * k) / eps, -0.5, 0.5), gauss)
        u = unfold(_CellRestricted(field, k, L), eps, a, L=L, ybar=yb, yN=yNq)
        rhs += eps * (wb @ u.values[k] @ wN)  # |C_k| = eps
    rhs *= eps
    return lhs, float(rhs), float(abs(lhs - rhs))


class _CellRestricted:
    """Evaluate ``field`` on a single cell only (others return zero)."""

    def __init__(self, field, k, L):
        self.field, self.k, self.L = field, k, L

    def __call__(self, x, xn, deriv=(0, 0)):
        out = np.zeros(np.shape(x))
        out[self.k] = _call(self.field, self.L, x[self.k], xn[self.k], deriv)
        return out


def pulled_back(field: PlateField, spec: DomainSpec):
    """``v(x) = phi(Phi_eps(x))`` on ``Omega`` for a reference-domain ``phi``.

    Supports ``deriv`` in ``(0, 0), (1, 0), (0, 1)``.
    """

    def v(x, xn, deriv=(0, 0)):
        x, xn = np.broadcast_arrays(np.asarray(x, float), np.asarray(xn, float))
        h = _h_all(spec, x, xn, check=False)
        s = xn - h[0]
        if tuple(deriv) == (0, 0):
            return field(x, s)
        p = field.evaluate(x, s, ((1, 0), (0, 1)))
        if tuple(deriv) == (1, 0):
            return p[0] - p[1] * h[1]
        if tuple(deriv) == (0, 1):
            return p[1] * (1.0 - h[2])
        raise InvalidArgument(f"unsupported derivative {deriv}")

    return v


def _l2(f, wq, eps):
    return np.sqrt(eps * np.einsum("kij,i,j->", f * f, *wq))


def boundary_layer_error(spec: DomainSpec, v_eps, cellsol: CellSolution, v_limit, *,
                         depth: float = -2.0, orientation: int = -1, gauss: int = 24,
                         n_sub: int = 2, match_tol: float = 0.5,
                         subtract_limit: bool = False) -> float:
    """Relative L2 distance between the rescaled unfolded boundary layer and
    the cell-solution prediction.

    ``V_eps = v_hat - <v_hat(., 0)>_Y - <grad_y v_hat(., 0)>_Y . y`` is
    divided by ``eps^{3/2}`` and compared with
    ``orientation * (V - b_0) * d v_limit / dx_N (x, 0)`` at the macro point
    ``x = eps [xbar / eps] + eps ybar`` over ``W x Y x (depth, 0)``.  A
    per-cell multiple of ``y_N`` is fitted out by least squares first.  Both
    fields are callables ``f(x, x_N, deriv)`` on ``Omega``.

    The distance is normalised by the norm of the prediction; for a flat
    profile (no predicted layer) by the norm of ``d v_limit / dx_N (., 0)``
    over the window.

    The bulk of ``v_eps`` leaves a remainder of order ``eps^{1/2}`` (its
    curvature at the top seen through the ``eps^{3/2}`` scaling).  With
    ``subtract_limit`` the unfolding is applied to ``v_eps - v_limit``
    instead, which cancels that remainder to leading order.
    """
    if orientation not in (-1, 1):
        raise InvalidArgument("orientation must be +1 or -1")
    if depth >= 0:
        raise InvalidArgument("depth must be negative")
    eps, L = spec.eps, spec.L
    if depth < -1 / eps:
        raise InvalidArgument("window deeper than the unfolded domain")
    nc = n_cells(L, eps)
    _check_match(v_eps, v_limit, L, match_tol)
    if subtract_limit:
        v_eps = _Difference(v_eps, v_limit)

    yb, wb = gauss01(gauss, n_sub)
    yb = yb - 0.5
    tN, wN = gauss01(gauss, n_sub)
    yN, wN = depth * (1 - tN), -depth * wN
    shape = (nc, len(yb), len(yN))
    X = np.broadcast_to(_macro(eps, np.arange(nc), yb)[:, :, None], shape)
    XN = np.broadcast_to(eps * yN[None, None, :], shape)

    vhat = _call(v_eps, L, X, XN)
    # trace averages at y_N = 0
    x0 = _macro(eps, np.arange(nc), yb)
    trace = _call(v_eps, L, x0, 0.0) @ wb
    edges = eps * (np.arange(nc)[:, None] + np.array([-0.5, 0.5]))
    te = _call(v_eps, L, edges, 0.0)
    dy_bar = te[:, 1] - te[:, 0]  # <d/dybar v_hat>_Y exactly
    dy_N = eps * (_call(v_eps, L, x0, 0.0, (0, 1)) @ wb)
    V_eps = (vhat - trace[:, None, None] - dy_bar[:, None, None] * yb[None, :, None]
             - dy_N[:, None, None] * yN[None, None, :]) / eps**1.5

    dN = _call(v_limit, L, x0, 0.0, (0, 1))
    V = cellsol.evaluate(yb[:, None], yN[None, :]) - cellsol.mean
    pred = orientation * V[None] * dN[:, :, None]

    R = V_eps - pred
    Wq = wb[None, :, None] * wN[None, None, :]
    a = np.einsum("kij,ij->k", R * Wq, np.broadcast_to(yN, V.shape)) / (
        wb.sum() * (wN @ (yN * yN)))
    R = R - a[:, None, None] * yN[None, None, :]
    num = _l2(R, (wb, wN), eps)
    den = _l2(pred, (wb, wN), eps)
    if den == 0:
        # flat profile: no layer is predicted, measure against the scale of
        # the limit's normal derivative over the window instead
        den = np.sqrt(-depth * eps * np.sum(dN**2 @ wb))
        if den == 0:
            return 0.0 if num == 0 else float("inf")
    return float(num / den)


class _Difference:
    def __init__(self, f, g):
        self.f, self.g = f, g

    def __call__(self, x, xn, deriv=(0, 0)):
        if tuple(deriv) == (0, 0):
            return self.f(x, xn) - self.g(x, xn)
        return self.f(x, xn, deriv) - self.g(x, xn, deriv)


def _check_match(v_eps, v_limit, L, tol, n=48):
    """Both fields must describe the same normalised branch with aligned sign."""
    t, w = gauss01(4, n // 4)
    X, XN = np.meshgrid(L * t, -t, indexing="ij")
    Wq = np.outer(L * w, w)
    a, b = _call(v_eps, L, X, XN), _call(v_limit, L, X, XN)
    na, nb = np.sqrt(np.sum(Wq * a * a)), np.sqrt(np.sum(Wq * b * b))
    if na == 0 and nb == 0:
        return
    if na == 0 or nb == 0:
        raise InvalidArgument("one of the fields vanishes identically")
    if np.sum(Wq * a * b) <= 0:
        raise InvalidArgument("fields have opposite sign; align them first")
    if np.sqrt(np.sum(Wq * (a - b) ** 2)) > tol * nb:
        raise InvalidArgument("fields are not normalised alike")


def write_diagnostics(rows, path) -> None:
    """CSV of ``(eps, distance)`` pairs for the trend plot."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["eps", "distance"])
        for eps, dist in rows:
            wr.writerow([f"{eps:.17g}", f"{dist:.17g}"])
