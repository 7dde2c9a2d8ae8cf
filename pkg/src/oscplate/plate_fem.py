"""Bogner-Fox-Schmit (bicubic Hermite) plate elements on a structured grid.

Every node carries four unknowns ``(u, u_x, u_y, u_xy)``; the lateral
direction is periodic so column ``nx`` is identified with column 0.  Grid
rows may be non-uniform (``y_nodes``), which lets a perturbed-domain run put
a grid line exactly at ``x_N = -eps`` and refine the boundary layer.

Local numbering inside a cell: corner ``c`` in (0,0), (1,0), (0,1), (1,1)
order and unknown type ``t`` in (u, u_x, u_y, u_xy); local index ``4 c + t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidArgument

# derivative multi-indices (d/dx order, d/dy order) returned by the basis
DERIVS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
_CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))
# for each local dof: (1d function in x, 1d function in y); 1d functions are
# 0: value at left, 1: slope at left, 2: value at right, 3: slope at right
_LOCAL_1D = np.array([(2 * cx + (t & 1), 2 * cy + (t >> 1))
                      for cx, cy in _CORNERS for t in range(4)])


def hermite_1d(xi, h: float):
    """Cubic Hermite shape functions on a segment of length ``h``.

    Returns an array ``(4, 3) + xi.shape``: function index, derivative order
    (with respect to the physical coordinate), points.
    """
    xi = np.asarray(xi, dtype=float)
    x2, x3 = xi * xi, xi * xi * xi
    out = np.empty((4, 3) + xi.shape)
    out[0] = [1 - 3 * x2 + 2 * x3, (-6 * xi + 6 * x2) / h, (-6 + 12 * xi) / h**2]
    out[1] = [h * (xi - 2 * x2 + x3), 1 - 4 * xi + 3 * x2, (-4 + 6 * xi) / h]
    out[2] = [3 * x2 - 2 * x3, (6 * xi - 6 * x2) / h, (6 - 12 * xi) / h**2]
    out[3] = [h * (-x2 + x3), -2 * xi + 3 * x2, (-2 + 6 * xi) / h]
    return out


def cell_basis(hx: float, hy: float, xi, eta):
    """All 16 basis functions and their derivatives up to order two.

    ``xi, eta`` are local coordinates in [0, 1] (same shape).  Returns
    ``(16, 6) + xi.shape`` with derivative order following ``DERIVS``.
    """
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    hx1 = hermite_1d(xi, hx)
    hy1 = hermite_1d(eta, hy)
    fx = hx1[_LOCAL_1D[:, 0]]  # (16, 3, ...)
    fy = hy1[_LOCAL_1D[:, 1]]
    out = np.empty((16, 6) + xi.shape)
    for k, (i, j) in enumerate(DERIVS):
        out[:, k] = fx[:, i] * fy[:, j]
    return out


@dataclass(frozen=True)
class Grid:
    """Structured grid on ``(0, L) x (-1, 0)``, periodic in x.

    ``y_nodes`` (increasing, from -1 to 0) overrides the uniform spacing
    ``1 / ny``.
    """

    nx: int
    ny: int
    L: float = 1.0
    y_nodes: tuple[float, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidArgument("nx and ny must be positive")
        if self.y_nodes is not None:
            y = np.asarray(self.y_nodes, float)
            if len(y) != self.ny + 1:
                raise InvalidArgument("y_nodes must have ny + 1 entries")
            if abs(y[0] + 1) > 1e-14 or abs(y[-1]) > 1e-14 or np.any(np.diff(y) <= 0):
                raise InvalidArgument("y_nodes must increase from -1 to 0")

    @classmethod
    def layered(cls, L: float, nx: int, eps: float, *, layer_cells: int = 8,
                layer_depth: int = 2, coarse_h: float = 1 / 16,
                growth: float = 1.3) -> "Grid":
        """Grid with uniform rows of height ``eps / layer_cells`` on
        ``[-layer_depth * eps, 0]`` (so ``-eps`` is a grid line) and
        geometrically coarsening rows below, capped at ``coarse_h``."""
        if layer_depth < 1 or layer_cells < 1:
            raise InvalidArgument("layer_depth and layer_cells must be >= 1")
        top_depth = layer_depth * eps
        if top_depth >= 1:
            raise InvalidArgument("layer deeper than the domain")
        hf = eps / layer_cells
        steps = []
        h, total, rest = hf, 0.0, 1.0 - top_depth
        while total < rest - 1e-12:
            h = min(h * growth, coarse_h)
            steps.append(h)
            total += h
        steps = np.array(steps) * (rest / total)
        below = -top_depth - np.concatenate([[0.0], np.cumsum(steps)])[::-1]
        below[0] = -1.0
        top = -top_depth + hf * np.arange(1, layer_depth * layer_cells + 1)
        top[-1] = 0.0
        ys = np.concatenate([below, top])
        # pin the layer line exactly
        k = len(ys) - 1 - layer_cells
        ys[k] = -eps
        return cls(nx, len(ys) - 1, L, tuple(float(v) for v in ys))

    @cached_property
    def hx(self) -> float:
        return self.L / self.nx

    @cached_property
    def x(self) -> np.ndarray:
        """Node abscissae ``0..L`` (``nx + 1`` values; the last equals the first
        under periodic identification)."""
        return np.linspace(0.0, self.L, self.nx + 1)

    @cached_property
    def y(self) -> np.ndarray:
        if self.y_nodes is None:
            return np.linspace(-1.0, 0.0, self.ny + 1)
        return np.asarray(self.y_nodes, float)

    @cached_property
    def hy(self) -> np.ndarray:
        return np.diff(self.y)

    @property
    def n_nodes(self) -> int:
        return self.nx * (self.ny + 1)

    @property
    def n_dofs(self) -> int:
        return 4 * self.n_nodes

    def has_line(self, yv: float, tol: float = 1e-12) -> bool:
        return bool(np.any(np.abs(self.y - yv) <= tol))

    def node_dof(self, i, j, t):
        """Global index of unknown ``t`` at node ``(i mod nx, j)``."""
        return 4 * (np.asarray(j) * self.nx + np.mod(i, self.nx)) + np.asarray(t)

    @cached_property
    def cell_dofs(self) -> np.ndarray:
        """``(ny, nx, 16)`` global dof indices for each cell."""
        j, i = np.meshgrid(np.arange(self.ny), np.arange(self.nx), indexing="ij")
        out = np.empty((self.ny, self.nx, 16), dtype=np.int64)
        for c, (cx, cy) in enumerate(_CORNERS):
            for t in range(4):
                out[:, :, 4 * c + t] = self.node_dof(i + cx, j + cy, t)
        return out

    def locate(self, x, y):
        """Cell indices ``(i, j)`` and local coordinates of physical points."""
        x = np.mod(np.asarray(x, float), self.L)
        y = np.asarray(y, float)
        i = np.minimum((x / self.hx).astype(np.int64), self.nx - 1)
        xi = x / self.hx - i
        j = np.clip(np.searchsorted(self.y, y, side="right") - 1, 0, self.ny - 1)
        eta = (y - self.y[j]) / self.hy[j]
        return i, j, xi, eta


def basis_eval(grid: Grid, cell, local, dof: int, deriv=(0, 0)) -> float:
    """Value of one local basis function (or a derivative of order <= 2).

    ``cell = (i, j)`` column/row of the cell, ``local = (xi, eta)`` in [0,1]^2.
    """
    i, j = cell
    if not (0 <= i < grid.nx and 0 <= j < grid.ny):
        raise InvalidArgument(f"cell {cell} outside the grid")
    if not 0 <= dof < 16:
        raise InvalidArgument(f"local dof {dof} outside 0..15")
    deriv = tuple(deriv)
    if deriv not in DERIVS:
        raise InvalidArgument(f"unsupported derivative {deriv}")
    xi, eta = local
    if not (0 <= xi <= 1 and 0 <= eta <= 1):
        raise InvalidArgument("local coordinates must lie in [0, 1]^2")
    vals = cell_basis(grid.hx, grid.hy[j], xi, eta)
    return float(vals[dof, DERIVS.index(deriv)])


@dataclass(frozen=True)
class Intermediate:
    """Hinged plate: ``u = 0`` on top and bottom (energy space W22 ∩ W12_0)."""

    name = "intermediate"


@dataclass(frozen=True)
class DirichletOnW:
    """Clamped on the top edge ``W``, hinged on the bottom edge."""

    name = "dirichlet_on_w"


@dataclass(frozen=True)
class StrangeTerm:
    """Hinged space with the boundary energy ``sign * gamma * int_W (du/dy)^2``.

    ``sign = -1`` is the literal form of the limiting weak equation; ``+1``
    adds energy (Robin-type condition interpolating hinged and clamped).
    """

    gamma: float
    sign: int = -1
    name = "strange_term"

    def __post_init__(self):
        if self.gamma < 0:
            raise InvalidArgument("gamma must be non-negative")
        if self.sign not in (-1, 1):
            raise InvalidArgument("sign must be +1 or -1")


BCKind = Intermediate | DirichletOnW | StrangeTerm


def bc_from_dict(d: dict) -> BCKind:
    kind = d.get("kind", "intermediate")
    if kind == "intermediate":
        return Intermediate()
    if kind == "dirichlet_on_w":
        return DirichletOnW()
    if kind == "strange_term":
        return StrangeTerm(float(d.get("gamma", 0.0)), int(d.get("sign", -1)))
    raise InvalidArgument(f"unknown boundary condition kind {kind!r}")


@dataclass(frozen=True)
class DofMap:
    """Constraint bookkeeping: which global unknowns are eliminated."""

    n_dofs: int
    constrained: np.ndarray
    free: np.ndarray

    @property
    def n_free(self) -> int:
        return len(self.free)

    def expand(self, reduced):
        """Full coefficient vector(s) with zeros at constrained dofs."""
        reduced = np.asarray(reduced)
        full = np.zeros((self.n_dofs,) + reduced.shape[1:], dtype=reduced.dtype)
        full[self.free] = reduced
        return full


def build_dofmap(grid: Grid, bc: BCKind) -> DofMap:
    """Eliminate the boundary unknowns fixed by ``bc``.

    Hinged edges fix ``u`` and ``u_x`` at every node of the edge (the trace of
    a Hermite field along a grid line depends only on those); the clamped top
    edge additionally fixes ``u_y`` and ``u_xy``.
    """
    i = np.arange(grid.nx)
    cons = []
    for j in (0, grid.ny):
        cons += [grid.node_dof(i, j, 0), grid.node_dof(i, j, 1)]
    if isinstance(bc, DirichletOnW):
        cons += [grid.node_dof(i, grid.ny, 2), grid.node_dof(i, grid.ny, 3)]
    elif not isinstance(bc, (Intermediate, StrangeTerm)):
        raise InvalidArgument(f"unknown boundary condition {bc!r}")
    constrained = np.unique(np.concatenate(cons))
    mask = np.ones(grid.n_dofs, dtype=bool)
    mask[constrained] = False
    return DofMap(grid.n_dofs, constrained, np.flatnonzero(mask))


@dataclass
class PlateField:
    """A bicubic Hermite field ``u = sum_a coeffs[a] phi_a`` on ``grid``."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.grid.n_dofs,):
            raise InvalidArgument("coefficient vector does not match the grid")

    def __call__(self, x, y, deriv=(0, 0)):
        return self.evaluate(x, y, (deriv,))[0]

    def evaluate(self, x, y, derivs=DERIVS):
        """Stack of the requested derivatives at the points ``(x, y)``."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        shape = x.shape
        i, j, xi, eta = self.grid.locate(x.ravel(), y.ravel())
        idx = [DERIVS.index(tuple(d)) for d in derivs]
        out = np.zeros((len(idx), x.size))
        hy = self.grid.hy[j]
        # group by row so each call sees a single cell height
        for jj in np.unique(j):
            m = j == jj
            B = cell_basis(self.grid.hx, hy[m][0], xi[m], eta[m])[:, idx]
            c = self.coeffs[self.grid.cell_dofs[jj, i[m]]]  # (npts, 16)
            out[:, m] = np.einsum("adp,pa->dp", B, c)
        return out.reshape((len(idx),) + shape)


def interpolate(grid: Grid, f, fx, fy, fxy) -> PlateField:
    """Hermite interpolant from callables for ``u, u_x, u_y, u_xy``."""
    X, Y = np.meshgrid(grid.x[:-1], grid.y)
    c = np.empty(grid.n_dofs)
    for t, fn in enumerate((f, fx, fy, fxy)):
        c[t::4] = np.broadcast_to(fn(X, Y), X.shape).ravel()
    return PlateField(grid, c)
