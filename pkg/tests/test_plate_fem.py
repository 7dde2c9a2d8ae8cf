import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscplate import (DirichletOnW, Grid, Intermediate, InvalidArgument, PlateField,
                      StrangeTerm, build_dofmap, interpolate)
from oscplate.plate_fem import _CORNERS, basis_eval, bc_from_dict, cell_basis


def test_cardinality():
    g = Grid(3, 2, L=1.5)
    for c, (cx, cy) in enumerate(_CORNERS):
        for c2, corner in enumerate(_CORNERS):
            v = basis_eval(g, (1, 1), corner, 4 * c, (0, 0))
            assert v == pytest.approx(1.0 if c == c2 else 0.0, abs=1e-15)
        # the slope dofs are cardinal for their own derivative
        assert basis_eval(g, (0, 0), (cx, cy), 4 * c + 1, (1, 0)) == pytest.approx(1.0)
        assert basis_eval(g, (0, 0), (cx, cy), 4 * c + 2, (0, 1)) == pytest.approx(1.0)
        assert basis_eval(g, (0, 0), (cx, cy), 4 * c + 3, (1, 1)) == pytest.approx(1.0)


def test_partition_of_unity(rng):
    xi, eta = rng.uniform(0, 1, (2, 100))
    B = cell_basis(0.3, 0.2, xi, eta)
    assert np.allclose(B[0::4, 0].sum(axis=0), 1.0, atol=1e-15)


def test_basis_eval_errors():
    g = Grid(2, 2)
    with pytest.raises(InvalidArgument):
        basis_eval(g, (0, 0), (0.5, 0.5), 16)
    with pytest.raises(InvalidArgument):
        basis_eval(g, (0, 0), (1.5, 0.5), 0)
    with pytest.raises(InvalidArgument):
        basis_eval(g, (0, 0), (0.5, 0.5), 0, (2, 1))


def test_bicubic_reproduction():
    """x^3 y^3 is reproduced exactly, including its Hessian (non-periodic
    function, so check a single interior cell)."""
    g = Grid(4, 4, L=1.0)
    f = interpolate(g, lambda x, y: x**3 * y**3, lambda x, y: 3 * x**2 * y**3,
                    lambda x, y: 3 * x**3 * y**2, lambda x, y: 9 * x**2 * y**2)
    x = np.linspace(0.26, 0.49, 9)
    y = np.linspace(-0.74, -0.51, 9)
    X, Y = np.meshgrid(x, y)
    V = f.evaluate(X, Y)
    exact = [X**3 * Y**3, 3 * X**2 * Y**3, 3 * X**3 * Y**2, 6 * X * Y**3,
             9 * X**2 * Y**2, 6 * X**3 * Y]
    for v, e in zip(V, exact):
        assert np.max(np.abs(v - e)) < 1e-13


@pytest.mark.parametrize("bc,free", [(Intermediate(), 64), (DirichletOnW(), 56),
                                     (StrangeTerm(3.0), 64), (StrangeTerm(0.0, 1), 64)])
def test_dof_counts(bc, free):
    dm = build_dofmap(Grid(4, 4), bc)
    assert dm.n_dofs == 80 and dm.n_free == free


def _random_field(grid, bc, rng):
    dm = build_dofmap(grid, bc)
    return PlateField(grid, dm.expand(rng.standard_normal(dm.n_free)))


def test_c1_continuity(rng):
    g = Grid.layered(1.0, 8, 0.125, layer_cells=4)
    f = _random_field(g, Intermediate(), rng)
    d = 1e-12
    # vertical interior edges
    xe = g.x[1:-1][rng.integers(0, g.nx - 1, 20)]
    y = rng.uniform(-1, 0, 20)
    for deriv in ((0, 0), (1, 0), (0, 1)):
        jump = f(xe + d, y, deriv) - f(xe - d, y, deriv)
        assert np.max(np.abs(jump)) < 1e-8 * (1 + np.max(np.abs(f(xe, y, deriv))))
    # horizontal interior edges
    ye = g.y[1:-1][rng.integers(0, g.ny - 1, 20)]
    x = rng.uniform(0, 1, 20)
    for deriv in ((0, 0), (1, 0), (0, 1)):
        jump = f(x, ye + d, deriv) - f(x, ye - d, deriv)
        assert np.max(np.abs(jump)) < 1e-8 * (1 + np.max(np.abs(f(x, ye, deriv))))


def test_edge_values_agree_exactly(rng):
    """Both neighbouring cells give the same trace on a shared edge."""
    g = Grid(5, 3)
    f = _random_field(g, Intermediate(), rng)
    y = rng.uniform(-1, 0, 30)
    x0 = g.x[2]
    i, j, xi, eta = g.locate(np.full(30, x0), y)
    assert np.all(i == 2) and np.all(xi == 0)
    # evaluate from the left neighbour at xi = 1
    vals = []
    for k in range(30):
        B = cell_basis(g.hx, g.hy[j[k]], 1.0, eta[k])[:, :3]
        vals.append(B.T @ f.coeffs[g.cell_dofs[j[k], 1]])
    vals = np.array(vals).T
    for t, deriv in enumerate(((0, 0), (1, 0), (0, 1))):
        assert np.max(np.abs(vals[t] - f(np.full(30, x0), y, deriv))) < 1e-12


@pytest.mark.parametrize("bc", [Intermediate(), DirichletOnW()])
def test_traces(bc, rng):
    g = Grid(6, 5, L=2.0)
    f = _random_field(g, bc, rng)
    x = np.linspace(0, 2, 301)
    for yv in (0.0, -1.0):
        assert np.max(np.abs(f(x, np.full_like(x, yv)))) < 1e-12
    if isinstance(bc, DirichletOnW):
        assert np.max(np.abs(f(x, np.zeros_like(x), (0, 1)))) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_periodicity(nx, ny, seed):
    g = Grid(nx, ny, L=0.7)
    f = PlateField(g, np.random.default_rng(seed).standard_normal(g.n_dofs))
    y = np.linspace(-1, 0, 13)
    for deriv in ((0, 0), (1, 0), (0, 1), (1, 1)):
        a = f(np.zeros_like(y), y, deriv)
        b = f(np.full_like(y, 0.7 * (1 - 1e-15)), y, deriv)
        assert np.max(np.abs(a - b)) < 1e-10 * (1 + np.max(np.abs(a)))


def test_layered_grid_has_line():
    g = Grid.layered(1.0, 32, 1 / 16, layer_cells=8)
    assert g.has_line(-1 / 16) and g.y[0] == -1 and g.y[-1] == 0
    assert np.allclose(g.hy[-16:], 1 / 128)
    assert np.all(np.diff(g.y) > 0)


def test_grid_validation():
    with pytest.raises(InvalidArgument):
        Grid(0, 3)
    with pytest.raises(InvalidArgument):
        Grid(2, 2, y_nodes=(-1.0, -0.2, -0.5))
    with pytest.raises(InvalidArgument):
        PlateField(Grid(2, 2), np.zeros(5))


def test_bc_from_dict():
    assert bc_from_dict({"kind": "strange_term", "gamma": 2.0, "sign": 1}) == StrangeTerm(2.0, 1)
    assert bc_from_dict({}) == Intermediate()
    with pytest.raises(InvalidArgument):
        bc_from_dict({"kind": "free"})
    with pytest.raises(InvalidArgument):
        StrangeTerm(-1.0)
    with pytest.raises(InvalidArgument):
        StrangeTerm(1.0, 0)
