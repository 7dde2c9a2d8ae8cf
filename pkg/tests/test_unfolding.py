import csv

import numpy as np
import pytest

from oscplate import DomainSpec, Profile
from oscplate.cell import solve_cell
from oscplate.errors import InvalidArgument
from oscplate.plate_fem import Grid, PlateField
from oscplate.unfolding import (boundary_layer_error, cell_index, check_exact_integration,
                                n_cells, pulled_back, unfold, write_diagnostics)

EPS = 1 / 8


def test_n_cells():
    assert n_cells(1.0, 1 / 16) == 16
    with pytest.raises(InvalidArgument):
        n_cells(1.0, 0.3)
    with pytest.raises(InvalidArgument):
        n_cells(1.0, 0.0)


def test_cell_index_wraps():
    # Y = (-1/2, 1/2): cell 0 covers (-eps/2, eps/2) modulo L
    idx = cell_index([0.0, 0.06, 0.07, 0.99, 1.0], EPS, 1.0)
    assert list(idx) == [0, 0, 1, 0, 0]


def test_unfold_constant():
    u = unfold(lambda x, xn: np.ones_like(x), EPS, -0.5, L=1.0)
    assert u.values.shape == (8, 16, 32)
    assert np.all(u.values == 1.0)


def test_unfold_vertical_coordinate():
    u = unfold(lambda x, xn: xn, EPS, -0.5, L=1.0)
    assert np.allclose(u.values, EPS * u.yN[None, None, :], atol=1e-15)


def test_unfold_fast_oscillation():
    u = unfold(lambda x, xn: np.sin(2 * np.pi * x / EPS) + 0 * xn, EPS, -0.5, L=1.0)
    ref = np.sin(2 * np.pi * u.ybar)
    assert np.allclose(u.values, ref[None, :, None], atol=1e-12)


def test_unfold_is_piecewise_constant_in_xbar():
    u = unfold(lambda x, xn: x * x + xn, EPS, -0.25, L=1.0)
    assert np.array_equal(u.at(0.27), u.at(0.30))
    assert not np.array_equal(u.at(0.30), u.at(0.32))
    assert u.cell_of(0.30) == 2 and u.centers[2] == pytest.approx(0.25)


def test_unfold_rejects_points_outside():
    with pytest.raises(InvalidArgument):
        unfold(lambda x, xn: x, EPS, -0.5, L=1.0, yN=[0.1])
    with pytest.raises(InvalidArgument):
        unfold(lambda x, xn: x, EPS, 0.5, L=1.0)
    with pytest.raises(InvalidArgument):
        unfold(lambda x, xn: x, EPS, -0.5)


def test_integration_identity_for_macro_coordinate():
    lhs, rhs, diff = check_exact_integration(lambda x, xn: x + 0 * xn, EPS, -1.0, L=1.0)
    assert lhs == pytest.approx(0.5, abs=1e-14)
    assert diff < 1e-14


@pytest.mark.parametrize("eps", [1 / 4, 1 / 8, 1 / 16])
def test_integration_identity_for_random_bicubic(rng, eps):
    g = Grid(6, 5)
    f = PlateField(g, rng.standard_normal(g.n_dofs))
    lhs, rhs, diff = check_exact_integration(f, eps, -0.6)
    assert diff <= 1e-10 * max(1.0, abs(lhs))


def test_pulled_back_flat_profile_is_identity(rng):
    g = Grid(4, 4)
    f = PlateField(g, rng.standard_normal(g.n_dofs))
    v = pulled_back(f, DomainSpec(1.0, EPS, 1.5, Profile((0.0,))))
    x, xn = np.meshgrid(np.linspace(0, 0.99, 7), np.linspace(-1, 0, 5))
    assert np.allclose(v(x, xn), f(x, xn), atol=1e-14)
    assert np.allclose(v(x, xn, (0, 1)), f(x, xn, (0, 1)), atol=1e-13)


class _Limit:
    """``v(x, x_N) = sin(pi x_N) w(x)`` with ``w = 1 + c cos(2 pi x)``."""

    def __init__(self, c=0.0):
        self.c = c

    def _w(self, x, d=0):
        k = 2 * np.pi
        return (1 + self.c * np.cos(k * x)) if d == 0 else -self.c * k * np.sin(k * x)

    def __call__(self, x, xn, deriv=(0, 0)):
        if deriv == (0, 0):
            return np.sin(np.pi * xn) * self._w(x)
        if deriv == (1, 0):
            return np.sin(np.pi * xn) * self._w(x, 1)
        return np.pi * np.cos(np.pi * xn) * self._w(x)


class _Planted:
    """Limit field plus the predicted boundary layer, exactly."""

    def __init__(self, lim, cellsol, eps, orientation=-1):
        self.lim, self.cell, self.eps, self.s = lim, cellsol, eps, orientation

    def __call__(self, x, xn, deriv=(0, 0)):
        e, c = self.eps, self.cell
        y, t = x / e, xn / e
        dN = np.pi * self.lim._w(x)
        V = c.evaluate(y, t) - c.mean
        if deriv == (0, 0):
            return self.lim(x, xn) + self.s * e**1.5 * V * dN
        if deriv == (0, 1):
            return self.lim(x, xn, deriv) + self.s * e**0.5 * c.evaluate(y, t, (0, 1)) * dN
        raise InvalidArgument("unsupported derivative")


def _spec(profile, eps=EPS):
    return DomainSpec(1.0, eps, 1.5, profile)


def test_planted_layer_recovered(cosine_profile):
    cs = solve_cell(cosine_profile)
    lim = _Limit()
    d = boundary_layer_error(_spec(cosine_profile), _Planted(lim, cs, EPS), cs, lim,
                             subtract_limit=True)
    assert d < 1e-10


def test_planted_layer_wrong_orientation_detected(cosine_profile):
    cs = solve_cell(cosine_profile)
    lim = _Limit()
    d = boundary_layer_error(_spec(cosine_profile), _Planted(lim, cs, EPS), cs, lim,
                             orientation=1, subtract_limit=True)
    assert d == pytest.approx(2.0, rel=1e-8)


def test_planted_varying_weight_error_shrinks(cosine_profile):
    # a varying weight leaves an O(eps^{1/2}) remainder from its cell averages
    cs = solve_cell(cosine_profile)
    lim = _Limit(0.5)
    d = [boundary_layer_error(_spec(cosine_profile, e), _Planted(lim, cs, e), cs, lim,
                              subtract_limit=True) for e in (1 / 8, 1 / 32)]
    assert d[1] < d[0] < 0.5


def test_flat_profile_gives_zero_distance():
    flat = Profile((0.0,))
    cs = solve_cell(flat)
    lim = _Limit()
    assert boundary_layer_error(_spec(flat), lim, cs, lim, subtract_limit=True) == 0.0
    # without subtraction only the bulk curvature remainder is left, and it decays
    d = [boundary_layer_error(_spec(flat, e), lim, cs, lim) for e in (1 / 8, 1 / 32)]
    assert d[1] < d[0] / 4


def test_mean_slope_is_fitted_out(cosine_profile):
    lim = _Limit()
    planted = _Planted(lim, solve_cell(cosine_profile), EPS)
    a = boundary_layer_error(_spec(cosine_profile), planted, solve_cell(cosine_profile),
                             lim, subtract_limit=True)
    b = boundary_layer_error(_spec(cosine_profile), planted,
                             solve_cell(cosine_profile, mean_slope=0.7), lim,
                             subtract_limit=True)
    assert abs(a - b) < 1e-10


def test_sign_mismatch_rejected(cosine_profile):
    cs = solve_cell(cosine_profile)
    lim = _Limit()
    neg = lambda x, xn, deriv=(0, 0): -lim(x, xn, deriv)  # noqa: E731
    with pytest.raises(InvalidArgument):
        boundary_layer_error(_spec(cosine_profile), neg, cs, lim)


def test_normalisation_mismatch_rejected(cosine_profile):
    cs = solve_cell(cosine_profile)
    lim = _Limit()
    big = lambda x, xn, deriv=(0, 0): 3 * lim(x, xn, deriv)  # noqa: E731
    with pytest.raises(InvalidArgument):
        boundary_layer_error(_spec(cosine_profile), big, cs, lim)


def test_argument_checks(cosine_profile):
    cs = solve_cell(cosine_profile)
    lim = _Limit()
    with pytest.raises(InvalidArgument):
        boundary_layer_error(_spec(cosine_profile), lim, cs, lim, orientation=0)
    with pytest.raises(InvalidArgument):
        boundary_layer_error(_spec(cosine_profile), lim, cs, lim, depth=1.0)
    with pytest.raises(InvalidArgument):
        boundary_layer_error(_spec(cosine_profile), lim, cs, lim, depth=-100.0)


def test_write_diagnostics(tmp_path):
    p = tmp_path / "d.csv"
    write_diagnostics([(0.125, 0.7), (0.0625, 0.3)], p)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["eps", "distance"]
    assert float(rows[2][1]) == 0.3
