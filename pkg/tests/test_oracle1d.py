import numpy as np
import pytest

from oscplate.assembly import assemble_limit
from oscplate.eigensolve import smallest_eigenpairs
from oscplate.errors import InvalidArgument
from oscplate.oracle1d import (CLAMPED, HINGED, ROBIN, ModeProblem, char_det,
                               hinged_closed_form, limit_spectrum, mode_eigenvalues,
                               spectrum_values)
from oscplate.plate_fem import DirichletOnW, Grid, Intermediate, StrangeTerm

CLAMPED_1 = 238.72106753111663
GAMMA = 0.24 * np.pi ** 3


@pytest.mark.parametrize("mu", [0.0, 2 * np.pi, 4 * np.pi, 13.0])
def test_hinged_roots_match_closed_form(mu):
    got = mode_eigenvalues(ModeProblem(mu, HINGED), 4)
    ref = [hinged_closed_form(mu, n) for n in range(1, 5)]
    assert np.allclose(got, ref, rtol=1e-12)


def test_clamped_first_value():
    assert mode_eigenvalues(ModeProblem(0.0, CLAMPED), 1)[0] == pytest.approx(CLAMPED_1,
                                                                             rel=1e-12)


def test_robin_limits():
    lam0 = mode_eigenvalues(ModeProblem(0.0, ROBIN, 1e-8), 3)
    assert np.allclose(lam0, [hinged_closed_form(0, n) for n in (1, 2, 3)], rtol=1e-8)
    lam_inf = mode_eigenvalues(ModeProblem(0.0, ROBIN, 1e6), 3)
    clamped = mode_eigenvalues(ModeProblem(0.0, CLAMPED), 3)
    assert np.allclose(lam_inf, clamped, rtol=1e-4)


def test_robin_reference_value():
    assert mode_eigenvalues(ModeProblem(0.0, ROBIN, GAMMA), 1)[0] == pytest.approx(
        171.008, abs=1e-3)


@pytest.mark.parametrize("mu", [0.0, 2 * np.pi])
def test_positive_sign_interlaces_hinged_and_clamped(mu):
    h = mode_eigenvalues(ModeProblem(mu, HINGED), 5)
    c = mode_eigenvalues(ModeProblem(mu, CLAMPED), 5)
    r = mode_eigenvalues(ModeProblem(mu, ROBIN, GAMMA), 5)
    assert np.all(h < r) and np.all(r < c)
    assert np.all(c[:-1] < h[1:])


@pytest.mark.parametrize("mu", [0.0, 2 * np.pi])
def test_negative_sign_interlaces_below_hinged(mu):
    h = mode_eigenvalues(ModeProblem(mu, HINGED), 5)
    r = mode_eigenvalues(ModeProblem(mu, ROBIN, 1.0, -1), 5)
    assert np.all(r < h)
    assert np.all(h[:-1] < r[1:])


def test_monotone_in_gamma():
    gammas = [0.1, 1.0, 2.0, 5.0, 10.0, 100.0]  # gamma = 3 puts a root at 1
    for sign in (1, -1):
        lam = [mode_eigenvalues(ModeProblem(0.0, ROBIN, g, sign), 1)[0] for g in gammas]
        assert np.all(sign * np.diff(lam) > 0)


def test_negative_sign_can_go_below_zero():
    lam = mode_eigenvalues(ModeProblem(0.0, ROBIN, GAMMA, -1), 1)[0]
    assert lam == pytest.approx(-763.78, abs=0.01)
    fem = smallest_eigenpairs(assemble_limit(Grid(4, 48), StrangeTerm(GAMMA, -1)),
                              1, 1e-8, sigma=-2000.0).eigenvalues[0]
    assert fem == pytest.approx(lam, rel=1e-4)


def test_char_det_rejects_mixed_ranges():
    p = ModeProblem(0.0, ROBIN, 1.0, -1)
    with pytest.raises(InvalidArgument):
        char_det(p, np.array([0.5, 2.0]))


def test_hinged_limit_spectrum_ordering():
    entries = limit_spectrum(Intermediate(), 1.0, 4)
    assert [(e.k, e.n, e.multiplicity) for e in entries] == [(0, 1, 1), (0, 2, 1), (1, 1, 2)]
    vals = spectrum_values(Intermediate(), 1.0, 4)
    p4 = np.pi ** 4
    assert np.allclose(vals, [p4 + 1, 16 * p4 + 1, 25 * p4 + 1, 25 * p4 + 1], rtol=1e-12)
    assert vals[2] == pytest.approx(2436.227, abs=1e-3)


def test_spectrum_sorted_and_counted():
    for bc in (Intermediate(), DirichletOnW(), StrangeTerm(GAMMA, 1)):
        v = spectrum_values(bc, 1.0, 9)
        assert len(v) == 9 and np.all(np.diff(v) >= 0)


@pytest.mark.parametrize("bc", [DirichletOnW(), StrangeTerm(GAMMA, 1)])
def test_fem_cross_check(bc):
    fem = smallest_eigenpairs(assemble_limit(Grid(16, 16), bc), 5, 1e-8).eigenvalues
    ref = spectrum_values(bc, 1.0, 5)
    assert np.all(np.abs(fem - ref) / ref < 5e-4)


def test_argument_checks():
    with pytest.raises(InvalidArgument):
        ModeProblem(0.0, "free")
    with pytest.raises(InvalidArgument):
        ModeProblem(0.0, ROBIN, -1.0)
    with pytest.raises(InvalidArgument):
        ModeProblem(0.0, ROBIN, 1.0, 2)
    with pytest.raises(InvalidArgument):
        mode_eigenvalues(ModeProblem(0.0), 11)
    with pytest.raises(InvalidArgument):
        limit_spectrum(Intermediate(), 1.0, 0)
