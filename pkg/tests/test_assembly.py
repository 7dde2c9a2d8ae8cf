import numpy as np
import pytest
import scipy.sparse as sp

from oscplate import DomainSpec, Profile
from oscplate.assembly import (assemble_limit, assemble_perturbed, dump_coo, gauss01,
                               perturbed_row_matrices)
from oscplate.eigensolve import smallest_eigenpairs
from oscplate.errors import InvalidArgument, NumericalFailure
from oscplate.oracle1d import ROBIN, ModeProblem, mode_eigenvalues
from oscplate.plate_fem import DirichletOnW, Grid, Intermediate, StrangeTerm

HINGED_1 = np.pi ** 4 + 1


def _lam(pencil, k=1):
    return smallest_eigenpairs(pencil, k, 1e-8).eigenvalues


def _period_grid(eps, n_per=16, layer_cells=16):
    return Grid.layered(eps, n_per, eps, layer_cells=layer_cells, coarse_h=1 / 16)


def test_gauss_rule_integrates_polynomials():
    t, w = gauss01(3, n_sub=4)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.dot(w, t ** 5) == pytest.approx(1 / 6, abs=1e-15)


def test_limit_pencil_symmetric_and_positive():
    p = assemble_limit(Grid(8, 8), Intermediate())
    assert abs(p.Q - p.Q.T).max() == 0
    assert abs(p.M - p.M.T).max() == 0
    assert np.all(np.linalg.eigvalsh(p.M.toarray()) > 0)


def test_zero_strange_term_equals_intermediate():
    g = Grid(8, 8)
    a = assemble_limit(g, Intermediate())
    b = assemble_limit(g, StrangeTerm(0.0))
    assert abs(a.Q - b.Q).max() <= 1e-14 * abs(a.Q).max()
    assert abs(a.M - b.M).max() == 0


def test_first_eigenvalue_hinged_and_clamped():
    g = Grid(16, 16)
    assert _lam(assemble_limit(g, Intermediate()))[0] == pytest.approx(HINGED_1, rel=1e-5)
    assert _lam(assemble_limit(g, DirichletOnW()))[0] == pytest.approx(238.72106753111663,
                                                                      rel=1e-5)


@pytest.mark.parametrize("sign", [1, -1])
def test_strange_term_matches_oracle(sign):
    gamma = 1.0
    fem = _lam(assemble_limit(Grid(4, 24), StrangeTerm(gamma, sign)))[0]
    ref = mode_eigenvalues(ModeProblem(0.0, ROBIN, gamma, sign), 1)[0]
    assert fem == pytest.approx(ref, rel=1e-6)


def test_negative_gamma_rejected():
    with pytest.raises(InvalidArgument):
        StrangeTerm(-1.0)


def test_flat_profile_reproduces_limit_pencil():
    eps = 0.125
    g = Grid.layered(1.0, 64, eps, layer_cells=4, coarse_h=1 / 8)
    spec = DomainSpec(1.0, eps, 1.5, Profile((0.0,)))
    a = assemble_perturbed(spec, g)
    b = assemble_limit(g, Intermediate())
    scale = abs(b.Q).max()
    assert abs(a.Q - b.Q).max() <= 1e-13 * scale
    assert abs(a.M - b.M).max() <= 1e-13 * abs(b.M).max()


def test_perturbed_pencil_properties(cosine_profile):
    eps = 0.125
    spec = DomainSpec(eps, eps, 1.5, cosine_profile)
    p = assemble_perturbed(spec, _period_grid(eps))
    assert abs(p.Q - p.Q.T).max() == 0
    lo, hi = p.meta["det_range"]
    assert 0.5 <= lo <= hi <= 2.0
    lam = _lam(p, 3)
    assert np.all(lam >= 1.0)


def test_perturbed_eigenvalue_between_hinged_and_clamped(cosine_profile):
    eps = 0.125
    lam = _lam(assemble_perturbed(DomainSpec(eps, eps, 1.5, cosine_profile),
                                  _period_grid(eps)))[0]
    assert HINGED_1 < lam < 238.72106753111663


def test_quadrature_refinement_is_stable(cosine_profile):
    eps = 0.1
    spec = DomainSpec(eps, eps, 1.5, cosine_profile)
    g = _period_grid(eps)
    a = _lam(assemble_perturbed(spec, g, n_sub=4))[0]
    b = _lam(assemble_perturbed(spec, g, n_sub=8))[0]
    assert abs(a - b) / b < 1e-6


def test_supercritical_trend_towards_hinged(cosine_profile):
    gaps = []
    for eps in (1 / 8, 1 / 16, 1 / 32):
        spec = DomainSpec(eps, eps, 2.0, cosine_profile)
        gaps.append(_lam(assemble_perturbed(spec, _period_grid(eps)))[0] - HINGED_1)
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_grid_without_layer_line_rejected(cosine_profile):
    spec = DomainSpec(1.0, 0.125, 1.5, cosine_profile)
    with pytest.raises(InvalidArgument):
        assemble_perturbed(spec, Grid(64, 6))


def test_coarse_grid_rejected(cosine_profile):
    spec = DomainSpec(1.0, 0.125, 1.5, cosine_profile)
    with pytest.raises(InvalidArgument):
        assemble_perturbed(spec, Grid.layered(1.0, 32, 0.125))


def test_width_mismatch_rejected(cosine_profile):
    spec = DomainSpec(1.0, 0.125, 1.5, cosine_profile)
    with pytest.raises(InvalidArgument):
        assemble_perturbed(spec, _period_grid(0.125))


def test_determinant_bound_enforced(cosine_profile):
    eps = 0.125
    spec = DomainSpec(eps, eps, 1.0, cosine_profile)
    g = _period_grid(eps)
    j = g.ny - 1
    with pytest.raises(NumericalFailure):
        perturbed_row_matrices(spec, g, j, det_bound=1.001)


def test_dump_coo_roundtrip(tmp_path):
    A = sp.random(7, 5, density=0.4, random_state=1, format="csr")
    path = tmp_path / "a.coo"
    dump_coo(A, path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"% 7 5 {A.nnz}"
    r, c, v = np.loadtxt(lines[1:], unpack=True, ndmin=2)
    B = sp.coo_matrix((v, (r.astype(int), c.astype(int))), shape=(7, 5))
    assert abs(A - B).max() == 0
