"""Limit spectra on the flat plate: FEM against the 1D Fourier oracle.

Three boundary conditions on the top edge W: hinged (intermediate),
clamped (Dirichlet on W) and the Robin-type condition carrying the strange
term.  The Robin values sit strictly between the other two.

    python demos/limit_spectrum.py
"""
import numpy as np

from oscplate import Profile
from oscplate.assembly import assemble_limit
from oscplate.cell import gamma_energy, solve_cell
from oscplate.eigensolve import smallest_eigenpairs
from oscplate.oracle1d import spectrum_values
from oscplate.plate_fem import DirichletOnW, Grid, Intermediate, StrangeTerm

gamma = gamma_energy(solve_cell(Profile((0.2, 0.2))))
grid = Grid(16, 16)
print(f"grid {grid.nx}x{grid.ny}, gamma = {gamma:.10f}\n")
print(f"{'condition':<22}{'FEM':>14}{'oracle':>14}{'rel err':>11}")
for name, bc in [("hinged", Intermediate()), ("clamped", DirichletOnW()),
                 ("robin (gamma, +1)", StrangeTerm(gamma, 1))]:
    fem = smallest_eigenpairs(assemble_limit(grid, bc), 5, 1e-8).eigenvalues
    ref = spectrum_values(bc, 1.0, 5)
    for i, (a, b) in enumerate(zip(fem, ref)):
        label = name if i == 0 else ""
        print(f"{label:<22}{a:14.6f}{b:14.6f}{abs(a - b) / b:11.2e}")
    print()

# closed form for the hinged plate: ((n pi)^2 + (2 pi k)^2)^2 + 1
print("hinged lambda_1 closed form:", np.pi ** 4 + 1)
