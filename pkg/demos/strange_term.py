"""The strange term gamma from the cell problem.

The cell function V is biharmonic on the periodic half-strip, equal to the
profile b on top with vanishing second normal derivative.  gamma is its
Hessian energy; a boundary flux formula gives the same number, and a finite
difference solve on a truncated strip checks both independently.

    python demos/strange_term.py
"""
import numpy as np

from oscplate import Profile
from oscplate.cell import gamma_energy, gamma_flux, solve_cell, solve_cell_truncated

b = Profile((0.2, 0.2))  # b(y) = 0.2 (1 + cos 2 pi y)
sol = solve_cell(b)
print("modes (k, A, B) with c_k(t) = (A + B t) exp(2 pi |k| t):")
for m in sol.modes:
    print(f"  k = {m.k:+d}  A = {m.A.real:.4f}  B = {m.B.real:.6f}")

ge, gf = gamma_energy(sol), gamma_flux(sol)
tr = solve_cell_truncated(b)
print(f"\ngamma (energy)    = {ge:.15f}")
print(f"gamma (flux)      = {gf:.15f}")
print(f"gamma (truncated) = {tr.gamma:.15f}  [depth {tr.depth}, n = {tr.n}]")
print(f"closed form 0.24 pi^3 = {0.24 * np.pi ** 3:.15f}")

# the layer decays like exp(2 pi t): almost nothing is left one period down
y = np.linspace(-0.5, 0.5, 201)
for t in (0.0, -0.25, -0.5, -1.0):
    osc = np.ptp(sol.evaluate(y, t))
    print(f"oscillation of V at t = {t:5.2f}: {osc:.3e}")

# quadratic in the amplitude, blind to constants and shifts
for label, p in [("2 b", Profile((0.4, 0.4), check_range=False)),
                 ("b + 0.05", Profile((0.25, 0.2))),
                 ("b(y + 0.3)", b.shifted(0.3))]:
    print(f"gamma({label}) / gamma(b) = {gamma_energy(solve_cell(p)) / ge:.12f}")
