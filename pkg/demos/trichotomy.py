"""The spectral trichotomy on the oscillating plate.

The top boundary is x_N = eps^alpha b(x/eps).  As eps -> 0 the first
eigenvalue tends to the hinged value (alpha > 3/2), the clamped value
(alpha < 3/2) or, at alpha = 3/2, to the Robin value with the strange term
gamma.  Each solve runs on a single period (0, eps), which gives the same
first eigenvalue as the full plate because the domain is eps-periodic.

    python demos/trichotomy.py
"""
from oscplate import ExperimentConfig
from oscplate.experiments import run_trichotomy

cfg = ExperimentConfig(eps_list=[1 / 8, 1 / 16, 1 / 32, 1 / 64], period_cell=True)
table = run_trichotomy(cfg)

print(f"{'alpha':>6}{'eps':>10}  {'limit':<16}{'lambda_eps':>12}{'lambda_lim':>12}{'gap':>10}")
for alpha, eps, _, label, lam, lim, gap in table.rows:
    print(f"{alpha:6g}{eps:10.5f}  {label:<16}{lam:12.4f}{lim:12.4f}{gap:10.4f}")
print()
for line in table.summary:
    print(line)
print("PASS" if table.ok else "FAIL")
