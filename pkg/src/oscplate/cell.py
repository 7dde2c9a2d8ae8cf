"""Microscopic cell problem on the periodic half-strip and the constant gamma.

The cell function ``V`` is biharmonic on ``Y x (-inf, 0)``, 1-periodic in
``y``, with ``V(y, 0) = b(y)`` and ``d^2 V / dt^2 (y, 0) = 0``, and has square
integrable Hessian.  Expanding ``V = sum_k c_k(t) exp(2 pi i k y)`` each mode
solves ``(d^2/dt^2 - mu^2)^2 c_k = 0`` with ``mu = 2 pi |k|``; the decaying
solutions are ``(A + B t) exp(mu t)``.  The zero mode is affine,
``c_0 = b_0 + a t``, with free slope ``a`` (fixed to 0 here).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidArgument, NumericalFailure
from .profile import Profile, fourier


@dataclass(frozen=True)
class Mode:
    k: int
    mu: float
    A: complex
    B: complex

    def derivative(self, t, order: int = 0):
        """``d^order c_k / dt^order`` at ``t`` (order 0..4)."""
        t = np.asarray(t, float)
        mu, A, B = self.mu, self.A, self.B
        # d^n [(A + B t) e^{mu t}] = (mu^n A + n mu^(n-1) B + mu^n B t) e^{mu t}
        c0 = mu**order * A + (order * mu ** (order - 1) * B if order else 0)
        return (c0 + mu**order * B * t) * np.exp(mu * t)


@dataclass(frozen=True)
class CellSolution:
    profile: Profile
    modes: tuple[Mode, ...]   # k != 0 only
    mean: float               # b_0, value of the zero mode at t = 0
    mean_slope: float = 0.0   # the affine slack a

    def evaluate(self, y, t, deriv=(0, 0)):
        """``d^i/dy^i d^j/dt^j V`` for ``deriv = (i, j)`` (real valued)."""
        i, j = deriv
        y, t = np.broadcast_arrays(np.asarray(y, float), np.asarray(t, float))
        out = np.zeros(y.shape)
        if i == 0:
            out += {0: self.mean + self.mean_slope * t, 1: self.mean_slope}.get(j, 0.0)
        for m in self.modes:
            w = 2j * np.pi * m.k
            out += np.real(w**i * m.derivative(t, j) * np.exp(w * y))
        return out

    def __call__(self, y, t):
        return self.evaluate(y, t)


def solve_cell(profile: Profile, mean_slope: float = 0.0) -> CellSolution:
    """Mode-wise closed-form solution of the cell problem.

    With ``c = (A + B t) e^{mu t}``: ``c(0) = A`` and
    ``c''(0) = mu^2 A + 2 mu B``, so the boundary data fix ``A = b_k`` and
    ``B = -mu b_k / 2``.
    """
    modes = []
    for k, bk in sorted(fourier(profile).items()):
        if k == 0 or bk == 0:
            continue
        mu = 2 * np.pi * abs(k)
        modes.append(Mode(k, mu, bk, -mu * bk / 2))
    return CellSolution(profile, tuple(modes), profile.cosine_coeffs[0], mean_slope)


def _exp_poly_integral(p, q, mu):
    """``int_{-inf}^0 p(t) conj(q(t)) e^{2 mu t} dt`` for linear ``p, q``
    given as coefficient pairs."""
    lam = 2 * mu
    # int t^n e^{lam t} over (-inf, 0] = (-1)^n n! / lam^(n+1)
    mom = [(-1) ** n * factorial(n) / lam ** (n + 1) for n in range(3)]
    p0, p1 = p
    q0, q1 = np.conj(q[0]), np.conj(q[1])
    return p0 * q0 * mom[0] + (p0 * q1 + p1 * q0) * mom[1] + p1 * q1 * mom[2]


def _deriv_coeffs(m: Mode, order: int):
    """``(c0, c1)`` with ``c_k^(order)(t) = (c0 + c1 t) e^{mu t}``."""
    mu = m.mu
    c0 = mu**order * m.A + (order * mu ** (order - 1) * m.B if order else 0)
    return c0, mu**order * m.B


def gamma_energy(sol: CellSolution) -> float:
    """``int_{Y x (-inf,0)} |D^2 V|^2`` summed mode by mode in closed form.

    Per mode the Hessian entries are ``-mu^2 c``, ``i kappa c'`` and ``c''``,
    so the integrand is ``mu^4 |c|^2 + 2 mu^2 |c'|^2 + |c''|^2``.
    """
    total = 0.0
    for m in sol.modes:
        d = [_deriv_coeffs(m, n) for n in range(3)]
        mu = m.mu
        e = (mu**4 * _exp_poly_integral(d[0], d[0], mu)
             + 2 * mu**2 * _exp_poly_integral(d[1], d[1], mu)
             + _exp_poly_integral(d[2], d[2], mu))
        total += e.real
    return float(total)


def gamma_flux(sol: CellSolution) -> float:
    """``- int_Y b d/dt (Delta_y V + Delta V)`` at ``t = 0``.

    Per mode ``Delta_y V + Delta V -> -2 mu^2 c + c''``; Parseval pairs the
    mode with ``conj(b_k)``.
    """
    bk = fourier(sol.profile)
    total = 0.0
    for m in sol.modes:
        flux = -2 * m.mu**2 * m.derivative(0.0, 1) + m.derivative(0.0, 3)
        total += -(np.conj(bk[m.k]) * flux).real
    return float(total)


@dataclass(frozen=True)
class TruncatedCell:
    gamma: float              # Richardson-extrapolated estimate
    gamma_fine: float
    gamma_coarse: float
    t: np.ndarray             # grid on (depth, 0), fine level
    modes: dict               # k -> sampled c_k on ``t`` (complex)
    depth: float
    n: int


def _mode_fd(mu: float, depth: float, n: int):
    """Unit-amplitude mode on ``(depth, 0)`` by second-order finite differences.

    Unknowns ``c_1..c_{n-1}``; ``c_0 = 0`` and ``c'(depth) = 0`` (ghost
    ``c_{-1} = c_1``) at the artificial bottom, ``c_n = 1`` and ``c''(0) = 0``
    (ghost ``c_{n+1} = 2 c_n - c_{n-1}``) on top.  Returns node values and the
    ghost values.
    """
    h = -depth / n
    m = n - 1
    # stencil of c'''' - 2 mu^2 c'' + mu^4 c scaled by h^4
    a2 = -2 * mu**2 * h**2
    s0 = 6 - 2 * a2 + mu**4 * h**4   # c_i
    s1 = -4 + a2                      # c_{i +- 1}
    s2 = 1.0                          # c_{i +- 2}
    ab = np.zeros((5, m))
    ab[0, 2:] = s2
    ab[1, 1:] = s1
    ab[2, :] = s0
    ab[3, :-1] = s1
    ab[4, :-2] = s2
    rhs = np.zeros(m)
    # bottom: c_0 = 0, c_{-1} = c_1 -> row i=1 gets s2 * c_1 extra
    ab[2, 0] += s2
    # top: c_n = 1 and c_{n+1} = 2 - c_{n-1}
    rhs[-1] -= s1 * 1.0 + s2 * 2.0
    ab[2, -1] -= s2
    rhs[-2] -= s2 * 1.0
    try:
        inner = solve_banded((2, 2), ab, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"truncated cell system is singular: {exc}") from exc
    if not np.all(np.isfinite(inner)):
        raise NumericalFailure("truncated cell system is singular")
    c = np.concatenate([[0.0], inner, [1.0]])
    ghost_lo, ghost_hi = c[1], 2 * c[-1] - c[-2]
    return c, ghost_lo, ghost_hi, h


def _mode_energy_fd(mu, c, ghost_lo, ghost_hi, h):
    ce = np.concatenate([[ghost_lo], c, [ghost_hi]])
    d1 = (ce[2:] - ce[:-2]) / (2 * h)
    d2 = (ce[2:] - 2 * ce[1:-1] + ce[:-2]) / h**2
    f = mu**4 * c**2 + 2 * mu**2 * d1**2 + d2**2
    return h * (f.sum() - 0.5 * (f[0] + f[-1]))


def solve_cell_truncated(profile: Profile, depth: float = -6.0, n: int = 800,
                         *, check: bool = True) -> TruncatedCell:
    """Independent oracle: finite differences on the truncated strip.

    Every mode is solved on ``(depth, 0)`` with clamped artificial conditions,
    gamma is assembled by trapezoidal quadrature, and the ``n`` and ``n/2``
    estimates are Richardson-extrapolated (second order).
    """
    if check and (depth > -4 or n < 200):
        raise InvalidArgument("need depth <= -4 and n >= 200")
    if n % 2:
        raise InvalidArgument("n must be even")
    bk = fourier(profile)
    estimates = []
    sampled = {}
    for level, nn in enumerate((n, n // 2)):
        total = 0.0
        for k, b in bk.items():
            if k == 0 or b == 0:
                continue
            mu = 2 * np.pi * abs(k)
            c, glo, ghi, h = _mode_fd(mu, depth, nn)
            total += abs(b) ** 2 * _mode_energy_fd(mu, c, glo, ghi, h)
            if level == 0:
                sampled[k] = b * c
        estimates.append(total)
    fine, coarse = estimates
    t = np.linspace(depth, 0.0, n + 1)
    return TruncatedCell((4 * fine - coarse) / 3, fine, coarse, t, sampled, depth, n)
