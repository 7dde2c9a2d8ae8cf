"""Reference spectra of the limit operators by lateral Fourier reduction.

On ``(0, L) x (-1, 0)`` with lateral periodicity, ``u = phi(t) e^{i mu x}``
with ``mu = 2 pi k / L`` turns ``Delta^2 u + u = lambda u`` into

    phi'''' - 2 mu^2 phi'' + (mu^4 + 1) phi = lambda phi   on (-1, 0),

hinged at ``t = -1``.  Eigenvalues are the zeros of a 4x4 determinant built
from the characteristic solutions; they are bracketed by a scan and refined
by Brent's method.

Top boundary kinds (``t = 0``):

* hinged   ``phi = 0, phi'' = 0``
* clamped  ``phi = 0, phi' = 0``
* robin    ``phi = 0, phi'' + sign * gamma * phi' = 0``, the natural condition
  of the form ``Q + sign * gamma * int (du/dt)^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgument, NumericalFailure
from .plate_fem import BCKind, DirichletOnW, Intermediate, StrangeTerm

HINGED, CLAMPED, ROBIN = "hinged", "clamped", "robin"


@dataclass(frozen=True)
class ModeProblem:
    mu: float
    bc_top: str = HINGED
    gamma: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if self.bc_top not in (HINGED, CLAMPED, ROBIN):
            raise InvalidArgument(f"unknown top condition {self.bc_top!r}")
        if self.gamma < 0:
            raise InvalidArgument("gamma must be non-negative")
        if self.sign not in (-1, 1):
            raise InvalidArgument("sign must be +1 or -1")


def _sinc_like(q2, s):
    """``sin(q s)/q`` and its derivatives up to order 3 as entire functions of
    ``q2 = q^2`` (hyperbolic for ``q2 < 0``)."""
    q2 = np.asarray(q2, float)
    q = np.sqrt(np.abs(q2))
    pos, neg = q2 > 0, q2 < 0
    S = np.where(pos, np.sin(q * s) / np.where(pos, q, 1),
                 np.where(neg, np.sinh(q * s) / np.where(neg, q, 1), s))
    C = np.where(pos, np.cos(q * s), np.where(neg, np.cosh(q * s), 1.0))
    # f = S, f' = C, f'' = -q2 S, f''' = -q2 C
    return np.stack([S, C, -q2 * S, -q2 * C])


def _cos_like(q2, s):
    """``cos(q s)`` and derivatives as entire functions of ``q2``."""
    d = _sinc_like(q2, s)
    # cos' = -q2 * (sin/q), cos'' = -q2 cos, cos''' = q2^2 sin/q
    return np.stack([d[1], d[2], d[3], q2 * q2 * d[0]])


def _basis(mu, lam, s):
    """Four fundamental solutions and derivatives (order 0..3) at ``s = t + 1``.

    Characteristic roots satisfy ``(r^2 - mu^2)^2 = lam - 1``; with
    ``beta^2 = sqrt(lam - 1)`` the pairs are ``r^2 = mu^2 + beta^2`` and
    ``r^2 = mu^2 - beta^2``.  Written as cos/sin of ``q^2 = -r^2`` they are
    entire in ``lam`` as long as ``lam >= 1``.
    """
    beta2 = np.sqrt(np.maximum(lam - 1.0, 0.0))
    p2 = -(mu * mu + beta2)  # q^2 for the hyperbolic pair
    q2 = beta2 - mu * mu
    return np.stack([_cos_like(p2, s), _sinc_like(p2, s),
                     _cos_like(q2, s), _sinc_like(q2, s)])  # (4 fn, 4 deriv, ...)


def _basis_below(mu, lam, s):
    """Real fundamental system for ``lam < 1``, where ``r^2 = mu^2 -+ i w``
    with ``w = sqrt(1 - lam)``: real and imaginary parts of ``cos(q s)`` and
    ``sin(q s)/q`` for the complex ``q^2 = -mu^2 + i w``."""
    lam = np.asarray(lam, float)
    q2 = -mu * mu + 1j * np.sqrt(1.0 - lam)
    q = np.sqrt(q2)
    S, C = np.sin(q * s) / q, np.cos(q * s)
    sinc = np.stack([S, C, -q2 * S, -q2 * C])
    cos = np.stack([C, -q2 * S, -q2 * C, q2 * q2 * S])
    return np.stack([cos.real, cos.imag, sinc.real, sinc.imag])


def _top_rows(p: ModeProblem, top):
    # top: (4 fn, 4 deriv, ...) values at s = 1
    r1 = top[:, 0]
    if p.bc_top == HINGED:
        r2 = top[:, 2]
    elif p.bc_top == CLAMPED:
        r2 = top[:, 1]
    else:
        r2 = top[:, 2] + p.sign * p.gamma * top[:, 1]
    return r1, r2


def char_det(p: ModeProblem, lam):
    """Boundary determinant, scaled to stay O(1) for large ``lam``."""
    lam = np.asarray(lam, float)
    below = np.all(lam < 1)
    if not below and np.any(lam < 1):
        raise InvalidArgument("evaluate lam < 1 and lam >= 1 separately")
    basis = _basis_below if below else _basis
    bot = basis(p.mu, lam, 0.0)
    top = basis(p.mu, lam, 1.0)
    rows = [bot[:, 0], bot[:, 2], *_top_rows(p, top)]  # each (4, ...)
    A = np.moveaxis(np.stack(rows), (0, 1), (-2, -1))  # (..., 4 rows, 4 fns)
    beta2 = np.sqrt(np.abs(lam - 1.0))
    scale = np.cosh(np.sqrt(p.mu**2 + beta2)) ** (2 if below else 1) * (1 + beta2) ** 2
    if p.bc_top == ROBIN:
        scale = scale * (1 + p.gamma)
    return np.linalg.det(A) / scale


def hinged_closed_form(mu: float, n: int) -> float:
    return ((n * np.pi) ** 2 + mu * mu) ** 2 + 1.0


def lower_bound(p: ModeProblem) -> float:
    """A value below the spectrum of the mode problem.

    The form is at least ``1`` times the mass unless a negative boundary
    energy is present; then the boundary-layer scaling ``phi(t) = psi(k t)``
    with ``k ~ gamma`` gives ``lam - 1 >= -c gamma^4`` with ``c`` near 1/4
    (trial functions ``t e^{k t}`` reach ``c = 0.216``); ``c = 1`` is used
    as a safety margin.
    """
    if p.bc_top == ROBIN and p.sign < 0:
        return 1.0 - p.gamma**4 - 2.0
    return 1.0


def _roots_in(p, lo, hi, step):
    grid = np.arange(lo, hi, step)
    grid = np.append(grid, hi) if grid[-1] < hi else grid
    f = char_det(p, grid)
    out = list(grid[f == 0])
    for i in np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0):
        out.append(brentq(lambda x: float(char_det(p, x)), grid[i], grid[i + 1],
                          xtol=1e-14, rtol=1e-15, maxiter=200))
    return out


def mode_eigenvalues(p: ModeProblem, count: int, *, lam_max: float | None = None,
                     step: float = 1.0, rel_step: float = 1e-4) -> np.ndarray:
    """The ``count`` smallest eigenvalues of one lateral mode (``count <= 10``).

    Roots are bracketed on a grid of spacing ``max(step, rel_step * lam)``.
    The default ``lam_max`` is the hinged value of index ``count + 1``, an
    upper bound for every top condition (interlacing).

    For a negative boundary energy the form is indefinite and eigenvalues may
    lie below 1 (even below 0); that range is scanned with its own real
    fundamental system.  A root exactly at ``lam = 1``, where both systems
    degenerate, is not detected.
    """
    if not 1 <= count <= 10:
        raise InvalidArgument("count must lie in 1..10")
    if lam_max is None:
        lam_max = hinged_closed_form(p.mu, count + 1) + 1.0
    roots = []
    lb = lower_bound(p)
    if lb < 1:
        st = max(step, (1 - lb) / 2e5)
        roots = sorted(_roots_in(p, lb, 1.0 - 1e-9, st))
    start = 1.0 + 1e-9
    while len(roots) < count and start < lam_max:
        h = max(step, rel_step * start)
        stop = min(start + 2e4 * h, lam_max)
        roots = sorted(set(roots) | set(_roots_in(p, start, stop, h)))
        start = stop
    if len(roots) < count:
        raise NumericalFailure(
            f"found {len(roots)} of {count} roots below {lam_max:g} for {p}; "
            f"scan step {step}")
    return np.array(roots[:count])


def _mode_problem(bc: BCKind, mu: float) -> ModeProblem:
    if isinstance(bc, Intermediate):
        return ModeProblem(mu, HINGED)
    if isinstance(bc, DirichletOnW):
        return ModeProblem(mu, CLAMPED)
    if isinstance(bc, StrangeTerm):
        if bc.gamma == 0:
            return ModeProblem(mu, HINGED)
        return ModeProblem(mu, ROBIN, bc.gamma, bc.sign)
    raise InvalidArgument(f"unknown boundary condition {bc!r}")


@dataclass(frozen=True)
class SpectrumEntry:
    k: int
    n: int
    value: float
    multiplicity: int


def limit_spectrum(bc: BCKind, L: float, count: int) -> list[SpectrumEntry]:
    """Smallest ``count`` eigenvalues (with multiplicity) of a limit operator.

    Lateral modes ``k = 0, 1, ...`` are added until the smallest eigenvalue of
    the next mode exceeds the current ``count``-th value; ``k > 0`` entries
    carry multiplicity 2 (the ``+k`` and ``-k`` modes).
    """
    if not 1 <= count <= 32:
        raise InvalidArgument("count must lie in 1..32")
    entries: list[SpectrumEntry] = []
    k = 0
    while True:
        mu = 2 * np.pi * k / L
        first = mode_eigenvalues(_mode_problem(bc, mu), 1)[0]
        if len(_expand(entries)) >= count and first > _expand(entries)[count - 1]:
            break
        vals = mode_eigenvalues(_mode_problem(bc, mu), min(count, 10))
        mult = 1 if k == 0 else 2
        entries += [SpectrumEntry(k, n + 1, float(v), mult) for n, v in enumerate(vals)]
        k += 1
    entries.sort(key=lambda e: (e.value, e.k))
    out, total = [], 0
    for e in entries:
        if total >= count:
            break
        out.append(e)
        total += e.multiplicity
    return out


def _expand(entries):
    return sorted(v for e in entries for v in [e.value] * e.multiplicity)


def spectrum_values(bc: BCKind, L: float, count: int) -> np.ndarray:
    """``limit_spectrum`` flattened to the first ``count`` values."""
    return np.array(_expand(limit_spectrum(bc, L, count))[:count])
