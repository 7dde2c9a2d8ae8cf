"""Oscillating-boundary domains and the straightening diffeomorphism.

The reference domain is ``Omega = (0, L) x (-1, 0)``, periodic in the lateral
variable.  The perturbed domain ``Omega_eps`` has top boundary
``x_N = g_eps(x) = eps**alpha * b(x / eps)``.  The map

    Phi_eps(x, x_N) = (x, x_N - h_eps(x, x_N))

sends ``Omega_eps`` onto ``Omega``; ``h_eps`` vanishes below ``x_N = -eps`` and
is a cubic blend up to the oscillating boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgument, NumericalFailure, OutOfDomain
from .profile import Profile, evaluate

# multi-indices (order in x, order in x_N) accepted by ``h_eps``
DERIVS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


@dataclass(frozen=True)
class DomainSpec:
    """Oscillating domain family member.

    Parameters
    ----------
    L : lateral period of ``W = (0, L)``.
    eps : oscillation period; ``L / eps`` should be an integer for experiments.
    alpha : amplitude exponent, ``g_eps = eps**alpha * b(x/eps)``.
    profile : the periodic profile ``b``.
    """

    L: float
    eps: float
    alpha: float
    profile: Profile

    def __post_init__(self):
        if not self.L > 0:
            raise InvalidArgument("L must be positive")
        if not 0 < self.eps < 1:
            raise InvalidArgument("eps must lie in (0, 1)")
        if not self.alpha > 0:
            raise InvalidArgument("alpha must be positive")
        _, bmax = self.profile.value_range()
        gmax = self.eps ** self.alpha * bmax
        if gmax >= self.eps:
            raise InvalidArgument(
                f"max g_eps = {gmax:.3g} >= eps = {self.eps:.3g}; eps too large")
        # 1 - d_N h >= (eps - 2 g) / (g + eps); the map folds over once 2 g >= eps
        if 2 * gmax >= self.eps:
            raise InvalidArgument(
                f"max g_eps = {gmax:.3g} >= eps/2: Phi_eps is not a diffeomorphism")

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        return cls(float(d["L"]), float(d["eps"]), float(d["alpha"]),
                   Profile.from_dict(d["profile"]))

    def to_dict(self) -> dict:
        return {"L": self.L, "eps": self.eps, "alpha": self.alpha,
                "profile": self.profile.to_dict()}

    @property
    def periods(self) -> float:
        return self.L / self.eps

    def g(self, x, deriv: int = 0):
        """Top boundary ``g_eps`` or its first/second derivative."""
        e = self.eps
        return e ** (self.alpha - deriv) * evaluate(self.profile, np.asarray(x) / e, deriv)


def _check_domain(spec: DomainSpec, x, xn, g):
    bad = (xn < -1 - 1e-14) | (xn > g + 1e-14 * (1 + np.abs(g)))
    if np.any(bad):
        i = np.flatnonzero(np.atleast_1d(bad))[0]
        raise OutOfDomain(
            f"point ({np.ravel(x * np.ones_like(xn))[i]:.6g}, {np.ravel(xn)[i]:.6g}) "
            "outside [-1, g_eps]")


def h_eps(spec: DomainSpec, x, xn, deriv=(0, 0), *, check: bool = True):
    """``h_eps`` or its partial derivative ``d^i/dx^i d^j/dx_N^j`` for
    ``deriv = (i, j)`` with ``i + j <= 2``.  Vectorised over ``x, xn``."""
    deriv = tuple(deriv)
    if deriv not in DERIVS:
        raise InvalidArgument(f"unsupported derivative {deriv}")
    x, xn = np.broadcast_arrays(np.asarray(x, float), np.asarray(xn, float))
    return _h_all(spec, x, xn, check)[DERIVS.index(deriv)]


def _h_all(spec: DomainSpec, x, xn, check=True):
    """All six derivatives of ``h_eps`` up to order two, stacked."""
    e = spec.eps
    g, g1, g2 = spec.g(x), spec.g(x, 1), spec.g(x, 2)
    if check:
        _check_domain(spec, x, xn, g)
    s = np.maximum(xn + e, 0.0)
    D = g + e
    s2, s3 = s * s, s * s * s
    D3 = D ** 3
    D4 = D3 * D
    t = e - 2 * g
    out = np.empty((6,) + np.shape(s))
    out[0] = g * s3 / D3
    out[1] = g1 * s3 * t / D4
    out[2] = 3 * g * s2 / D3
    out[3] = s3 * (g2 * t / D4 - 2 * g1 * g1 / D4 - 4 * g1 * g1 * t / (D4 * D))
    out[4] = 3 * g1 * s2 * t / D4
    out[5] = 6 * g * s / D3
    return out


def phi_eps(spec: DomainSpec, x, xn):
    """Image ``(x, x_N - h_eps)`` of points of the closure of ``Omega_eps``."""
    x, xn = np.broadcast_arrays(np.asarray(x, float), np.asarray(xn, float))
    h = _h_all(spec, x, xn)[0]
    return x, xn - h


def jacobian_det(spec: DomainSpec, x, xn):
    """``det D Phi_eps = 1 - d_N h_eps``."""
    x, xn = np.broadcast_arrays(np.asarray(x, float), np.asarray(xn, float))
    return 1.0 - _h_all(spec, x, xn)[2]


def invert_phi(spec: DomainSpec, x, s, *, tol: float = 1e-13, maxiter: int = 100):
    """Solve ``x_N - h_eps(x, x_N) = s`` for ``x_N`` (vectorised).

    Safeguarded Newton: iterates stay inside the bracket ``[-eps, g_eps(x)]``
    and fall back to bisection when a Newton step leaves it.
    """
    x, s = np.broadcast_arrays(np.asarray(x, float), np.asarray(s, float))
    if np.any((s < -1 - 1e-14) | (s > 1e-14)):
        raise OutOfDomain("s must lie in [-1, 0]")
    e = spec.eps
    out = s.astype(float).copy()
    layer = s > -e
    if not np.any(layer):
        return out if out.ndim else float(out)
    xl, sl = x[layer], s[layer]
    g = spec.g(xl)
    lo = np.full_like(sl, -e)
    hi = g.copy()
    # f(x_N) = x_N - h - s is increasing; linear guess from the endpoint values
    z = -e + (sl + e) * (g + e) / e
    for _ in range(maxiter):
        hv = _h_all(spec, xl, z, check=False)
        f = z - hv[0] - sl
        if np.all(np.abs(f) <= tol):
            break
        fp = 1.0 - hv[2]
        pos = f > 0
        hi = np.where(pos, z, hi)
        lo = np.where(pos, lo, z)
        zn = z - f / fp
        outside = (zn <= lo) | (zn >= hi) | ~np.isfinite(zn)
        z = np.where(f == 0, z, np.where(outside, 0.5 * (lo + hi), zn))
    else:
        hv = _h_all(spec, xl, z, check=False)
        res = np.max(np.abs(z - hv[0] - sl))
        raise NumericalFailure(f"invert_phi did not converge (residual {res:.3g})")
    out[layer] = z
    return out if out.ndim else float(out)


class Regime(Enum):
    SUPERCRITICAL = "supercritical"
    CRITICAL = "critical"
    SUBCRITICAL = "subcritical"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    theta_window: tuple[float, float] | None  # open interval, None when empty

    @property
    def window_empty(self) -> bool:
        return self.theta_window is None

    def contains(self, theta: float) -> bool:
        return (self.theta_window is not None
                and self.theta_window[0] < theta < self.theta_window[1])


def classify_regime(alpha: float, *, atol: float = 1e-12) -> RegimeReport:
    """Classify ``alpha`` and return the admissible exponents ``theta`` for a
    gauge ``kappa_eps = eps**theta``.

    For ``g_eps = eps**alpha b(./eps)`` one has
    ``||D^j g_eps||_inf ~ eps**(alpha - j)``.  The gauge must dominate
    ``||g_eps||_inf`` and tend to zero (``0 < theta < alpha``) while
    ``||D^j g_eps|| / kappa**(3/2 - j) -> 0`` for ``j = 0, 1, 2``, i.e.
    ``alpha - j > theta (3/2 - j)``.
    """
    if not alpha > 0:
        raise InvalidArgument("alpha must be positive")
    lower, upper = 0.0, alpha
    for j in (0, 1, 2):
        c = 1.5 - j
        if c > 0:
            upper = min(upper, (alpha - j) / c)
        elif c < 0:
            lower = max(lower, (alpha - j) / c)
    window = (lower, upper) if upper > lower else None
    if abs(alpha - 1.5) <= atol:
        regime = Regime.CRITICAL
    elif alpha > 1.5:
        regime = Regime.SUPERCRITICAL
    else:
        regime = Regime.SUBCRITICAL
    return RegimeReport(regime, window)
