"""Periodic oscillation profiles given as real trigonometric polynomials.

A profile is

    b(y) = a_0 + sum_k a_k cos(2 pi k y) + s_k sin(2 pi k y),   k = 1..K

and must take values in [0, 1/2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidArgument

_MIN_SAMPLES = 1024


@dataclass(frozen=True)
class Profile:
    """Trigonometric profile with cosine amplitudes ``a_0..a_K`` and sine
    amplitudes ``s_1..s_K``.

    The range condition ``0 <= b < 1/2`` is checked on construction; profiles
    violating it are rejected, never clamped.
    """

    cosine_coeffs: tuple[float, ...]
    sine_coeffs: tuple[float, ...] = ()
    check_range: bool = True

    def __post_init__(self):
        cos = tuple(float(c) for c in self.cosine_coeffs)
        sin = tuple(float(s) for s in self.sine_coeffs)
        if len(cos) == 0:
            cos = (0.0,)
        # pad so both lists describe the same degree K
        K = max(len(cos) - 1, len(sin))
        cos = cos + (0.0,) * (K + 1 - len(cos))
        sin = sin + (0.0,) * (K - len(sin))
        if not all(np.isfinite(cos + sin)):
            raise InvalidArgument("profile coefficients must be finite")
        object.__setattr__(self, "cosine_coeffs", cos)
        object.__setattr__(self, "sine_coeffs", sin)
        if self.check_range:
            lo, hi = self.value_range()
            if lo < -1e-12 or hi >= 0.5:
                raise InvalidArgument(
                    f"profile range [{lo:.6g}, {hi:.6g}] not inside [0, 1/2)")

    @classmethod
    def from_dict(cls, d: dict) -> "Profile":
        return cls(tuple(d.get("cos", (0.0,))), tuple(d.get("sin", ())))

    def to_dict(self) -> dict:
        return {"cos": list(self.cosine_coeffs), "sin": list(self.sine_coeffs)}

    @property
    def degree(self) -> int:
        return len(self.cosine_coeffs) - 1

    def scaled(self, s: float) -> "Profile":
        return Profile(tuple(s * c for c in self.cosine_coeffs),
                       tuple(s * c for c in self.sine_coeffs), self.check_range)

    def shifted(self, c: float) -> "Profile":
        """Profile ``y -> b(y + c)``."""
        cos = [self.cosine_coeffs[0]]
        sin = []
        for k in range(1, self.degree + 1):
            a, s = self.cosine_coeffs[k], self.sine_coeffs[k - 1]
            ph = 2 * np.pi * k * c
            cos.append(a * np.cos(ph) + s * np.sin(ph))
            sin.append(s * np.cos(ph) - a * np.sin(ph))
        return Profile(tuple(cos), tuple(sin), self.check_range)

    def __call__(self, y, deriv: int = 0):
        return evaluate(self, y, deriv)

    def value_range(self) -> tuple[float, float]:
        """Certified-ish (min, max) of b over one period.

        Dense sampling locates the extremal samples, which are then polished
        by bounded Brent iterations.  The maximum is additionally padded by
        the bound ``max|b''| h^2 / 8`` (derivative magnitude bounded by
        ``(2 pi K)^2 sum |coeffs|``).
        """
        K = self.degree
        if K == 0:
            c = self.cosine_coeffs[0]
            return c, c
        n = max(_MIN_SAMPLES, 64 * K)
        h = 1.0 / n
        y = np.arange(n) * h
        vals = evaluate(self, y)

        def polish(sgn, y0):
            res = minimize_scalar(lambda t: sgn * evaluate(self, t),
                                  bounds=(y0 - h, y0 + h), method="bounded",
                                  options={"xatol": 1e-14})
            return sgn * res.fun

        lo = min(vals.min(), polish(1.0, y[np.argmin(vals)]))
        hi = max(vals.max(), polish(-1.0, y[np.argmax(vals)]))
        amp = sum(map(abs, self.cosine_coeffs[1:])) + sum(map(abs, self.sine_coeffs))
        bernstein = (2 * np.pi * K) ** 2 * amp * h * h / 8.0
        return float(lo), float(max(hi, vals.max() + bernstein))


def evaluate(profile: Profile, y, deriv: int = 0):
    """Value or derivative (order 0, 1 or 2) of the profile at ``y``."""
    if deriv not in (0, 1, 2):
        raise InvalidArgument(f"deriv must be 0, 1 or 2, got {deriv!r}")
    y = np.asarray(y, dtype=float)
    out = np.full(y.shape, profile.cosine_coeffs[0] if deriv == 0 else 0.0)
    for k in range(1, profile.degree + 1):
        a, s = profile.cosine_coeffs[k], profile.sine_coeffs[k - 1]
        if a == 0.0 and s == 0.0:
            continue
        w = 2 * np.pi * k
        # reduce the phase first so b(y + 1) == b(y) holds to rounding
        t = w * np.mod(y, 1.0)
        c, sn = np.cos(t), np.sin(t)
        if deriv == 0:
            out = out + a * c + s * sn
        elif deriv == 1:
            out = out + w * (-a * sn + s * c)
        else:
            out = out - w * w * (a * c + s * sn)
    return out if out.ndim else float(out)


def fourier(profile: Profile) -> dict[int, complex]:
    """Exact Fourier coefficients ``b_k = int_0^1 b(y) exp(-2 pi i k y) dy``."""
    coeffs = {0: complex(profile.cosine_coeffs[0])}
    for k in range(1, profile.degree + 1):
        a, s = profile.cosine_coeffs[k], profile.sine_coeffs[k - 1]
        coeffs[k] = complex(a, -s) / 2
        coeffs[-k] = complex(a, s) / 2
    return coeffs
