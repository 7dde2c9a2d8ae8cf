"""Experiment configuration read from a single JSON document.

Every key is optional; unknown keys are rejected.  Fractions such as
``"1/16"`` are accepted wherever a real number is expected.  See the README
for the full schema.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

from .errors import InvalidArgument
from .geometry import DomainSpec
from .plate_fem import BCKind, bc_from_dict
from .profile import Profile


def _real(v) -> float:
    if isinstance(v, str):
        try:
            return float(Fraction(v.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"not a number: {v!r}") from exc
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidArgument(f"not a number: {v!r}")
    return float(v)


_REAL_LISTS = ("eps_list", "alpha_list")
_REALS = ("L", "eps", "alpha", "tol", "eig_tol", "coarse_h", "slope_target",
          "slope_tol", "unfold_depth", "cell_depth", "cell_tol")


@dataclass
class ExperimentConfig:
    # domain
    L: float = 1.0
    eps: float = 0.125
    alpha: float = 1.5
    profile: dict = field(default_factory=lambda: {"cos": [0.2, 0.2]})
    # limit grids and boundary condition
    nx: int = 16
    ny: int = 16
    bc: dict = field(default_factory=lambda: {"kind": "intermediate"})
    k: int = 5
    tol: float = 5e-4
    eig_tol: float = 1e-8
    # sweeps
    eps_list: list = field(default_factory=lambda: [1 / 8, 1 / 16, 1 / 32])
    alpha_list: list = field(default_factory=lambda: [2.0, 1.5, 1.0])
    levels: list = field(default_factory=lambda: [8, 16, 32])
    sign: int | None = None  # strange-term sign; None probes both
    # perturbed grids
    cells_per_period: int = 16
    layer_cells: int = 16
    coarse_h: float = 1 / 32
    period_cell: bool = False
    # convergence study
    slope_target: float = 4.0
    slope_tol: float = 0.3
    # unfolding
    unfold_depth: float = -2.0
    orientation: int = -1
    subtract_limit: bool = True
    # cell oracle
    cell_depth: float = -6.0
    cell_n: int = 800
    cell_tol: float = 1e-4
    # run control
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in _REALS:
            setattr(self, name, _real(getattr(self, name)))
        for name in _REAL_LISTS:
            v = getattr(self, name)
            if not isinstance(v, list) or not v:
                raise InvalidArgument(f"{name} must be a non-empty list")
            setattr(self, name, [_real(x) for x in v])
        if not isinstance(self.levels, list) or not self.levels:
            raise InvalidArgument("levels must be a non-empty list")
        self.levels = [int(n) for n in self.levels]
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise InvalidArgument("levels must be strictly increasing")
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise InvalidArgument("eps_list must be strictly decreasing")
        if self.sign not in (None, -1, 1):
            raise InvalidArgument("sign must be +1, -1 or null")
        if self.orientation not in (-1, 1):
            raise InvalidArgument("orientation must be +1 or -1")
        if self.cells_per_period < 8:
            raise InvalidArgument("cells_per_period must be >= 8 to resolve eps")
        if self.threads < 1:
            raise InvalidArgument("threads must be >= 1")
        for e in self.eps_list:
            per = self.L / e
            if abs(per - round(per)) > 1e-9 * per:
                raise InvalidArgument(f"L / eps = {per:.6g} is not an integer")
        Profile.from_dict(self.profile)
        bc_from_dict(self.bc)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise InvalidArgument("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidArgument(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return asdict(self)

    def profile_obj(self) -> Profile:
        return Profile.from_dict(self.profile)

    def bc_obj(self) -> BCKind:
        return bc_from_dict(self.bc)

    def domain(self, eps: float | None = None, alpha: float | None = None) -> DomainSpec:
        return DomainSpec(self.L, self.eps if eps is None else eps,
                          self.alpha if alpha is None else alpha, self.profile_obj())
