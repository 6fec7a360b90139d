"""Physical constants, scenario description and validation.

Units are natural by default: hbar = 2 and mass = 1 give a diffusivity of
exactly one, so the initial osmotic speed of a channel is 1/sigma0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .errors import BadGrid, BadWeight, DomainTooSmall, EmptySlits, NonPositiveInput, NonPositiveSigma, ScenarioError

#: Products a scenario run may request.
PRODUCTS = ("density", "current", "entangling", "trajectories", "oracle-diff", "fdm")

#: Half-width of the required domain margin, in units of the channel width.
DOMAIN_SIGMAS = 6.0


@dataclass(frozen=True)
class PhysicalParams:
    """Constants shared by every formula: action quantum, mass, frequency."""

    hbar: float = 2.0
    mass: float = 1.0
    omega: float = 1.0

    @property
    def diffusivity(self) -> float:
        # Einstein relation
        return self.hbar / (2.0 * self.mass)

    @property
    def energy(self) -> float:
        return self.hbar * self.omega

    @property
    def kT(self) -> float:
        return self.hbar * self.omega


def derive_params(hbar: float, mass: float, omega: float) -> PhysicalParams:
    """Build a :class:`PhysicalParams`, rejecting non-positive inputs."""
    for name, value in (("hbar", hbar), ("mass", mass), ("omega", omega)):
        if not (value > 0 and math.isfinite(value)):
            raise NonPositiveInput(f"{name} must be a positive finite number, got {value!r}")
    return PhysicalParams(float(hbar), float(mass), float(omega))


@dataclass(frozen=True)
class SlitSpec:
    """One Gaussian channel leaving a slit.

    ``weight`` scales the amplitude R, so the channel contributes
    ``weight**2`` of probability before renormalization. ``phase_offset`` is
    added to the channel phase S/hbar.
    """

    center: float
    sigma0: float
    weight: float = 1.0
    phase_offset: float = 0.0
    velocity_x: float = 0.0


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    nx: int
    t_max: float
    nt: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return self.t_max / self.nt

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.nx)

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.nt + 1)


@dataclass(frozen=True)
class ScenarioConfig:
    params: PhysicalParams
    slits: Tuple[SlitSpec, ...]
    grid: GridSpec
    outputs: Tuple[str, ...] = ("density",)
    trajectory_seeds: int = 20
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "slits", tuple(self.slits))
        object.__setattr__(self, "outputs", tuple(sorted(set(self.outputs))))

    def with_overrides(self, **kw) -> "ScenarioConfig":
        grid_keys = {k: kw.pop(k) for k in ("nx", "nt") if kw.get(k) is not None}
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, **kw)
        if grid_keys:
            cfg = replace(cfg, grid=replace(cfg.grid, **grid_keys))
        return cfg


def _sigma(sigma0, params, t):
    u0 = params.diffusivity / sigma0
    return math.sqrt(sigma0 ** 2 + (u0 * t) ** 2)


def validate_scenario(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every invariant other modules rely on and return ``cfg``.

    Derived quantities (D, kT, dx, dt) are properties, so a validated config is
    the same frozen object; validation is idempotent.
    """
    p = cfg.params
    for name in ("hbar", "mass", "omega"):
        value = getattr(p, name)
        if not (value > 0 and math.isfinite(value)):
            raise NonPositiveInput(f"{name} must be positive, got {value!r}", where=("params", None, name))

    g = cfg.grid
    if not isinstance(g.nx, (int, np.integer)) or g.nx < 3:
        raise BadGrid(f"nx must be an integer >= 3, got {g.nx!r}", where=("grid", None, "nx"))
    if not isinstance(g.nt, (int, np.integer)) or g.nt < 1:
        raise BadGrid(f"nt must be an integer >= 1, got {g.nt!r}", where=("grid", None, "nt"))
    if not g.x_min < g.x_max:
        raise BadGrid(f"x_min must be < x_max, got [{g.x_min}, {g.x_max}]", where=("grid", None, "x_max"))
    if not g.t_max > 0:
        raise BadGrid(f"t_max must be positive, got {g.t_max!r}", where=("grid", None, "t_max"))

    if not cfg.slits:
        raise EmptySlits("scenario has no slits")
    for i, s in enumerate(cfg.slits):
        if not s.sigma0 > 0:
            raise NonPositiveSigma(f"slit {i}: sigma0 must be > 0, got {s.sigma0!r}", where=("slit", i, "sigma0"))
        if not s.weight >= 0:
            raise BadWeight(f"slit {i}: weight must be >= 0, got {s.weight!r}", where=("slit", i, "weight"))
    if not any(s.weight > 0 for s in cfg.slits):
        raise EmptySlits("every slit has zero weight")

    for i, s in enumerate(cfg.slits):
        for t in (0.0, g.t_max):
            c = s.center + s.velocity_x * t
            half = DOMAIN_SIGMAS * _sigma(s.sigma0, p, t)
            if c - half < g.x_min or c + half > g.x_max:
                raise DomainTooSmall(
                    f"slit {i}: [{c - half:.6g}, {c + half:.6g}] at t={t:g} "
                    f"exceeds domain [{g.x_min:g}, {g.x_max:g}]",
                    where=("slit", i, None),
                )

    unknown = set(cfg.outputs) - set(PRODUCTS)
    if unknown:
        raise ScenarioError(f"unknown output products: {sorted(unknown)}", where=("outputs", None, "products"))
    if cfg.trajectory_seeds < 1:
        raise ScenarioError("trajectory_seeds must be >= 1", where=("outputs", None, "trajectory_seeds"))
    return cfg
