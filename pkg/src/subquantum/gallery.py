"""Reference scenarios, one per figure of the n-slit study.

Each builder returns a validated :class:`ScenarioConfig`. The same scenarios
ship as config documents in ``subquantum/gallery/*.toml``; a test checks the
shipped files still serialize from these builders.

Numbers not fixed by the physics (axis spans, grid sizes, squeezer and
sweeper weight ratios) are illustrative choices. The random weights of
``fig5b_random`` come from :class:`XorShift64Star` with seed
``RANDOM_WEIGHT_SEED``.
"""

from __future__ import annotations

import math
from importlib import resources
from typing import Callable, Dict, List

from .model import DOMAIN_SIGMAS, GridSpec, PhysicalParams, ScenarioConfig, SlitSpec, validate_scenario

#: Seed of the fig5b weight generator (the digits of a date, nothing deeper).
RANDOM_WEIGHT_SEED = 20130722

#: Range of the fig5b random weights.
RANDOM_WEIGHT_RANGE = (0.2, 1.0)


class XorShift64Star:
    """Marsaglia xorshift with the multiplicative output scramble (xorshift64*).

    state ^= state >> 12; state ^= state << 25; state ^= state >> 27;
    output = state * 0x2545F4914F6CDD1D mod 2**64.
    """

    MASK = (1 << 64) - 1
    MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        if seed % (1 << 64) == 0:
            raise ValueError("xorshift64* needs a nonzero seed")
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s ^= (s << 25) & self.MASK
        s ^= s >> 27
        self.state = s
        return (s * self.MULT) & self.MASK

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53


def _sigma(sigma0: float, params: PhysicalParams, t: float) -> float:
    return math.sqrt(sigma0 ** 2 + (params.diffusivity / sigma0) ** 2 * t * t)


def _fitted_grid(slits, params, t_max, nt, dx, margin=1.0) -> GridSpec:
    """Symmetric domain wide enough for the 6 sigma rule, rounded outward to whole units."""
    reach = 0.0
    for s in slits:
        for t in (0.0, t_max):
            c = s.center + s.velocity_x * t
            reach = max(reach, abs(c) + DOMAIN_SIGMAS * _sigma(s.sigma0, params, t))
    half = math.ceil(reach + margin)
    nx = int(round(2 * half / dx)) + 1
    return GridSpec(-float(half), float(half), nx, float(t_max), nt)


def _row(n: int, d: float) -> List[float]:
    """n centers spaced d apart, symmetric about 0, listed from top (largest x) down."""
    return [0.5 * (n - 1) * d - k * d for k in range(n)]


def fig1_double_slit() -> ScenarioConfig:
    """Converging double slit: the channels cross the axis and overlap at t = 1.25."""
    p = PhysicalParams()
    slits = (SlitSpec(5.0, 1.0, velocity_x=-4.0), SlitSpec(-5.0, 1.0, velocity_x=4.0))
    return validate_scenario(ScenarioConfig(
        p, slits, GridSpec(-22.0, 22.0, 881, 2.5, 250),
        outputs=("density", "entangling", "trajectories"), name="fig1_double_slit",
    ))


def fig2_zero_velocity() -> ScenarioConfig:
    """Narrow slits, no transverse velocity: wide dispersion and far-field fringes."""
    p = PhysicalParams()
    slits = (SlitSpec(3.0, 0.5), SlitSpec(-3.0, 0.5))
    return validate_scenario(ScenarioConfig(
        p, slits, GridSpec(-40.0, 40.0, 801, 3.0, 300),
        outputs=("density", "entangling", "trajectories"), name="fig2_zero_velocity",
    ))


def fig3_phase_shift() -> ScenarioConfig:
    """fig2 with a quarter-turn phase offset on the lower slit."""
    base = fig2_zero_velocity()
    slits = (base.slits[0], SlitSpec(-3.0, 0.5, phase_offset=math.pi / 2))
    return validate_scenario(ScenarioConfig(
        base.params, slits, base.grid, outputs=base.outputs, name="fig3_phase_shift",
    ))


def fig4a_three_slit() -> ScenarioConfig:
    p = PhysicalParams()
    slits = tuple(SlitSpec(c, 0.6) for c in _row(3, 4.0))
    return validate_scenario(ScenarioConfig(
        p, slits, _fitted_grid(slits, p, 3.0, 300, 0.08),
        outputs=("density", "entangling", "trajectories"), name="fig4a_three_slit",
    ))


def fig4b_talbot() -> ScenarioConfig:
    """Four slits of a grating, d = 4, run to the Talbot time d^2 m / (pi hbar)."""
    p = PhysicalParams()
    d = 4.0
    t_talbot = d * d * p.mass / (math.pi * p.hbar)
    slits = tuple(SlitSpec(c, 0.8) for c in _row(4, d))
    return validate_scenario(ScenarioConfig(
        p, slits, _fitted_grid(slits, p, t_talbot, 250, 0.05),
        outputs=("density", "entangling", "trajectories"), name="fig4b_talbot",
    ))


def _nine(weights, name) -> ScenarioConfig:
    p = PhysicalParams()
    slits = tuple(SlitSpec(c, 0.5, weight=w) for c, w in zip(_row(9, 3.0), weights))
    return validate_scenario(ScenarioConfig(
        p, slits, _fitted_grid(slits, p, 2.0, 200, 0.05),
        outputs=("density", "entangling"), name=name,
    ))


def fig5a_graded() -> ScenarioConfig:
    """Nine slits whose weights fall linearly from 1 (top) to 0.2 (bottom)."""
    return _nine([round(1.0 - 0.1 * k, 12) for k in range(9)], "fig5a_graded")


def random_weights(n: int, seed: int = RANDOM_WEIGHT_SEED) -> List[float]:
    lo, hi = RANDOM_WEIGHT_RANGE
    rng = XorShift64Star(seed)
    return [lo + (hi - lo) * rng.uniform() for _ in range(n)]


def fig5b_random() -> ScenarioConfig:
    return _nine(random_weights(9), "fig5b_random")


def _seven(weights, name) -> ScenarioConfig:
    p = PhysicalParams()
    slits = tuple(SlitSpec(c, 0.5, weight=w) for c, w in zip(_row(7, 3.0), weights))
    return validate_scenario(ScenarioConfig(
        p, slits, _fitted_grid(slits, p, 2.0, 200, 0.05),
        outputs=("density", "entangling"), name=name,
    ))


def fig6a_squeezer() -> ScenarioConfig:
    """Outer slits ten times the interior weight."""
    return _seven([10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0], "fig6a_squeezer")


def fig6b_sweeper() -> ScenarioConfig:
    """Central slit ten times the weight of the rest."""
    return _seven([1.0, 1.0, 1.0, 10.0, 1.0, 1.0, 1.0], "fig6b_sweeper")


BUILDERS: Dict[str, Callable[[], ScenarioConfig]] = {
    "fig1_double_slit": fig1_double_slit,
    "fig2_zero_velocity": fig2_zero_velocity,
    "fig3_phase_shift": fig3_phase_shift,
    "fig4a_three_slit": fig4a_three_slit,
    "fig4b_talbot": fig4b_talbot,
    "fig5a_graded": fig5a_graded,
    "fig5b_random": fig5b_random,
    "fig6a_squeezer": fig6a_squeezer,
    "fig6b_sweeper": fig6b_sweeper,
}

NAMES = tuple(BUILDERS)


def build(name: str) -> ScenarioConfig:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown gallery scenario {name!r}; known: {', '.join(NAMES)}") from None


def shipped_text(name: str) -> str:
    """Text of the config document shipped for ``name``."""
    return resources.files("subquantum").joinpath("gallery", f"{name}.toml").read_text(encoding="utf-8")


def load(name: str) -> ScenarioConfig:
    """Parse the shipped config document for ``name``."""
    from .config import parse_config

    return parse_config(shipped_text(name))
