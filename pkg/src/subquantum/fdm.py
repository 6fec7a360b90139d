"""Explicit finite-difference solver for ballistic diffusion.

The channel density obeys dP/dt = D_t d2P/dx2 with a diffusivity that grows
linearly in time, D_t = u0^2 t. One forward step reads

    P[k, n+1] = P[k, n] + r (P[k+1, n] - 2 P[k, n] + P[k-1, n]),
    r = D(t_{n+1}) dt / dx^2

with the diffusivity taken at the *end* of the step. Boundaries are
zero-flux (ghost cell mirrors its neighbour), so sum(P) * dx is conserved.

The solver works in the co-moving frame of the channel; drift is added
afterwards by :func:`shifted_history`. Interference phases are never
evolved on the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from . import channel as ch
from .errors import StabilityViolation
from .model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec

R_MAX = 0.5
R_TARGET = 0.4
MIN_SUBSTEP = 1e-300


@dataclass(frozen=True)
class DiffusionState:
    P: np.ndarray
    t_index: int
    t: float
    D_t: float
    r: float


def diffusivity_at(slit: SlitSpec, params: PhysicalParams, t: float) -> float:
    """D_t = u0^2 t = hbar^2 t / (4 m^2 sigma0^2)."""
    return ch.initial_osmotic_speed(slit, params) ** 2 * t


def max_stable_dt(slit: SlitSpec, params: PhysicalParams, t: float, dx: float) -> float:
    """Largest dt with D(t + dt) dt / dx^2 <= 1/2."""
    u2 = ch.initial_osmotic_speed(slit, params) ** 2
    return 0.5 * (-t + math.sqrt(t * t + 2 * dx * dx / u2))


def laplacian(P: np.ndarray) -> np.ndarray:
    """Three-point second difference (unscaled) with zero-flux ghosts."""
    padded = np.concatenate((P[:1], P, P[-1:]))
    return padded[2:] - 2 * P + padded[:-2]


def initial_state(slit: SlitSpec, params: PhysicalParams, xi: np.ndarray) -> DiffusionState:
    P0 = ch.density_at(SlitSpec(center=0.0, sigma0=slit.sigma0), params, xi, 0.0)
    return DiffusionState(P=P0, t_index=0, t=0.0, D_t=0.0, r=0.0)


def step(state: DiffusionState, params: PhysicalParams, slit: SlitSpec, dt: float, dx: float) -> DiffusionState:
    """Advance one forward-Euler step of length ``dt``."""
    t_next = state.t + dt
    D_next = diffusivity_at(slit, params, t_next)
    r = D_next * dt / dx ** 2
    if r > R_MAX:
        raise StabilityViolation(
            f"step {state.t_index + 1}: r = {r:.4g} > {R_MAX}; max stable dt = "
            f"{max_stable_dt(slit, params, state.t, dx):.6g}",
            step=state.t_index + 1,
            max_dt=max_stable_dt(slit, params, state.t, dx),
        )
    P = state.P + r * laplacian(state.P)
    return DiffusionState(P=P, t_index=state.t_index + 1, t=t_next, D_t=D_next, r=r)


@dataclass(frozen=True)
class DiffusionHistory:
    """Co-moving-frame density history, shape (nt + 1, nx).

    ``xi`` are the co-moving node coordinates; ``masses`` holds sum(P) dx
    after every executed sub-step; ``max_r`` is the largest stability
    number used.
    """

    P: np.ndarray
    xi: np.ndarray
    t: np.ndarray
    dx: float
    steps: int
    max_r: float
    masses: np.ndarray


def comoving_nodes(grid: GridSpec) -> np.ndarray:
    """Grid nodes re-centred on zero (same spacing and count as the lab grid)."""
    return grid.x - 0.5 * (grid.x_min + grid.x_max)


def run(slit: SlitSpec, params: PhysicalParams, grid: GridSpec, r_target: float = R_TARGET) -> DiffusionHistory:
    """Evolve the slit's initial Gaussian to every grid time.

    Each output interval is split into ceil(r / r_target) sub-steps, where r
    is the stability number of a single step spanning the whole interval.
    """
    xi = comoving_nodes(grid)
    dx = grid.dx
    times = grid.t
    state = initial_state(slit, params, xi)
    history = np.empty((len(times), len(xi)))
    history[0] = state.P
    masses = [state.P.sum() * dx]
    max_r = 0.0
    for k in range(1, len(times)):
        interval = times[k] - times[k - 1]
        r_out = diffusivity_at(slit, params, times[k]) * interval / dx ** 2
        n_sub = max(1, math.ceil(r_out / r_target))
        sub = interval / n_sub
        if sub < MIN_SUBSTEP:
            raise StabilityViolation(f"sub-step underflow at output {k}", step=state.t_index, max_dt=sub)
        for j in range(n_sub):
            # land exactly on the output time at the end of the interval
            dt = times[k] - state.t if j == n_sub - 1 else sub
            state = step(state, params, slit, dt, dx)
            max_r = max(max_r, state.r)
            masses.append(state.P.sum() * dx)
        history[k] = state.P
    return DiffusionHistory(P=history, xi=xi, t=times, dx=dx, steps=state.t_index, max_r=max_r,
                            masses=np.asarray(masses))


def shifted_history(history: DiffusionHistory, slit: SlitSpec, grid: GridSpec) -> np.ndarray:
    """Resample the co-moving solution at lab coordinates x - X - v t.

    Linear interpolation; samples falling outside the co-moving lattice read 0.
    """
    x = grid.x
    out = np.empty((len(history.t), len(x)))
    for k, t in enumerate(history.t):
        out[k] = np.interp(x - slit.center - slit.velocity_x * t, history.xi, history.P[k], left=0.0, right=0.0)
    return out


def variance(P: np.ndarray, x: np.ndarray) -> float:
    """Second central moment of a sampled density (Riemann sums)."""
    mass = P.sum()
    mean = (P * x).sum() / mass
    return float((P * (x - mean) ** 2).sum() / mass)


def superpose_fdm(cfg: ScenarioConfig) -> np.ndarray:
    """Interfere lattice-evolved channel densities using analytic phases.

    Returns P_tot on the lab grid, normalized by the analytic mass at t = 0.
    """
    from .superpose import initial_mass, pairwise_phase

    grid, params = cfg.grid, cfg.params
    x = grid.x[None, :]
    t = grid.t[:, None]
    live = [s for s in cfg.slits if s.weight > 0]
    dens = [np.maximum(shifted_history(run(s, params, grid), s, grid), 0.0) for s in live]
    P = sum(s.weight ** 2 * d for s, d in zip(live, dens))
    for (a, da), (b, db) in combinations(zip(live, dens), 2):
        P = P + 2 * a.weight * b.weight * np.sqrt(da * db) * np.cos(pairwise_phase(a, b, params, x, t))
    return P / initial_mass(cfg.slits, params)


def linf_error(slit: SlitSpec, params: PhysicalParams, grid: GridSpec, t_index: int = -1,
               hist: DiffusionHistory | None = None) -> float:
    """Max-norm error of the lattice solution against the analytic Gaussian, relative to its peak."""
    if hist is None:
        hist = run(slit, params, grid)
    t = float(hist.t[t_index])
    exact = ch.density_at(replace(slit, center=0.0, velocity_x=0.0), params, hist.xi, t)
    return float(np.max(np.abs(hist.P[t_index] - exact)) / exact.max())
