"""Averaged particle trajectories through the emergent velocity field.

Paths solve dx/dt = J_tot / P_tot with classical RK4. The velocity is read
from the grid-sampled field by bilinear interpolation in (x, t); wherever a
cell touches a node whose density is below the floor the velocity is
undefined, the particle holds its position and the path is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotAGrating
from .model import GridSpec, ScenarioConfig, SlitSpec
from .superpose import SuperposedField, superpose


@dataclass(frozen=True)
class Seed:
    x0: float
    slit: int


def seed_positions(slits: Sequence[SlitSpec], count_per_slit: int) -> List[Seed]:
    """Quantile seeds k/(count+1), k = 1..count, of each slit's initial Gaussian.

    Slits with zero weight get no seeds.
    """
    if count_per_slit < 1:
        raise ValueError("count_per_slit must be >= 1")
    z = [NormalDist().inv_cdf(k / (count_per_slit + 1)) for k in range(1, count_per_slit + 1)]
    seeds = []
    for i, s in enumerate(slits):
        if s.weight > 0:
            seeds.extend(Seed(s.center + s.sigma0 * zk, i) for zk in z)
    return seeds


@dataclass
class TrajectorySet:
    """Paths sampled at the grid times.

    ``paths[i, k]`` is the position of seed ``i`` at ``t[k]``; NaN after the
    path left the domain. ``held[i]`` marks paths that sat in a vanishing
    density cell at some point; ``left_domain[i]`` is the time the path
    left, or None.
    """

    seeds: List[Seed]
    t: np.ndarray
    paths: np.ndarray
    held: np.ndarray
    left_domain: List[Optional[float]]
    step: float
    scenario: str = ""
    metadata: dict = field(default_factory=dict)


class VelocityInterpolator:
    """Bilinear interpolation of a grid velocity field with a vanishing mask."""

    def __init__(self, velocity: np.ndarray, vanishing: np.ndarray, grid: GridSpec):
        self.v = velocity
        self.bad = vanishing
        self.grid = grid

    def __call__(self, x: np.ndarray, t: float):
        g = self.grid
        fx = (x - g.x_min) / g.dx
        j = np.clip(np.floor(fx).astype(int), 0, g.nx - 2)
        ax = np.clip(fx - j, 0.0, 1.0)
        ft = t / g.dt
        k = min(max(int(np.floor(ft)), 0), g.nt - 1)
        at = min(max(ft - k, 0.0), 1.0)
        v0 = (1 - ax) * self.v[k, j] + ax * self.v[k, j + 1]
        v1 = (1 - ax) * self.v[k + 1, j] + ax * self.v[k + 1, j + 1]
        held = self.bad[k, j] | self.bad[k, j + 1] | self.bad[k + 1, j] | self.bad[k + 1, j + 1]
        v = (1 - at) * v0 + at * v1
        return np.where(held, 0.0, v), held


def integrate(
    cfg: ScenarioConfig,
    seeds: Sequence[Seed],
    field: Optional[SuperposedField] = None,
    substeps: int = 4,
) -> TrajectorySet:
    """RK4 integration of every seed with step dt / substeps (vectorized over seeds)."""
    grid = cfg.grid
    if field is None:
        field = superpose(cfg)
    vel = VelocityInterpolator(field.v_bar_tot, field.vanishing, grid)
    x = np.array([s.x0 for s in seeds], dtype=float)
    alive = (x >= grid.x_min) & (x <= grid.x_max)
    if not alive.all():
        raise ValueError("every seed must lie inside the domain")
    times = grid.t
    paths = np.full((len(seeds), len(times)), np.nan)
    paths[:, 0] = x
    held = np.zeros(len(seeds), dtype=bool)
    left: List[Optional[float]] = [None] * len(seeds)
    h = grid.dt / substeps
    for k in range(grid.nt):
        for j in range(substeps):
            t = times[k] + j * h
            k1, b1 = vel(x, t)
            k2, b2 = vel(x + 0.5 * h * k1, t + 0.5 * h)
            k3, b3 = vel(x + 0.5 * h * k2, t + 0.5 * h)
            k4, b4 = vel(x + h * k3, t + h)
            x = np.where(alive, x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), x)
            held |= alive & (b1 | b2 | b3 | b4)
            out = alive & ((x < grid.x_min) | (x > grid.x_max))
            for i in np.flatnonzero(out):
                left[i] = float(t + h)
            alive &= ~out
        paths[:, k + 1] = np.where(alive, x, np.nan)
    return TrajectorySet(
        seeds=list(seeds),
        t=times,
        paths=paths,
        held=held,
        left_domain=left,
        step=h,
        scenario=cfg.name,
        metadata={"integrator": "rk4", "step": h, "substeps": substeps},
    )


def crossing_check(tset: TrajectorySet) -> List[Tuple[int, int, float]]:
    """Every pair (i, j) whose x-order departs from the seed order, with the first such time."""
    order = np.argsort([s.x0 for s in tset.seeds], kind="stable")
    report = []
    P = tset.paths
    for a in range(len(order)):
        i = order[a]
        for b in range(a + 1, len(order)):
            j = order[b]
            if tset.seeds[i].x0 == tset.seeds[j].x0:
                continue
            swapped = np.flatnonzero(P[i] > P[j])
            if swapped.size:
                report.append((int(i), int(j), float(tset.t[swapped[0]])))
    return report


def axis_crossings(tset: TrajectorySet, axis: float = 0.0) -> List[Tuple[int, float]]:
    """Paths that end up strictly on the other side of ``axis`` from their seed."""
    report = []
    for i, s in enumerate(tset.seeds):
        side = np.sign(s.x0 - axis)
        if side == 0:
            continue
        rel = np.sign(tset.paths[i] - axis)
        bad = np.flatnonzero(rel == -side)
        if bad.size:
            report.append((i, float(tset.t[bad[0]])))
    return report


def grating_spacing(slits: Sequence[SlitSpec], rtol: float = 1e-9) -> float:
    live = sorted(s.center for s in slits if s.weight > 0)
    if len(live) < 4:
        raise NotAGrating(f"a grating needs at least 4 slits, got {len(live)}")
    gaps = np.diff(live)
    if not np.allclose(gaps, gaps[0], rtol=rtol, atol=0.0):
        raise NotAGrating("slit spacing is not uniform")
    return float(gaps[0])


def cell_confinement(tset: TrajectorySet, cfg: ScenarioConfig) -> float:
    """Fraction of interior-slit paths that stay within their slit center +- d/2."""
    d = grating_spacing(cfg.slits)
    centers = sorted(s.center for s in cfg.slits if s.weight > 0)
    interior = {i for i, s in enumerate(cfg.slits) if s.weight > 0 and centers[0] < s.center < centers[-1]}
    picked = [i for i, s in enumerate(tset.seeds) if s.slit in interior]
    if not picked:
        raise NotAGrating("no trajectories seeded from interior slits")
    kept = 0
    for i in picked:
        c = cfg.slits[tset.seeds[i].slit].center
        path = tset.paths[i]
        if np.all(np.isfinite(path)) and np.all(np.abs(path - c) < 0.5 * d):
            kept += 1
    return kept / len(picked)


@dataclass(frozen=True)
class Kink:
    path: int
    t: float
    x: float
    accel: float
    je_percentile: float


def kink_diagnostics(tset: TrajectorySet, field: SuperposedField, grid: GridSpec,
                     occupied: float = 1e-3) -> List[Kink]:
    """Locate the sharpest turn of each path and rank |J_e| there.

    The turn is the time of maximal |d v / dt| along the path (second
    differences of the sampled positions). ``je_percentile`` is the share of
    occupied grid points in the same time row (P_tot above ``occupied``
    times the row peak) whose |J_e| is below the value at the turn.
    """
    out = []
    dt = grid.dt
    for i in range(len(tset.seeds)):
        path = tset.paths[i]
        if not np.all(np.isfinite(path)) or len(path) < 3:
            continue
        accel = np.abs(np.diff(path, 2)) / dt ** 2
        k = int(np.argmax(accel)) + 1
        row = np.abs(field.J_e[k])
        live = field.P_tot[k] > occupied * field.P_tot[k].max()
        je = np.interp(path[k], grid.x, row)
        pct = float(np.mean(row[live] < je))
        out.append(Kink(i, float(tset.t[k]), float(path[k]), float(accel[k - 1]), pct))
    return out
