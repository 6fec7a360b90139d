"""Superposition of n Gaussian channels: intensity, current, velocity.

The classical interference formulas are summed over every pair of
channels::

    P_tot = sum_i w_i^2 P_i + sum_{i<j} 2 w_i w_j sqrt(P_i P_j) cos(phi_ij)
    J_tot = sum_i w_i^2 P_i v_i
          + sum_{i<j} w_i w_j sqrt(P_i P_j) [(v_i + v_j) cos(phi_ij)
                                             + (u_j - u_i) sin(phi_ij)]

with ``phi_ij = (S_i - S_j) / hbar``, ``v_i`` the channel's total average
velocity and ``u_i`` its osmotic velocity. The sin term is the entangling
current. Everything is renormalized once, by the analytic mass at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from . import channel as ch
from .errors import EmptyChannels, MismatchedParams, VanishingDensity
from .model import PhysicalParams, ScenarioConfig, SlitSpec

#: Relative density below which the velocity field is undefined.
DENSITY_EPS = 1e-12

# The pairwise density sum cancels at the level of P itself (the amplitude
# sum only at sqrt(P)), so rounding in log P and S/hbar is amplified by
# (sum_i w_i R_i)**2 / P_tot near nodes. P_tot is accumulated in extended
# precision to keep dark regions accurate.
_WIDE = np.longdouble


def _require(slits):
    if len(slits) == 0:
        raise EmptyChannels("at least one channel is required")


def pairwise_phase(slit_i: SlitSpec, slit_j: SlitSpec, params: PhysicalParams, x, t, params_j=None):
    """Relative phase phi_ij = (S_i - S_j) / hbar, offsets included."""
    if params_j is not None and params_j != params:
        raise MismatchedParams("channels must share physical parameters")
    return (ch.phase_action(slit_i, params, x, t) - ch.phase_action(slit_j, params, x, t)) / params.hbar


def symmetric_pair_phase(X: float, v_x: float, sigma0: float, params: PhysicalParams, x, t):
    """Closed form of phi_12 for slits at +X (velocity +v_x) and -X (velocity -v_x)."""
    s = SlitSpec(center=X, sigma0=sigma0, velocity_x=v_x)
    u0 = ch.initial_osmotic_speed(s, params)
    sig = ch.sigma_at(s, params, t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    D = params.diffusivity
    return 2 * params.mass * v_x * x / params.hbar - (X + v_x * t) * x / D * (u0 ** 2 * t / sig ** 2)


def _pair_overlap_t0(a: SlitSpec, b: SlitSpec, params: PhysicalParams) -> float:
    """Integral over x of sqrt(P_a P_b) cos(phi_ab) at t = 0, in closed form."""
    sa2, sb2 = a.sigma0 ** 2, b.sigma0 ** 2
    prec = 0.25 / sa2 + 0.25 / sb2
    mu = (0.25 * a.center / sa2 + 0.25 * b.center / sb2) / prec
    amp = (2 * np.pi * a.sigma0 * b.sigma0) ** -0.5 * np.exp(-((a.center - b.center) ** 2) / (4 * (sa2 + sb2)))
    # at t = 0 the relative phase is linear in x: k x + c
    k = params.mass * (a.velocity_x - b.velocity_x) / params.hbar
    c = (
        -params.mass * (a.velocity_x * a.center - b.velocity_x * b.center) / params.hbar
        + a.phase_offset
        - b.phase_offset
    )
    return float(amp * np.sqrt(np.pi / prec) * np.exp(-(k ** 2) / (4 * prec)) * np.cos(k * mu + c))


def initial_mass(slits: Sequence[SlitSpec], params: PhysicalParams) -> float:
    """Mass of the unnormalized superposition at t = 0."""
    _require(slits)
    total = sum(s.weight ** 2 for s in slits)
    for a, b in combinations(slits, 2):
        if a.weight and b.weight:
            total += 2 * a.weight * b.weight * _pair_overlap_t0(a, b, params)
    return float(total)


def density_floor(slits: Sequence[SlitSpec], params: PhysicalParams, t, normalize=True):
    """eps_P(t): 1e-12 times an upper bound on the peak of P_tot(., t)."""
    t = np.asarray(t, dtype=float)
    bound = sum(s.weight * (2 * np.pi * ch.sigma_at(s, params, t) ** 2) ** -0.25 for s in slits) ** 2
    if normalize:
        bound = bound / initial_mass(slits, params)
    return DENSITY_EPS * bound


def _terms(slits, params, x, t):
    """Per-channel (w, log P, v_tot, u, S/hbar) evaluated at (x, t)."""
    out = []
    for s in slits:
        if s.weight == 0:
            continue
        out.append(
            (
                s.weight,
                ch.log_density(s, params, x, t),
                ch.total_velocity(s, params, x, t),
                ch.osmotic_velocity(s, params, x, t),
                ch.phase_action(s, params, x, t) / params.hbar,
            )
        )
    return out


def _scale(slits, params, normalize):
    return 1.0 / initial_mass(slits, params) if normalize else 1.0


def total_density(slits: Sequence[SlitSpec], params: PhysicalParams, x, t, normalize=True):
    _require(slits)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    terms = _terms(slits, params, x.astype(_WIDE), t.astype(_WIDE))
    P = 0.0
    for w, lp, *_ in terms:
        P = P + w * w * np.exp(lp)
    for (wi, lpi, _, _, thi), (wj, lpj, _, _, thj) in combinations(terms, 2):
        P = P + 2 * wi * wj * np.exp(0.5 * (lpi + lpj)) * np.cos(thi - thj)
    out = np.asarray(P * _scale(slits, params, normalize), dtype=float)
    return float(out) if out.ndim == 0 else out


def total_current(slits: Sequence[SlitSpec], params: PhysicalParams, x, t, normalize=True):
    _require(slits)
    terms = _terms(slits, params, x, t)
    J = 0.0
    for w, lp, v, _, _ in terms:
        J = J + w * w * np.exp(lp) * v
    for (wi, lpi, vi, ui, thi), (wj, lpj, vj, uj, thj) in combinations(terms, 2):
        phi = thi - thj
        root = wi * wj * np.exp(0.5 * (lpi + lpj))
        J = J + root * ((vi + vj) * np.cos(phi) + (uj - ui) * np.sin(phi))
    return J * _scale(slits, params, normalize)


def entangling_current(slit_1: SlitSpec, slit_2: SlitSpec, params: PhysicalParams, x, t, norm=1.0):
    """The sin(phi_12) term of J_tot, from amplitude gradients.

    (hbar/m) w1 w2 (R2 grad R1 - R1 grad R2) sin(phi_12), divided by ``norm``.
    """
    lp1 = ch.log_density(slit_1, params, x, t)
    lp2 = ch.log_density(slit_2, params, x, t)
    # grad(R)/R = grad(P)/(2P)
    g1 = 0.5 * ch.grad_log_density(slit_1, params, x, t)
    g2 = 0.5 * ch.grad_log_density(slit_2, params, x, t)
    r1r2 = slit_1.weight * slit_2.weight * np.exp(0.5 * (lp1 + lp2))
    phi = pairwise_phase(slit_1, slit_2, params, x, t)
    return params.hbar / params.mass * r1r2 * (g1 - g2) * np.sin(phi) / norm


def entangling_current_heat(slit_1: SlitSpec, slit_2: SlitSpec, params: PhysicalParams, x, t, norm=1.0):
    """Entangling current from the heat-flow gradient form.

    sqrt(P1 P2) grad(Q1 - Q2) / (2 omega m) sin(phi_12), with Q_i = kT ln P_i.
    """
    lp1 = ch.log_density(slit_1, params, x, t)
    lp2 = ch.log_density(slit_2, params, x, t)
    grad_q1 = params.kT * ch.grad_log_density(slit_1, params, x, t)
    grad_q2 = params.kT * ch.grad_log_density(slit_2, params, x, t)
    root = slit_1.weight * slit_2.weight * np.exp(0.5 * (lp1 + lp2))
    phi = pairwise_phase(slit_1, slit_2, params, x, t)
    return root * (grad_q1 - grad_q2) / (2 * params.omega * params.mass) * np.sin(phi) / norm


def total_entangling_current(slits: Sequence[SlitSpec], params: PhysicalParams, x, t, normalize=True):
    """Sum of the pairwise entangling currents over all channel pairs."""
    _require(slits)
    norm = initial_mass(slits, params) if normalize else 1.0
    out = 0.0 * np.asarray(x, dtype=float) * np.asarray(t, dtype=float)
    for a, b in combinations([s for s in slits if s.weight], 2):
        out = out + entangling_current(a, b, params, x, t, norm=norm)
    return out


def average_velocity(slits: Sequence[SlitSpec], params: PhysicalParams, x, t):
    """v_bar = J_tot / P_tot; raises VanishingDensity below the density floor."""
    P = total_density(slits, params, x, t)
    floor = density_floor(slits, params, t)
    if np.any(P <= floor):
        raise VanishingDensity("P_tot is below the density floor; velocity undefined")
    return total_current(slits, params, x, t) / P


@dataclass(frozen=True)
class SuperposedField:
    """Grid fields of the superposition, shape (nt + 1, nx)."""

    P_tot: np.ndarray
    J_tot: np.ndarray
    J_e: np.ndarray
    v_bar_tot: np.ndarray
    vanishing: np.ndarray
    mass0: float
    cfg: ScenarioConfig

    def phase(self, i: int, j: int) -> np.ndarray:
        """Relative phase field phi_ij on the grid (computed on demand)."""
        g = self.cfg.grid
        return pairwise_phase(self.cfg.slits[i], self.cfg.slits[j], self.cfg.params, g.x[None, :], g.t[:, None])


def superpose(cfg: ScenarioConfig) -> SuperposedField:
    """Evaluate the superposition of all channels of ``cfg`` on its grid."""
    slits, params, grid = cfg.slits, cfg.params, cfg.grid
    x = grid.x[None, :]
    t = grid.t[:, None]
    mass0 = initial_mass(slits, params)
    P = total_density(slits, params, x, t)
    J = total_current(slits, params, x, t)
    Je = total_entangling_current(slits, params, x, t)
    floor = density_floor(slits, params, t)
    vanishing = P <= floor
    v = np.where(vanishing, 0.0, J / np.where(vanishing, 1.0, P))
    return SuperposedField(P_tot=P, J_tot=J, J_e=Je, v_bar_tot=v, vanishing=vanishing, mass0=mass0, cfg=cfg)
