"""Quantum-mechanical reference quantities.

Channels are turned into complex wavefunctions psi_i = w_i R_i exp(i S_i/hbar)
and summed; density, current and quantum potential then follow from the
textbook definitions. Gaussian derivatives are written out here from
scratch so that this module shares no evaluation path with the classical
superposition it checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NegativeTime, VanishingDensity
from .model import PhysicalParams, SlitSpec

#: Relative density floor below which ratios such as grad(P)/P are refused.
DENSITY_EPS = 1e-12


def _log_psi_derivatives(slit: SlitSpec, params: PhysicalParams, x, t):
    """Return (log psi, d log psi / dx, d2 log psi / dx2) for one channel."""
    hbar, m, D = params.hbar, params.mass, params.diffusivity
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    spread = (D / slit.sigma0) ** 2  # u0^2
    var = slit.sigma0 ** 2 + spread * t * t
    xi = x - slit.center - slit.velocity_x * t

    log_r = -xi * xi / (4 * var) - 0.25 * np.log(2 * np.pi * var)
    theta = (
        m * slit.velocity_x * (x - slit.center) + 0.5 * m * spread * t * xi * xi / var - params.energy * t
    ) / hbar + slit.phase_offset
    g = -xi / (2 * var) + 1j * (m * slit.velocity_x + m * spread * t * xi / var) / hbar
    dg = -1 / (2 * var) + 1j * m * spread * t / (var * hbar)
    return log_r + 1j * theta, g, dg + 0 * g


@dataclass(frozen=True)
class WaveField:
    """Psi and its first two x-derivatives, evaluated on arbitrary points."""

    psi: np.ndarray
    dpsi: np.ndarray
    d2psi: np.ndarray
    params: PhysicalParams

    @property
    def psi_re(self):
        return self.psi.real

    @property
    def psi_im(self):
        return self.psi.imag

    @property
    def P_qm(self):
        return self.psi.real ** 2 + self.psi.imag ** 2

    @property
    def J_qm(self):
        return quantum_current(self)


def wave_field(slits: Sequence[SlitSpec], params: PhysicalParams, x, t, norm: float = 1.0) -> WaveField:
    """Psi = sum_i w_i R_i exp(i S_i / hbar), divided by sqrt(norm)."""
    psi = dpsi = d2psi = 0j
    for s in slits:
        if s.weight == 0:
            continue
        log_psi, g, dg = _log_psi_derivatives(s, params, x, t)
        term = s.weight * np.exp(log_psi)
        psi = psi + term
        dpsi = dpsi + term * g
        d2psi = d2psi + term * (g * g + dg)
    scale = 1.0 / math.sqrt(norm)
    return WaveField(np.asarray(psi) * scale, np.asarray(dpsi) * scale, np.asarray(d2psi) * scale, params)


def quantum_current(wave: WaveField):
    """J = (1/m) Re{psi* (-i hbar d/dx) psi}."""
    p = wave.params
    return (np.conj(wave.psi) * (-1j * p.hbar) * wave.dpsi).real / p.mass


def mass_by_quadrature(slits: Sequence[SlitSpec], params: PhysicalParams, t: float = 0.0) -> float:
    """Integral of |Psi|^2 over the real line by adaptive quadrature."""
    from scipy.integrate import quad

    lo = min(s.center + s.velocity_x * t for s in slits) - 40 * max(s.sigma0 for s in slits) - 40 * t
    hi = max(s.center + s.velocity_x * t for s in slits) + 40 * max(s.sigma0 for s in slits) + 40 * t
    breaks = sorted(s.center + s.velocity_x * t for s in slits)
    val, _ = quad(lambda xx: float(wave_field(slits, params, xx, t).P_qm), lo, hi, points=breaks, limit=500,
                  epsabs=1e-14, epsrel=1e-13)
    return val


def _density_derivatives(wave: WaveField):
    psi, d1, d2 = wave.psi, wave.dpsi, wave.d2psi
    P = wave.P_qm
    cross = (np.conj(psi) * d1).real
    dP = 2 * cross
    d2P = 2 * (np.conj(psi) * d2).real + 2 * (d1.real ** 2 + d1.imag ** 2)
    return P, dP, d2P, cross


def _check_floor(P, floor):
    if floor is None:
        floor = DENSITY_EPS * np.max(P)
    if np.any(P <= floor):
        raise VanishingDensity("density at or below floor; quantum potential undefined")


def quantum_potential(wave: WaveField, floor=None):
    """Quantum potential in two forms.

    Returns ``(form_a, form_b)`` with

    * form A: (hbar^2 / 4m) [ (1/2)(P'/P)^2 - P''/P ]
    * form B: -(hbar^2 / 2m) R''/R, R = |psi|
    """
    p = wave.params
    P, dP, d2P, cross = _density_derivatives(wave)
    _check_floor(P, floor)
    a = dP / P
    form_a = p.hbar ** 2 / (4 * p.mass) * (0.5 * a * a - d2P / P)

    R = np.sqrt(P)
    dR = cross / R
    d1 = wave.dpsi
    d2R = ((np.conj(wave.psi) * wave.d2psi).real + d1.real ** 2 + d1.imag ** 2 - dR * dR) / R
    form_b = -p.hbar ** 2 / (2 * p.mass) * d2R / R
    return form_a, form_b


def thermo_potential(wave: WaveField, floor=None):
    """Quantum potential written through the heat flow Q = kT ln P.

    With kT = hbar omega, grad(Q)/(hbar omega) = P'/P and
    lap(Q)/(hbar omega) = P''/P - (P'/P)^2, which turns form A into

        U = -(hbar^2 / 4m) [ (1/2)(grad Q / hbar omega)^2 + lap Q / hbar omega ]
    """
    p = wave.params
    P, dP, d2P, _ = _density_derivatives(wave)
    _check_floor(P, floor)
    hw = p.hbar * p.omega
    grad_q = p.kT * dP / P
    lap_q = p.kT * (d2P / P - (dP / P) ** 2)
    return -p.hbar ** 2 / (4 * p.mass) * (0.5 * (grad_q / hw) ** 2 + lap_q / hw)


def heat_flow(slit: SlitSpec, params: PhysicalParams, x, t):
    """Q_i = kT ln(P_i / max P_i); the additive constant drops out of gradients."""
    log_psi, _, _ = _log_psi_derivatives(slit, params, x, t)
    var = slit.sigma0 ** 2 + (params.diffusivity / slit.sigma0) ** 2 * np.asarray(t, dtype=float) ** 2
    log_peak = -0.5 * np.log(2 * np.pi * var)
    return params.kT * (2 * log_psi.real - log_peak)


def heat_flow_gradient(slit: SlitSpec, params: PhysicalParams, x, t):
    _, g, _ = _log_psi_derivatives(slit, params, x, t)
    return params.kT * 2 * g.real


def heat_velocity(slit: SlitSpec, params: PhysicalParams, x, t):
    """u = grad(Q) / (2 omega m)."""
    return heat_flow_gradient(slit, params, x, t) / (2 * params.omega * params.mass)


def free_gaussian_packet(slit: SlitSpec, params: PhysicalParams, x, t):
    """Textbook free-particle Gaussian packet launched from the slit.

    psi(x, 0) = (2 pi sigma0^2)^(-1/4) exp(-(x-X)^2 / 4 sigma0^2 + i k (x - X)),
    k = m v / hbar, evolved exactly under H = p^2 / 2m. The slit weight and
    phase offset are applied as a complex prefactor.
    """
    hbar, m = params.hbar, params.mass
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    k = m * slit.velocity_x / hbar
    tau = slit.sigma0 ** 2 / params.diffusivity
    z = 1 + 1j * t / tau
    xi = x - slit.center - slit.velocity_x * t
    omega_k = hbar * k * k / (2 * m)
    psi = (
        (2 * np.pi * slit.sigma0 ** 2) ** -0.25
        / np.sqrt(z)
        * np.exp(-xi * xi / (4 * slit.sigma0 ** 2 * z) + 1j * (k * (x - slit.center) - omega_k * t))
    )
    return slit.weight * np.exp(1j * slit.phase_offset) * psi


# --- modular momentum -------------------------------------------------------


@dataclass(frozen=True)
class ModularDecomposition:
    n: int
    X_n: float
    delta_X: float
    delta_p_mod: float


def _phase_per_separation(x: float, t: float, sigma0: float, params: PhysicalParams) -> float:
    """kappa such that phi_12 = -X * kappa for slits at +-X with v_x = 0."""
    D = params.diffusivity
    u0 = D / sigma0
    var = sigma0 ** 2 + u0 ** 2 * t ** 2
    return x / D * u0 ** 2 * t / var


def modular_decompose(X: float, x: float, t: float, sigma0: float, params: PhysicalParams,
                      side: str = "right") -> ModularDecomposition:
    """Split the half-separation X into X_n (phi_12 = 2 n pi) plus a remainder.

    phi_12 = -X x (1/D) u0^2 t / sigma^2 at the evaluation point ``x``. The
    winding count is truncated toward zero, so |phi_12(delta_X)| < 2 pi and a
    geometry already below one turn keeps n = 0. Degenerate points (x = 0 or
    t = 0, where phi_12 vanishes identically) return n = 0, delta_X = X.
    """
    kappa = _phase_per_separation(x, t, sigma0, params)
    if kappa == 0.0:
        return ModularDecomposition(0, 0.0, float(X), momentum_shift(X, sigma0, params, t, side))
    turns = -X * kappa / (2 * math.pi)
    nearest = round(turns)
    if nearest != 0 and abs(turns - nearest) < 1e-9:
        # exact multiple of 2 pi up to round-off
        n, X_n, delta_X = int(nearest), float(X), 0.0
    else:
        n = int(math.trunc(turns))
        X_n = -2 * math.pi * n / kappa
        delta_X = X - X_n
    return ModularDecomposition(n, X_n, delta_X, momentum_shift(delta_X, sigma0, params, t, side))


def _sign(side):
    if side not in ("right", "left"):
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    return 1.0 if side == "right" else -1.0


def momentum_shift(delta_X: float, sigma0: float, params: PhysicalParams, t: float, side: str = "right") -> float:
    """Delta p_mod = +- m delta_X D^2 t / (sigma^2 sigma0^2)."""
    if t < 0:
        raise NegativeTime(f"time must be >= 0, got {t!r}")
    D = params.diffusivity
    var = sigma0 ** 2 + (D / sigma0) ** 2 * t ** 2
    return _sign(side) * params.mass * delta_X * D ** 2 * t / (var * sigma0 ** 2)


def momentum_shift_rate_form(delta_X: float, sigma0: float, params: PhysicalParams, t: float,
                             side: str = "right", sigma_dot: float | None = None) -> float:
    """Delta p_mod = +- m delta_X sigma_dot / sigma.

    ``sigma_dot`` defaults to the analytic rate; pass a finite-difference
    estimate to cross-check.
    """
    D = params.diffusivity
    u0 = D / sigma0
    sigma = math.sqrt(sigma0 ** 2 + u0 ** 2 * t ** 2)
    if sigma_dot is None:
        sigma_dot = u0 ** 2 * t / sigma
    return _sign(side) * params.mass * delta_X * sigma_dot / sigma


# --- classical vs oracle ----------------------------------------------------


@dataclass(frozen=True)
class OracleDiff:
    """Max and mean relative deviations of the classical fields from the oracle."""

    max_rel_P: float
    mean_rel_P: float
    max_rel_J: float
    mean_rel_J: float
    points: int


def compare_with_oracle(field, rel_floor: float = DENSITY_EPS) -> OracleDiff:
    """Relative deviation of (P_tot, J_tot) from (|Psi|^2, J_qm) on the grid.

    Only points with P_tot above ``rel_floor`` times the peak of their time
    row count. P is compared pointwise. The current vanishes on symmetry
    axes while the density does not, so its deviation is measured against
    |J_qm| + P_qm u_ref, with u_ref the largest initial osmotic speed of
    the scenario.
    """
    cfg = field.cfg
    g = cfg.grid
    wave = wave_field(cfg.slits, cfg.params, g.x[None, :], g.t[:, None], norm=field.mass0)
    Pq, Jq = wave.P_qm, wave.J_qm
    mask = field.P_tot > rel_floor * field.P_tot.max(axis=1, keepdims=True)
    u_ref = max(cfg.params.diffusivity / s.sigma0 for s in cfg.slits if s.weight > 0)
    dP = np.abs(field.P_tot - Pq)[mask] / Pq[mask]
    dJ = np.abs(field.J_tot - Jq)[mask] / (np.abs(Jq[mask]) + Pq[mask] * u_ref)
    return OracleDiff(float(dP.max()), float(dP.mean()), float(dJ.max()), float(dJ.mean()), int(mask.sum()))
