"""Closed-form fields of a single Gaussian channel.

A channel is a Gaussian of initial width ``sigma0`` whose centroid drifts
as ``center + velocity_x * t`` while its width grows ballistically::

    sigma(t)**2 = sigma0**2 + u0**2 * t**2,      u0 = D / sigma0

All functions broadcast over ``x`` and ``t``. Spatial derivatives are
analytic; nothing here differences a sampled field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeTime
from .model import GridSpec, PhysicalParams, SlitSpec

#: Densities are clamped from below to keep logs and ratios finite.
DENSITY_FLOOR = 1e-300

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _real(a):
    """Float array; longdouble input keeps its precision."""
    a = np.asarray(a)
    return a if a.dtype == np.longdouble else np.asarray(a, dtype=float)


def _scalar(out):
    return out if out.ndim or out.dtype == np.longdouble else float(out)


def _check_time(t):
    t = _real(t)
    if np.any(t < 0):
        raise NegativeTime(f"time must be >= 0, got min {t.min()!r}")
    return t


def initial_osmotic_speed(slit: SlitSpec, params: PhysicalParams) -> float:
    """u0 = D / sigma0."""
    return params.diffusivity / slit.sigma0


def sigma_at(slit: SlitSpec, params: PhysicalParams, t):
    t = _check_time(t)
    u0 = initial_osmotic_speed(slit, params)
    out = np.sqrt(slit.sigma0 ** 2 + (u0 * t) ** 2)
    return _scalar(out)


def sigma_rate(slit: SlitSpec, params: PhysicalParams, t):
    """d(sigma)/dt = u0**2 t / sigma."""
    t = _check_time(t)
    u0 = initial_osmotic_speed(slit, params)
    out = u0 ** 2 * t / np.sqrt(slit.sigma0 ** 2 + (u0 * t) ** 2)
    return _scalar(out)


def centroid(slit: SlitSpec, t):
    return slit.center + slit.velocity_x * _real(t)


def displacement(slit: SlitSpec, x, t):
    """xi = x - X - v t, the position relative to the moving centroid."""
    return _real(x) - centroid(slit, t)


def log_density(slit: SlitSpec, params: PhysicalParams, x, t):
    sig = sigma_at(slit, params, t)
    xi = displacement(slit, x, t)
    return -0.5 * (xi / sig) ** 2 - np.log(_SQRT_2PI * sig)


def density_at(slit: SlitSpec, params: PhysicalParams, x, t):
    """Unit-mass Gaussian density of the channel, clamped at DENSITY_FLOOR."""
    return np.maximum(np.exp(log_density(slit, params, x, t)), DENSITY_FLOOR)


def amplitude(slit: SlitSpec, params: PhysicalParams, x, t):
    """R = sqrt(P)."""
    return np.sqrt(density_at(slit, params, x, t))


def grad_log_density(slit: SlitSpec, params: PhysicalParams, x, t):
    """grad(P)/P = -xi / sigma**2 (analytic)."""
    sig = sigma_at(slit, params, t)
    return -displacement(slit, x, t) / sig ** 2


def osmotic_velocity(slit: SlitSpec, params: PhysicalParams, x, t):
    """u = -D grad(P)/P = xi D / sigma**2.

    Equal to -(hbar/m) grad(R)/R, since grad(P)/P = 2 grad(R)/R.
    """
    return -params.diffusivity * grad_log_density(slit, params, x, t)


def osmotic_momentum(slit: SlitSpec, params: PhysicalParams, x, t):
    """delta p = -(hbar/2) grad(P)/P = m u."""
    return -0.5 * params.hbar * grad_log_density(slit, params, x, t)


def total_velocity(slit: SlitSpec, params: PhysicalParams, x, t):
    """Average velocity field v + xi u0**2 t / sigma**2."""
    t = _check_time(t)
    u0 = initial_osmotic_speed(slit, params)
    sig = sigma_at(slit, params, t)
    return slit.velocity_x + displacement(slit, x, t) * u0 ** 2 * t / sig ** 2


def phase_action(slit: SlitSpec, params: PhysicalParams, x, t):
    """Action S of the channel, including the slit's phase offset.

    S = m v (x - X) + (m u0**2 / 2) (xi/sigma)**2 t - E t + hbar * dphi
    """
    t = _check_time(t)
    m = params.mass
    u0 = initial_osmotic_speed(slit, params)
    scaled = displacement(slit, x, t) / sigma_at(slit, params, t)
    x = _real(x)
    return (
        m * slit.velocity_x * (x - slit.center)
        + 0.5 * m * u0 ** 2 * scaled ** 2 * t
        - params.energy * t
        + params.hbar * slit.phase_offset
    )


def kinetic_temperature(slit: SlitSpec, params: PhysicalParams, x, t):
    """kT(x, t) = m u0**2 (xi/sigma)**2 of the path excitation field."""
    u0 = initial_osmotic_speed(slit, params)
    scaled = displacement(slit, x, t) / sigma_at(slit, params, t)
    return params.mass * u0 ** 2 * scaled ** 2


def phase_space_density(slit: SlitSpec, params: PhysicalParams, x, p, t):
    """Liouville phase-space distribution f(x, p, t) in the channel rest frame.

    ``x`` is measured from the slit center and ``p`` is the momentum
    fluctuation, so the caller shifts coordinates for moving channels.
    """
    t = _check_time(t)
    m = params.mass
    s0 = slit.sigma0
    u0 = initial_osmotic_speed(slit, params)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    norm = 1.0 / (2.0 * np.pi * s0 * m * u0)
    return norm * np.exp(-((x - p * t / m) ** 2) / (2 * s0 ** 2)) * np.exp(-(p ** 2) / (2 * m ** 2 * u0 ** 2))


@dataclass(frozen=True)
class ChannelField:
    """Channel fields sampled on a grid; arrays have shape (nt + 1, nx)."""

    slit: SlitSpec
    sigma_t: np.ndarray
    R: np.ndarray
    S: np.ndarray
    P: np.ndarray
    u: np.ndarray
    v_tot: np.ndarray
    xi: np.ndarray


def channel_field(slit: SlitSpec, params: PhysicalParams, grid: GridSpec) -> ChannelField:
    x = grid.x[None, :]
    t = grid.t[:, None]
    P = density_at(slit, params, x, t)
    return ChannelField(
        slit=slit,
        sigma_t=sigma_at(slit, params, grid.t),
        R=np.sqrt(P),
        S=phase_action(slit, params, x, t),
        P=P,
        u=osmotic_velocity(slit, params, x, t),
        v_tot=total_velocity(slit, params, x, t),
        xi=displacement(slit, x, t),
    )
