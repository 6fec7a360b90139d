import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subquantum import channel as ch
from subquantum.errors import NotAGrating
from subquantum.model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec, validate_scenario
from subquantum.superpose import superpose
from subquantum.trajectories import (Seed, TrajectorySet, axis_crossings, cell_confinement, crossing_check,
                                     integrate, kink_diagnostics, seed_positions)

P = PhysicalParams()

UNIT_QUARTILE = -0.6744897501960817  # standard normal inverse cdf at 1/4


def test_seed_examples():
    assert seed_positions([SlitSpec(0.0, 1.0)], 1) == [Seed(0.0, 0)]
    xs = [s.x0 for s in seed_positions([SlitSpec(0.0, 1.0)], 3)]
    assert xs == pytest.approx([UNIT_QUARTILE, 0.0, -UNIT_QUARTILE], abs=1e-15)
    assert seed_positions([SlitSpec(0.0, 1.0, weight=0.0), SlitSpec(2.0, 1.0)], 2)[0].slit == 1
    with pytest.raises(ValueError):
        seed_positions([SlitSpec(0.0, 1.0)], 0)


def test_axis_seed_stays_on_axis(double_slit):
    t = integrate(double_slit, [Seed(0.0, 0)])
    assert np.max(np.abs(t.paths[0])) < 1e-6


def free_cfg(nt=200):
    return validate_scenario(ScenarioConfig(P, (SlitSpec(0.0, 1.0),), GridSpec(-16.0, 16.0, 641, 2.0, nt)))


def test_free_particle_law():
    cfg = free_cfg()
    seeds = seed_positions(cfg.slits, 20)
    ts = integrate(cfg, seeds)
    x0 = np.array([s.x0 for s in seeds])[:, None]
    exact = x0 * np.array([ch.sigma_at(cfg.slits[0], P, t) for t in ts.t])[None, :]
    assert np.max(np.abs(ts.paths - exact)) < 1e-4
    assert ts.metadata["step"] == cfg.grid.dt / 4


def test_step_halving_single_channel():
    cfg = free_cfg()
    seeds = seed_positions(cfg.slits, 20)
    a = integrate(cfg, seeds)
    b = integrate(cfg, seeds, substeps=8)
    assert np.max(np.abs(a.paths - b.paths)) < 1e-6


def test_no_crossings_double_slit(double_slit):
    ts = integrate(double_slit, seed_positions(double_slit.slits, 20))
    assert crossing_check(ts) == []
    assert axis_crossings(ts) == []


def test_crossing_check_detects_swap(double_slit):
    ts = integrate(double_slit, seed_positions(double_slit.slits, 5))
    paths = ts.paths.copy()
    order = np.argsort([s.x0 for s in ts.seeds])
    i, j = order[2], order[3]
    k = 40
    paths[i, k], paths[j, k] = paths[j, k], paths[i, k]
    bad = replace(ts, paths=paths)
    report = crossing_check(bad)
    assert len(report) == 1
    assert report[0][2] == pytest.approx(ts.t[k])


def test_mirrored_pair_no_crossing():
    t = np.linspace(0, 1, 5)
    paths = np.vstack([0.5 + t, -(0.5 + t)])
    ts = TrajectorySet([Seed(0.5, 0), Seed(-0.5, 1)], t, paths, np.zeros(2, bool), [None, None], 0.1)
    assert crossing_check(ts) == [] and axis_crossings(ts) == []


def test_left_domain_truncates():
    slits = (SlitSpec(0.0, 1.0),)
    cfg = validate_scenario(ScenarioConfig(P, slits, GridSpec(-10.0, 10.0, 201, 1.0, 20)))
    ts = integrate(cfg, [Seed(9.5, 0)])
    assert ts.left_domain[0] is not None
    k = np.flatnonzero(np.isnan(ts.paths[0]))[0]
    assert np.all(np.isnan(ts.paths[0, k:]))
    assert np.all(np.isfinite(ts.paths[0, :k]))


def test_vanishing_region_holds_and_flags():
    # a seed far in the tail of a narrow slit sits where P_tot is below the floor
    cfg = validate_scenario(ScenarioConfig(P, (SlitSpec(0.0, 0.5),), GridSpec(-20.0, 20.0, 401, 0.5, 10)))
    ts = integrate(cfg, [Seed(19.0, 0), Seed(0.3, 0)])
    assert ts.held[0] and not ts.held[1]
    assert np.all(ts.paths[0] == 19.0)


def test_seed_outside_domain(double_slit):
    with pytest.raises(ValueError):
        integrate(double_slit, [Seed(100.0, 0)])


def grating(n, d=4.0, s0=0.8):
    slits = tuple(SlitSpec(0.5 * (n - 1) * d - k * d, s0) for k in range(n))
    return slits


def test_not_a_grating(double_slit):
    ts = integrate(double_slit, seed_positions(double_slit.slits, 2))
    with pytest.raises(NotAGrating):
        cell_confinement(ts, double_slit)
    single = replace(double_slit, slits=(SlitSpec(0.0, 0.5),))
    with pytest.raises(NotAGrating):
        cell_confinement(ts, single)
    uneven = replace(double_slit, slits=(SlitSpec(-6, 0.5), SlitSpec(-1, 0.5), SlitSpec(1, 0.5), SlitSpec(6, 0.5)))
    with pytest.raises(NotAGrating):
        cell_confinement(ts, uneven)


def test_talbot_cells():
    slits = grating(4)
    t_talbot = 16 / (math.pi * P.hbar)
    cfg = validate_scenario(ScenarioConfig(P, slits, GridSpec(-27.0, 27.0, 1081, t_talbot, 250)))
    ts = integrate(cfg, seed_positions(slits, 20))
    assert cell_confinement(ts, cfg) >= 0.95
    assert crossing_check(ts) == []


def small_pair(offset=0.0, shift=0.0):
    slits = (SlitSpec(2.5 + shift, 0.6, velocity_x=-0.4), SlitSpec(-2.0 + shift, 0.7, weight=0.8, phase_offset=0.9))
    return ScenarioConfig(P, slits, GridSpec(-20.0 + shift, 20.0 + shift, 401, 1.5, 60))


@settings(max_examples=8)
@given(st.integers(-12, 12))
def test_translation_equivariance(k):
    a = k * 0.25  # keep the grid nodes exactly representable
    base, moved = small_pair(), small_pair(shift=a)
    seeds = seed_positions(base.slits, 5)
    s_moved = [Seed(s.x0 + a, s.slit) for s in seeds]
    p0 = integrate(base, seeds).paths
    p1 = integrate(moved, s_moved).paths
    assert np.max(np.abs(p1 - a - p0)) < 1e-9


def test_reflection_symmetry():
    base = small_pair()
    mirrored = replace(base, slits=tuple(replace(s, center=-s.center, velocity_x=-s.velocity_x)
                                         for s in base.slits))
    seeds = seed_positions(base.slits, 7)
    p0 = integrate(base, seeds).paths
    p1 = integrate(mirrored, [Seed(-s.x0, s.slit) for s in seeds]).paths
    assert np.max(np.abs(p1 + p0)) < 1e-9


def test_density_transport_ks(double_slit):
    f = superpose(double_slit)
    ts = integrate(double_slit, seed_positions(double_slit.slits, 500), field=f)
    g = double_slit.grid
    for k in (g.nt // 2, g.nt):
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (f.P_tot[k, 1:] + f.P_tot[k, :-1]) * g.dx)])
        cdf /= cdf[-1]
        xs = np.sort(ts.paths[:, k])
        n = len(xs)
        F = np.interp(xs, g.x, cdf)
        ks = max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))
        assert ks < 0.05


def test_kink_diagnostic_positive_correlation(double_slit):
    f = superpose(double_slit)
    ts = integrate(double_slit, seed_positions(double_slit.slits, 20), field=f)
    kinks = kink_diagnostics(ts, f, double_slit.grid)
    assert len(kinks) == 40
    pct = np.array([k.je_percentile for k in kinks])
    assert np.all((0 <= pct) & (pct <= 1))
    # turns sit at larger |J_e| than a random occupied point would
    assert np.median(pct) > 0.5
