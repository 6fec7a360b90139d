import math

import pytest
from hypothesis import given, strategies as st

from subquantum.errors import BadGrid, BadWeight, DomainTooSmall, EmptySlits, NonPositiveInput, NonPositiveSigma
from subquantum.model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec, derive_params, validate_scenario


def one_slit(sigma0=1.0, grid=None, **kw):
    grid = grid or GridSpec(-10.0, 10.0, 201, 1.0, 10)
    return ScenarioConfig(PhysicalParams(), (SlitSpec(0.0, sigma0, **kw),), grid)


def test_derive_params_natural_units():
    p = derive_params(2, 1, 1)
    assert p.diffusivity == 1.0
    assert p.kT == 2.0
    assert p.energy == 2.0


def test_derive_params_other_units():
    assert derive_params(1, 0.5, 1).diffusivity == 1.0


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, 0), (math.nan, 1, 1), (math.inf, 1, 1)])
def test_derive_params_rejects(bad):
    with pytest.raises(NonPositiveInput):
        derive_params(*bad)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_einstein_relation(hbar, mass, omega):
    p = derive_params(hbar, mass, omega)
    assert p.diffusivity * 2 * p.mass / p.hbar == pytest.approx(1.0, rel=1e-15)


def test_valid_single_slit():
    # sigma(1) = sqrt(2), 6 sigma ~ 8.49 <= 10
    cfg = one_slit()
    assert validate_scenario(cfg) is cfg


def test_grid_derived():
    g = GridSpec(-1.0, 1.0, 5, 2.0, 4)
    assert g.dx == 0.5
    assert g.dt == 0.5
    assert list(g.x) == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert list(g.t) == [0.0, 0.5, 1.0, 1.5, 2.0]


def test_negative_sigma():
    with pytest.raises(NonPositiveSigma) as exc:
        validate_scenario(one_slit(sigma0=-1.0))
    assert exc.value.where == ("slit", 0, "sigma0")


def test_bad_grid():
    with pytest.raises(BadGrid):
        validate_scenario(one_slit(grid=GridSpec(-10.0, 10.0, 2, 1.0, 10)))
    with pytest.raises(BadGrid):
        validate_scenario(one_slit(grid=GridSpec(-10.0, 10.0, 201, 1.0, 0)))
    with pytest.raises(BadGrid):
        validate_scenario(one_slit(grid=GridSpec(10.0, -10.0, 201, 1.0, 10)))


def test_empty_and_zero_weight():
    cfg = one_slit()
    with pytest.raises(EmptySlits):
        validate_scenario(ScenarioConfig(cfg.params, (), cfg.grid))
    with pytest.raises(EmptySlits):
        validate_scenario(one_slit(weight=0.0))
    with pytest.raises(BadWeight):
        validate_scenario(one_slit(weight=-0.5))


def test_domain_rule():
    # sigma(2) = sqrt(5); 6 sigma = 13.4 > 10
    with pytest.raises(DomainTooSmall):
        validate_scenario(one_slit(grid=GridSpec(-10.0, 10.0, 201, 2.0, 10)))
    # drifting slit leaves the domain
    with pytest.raises(DomainTooSmall):
        validate_scenario(one_slit(velocity_x=3.0))


def test_idempotent():
    cfg = one_slit()
    assert validate_scenario(validate_scenario(cfg)) == validate_scenario(cfg)


def test_overrides():
    cfg = one_slit().with_overrides(nx=301, outputs=("current", "density"))
    assert cfg.grid.nx == 301 and cfg.grid.nt == 10
    assert cfg.outputs == ("current", "density")
