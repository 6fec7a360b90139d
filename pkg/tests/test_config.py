import math

import pytest
from hypothesis import given, strategies as st

from subquantum.config import parse_config, read_config, serialize
from subquantum.errors import (BadGrid, ConfigSyntaxError, DomainTooSmall, IoError, NonPositiveSigma, ScenarioError,
                               UnknownKey)
from subquantum.model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec

MINIMAL = """\
[grid]
x_min = -10
x_max = 10
nx = 201
t_max = 1
nt = 10

[[slit]]
center = 0
sigma0 = 1
"""


def test_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.params == PhysicalParams(2.0, 1.0, 1.0)
    assert cfg.slits == (SlitSpec(0.0, 1.0, 1.0, 0.0, 0.0),)
    assert cfg.grid == GridSpec(-10.0, 10.0, 201, 1.0, 10)
    assert cfg.outputs == ("density",)
    assert cfg.trajectory_seeds == 20
    assert cfg.name == "scenario"


def test_negative_sigma_line():
    text = MINIMAL.replace("sigma0 = 1", "sigma0 = -1")
    with pytest.raises(NonPositiveSigma) as exc:
        parse_config(text)
    assert exc.value.line == 10
    assert exc.value.machine_line().startswith("ERROR NonPositiveSigma line=10:")


def test_syntax_error_position():
    with pytest.raises(ConfigSyntaxError) as exc:
        parse_config(MINIMAL.replace("nx = 201", "nx = = 201"))
    assert exc.value.line == 4 and exc.value.column is not None
    assert "line=4 column=" in exc.value.machine_line()


def test_unknown_key_line():
    with pytest.raises(UnknownKey) as exc:
        parse_config(MINIMAL + "colour = 3\n")
    assert exc.value.line == 11
    with pytest.raises(UnknownKey):
        parse_config("[plot]\nx = 1\n" + MINIMAL)
    with pytest.raises(UnknownKey):
        parse_config("seed = 1\n" + MINIMAL)


def test_second_slit_error_points_at_its_block():
    text = MINIMAL + "\n[[slit]]\ncenter = 2\nsigma0 = 0\n"
    with pytest.raises(NonPositiveSigma) as exc:
        parse_config(text)
    assert exc.value.line == 14


def test_missing_and_mistyped():
    with pytest.raises(ScenarioError, match="grid"):
        parse_config("[[slit]]\ncenter = 0\nsigma0 = 1\n")
    with pytest.raises(ScenarioError, match="sigma0"):
        parse_config(MINIMAL.replace("sigma0 = 1\n", ""))
    with pytest.raises(ScenarioError, match="integer") as exc:
        parse_config(MINIMAL.replace("nx = 201", "nx = 201.0"))
    assert exc.value.line == 4
    with pytest.raises(ScenarioError):
        parse_config(MINIMAL.replace("center = 0", 'center = "zero"'))


def test_validation_errors_carry_lines():
    with pytest.raises(BadGrid) as exc:
        parse_config(MINIMAL.replace("nx = 201", "nx = 2"))
    assert exc.value.line == 4
    with pytest.raises(DomainTooSmall) as exc:
        parse_config(MINIMAL.replace("t_max = 1", "t_max = 3"))
    assert exc.value.line == 8  # the [[slit]] header


def test_outputs_table():
    cfg = parse_config(MINIMAL + '\n[outputs]\nproducts = ["trajectories", "density"]\ntrajectory_seeds = 5\n')
    assert cfg.outputs == ("density", "trajectories")
    assert cfg.trajectory_seeds == 5
    with pytest.raises(ScenarioError) as exc:
        parse_config(MINIMAL + '\n[outputs]\nproducts = ["movie"]\n')
    assert exc.value.line == 13


def test_round_trip_simple():
    cfg = parse_config(MINIMAL)
    assert parse_config(serialize(cfg)) == cfg
    assert serialize(parse_config(serialize(cfg))) == serialize(cfg)


finite = dict(allow_nan=False, allow_infinity=False)


@given(
    st.lists(st.tuples(st.floats(-5, 5, **finite), st.floats(0.2, 2, **finite), st.floats(0, 3, **finite),
                       st.floats(-5, 5, **finite), st.floats(-1, 1, **finite)), min_size=1, max_size=5),
    st.floats(0.01, 1.0, **finite),
    st.integers(3, 50),
    st.integers(1, 20),
    st.sets(st.sampled_from(["density", "current", "entangling", "trajectories", "oracle-diff"])),
)
def test_round_trip_property(slits, t_max, nx, nt, outs):
    specs = tuple(SlitSpec(c, s, w, ph, v) for c, s, w, ph, v in slits)
    specs = specs[:-1] + (SlitSpec(specs[-1].center, specs[-1].sigma0, 1.0, specs[-1].phase_offset,
                                   specs[-1].velocity_x),)
    half = 60.0
    cfg = ScenarioConfig(PhysicalParams(2.0, 1.0, 1.0), specs, GridSpec(-half, half, nx, t_max, nt),
                         outputs=tuple(outs) or ("density",), trajectory_seeds=3, name="prop")
    assert parse_config(serialize(cfg)) == cfg


def test_read_config_missing_file(tmp_path):
    with pytest.raises(IoError):
        read_config(tmp_path / "nope.toml")


def test_pi_offset_exact():
    cfg = parse_config(MINIMAL.replace("sigma0 = 1", f"sigma0 = 1\nphase_offset = {math.pi!r}"))
    assert cfg.slits[0].phase_offset == math.pi
