import json

import pytest

from stefan_bim.config import ConfigError, RunConfig
from stefan_bim.iteration import FluxIntegral, LinearSlope, UserCurve


def test_defaults_and_example():
    cfg = RunConfig.from_dict({"example": "ii", "dxi": 0.1})
    spec, exact = cfg.problem()
    assert exact is not None
    disc = cfg.discretization()
    assert disc.N == 10 and disc.M == 10
    assert cfg.initial_guess(spec, disc) == LinearSlope(1.0)


def test_beta_override_drops_exact():
    spec, exact = RunConfig(example="ii", beta="1 + x").problem()
    assert exact is None and spec.constant_beta is None
    spec, exact = RunConfig(example="i", beta="2").problem()
    assert exact is None and spec.constant_beta == 2.0


def test_expressions_and_initial_kinds(tmp_path):
    cfg = RunConfig(neumann_q="exp(t)", initial={"kind": "flux"})
    spec, _ = cfg.problem()
    assert cfg.initial_guess(spec, cfg.discretization()) == FluxIntegral()
    assert isinstance(RunConfig(neumann_q="1").initial_guess(spec, cfg.discretization()),
                      FluxIntegral)
    from stefan_bim.grid import BoundaryCurve, Discretization, write_curve_csv
    disc = Discretization.from_steps(0.05)
    write_curve_csv(tmp_path / "b.csv", BoundaryCurve(disc.t), disc)
    cfg = RunConfig(example="ii", initial={"kind": "file", "path": str(tmp_path / "b.csv")})
    assert isinstance(cfg.initial_guess(spec, disc), UserCurve)
    with pytest.raises(ConfigError):
        cfg.initial_guess(spec, Discretization.from_steps(0.1))


@pytest.mark.parametrize("data", [
    {"example": "ii", "colour": 1},
    {"example": "ii", "initial": 3},
    [],
])
def test_bad_dicts(data):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


@pytest.mark.parametrize("kwargs", [
    {"example": "iv"},
    {"example": "ii", "neumann_q": "1"},
    {"dirichlet_g": "log(t)"},
    {"example": "iii", "eps": 2.0},
    {"example": "ii", "initial": {"kind": "spline"}},
    {"example": "ii", "initial": {"kind": "file"}},
])
def test_bad_problems(kwargs):
    cfg = RunConfig(**kwargs)
    with pytest.raises(ConfigError):
        spec, _ = cfg.problem()
        cfg.initial_guess(spec, cfg.discretization())


def test_load_file(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"example": "i", "dxi": 0.025, "alpha": 0.3}))
    cfg = RunConfig.load(p)
    assert cfg.alpha == 0.3 and cfg.discretization().N == 40
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(p)
    with pytest.raises(ConfigError):
        RunConfig(dxi=0.03).discretization()
