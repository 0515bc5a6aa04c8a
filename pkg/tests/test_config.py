import math

import pytest
from hypothesis import given, strategies as st

from ultrafranson.config import ConfigError, load_config, parse_config, parse_number
from ultrafranson.reference import bundled


@pytest.mark.parametrize("text,value", [
    ("pi/4", math.pi / 4), ("3*pi/4", 3 * math.pi / 4), ("-pi", -math.pi),
    ("0.82", 0.82), ("1e-3", 1e-3), ("2 * (pi + 1)", 2 * (math.pi + 1)),
])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["pie", "__import__('os')", "1/0", "", "True", "[1]"])
def test_parse_number_rejects(text):
    with pytest.raises(ValueError):
        parse_number(text)


@given(st.floats(-1e6, 1e6))
def test_parse_number_plain_floats(x):
    assert parse_number(repr(x)) == x


def test_errors_carry_line_numbers():
    with pytest.raises(ConfigError) as err:
        parse_config("[source]\nsigma_s = 1\nbogus = 2\n", "x.cfg")
    assert err.value.line == 3 and "bogus" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse_config("[nosuch]\n")
    assert err.value.line == 1
    with pytest.raises(ConfigError) as err:
        parse_config("sigma_s = 1\n")
    assert err.value.line == 1
    with pytest.raises(ConfigError) as err:
        parse_config("[source]\nsigma_s = abc\n")
    assert err.value.line == 2
    with pytest.raises(ConfigError):
        parse_config("[source]\nsigma_s = 1\nsigma_s = 2\n")


def test_missing_block_named():
    cfg = parse_config("[franson]\ntau_s = 0\ntau_i = 0\n")
    with pytest.raises(ConfigError, match=r"\[source\]"):
        cfg.require("source", "franson")


def test_source_variants():
    spectral = parse_config("[source]\nlambda_s = 730\nlambda_i = 827\nsigma_s = 10\n"
                            "sigma_i = 9\nrho = -0.99\n").state()
    assert spectral.omega_s0 == pytest.approx(2 * math.pi * 299792.458 / 730)
    temporal = parse_config("[source]\nomega_s0 = 2500\nomega_i0 = 2300\ndt_s = 0.455\n"
                            "dt_i = 0.488\nrho_t = 0.979\n").state()
    assert temporal.rho == pytest.approx(-0.979)
    with pytest.raises(ConfigError):
        parse_config("[source]\nomega_s0 = 2500\nomega_i0 = 2300\nsigma_s = 1\nsigma_i = 1\n"
                     "rho = 0\ndt_s = 1\n").state()
    with pytest.raises(ConfigError):
        parse_config("[source]\nomega_s0 = 2500\nomega_i0 = 2300\nsigma_s = 1\n"
                     "sigma_i = 1\nrho = 2\n").state()


def test_hwp_angle_maps_to_phase():
    cfg = parse_config("[franson]\ntau_s = 0.8\ntau_i = 0.9\nhwp_s = pi/16\nphi_i = pi\n")
    assert cfg.phases() == pytest.approx((math.pi / 4, math.pi))
    with pytest.raises(ConfigError):
        parse_config("[franson]\ntau_s = 0.8\ntau_i = 0.9\nhwp_s = 0\nphi_s = 0\n").phases()


def test_dwell_validation():
    cfg = parse_config("[detector]\npair_rate_peak = 1\ndwell = 0\n")
    with pytest.raises(ConfigError, match="dwell"):
        cfg.count_model()


@pytest.mark.parametrize("name", ["fig3.cfg", "fig4.cfg", "bell.cfg", "table2.cfg",
                                  "table1_spectral.cfg", "table1_temporal.cfg"])
def test_bundled_configs_parse(name):
    cfg = load_config(bundled(name))
    if cfg.has("source"):
        cfg.state()


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/x.cfg")
