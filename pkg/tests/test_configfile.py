from fractions import Fraction

import numpy as np
import pytest

from thetanorm.cocycle import Configuration, regular_configuration, theta_direct
from thetanorm.configfile import ConfigParseError, format_config, load_config, parse_config
from thetanorm.ordercomb import densify

REGULAR3 = "\n".join(
    ["# factor k has angles k*i/7", "n = 3"]
    + [f"angles {k} = " + " ".join(str(Fraction(k * i % 7, 7)) for i in range(7)) for k in (1, 2, 3)]
)


def test_regular_file():
    cfg = parse_config(REGULAR3)
    assert cfg.factors == regular_configuration(3).factors
    assert theta_direct(cfg) == Fraction(11, 45)


def test_ranks_and_inferred_n():
    cfg = parse_config("ranks 1 = 1 2 3\n")
    assert cfg.factors == ((1, 2, 3),)


def test_duplicate_column_gives_zero():
    text = "ranks 1 = 1 2 2 3 4\nranks 2 = 1 3 3 2 4\n"
    assert theta_direct(parse_config(text)) == 0


def test_both_forms_must_agree():
    ok = "angles 1 = 0 1/3 2/3\nranks 1 = 1 2 3\n"
    assert parse_config(ok).factors == ((1, 2, 3),)
    with pytest.raises(ConfigParseError) as e:
        parse_config("angles 1 = 0 1/3 2/3\nranks 1 = 1 3 2\n")
    assert e.value.line == 2 and e.value.field == "ranks 1"


@pytest.mark.parametrize(
    "text, line, field",
    [
        ("n = 1\nangles 1 = 0 1/2 x\n", 2, "angles 1"),
        ("n = 1\nangles 1 = 0 1/2 1\n", 2, "angles 1"),
        ("ranks 1 = 1 3 4\n", 1, "ranks 1"),
        ("ranks 1 = 1 2\n", 1, "factor 1"),
        ("n = 2\nranks 1 = 1 2 3 4 5\n", None, "factors"),
        ("colour = red\n", 1, "colour"),
        ("n = zero\n", 1, "n"),
    ],
)
def test_parse_errors(text, line, field):
    with pytest.raises(ConfigParseError) as e:
        parse_config(text)
    assert (e.value.line, e.value.field) == (line, field)


def test_round_trip_random(tmp_path):
    rng = np.random.default_rng(5)
    for _ in range(10):
        angles = [[Fraction(int(v), 11) for v in rng.integers(0, 11, size=7)] for _ in range(3)]
        cfg = Configuration.from_angles(angles)
        path = tmp_path / "c.txt"
        path.write_text(format_config(cfg))
        back = load_config(path)
        assert back == cfg
        assert back.factors == tuple(densify(a) for a in angles)
