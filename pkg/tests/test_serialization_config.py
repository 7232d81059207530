from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sievecraft.config import ConfigError, parse_config
from sievecraft.serialization import dumps, dumps_line


def test_fixed_precision_floats():
    assert dumps_line({"x": 0.1}) == '{"x": 0.10000000000000001}'
    assert dumps_line([1.0, 2, None, True, "a"]) == '[1.0, 2, null, true, "a"]'
    assert dumps_line({"f": Fraction(1, 3)}) == '{"f": "1/3"}'
    assert dumps_line(float("nan")) == "null"


@given(st.recursive(st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False, allow_infinity=False)
                    | st.text(max_size=5),
                    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=3), inner, max_size=3),
                    max_leaves=10))
def test_round_trip_through_json(obj):
    assert json.loads(dumps(obj)) == obj
    assert json.loads(dumps_line(obj)) == obj


def test_config_parsing():
    cfg = parse_config('domain = "fq"\nq = 2\nd0 = 5\nmodulus-bound = 10\nn = [10, 12]\n')
    assert cfg == {"domain": "fq", "q": 2, "d0": 5, "modulus_bound": 10, "n": [10, 12]}
    with pytest.raises(ConfigError):
        parse_config("[section]\nx = 1\n")
    with pytest.raises(ConfigError):
        parse_config("x = = 1")
