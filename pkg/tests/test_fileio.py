import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstarmod import fileio
from cstarmod.errors import ParseError
from cstarmod.hmod import span
from cstarmod.instances import random_operator
from cstarmod.modop import ModuleOperator

from conftest import FAMILIES, space

seeds = st.integers(0, 2**32 - 1)


@given(dims=st.sampled_from(FAMILIES), k=st.integers(1, 3), m=st.integers(1, 3), seed=seeds)
def test_operator_round_trip_is_bit_exact(tmp_path_factory, dims, k, m, seed):
    rng = np.random.default_rng(seed)
    t = random_operator(space(dims, k), space(dims, m), rng)
    # include awkward values
    t.blocks[0].flat[0] = 1 / 3 + 1e-300j
    path = tmp_path_factory.mktemp("ops") / "t.json"
    fileio.write_operator(t, path)
    back = fileio.read_operator(path)
    assert back.domain == t.domain and back.codomain == t.codomain
    for a, b in zip(t.blocks, back.blocks):
        assert a.tobytes() == b.tobytes()


def test_operator_file_layout(tmp_path):
    sp = space((1, 2), 1)
    fileio.write_operator(ModuleOperator.identity(sp), tmp_path / "i.json")
    obj = json.loads((tmp_path / "i.json").read_text())
    assert obj["algebra"] == {"blocks": [1, 2]}
    assert obj["domain_rank"] == 1 and obj["codomain_rank"] == 1
    assert obj["blocks"][1] == {"re": [[1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}


def test_vector_and_submodule_round_trip(tmp_path, rng):
    sp = space((1, 2), 2)
    x = sp.random_vector(rng)
    fileio.write_vector(x, tmp_path / "x.json")
    y = fileio.read_any(tmp_path / "x.json")
    assert all(a.tobytes() == b.tobytes() for a, b in zip(x.blocks, y.blocks))
    m = span([x])
    fileio.write_submodule(m, tmp_path / "m.json")
    assert fileio.read_submodule(tmp_path / "m.json").equals(m, 1e-14)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"algebra": {"blocks": [1]},', "line 1"),
        ('{"algebra": {"blocks": [1]}, "domain_rank": 1, "codomain_rank": 1, "blocks": []}', "blocks"),
        ('{"algebra": {"blocks": ["x"]}, "domain_rank": 1, "codomain_rank": 1, "blocks": []}', "algebra.blocks"),
        (
            '{"algebra": {"blocks": [1]}, "domain_rank": 1, "codomain_rank": 2,'
            ' "blocks": [{"re": [[1.0]], "im": [[0.0]]}]}',
            "blocks[0].re",
        ),
        ('{"algebra": {"blocks": [1]}, "domain_rank": 0, "codomain_rank": 1, "blocks": []}', "domain_rank"),
    ],
)
def test_malformed_operator_files(tmp_path, text, fragment):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ParseError) as info:
        fileio.read_operator(path)
    assert fragment in str(info.value)
    assert str(path) in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        fileio.read_operator(tmp_path / "nope.json")
