import json
import math
import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from pcheeger import fixtures, formats
from pcheeger.cheeger import cheeger_exact
from pcheeger.errors import InputError, InvalidSpec
from pcheeger.linear import ANTITREE, MODIFIED, NORMALIZED, TREE, model_row
from pcheeger.spectral import first_eigenpair
from pcheeger.symmetry import VertexPartition

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.mark.parametrize("seed", range(5))
def test_domain_round_trip(seed):
    dom = fixtures.random_domain(random.Random(seed), 6)
    text = formats.dumps(formats.domain_to_json(dom))
    assert formats.domain_from_json(json.loads(text)) == dom


def test_bundled_files_load():
    assert formats.domain_from_json(formats.load_json(DATA / "example41.json")) == fixtures.example41_domain()
    assert formats.domain_from_json(formats.load_json(DATA / "star.json")) == fixtures.star_domain()
    part = formats.partition_from_json(formats.load_json(DATA / "star_parts.json"))
    assert part == VertexPartition.of([["c"], ["l1", "l2", "l3", "l4"]])


def test_rationals_and_infinities():
    assert formats.tidy(Fraction(1, 3)) == "1/3"
    assert formats.tidy(Fraction(4)) == 4
    assert formats.tidy([math.inf, 0.1234567891234]) == ["INF", 0.123456789]
    g = formats.graph_from_json({"vertices": [{"id": "a", "nu": "3/2"}, {"id": "b", "nu": 1}], "edges": [{"u": "a", "v": "b", "mu": "0.5"}]})
    assert g.nu["a"] == Fraction(3, 2) and g.weight("a", "b") == Fraction(1, 2)


def test_cheeger_result_round_trip():
    res = cheeger_exact(fixtures.example51_embedded_domain())
    back = formats.cheeger_from_json(json.loads(formats.dumps(formats.cheeger_to_json(res))))
    assert back == res


def test_eigenpair_round_trip():
    dom = fixtures.example41_domain()
    pair = first_eigenpair(dom, 3.0)
    back = formats.eigenpair_from_json(json.loads(formats.dumps(formats.eigenpair_to_json(pair, dom))), dom)
    assert back.lam == pytest.approx(pair.lam, rel=1e-8)
    assert np.allclose(back.u, pair.u, rtol=1e-8)
    assert back.certified


def test_model_specs():
    spec, horizon = formats.model_from_json(formats.load_json(DATA / "tree_corollary.json"))
    assert spec.family == TREE and spec.scheme == NORMALIZED and horizon == 40
    assert spec.branching(5) == 6
    spec, _ = formats.model_from_json(formats.load_json(DATA / "antitree2.json"))
    assert spec.family == ANTITREE and spec.order == 2 and spec.scheme == MODIFIED
    assert formats.model_from_json(formats.model_to_json(spec, 50)) == (spec, 50)
    with pytest.raises(InvalidSpec):
        formats.model_from_json({"family": "tree"})


def test_output_is_deterministic():
    dom = fixtures.example51_embedded_domain()
    a = formats.dumps(formats.eigenpair_to_json(first_eigenpair(dom, 1.7), dom))
    b = formats.dumps(formats.eigenpair_to_json(first_eigenpair(dom, 1.7), dom))
    assert a == b


def test_table_csv():
    text = formats.table_csv([model_row(ANTITREE, 60, order=3)])
    header, row = text.strip().splitlines()
    assert header.startswith("model,h,h_inf,h_M")
    assert row.split(",")[:3] == ["a=3", "8", "INF"]


@pytest.mark.parametrize(
    "data",
    [
        {"vertices": [{"id": "a"}], "edges": []},
        {"vertices": [{"id": "a", "nu": 1}, {"id": "a", "nu": 1}], "edges": []},
        {"vertices": [{"id": "a", "nu": "x"}], "edges": []},
        {"edges": []},
    ],
)
def test_malformed_json(data):
    with pytest.raises(InputError):
        formats.graph_from_json(data)


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(InputError):
        formats.load_json(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(InputError):
        formats.load_json(bad)
