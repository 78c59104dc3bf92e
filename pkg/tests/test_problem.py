import json
import random

import numpy as np
import pytest

from diffmor.exactlin import InputError
from diffmor.fixtures import fixture_document, fixture_path, random_fixture, sample_deformations
from diffmor.problem import dumps_problem, load, loads
from diffmor.structures import validate


def test_shipped_files_are_current(named):
    name, _ = named
    assert fixture_path(name).read_text().rstrip("\n") == fixture_document(name).rstrip("\n")


def test_shipped_files_load_and_validate(named):
    name, P = named
    prob = load(fixture_path(name))
    assert validate(prob.phi_bimodule()).ok
    Q = prob.phi_bimodule("phi")
    assert np.all(Q.morphism.phi == P.morphism.phi)
    assert set(prob.deformations) == set(sample_deformations(P))


def test_round_trip_with_explicit_bimodules():
    P = random_fixture(random.Random(8))
    f = P.morphism
    text = dumps_problem({"A": f.source, "B": f.target}, {"f": ("A", "B", f)}, {"P": ("f", P)})
    prob = loads(text)
    Q = prob.phi_bimodule("P")
    assert validate(Q).ok
    for x, y in ((Q.M.left, P.M.left), (Q.N.right, P.N.right), (Q.psi, P.psi), (Q.A.der, P.A.der)):
        assert np.all(x == y)
    assert Q.A.weight == P.A.weight
    assert loads(dumps_problem({"A": Q.A, "B": Q.B}, {"f": ("A", "B", Q.morphism)}, {"P": ("f", Q)})).bimodules


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"algebras": {"A": {"dim": 0, "mul": [], "unit": []}}}',
        '{"algebras": {"A": {"dim": 1, "mul": [[0, 0, 1, 1]], "unit": [1]}}}',
        '{"algebras": {"A": {"dim": 1, "mul": [[0, 0, 0, "x"]], "unit": [1]}}}',
        '{"algebras": {"A": {"dim": 1, "mul": [[0, 0, 0, 1]], "unit": [1]}},'
        ' "morphisms": {"f": {"source": "A", "target": "Z", "matrix": [[1]]}}}',
        '{"algebras": {"A": {"dim": 1, "mul": [[0, 0, 0, 1]], "unit": [1]}},'
        ' "morphisms": {"f": {"source": "A", "target": "A", "matrix": [[1, 0]]}}}',
    ],
)
def test_malformed_input(text):
    with pytest.raises(InputError):
        loads(text)


def test_unknown_bimodule_name():
    prob = load(fixture_path("FIX-1"))
    with pytest.raises(InputError):
        prob.phi_bimodule("nope")


def test_rationals_as_strings():
    doc = json.loads(fixture_path("FIX-3").read_text())
    assert loads(json.dumps(doc)).weight == 1
    doc["weight"] = "2/4"
    assert str(loads(json.dumps(doc)).weight) == "1/2"
