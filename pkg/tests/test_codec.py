from fractions import Fraction

import pytest

from certificates import registry
from certificates.extensive import lamplighter_reiter
from certificates.folner import search_folner
from certificates.simulation import thompson_choose_t
from errors import SchemaError
from groups.actions import INTEGER_SHIFTS
from groups.exact import INFINITY, Dyadic, Mobius, ProjPoint
from groups.monod import MONOD_ACTION
from groups.thompson import LINE_ACTION, UNIT_ACTION
from groups.wreath import Config
from utils import codec


def test_scalar_forms():
    assert codec.encode_dyadic(Dyadic(5, 3)) == {"num": "5", "exp": 3}
    assert codec.decode_dyadic({"num": "5", "exp": 3}) == Dyadic(5, 3)
    assert codec.decode_dyadic("3/2^2") == Dyadic(3, 2)
    assert codec.decode_rational({"num": "-2", "den": "6"}) == Fraction(-1, 3)
    assert codec.decode_rational("7") == 7
    assert codec.decode_proj("inf") == INFINITY
    assert codec.decode_proj({"p": 4, "q": -2}) == ProjPoint(-2, 1)


def test_big_numerators_survive():
    x = Dyadic(3 ** 80, 7)
    assert codec.decode_dyadic(codec.encode_dyadic(x)) == x


@pytest.mark.parametrize("obj, field", [
    ({"num": "4", "exp": 3}, "dyadic"),
    ({"num": "1", "exp": -1}, "dyadic.exp"),
    ({"num": "x", "exp": 1}, "dyadic.num"),
    ({"exp": 1}, "dyadic.num"),
    ("1/3", "dyadic"),
])
def test_dyadic_rejections(obj, field):
    with pytest.raises(SchemaError) as excinfo:
        codec.decode_dyadic(obj)
    assert excinfo.value.field == field


def test_rational_and_point_rejections():
    with pytest.raises(SchemaError) as excinfo:
        codec.decode_rational({"num": "1", "den": "0"})
    assert excinfo.value.field == "rational.den"
    with pytest.raises(SchemaError):
        codec.decode_proj({"p": 0, "q": 0})
    with pytest.raises(SchemaError):
        codec.decode_mobius({"a": 1, "b": 2, "c": 2, "d": 4})
    with pytest.raises(SchemaError):
        codec.decode_point(True)


def test_mobius_is_recanonicalized():
    assert codec.decode_mobius({"a": -2, "b": 0, "c": 0, "d": -2}) == Mobius(1, 0, 0, 1)


def test_config_documents():
    f = Config.of("Z", {Dyadic(1, 1): 2, Dyadic(1, 2): -1})
    doc = codec.encode_config_doc(f)
    assert doc["schema"] == "config/1"
    assert codec.decode_config(doc) == f
    shuffled = {"lamps": "Z", "entries": list(reversed(doc["entries"]))}
    assert codec.decode_config(shuffled) == f
    with pytest.raises(SchemaError):
        codec.decode_config({"lamps": "Z2", "entries": [[0, 2]]})
    with pytest.raises(SchemaError):
        codec.decode_config({"lamps": "Z", "entries": [[0, 1], [0, 1]]})


@pytest.mark.parametrize("action, word", [
    (INTEGER_SHIFTS, "TTt"),
    (UNIT_ACTION, "ABa"),
    (LINE_ACTION, "Bab"),
    (MONOD_ACTION, "PdT"),
    (registry.resolve("lamplighter"), "SFs"),
    (registry.resolve("wreath:thompson-unit"), "ALb"),
])
def test_element_documents(action, word):
    g = action.word(word)
    doc = codec.encode_element_doc(action, g)
    assert doc["action"] == action.name
    assert codec.decode_element_doc(doc) == g


def test_invalid_elements_name_their_field():
    doc = codec.encode_element_doc(UNIT_ACTION, UNIT_ACTION.letter("A"))
    doc["breakpoints"][1][1] = {"num": "3", "exp": 3}
    with pytest.raises(SchemaError) as excinfo:
        codec.decode_element_doc(doc)
    assert excinfo.value.field == "element"

    monod = {"schema": "monod/1", "action": "monod", "cuts": [], "pieces": [{"a": 0, "b": -1, "c": 1, "d": 0}]}
    with pytest.raises(SchemaError) as excinfo:
        codec.decode_element_doc(monod)
    assert "infinity not fixed" in str(excinfo.value)

    with pytest.raises(SchemaError) as excinfo:
        codec.decode_element_doc({"action": "free-group", "value": 1})
    assert excinfo.value.field == "action"


def test_raw_monod_data_keeps_unreduced_values():
    cuts, pieces = codec.raw_monod_data({"cuts": [{"p": 2, "q": 2}], "pieces": [{"a": 2, "b": 0, "c": 0, "d": 2}] * 2})
    assert cuts == [(2, 2)]
    assert pieces == [(2, 0, 0, 2), (2, 0, 0, 2)]


def test_certificates_decode_to_what_was_encoded():
    found = search_folner(INTEGER_SHIFTS, (0,), ["T"], Fraction(4, 5))
    reiter = lamplighter_reiter(2)
    _, _, witness = thompson_choose_t([LINE_ACTION.letter("B")], [], [Dyadic(7)])
    for cert in (found.certificate, reiter, witness):
        doc = codec.encode_certificate(cert)
        assert codec.decode_certificate(doc) == cert
        assert codec.verify_document(doc)
    with pytest.raises(TypeError):
        codec.encode_certificate(object())


def test_digest_ignores_key_order():
    assert codec.digest({"a": 1, "b": [1, 2]}) == codec.digest({"b": [1, 2], "a": 1})
    assert codec.digest({"a": 1}) != codec.digest({"a": 2})


@pytest.mark.parametrize("doc, field", [
    ([], "schema"),
    ({}, "schema"),
    ({"schema": "nope/1"}, "schema"),
    ({"schema": "reiter/1", "action": "lamplighter"}, "measure"),
    ({"schema": "reiter/1", "action": "lamplighter", "measure": {"kind": "gaussian"}, "elements": [], "epsilon": "1"}, "measure.kind"),
    ({"schema": "folner-set/1", "action": 3}, "action"),
])
def test_certificate_schema_errors(doc, field):
    with pytest.raises(SchemaError) as excinfo:
        codec.decode_certificate(doc)
    assert excinfo.value.field == field


def test_graph_documents():
    doc = {"schema": "graph/1", "left": ["a"], "right": ["x"], "edges": [["a", "x"], ["a", "x"]]}
    with pytest.raises(SchemaError) as excinfo:
        codec.decode_graph(doc)
    assert excinfo.value.field == "edges"
    doc["edges"] = [["a", "x"]]
    assert codec.encode_graph(codec.decode_graph(doc)) == doc


def test_load_json_reports_bad_documents(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2")
    with pytest.raises(SchemaError) as excinfo:
        codec.load_json(str(path))
    assert excinfo.value.field == "document"
