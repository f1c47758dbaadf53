"""JSON documents for scalars, group elements and certificates.

Arbitrary-precision numerators travel as decimal strings; decoders re-check
every invariant and report the offending field through `SchemaError`.
Persisted documents carry a versioned "schema" field.
"""

import hashlib
import json
import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from certificates import registry
from certificates.folner import ReiterCertificate, SetFolnerCertificate, verify_reiter_certificate, verify_set_certificate
from certificates.matching import BipartiteGraph, MatchingCertificate
from certificates.measures import DEFAULT_MATERIALIZE_LIMIT, FiniteMeasure, LampMixture
from certificates.simulation import (
    ApproximationWitness,
    SimulationWitness,
    check_approximation_witness,
    check_simulation_witness,
)
from certificates.verdict import Verdict
from errors import InvariantViolation, PreconditionError, SchemaError
from groups.actions import ActionHandle
from groups.exact import Dyadic, Mobius, ProjPoint, parse_rational, point_sort_key
from groups.monod import Diagnostic, PPElement, pp_validate
from groups.thompson import PLMapLine, PLMapUnit
from groups.wreath import Config, SemidirectElem

logger = logging.getLogger(__name__)

ELEMENT_SCHEMAS = {
    "thompson-unit": "thompson-unit/1",
    "thompson-line": "thompson-line/1",
    "monod": "monod/1",
}
CERTIFICATE_SCHEMAS = ("folner-set/1", "reiter/1", "simulation/1", "approximation/1")


def digest(document: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form."""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def dumps(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, sort_keys=True)


def _int(value, name: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(name, "expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            pass
    raise SchemaError(name, f"expected an integer, got {value!r}")


def _require(doc, key: str, path: str = ""):
    name = f"{path}.{key}" if path else key
    if not isinstance(doc, dict):
        raise SchemaError(path or key, "expected an object")
    if key not in doc:
        raise SchemaError(name, "missing")
    return doc[key]


def _list(value, name: str) -> List:
    if not isinstance(value, list):
        raise SchemaError(name, "expected a list")
    return value


def _guard(name: str, build: Callable):
    try:
        return build()
    except SchemaError:
        raise
    except (InvariantViolation, PreconditionError, TypeError, ValueError, ZeroDivisionError) as e:
        raise SchemaError(name, str(e)) from e


def check_schema(doc, expected: str) -> None:
    schema = _require(doc, "schema")
    if schema != expected:
        raise SchemaError("schema", f"expected {expected!r}, got {schema!r}")


# scalars

def encode_dyadic(x: Dyadic) -> Dict[str, Any]:
    return {"num": str(x.num), "exp": x.exp}


def decode_dyadic(obj, name: str = "dyadic") -> Dyadic:
    if isinstance(obj, str):
        return _guard(name, lambda: Dyadic.parse(obj))
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Dyadic(obj)
    exp = _int(_require(obj, "exp", name), f"{name}.exp")
    if exp < 0:
        raise SchemaError(f"{name}.exp", "must be non-negative")
    num = _int(_require(obj, "num", name), f"{name}.num")
    value = Dyadic(num, exp)
    if (value.num, value.exp) != (num, exp):
        raise SchemaError(name, f"{num}/2^{exp} is not reduced")
    return value


def encode_rational(x: Fraction) -> Dict[str, str]:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def decode_rational(obj, name: str = "rational") -> Fraction:
    if isinstance(obj, str):
        return _guard(name, lambda: parse_rational(obj))
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    if isinstance(obj, dict) and "exp" in obj:
        return decode_dyadic(obj, name).to_fraction()
    num = _int(_require(obj, "num", name), f"{name}.num")
    den = _int(_require(obj, "den", name), f"{name}.den")
    if den <= 0:
        raise SchemaError(f"{name}.den", "must be positive")
    return Fraction(num, den)


def encode_proj(x: ProjPoint) -> Dict[str, int]:
    return {"p": x.p, "q": x.q}


def decode_proj(obj, name: str = "point") -> ProjPoint:
    if isinstance(obj, str):
        if obj.strip() in ("inf", "infinity"):
            return ProjPoint(1, 0)
        return ProjPoint.affine(decode_rational(obj, name))
    p = _int(_require(obj, "p", name), f"{name}.p")
    q = _int(_require(obj, "q", name), f"{name}.q")
    return _guard(name, lambda: ProjPoint(p, q))


def encode_mobius(m: Mobius) -> Dict[str, int]:
    return {"a": m.a, "b": m.b, "c": m.c, "d": m.d}


def decode_mobius(obj, name: str = "mobius") -> Mobius:
    values = [_int(_require(obj, key, name), f"{name}.{key}") for key in "abcd"]
    return _guard(name, lambda: Mobius(*values))


# points

def encode_point(x) -> Any:
    if isinstance(x, bool):
        raise TypeError("booleans are not points")
    if isinstance(x, int):
        return x
    if isinstance(x, Dyadic):
        return encode_dyadic(x)
    if isinstance(x, Fraction):
        return encode_rational(x)
    if isinstance(x, ProjPoint):
        return encode_proj(x)
    if isinstance(x, tuple):
        return [encode_point(v) for v in x]
    if isinstance(x, Config):
        return encode_config(x)
    raise TypeError(f"cannot encode point {x!r}")


def decode_point(obj, name: str = "point") -> Any:
    if isinstance(obj, bool):
        raise SchemaError(name, "booleans are not points")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, list):
        return tuple(decode_point(v, f"{name}[{i}]") for i, v in enumerate(obj))
    if isinstance(obj, dict):
        if "exp" in obj:
            return decode_dyadic(obj, name)
        if "den" in obj:
            return decode_rational(obj, name)
        if "p" in obj:
            return decode_proj(obj, name)
        if "lamps" in obj:
            return decode_config(obj, name)
    raise SchemaError(name, f"unrecognised point {obj!r}")


def encode_config(f: Config) -> Dict[str, Any]:
    return {"lamps": f.lamps, "entries": [[encode_point(x), value] for x, value in f.entries]}


def decode_config(obj, name: str = "config") -> Config:
    lamps = _require(obj, "lamps", name)
    entries = _list(_require(obj, "entries", name), f"{name}.entries")
    values = {}
    for i, entry in enumerate(entries):
        if not isinstance(entry, list) or len(entry) != 2:
            raise SchemaError(f"{name}.entries[{i}]", "expected [point, value]")
        x = decode_point(entry[0], f"{name}.entries[{i}]")
        if x in values:
            raise SchemaError(f"{name}.entries[{i}]", "repeated point")
        values[x] = _int(entry[1], f"{name}.entries[{i}]")
    items = tuple(sorted(values.items(), key=lambda item: point_sort_key(item[0])))
    return _guard(name, lambda: Config(lamps, items))


# group elements

def _encode_breakpoints(f) -> List:
    return [[encode_dyadic(x), encode_dyadic(y)] for x, y in f.breakpoints]


def _decode_breakpoints(obj, name: str) -> List:
    out = []
    for i, pair in enumerate(_list(_require(obj, "breakpoints", name), f"{name}.breakpoints")):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"{name}.breakpoints[{i}]", "expected [x, y]")
        out.append((decode_dyadic(pair[0], f"{name}.breakpoints[{i}][0]"), decode_dyadic(pair[1], f"{name}.breakpoints[{i}][1]")))
    return out


def encode_element(action: ActionHandle, g) -> Any:
    if isinstance(g, SemidirectElem):
        return {"config": encode_config(g.config), "element": encode_element(g.action, g.element)}
    if isinstance(g, PLMapUnit):
        return {"breakpoints": _encode_breakpoints(g)}
    if isinstance(g, PLMapLine):
        return {"breakpoints": _encode_breakpoints(g), "left_tail": g.left_tail, "right_tail": g.right_tail}
    if isinstance(g, PPElement):
        return {"cuts": [encode_proj(b) for b in g.cuts], "pieces": [encode_mobius(m) for m in g.pieces]}
    if isinstance(g, int) and not isinstance(g, bool):
        return g
    raise TypeError(f"cannot encode element {g!r} of action '{action.name}'")


def decode_element(action: ActionHandle, obj, name: str = "element") -> Any:
    kind = registry.element_kind(action.name)
    if kind == "z-shift":
        return _int(obj, name)
    if kind == "thompson-unit":
        points = _decode_breakpoints(obj, name)
        return _guard(name, lambda: PLMapUnit(tuple(points)))
    if kind == "thompson-line":
        points = _decode_breakpoints(obj, name)
        left = _int(_require(obj, "left_tail", name), f"{name}.left_tail")
        right = _int(_require(obj, "right_tail", name), f"{name}.right_tail")
        return _guard(name, lambda: PLMapLine(tuple(points), left, right))
    if kind == "monod":
        cuts = [decode_proj(b, f"{name}.cuts[{i}]") for i, b in enumerate(_list(_require(obj, "cuts", name), f"{name}.cuts"))]
        pieces = [decode_mobius(m, f"{name}.pieces[{i}]") for i, m in enumerate(_list(_require(obj, "pieces", name), f"{name}.pieces"))]
        result = pp_validate(cuts, pieces)
        if isinstance(result, Diagnostic):
            raise SchemaError(name, str(result))
        return result
    # semidirect
    base = registry.base_action(action.name)
    config = decode_config(_require(obj, "config", name), f"{name}.config")
    element = decode_element(base, _require(obj, "element", name), f"{name}.element")
    return SemidirectElem(config, element, base)


def raw_monod_data(obj, name: str = "element"):
    """Cut and piece data as plain integer tuples, checked for shape only."""
    cuts = []
    for i, b in enumerate(_list(_require(obj, "cuts", name), f"{name}.cuts")):
        path = f"{name}.cuts[{i}]"
        cuts.append((_int(_require(b, "p", path), f"{path}.p"), _int(_require(b, "q", path), f"{path}.q")))
    pieces = []
    for i, m in enumerate(_list(_require(obj, "pieces", name), f"{name}.pieces")):
        path = f"{name}.pieces[{i}]"
        pieces.append(tuple(_int(_require(m, key, path), f"{path}.{key}") for key in "abcd"))
    return cuts, pieces


def encode_element_doc(action: ActionHandle, g) -> Dict[str, Any]:
    doc = encode_element(action, g)
    if not isinstance(doc, dict):
        doc = {"value": doc}
    schema = ELEMENT_SCHEMAS.get(action.name, "semidirect/1" if isinstance(g, SemidirectElem) else "element/1")
    return {"schema": schema, "action": action.name, **doc}


def encode_config_doc(f: Config) -> Dict[str, Any]:
    return {"schema": "config/1", **encode_config(f)}


def decode_element_doc(doc, action: Optional[ActionHandle] = None) -> Any:
    """Decode a standalone element document; the action comes from the document unless given."""
    if action is None:
        action = resolve_action(_require(doc, "action"))
    body = {k: v for k, v in doc.items() if k not in ("schema", "action")}
    if "value" in body and len(body) == 1:
        body = body["value"]
    return decode_element(action, body)


def resolve_action(name) -> ActionHandle:
    if not isinstance(name, str):
        raise SchemaError("action", "expected an action name")
    return _guard("action", lambda: registry.resolve(name))


# matching documents

def encode_graph(graph: BipartiteGraph) -> Dict[str, Any]:
    return {
        "schema": "graph/1",
        "left": list(graph.left),
        "right": list(graph.right),
        "edges": [[u, v] for u, v in sorted(graph.edges, key=lambda e: (str(e[0]), str(e[1])))],
    }


def decode_graph(doc) -> BipartiteGraph:
    if "schema" in doc:
        check_schema(doc, "graph/1")
    left = _list(_require(doc, "left"), "left")
    right = _list(_require(doc, "right"), "right")
    edges = _list(_require(doc, "edges"), "edges")
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError(f"edges[{i}]", "expected [left, right]")
    return _guard("edges", lambda: BipartiteGraph.from_pairs(left, right, edges))


def encode_matching(cert: MatchingCertificate) -> Dict[str, Any]:
    return {
        "schema": "matching/1",
        "size": cert.size,
        "matching": [[u, v] for u, v in cert.matching],
        "deficiency_set": list(cert.deficiency_set),
    }


def decode_matching(doc) -> MatchingCertificate:
    check_schema(doc, "matching/1")
    size = _int(_require(doc, "size"), "size")
    pairs = _list(_require(doc, "matching"), "matching")
    for i, pair in enumerate(pairs):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"matching[{i}]", "expected [left, right]")
    subset = _list(_require(doc, "deficiency_set"), "deficiency_set")
    return MatchingCertificate(size, tuple(tuple(p) for p in pairs), tuple(subset))


# certificates

def encode_set_certificate(cert: SetFolnerCertificate) -> Dict[str, Any]:
    return {
        "schema": "folner-set/1",
        "action": cert.action.name,
        "base_point": encode_point(tuple(cert.base_point)),
        "elements": list(cert.elements),
        "theta": encode_rational(Fraction(cert.theta)),
        "points": [{"point": encode_point(p), "word": w} for p, w in cert.points],
        "per_g": list(cert.per_g),
    }


def _words(values, name: str) -> List[str]:
    for i, w in enumerate(values):
        if not isinstance(w, str):
            raise SchemaError(f"{name}[{i}]", "expected a word")
    return list(values)


def decode_set_certificate(doc) -> SetFolnerCertificate:
    check_schema(doc, "folner-set/1")
    action = resolve_action(_require(doc, "action"))
    base_point = decode_point(_list(_require(doc, "base_point"), "base_point"), "base_point")
    elements = _words(_list(_require(doc, "elements"), "elements"), "elements")
    theta = decode_rational(_require(doc, "theta"), "theta")
    points = []
    for i, entry in enumerate(_list(_require(doc, "points"), "points")):
        path = f"points[{i}]"
        point = decode_point(_list(_require(entry, "point", path), f"{path}.point"), f"{path}.point")
        word = _require(entry, "word", path)
        if not isinstance(word, str):
            raise SchemaError(f"{path}.word", "expected a word")
        points.append((point, word))
    per_g = tuple(_int(v, f"per_g[{i}]") for i, v in enumerate(_list(doc.get("per_g", []), "per_g")))
    return SetFolnerCertificate(action, base_point, tuple(elements), theta, tuple(points), per_g)


def encode_measure(measure) -> Dict[str, Any]:
    if isinstance(measure, LampMixture):
        return {
            "kind": "lamp-mixture",
            "windows": [{"points": [encode_point(x) for x in window], "weight": encode_rational(w)} for window, w in measure.components],
        }
    return {"kind": "finite", "weights": [[encode_point(x), encode_rational(w)] for x, w in measure.weights]}


def decode_measure(obj, name: str = "measure"):
    kind = _require(obj, "kind", name)
    if kind == "lamp-mixture":
        windows = []
        for i, entry in enumerate(_list(_require(obj, "windows", name), f"{name}.windows")):
            path = f"{name}.windows[{i}]"
            points = [decode_point(x, f"{path}.points") for x in _list(_require(entry, "points", path), f"{path}.points")]
            windows.append((tuple(points), decode_rational(_require(entry, "weight", path), f"{path}.weight")))
        return _guard(name, lambda: LampMixture.of(windows))
    if kind == "finite":
        weights = {}
        for i, entry in enumerate(_list(_require(obj, "weights", name), f"{name}.weights")):
            if not isinstance(entry, list) or len(entry) != 2:
                raise SchemaError(f"{name}.weights[{i}]", "expected [point, weight]")
            x = decode_point(entry[0], f"{name}.weights[{i}]")
            if x in weights:
                raise SchemaError(f"{name}.weights[{i}]", "repeated point")
            weights[x] = decode_rational(entry[1], f"{name}.weights[{i}]")
        ordered = tuple(sorted(weights.items(), key=lambda item: point_sort_key(item[0])))
        return _guard(name, lambda: FiniteMeasure(ordered))
    raise SchemaError(f"{name}.kind", f"unknown measure kind {kind!r}")


def encode_reiter_certificate(cert: ReiterCertificate) -> Dict[str, Any]:
    return {
        "schema": "reiter/1",
        "action": cert.action.name,
        "measure": encode_measure(cert.measure),
        "elements": [{"label": label, "element": encode_element(cert.action, g)} for label, g in cert.elements],
        "epsilon": encode_rational(Fraction(cert.epsilon)),
    }


def decode_reiter_certificate(doc) -> ReiterCertificate:
    check_schema(doc, "reiter/1")
    action = resolve_action(_require(doc, "action"))
    measure = decode_measure(_require(doc, "measure"))
    elements = []
    for i, entry in enumerate(_list(_require(doc, "elements"), "elements")):
        path = f"elements[{i}]"
        label = str(_require(entry, "label", path))
        elements.append((label, decode_element(action, _require(entry, "element", path), f"{path}.element")))
    epsilon = decode_rational(_require(doc, "epsilon"), "epsilon")
    return ReiterCertificate(action, measure, tuple(elements), epsilon)


def encode_simulation_witness(w: SimulationWitness) -> Dict[str, Any]:
    return {
        "schema": "simulation/1",
        "action": w.action.name,
        "pairs": [{"g": encode_element(w.action, g), "h": encode_element(w.action, h)} for g, h in w.pairs],
        "S": [encode_element(w.action, s) for s in w.S],
        "t": encode_element(w.action, w.t),
        "P": [encode_point(p) for p in w.P],
    }


def decode_simulation_witness(doc) -> SimulationWitness:
    check_schema(doc, "simulation/1")
    action = resolve_action(_require(doc, "action"))
    pairs = []
    for i, entry in enumerate(_list(_require(doc, "pairs"), "pairs")):
        path = f"pairs[{i}]"
        pairs.append((
            decode_element(action, _require(entry, "g", path), f"{path}.g"),
            decode_element(action, _require(entry, "h", path), f"{path}.h"),
        ))
    S = [decode_element(action, s, f"S[{i}]") for i, s in enumerate(_list(_require(doc, "S"), "S"))]
    t = decode_element(action, _require(doc, "t"), "t")
    P = [decode_point(p, f"P[{i}]") for i, p in enumerate(_list(_require(doc, "P"), "P"))]
    return SimulationWitness(action, tuple(pairs), tuple(S), t, tuple(P))


def encode_approximation_witness(w: ApproximationWitness) -> Dict[str, Any]:
    return {
        "schema": "approximation/1",
        "action": w.action.name,
        "g": encode_element(w.action, w.g),
        "h": encode_element(w.action, w.h),
        "samples": [encode_point(x) for x in w.samples],
    }


def decode_approximation_witness(doc) -> ApproximationWitness:
    check_schema(doc, "approximation/1")
    action = resolve_action(_require(doc, "action"))
    g = decode_element(action, _require(doc, "g"), "g")
    h = decode_element(action, _require(doc, "h"), "h")
    samples = [decode_point(x, f"samples[{i}]") for i, x in enumerate(_list(_require(doc, "samples"), "samples"))]
    return ApproximationWitness(action, g, h, tuple(samples))


ENCODERS = {
    SetFolnerCertificate: encode_set_certificate,
    ReiterCertificate: encode_reiter_certificate,
    SimulationWitness: encode_simulation_witness,
    ApproximationWitness: encode_approximation_witness,
}

DECODERS = {
    "folner-set/1": decode_set_certificate,
    "reiter/1": decode_reiter_certificate,
    "simulation/1": decode_simulation_witness,
    "approximation/1": decode_approximation_witness,
}


def encode_certificate(cert) -> Dict[str, Any]:
    try:
        return ENCODERS[type(cert)](cert)
    except KeyError:
        raise TypeError(f"not a certificate: {cert!r}") from None


def decode_certificate(doc):
    if not isinstance(doc, dict):
        raise SchemaError("schema", "expected a JSON object")
    schema = _require(doc, "schema")
    if schema not in DECODERS:
        raise SchemaError("schema", f"unknown certificate schema {schema!r}")
    return DECODERS[schema](doc)


def load_json(path: str) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError("document", f"invalid JSON in {path}: {e}") from e


def verify_document(doc, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> Verdict:
    """Decode any certificate document and run its checker."""
    cert = decode_certificate(doc)
    if isinstance(cert, SetFolnerCertificate):
        verdict = verify_set_certificate(cert)
    elif isinstance(cert, ReiterCertificate):
        verdict = verify_reiter_certificate(cert, limit)
    elif isinstance(cert, SimulationWitness):
        verdict = check_simulation_witness(cert)
    else:
        verdict = check_approximation_witness(cert)
    logger.info(f"{doc['schema']} on '{cert.action.name}': {verdict.summary()}")
    return verdict
