import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import settings
from certificates import registry
from certificates.extensive import extensive_probe, lamplighter_reiter
from certificates.folner import schreier_ball, search_folner
from certificates.matching import max_matching, ore_defect_bruteforce, verify_matching_certificate
from certificates.simulation import (
    approximation_witness,
    check_approximation_witness,
    check_simulation_witness,
    monod_choose_t,
    thompson_choose_t,
)
from certificates.store import CertificateStore
from certificates.verdict import Verdict
from errors import BudgetExceeded, ConfigError, InvariantViolation, PreconditionError, SchemaError
from groups.actions import ActionHandle
from groups.exact import Dyadic, ProjPoint, format_rational, parse_rational
from groups.monod import (
    MONOD_ACTION,
    Diagnostic,
    fix_infty_map,
    pp_validate,
    strongly_transitive_H,
    tail_affine,
    two_transitive,
    two_transitive_det,
)
from groups.thompson import (
    LINE_ACTION,
    UNIT_ACTION,
    PLMapLine,
    eta,
    freeness_witness,
    iota,
    phi,
    phi_inv,
    strong_transitive_F,
)
from utils import codec
from utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_MALFORMED = 2

Result = Tuple[Any, int]


# input helpers

def _read_json(path: str):
    if path == "-":
        try:
            return json.load(sys.stdin)
        except json.JSONDecodeError as e:
            raise SchemaError("document", f"invalid JSON on stdin: {e}") from e
    if not os.path.exists(path):
        raise PreconditionError(f"no such file: {path}")
    return codec.load_json(path)


def _split(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_scalar(action: ActionHandle, text: str):
    if action.domain == "integer":
        try:
            return int(text)
        except ValueError as e:
            raise PreconditionError(f"invalid integer {text!r}") from e
    if action.domain.startswith("dyadic"):
        return Dyadic.parse(text)
    if action.domain == "projective":
        if text.strip() in ("inf", "infinity"):
            return ProjPoint(1, 0)
        return ProjPoint.affine(parse_rational(text))
    raise PreconditionError(f"points of '{action.name}' cannot be given on the command line")


def _parse_tuple(action: ActionHandle, text: str) -> Tuple:
    return tuple(_parse_scalar(action, part) for part in _split(text))


def _element(action: ActionHandle, text: str):
    """A JSON element document (path or '-') or a generator word."""
    if text == "-" or os.path.exists(text):
        doc = _read_json(text)
        named = doc.get("action") if isinstance(doc, dict) else None
        if named is not None and named != action.name:
            raise SchemaError("action", f"expected an element of '{action.name}', got '{named}'")
        return codec.decode_element_doc(doc, action)
    return action.word(text)


def _operands(args) -> List[str]:
    return list(args.elem or []) + list(args.elements or [])


def _thompson_action(args) -> ActionHandle:
    if args.picture:
        return UNIT_ACTION if args.picture == "unit" else LINE_ACTION
    for text in _operands(args):
        if text == "-" or os.path.exists(text):
            doc = _read_json(text)
            if isinstance(doc, dict) and doc.get("action") == LINE_ACTION.name:
                return LINE_ACTION
            break
    return UNIT_ACTION


def _single(action: ActionHandle, args):
    operands = _operands(args)
    if len(operands) != 1:
        raise PreconditionError(f"expected exactly one element, got {len(operands)}")
    return _element(action, operands[0])


def _product(action: ActionHandle, args):
    operands = _operands(args)
    if not operands:
        raise PreconditionError("at least one element is needed")
    result = action.identity
    for text in operands:
        result = action.compose(result, _element(action, text))
    return result


def _verdict_payload(verdict: Verdict, **extra) -> Dict[str, Any]:
    payload = {"accepted": verdict.accepted, "reason": verdict.reason, "details": verdict.details}
    payload.update(extra)
    return payload


def _exit_for(verdict: Verdict) -> int:
    return EXIT_OK if verdict else EXIT_REJECTED


def _record(document: Dict[str, Any], verdict: Verdict) -> None:
    store_config = settings.config["store"]
    if not store_config.get("enabled"):
        return
    store = CertificateStore(store_config.get("path"))
    try:
        if store_config.get("skip_duplicates", True) and store.is_recorded(codec.digest(document)):
            logger.info("Certificate already recorded, skipping")
            return
        store.save(document, verdict)
    finally:
        store.close()


def _search_settings(args) -> settings.SearchSettings:
    search = settings.SearchSettings(seed=args.seed, budget=args.budget, workers=args.workers)
    if not search.is_valid():
        raise ConfigError(f"invalid search settings: {search}")
    return search


# thompson

def cmd_thompson(args) -> Result:
    action = _thompson_action(args)
    op = args.op
    if op == "generators":
        picture = LINE_ACTION if args.picture == "line" else UNIT_ACTION
        return {letter: codec.encode_element_doc(picture, g) for letter, g in picture.generators.items()}, EXIT_OK
    if op == "strong-transitive":
        g = strong_transitive_F(_parse_tuple(UNIT_ACTION, args.xs), _parse_tuple(UNIT_ACTION, args.ys))
        return codec.encode_element_doc(UNIT_ACTION, g), EXIT_OK
    if op == "compose":
        return codec.encode_element_doc(action, _product(action, args)), EXIT_OK
    g = _single(action, args)
    if op == "inverse":
        return codec.encode_element_doc(action, action.inverse(g)), EXIT_OK
    if op == "eval":
        if args.x is None:
            raise PreconditionError("--x is required")
        value = action.apply(g, Dyadic.parse(args.x))
        return {"x": str(Dyadic.parse(args.x)), "value": str(value)}, EXIT_OK
    if op == "phi":
        if isinstance(g, PLMapLine):
            return codec.encode_element_doc(UNIT_ACTION, phi_inv(g)), EXIT_OK
        return codec.encode_element_doc(LINE_ACTION, phi(g)), EXIT_OK
    if action is not UNIT_ACTION:
        raise PreconditionError(f"'{op}' needs an element of the unit picture")
    if op == "eta":
        jumps = eta(g)
        payload = {
            "eta": codec.encode_config_doc(jumps),
            "jumps": {str(x): value for x, value in jumps.entries},
        }
        if jumps.entries:
            t, change = freeness_witness(g)
            payload["freeness_witness"] = {"t": str(t), "change": change}
        return payload, EXIT_OK
    if op == "iota":
        e = iota(g)
        return {
            "schema": "semidirect/1",
            "action": f"{registry.WREATH_PREFIX}{UNIT_ACTION.name}",
            "config": codec.encode_config(e.config),
            "element": codec.encode_element(UNIT_ACTION, e.element),
        }, EXIT_OK
    raise PreconditionError(f"unknown thompson operation {op!r}")


# monod

def _matrix(m) -> List[List[int]]:
    return [[m.a, m.b], [m.c, m.d]]


def cmd_monod(args) -> Result:
    op = args.op
    action = MONOD_ACTION
    if op == "two-transitive":
        values = args.values or _operands(args)
        if len(values) != 4:
            raise PreconditionError("two-transitive takes s0 s1 t0 t1")
        s0, s1, t0, t1 = (parse_rational(v) for v in values)
        m = two_transitive(s0, s1, t0, t1)
        det = two_transitive_det(s0, s1, t0, t1)
        return {"matrix": _matrix(m), "mobius": codec.encode_mobius(m), "det": format_rational(det)}, EXIT_OK
    if op == "fix-infty":
        values = args.values or _operands(args)
        if len(values) != 2:
            raise PreconditionError("fix-infty takes s t")
        s, t = (parse_rational(v) for v in values)
        m = fix_infty_map(s, t)
        return {"matrix": _matrix(m), "mobius": codec.encode_mobius(m)}, EXIT_OK
    if op == "strong-transitive":
        xs = [parse_rational(v) for v in _split(args.xs)]
        ys = [parse_rational(v) for v in _split(args.ys)]
        return codec.encode_element_doc(action, strongly_transitive_H(xs, ys)), EXIT_OK
    if op == "validate":
        operands = _operands(args)
        if len(operands) != 1:
            raise PreconditionError("validate takes one document")
        cuts, pieces = codec.raw_monod_data(_read_json(operands[0]))
        result = pp_validate(cuts, pieces)
        if isinstance(result, Diagnostic):
            return {"valid": False, "kind": result.kind, "detail": result.detail, "cut_index": result.cut_index}, EXIT_REJECTED
        return {"valid": True, "element": codec.encode_element_doc(action, result)}, EXIT_OK
    if op == "compose":
        return codec.encode_element_doc(action, _product(action, args)), EXIT_OK
    g = _single(action, args)
    if op == "eval":
        if args.x is None:
            raise PreconditionError("--x is required")
        x = _parse_scalar(action, args.x)
        return {"x": str(x), "value": str(action.apply(g, x))}, EXIT_OK
    if op == "tail-affine":
        m, a = tail_affine(g)
        return {"matrix": _matrix(m), "mobius": codec.encode_mobius(m), "a": format_rational(a)}, EXIT_OK
    raise PreconditionError(f"unknown monod operation {op!r}")


# matching

def cmd_matching(args) -> Result:
    graph = codec.decode_graph(_read_json(args.graph))
    if args.op == "solve":
        cert = max_matching(graph)
        return codec.encode_matching(cert), EXIT_OK
    if args.op == "ore-check":
        limit = _search_settings(args).bruteforce_limit
        size = max_matching(graph).size
        ore = ore_defect_bruteforce(graph, limit)
        agree = size == ore
        if not agree:
            logger.error(f"matching number {size} differs from the Ore defect {ore}")
        return {"matching": size, "ore": ore, "agree": agree}, EXIT_OK if agree else EXIT_REJECTED
    if args.op == "verify":
        if not args.certificate:
            raise PreconditionError("verify needs a matching certificate")
        cert = codec.decode_matching(_read_json(args.certificate))
        verdict = verify_matching_certificate(graph, cert)
        return _verdict_payload(verdict), _exit_for(verdict)
    raise PreconditionError(f"unknown matching operation {args.op!r}")


# folner

def _verify_file(path: Optional[str], limit: int) -> Result:
    if not path:
        raise PreconditionError("a certificate document is required")
    doc = _read_json(path)
    verdict = codec.verify_document(doc, limit)
    _record(doc, verdict)
    return _verdict_payload(verdict, schema=doc["schema"], digest=codec.digest(doc)), _exit_for(verdict)


def cmd_folner(args) -> Result:
    search = _search_settings(args)
    if args.op == "verify":
        return _verify_file(args.certificate, search.max_materialized)
    action = registry.resolve(args.action)
    base_point = _parse_tuple(action, args.base_point)
    if args.op == "ball":
        ball = schreier_ball(action, base_point, args.radius, max_points=search.max_ball_points)
        points = [{"point": codec.encode_point(p), "word": w} for p, w in ball.items()]
        return {"action": action.name, "radius": args.radius, "size": len(points), "points": points}, EXIT_OK
    if args.op == "search":
        words = _split(args.words) if args.words else sorted(action.generators)
        result = search_folner(
            action,
            base_point,
            words,
            parse_rational(args.theta),
            budget=search.budget,
            seed=search.seed,
            workers=search.workers,
            max_window=search.max_window,
            local_search_rounds=search.local_search_rounds,
            max_ball_points=search.max_ball_points,
        )
        if not result:
            return {
                "found": False,
                "best_ratio": format_rational(result.best_ratio),
                "examined": result.examined,
            }, EXIT_REJECTED
        doc = codec.encode_set_certificate(result.certificate)
        _record(doc, Verdict.accept(phase=result.phase))
        logger.info(f"certificate found in phase '{result.phase}' after {result.examined} points")
        return doc, EXIT_OK
    raise PreconditionError(f"unknown folner operation {args.op!r}")


# simulate

def cmd_simulate(args) -> Result:
    if args.op == "check":
        return _verify_file(args.certificate, _search_settings(args).max_materialized)
    action = MONOD_ACTION if args.picture == "monod" else LINE_ACTION
    if args.op == "approximate":
        w = approximation_witness(action, _single(action, args), args.samples)
        doc = codec.encode_approximation_witness(w)
        verdict = check_approximation_witness(w)
    elif args.op == "choose-t":
        E = [_element(action, text) for text in (args.g or [])]
        if not E:
            E = [action.generators[letter] for letter in sorted(action.generators)]
        S = [_element(action, text) for text in (args.s or [])]
        P = list(_parse_tuple(action, args.points)) if args.points else []
        choose = monod_choose_t if action is MONOD_ACTION else thompson_choose_t
        _, _, witness = choose(E, S, P)
        doc = codec.encode_simulation_witness(witness)
        verdict = check_simulation_witness(witness)
    else:
        raise PreconditionError(f"unknown simulate operation {args.op!r}")
    _record(doc, verdict)
    if not verdict:
        logger.error(f"constructed witness does not check: {verdict.reason}")
    return doc, _exit_for(verdict)


# wreath

def cmd_wreath(args) -> Result:
    search = _search_settings(args)
    if args.op == "reiter":
        cert = lamplighter_reiter(args.n)
        doc = codec.encode_reiter_certificate(cert)
        verdict = codec.verify_document(doc, search.max_materialized)
        _record(doc, verdict)
        return doc, _exit_for(verdict)
    if args.op == "probe":
        base = registry.resolve(args.action)
        tracked = list(_parse_tuple(base, args.tracked))
        result = extensive_probe(
            base,
            tracked,
            parse_rational(args.epsilon),
            budget=search.budget,
            workers=search.workers,
            max_window=search.probe_radius,
            limit=search.max_materialized,
        )
        if not result:
            best = None if result.best_defect is None else format_rational(result.best_defect)
            return {"found": False, "best_defect": best, "candidate": result.candidate, "examined": result.examined}, EXIT_REJECTED
        doc = codec.encode_reiter_certificate(result.certificate)
        _record(doc, Verdict.accept(candidate=result.candidate))
        return doc, EXIT_OK
    action = registry.resolve(args.action)
    if args.op == "mul":
        return codec.encode_element_doc(action, _product(action, args)), EXIT_OK
    if args.op == "act":
        if not args.state:
            raise PreconditionError("--state is required")
        f = codec.decode_config(_read_json(args.state))
        return codec.encode_config_doc(action.apply(_single(action, args), f)), EXIT_OK
    raise PreconditionError(f"unknown wreath operation {args.op!r}")


# parser

def _add_operands(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("elements", nargs="*", help="element documents (path or '-') or generator words")
    parser.add_argument("--elem", action="append", help="element document; may be repeated")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewcert", description="Exact certificates for skew-amenability")
    parser.add_argument("--format", choices=["json"], default="json")
    parser.add_argument("--seed", type=int, help="search seed (default from config.yaml)")
    parser.add_argument("--budget", type=int, help="candidate-point budget")
    parser.add_argument("--workers", type=int, help="search threads")
    parser.add_argument("--out", help="also write the payload to this file")
    parser.add_argument("--config", help="alternative config.yaml")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    groups = parser.add_subparsers(dest="group", required=True)

    thompson = groups.add_parser("thompson", help="Thompson's group F")
    thompson.add_argument("op", choices=["compose", "inverse", "eval", "eta", "iota", "phi", "strong-transitive", "generators"])
    _add_operands(thompson)
    thompson.add_argument("--picture", choices=["unit", "line"])
    thompson.add_argument("--x", help="dyadic literal, p/q or m/2^e")
    thompson.add_argument("--xs", help="comma-separated dyadics in (0, 1)")
    thompson.add_argument("--ys", help="comma-separated dyadics in (0, 1)")
    thompson.set_defaults(handler=cmd_thompson)

    monod = groups.add_parser("monod", help="piecewise projective group H")
    monod.add_argument("op", choices=["compose", "eval", "two-transitive", "fix-infty", "strong-transitive", "tail-affine", "validate"])
    _add_operands(monod)
    monod.add_argument("--values", nargs="+", default=[], help="rationals for two-transitive / fix-infty")
    monod.add_argument("--x", help="rational literal or 'inf'")
    monod.add_argument("--xs", help="comma-separated increasing rationals")
    monod.add_argument("--ys", help="comma-separated increasing rationals")
    monod.set_defaults(handler=cmd_monod)

    matching = groups.add_parser("matching", help="bipartite matchings")
    matching.add_argument("op", choices=["solve", "ore-check", "verify"])
    matching.add_argument("graph", help="graph/1 document")
    matching.add_argument("certificate", nargs="?", help="matching/1 document (verify)")
    matching.set_defaults(handler=cmd_matching)

    folner = groups.add_parser("folner", help="Følner set certificates")
    folner.add_argument("op", choices=["search", "verify", "ball"])
    folner.add_argument("certificate", nargs="?", help="certificate document (verify)")
    folner.add_argument("--action", default="z-shift", help=f"one of {', '.join(registry.names())}")
    folner.add_argument("--base-point", default="0", help="comma-separated point literals")
    folner.add_argument("--words", help="comma-separated test words (default: the generators)")
    folner.add_argument("--theta", default="9/10")
    folner.add_argument("--radius", type=int, default=3)
    folner.set_defaults(handler=cmd_folner)

    simulate = groups.add_parser("simulate", help="proximal-simulation witnesses")
    simulate.add_argument("op", choices=["choose-t", "check", "approximate"])
    simulate.add_argument("certificate", nargs="?", help="witness document (check)")
    simulate.add_argument("--picture", choices=["line", "monod"], default="line")
    simulate.add_argument("--g", action="append", help="element of E; may be repeated")
    simulate.add_argument("--s", action="append", help="element of S; may be repeated")
    simulate.add_argument("--points", help="comma-separated points of P")
    simulate.add_argument("--elem", action="append", help="element to approximate")
    simulate.add_argument("--samples", type=int, default=10)
    simulate.set_defaults(handler=cmd_simulate, elements=[])

    wreath = groups.add_parser("wreath", help="lamp configurations and Reiter measures")
    wreath.add_argument("op", choices=["mul", "act", "reiter", "probe"])
    _add_operands(wreath)
    wreath.add_argument("--action", default="lamplighter")
    wreath.add_argument("--state", help="config/1 document to act on")
    wreath.add_argument("--n", type=int, default=10, help="box half-width for reiter")
    wreath.add_argument("--tracked", default="0", help="comma-separated base points with toggles (probe)")
    wreath.add_argument("--epsilon", default="1/10")
    wreath.set_defaults(handler=cmd_wreath)
    return parser


def _emit(payload: Any, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    print(text)
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
        logger.info(f"Wrote {out}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_MALFORMED

    try:
        if args.config:
            settings.reload(args.config)
        log_config = settings.config["logging"]
        setup_logging(
            log_config.get("file"),
            args.log_level or log_config["level"],
            log_config["format"],
            log_config["max_bytes"],
            log_config["backup_count"],
        )
        payload, code = args.handler(args)
    except SchemaError as e:
        logger.debug("malformed document", exc_info=True)
        print(f"error: malformed document, {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except (InvariantViolation, PreconditionError, ConfigError) as e:
        logger.debug("invalid input", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except BudgetExceeded as e:
        logger.warning(f"Budget exhausted: {e}")
        _emit({"found": False, "reason": str(e), "explored": e.explored}, args.out)
        return EXIT_REJECTED
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return EXIT_MALFORMED

    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
