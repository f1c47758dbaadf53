"""Proximal-simulation and approximation witnesses.

A simulation witness claims that for every g in E, s in S and p in P the
elements g.s.t and h_g.s.t agree at p. Witnesses come out of approximation
pairs (g, h_g, bound): g agrees with h_g on a tail beyond `bound`, and t pushes
the finite data far enough into that tail.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, List, Optional, Sequence, Tuple

from certificates.verdict import Verdict
from errors import PreconditionError, SkewCertError
from groups.actions import ActionHandle
from groups.exact import Dyadic, ProjPoint
from groups.monod import MONOD_ACTION, PPElement, attractive_translation, tail_affine
from groups.thompson import LINE_ACTION, attractive_left_translation, tail_translation, translation

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10


@dataclass(frozen=True)
class SimulationWitness:
    action: ActionHandle
    pairs: Tuple[Tuple[Hashable, Hashable], ...]
    S: Tuple[Hashable, ...]
    t: Hashable
    P: Tuple[Hashable, ...]


@dataclass(frozen=True)
class ApproximationWitness:
    action: ActionHandle
    g: Hashable
    h: Hashable
    samples: Tuple[Hashable, ...]


def check_simulation_witness(w: SimulationWitness) -> Verdict:
    action = w.action
    try:
        moved = []
        for i, s in enumerate(w.S):
            st = action.compose(s, w.t)
            moved.append((i, [(p, action.apply(st, p)) for p in w.P]))
        for k, (g, h) in enumerate(w.pairs):
            for i, images in moved:
                for p, x in images:
                    if action.apply(g, x) != action.apply(h, x):
                        logger.warning(f"simulation witness fails for pair {k}, s #{i}, p = {p}")
                        return Verdict.reject("g.s.t and h_g.s.t disagree", pair=k, s=i, p=str(p))
    except SkewCertError as e:
        return Verdict.reject(f"cannot evaluate witness: {e}")
    return Verdict.accept(checks=len(w.pairs) * len(w.S) * len(w.P))


def check_approximation_witness(w: ApproximationWitness) -> Verdict:
    action = w.action
    try:
        for x in w.samples:
            if action.apply(w.g, x) != action.apply(w.h, x):
                return Verdict.reject("g and h disagree", x=str(x))
    except SkewCertError as e:
        return Verdict.reject(f"cannot evaluate witness: {e}")
    return Verdict.accept(samples=len(w.samples))


def simulation_from_approximation(
    action: ActionHandle,
    pairs: Sequence[Tuple[Hashable, Hashable, Hashable]],
    S: Sequence[Hashable],
    P: Sequence[Hashable],
    side: str,
    push: Callable[[Sequence[Hashable], Fraction], Hashable],
    coordinate: Callable[[Hashable], Optional[Fraction]],
) -> SimulationWitness:
    """Turn approximation pairs (g, h_g, bound) into a simulation witness.

    On side "left" g = h_g on (-inf, bound], on side "right" on [bound, inf).
    Every s is increasing, so s^-1 of a tail is the tail beyond s^-1(bound); t is
    push(P, target) for the tightest such pulled-back bound.
    """
    if side not in ("left", "right"):
        raise PreconditionError(f"side must be 'left' or 'right', got {side!r}")
    S = list(S) or [action.identity]
    pulled = []
    for _, _, bound in pairs:
        for s in S:
            value = coordinate(action.apply(action.inverse(s), bound))
            if value is not None:
                pulled.append(value)
    if pulled:
        target = min(pulled) if side == "left" else max(pulled)
        t = push(list(P), target)
    else:
        t = action.identity
    return SimulationWitness(action, tuple((g, h) for g, h, _ in pairs), tuple(S), t, tuple(P))


def _dyadic_coordinate(x) -> Fraction:
    return Dyadic.coerce(x).to_fraction()


def _proj_coordinate(x: ProjPoint) -> Optional[Fraction]:
    return None if x.is_infinity else x.to_fraction()


def _left_push(points, target: Fraction):
    return attractive_left_translation(points, Dyadic.from_fraction(target))


def thompson_choose_t(E: Sequence, S: Sequence, P: Sequence):
    """Simulate line-picture elements by integer translations: (h_map, t, witness)."""
    pairs = []
    h_map = []
    for g in E:
        c, a = tail_translation(g)
        h = translation(c)
        h_map.append((g, h))
        pairs.append((g, h, a))
    P = [Dyadic.coerce(p) for p in P]
    witness = simulation_from_approximation(LINE_ACTION, pairs, S, P, "left", _left_push, _dyadic_coordinate)
    logger.info(f"chose t = {witness.t} for {len(pairs)} element(s)")
    return h_map, witness.t, witness


def monod_choose_t(E: Sequence[PPElement], S: Sequence[PPElement], P: Sequence[ProjPoint]):
    """Simulate elements of H by the affine subgroup T: (h_map, t, witness)."""
    pairs = []
    h_map = []
    for g in E:
        m, a = tail_affine(g)
        h = PPElement((), (m,))
        h_map.append((g, h))
        pairs.append((g, h, ProjPoint.affine(a)))
    witness = simulation_from_approximation(
        MONOD_ACTION, pairs, S, list(P), "right", attractive_translation, _proj_coordinate
    )
    logger.info(f"chose t = {witness.t} for {len(pairs)} element(s)")
    return h_map, witness.t, witness


def approximation_witness(action: ActionHandle, g, samples: int = DEFAULT_SAMPLES) -> ApproximationWitness:
    """Pair g with its tail part and sample points inside the tail."""
    if action.name == LINE_ACTION.name:
        c, a = tail_translation(g)
        points: List = [a - k for k in range(samples)]
        return ApproximationWitness(action, g, translation(c), tuple(points))
    if action.name == MONOD_ACTION.name:
        m, a = tail_affine(g)
        points = [ProjPoint.affine(a + k) for k in range(samples)]
        points.append(ProjPoint(1, 0))
        return ApproximationWitness(action, g, PPElement((), (m,)), tuple(points))
    raise PreconditionError(f"no tail approximation for action '{action.name}'")
