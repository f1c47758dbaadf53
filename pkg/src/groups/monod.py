"""Monod's group of piecewise-projective homeomorphisms of the projective line.

An element is stored as increasing affine cuts b_1 < ... < b_k and k + 1
Mobius pieces; piece 0 acts on (-inf, b_1], piece i on [b_i, b_(i+1)] and
piece k on [b_k, inf). Both end pieces fix infinity, so every element fixes
infinity and restricts to an increasing bijection of the affine line.

Only rational cuts are representable. `pp_validate` reports the first broken
invariant as a `Diagnostic` instead of raising.
"""

import bisect
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from errors import InvariantViolation, PreconditionError
from groups.actions import ActionHandle
from groups.exact import IDENTITY, INFINITY, Mobius, ProjPoint, mobius_compose, mobius_inverse, proj_apply

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    detail: str
    cut_index: Optional[int] = None

    def __str__(self):
        where = f" (cut {self.cut_index})" if self.cut_index is not None else ""
        return f"{self.kind}{where}: {self.detail}"


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def _denominator_at(m: Mobius, x: Fraction) -> Fraction:
    return m.c * x + m.d


def _diagnose(cuts: Sequence[ProjPoint], pieces: Sequence[Mobius]) -> Optional[Diagnostic]:
    if len(pieces) != len(cuts) + 1:
        return Diagnostic("piece count", f"{len(cuts)} cuts need {len(cuts) + 1} pieces, got {len(pieces)}")
    for i, b in enumerate(cuts):
        if b.is_infinity:
            return Diagnostic("cut at infinity", "cuts must be affine points", i)
    values = [b.to_fraction() for b in cuts]
    for i in range(1, len(values)):
        if values[i - 1] >= values[i]:
            return Diagnostic("non-increasing cuts", f"{cuts[i - 1]} then {cuts[i]}", i)
    for end in (pieces[0], pieces[-1]):
        if not end.fixes_infinity:
            return Diagnostic("infinity not fixed", f"end piece {end} is not affine")
    for i in range(1, len(pieces) - 1):
        m = pieces[i]
        lo, hi = _sign(_denominator_at(m, values[i - 1])), _sign(_denominator_at(m, values[i]))
        if lo == 0 or hi == 0 or lo != hi:
            return Diagnostic("pole in piece", f"{m} has its pole in [{cuts[i - 1]}, {cuts[i]}]", i)
    for i, b in enumerate(cuts):
        left, right = proj_apply(pieces[i], b), proj_apply(pieces[i + 1], b)
        if left != right:
            return Diagnostic("discontinuity", f"at cut {b}: {left} != {right}", i)
    images = [proj_apply(pieces[i], b) for i, b in enumerate(cuts)]
    for i, image in enumerate(images):
        if image.is_infinity:
            return Diagnostic("non-monotone", f"cut {cuts[i]} is sent to infinity", i)
    for i in range(1, len(images)):
        if images[i - 1].to_fraction() >= images[i].to_fraction():
            return Diagnostic("non-monotone", f"cut images {images[i - 1]} and {images[i]} out of order", i)
    for i in range(len(cuts)):
        if pieces[i] == pieces[i + 1]:
            return Diagnostic("redundant cut", f"pieces agree across {cuts[i]}", i)
    return None


@dataclass(frozen=True)
class PPElement:
    cuts: Tuple[ProjPoint, ...]
    pieces: Tuple[Mobius, ...]

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        problem = _diagnose(self.cuts, self.pieces)
        if problem is not None:
            raise InvariantViolation(problem.kind, str(problem))
        object.__setattr__(self, "_cut_values", tuple(b.to_fraction() for b in self.cuts))

    def piece_at(self, x: Fraction) -> Mobius:
        """The piece acting at the affine point x (either neighbour at a cut)."""
        return self.pieces[bisect.bisect_left(self._cut_values, x)]

    def is_identity(self) -> bool:
        return not self.cuts and self.pieces[0] == IDENTITY

    def __str__(self):
        parts = [str(self.pieces[0])]
        for b, m in zip(self.cuts, self.pieces[1:]):
            parts.append(f"|{b}| {m}")
        return "PPElement(" + " ".join(parts) + ")"


def _as_proj(value) -> ProjPoint:
    if isinstance(value, ProjPoint):
        return value
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return ProjPoint(*value)
    return ProjPoint.affine(value)


def _as_mobius(value) -> Mobius:
    if isinstance(value, Mobius):
        return value
    return Mobius(*value)


def pp_validate(cuts: Iterable, pieces: Iterable) -> Union[PPElement, Diagnostic]:
    """Build an element from raw cut/piece data or explain why it is not one."""
    try:
        cut_points = [_as_proj(b) for b in cuts]
        matrices = [_as_mobius(m) for m in pieces]
    except InvariantViolation as e:
        return Diagnostic(e.kind, e.detail)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        return Diagnostic("malformed data", str(e))
    problem = _diagnose(cut_points, matrices)
    if problem is not None:
        logger.debug(f"rejected piecewise-projective data: {problem}")
        return problem
    return PPElement(tuple(cut_points), tuple(matrices))


def _minimized(cuts: Sequence[Fraction], pieces: Sequence[Mobius]) -> PPElement:
    out_cuts: List[Fraction] = []
    out_pieces: List[Mobius] = [pieces[0]]
    for b, m in zip(cuts, pieces[1:]):
        if m == out_pieces[-1]:
            continue
        out_cuts.append(b)
        out_pieces.append(m)
    return PPElement(tuple(ProjPoint.affine(b) for b in out_cuts), tuple(out_pieces))


def pp_identity() -> PPElement:
    return PPElement((), (IDENTITY,))


def pp_translation(n) -> PPElement:
    """x -> x + n."""
    return PPElement((), (Mobius.from_rationals(1, n, 0, 1),))


def pp_eval(h: PPElement, x: ProjPoint) -> ProjPoint:
    if x.is_infinity:
        return INFINITY
    return proj_apply(h.piece_at(x.to_fraction()), x)


def _eval_affine(h: PPElement, x: Fraction) -> Fraction:
    return h.piece_at(x).apply_affine(x)


def pp_inverse(h: PPElement) -> PPElement:
    images = tuple(pp_eval(h, b) for b in h.cuts)
    return PPElement(images, tuple(mobius_inverse(m) for m in h.pieces))


def _samples(cuts: Sequence[Fraction]) -> List[Fraction]:
    """One point strictly inside each interval cut out by `cuts`."""
    if not cuts:
        return [Fraction(0)]
    inner = [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
    return [cuts[0] - 1, *inner, cuts[-1] + 1]


def pp_compose(h1: PPElement, h2: PPElement) -> PPElement:
    """h1 o h2, i.e. h2 acts first."""
    h2_inv = pp_inverse(h2)
    candidates = set(h2._cut_values)
    candidates.update(_eval_affine(h2_inv, b) for b in h1._cut_values)
    cuts = sorted(candidates)
    pieces = []
    for x in _samples(cuts):
        inner = h2.piece_at(x)
        outer = h1.piece_at(inner.apply_affine(x))
        pieces.append(mobius_compose(outer, inner))
    return _minimized(cuts, pieces)


def two_transitive(s0, s1, t0, t1) -> Mobius:
    """The affine Mobius map sending s0 -> t0 and s1 -> t1."""
    s0, s1, t0, t1 = (Fraction(v) for v in (s0, s1, t0, t1))
    if not s0 < s1 or not t0 < t1:
        raise PreconditionError(f"need s0 < s1 and t0 < t1, got ({s0}, {s1}) -> ({t0}, {t1})")
    # (t0 t1; 1 1) (s0 s1; 1 1)^-1, up to the scalar 1 / (s0 - s1)
    return Mobius.from_rationals(t0 - t1, t1 * s0 - t0 * s1, 0, s0 - s1)


def two_transitive_det(s0, s1, t0, t1) -> Fraction:
    s0, s1, t0, t1 = (Fraction(v) for v in (s0, s1, t0, t1))
    if s0 == s1:
        raise PreconditionError("s0 and s1 coincide")
    return (t0 - t1) / (s0 - s1)


def fix_infty_map(s, t) -> Mobius:
    """The translation sending s to t; it fixes infinity."""
    return Mobius.from_rationals(1, Fraction(t) - Fraction(s), 0, 1)


def strongly_transitive_H(xs: Sequence, ys: Sequence) -> PPElement:
    """Some element sending xs[i] to ys[i] for every i and fixing infinity."""
    xs = [Fraction(x) for x in xs]
    ys = [Fraction(y) for y in ys]
    if len(xs) != len(ys) or not xs:
        raise PreconditionError(f"need two non-empty tuples of equal length, got {len(xs)} and {len(ys)}")
    for name, values in (("xs", xs), ("ys", ys)):
        if any(a >= b for a, b in zip(values, values[1:])):
            raise PreconditionError(f"{name} must be strictly increasing")
    pieces = [fix_infty_map(xs[0], ys[0])]
    for i in range(1, len(xs)):
        pieces.append(two_transitive(xs[i - 1], xs[i], ys[i - 1], ys[i]))
    pieces.append(fix_infty_map(xs[-1], ys[-1]))
    return _minimized(xs, pieces)


def tail_affine(h: PPElement) -> Tuple[Mobius, Fraction]:
    """(m, a) with h = m on [a, inf) and m affine."""
    a = h._cut_values[-1] if h.cuts else Fraction(0)
    return h.pieces[-1], a


def attractive_translation(points: Iterable[ProjPoint], a) -> PPElement:
    """The translation by the least N >= 0 pushing every affine point into [a, inf)."""
    affine = [p.to_fraction() for p in points if not p.is_infinity]
    if not affine:
        return pp_identity()
    n = max(0, math.ceil(Fraction(a) - min(affine)))
    return pp_translation(n)


MONOD_ACTION = ActionHandle(
    name="monod",
    domain="projective",
    identity=pp_identity(),
    compose=pp_compose,
    inverse=pp_inverse,
    apply=pp_eval,
    generators={
        "T": pp_translation(1),
        "D": PPElement((), (Mobius(2, 0, 0, 1),)),
        # x -> 2x / (x + 1) on [0, 1], identity elsewhere
        "P": PPElement((ProjPoint(0, 1), ProjPoint(1, 1)), (IDENTITY, Mobius(2, 0, 1, 1), IDENTITY)),
    },
)
