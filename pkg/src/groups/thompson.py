"""Thompson's group F in the unit-interval and real-line pictures.

Elements are piecewise dyadic-affine maps with power-of-two slopes, stored as
their minimal breakpoint lists. `compose(f, g)` applies g first.

The two pictures are conjugated by the order isomorphism kappa: (0,1) -> R,
which is affine on each [t_n, t_(n+1)] and sends t_n to n. Only finitely many
t_n matter for a given element; `phi` and `phi_inv` pick them from the element's
breakpoints and its tail slopes.
"""

import bisect
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from errors import InvariantViolation, PreconditionError
from groups.actions import ActionHandle
from groups.exact import Dyadic, log2_ceil, log2_exact, log2_floor
from groups.wreath import Config, SemidirectElem, int_config, tau_apply

logger = logging.getLogger(__name__)

Point = Tuple[Dyadic, Dyadic]

ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)


def _slope_exp(p: Point, q: Point) -> int:
    dx = (q[0] - p[0]).to_fraction()
    dy = (q[1] - p[1]).to_fraction()
    if dx <= 0 or dy <= 0:
        raise InvariantViolation("breakpoints not strictly increasing", f"{_fmt(p)} -> {_fmt(q)}")
    return log2_exact(dy / dx)


def _fmt(p: Point) -> str:
    return f"({p[0]}, {p[1]})"


def _piece_value(p: Point, k: int, x: Dyadic) -> Dyadic:
    return p[1] + (x - p[0]).scale2(k)


def _minimal_unit(points: Sequence[Point]) -> Tuple[Point, ...]:
    out: List[Point] = []
    for p in points:
        while len(out) >= 2 and _slope_exp(out[-2], out[-1]) == _slope_exp(out[-1], p):
            out.pop()
        out.append(p)
    return tuple(out)


def _minimal_line(points: Sequence[Point]) -> Tuple[Point, ...]:
    # both tails have slope 1 (exponent 0)
    def left_exp(stack):
        return _slope_exp(stack[-2], stack[-1]) if len(stack) >= 2 else 0

    out: List[Point] = []
    for p in points:
        while out and left_exp(out) == _slope_exp(out[-1], p):
            out.pop()
        out.append(p)
    while out and left_exp(out) == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class PLMapUnit:
    """An element of F acting on [0, 1]."""

    breakpoints: Tuple[Point, ...]

    def __post_init__(self):
        points = tuple((Dyadic.coerce(x), Dyadic.coerce(y)) for x, y in self.breakpoints)
        object.__setattr__(self, "breakpoints", points)
        if len(points) < 2 or points[0] != (ZERO, ZERO) or points[-1] != (ONE, ONE):
            raise InvariantViolation("unit map must run from (0,0) to (1,1)", str([_fmt(p) for p in points]))
        slopes = tuple(_slope_exp(p, q) for p, q in zip(points, points[1:]))
        if any(a == b for a, b in zip(slopes, slopes[1:])):
            raise InvariantViolation("redundant breakpoint", str([_fmt(p) for p in points]))
        object.__setattr__(self, "_xs", tuple(x for x, _ in points))
        object.__setattr__(self, "_slopes", slopes)

    @classmethod
    def from_points(cls, points: Sequence[Point]) -> "PLMapUnit":
        """Build from any breakpoint list through (0,0) and (1,1), dropping redundant points."""
        return cls(_minimal_unit(sorted(points)))

    @property
    def xs(self) -> Tuple[Dyadic, ...]:
        return self._xs

    @property
    def slope_exps(self) -> Tuple[int, ...]:
        return self._slopes

    def is_identity(self) -> bool:
        return len(self.breakpoints) == 2

    def __str__(self):
        return "PLMapUnit(" + ", ".join(_fmt(p) for p in self.breakpoints) + ")"


@dataclass(frozen=True)
class PLMapLine:
    """An element of F acting on Z[1/2]; x -> x + left_tail left of the first
    breakpoint and x -> x + right_tail right of the last one."""

    breakpoints: Tuple[Point, ...] = ()
    left_tail: int = 0
    right_tail: int = 0

    def __post_init__(self):
        points = tuple((Dyadic.coerce(x), Dyadic.coerce(y)) for x, y in self.breakpoints)
        object.__setattr__(self, "breakpoints", points)
        if not isinstance(self.left_tail, int) or not isinstance(self.right_tail, int):
            raise InvariantViolation("tails must be integers", f"{self.left_tail!r}, {self.right_tail!r}")
        if not points:
            if self.left_tail != self.right_tail:
                raise InvariantViolation("translation tails disagree", f"{self.left_tail} != {self.right_tail}")
            slopes = ()
        else:
            slopes = tuple(_slope_exp(p, q) for p, q in zip(points, points[1:]))
            first, last = points[0], points[-1]
            if first[1] - first[0] != Dyadic(self.left_tail):
                raise InvariantViolation("first breakpoint off the left tail", _fmt(first))
            if last[1] - last[0] != Dyadic(self.right_tail):
                raise InvariantViolation("last breakpoint off the right tail", _fmt(last))
            if _minimal_line(points) != points:
                raise InvariantViolation("redundant breakpoint", str([_fmt(p) for p in points]))
        object.__setattr__(self, "_xs", tuple(x for x, _ in points))
        object.__setattr__(self, "_slopes", slopes)

    @classmethod
    def from_points(cls, points: Sequence[Point], left_tail: int, right_tail: int) -> "PLMapLine":
        return cls(_minimal_line(sorted(points)), left_tail, right_tail)

    @property
    def xs(self) -> Tuple[Dyadic, ...]:
        return self._xs

    @property
    def slope_exps(self) -> Tuple[int, ...]:
        return self._slopes

    def is_identity(self) -> bool:
        return not self.breakpoints and self.left_tail == 0

    def __str__(self):
        pts = ", ".join(_fmt(p) for p in self.breakpoints)
        return f"PLMapLine([{pts}], left={self.left_tail}, right={self.right_tail})"


UNIT_IDENTITY = PLMapUnit(((ZERO, ZERO), (ONE, ONE)))


def translation(c: int) -> PLMapLine:
    return PLMapLine((), c, c)


def pl_eval(f, x) -> Dyadic:
    x = Dyadic.coerce(x)
    if isinstance(f, PLMapUnit):
        if x < ZERO or x > ONE:
            raise PreconditionError(f"{x} lies outside [0, 1]")
    elif not isinstance(f, PLMapLine):
        raise TypeError(f"not a Thompson element: {f!r}")
    points = f.breakpoints
    if isinstance(f, PLMapLine):
        if not points:
            return x + f.left_tail
        if x <= points[0][0]:
            return x + f.left_tail
        if x >= points[-1][0]:
            return x + f.right_tail
    i = bisect.bisect_right(f.xs, x) - 1
    if i == len(points) - 1:
        return points[-1][1]
    return _piece_value(points[i], f.slope_exps[i], x)


def pl_inverse(f):
    swapped = tuple((y, x) for x, y in f.breakpoints)
    if isinstance(f, PLMapUnit):
        return PLMapUnit(swapped)
    return PLMapLine(swapped, -f.left_tail, -f.right_tail)


def pl_compose(f, g):
    """f o g, i.e. x -> f(g(x))."""
    if type(f) is not type(g):
        raise PreconditionError("cannot compose elements of different pictures")
    g_inv = pl_inverse(g)
    candidates = set(g.xs) | {pl_eval(g_inv, x) for x in f.xs}
    if isinstance(f, PLMapUnit):
        return PLMapUnit.from_points([(x, pl_eval(f, pl_eval(g, x))) for x in candidates])
    points = [(x, pl_eval(f, pl_eval(g, x))) for x in candidates]
    return PLMapLine.from_points(points, f.left_tail + g.left_tail, f.right_tail + g.right_tail)


def pl_slopes(f) -> Tuple[Fraction, ...]:
    return tuple(Fraction(2) ** k for k in f.slope_exps)


def _one_sided_exps(g: PLMapUnit, x: Dyadic) -> Tuple[Optional[int], Optional[int]]:
    x = Dyadic.coerce(x)
    if x < ZERO or x > ONE:
        raise PreconditionError(f"{x} lies outside [0, 1]")
    xs, slopes = g.xs, g.slope_exps
    i = bisect.bisect_left(xs, x)
    if i < len(xs) and xs[i] == x:
        left = slopes[i - 1] if i > 0 else None
        right = slopes[i] if i < len(slopes) else None
        return left, right
    return slopes[i - 1], slopes[i - 1]


def one_sided_slopes(g: PLMapUnit, x) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """(left derivative, right derivative) at x; absent at the matching endpoint."""
    left, right = _one_sided_exps(g, x)
    return (
        None if left is None else Fraction(2) ** left,
        None if right is None else Fraction(2) ** right,
    )


def eta(g: PLMapUnit) -> Config:
    """log2 of the slope jump at every point of D, as a finitely supported Z-config."""
    values = {}
    for x in g.xs:
        left, right = _one_sided_exps(g, x)
        values[x] = (right or 0) - (left or 0)
    return int_config(values)


def eta_jump_points(g: PLMapUnit) -> Tuple[Dyadic, ...]:
    return eta(g).support()


def iota(g: PLMapUnit) -> SemidirectElem:
    """g -> (eta(g^-1), g) in Z^(D) x| F."""
    return SemidirectElem(eta(pl_inverse(g)), g, UNIT_ACTION)


def beta_apply(g: PLMapUnit, f: Config) -> Config:
    """The twisted action f -> g.f + eta(g^-1)."""
    return tau_apply(UNIT_ACTION, g, f) + eta(pl_inverse(g))


def freeness_witness(g: PLMapUnit) -> Tuple[Dyadic, int]:
    """The point t = min supp eta(g) and the change -eta(g)(t) that beta_g makes there.

    g fixes every x <= t, so beta_apply(g, f)(t) = f(t) - eta(g)(t) for any f.
    """
    jumps = eta(g)
    if not jumps.entries:
        raise PreconditionError("the identity has no freeness witness")
    t, value = jumps.entries[0]
    return t, -value


# kappa: (0,1) -> R

def kappa_breakpoint(n: int) -> Dyadic:
    """t_n: 1 - 2^-(n+1) for n >= 0, 2^(n-1) for n < 0."""
    if n >= 0:
        return Dyadic((1 << (n + 1)) - 1, n + 1)
    return Dyadic(1, 1 - n)


def _kappa_scale(n: int) -> int:
    # log2 of 1 / (t_(n+1) - t_n)
    return n + 2 if n >= 0 else 1 - n


def _kappa_segment(x: Dyadic) -> int:
    if x >= HALF:
        return -log2_ceil((ONE - x).to_fraction()) - 1
    return log2_floor(x.to_fraction()) + 1


def kappa(x) -> Dyadic:
    x = Dyadic.coerce(x)
    if x <= ZERO or x >= ONE:
        raise PreconditionError(f"kappa is defined on (0, 1) only, got {x}")
    n = _kappa_segment(x)
    return (x - kappa_breakpoint(n)).scale2(_kappa_scale(n)) + n


def kappa_inv(y) -> Dyadic:
    y = Dyadic.coerce(y)
    n = y.floor()
    return kappa_breakpoint(n) + (y - n).scale2(-_kappa_scale(n))


def phi(g: PLMapUnit) -> PLMapLine:
    """kappa o g o kappa^-1 as a line-picture element."""
    if g.is_identity():
        return translation(0)
    k0, k1 = g.slope_exps[0], g.slope_exps[-1]
    interior = g.xs[1:-1]
    n_left = min(0, -k0)
    while kappa_breakpoint(n_left) > interior[0]:
        n_left -= 1
    n_right = max(0, k1)
    while kappa_breakpoint(n_right) < interior[-1]:
        n_right += 1
    g_inv = pl_inverse(g)
    candidates = {kappa_breakpoint(n) for n in range(n_left, n_right + 1)}
    candidates.update(interior)
    candidates.update(pl_eval(g_inv, kappa_breakpoint(m)) for m in range(n_left + k0, n_right - k1 + 1))
    points = [(kappa(x), kappa(pl_eval(g, x))) for x in candidates]
    return PLMapLine.from_points(points, k0, -k1)


def phi_inv(h: PLMapLine) -> PLMapUnit:
    c_left, c_right = h.left_tail, h.right_tail
    first = h.xs[0] if h.xs else ZERO
    last = h.xs[-1] if h.xs else ZERO
    n_left = min(0, -c_left, first.floor())
    n_right = max(0, -c_right, last.ceil())
    h_inv = pl_inverse(h)
    candidates = {Dyadic(n) for n in range(n_left, n_right + 1)}
    candidates.update(h.xs)
    candidates.update(pl_eval(h_inv, Dyadic(m)) for m in range(n_left + c_left, n_right + c_right + 1))
    points = [(kappa_inv(y), kappa_inv(pl_eval(h, y))) for y in candidates]
    points += [(ZERO, ZERO), (ONE, ONE)]
    return PLMapUnit.from_points(points)


def tail_translation(h: PLMapLine) -> Tuple[int, Dyadic]:
    """(c, a) with h(x) = x + c for every x <= a."""
    a = h.xs[0] if h.xs else ZERO
    return h.left_tail, a


def attractive_left_translation(points: Sequence, a) -> PLMapLine:
    """The translation by -N, N >= 0 least, pushing every point into (-inf, a]."""
    points = [Dyadic.coerce(p) for p in points]
    if not points:
        return translation(0)
    n = max(0, (max(points) - Dyadic.coerce(a)).ceil())
    return translation(-n)


def _standard_pieces(a: Dyadic, b: Dyadic) -> List[Tuple[Dyadic, int]]:
    """Split [a, b] into standard dyadic intervals [a_i, a_i + 2^-m_i]."""
    pieces = []
    while a < b:
        m = a.exp if a else 0
        while a + Dyadic(1, m) > b:
            m += 1
        pieces.append((a, m))
        a = a + Dyadic(1, m)
    return pieces


def _bisect_first(pieces: List[Tuple[Dyadic, int]]) -> None:
    start, m = pieces[0]
    pieces[0:1] = [(start, m + 1), (start + Dyadic(1, m + 1), m + 1)]


def strong_transitive_F(xs: Sequence, ys: Sequence) -> PLMapUnit:
    """Some g in F with g(xs[i]) = ys[i], built from paired standard dyadic intervals."""
    xs = [Dyadic.coerce(x) for x in xs]
    ys = [Dyadic.coerce(y) for y in ys]
    if len(xs) != len(ys):
        raise PreconditionError(f"tuples of different lengths: {len(xs)} and {len(ys)}")
    for name, values in (("xs", xs), ("ys", ys)):
        if any(v <= ZERO or v >= ONE for v in values):
            raise PreconditionError(f"{name} must lie in (0, 1)")
        if any(a >= b for a, b in zip(values, values[1:])):
            raise PreconditionError(f"{name} must be strictly increasing")
    x_cuts = [ZERO, *xs, ONE]
    y_cuts = [ZERO, *ys, ONE]
    points = []
    for i in range(len(x_cuts) - 1):
        px = _standard_pieces(x_cuts[i], x_cuts[i + 1])
        py = _standard_pieces(y_cuts[i], y_cuts[i + 1])
        while len(px) < len(py):
            _bisect_first(px)
        while len(py) < len(px):
            _bisect_first(py)
        points.extend((sx, sy) for (sx, _), (sy, _) in zip(px, py))
    points.append((ONE, ONE))
    return PLMapUnit.from_points(points)


def generators() -> Tuple[PLMapUnit, PLMapUnit]:
    a = PLMapUnit(((ZERO, ZERO), (HALF, Dyadic(1, 2)), (Dyadic(3, 2), HALF), (ONE, ONE)))
    b = PLMapUnit((
        (ZERO, ZERO),
        (HALF, HALF),
        (Dyadic(3, 2), Dyadic(5, 3)),
        (Dyadic(7, 3), Dyadic(3, 2)),
        (ONE, ONE),
    ))
    return a, b


def random_word(rng: random.Random, length: int, letters: str = "ABab") -> str:
    return "".join(rng.choice(letters) for _ in range(length))


GEN_A, GEN_B = generators()

UNIT_ACTION = ActionHandle(
    name="thompson-unit",
    domain="dyadic[0,1]",
    identity=UNIT_IDENTITY,
    compose=pl_compose,
    inverse=pl_inverse,
    apply=pl_eval,
    generators={"A": GEN_A, "B": GEN_B},
)

LINE_ACTION = ActionHandle(
    name="thompson-line",
    domain="dyadic",
    identity=translation(0),
    compose=pl_compose,
    inverse=pl_inverse,
    apply=pl_eval,
    generators={"A": phi(GEN_A), "B": phi(GEN_B)},
)


def word_element(word: str, picture: str = "unit"):
    """Evaluate a word over {A, B, a, b}; lower case is the inverse."""
    if picture not in ("unit", "line"):
        raise PreconditionError(f"unknown picture {picture!r}")
    action = UNIT_ACTION if picture == "unit" else LINE_ACTION
    return action.word(word)
