from fractions import Fraction

import pytest

from conftest import random_pp_element, random_rationals
from errors import InvariantViolation, PreconditionError
from groups.actions import check_action_law
from groups.exact import IDENTITY, INFINITY, Mobius, ProjPoint, proj_leq
from groups.monod import (
    MONOD_ACTION,
    Diagnostic,
    PPElement,
    attractive_translation,
    fix_infty_map,
    pp_compose,
    pp_eval,
    pp_identity,
    pp_inverse,
    pp_translation,
    pp_validate,
    strongly_transitive_H,
    tail_affine,
    two_transitive,
    two_transitive_det,
)


def p(value):
    return ProjPoint.affine(Fraction(value))


def test_two_transitive_worked_instance():
    m = two_transitive(0, 1, 2, 5)
    assert m == Mobius(3, 2, 0, 1)
    assert two_transitive_det(0, 1, 2, 5) == 3


def test_fix_infty_map():
    assert fix_infty_map(3, 7) == Mobius(1, 4, 0, 1)
    assert fix_infty_map(Fraction(1, 2), 0).apply_affine(Fraction(1, 2)) == 0


def test_two_transitive_random_instances(rng):
    for _ in range(100):
        s0, s1 = random_rationals(rng, 2)
        t0, t1 = random_rationals(rng, 2)
        m = two_transitive(s0, s1, t0, t1)
        assert m.det > 0 and m.fixes_infinity
        assert m.apply_affine(s0) == t0
        assert m.apply_affine(s1) == t1
        assert two_transitive_det(s0, s1, t0, t1) > 0


def test_two_transitive_needs_increasing_pairs():
    with pytest.raises(PreconditionError):
        two_transitive(1, 0, 2, 5)


def test_strongly_transitive_worked_instance():
    h = strongly_transitive_H([0, 1], [2, 5])
    assert h.cuts == (p(0), p(1))
    assert h.pieces == (Mobius(1, 2, 0, 1), Mobius(3, 2, 0, 1), Mobius(1, 4, 0, 1))
    assert tail_affine(h) == (Mobius(1, 4, 0, 1), Fraction(1))


def test_strongly_transitive_random_instances(rng):
    for _ in range(100):
        n = rng.randint(1, 5)
        xs, ys = random_rationals(rng, n), random_rationals(rng, n)
        h = strongly_transitive_H(xs, ys)
        assert isinstance(pp_validate(h.cuts, h.pieces), PPElement)
        assert [pp_eval(h, p(x)) for x in xs] == [p(y) for y in ys]
        assert pp_eval(h, INFINITY) == INFINITY


def test_translation_collapses_to_one_piece():
    h = strongly_transitive_H([0, 1, 2], [3, 4, 5])
    assert h == pp_translation(3)


@pytest.mark.parametrize("cuts, pieces, kind", [
    ([p(0)], [IDENTITY], "piece count"),
    ([INFINITY], [IDENTITY, IDENTITY], "cut at infinity"),
    ([p(1), p(0)], [IDENTITY, IDENTITY, IDENTITY], "non-increasing cuts"),
    ([], [Mobius(0, -1, 1, 0)], "infinity not fixed"),
    ([p(0), p(1)], [IDENTITY, Mobius(1, 0, -2, 1), IDENTITY], "pole in piece"),
    ([p(0)], [IDENTITY, Mobius(1, 1, 0, 1)], "discontinuity"),
    ([p(0)], [IDENTITY, IDENTITY], "redundant cut"),
])
def test_validate_diagnostics(cuts, pieces, kind):
    result = pp_validate(cuts, pieces)
    assert isinstance(result, Diagnostic)
    assert result.kind == kind
    with pytest.raises(InvariantViolation):
        PPElement(tuple(cuts), tuple(pieces))


def test_validate_accepts_raw_tuples():
    result = pp_validate([(0, 1), (1, 1)], [(1, 0, 0, 1), (2, 0, 1, 1), (1, 0, 0, 1)])
    assert result == MONOD_ACTION.letter("P")
    assert isinstance(pp_validate([(0, 0)], [(1, 0, 0, 1), (1, 0, 0, 1)]), Diagnostic)


def test_generator_values():
    P = MONOD_ACTION.letter("P")
    assert pp_eval(P, p(Fraction(1, 2))) == p(Fraction(2, 3))
    assert pp_eval(P, p(5)) == p(5)
    assert pp_eval(MONOD_ACTION.letter("D"), p(-3)) == p(-6)
    assert pp_eval(MONOD_ACTION.letter("t"), p(0)) == p(-1)


def test_compose_is_the_action(rng):
    samples = [p(x) for x in random_rationals(rng, 12)] + [INFINITY]
    for _ in range(100):
        g, h = random_pp_element(rng), random_pp_element(rng)
        gh = pp_compose(g, h)
        for x in samples:
            assert pp_eval(gh, x) == pp_eval(g, pp_eval(h, x))
        assert pp_compose(g, pp_inverse(g)) == pp_identity()


def test_action_law(rng):
    elements = [random_pp_element(rng) for _ in range(6)]
    assert check_action_law(MONOD_ACTION, elements, [p(x) for x in random_rationals(rng, 8)])


def test_tail_affine_agrees_on_the_tail(rng):
    for _ in range(50):
        h = random_pp_element(rng)
        m, a = tail_affine(h)
        assert m.fixes_infinity
        for k in range(5):
            assert pp_eval(h, p(a + k)) == m.apply(p(a + k))
    assert tail_affine(pp_translation(2)) == (Mobius(1, 2, 0, 1), Fraction(0))


def test_attractive_translation():
    t = attractive_translation([p(-3), INFINITY, p(1)], 2)
    assert t == pp_translation(5)
    assert attractive_translation([INFINITY], 2) == pp_identity()
    assert attractive_translation([p(10)], 2) == pp_identity()


def test_validated_elements_preserve_order(rng):
    checked = 0
    while checked < 1000:
        g = MONOD_ACTION.word("".join(rng.choice("TDPtdp") for _ in range(rng.randint(0, 6))))
        assert pp_validate(g.cuts, g.pieces) == g
        for _ in range(20):
            x, y = random_rationals(rng, 2, spread=3)
            gx, gy = pp_eval(g, p(x)), pp_eval(g, p(y))
            assert proj_leq(gx, gy) and gx != gy
            checked += 1
