from fractions import Fraction

import pytest

from conftest import random_dyadic_unit, random_increasing_dyadics, random_unit_element
from errors import InvariantViolation, PreconditionError
from groups.actions import check_action_law
from groups.exact import Dyadic
from groups.thompson import (
    GEN_A,
    GEN_B,
    LINE_ACTION,
    UNIT_ACTION,
    UNIT_IDENTITY,
    PLMapLine,
    PLMapUnit,
    attractive_left_translation,
    beta_apply,
    eta,
    eta_jump_points,
    freeness_witness,
    iota,
    kappa,
    kappa_breakpoint,
    kappa_inv,
    one_sided_slopes,
    phi,
    phi_inv,
    pl_compose,
    pl_eval,
    pl_inverse,
    pl_slopes,
    strong_transitive_F,
    tail_translation,
    translation,
    word_element,
)
from groups.wreath import Config, semidirect_mul, tau_apply


def d(text):
    return Dyadic.parse(text)


def test_generator_values():
    assert pl_eval(GEN_A, d("1/2")) == d("1/4")
    assert pl_eval(GEN_A, d("5/8")) == d("3/8")
    assert pl_eval(GEN_B, d("1/4")) == d("1/4")
    assert pl_slopes(GEN_A) == (Fraction(1, 2), Fraction(1), Fraction(2))


def test_eta_of_a():
    assert eta(GEN_A).as_dict() == {d("0"): -1, d("1/2"): 1, d("3/4"): 1, d("1"): -1}
    assert eta_jump_points(GEN_A) == (d("0"), d("1/2"), d("3/4"), d("1"))


def test_one_sided_slopes_at_endpoints():
    assert one_sided_slopes(GEN_A, d("0")) == (None, Fraction(1, 2))
    assert one_sided_slopes(GEN_A, d("1")) == (Fraction(2), None)
    assert one_sided_slopes(GEN_A, d("5/8")) == (Fraction(1), Fraction(1))


def test_unit_maps_are_validated():
    with pytest.raises(InvariantViolation):
        PLMapUnit(((d("0"), d("0")), (d("1/2"), d("3/8")), (d("1"), d("1"))))
    with pytest.raises(InvariantViolation):
        PLMapUnit(((d("0"), d("0")), (d("1/2"), d("1/2")), (d("1"), d("1"))))
    with pytest.raises(InvariantViolation):
        PLMapUnit(((d("0"), d("1/4")), (d("1"), d("1"))))
    assert PLMapUnit.from_points([(d("1/2"), d("1/2")), (d("0"), d("0")), (d("1"), d("1"))]) == UNIT_IDENTITY


def test_line_maps_are_validated():
    with pytest.raises(InvariantViolation):
        PLMapLine((), 1, 2)
    with pytest.raises(InvariantViolation):
        PLMapLine(((d("0"), d("1")),), 0, 0)
    assert PLMapLine.from_points([(d("0"), d("0")), (d("5"), d("5"))], 0, 0) == translation(0)


def test_eval_outside_the_interval():
    with pytest.raises(PreconditionError):
        pl_eval(GEN_A, d("3/2"))


def test_compose_and_inverse(rng):
    points = [d("0"), d("1")] + [random_dyadic_unit(rng) for _ in range(10)]
    for _ in range(100):
        g, h = random_unit_element(rng), random_unit_element(rng)
        gh = pl_compose(g, h)
        for x in points:
            assert pl_eval(gh, x) == pl_eval(g, pl_eval(h, x))
        assert pl_compose(g, pl_inverse(g)) == UNIT_IDENTITY


def test_pictures_do_not_mix():
    with pytest.raises(PreconditionError):
        pl_compose(GEN_A, phi(GEN_A))


def test_cocycle_identity(rng):
    for _ in range(500):
        g, h = random_unit_element(rng), random_unit_element(rng)
        # eta(gh)(x) = eta(g)(hx) + eta(h)(x)
        pulled = tau_apply(UNIT_ACTION, pl_inverse(h), eta(g))
        assert eta(pl_compose(g, h)) == pulled + eta(h)


def test_eta_sums_to_zero(rng):
    for _ in range(200):
        assert eta(random_unit_element(rng)).total() == 0


def test_iota_is_a_homomorphism(rng):
    for _ in range(200):
        g, h = random_unit_element(rng), random_unit_element(rng)
        assert iota(pl_compose(g, h)) == semidirect_mul(iota(g), iota(h))


def test_beta_action_is_free(rng):
    f = Config.of("Z", {d("1/2"): 3, d("1/8"): -1})
    for _ in range(200):
        g = random_unit_element(rng)
        if g.is_identity():
            continue
        moved = beta_apply(g, f)
        assert moved != f
        t, change = freeness_witness(g)
        assert t == min(eta(g).support())
        assert moved.value(t) == f.value(t) + change


def test_freeness_witness_needs_a_non_identity():
    with pytest.raises(PreconditionError):
        freeness_witness(UNIT_IDENTITY)


@pytest.mark.parametrize("x, expected", [("5/8", "1/2"), ("1/4", "-1"), ("7/8", "2"), ("1/2", "0")])
def test_kappa_values(x, expected):
    assert kappa(d(x)) == d(expected)


def test_kappa_breakpoints():
    for n in range(-16, 17):
        t = kappa_breakpoint(n)
        assert kappa(t) == Dyadic(n)
        assert kappa_inv(Dyadic(n)) == t


def test_kappa_round_trip(rng):
    for _ in range(200):
        x = random_dyadic_unit(rng, depth=12)
        assert kappa_inv(kappa(x)) == x
    with pytest.raises(PreconditionError):
        kappa(d("1"))


def test_phi_of_the_generators():
    assert phi(GEN_A) == translation(-1)
    line_b = phi(GEN_B)
    assert (line_b.left_tail, line_b.right_tail) == (0, -1)
    assert pl_eval(line_b, d("-5")) == d("-5")
    assert pl_eval(line_b, d("3")) == d("2")
    assert LINE_ACTION.letter("B") == line_b


def test_phi_is_a_homomorphism(rng):
    for _ in range(100):
        g, h = random_unit_element(rng), random_unit_element(rng)
        assert phi(pl_compose(g, h)) == pl_compose(phi(g), phi(h))
        assert phi_inv(phi(g)) == g


def test_phi_conjugates_by_kappa(rng):
    for _ in range(50):
        g = random_unit_element(rng)
        line = phi(g)
        for _ in range(5):
            x = random_dyadic_unit(rng, depth=10)
            assert pl_eval(line, kappa(x)) == kappa(pl_eval(g, x))


def test_tail_translation():
    assert tail_translation(translation(3)) == (3, Dyadic(0))
    c, a = tail_translation(phi(GEN_B))
    assert c == 0
    for k in range(5):
        x = a - k
        assert pl_eval(phi(GEN_B), x) == x


def test_attractive_left_translation():
    t = attractive_left_translation([Dyadic(5), d("1/2")], Dyadic(-10))
    assert t == translation(-15)
    assert attractive_left_translation([Dyadic(-20)], Dyadic(0)) == translation(0)


def test_strong_transitivity(rng):
    for _ in range(100):
        n = rng.randint(1, 4)
        xs = random_increasing_dyadics(rng, n)
        ys = random_increasing_dyadics(rng, n)
        g = strong_transitive_F(xs, ys)
        assert [pl_eval(g, x) for x in xs] == ys


def test_strong_transitivity_preconditions():
    with pytest.raises(PreconditionError):
        strong_transitive_F([d("1/2"), d("1/4")], [d("1/4"), d("1/2")])
    with pytest.raises(PreconditionError):
        strong_transitive_F([d("1")], [d("1/2")])


def test_words():
    assert word_element("Aa") == UNIT_IDENTITY
    assert word_element("AB") == pl_compose(GEN_A, GEN_B)
    assert word_element("A", "line") == phi(GEN_A)
    with pytest.raises(PreconditionError):
        word_element("A", "circle")


def test_action_laws(rng):
    samples = [random_unit_element(rng, 6) for _ in range(6)]
    assert check_action_law(UNIT_ACTION, samples, [random_dyadic_unit(rng) for _ in range(8)])
    assert check_action_law(LINE_ACTION, [phi(g) for g in samples], [Dyadic(k, 2) for k in range(-12, 13)])


def test_composition_is_associative(rng):
    for _ in range(500):
        f, g, h = (random_unit_element(rng, 8) for _ in range(3))
        assert pl_compose(pl_compose(f, g), h) == pl_compose(f, pl_compose(g, h))
        f, g, h = phi(f), phi(g), phi(h)
        assert pl_compose(pl_compose(f, g), h) == pl_compose(f, pl_compose(g, h))


def test_squaring_a():
    assert pl_eval(pl_compose(GEN_A, GEN_A), d("1/2")) == d("1/8")


def test_strong_transitivity_on_no_points():
    assert strong_transitive_F([], []) == UNIT_IDENTITY


def test_left_tail_constant_is_additive(rng):
    for _ in range(200):
        g, h = phi(random_unit_element(rng)), phi(random_unit_element(rng))
        c_g, _ = tail_translation(g)
        c_h, _ = tail_translation(h)
        c_gh, a = tail_translation(pl_compose(g, h))
        assert c_gh == c_g + c_h
        assert pl_eval(pl_compose(g, h), a - 1) == a - 1 + c_gh
