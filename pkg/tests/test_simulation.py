from dataclasses import replace

import pytest

from conftest import random_dyadic_unit, random_pp_element, random_rationals, random_unit_element
from certificates.simulation import (
    SimulationWitness,
    approximation_witness,
    check_approximation_witness,
    check_simulation_witness,
    monod_choose_t,
    simulation_from_approximation,
    thompson_choose_t,
)
from errors import PreconditionError
from groups.exact import INFINITY, Dyadic, ProjPoint
from groups.monod import MONOD_ACTION, pp_translation, strongly_transitive_H
from groups.thompson import LINE_ACTION, UNIT_ACTION, kappa, phi, translation


def test_thompson_generators_are_simulated_by_translations():
    A, B = LINE_ACTION.letter("A"), LINE_ACTION.letter("B")
    h_map, t, witness = thompson_choose_t([A, B], [A, LINE_ACTION.letter("b")], [Dyadic(3), Dyadic(-2)])
    assert [h for _, h in h_map] == [translation(-1), translation(0)]
    assert witness.t == t
    verdict = check_simulation_witness(witness)
    assert verdict
    assert verdict.details["checks"] == 8


def test_thompson_choose_t_on_random_elements(rng):
    for _ in range(30):
        E = [phi(random_unit_element(rng, 8)) for _ in range(rng.randint(1, 3))]
        S = [phi(random_unit_element(rng, 8)) for _ in range(rng.randint(0, 3))]
        P = [kappa(random_dyadic_unit(rng)) for _ in range(rng.randint(1, 4))]
        _, _, witness = thompson_choose_t(E, S, P)
        assert check_simulation_witness(witness)


def test_monod_elements_are_simulated_by_affine_maps():
    E = [MONOD_ACTION.letter("P"), MONOD_ACTION.letter("D"), strongly_transitive_H([0, 1], [2, 5])]
    S = [MONOD_ACTION.letter("T"), MONOD_ACTION.letter("p")]
    P = [ProjPoint.affine(5), INFINITY, ProjPoint(-7, 1)]
    h_map, t, witness = monod_choose_t(E, S, P)
    assert all(len(h.pieces) == 1 for _, h in h_map)
    assert check_simulation_witness(witness)


def test_monod_choose_t_on_random_elements(rng):
    for _ in range(30):
        E = [random_pp_element(rng) for _ in range(rng.randint(1, 3))]
        S = [random_pp_element(rng) for _ in range(rng.randint(0, 2))]
        P = [ProjPoint.affine(x) for x in random_rationals(rng, rng.randint(1, 4))]
        _, _, witness = monod_choose_t(E, S, P)
        assert check_simulation_witness(witness)


def test_empty_family_needs_no_translation():
    _, t, witness = thompson_choose_t([], [], [Dyadic(1)])
    assert t == translation(0)
    assert check_simulation_witness(witness).details["checks"] == 0


def test_wrong_witness_is_rejected():
    B = LINE_ACTION.letter("B")
    identity = translation(0)
    witness = SimulationWitness(LINE_ACTION, ((B, identity),), (identity,), identity, (Dyadic(3),))
    verdict = check_simulation_witness(witness)
    assert not verdict
    assert verdict.reason == "g.s.t and h_g.s.t disagree"


def test_approximation_witnesses():
    line = approximation_witness(LINE_ACTION, LINE_ACTION.letter("B"), samples=5)
    assert line.h == translation(0)
    assert len(line.samples) == 5
    assert check_approximation_witness(line)

    monod = approximation_witness(MONOD_ACTION, strongly_transitive_H([0, 1], [2, 5]))
    assert INFINITY in monod.samples
    assert check_approximation_witness(monod)

    broken = approximation_witness(LINE_ACTION, LINE_ACTION.letter("B"))
    broken = type(broken)(LINE_ACTION, broken.g, broken.h, (Dyadic(3),))
    assert check_approximation_witness(broken).reason == "g and h disagree"


def test_unit_picture_has_no_tail_approximation():
    with pytest.raises(PreconditionError):
        approximation_witness(UNIT_ACTION, UNIT_ACTION.letter("A"))


def test_side_must_be_left_or_right():
    with pytest.raises(PreconditionError):
        simulation_from_approximation(LINE_ACTION, [], [], [], "up", None, None)


def thompson_witness():
    A, B = LINE_ACTION.letter("A"), LINE_ACTION.letter("B")
    _, _, witness = thompson_choose_t([A, B], [LINE_ACTION.letter("b")], [Dyadic(3), Dyadic(-2)])
    # B differs from its tail translation far to the right
    return witness, translation, 1


def monod_witness():
    E = [MONOD_ACTION.letter("D"), strongly_transitive_H([0, 1], [2, 5])]
    _, _, witness = monod_choose_t(E, [MONOD_ACTION.letter("T")], [ProjPoint.affine(5), ProjPoint(-7, 1)])
    # the interpolating element differs from its tail map far to the left
    return witness, pp_translation, -1


def first_disagreement(witness, moved):
    """The first k >= 1 for which the last pair disagrees at moved(k)."""
    action = witness.action
    g, h = witness.pairs[-1]
    for k in range(1, 400):
        y = moved(k)
        if action.apply(g, y) != action.apply(h, y):
            return k
    raise AssertionError("pair agrees everywhere in reach")


def with_shifted_t(witness, shift, step):
    action = witness.action
    s, p = witness.S[0], witness.P[0]

    def shifted(k):
        return action.compose(shift(k * step), witness.t)

    k = first_disagreement(witness, lambda k: action.apply(action.compose(s, shifted(k)), p))
    return replace(witness, t=shifted(k))


def with_extra_point(witness, shift, step):
    action = witness.action
    st = action.compose(witness.S[0], witness.t)
    x = action.apply(st, witness.P[0])
    k = first_disagreement(witness, lambda k: action.apply(shift(k * step), x))
    y = action.apply(shift(k * step), x)
    return replace(witness, P=witness.P + (action.apply(action.inverse(st), y),))


def with_swapped_maps(witness, shift, step):
    (g0, h0), (g1, h1) = witness.pairs
    return replace(witness, pairs=((g0, h1), (g1, h0)))


@pytest.mark.parametrize("build", [thompson_witness, monod_witness])
@pytest.mark.parametrize("mutate", [with_shifted_t, with_extra_point, with_swapped_maps])
def test_tampered_witnesses_are_rejected(build, mutate):
    witness, shift, step = build()
    assert check_simulation_witness(witness)
    verdict = check_simulation_witness(mutate(witness, shift, step))
    assert not verdict
    assert verdict.reason == "g.s.t and h_g.s.t disagree"
