"""Named actions used by the CLI and the JSON documents."""

import logging
from functools import lru_cache
from typing import Dict, Hashable

from errors import PreconditionError
from groups.actions import INTEGER_SHIFTS, ActionHandle
from groups.exact import Dyadic, ProjPoint
from groups.monod import MONOD_ACTION
from groups.thompson import LINE_ACTION, UNIT_ACTION
from groups.wreath import lamplighter_action, semidirect_action, shift_elem, toggle

logger = logging.getLogger(__name__)

WREATH_PREFIX = "wreath:"
TOGGLE_LETTER = "L"

BASE_ACTIONS: Dict[str, ActionHandle] = {
    INTEGER_SHIFTS.name: INTEGER_SHIFTS,
    UNIT_ACTION.name: UNIT_ACTION,
    LINE_ACTION.name: LINE_ACTION,
    MONOD_ACTION.name: MONOD_ACTION,
}

# where the "L" toggle of wreath:<base> sits
TOGGLE_POINTS: Dict[str, Hashable] = {
    INTEGER_SHIFTS.name: 0,
    UNIT_ACTION.name: Dyadic(1, 1),
    LINE_ACTION.name: Dyadic(0),
    MONOD_ACTION.name: ProjPoint(0, 1),
}


def names():
    return sorted(BASE_ACTIONS) + ["lamplighter"] + [WREATH_PREFIX + name for name in sorted(BASE_ACTIONS)]


@lru_cache(maxsize=None)
def resolve(name: str) -> ActionHandle:
    if name in BASE_ACTIONS:
        return BASE_ACTIONS[name]
    if name == "lamplighter":
        return lamplighter_action()
    if name.startswith(WREATH_PREFIX):
        base = BASE_ACTIONS.get(name[len(WREATH_PREFIX):])
        if base is not None:
            generators = {letter: shift_elem(base, g) for letter, g in base.generators.items()}
            generators[TOGGLE_LETTER] = toggle(base, TOGGLE_POINTS[base.name])
            return semidirect_action(base, "Z2", generators, name)
    raise PreconditionError(f"unknown action '{name}' (known: {', '.join(names())})")


def base_action(name: str) -> ActionHandle:
    """The base action under a semidirect action."""
    if name == "lamplighter":
        return INTEGER_SHIFTS
    if name.startswith(WREATH_PREFIX):
        base = name[len(WREATH_PREFIX):]
        if base in BASE_ACTIONS:
            return BASE_ACTIONS[base]
    raise PreconditionError(f"'{name}' is not a semidirect action")


def element_kind(name: str) -> str:
    """'z-shift', 'thompson-unit', 'thompson-line', 'monod' or 'semidirect'."""
    if name in BASE_ACTIONS:
        return name
    base_action(name)
    return "semidirect"
