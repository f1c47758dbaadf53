"""Named group actions.

An `ActionHandle` bundles the group law of some concrete group with its action
on a point domain, plus the generators the certificate layer is allowed to use.
Words over generator letters name group elements: an upper-case letter is a
generator, the lower-case letter its inverse, and the word "AB" is the product
A*B (B acts first).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, Tuple

from errors import PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActionHandle:
    name: str
    domain: str
    identity: Any
    compose: Callable[[Any, Any], Any]
    inverse: Callable[[Any], Any]
    apply: Callable[[Any, Hashable], Hashable]
    generators: Dict[str, Any] = field(default_factory=dict)

    def letters(self) -> Tuple[str, ...]:
        """Generator letters followed by their inverse letters, in a fixed order."""
        upper = sorted(self.generators)
        return tuple(upper) + tuple(letter.lower() for letter in upper)

    def letter(self, letter: str):
        if letter in self.generators:
            return self.generators[letter]
        if letter.upper() in self.generators and letter.islower():
            return self.inverse(self.generators[letter.upper()])
        raise PreconditionError(f"action '{self.name}' has no generator letter {letter!r}")

    def word(self, word: str):
        """The element named by `word`; the empty word is the identity."""
        element = self.identity
        for letter in word:
            element = self.compose(element, self.letter(letter))
        return element

    def apply_tuple(self, element, points: Tuple[Hashable, ...]) -> Tuple[Hashable, ...]:
        return tuple(self.apply(element, x) for x in points)

    def with_generators(self, generators: Dict[str, Any]) -> "ActionHandle":
        for letter in generators:
            if len(letter) != 1 or not letter.isupper():
                raise PreconditionError(f"generator names must be single upper-case letters, got {letter!r}")
        return ActionHandle(
            name=self.name,
            domain=self.domain,
            identity=self.identity,
            compose=self.compose,
            inverse=self.inverse,
            apply=self.apply,
            generators=dict(generators),
        )


def invert_word(word: str) -> str:
    return "".join(letter.swapcase() for letter in reversed(word))


def check_action_law(action: ActionHandle, elements: Iterable, points: Iterable) -> bool:
    """Spot-check apply(gh, x) == apply(g, apply(h, x)) over the given samples."""
    elements = list(elements)
    points = list(points)
    for g in elements:
        for h in elements:
            gh = action.compose(g, h)
            for x in points:
                if action.apply(gh, x) != action.apply(g, action.apply(h, x)):
                    logger.warning(f"action law fails for '{action.name}' at {x!r}")
                    return False
    return True


INTEGER_SHIFTS = ActionHandle(
    name="z-shift",
    domain="integer",
    identity=0,
    compose=lambda g, h: g + h,
    inverse=lambda g: -g,
    apply=lambda g, x: x + g,
    generators={"T": 1},
)
