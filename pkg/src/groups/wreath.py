"""Finitely supported configurations and semidirect products H^(X) x| G.

Lamp groups are Z (used for the slope-jump cocycle of Thompson's group) and
Z/2Z (lamplighter-style configurations). Group elements of G are handled
through an `ActionHandle`, so the same code serves integer shifts, Thompson
maps and piecewise-projective maps.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, Mapping, Optional, Tuple

from errors import InvariantViolation, PreconditionError
from groups.actions import INTEGER_SHIFTS, ActionHandle
from groups.exact import point_sort_key

logger = logging.getLogger(__name__)

LAMP_GROUPS = ("Z", "Z2")


@dataclass(frozen=True)
class Config:
    lamps: str
    entries: Tuple[Tuple[Hashable, int], ...] = ()

    def __post_init__(self):
        if self.lamps not in LAMP_GROUPS:
            raise InvariantViolation("unknown lamp group", repr(self.lamps))
        keys = [point_sort_key(x) for x, _ in self.entries]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise InvariantViolation("config entries not strictly sorted", str(self.entries))
        for x, value in self.entries:
            if value == 0:
                raise InvariantViolation("stored zero lamp", f"at {x}")
            if self.lamps == "Z2" and value != 1:
                raise InvariantViolation("Z2 lamp value must be 1", f"{value} at {x}")

    @classmethod
    def of(cls, lamps: str, values: Mapping[Hashable, int]) -> "Config":
        """Build a config from any mapping, dropping zeros and reducing Z2 values."""
        items = []
        for x, value in values.items():
            if lamps == "Z2":
                value %= 2
            if value:
                items.append((x, value))
        items.sort(key=lambda item: point_sort_key(item[0]))
        return cls(lamps, tuple(items))

    @classmethod
    def empty(cls, lamps: str) -> "Config":
        return cls(lamps, ())

    def as_dict(self) -> Dict[Hashable, int]:
        return dict(self.entries)

    def value(self, x: Hashable) -> int:
        return self.as_dict().get(x, 0)

    def support(self) -> Tuple[Hashable, ...]:
        return tuple(x for x, _ in self.entries)

    def __len__(self):
        return len(self.entries)

    def __add__(self, other: "Config") -> "Config":
        if other.lamps != self.lamps:
            raise PreconditionError(f"cannot add {self.lamps} and {other.lamps} configs")
        values = self.as_dict()
        for x, value in other.entries:
            values[x] = values.get(x, 0) + value
        return Config.of(self.lamps, values)

    def __neg__(self) -> "Config":
        if self.lamps == "Z2":
            return self
        return Config(self.lamps, tuple((x, -value) for x, value in self.entries))

    def __sub__(self, other: "Config") -> "Config":
        return self + (-other)

    def total(self) -> int:
        return sum(value for _, value in self.entries)

    def sort_key(self):
        return (self.lamps, tuple((point_sort_key(x), value) for x, value in self.entries))


def int_config(values: Mapping[Hashable, int]) -> Config:
    """A Z-valued config; used for the slope-jump cocycle."""
    return Config.of("Z", values)


def tau_apply(action: ActionHandle, g, f: Config) -> Config:
    """(g.f)(x) = f(g^-1 x): move the support forward by g."""
    return Config.of(f.lamps, {action.apply(g, x): value for x, value in f.entries})


@dataclass(frozen=True)
class SemidirectElem:
    config: Config
    element: Hashable
    action: ActionHandle = field(compare=False, hash=False, repr=False, default=INTEGER_SHIFTS)

    def sort_key(self):
        return (self.config.sort_key(), repr(self.element))


def _check_compatible(a: SemidirectElem, b: SemidirectElem):
    if a.action.name != b.action.name:
        raise PreconditionError(f"action mismatch: {a.action.name} vs {b.action.name}")
    if a.config.lamps != b.config.lamps:
        raise PreconditionError(f"lamp group mismatch: {a.config.lamps} vs {b.config.lamps}")


def semidirect_identity(action: ActionHandle, lamps: str) -> SemidirectElem:
    return SemidirectElem(Config.empty(lamps), action.identity, action)


def semidirect_mul(a: SemidirectElem, b: SemidirectElem) -> SemidirectElem:
    """(f, g)(f', g') = (f + g.f', gg')."""
    _check_compatible(a, b)
    action = a.action
    return SemidirectElem(
        a.config + tau_apply(action, a.element, b.config),
        action.compose(a.element, b.element),
        action,
    )


def semidirect_inv(a: SemidirectElem) -> SemidirectElem:
    action = a.action
    g_inv = action.inverse(a.element)
    return SemidirectElem(-tau_apply(action, g_inv, a.config), g_inv, action)


def wreath_act(e: SemidirectElem, f: Config) -> Config:
    """((f, g), f') -> f + g.f'."""
    if e.config.lamps != f.lamps:
        raise PreconditionError(f"lamp group mismatch: {e.config.lamps} vs {f.lamps}")
    return e.config + tau_apply(e.action, e.element, f)


def toggle(action: ActionHandle, x: Hashable, lamps: str = "Z2", value: int = 1) -> SemidirectElem:
    """The pure lamp element (delta_x, identity)."""
    return SemidirectElem(Config.of(lamps, {x: value}), action.identity, action)


def shift_elem(action: ActionHandle, g, lamps: str = "Z2") -> SemidirectElem:
    """The pure base element (0, g)."""
    return SemidirectElem(Config.empty(lamps), g, action)


def semidirect_action(
    base: ActionHandle,
    lamps: str = "Z2",
    generators: Optional[Dict[str, SemidirectElem]] = None,
    name: Optional[str] = None,
) -> ActionHandle:
    """H^(X) x| G acting on configs by the wreath action."""
    if lamps not in LAMP_GROUPS:
        raise PreconditionError(f"unknown lamp group {lamps!r}")
    if generators is None:
        # base generators act as pure shifts; lamp toggles are added by the caller
        generators = {letter: shift_elem(base, g, lamps) for letter, g in base.generators.items()}
    return ActionHandle(
        name=name or f"wreath:{base.name}",
        domain=f"config:{lamps}",
        identity=semidirect_identity(base, lamps),
        compose=semidirect_mul,
        inverse=semidirect_inv,
        apply=wreath_act,
        generators=generators,
    )


def lamplighter_action() -> ActionHandle:
    """(Z/2Z) wr Z: F toggles the lamp at 0, S shifts configurations by +1."""
    return semidirect_action(
        INTEGER_SHIFTS,
        "Z2",
        generators={"F": toggle(INTEGER_SHIFTS, 0), "S": shift_elem(INTEGER_SHIFTS, 1)},
        name="lamplighter",
    )


def configs_on(points: Iterable[Hashable], lamps: str = "Z2"):
    """Every Z2 config supported inside `points`, in a fixed order."""
    if lamps != "Z2":
        raise PreconditionError("only Z2 configurations are enumerable")
    points = sorted(points, key=point_sort_key)
    for mask in range(1 << len(points)):
        yield Config.of("Z2", {x: 1 for i, x in enumerate(points) if mask >> i & 1})
