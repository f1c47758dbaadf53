"""Finitely supported probability measures with exact rational weights.

`FiniteMeasure` stores its support explicitly. `LampMixture` is a convex
combination of uniform measures on every Z2 configuration supported inside a
finite window; when every window is an integer interval its l1 distances are
computed class by class without materializing the configurations.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

from errors import BudgetExceeded, InvariantViolation, PreconditionError
from groups.actions import ActionHandle
from groups.exact import point_sort_key
from groups.wreath import Config, SemidirectElem, configs_on

logger = logging.getLogger(__name__)

DEFAULT_MATERIALIZE_LIMIT = 1 << 20


def _sorted_weights(weights: Dict[Hashable, Fraction]) -> Tuple[Tuple[Hashable, Fraction], ...]:
    return tuple(sorted(((x, Fraction(w)) for x, w in weights.items() if w), key=lambda item: point_sort_key(item[0])))


@dataclass(frozen=True)
class FiniteMeasure:
    weights: Tuple[Tuple[Hashable, Fraction], ...]

    def __post_init__(self):
        seen = set()
        for x, w in self.weights:
            if not isinstance(w, Fraction) or w <= 0:
                raise InvariantViolation("non-positive weight", f"{w} at {x!r}")
            if x in seen:
                raise InvariantViolation("repeated support point", repr(x))
            seen.add(x)

    @classmethod
    def of(cls, weights: Dict[Hashable, Fraction]) -> "FiniteMeasure":
        return cls(_sorted_weights(weights))

    @classmethod
    def uniform(cls, points: Iterable[Hashable]) -> "FiniteMeasure":
        points = list(dict.fromkeys(points))
        if not points:
            raise PreconditionError("uniform measure on an empty set")
        return cls.of({x: Fraction(1, len(points)) for x in points})

    @classmethod
    def point_mass(cls, x: Hashable) -> "FiniteMeasure":
        return cls(((x, Fraction(1)),))

    def as_dict(self) -> Dict[Hashable, Fraction]:
        return dict(self.weights)

    def total(self) -> Fraction:
        return sum((w for _, w in self.weights), Fraction(0))

    def is_probability(self) -> bool:
        return bool(self.weights) and self.total() == 1

    def support_size(self) -> int:
        return len(self.weights)

    def pushforward(self, action: ActionHandle, g) -> "FiniteMeasure":
        image: Dict[Hashable, Fraction] = {}
        for x, w in self.weights:
            y = action.apply(g, x)
            image[y] = image.get(y, Fraction(0)) + w
        return FiniteMeasure.of(image)

    def l1_distance(self, other: "FiniteMeasure") -> Fraction:
        mine, theirs = self.as_dict(), other.as_dict()
        total = Fraction(0)
        for x in mine.keys() | theirs.keys():
            total += abs(mine.get(x, Fraction(0)) - theirs.get(x, Fraction(0)))
        return total


def _is_interval(window: Tuple[Hashable, ...]) -> bool:
    if not all(isinstance(x, int) and not isinstance(x, bool) for x in window):
        return False
    return list(window) == list(range(window[0], window[0] + len(window)))


@dataclass(frozen=True)
class LampMixture:
    """sum_B w_B * uniform(Z2 configs supported in B) over windows B."""

    components: Tuple[Tuple[Tuple[Hashable, ...], Fraction], ...]

    def __post_init__(self):
        if not self.components:
            raise InvariantViolation("empty lamp mixture")
        for window, w in self.components:
            if not window:
                raise InvariantViolation("empty window")
            if len(set(window)) != len(window):
                raise InvariantViolation("window repeats a point", repr(window))
            if not isinstance(w, Fraction) or w <= 0:
                raise InvariantViolation("non-positive weight", f"{w} on window {window!r}")

    @classmethod
    def of(cls, components: Iterable[Tuple[Iterable[Hashable], Fraction]]) -> "LampMixture":
        merged: Dict[Tuple[Hashable, ...], Fraction] = {}
        for window, w in components:
            key = tuple(sorted(set(window), key=point_sort_key))
            merged[key] = merged.get(key, Fraction(0)) + Fraction(w)
        ordered = sorted(merged.items(), key=lambda item: point_sort_key(item[0]))
        return cls(tuple(ordered))

    def total(self) -> Fraction:
        return sum((w for _, w in self.components), Fraction(0))

    def is_probability(self) -> bool:
        return self.total() == 1

    @property
    def intervals(self) -> bool:
        return all(_is_interval(window) for window, _ in self.components)

    def weight(self, config: Config) -> Fraction:
        support = set(config.support())
        total = Fraction(0)
        for window, w in self.components:
            if support <= set(window):
                total += w / (1 << len(window))
        return total

    def materialize(self, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> FiniteMeasure:
        size = sum(1 << len(window) for window, _ in self.components)
        if size > limit:
            raise BudgetExceeded(f"lamp mixture expands to {size} configurations, limit is {limit}", size)
        weights: Dict[Hashable, Fraction] = {}
        for window, w in self.components:
            share = w / (1 << len(window))
            for config in configs_on(window):
                weights[config] = weights.get(config, Fraction(0)) + share
        return FiniteMeasure.of(weights)

    def support_size(self, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> int:
        if self.intervals:
            return 1 + sum(_span_count(lo, hi) for lo, hi in _covered_spans([self]) if self._span_weight(lo, hi))
        return self.materialize(limit).support_size()

    def pushforward(self, e: SemidirectElem) -> Optional["LampMixture"]:
        """The image under a wreath element, or None when it is not a lamp mixture.

        (f, g) maps uniform(B) to uniform(gB) exactly when supp f lies in gB.
        """
        lamp = set(e.config.support())
        images = []
        for window, w in self.components:
            moved = tuple(e.action.apply(e.element, x) for x in window)
            if not lamp <= set(moved):
                return None
            images.append((moved, w))
        return LampMixture.of(images)

    def _span_weight(self, lo: int, hi: int) -> Fraction:
        total = Fraction(0)
        for window, w in self.components:
            if window[0] <= lo and hi <= window[-1]:
                total += w / (1 << len(window))
        return total

    def _empty_weight(self) -> Fraction:
        return sum((w / (1 << len(window)) for window, w in self.components), Fraction(0))


def _span_count(lo: int, hi: int) -> int:
    """Configs whose support has minimum lo and maximum hi."""
    return 1 if lo == hi else 1 << (hi - lo - 1)


def _covered_spans(mixtures: List[LampMixture]):
    spans = set()
    for mixture in mixtures:
        for window, _ in mixture.components:
            a, b = window[0], window[-1]
            for lo in range(a, b + 1):
                for hi in range(lo, b + 1):
                    spans.add((lo, hi))
    return sorted(spans)


def lamp_l1_distance(first: LampMixture, second: LampMixture, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> Fraction:
    """Exact l1 distance between two lamp mixtures."""
    if first.intervals and second.intervals:
        total = abs(first._empty_weight() - second._empty_weight())
        for lo, hi in _covered_spans([first, second]):
            diff = first._span_weight(lo, hi) - second._span_weight(lo, hi)
            if diff:
                total += _span_count(lo, hi) * abs(diff)
        return total
    logger.debug("non-interval windows, expanding lamp mixtures explicitly")
    return first.materialize(limit).l1_distance(second.materialize(limit))


def measure_defect(action: ActionHandle, measure, g, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> Fraction:
    """||mu - g.mu||_1, exactly."""
    if isinstance(measure, LampMixture):
        image = measure.pushforward(g)
        if image is not None:
            return lamp_l1_distance(measure, image, limit)
        explicit = measure.materialize(limit)
        return explicit.l1_distance(explicit.pushforward(action, g))
    return measure.l1_distance(measure.pushforward(action, g))

