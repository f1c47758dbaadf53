"""Reiter measures on lamp configurations.

`lamplighter_reiter` writes down the Cesaro-averaged box measure for
(Z/2Z) wr Z. `extensive_probe` searches measures of the same shape for an
arbitrary base action: uniform lamps over windows that always contain the
tracked points, averaged over the positions of a chain along one generator.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, List, Optional, Sequence, Tuple

from certificates.folner import ReiterCertificate, evaluate_batch, verify_reiter_certificate
from certificates.measures import DEFAULT_MATERIALIZE_LIMIT, LampMixture, measure_defect
from errors import BudgetExceeded, PreconditionError
from groups.actions import INTEGER_SHIFTS, ActionHandle
from groups.wreath import lamplighter_action, semidirect_action, shift_elem, toggle

logger = logging.getLogger(__name__)

TOGGLE_LETTERS = "LMNOPQRUVWXYZ"


def lamplighter_epsilon(n: int) -> Fraction:
    """(1 - 2^-(2n+1)) / (2n+1)."""
    m = 2 * n + 1
    return (1 - Fraction(1, 1 << m)) / m


def lamplighter_reiter(n: int) -> ReiterCertificate:
    """Uniform lamps on [-j, 2n - j], averaged over j = 0..2n."""
    if n < 1:
        raise PreconditionError(f"n must be positive, got {n}")
    m = 2 * n + 1
    windows = [(tuple(range(-j, m - j)), Fraction(1, m)) for j in range(m)]
    action = lamplighter_action()
    elements = (("F", action.letter("F")), ("S", action.letter("S")))
    return ReiterCertificate(action, LampMixture.of(windows), elements, lamplighter_epsilon(n))


@dataclass
class ProbeResult:
    certificate: Optional[ReiterCertificate]
    best_defect: Optional[Fraction]
    examined: int
    candidate: str = ""

    def __bool__(self):
        return self.certificate is not None


def _toggle_letters(base: ActionHandle, count: int) -> List[str]:
    free = [letter for letter in TOGGLE_LETTERS if letter not in base.generators]
    if count > len(free):
        raise PreconditionError(f"too many tracked points: {count}")
    return free[:count]


def probe_action(base: ActionHandle, tracked: Sequence[Hashable]) -> ActionHandle:
    """The Z2 wreath action with toggles at the tracked points and base generators as shifts."""
    generators = {letter: shift_elem(base, g) for letter, g in base.generators.items()}
    for letter, x in zip(_toggle_letters(base, len(tracked)), tracked):
        generators[letter] = toggle(base, x)
    return semidirect_action(base, "Z2", generators)


def _chain_mixture(base: ActionHandle, tracked: Sequence[Hashable], letter: Optional[str], length: int) -> LampMixture:
    """Windows tracked + {l^i x0 : -j <= i < length - j}, j = 0..length-1, weighted uniformly."""
    if letter is None:
        return LampMixture.of([(tuple(tracked), Fraction(1))])
    g = base.letter(letter)
    g_inv = base.inverse(g)
    anchor = tracked[0]
    left = [anchor]
    for _ in range(length - 1):
        left.append(base.apply(g_inv, left[-1]))
    right = [anchor]
    for _ in range(length - 1):
        right.append(base.apply(g, right[-1]))
    # chain[k] = l^(k - length + 1) x0
    chain = list(reversed(left)) + right[1:]
    windows = []
    for j in range(length):
        start = length - 1 - j
        window = set(chain[start:start + length]) | set(tracked)
        windows.append((tuple(window), Fraction(1, length)))
    return LampMixture.of(windows)


def extensive_probe(
    base: ActionHandle,
    tracked: Sequence[Hashable],
    epsilon,
    budget: int = 10000,
    workers: int = 1,
    max_window: int = 8,
    limit: int = DEFAULT_MATERIALIZE_LIMIT,
) -> ProbeResult:
    """Search lamp mixtures whose defect under every wreath generator is at most 2 epsilon.

    Exploratory only: failure says nothing about the base group.
    """
    if not tracked:
        raise PreconditionError("at least one tracked point is needed")
    epsilon = Fraction(epsilon)
    action = probe_action(base, tracked)
    elements = tuple((letter, action.letter(letter)) for letter in sorted(action.generators))
    candidates: List[Tuple[str, LampMixture]] = [("tracked", _chain_mixture(base, tracked, None, 1))]
    for length in range(2, max_window + 1):
        for letter in base.letters():
            candidates.append((f"{letter}^{length}", _chain_mixture(base, tracked, letter, length)))
    logger.info(f"extensive probe on '{base.name}': {len(candidates)} candidate mixtures, epsilon = {epsilon}")

    def score(candidate) -> Fraction:
        _, mixture = candidate
        try:
            return -max((measure_defect(action, mixture, g, limit) for _, g in elements), default=Fraction(0))
        except BudgetExceeded as e:
            logger.debug(f"skipping {candidate[0]}: {e}")
            return Fraction(-3)

    examined = 0
    best_defect: Optional[Fraction] = None
    best_label = ""
    batch = max(1, workers) * 4
    for offset in range(0, len(candidates), batch):
        if examined >= budget:
            break
        chunk = candidates[offset:offset + batch]
        scores, _ = evaluate_batch(score, chunk, workers)
        examined += sum(len(m.components) for _, m in chunk)
        for (label, mixture), value in zip(chunk, scores):
            defect = -value
            if defect > 2:
                continue
            if best_defect is None or defect < best_defect:
                best_defect, best_label = defect, label
            if defect <= 2 * epsilon:
                cert = ReiterCertificate(action, mixture, elements, epsilon)
                if verify_reiter_certificate(cert, limit):
                    logger.info(f"probe succeeded with {label}: defect {defect}")
                    return ProbeResult(cert, defect, examined, label)
    logger.info(f"probe found no certificate; best defect {best_defect} ({best_label})")
    return ProbeResult(None, best_defect, examined, best_label)


def lamplighter_probe(epsilon, **kwargs) -> ProbeResult:
    return extensive_probe(INTEGER_SHIFTS, [0], epsilon, **kwargs)
