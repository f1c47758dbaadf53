"""Følner-set and Reiter certificates on orbits of point tuples.

Closeness between group elements is equality of their images of a fixed finite
tuple, so a set certificate is a finite set T of orbit points of a base tuple,
and match(T, gT) under equality closeness is the number of points T and gT share.
Every orbit point carries a witness word over the action's generator letters.
"""

import logging
import random
import threading
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

from certificates.matching import graph_from_relation, max_matching, overlap_count
from certificates.measures import DEFAULT_MATERIALIZE_LIMIT, FiniteMeasure, LampMixture, measure_defect
from certificates.verdict import Verdict
from errors import BudgetExceeded, PreconditionError, SkewCertError
from groups.actions import ActionHandle

logger = logging.getLogger(__name__)

OrbitPoint = Tuple[Hashable, ...]

DEFAULT_MAX_BALL_POINTS = 20000


@dataclass(frozen=True)
class SetFolnerCertificate:
    action: ActionHandle
    base_point: OrbitPoint
    elements: Tuple[str, ...]
    theta: Fraction
    points: Tuple[Tuple[OrbitPoint, str], ...]
    per_g: Tuple[int, ...] = ()

    @property
    def orbit_points(self) -> List[OrbitPoint]:
        return [p for p, _ in self.points]


@dataclass(frozen=True)
class ReiterCertificate:
    action: ActionHandle
    measure: Union[FiniteMeasure, LampMixture]
    elements: Tuple[Tuple[str, Hashable], ...]
    epsilon: Fraction


@dataclass
class SearchResult:
    certificate: Optional[SetFolnerCertificate]
    best_ratio: Fraction
    examined: int
    phase: str = ""

    def __bool__(self):
        return self.certificate is not None


def schreier_ball(
    action: ActionHandle,
    base_point: OrbitPoint,
    radius: int,
    letters: Optional[Sequence[str]] = None,
    max_points: int = DEFAULT_MAX_BALL_POINTS,
) -> Dict[OrbitPoint, str]:
    """Orbit points within word length `radius` of the base tuple, each with one witness word."""
    if radius < 0:
        raise PreconditionError(f"radius must be non-negative, got {radius}")
    letters = list(letters) if letters is not None else list(action.letters())
    moves = [(letter, action.letter(letter)) for letter in letters]
    ball: Dict[OrbitPoint, str] = {tuple(base_point): ""}
    frontier = deque([tuple(base_point)])
    for _ in range(radius):
        next_frontier = deque()
        for point in frontier:
            word = ball[point]
            for letter, g in moves:
                image = action.apply_tuple(g, point)
                if image in ball:
                    continue
                ball[image] = letter + word
                next_frontier.append(image)
                if len(ball) > max_points:
                    raise BudgetExceeded(f"Schreier ball exceeded {max_points} points", len(ball))
        frontier = next_frontier
        if not frontier:
            break
    return ball


def match_close(first: Sequence[Hashable], second: Sequence[Hashable], close: Optional[Callable] = None) -> int:
    """Matching number of the closeness graph between two finite point lists.

    With no relation given closeness is equality, where the matching number is
    the multiset overlap.
    """
    if close is None:
        return overlap_count(first, second)
    return max_matching(graph_from_relation(list(first), list(second), close)).size


def within(epsilon) -> Callable:
    """Closeness of numeric tuples in the max metric."""
    epsilon = Fraction(epsilon)

    def close(x, y) -> bool:
        return len(x) == len(y) and all(abs(Fraction(a) - Fraction(b)) <= epsilon for a, b in zip(x, y))

    return close


def _compile(action: ActionHandle, words: Sequence[str]) -> List:
    return [action.word(w) for w in words]


def _ratios(action: ActionHandle, elements: Sequence, points: Sequence[OrbitPoint]) -> List[Tuple[int, Fraction]]:
    out = []
    for g in elements:
        image = [action.apply_tuple(g, p) for p in points]
        m = overlap_count(points, image)
        out.append((m, Fraction(m, len(points))))
    return out


def set_ratio(action: ActionHandle, points: Sequence[OrbitPoint], words: Sequence[str]) -> Fraction:
    """min over g in E of match(T, gT) / |T|; 1 for an empty E."""
    if not points:
        raise PreconditionError("ratio of an empty set")
    ratios = _ratios(action, _compile(action, words), list(points))
    return min((r for _, r in ratios), default=Fraction(1))


def verify_set_certificate(cert: SetFolnerCertificate) -> Verdict:
    action = cert.action
    theta = Fraction(cert.theta)
    if not 0 <= theta <= 1:
        return Verdict.reject("theta outside [0, 1]", theta=str(theta))
    points = cert.orbit_points
    if not points:
        return Verdict.reject("empty point set")
    if len(set(points)) != len(points):
        return Verdict.reject("repeated orbit point")
    try:
        for point, word in cert.points:
            if action.apply_tuple(action.word(word), cert.base_point) != point:
                return Verdict.reject("orbit witness fails", word=word)
        elements = _compile(action, cert.elements)
    except SkewCertError as e:
        return Verdict.reject(f"cannot evaluate witness: {e}")
    if cert.per_g and len(cert.per_g) != len(elements):
        return Verdict.reject("per_g length differs from E", stated=len(cert.per_g), expected=len(elements))
    ratios = []
    for i, (m, ratio) in enumerate(_ratios(action, elements, points)):
        word = cert.elements[i]
        if cert.per_g and cert.per_g[i] != m:
            return Verdict.reject("stated matching size is wrong", g=word, stated=cert.per_g[i], actual=m)
        if ratio < theta:
            logger.warning(f"set certificate fails at g={word!r}: ratio {ratio} < {theta}")
            return Verdict.reject("ratio below theta", g=word, ratio=str(ratio), theta=str(theta))
        ratios.append(str(ratio))
    return Verdict.accept(ratios=ratios, size=len(points))


def verify_reiter_certificate(cert: ReiterCertificate, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> Verdict:
    epsilon = Fraction(cert.epsilon)
    if epsilon < 0:
        return Verdict.reject("negative epsilon", epsilon=str(epsilon))
    if not cert.measure.is_probability():
        return Verdict.reject("measure is not a probability measure", total=str(cert.measure.total()))
    defects = {}
    for label, g in cert.elements:
        try:
            defect = measure_defect(cert.action, cert.measure, g, limit)
        except SkewCertError as e:
            return Verdict.reject(f"cannot push the measure forward: {e}", g=label)
        if defect > 2 * epsilon:
            logger.warning(f"Reiter certificate fails at g={label!r}: defect {defect} > {2 * epsilon}")
            return Verdict.reject("defect above 2*epsilon", g=label, defect=str(defect), bound=str(2 * epsilon))
        defects[label] = str(defect)
    return Verdict.accept(defects=defects)


class _BestSoFar:
    """Lock-protected accumulator merged by (ratio, lowest candidate index)."""

    def __init__(self):
        self._lock = threading.Lock()
        self.ratio = Fraction(-1)
        self.index = -1

    def offer(self, ratio: Fraction, index: int) -> None:
        with self._lock:
            if ratio > self.ratio or (ratio == self.ratio and index < self.index):
                self.ratio, self.index = ratio, index


def evaluate_batch(score: Callable[[object], Fraction], candidates: Sequence, workers: int) -> Tuple[List[Fraction], _BestSoFar]:
    """Score every candidate on `workers` threads over fixed disjoint slices."""
    scores: List[Optional[Fraction]] = [None] * len(candidates)
    best = _BestSoFar()

    def run_slice(start: int, stop: int):
        for i in range(start, stop):
            scores[i] = score(candidates[i])
            best.offer(scores[i], i)

    if workers <= 1 or len(candidates) < 2:
        run_slice(0, len(candidates))
        return scores, best
    step = -(-len(candidates) // workers)
    threads = []
    for start in range(0, len(candidates), step):
        thread = threading.Thread(
            target=run_slice,
            args=(start, min(start + step, len(candidates))),
            name=f"Search-{start // step}",
            daemon=True,
        )
        thread.start()
        threads.append(thread)
    for thread in threads:
        thread.join()
    return scores, best


def _chain_window(action: ActionHandle, base_point: OrbitPoint, letter: str, start: int, length: int):
    """Points letter^k . base for start <= k < start + length, with their words."""
    g = action.letter(letter)
    point = tuple(base_point)
    for _ in range(start):
        point = action.apply_tuple(g, point)
    out = []
    for k in range(start, start + length):
        out.append((point, letter * k))
        point = action.apply_tuple(g, point)
    return out


def _certificate(action, base_point, words, theta, members) -> SetFolnerCertificate:
    points = [p for p, _ in members]
    per_g = tuple(m for m, _ in _ratios(action, _compile(action, words), points))
    return SetFolnerCertificate(action, tuple(base_point), tuple(words), Fraction(theta), tuple(members), per_g)


def search_folner(
    action: ActionHandle,
    base_point: OrbitPoint,
    words: Sequence[str],
    theta,
    budget: int = 10000,
    seed: int = 20200613,
    workers: int = 1,
    max_window: int = 64,
    local_search_rounds: int = 200,
    max_ball_points: int = DEFAULT_MAX_BALL_POINTS,
) -> SearchResult:
    """Look for T with match(T, gT) >= theta |T| for every g in E.

    Phases run in a fixed order: Schreier balls of growing radius, chain windows
    along single generator letters, then greedy swaps seeded from the best
    candidate seen. The outcome depends only on the inputs and the seed.
    """
    theta = Fraction(theta)
    if not 0 <= theta < 1:
        raise PreconditionError(f"theta must lie in [0, 1), got {theta}")
    if budget <= 0:
        raise PreconditionError("budget must be positive")
    base_point = tuple(base_point)
    words = list(words)
    elements = _compile(action, words)
    examined = 0
    best_ratio = Fraction(0)
    best_members: List[Tuple[OrbitPoint, str]] = [(base_point, "")]

    def score(members) -> Fraction:
        points = [p for p, _ in members]
        return min((r for _, r in _ratios(action, elements, points)), default=Fraction(1))

    logger.info(f"Følner search on '{action.name}': |E| = {len(words)}, theta = {theta}, budget = {budget}")

    # balls
    previous = 0
    radius = 0
    while examined < budget:
        try:
            ball = schreier_ball(action, base_point, radius, max_points=max_ball_points)
        except BudgetExceeded as e:
            logger.info(f"ball phase stopped at radius {radius}: {e}")
            break
        if len(ball) > budget // 8 and radius > 0:
            break
        members = list(ball.items())
        ratio = score(members)
        examined += len(members)
        logger.debug(f"ball radius {radius}: {len(members)} points, ratio {ratio}")
        if ratio > best_ratio:
            best_ratio, best_members = ratio, members
        if ratio >= theta:
            return SearchResult(_certificate(action, base_point, words, theta, members), ratio, examined, "ball")
        if len(ball) == previous:
            break
        previous = len(ball)
        radius += 1

    # chain windows
    letters = action.letters()
    length = 2
    while length <= max_window and examined < budget:
        candidates = []
        for letter in letters:
            for start in (0, length, 4 * length):
                candidates.append(_chain_window(action, base_point, letter, start, length))
        candidates = [c for c in candidates if len({p for p, _ in c}) == len(c)]
        scores, best = evaluate_batch(score, candidates, workers)
        examined += sum(len(c) for c in candidates)
        for i, ratio in enumerate(scores):
            if ratio >= theta:
                logger.info(f"chain window of length {length} reaches ratio {ratio}")
                return SearchResult(_certificate(action, base_point, words, theta, candidates[i]), ratio, examined, "chain")
        if best.index >= 0 and best.ratio > best_ratio:
            best_ratio, best_members = best.ratio, candidates[best.index]
        length += 1

    # greedy swaps
    rng = random.Random(seed)
    members = dict(best_members)
    current = best_ratio
    for _ in range(local_search_rounds):
        if examined >= budget:
            break
        points = list(members)
        moves = []
        for g, word in zip(elements, words):
            for p in points:
                image = action.apply_tuple(g, p)
                if image not in members:
                    moves.append(("add", image, word + members[p]))
        moves.extend(("drop", p, "") for p in points if len(points) > 1)
        rng.shuffle(moves)
        improved = False
        for kind, point, word in moves[: max(1, budget - examined)]:
            trial = dict(members)
            if kind == "add":
                trial[point] = word
            else:
                del trial[point]
            ratio = score(list(trial.items()))
            examined += len(trial)
            if ratio > current:
                members, current, improved = trial, ratio, True
                break
        if current >= theta:
            return SearchResult(_certificate(action, base_point, words, theta, list(members.items())), current, examined, "swap")
        if not improved:
            break
    best_ratio = max(best_ratio, current)
    logger.info(f"Følner search failed: best ratio {best_ratio} after {examined} candidate points")
    return SearchResult(None, best_ratio, examined, "exhausted")
