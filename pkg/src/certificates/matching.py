"""Bipartite maximum matching with Hall/Ore deficiency certificates.

`max_matching` runs Hopcroft-Karp phases and then reads an Ore witness off the
final alternating-path structure: the left vertices reachable from unmatched
left vertices by alternating paths form a set S with
|S| - |N(S)| = |left| - matching size.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Tuple

from certificates.verdict import Verdict
from errors import BudgetExceeded, InvariantViolation

logger = logging.getLogger(__name__)

FAKE_INFINITY = -1
DEFAULT_BRUTEFORCE_LIMIT = 22


@dataclass(frozen=True)
class BipartiteGraph:
    left: Tuple[Hashable, ...]
    right: Tuple[Hashable, ...]
    edges: FrozenSet[Tuple[Hashable, Hashable]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        object.__setattr__(self, "edges", frozenset(self.edges))
        for side, name in ((self.left, "left"), (self.right, "right")):
            if len(set(side)) != len(side):
                raise InvariantViolation("duplicate vertex", f"on the {name} side")
        left_ids, right_ids = set(self.left), set(self.right)
        for u, v in self.edges:
            if u not in left_ids or v not in right_ids:
                raise InvariantViolation("edge endpoint missing", f"({u!r}, {v!r})")

    @classmethod
    def from_pairs(cls, left: Iterable, right: Iterable, pairs: Iterable) -> "BipartiteGraph":
        pairs = list(pairs)
        edges = frozenset(tuple(p) for p in pairs)
        if len(edges) != len(pairs):
            raise InvariantViolation("duplicate edge", "edge list repeats a pair")
        return cls(tuple(left), tuple(right), edges)

    def adjacency(self) -> Dict[Hashable, List[Hashable]]:
        """Left vertex -> neighbours, in right-side order."""
        order = {v: i for i, v in enumerate(self.right)}
        adj: Dict[Hashable, List[Hashable]] = {u: [] for u in self.left}
        for u, v in self.edges:
            adj[u].append(v)
        for neighbours in adj.values():
            neighbours.sort(key=order.__getitem__)
        return adj

    def neighbourhood(self, subset: Iterable[Hashable]) -> FrozenSet[Hashable]:
        subset = set(subset)
        return frozenset(v for u, v in self.edges if u in subset)


@dataclass(frozen=True)
class MatchingCertificate:
    size: int
    matching: Tuple[Tuple[Hashable, Hashable], ...]
    deficiency_set: Tuple[Hashable, ...]

    def as_dict(self) -> Dict[Hashable, Hashable]:
        return dict(self.matching)


class HopcroftKarp:
    """Hopcroft-Karp over a left-adjacency dict; lists, not sets, keep runs reproducible."""

    def __init__(self, graph_left: Dict[Hashable, List[Hashable]]):
        self._graph_left = graph_left
        self._left: List[Hashable] = list(graph_left.keys())
        self._reference_distance = FAKE_INFINITY
        self._pair_left: Dict[Hashable, Hashable] = {}
        self._pair_right: Dict[Hashable, Hashable] = {}
        self._dist_left: Dict[Hashable, int] = {}

    def run(self) -> int:
        self._pair_left.clear()
        self._pair_right.clear()
        self._dist_left = {left: FAKE_INFINITY for left in self._left}
        matchings = 0
        while self._bfs():
            for left in self._left:
                if left not in self._pair_left and self._dfs(left):
                    matchings += 1
        return matchings

    @property
    def pairs(self) -> Dict[Hashable, Hashable]:
        return dict(self._pair_left)

    def _bfs(self) -> bool:
        queue: Deque[Hashable] = deque()
        for left in self._left:
            if left not in self._pair_left:
                queue.append(left)
                self._dist_left[left] = 0
            else:
                self._dist_left[left] = FAKE_INFINITY
        self._reference_distance = FAKE_INFINITY
        while queue:
            left = queue.popleft()
            if self._reference_distance != FAKE_INFINITY and self._dist_left[left] >= self._reference_distance:
                continue
            for right in self._graph_left[left]:
                if right not in self._pair_right:
                    if self._reference_distance == FAKE_INFINITY:
                        self._reference_distance = self._dist_left[left] + 1
                else:
                    other = self._pair_right[right]
                    if self._dist_left[other] == FAKE_INFINITY:
                        self._dist_left[other] = self._dist_left[left] + 1
                        queue.append(other)
        return self._reference_distance != FAKE_INFINITY

    def _swap(self, left: Hashable, right: Hashable) -> None:
        self._pair_left[left] = right
        self._pair_right[right] = left

    def _dfs(self, root: Hashable) -> bool:
        # path[i] is the right vertex taken from stack[i]
        stack: List[Tuple[Hashable, Iterator[Hashable]]] = [(root, iter(self._graph_left[root]))]
        path: List[Hashable] = []
        while stack:
            left, neighbours = stack[-1]
            descended = False
            for right in neighbours:
                if right not in self._pair_right:
                    if self._reference_distance == self._dist_left[left] + 1:
                        path.append(right)
                        for (u, _), v in zip(stack, path):
                            self._swap(u, v)
                        return True
                else:
                    other = self._pair_right[right]
                    if self._dist_left[other] == self._dist_left[left] + 1:
                        path.append(right)
                        stack.append((other, iter(self._graph_left[other])))
                        descended = True
                        break
            if not descended:
                self._dist_left[left] = FAKE_INFINITY
                stack.pop()
                if path:
                    path.pop()
        return False


def _alternating_reach(adj: Dict[Hashable, List[Hashable]], pairs: Dict[Hashable, Hashable]) -> List[Hashable]:
    """Left vertices reachable from unmatched left vertices along alternating paths."""
    matched_right = {v: u for u, v in pairs.items()}
    seen = {u for u in adj if u not in pairs}
    queue: Deque[Hashable] = deque(u for u in adj if u not in pairs)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            w = matched_right.get(v)
            # a maximum matching leaves no free right vertex reachable here
            if w is not None and w not in seen:
                seen.add(w)
                queue.append(w)
    return [u for u in adj if u in seen]


def max_matching(graph: BipartiteGraph) -> MatchingCertificate:
    adj = graph.adjacency()
    hk = HopcroftKarp(adj)
    size = hk.run()
    pairs = hk.pairs
    deficiency = _alternating_reach(adj, pairs)
    matching = tuple((u, pairs[u]) for u in graph.left if u in pairs)
    logger.debug(f"matching of size {size} on {len(graph.left)}x{len(graph.right)} graph, |S| = {len(deficiency)}")
    return MatchingCertificate(size, matching, tuple(deficiency))


def ore_defect_bruteforce(graph: BipartiteGraph, limit: int = DEFAULT_BRUTEFORCE_LIMIT) -> int:
    """|left| - max_S (|S| - |N(S)|) by enumerating every subset of the left side."""
    n = len(graph.left)
    if n > limit:
        raise BudgetExceeded(f"brute-force Ore check limited to {limit} left vertices, got {n}")
    right_index = {v: i for i, v in enumerate(graph.right)}
    masks = [0] * n
    left_index = {u: i for i, u in enumerate(graph.left)}
    for u, v in graph.edges:
        masks[left_index[u]] |= 1 << right_index[v]
    # neighbourhood masks of all subsets, built incrementally from the lowest set bit
    neighbours = [0] * (1 << n)
    best = 0
    for subset in range(1, 1 << n):
        low = subset & -subset
        neighbours[subset] = neighbours[subset ^ low] | masks[low.bit_length() - 1]
        best = max(best, bin(subset).count("1") - bin(neighbours[subset]).count("1"))
    return n - best


def verify_matching_certificate(graph: BipartiteGraph, cert: MatchingCertificate) -> Verdict:
    left_ids, right_ids = set(graph.left), set(graph.right)
    used_left, used_right = set(), set()
    for u, v in cert.matching:
        if u not in left_ids or v not in right_ids:
            return Verdict.reject("unknown vertex", pair=[u, v])
        if (u, v) not in graph.edges:
            return Verdict.reject("non-edge", pair=[u, v])
        if u in used_left or v in used_right:
            return Verdict.reject("matching not injective", pair=[u, v])
        used_left.add(u)
        used_right.add(v)
    if len(cert.matching) != cert.size:
        return Verdict.reject("size mismatch", stated=cert.size, actual=len(cert.matching))
    subset = set(cert.deficiency_set)
    if not subset <= left_ids or len(subset) != len(cert.deficiency_set):
        return Verdict.reject("deficiency set is not a subset of the left side")
    deficiency = len(subset) - len(graph.neighbourhood(subset))
    if deficiency != len(graph.left) - cert.size:
        return Verdict.reject(
            "Ore identity fails",
            deficiency=deficiency,
            expected=len(graph.left) - cert.size,
        )
    return Verdict.accept(size=cert.size)


def matching_number(graph: BipartiteGraph) -> int:
    return max_matching(graph).size


def overlap_count(first: Iterable[Hashable], second: Iterable[Hashable]) -> int:
    """Matching number under equality closeness: the multiset intersection size."""
    counts: Dict[Hashable, int] = {}
    for x in first:
        counts[x] = counts.get(x, 0) + 1
    total = 0
    for y in second:
        if counts.get(y, 0):
            counts[y] -= 1
            total += 1
    return total


def graph_from_relation(first: List[Hashable], second: List[Hashable], close) -> BipartiteGraph:
    """Vertices "l<i>" and "r<j>", with an edge whenever close(first[i], second[j])."""
    left = tuple(f"l{i}" for i in range(len(first)))
    right = tuple(f"r{j}" for j in range(len(second)))
    edges = frozenset(
        (f"l{i}", f"r{j}")
        for i, x in enumerate(first)
        for j, y in enumerate(second)
        if close(x, y)
    )
    return BipartiteGraph(left, right, edges)

