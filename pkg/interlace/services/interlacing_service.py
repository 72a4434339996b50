from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate, combinations, groupby, pairwise, zip_longest
from typing import Optional, Sequence

import networkx as nx

from interlace.config import BFS_UNIVERSE_CEILING, Settings, get_settings
from interlace.errors import DomainError
from interlace.models import FinSet, FinSuppSeq, GeodesicPath

logger = logging.getLogger(__name__)


def summing_norm(a: FinSuppSeq) -> Fraction:
    """Largest absolute interval sum, read off the sign blocks of ``a``."""
    blocks = [sum(value for _, value in run) for _, run in groupby(a.items(), key=lambda entry: entry[1] > 0)]
    prefix = list(accumulate(blocks, initial=Fraction(0)))
    return max(prefix) - min(prefix)


def _signed_difference(first: FinSet, second: FinSet) -> list[tuple[int, int]]:
    only_first = [(x, 1) for x in first if x not in second]
    only_second = [(x, -1) for x in second if x not in first]
    return sorted(only_first + only_second)


def d_sum(first: FinSet, second: FinSet) -> int:
    prefix = list(accumulate((sign for _, sign in _signed_difference(first, second)), initial=0))
    return max(prefix) - min(prefix)


def d_sum_all_intervals(first: FinSet, second: FinSet) -> int:
    """max |#(A ∩ E) − #(B ∩ E)| over every interval E = [k, m] of {1, ..., max(A ∪ B)}."""
    top = max(first.union(second), default=0)
    best = 0
    for low in range(1, top + 1):
        count = 0
        for high in range(low, top + 1):
            count += (high in first) - (high in second)
            best = max(best, abs(count))
    return best


def d_sum_restricted(first: FinSet, second: FinSet) -> int:
    """Same maximum, over intervals whose endpoints lie in A △ B."""
    points = [x for x, _ in _signed_difference(first, second)]
    best = 0
    for i, low in enumerate(points):
        for high in points[i:]:
            count = sum(1 for x in first if low <= x <= high) - sum(1 for x in second if low <= x <= high)
            best = max(best, abs(count))
    return best


def _interlaces(longer: Sequence[int], shorter: Sequence[int]) -> bool:
    # a1 <= b1 <= a2 <= b2 <= ...
    chain = [value for pair in zip_longest(longer, shorter) for value in pair if value is not None]
    return all(left <= right for left, right in pairwise(chain))


def is_adjacent(first: FinSet, second: FinSet) -> bool:
    if first == second:
        return False
    n, m = len(first), len(second)
    if {n, m} == {0, 1}:
        return True
    if n == m + 1 or n == m:
        if _interlaces(first.elements, second.elements):
            return True
    if m == n + 1 or n == m:
        if _interlaces(second.elements, first.elements):
            return True
    return False


def is_left_shift(base: FinSet, shifted: FinSet) -> bool:
    """a1 <= a'1 <= a2 <= a'2 <= ... <= an <= a'n with A' != A.

    The name follows the established terminology even though the elements move
    to larger values.
    """
    return len(base) == len(shifted) and base != shifted and _interlaces(base.elements, shifted.elements)


def is_shift_towards(base: FinSet, shifted: FinSet, target: FinSet) -> bool:
    return is_left_shift(base, shifted) and shifted.difference(base).issubset(target.difference(base))


def spread(subset: FinSet, mapping: Sequence[int]) -> FinSet:
    if any(left >= right for left, right in pairwise(mapping)):
        raise DomainError("NOT_INCREASING", f"spreading map {list(mapping)} must be strictly increasing")
    if mapping and mapping[0] < 1:
        raise DomainError("NOT_INCREASING", "spreading map values start at 1")
    return subset.image(mapping)


def lift_cardinality(family: Sequence[FinSet], m: int) -> list[FinSet]:
    """Append the common tail max+1, ..., max+(m-k) to every k-set of the family."""
    if not family:
        return []
    k = len(family[0])
    for member in family:
        if len(member) != k:
            raise DomainError(
                "CARDINALITY_MISMATCH",
                f"{member} has {len(member)} elements, expected {k}",
                witness=[str(family[0]), str(member)],
            )
    if m < k:
        raise DomainError("M_TOO_SMALL", f"cannot lift {k}-sets to cardinality {m}")
    top = max((member.maximum for member in family if len(member)), default=0)
    tail = range(top + 1, top + 1 + m - k)
    return [member.union(tail) for member in family]


def _relabel(first: FinSet, second: FinSet) -> tuple[int, FinSet, FinSet]:
    universe = sorted(first.union(second))
    rank = {value: position for position, value in enumerate(universe, start=1)}
    return (
        len(universe),
        FinSet(tuple(rank[x] for x in first)),
        FinSet(tuple(rank[x] for x in second)),
    )


@lru_cache(maxsize=None)
def interlacing_graph(size: int) -> nx.Graph:
    """The interlacing graph on all subsets of {1, ..., size}."""
    levels = [
        [FinSet(combo) for combo in combinations(range(1, size + 1), r)]
        for r in range(size + 1)
    ]
    graph = nx.Graph()
    for level in levels:
        graph.add_nodes_from(level)
    for r, level in enumerate(levels):
        for first, second in combinations(level, 2):
            if is_adjacent(first, second):
                graph.add_edge(first, second)
        if r + 1 < len(levels):
            for first in level:
                for second in levels[r + 1]:
                    if is_adjacent(first, second):
                        graph.add_edge(first, second)
    logger.debug(
        "Built interlacing graph on %d vertices with %d edges",
        graph.number_of_nodes(),
        graph.number_of_edges(),
    )
    return graph


@lru_cache(maxsize=256)
def _lengths_from(size: int, source: FinSet, cardinality: Optional[int]) -> dict[FinSet, int]:
    graph = interlacing_graph(size)
    if cardinality is not None:
        graph = graph.subgraph(node for node in graph if len(node) == cardinality)
    return nx.single_source_shortest_path_length(graph, source)


def _check_universe(size: int, limit: Optional[int]) -> None:
    limit = get_settings().bfs_universe_limit if limit is None else min(limit, BFS_UNIVERSE_CEILING)
    if size > limit:
        raise DomainError(
            "UNIVERSE_TOO_LARGE",
            f"#(A ∪ B) = {size} exceeds the breadth-first search limit {limit}",
        )


def bfs_distance(first: FinSet, second: FinSet, universe_limit: Optional[int] = None) -> int:
    """Graph distance by breadth-first search over the subsets of A ∪ B."""
    size, source, target = _relabel(first, second)
    _check_universe(size, universe_limit)
    return _lengths_from(size, source, None)[target]


def kalton_distance(first: FinSet, second: FinSet, universe_limit: Optional[int] = None) -> int:
    """Distance in the graph restricted to sets of the common cardinality."""
    if len(first) != len(second):
        raise DomainError("CARDINALITY_MISMATCH", f"{first} and {second} differ in size")
    size, source, target = _relabel(first, second)
    _check_universe(size, universe_limit)
    lengths = _lengths_from(size, source, len(source))
    if target not in lengths:
        raise AssertionError(f"{first} and {second} are disconnected at fixed cardinality")
    return lengths[target]


def _shift_step(start: FinSet, target: FinSet, distance: int) -> FinSet:
    points = _signed_difference(start, target)
    values = [x for x, _ in points]
    shifted_out = {values[i] for i in range(len(values) - 1) if values[i] in start and values[i + 1] in target}
    shifted_in = {values[i + 1] for i in range(len(values) - 1) if values[i] in start and values[i + 1] in target}
    step = start.difference(shifted_out).union(shifted_in)

    suffix = list(accumulate((sign for _, sign in reversed(points))))
    if distance in suffix:
        logger.debug("Dropping %d from %s: an end segment carries the full distance", values[-1], start)
        step = step.difference([values[-1]])
    return step


def geodesic(first: FinSet, second: FinSet) -> GeodesicPath:
    forward = [first]
    backward = [second]
    remaining = d_sum(first, second)
    while forward[-1] != backward[-1]:
        head, tail = forward[-1], backward[-1]
        if tail.issubset(head):
            walk, nxt = forward, head.difference([max(head.difference(tail))])
        elif head.issubset(tail):
            walk, nxt = backward, tail.difference([max(tail.difference(head))])
        elif min(head.symmetric_difference(tail)) in head:
            walk, nxt = forward, _shift_step(head, tail, remaining)
        else:
            walk, nxt = backward, _shift_step(tail, head, remaining)

        other = backward[-1] if walk is forward else forward[-1]
        assert is_adjacent(walk[-1], nxt), f"non-adjacent step {walk[-1]} -> {nxt}"
        assert d_sum(nxt, other) == remaining - 1, f"step {walk[-1]} -> {nxt} does not shorten the distance"
        walk.append(nxt)
        remaining -= 1

    vertices = forward + backward[-2::-1]
    logger.debug("Geodesic %s -> %s of length %d", first, second, len(vertices) - 1)
    return GeodesicPath(tuple(vertices))


@lru_cache(maxsize=None)
def all_subsets(universe: int) -> tuple[FinSet, ...]:
    return tuple(FinSet(combo) for r in range(universe + 1) for combo in combinations(range(1, universe + 1), r))


def _sweep_block(args: tuple[int, int, bool]) -> tuple[int, int, list[list[str]]]:
    universe, offset, with_geodesics = args
    subsets = all_subsets(universe)
    first = subsets[offset]
    pairs = checked = 0
    mismatches: list[list[str]] = []
    for second in subsets[offset:]:
        pairs += 1
        expected = d_sum(first, second)
        if bfs_distance(first, second, universe_limit=universe) != expected:
            mismatches.append([str(first), str(second), "bfs"])
        if with_geodesics:
            path = geodesic(first, second)
            checked += 1
            same_size = len(first) != len(second) or all(len(v) == len(first) for v in path.vertices)
            if path.length != expected or not same_size:
                mismatches.append([str(first), str(second), "geodesic"])
    return pairs, checked, mismatches


class InterlacingService:
    """Distances, adjacency and geodesics in the interlacing graph."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def distance(self, first: FinSet, second: FinSet, oracle: bool = False) -> dict:
        value = d_sum(first, second)
        payload: dict = {"d": value, "adjacent": is_adjacent(first, second)}
        if oracle:
            checked = bfs_distance(first, second, universe_limit=self.settings.bfs_universe_limit)
            if checked != value:
                raise AssertionError(f"d_sum {value} disagrees with breadth-first distance {checked}")
            payload["bfs"] = checked
        return payload

    def geodesic(self, first: FinSet, second: FinSet) -> GeodesicPath:
        return geodesic(first, second)

    def lift(self, family: Sequence[FinSet], m: int) -> list[FinSet]:
        return lift_cardinality(family, m)

    def sweep(self, universe: int, with_geodesics: bool = True, jobs: Optional[int] = None) -> dict:
        """Exhaustively compare d_sum with breadth-first distances on subsets of {1, ..., universe}."""
        if universe > self.settings.bfs_universe_limit:
            raise DomainError(
                "UNIVERSE_TOO_LARGE",
                f"universe {universe} exceeds the breadth-first search limit {self.settings.bfs_universe_limit}",
            )
        jobs = jobs or self.settings.jobs
        tasks = [(universe, offset, with_geodesics) for offset in range(2**universe)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_sweep_block, tasks, chunksize=8))
        else:
            results = [_sweep_block(task) for task in tasks]

        pairs = sum(result[0] for result in results)
        checked = sum(result[1] for result in results)
        mismatches = [item for result in results for item in result[2]]
        logger.info("Swept %d pairs over {1..%d}, %d mismatches", pairs, universe, len(mismatches))
        return {
            "universe": universe,
            "pairs": pairs,
            "geodesics_checked": checked,
            "mismatches": mismatches,
            "passed": not mismatches,
        }
