from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import networkx as nx
import numpy as np
from pydantic import ValidationError

from interlace.config import Settings
from interlace.errors import DomainError
from interlace.models import FiniteMetric, RationalLike, as_rational
from interlace.schemas import MetricFile

logger = logging.getLogger(__name__)


def validate_metric(labels: Sequence[str], matrix: Sequence[Sequence[RationalLike]]) -> FiniteMetric:
    """Build a FiniteMetric, raising on the first violated axiom."""
    labels = tuple(str(label) for label in labels)
    size = len(labels)
    if len(set(labels)) != size:
        raise DomainError("DUPLICATE_LABEL", "labels must be distinct")
    if len(matrix) != size or any(len(row) != size for row in matrix):
        raise DomainError("DIMENSION_MISMATCH", f"expected a {size}x{size} matrix")

    dist = tuple(tuple(as_rational(value) for value in row) for row in matrix)

    for i in range(size):
        for j in range(i + 1, size):
            if dist[i][j] != dist[j][i]:
                raise DomainError(
                    "ASYMMETRIC",
                    f"d({labels[i]},{labels[j]}) = {dist[i][j]} but d({labels[j]},{labels[i]}) = {dist[j][i]}",
                    witness=[labels[i], labels[j]],
                )
    for i in range(size):
        if dist[i][i] != 0:
            raise DomainError(
                "NONZERO_DIAGONAL",
                f"d({labels[i]},{labels[i]}) = {dist[i][i]}",
                witness=[labels[i]],
            )
    for i in range(size):
        for j in range(i + 1, size):
            if dist[i][j] <= 0:
                raise DomainError(
                    "NONPOSITIVE_DISTANCE",
                    f"d({labels[i]},{labels[j]}) = {dist[i][j]}",
                    witness=[labels[i], labels[j]],
                )
    for i in range(size):
        for k in range(i + 1, size):
            for j in range(size):
                if j in (i, k):
                    continue
                if dist[i][k] > dist[i][j] + dist[j][k]:
                    raise DomainError(
                        "TRIANGLE_VIOLATION",
                        f"d({labels[i]},{labels[k]}) = {dist[i][k]} exceeds "
                        f"d({labels[i]},{labels[j]}) + d({labels[j]},{labels[k]}) = {dist[i][j] + dist[j][k]}",
                        witness=[labels[i], labels[j], labels[k]],
                    )
    return FiniteMetric(labels, dist)


def _require_pair(metric: FiniteMetric) -> list[Fraction]:
    if len(metric) < 2:
        raise DomainError("SINGLETON_SPACE", "at least two points are needed")
    return metric.off_diagonal()


def diam(metric: FiniteMetric) -> Fraction:
    return max(_require_pair(metric))


def sep(metric: FiniteMetric) -> Fraction:
    return min(_require_pair(metric))


def aspect_ratio(metric: FiniteMetric) -> Fraction:
    return diam(metric) / sep(metric)


def metric_closure(
    labels: Sequence[str],
    weights: Sequence[Sequence[Optional[RationalLike]]],
) -> FiniteMetric:
    """Shortest-path metric of a weighted graph; ``None`` marks a missing edge."""
    labels = tuple(str(label) for label in labels)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(labels)))
    for i, row in enumerate(weights):
        for j, weight in enumerate(row):
            if i >= j or weight is None:
                continue
            weight = as_rational(weight)
            if weight <= 0:
                raise DomainError(
                    "NONPOSITIVE_DISTANCE",
                    f"edge {labels[i]}-{labels[j]} has weight {weight}",
                    witness=[labels[i], labels[j]],
                )
            graph.add_edge(i, j, weight=weight)

    lengths = nx.floyd_warshall(graph, weight="weight")
    size = len(labels)
    matrix: list[list[Fraction]] = []
    for i in range(size):
        row = []
        for j in range(size):
            value = lengths[i][j]
            if value == float("inf"):
                raise DomainError(
                    "DISCONNECTED",
                    f"no path between {labels[i]} and {labels[j]}",
                    witness=[labels[i], labels[j]],
                )
            row.append(Fraction(value))
        matrix.append(row)
    return validate_metric(labels, matrix)


def _labels(n: int) -> list[str]:
    return [f"p{index}" for index in range(n)]


def random_metric(
    n: int,
    rng: np.random.Generator,
    max_numerator: int = 12,
    max_denominator: int = 4,
) -> FiniteMetric:
    """Closure of random positive rational edge weights on the complete graph."""
    weights: list[list[Optional[Fraction]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            numerator = int(rng.integers(1, max_numerator + 1))
            denominator = int(rng.integers(1, max_denominator + 1))
            weights[i][j] = weights[j][i] = Fraction(numerator, denominator)
    return metric_closure(_labels(n), weights)


def random_even_metric(n: int, rng: np.random.Generator, max_distance: int = 12) -> FiniteMetric:
    """Closure of random even edge weights in {2, 4, ..., max_distance}."""
    weights: list[list[Optional[Fraction]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            weights[i][j] = weights[j][i] = Fraction(2 * int(rng.integers(1, max_distance // 2 + 1)))
    return metric_closure(_labels(n), weights)


class MetricService:
    """Metric-file I/O and random metric generation."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def load(self, path: Path) -> FiniteMetric:
        try:
            payload = MetricFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise DomainError("INVALID_INPUT", str(exc)) from exc
        except OSError as exc:
            raise DomainError("INVALID_INPUT", f"cannot read {path}: {exc}") from exc
        metric = validate_metric(payload.labels, payload.matrix())
        logger.info("Loaded %d-point metric from %s", len(metric), path)
        return metric

    def dump(self, metric: FiniteMetric, path: Optional[Path] = None) -> str:
        text = MetricFile.from_metric(metric).model_dump_json(indent=2)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text

    def summary(self, metric: FiniteMetric) -> dict:
        return {
            "points": len(metric),
            "diam": str(diam(metric)),
            "sep": str(sep(metric)),
            "aspect_ratio": str(aspect_ratio(metric)),
        }

    def random(self, n: int, seed: int, even: bool = False, max_distance: int = 12) -> FiniteMetric:
        if n < 1:
            raise DomainError("INVALID_ARGUMENT", "n must be positive")
        rng = np.random.default_rng(seed)
        if even:
            return random_even_metric(n, rng, max_distance=max_distance)
        return random_metric(n, rng, max_numerator=max_distance)

