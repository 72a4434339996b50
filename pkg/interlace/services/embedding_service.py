from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import accumulate
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from interlace.config import Settings
from interlace.errors import DomainError
from interlace.models import (
    EmbeddingReport,
    EmbeddingResult,
    EvenMetric,
    FiniteMetric,
    FinSet,
    FinSuppSeq,
    PairRatio,
    RationalLike,
    as_rational,
)
from interlace.schemas import EmbeddingResponse
from interlace.services.interlacing_service import d_sum, lift_cardinality
from interlace.services.metric_service import aspect_ratio, diam, metric_closure, sep

logger = logging.getLogger(__name__)


def _check_epsilon(epsilon: RationalLike) -> Fraction:
    epsilon = as_rational(epsilon)
    if not 0 < epsilon < 1:
        raise DomainError("EPSILON_OUT_OF_RANGE", f"epsilon must lie in (0, 1), got {epsilon}")
    return epsilon


def round_metric(metric: FiniteMetric, epsilon: RationalLike) -> tuple[int, FiniteMetric]:
    """Round distances down to the grid (1/q)Z and take the shortest-path closure."""
    epsilon = _check_epsilon(epsilon)
    q = math.ceil(1 / (sep(metric) * epsilon))
    weights = [
        [Fraction(math.floor(q * value), q) if i != j else None for j, value in enumerate(row)]
        for i, row in enumerate(metric.dist)
    ]
    rounded = metric_closure(metric.labels, weights)
    logger.info("Rounded %d-point metric with q = %d", len(metric), q)
    return q, rounded


def evenize(rounded: FiniteMetric, q: int) -> EvenMetric:
    for i, j in rounded.pairs():
        if (q * rounded.dist[i][j]).denominator != 1:
            raise DomainError(
                "NOT_Q_INTEGRAL",
                f"q·d({rounded.labels[i]},{rounded.labels[j]}) = {q * rounded.dist[i][j]} is not an integer",
                witness=[rounded.labels[i], rounded.labels[j]],
            )
    return EvenMetric(rounded.scaled(2 * q))


def auxiliary_distance(even: EvenMetric) -> int:
    """Least even D with 2D >= diam."""
    largest = max(even.base.off_diagonal(), default=Fraction(0))
    return 2 * math.ceil(largest / 4)


def _extended_distances(even: EvenMetric, label: str, aux: int) -> list[int]:
    # x1 is the auxiliary point, x2..x_{n+1} the input points, x_{n+2} the ghost
    own = even.base.dist[even.base.index(label)]
    return [aux] + [int(value) for value in own] + [0]


def phi0(even: EvenMetric) -> dict[str, FinSuppSeq]:
    """Coefficients of each point in the summing basis."""
    aux = auxiliary_distance(even)
    images: dict[str, FinSuppSeq] = {}
    for label in even.base.labels:
        row = _extended_distances(even, label, aux)
        images[label] = FinSuppSeq.from_list(
            [Fraction(row[i] - row[i + 1], 2) for i in range(len(row) - 1)]
        )
    return images


def phi1(even: EvenMetric) -> dict[str, tuple[int, ...]]:
    aux = auxiliary_distance(even)
    images: dict[str, tuple[int, ...]] = {}
    for label in even.base.labels:
        row = _extended_distances(even, label, aux)
        coords = tuple((row[i] - row[i + 1]) // 2 + aux for i in range(len(row) - 1))
        assert all(c >= 0 for c in coords), f"negative shifted coordinate for {label}: {coords}"
        images[label] = coords
    return images


def claim1_embed(even: EvenMetric) -> EmbeddingResult:
    """Isometric embedding of an even-integer metric into fixed-cardinality sets."""
    aux = auxiliary_distance(even)
    shifted = phi1(even)
    widths = tuple(max(column) for column in zip(*shifted.values()))
    offsets = [0] + list(accumulate(widths))

    assignment: dict[str, FinSet] = {}
    for label, coords in shifted.items():
        elements = [
            offsets[block] + step
            for block, count in enumerate(coords)
            for step in range(1, count + 1)
        ]
        assignment[label] = FinSet(tuple(elements))

    n = len(even.base)
    k = (2 * n + 3) * aux // 2
    assert all(len(image) == k for image in assignment.values()), "image sets differ in size"
    logger.info("Block embedding: n = %d, D = %d, k = %d", n, aux, k)
    return EmbeddingResult(
        assignment=assignment,
        k=k,
        scale=Fraction(1),
        epsilon=Fraction(0),
        certified_distortion=_distortion(even.base, assignment, Fraction(1)) or Fraction(1),
        auxiliary_distance=aux,
        block_widths=widths,
    )


def size_bound(metric: FiniteMetric, epsilon: Fraction) -> int:
    """floor((n + 3/2)(aspect/ε + diam + 1))."""
    n = len(metric)
    return math.floor((n + Fraction(3, 2)) * (aspect_ratio(metric) / epsilon + diam(metric) + 1))


def _ratios(metric: FiniteMetric, assignment: dict[str, FinSet], scale: Fraction) -> list[Fraction]:
    return [
        Fraction(d_sum(assignment[metric.labels[i]], assignment[metric.labels[j]])) / (scale * metric.dist[i][j])
        for i, j in metric.pairs()
    ]


def _distortion(metric: FiniteMetric, assignment: dict[str, FinSet], scale: Fraction) -> Optional[Fraction]:
    ratios = _ratios(metric, assignment, scale)
    if not ratios:
        return None
    if min(ratios) == 0:
        raise AssertionError("two points share an image set")
    return max(ratios) / min(ratios)


def embed(metric: FiniteMetric, epsilon: RationalLike, target_k: Optional[int] = None) -> EmbeddingResult:
    epsilon = _check_epsilon(epsilon)
    if len(metric) < 2:
        raise DomainError("SINGLETON_SPACE", "at least two points are needed")
    q, rounded = round_metric(metric, epsilon)
    base = claim1_embed(evenize(rounded, q))
    scale = Fraction(2 * q)

    assignment = base.assignment
    k = base.k
    if target_k is not None:
        if target_k < k:
            raise DomainError("TARGET_TOO_SMALL", f"the construction needs k >= {k}, got {target_k}")
        labels = list(metric.labels)
        lifted = lift_cardinality([assignment[label] for label in labels], target_k)
        assignment = dict(zip(labels, lifted))
        k = target_k

    return EmbeddingResult(
        assignment=assignment,
        k=k,
        scale=scale,
        epsilon=epsilon,
        certified_distortion=_distortion(metric, assignment, scale),
        q=q,
        auxiliary_distance=base.auxiliary_distance,
        bound_k=size_bound(metric, epsilon),
        block_widths=base.block_widths,
        base_k=base.k,
    )


def _pair_distance(pair: tuple[FinSet, FinSet]) -> int:
    return d_sum(*pair)


def construction_size(metric: FiniteMetric, epsilon: RationalLike) -> int:
    """Cardinality the block construction reaches on M at this epsilon."""
    q, rounded = round_metric(metric, epsilon)
    even = evenize(rounded, q)
    return (2 * len(metric) + 3) * auxiliary_distance(even) // 2


def verify_embedding(metric: FiniteMetric, result: EmbeddingResult, jobs: int = 1) -> EmbeddingReport:
    """Recompute every image distance and the distortion certificate from scratch."""
    epsilon = _check_epsilon(result.epsilon)
    if result.scale <= 0:
        raise DomainError("INVALID_SCALE", f"scale must be positive, got {result.scale}")
    missing = [label for label in metric.labels if label not in result.assignment]
    if missing:
        raise DomainError("MISSING_LABEL", f"no image set for {missing}", witness=missing)
    sizes = {label: len(result.assignment[label]) for label in metric.labels}
    if len(set(sizes.values())) > 1:
        raise DomainError(
            "CARDINALITY_NONUNIFORM",
            f"image sets have sizes {sorted(set(sizes.values()))}",
            witness=sizes,
        )

    pairs = list(metric.pairs())
    images = [(result.assignment[metric.labels[i]], result.assignment[metric.labels[j]]) for i, j in pairs]
    if jobs > 1 and len(images) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            image_distances = list(pool.map(_pair_distance, images, chunksize=16))
    else:
        image_distances = [_pair_distance(pair) for pair in images]

    records = []
    for (i, j), image_distance in zip(pairs, image_distances):
        target = result.scale * metric.dist[i][j]
        records.append(
            PairRatio(
                first=metric.labels[i],
                second=metric.labels[j],
                distance=metric.dist[i][j],
                image_distance=image_distance,
                ratio=image_distance / target,
                within_bounds=(1 - epsilon) * target <= image_distance <= target,
            )
        )

    ratios = [record.ratio for record in records]
    distortion = max(ratios) / min(ratios) if ratios and min(ratios) > 0 else None
    k = next(iter(sizes.values()), 0)
    bound = size_bound(metric, epsilon)
    base_k = construction_size(metric, epsilon)
    report = EmbeddingReport(
        pairs=tuple(records),
        distortion=distortion,
        k=k,
        base_k=base_k,
        bound_k=bound,
        k_within_bound=k <= bound or (base_k <= bound and k >= base_k),
        distortion_within_bound=distortion is not None and distortion * (1 - epsilon) <= 1,
    )
    logger.info("Verified %d pairs, %d violations", len(records), len(report.violations))
    return report


class EmbeddingService:
    """Embedding pipeline and independent certificate checking."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def embed(self, metric: FiniteMetric, epsilon: Fraction, target_k: Optional[int] = None) -> EmbeddingResult:
        return embed(metric, epsilon, target_k=target_k)

    def verify(self, metric: FiniteMetric, result: EmbeddingResult, jobs: Optional[int] = None) -> EmbeddingReport:
        return verify_embedding(metric, result, jobs=jobs or self.settings.jobs)

    def load_result(self, path: Path) -> EmbeddingResult:
        try:
            payload = EmbeddingResponse.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise DomainError("INVALID_INPUT", str(exc)) from exc
        except OSError as exc:
            raise DomainError("INVALID_INPUT", f"cannot read {path}: {exc}") from exc
        return payload.to_result()
