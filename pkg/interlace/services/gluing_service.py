from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from interlace.config import Settings
from interlace.errors import DomainError
from interlace.models import (
    FinSet,
    GluePair,
    GlueReport,
    GrowthFunction,
    IndexFunction,
    LinearModulus,
    Modulus,
    Point,
    RadiiLadder,
    RationalLike,
    StepModulus,
    as_rational,
)

logger = logging.getLogger(__name__)


class BallEmbeddingProvider(ABC):
    """Maps h_n from the n-ball of a normed space X into a metric space M, with h_n(0) = m0."""

    rho: Modulus
    omega: Modulus

    @property
    @abstractmethod
    def base_point(self) -> Point:
        raise NotImplementedError

    @abstractmethod
    def norm(self, x: Point) -> Fraction:
        raise NotImplementedError

    @abstractmethod
    def gap(self, x: Point, y: Point) -> Fraction:
        """‖x − y‖ in X."""
        raise NotImplementedError

    @abstractmethod
    def scale(self, factor: Fraction, x: Point) -> Point:
        raise NotImplementedError

    @abstractmethod
    def embed(self, radius: int, x: Point) -> Point:
        raise NotImplementedError

    @abstractmethod
    def distance(self, first: Point, second: Point) -> Fraction:
        """Distance in M."""
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityProvider(BallEmbeddingProvider):
    """X = M = Q^d with the max norm and h_n the identity."""

    dimension: int
    rho: Modulus = field(default_factory=LinearModulus)
    omega: Modulus = field(default_factory=LinearModulus)

    @property
    def base_point(self) -> Point:
        return (Fraction(0),) * self.dimension

    def norm(self, x: Point) -> Fraction:
        return max((abs(c) for c in x), default=Fraction(0))

    def gap(self, x: Point, y: Point) -> Fraction:
        return max((abs(a - b) for a, b in zip(x, y)), default=Fraction(0))

    def scale(self, factor: Fraction, x: Point) -> Point:
        return tuple(factor * c for c in x)

    def embed(self, radius: int, x: Point) -> Point:
        if self.norm(x) > radius:
            raise DomainError("OUTSIDE_BALL", f"‖x‖ = {self.norm(x)} exceeds radius {radius}")
        return x

    def distance(self, first: Point, second: Point) -> Fraction:
        return self.gap(first, second)


@dataclass(frozen=True)
class ContractingProvider(IdentityProvider):
    """Shrinks by ``factor`` while still declaring the identity moduli."""

    factor: Fraction = Fraction(1, 100)

    def embed(self, radius: int, x: Point) -> Point:
        return self.scale(self.factor, super().embed(radius, x))


def choose_radii(rho: Modulus, omega: Modulus, count: int, search_limit: int) -> RadiiLadder:
    """Greedy minimal r_{n+1} >= max(2 r_n, r_n + 1) with rho(r_{n+1}) > 2 omega(r_n)."""
    if count < 1:
        raise DomainError("INVALID_ARGUMENT", "a ladder has at least one radius")
    radii = [0]
    while len(radii) < count:
        current = radii[-1]
        target = 2 * omega(current)
        ceiling = rho.supremum()
        if ceiling is not None and ceiling <= target:
            raise DomainError(
                "RHO_BOUNDED",
                f"rho never exceeds {ceiling} but needs to pass {target} after r = {current}",
                witness=radii,
            )

        def clears(r: int) -> bool:
            return rho(r) > target

        low = max(2 * current, current + 1)
        high = low
        while not clears(high):
            high *= 2
            if high > search_limit:
                raise DomainError(
                    "RHO_BOUNDED",
                    f"no radius up to {search_limit} clears 2·omega({current}) = {target}",
                    witness=radii,
                )
        radii.append(low + bisect_left(range(low, high + 1), True, key=clears))

    for previous, nxt in zip(radii, radii[1:]):
        assert rho(nxt) > 2 * omega(previous) and nxt >= 2 * previous, f"ladder broke at {previous} -> {nxt}"
    logger.info("Radii ladder: %s", radii)
    return RadiiLadder(tuple(radii))


def bump(n: int, ladder: RadiiLadder, t: RationalLike) -> Fraction:
    """Piecewise-linear alpha_n: support (r_{n-4}, r_n), equal to 1 on [r_{n-3}, r_{n-1}]."""
    if n < 1:
        raise DomainError("INVALID_ARGUMENT", f"bumps are indexed from 1, got {n}")
    t = as_rational(t)
    r = ladder.radius
    if t < r(n - 4) or t > r(n):
        return Fraction(0)
    if t < r(n - 3):
        return (t - r(n - 4)) / (r(n - 3) - r(n - 4))
    if t <= r(n - 1):
        return Fraction(1)
    return (r(n) - t) / (r(n) - r(n - 1))


def active_window(ladder: RadiiLadder, i: int, t: Fraction) -> int:
    """The l >= 0 with r_{4(l-1)+i} <= t < r_{4l+i}."""
    l = 0
    while True:
        index = 4 * l + i
        if index > len(ladder) - 1:
            raise DomainError(
                "LADDER_TOO_SHORT",
                f"‖x‖ = {t} is beyond the ladder's reach for i = {i}",
                witness=list(ladder.radii),
            )
        if ladder.radius(index - 4) <= t < ladder.radius(index):
            return l
        l += 1


def glue(provider: BallEmbeddingProvider, ladder: RadiiLadder, x: Point) -> tuple[Point, Point, Point, Point]:
    norm = provider.norm(x)
    coordinates = []
    for i in range(4):
        index = 4 * active_window(ladder, i, norm) + i
        radius = ladder.radius(index)
        coordinates.append(provider.embed(radius, provider.scale(bump(index, ladder, norm), x)))
    return tuple(coordinates)


def glued_distance(provider: BallEmbeddingProvider, first: Sequence[Point], second: Sequence[Point]) -> Fraction:
    return max(provider.distance(a, b) for a, b in zip(first, second))


def _glue_pair(args: tuple[BallEmbeddingProvider, RadiiLadder, Point, Point]) -> GluePair:
    provider, ladder, x, y = args
    t = provider.gap(x, y)
    observed = glued_distance(provider, glue(provider, ladder, x), glue(provider, ladder, y))
    return GluePair(
        x=x,
        y=y,
        norm=t,
        distance=observed,
        lower=provider.rho(t / 2) / 2,
        upper=8 * provider.omega(3 * t),
    )


def verify_glue(
    provider: BallEmbeddingProvider,
    ladder: RadiiLadder,
    samples: Sequence[tuple[Point, Point]],
    jobs: int = 1,
) -> GlueReport:
    """Check rho(t/2)/2 <= d(F(x), F(y)) <= 8 omega(3t) for every sampled pair."""
    tasks = [(provider, ladder, x, y) for x, y in samples]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(_glue_pair, tasks, chunksize=256))
    else:
        pairs = [_glue_pair(task) for task in tasks]
    report = GlueReport(tuple(pairs))
    logger.info("Checked %d glued pairs, %d violations", len(pairs), len(report.violations))
    return report


def sample_ball(rng: np.random.Generator, dimension: int, radius: int, denominator: int = 4) -> Point:
    """A point with coordinates in (1/denominator)Z and max norm at most ``radius``."""
    bound = radius * denominator
    return tuple(Fraction(int(c), denominator) for c in rng.integers(-bound, bound + 1, size=dimension))


def j_of(f: IndexFunction) -> FinSet:
    """Positions where f increases."""
    return FinSet(tuple(n for n in range(1, len(f)) if f(n + 1) > f(n)))


def j_inv(subset: FinSet, n: int) -> int:
    """#{i in A : i < n}."""
    return sum(1 for i in subset if i < n)


def k_of(g: GrowthFunction) -> FinSet:
    return FinSet(tuple(g(n) for n in range(1, len(g))))


def k_inv(subset: FinSet, n: int) -> int:
    """The n-th element of A, with 0 for n = 0."""
    if n == 0:
        return 0
    if not 1 <= n <= len(subset):
        raise DomainError("OUT_OF_WINDOW", f"{subset} has no element number {n}")
    return subset.elements[n - 1]


def rho_from_index_function(f: IndexFunction) -> StepModulus:
    """rho = 0 on [0, 1) and rho = f(n) on [n, n + 1)."""
    return StepModulus(tuple((Fraction(n), Fraction(f(n))) for n in range(1, len(f) + 1)))


def omega_from_growth_function(g: GrowthFunction) -> StepModulus:
    """Right-continuous majorant of omega(0) = 0, omega = g(n) on (n - 1, n]."""
    if len(g) < 2:
        raise DomainError("OUT_OF_WINDOW", "need g(1) to build an expansion modulus")
    return StepModulus(
        tuple((Fraction(n), Fraction(g(n + 1))) for n in range(1, len(g) - 1)),
        base=Fraction(g(1)),
        zero_at_origin=True,
    )


def index_minorant(rho: Modulus, length: int) -> IndexFunction:
    """Pointwise-largest prefix f(1..N) of the index class with f(n) <= rho(n)."""
    values = [0]
    for n in range(1, length):
        ceiling = math.floor(rho(n + 1))
        values.append(min(values[-1] + 1, max(values[-1], ceiling)))
    return IndexFunction(tuple(values))


def growth_majorant(omega: Modulus, length: int) -> GrowthFunction:
    """Pointwise-smallest prefix g(0..N) with g(n + 1) >= g(n) + 1 and g(n) >= omega(n)."""
    values = [0]
    for n in range(1, length + 1):
        values.append(max(values[-1] + 1, math.ceil(omega(n))))
    return GrowthFunction(tuple(values))


class GluingService:
    """Radii ladders and sampled checks of the glued embedding."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def ladder(self, rho: Modulus, omega: Modulus, count: int) -> RadiiLadder:
        return choose_radii(rho, omega, count, self.settings.radius_search_limit)

    def demo(
        self,
        dimension: int,
        length: int,
        samples: int,
        seed: int,
        radius: Optional[int] = None,
        contracting: bool = False,
        jobs: Optional[int] = None,
    ) -> tuple[RadiiLadder, GlueReport]:
        if length < 5:
            raise DomainError("LADDER_TOO_SHORT", "the demo needs at least five radii")
        provider: BallEmbeddingProvider = ContractingProvider(dimension) if contracting else IdentityProvider(dimension)
        ladder = self.ladder(provider.rho, provider.omega, length)
        reach = ladder.coverage - 1
        radius = reach if radius is None else radius
        if radius > reach:
            raise DomainError("LADDER_TOO_SHORT", f"radius {radius} is beyond the ladder's coverage {ladder.coverage}")

        rng = np.random.default_rng(seed)
        pairs = [(sample_ball(rng, dimension, radius), sample_ball(rng, dimension, radius)) for _ in range(samples)]
        logger.info("Sampling %d pairs in the radius-%d ball of Q^%d", samples, radius, dimension)
        return ladder, verify_glue(provider, ladder, pairs, jobs=jobs or self.settings.jobs)
