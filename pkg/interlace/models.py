from __future__ import annotations

from abc import ABC, abstractmethod
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from interlace.errors import DomainError

Rational = Fraction
RationalLike = Union[int, str, Fraction]


def as_rational(value: RationalLike) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True, order=True)
class FinSet:
    """Finite subset of {1, 2, ...}, stored strictly increasing."""

    elements: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        values = tuple(int(item) for item in self.elements)
        if any(item < 1 for item in values):
            raise DomainError("INVALID_FINSET", f"elements must be positive integers: {values}")
        if any(left >= right for left, right in zip(values, values[1:])):
            raise DomainError("INVALID_FINSET", f"elements must be strictly increasing: {values}")
        object.__setattr__(self, "elements", values)

    @classmethod
    def of(cls, values: Iterable[int]) -> FinSet:
        return cls(tuple(sorted(set(values))))

    @classmethod
    def parse(cls, text: str) -> FinSet:
        stripped = text.strip()
        if not stripped:
            return cls()
        try:
            values = [int(part) for part in stripped.split(",")]
        except ValueError as exc:
            raise DomainError("INVALID_FINSET", f"not a comma-separated integer list: {text!r}") from exc
        return cls(tuple(values))

    def __str__(self) -> str:
        return ",".join(str(item) for item in self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, item: object) -> bool:
        return item in self.elements

    @property
    def minimum(self) -> int:
        if not self.elements:
            raise DomainError("EMPTY_SET", "the empty set has no minimum")
        return self.elements[0]

    @property
    def maximum(self) -> int:
        if not self.elements:
            raise DomainError("EMPTY_SET", "the empty set has no maximum")
        return self.elements[-1]

    def union(self, other: Iterable[int]) -> FinSet:
        return FinSet.of(set(self.elements).union(other))

    def difference(self, other: Iterable[int]) -> FinSet:
        return FinSet.of(set(self.elements).difference(other))

    def symmetric_difference(self, other: Iterable[int]) -> FinSet:
        return FinSet.of(set(self.elements).symmetric_difference(other))

    def issubset(self, other: FinSet) -> bool:
        return set(self.elements).issubset(other.elements)

    def image(self, mapping: Sequence[int]) -> FinSet:
        """Image under the strictly increasing map n ↦ mapping[n - 1]."""
        if self.elements and self.elements[-1] > len(mapping):
            raise DomainError(
                "MAP_TOO_SHORT",
                f"map of length {len(mapping)} cannot spread {self}",
            )
        return FinSet(tuple(mapping[item - 1] for item in self.elements))

    def indicator(self) -> FinSuppSeq:
        return FinSuppSeq.from_mapping({item: Fraction(1) for item in self.elements})


@dataclass(frozen=True)
class FinSuppSeq:
    """Finitely supported rational sequence indexed from 1, zeros never stored."""

    entries: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        cleaned = sorted(
            (int(index), as_rational(value)) for index, value in self.entries if value != 0
        )
        indices = [index for index, _ in cleaned]
        if any(index < 1 for index in indices):
            raise DomainError("INVALID_SEQUENCE", "indices start at 1")
        if len(set(indices)) != len(indices):
            raise DomainError("INVALID_SEQUENCE", "duplicate index")
        object.__setattr__(self, "entries", tuple(cleaned))

    @classmethod
    def from_mapping(cls, values: Mapping[int, RationalLike]) -> FinSuppSeq:
        return cls(tuple((index, as_rational(value)) for index, value in values.items()))

    @classmethod
    def from_list(cls, values: Sequence[RationalLike]) -> FinSuppSeq:
        return cls(tuple((index, as_rational(value)) for index, value in enumerate(values, start=1)))

    def __getitem__(self, index: int) -> Fraction:
        return self.as_dict().get(index, Fraction(0))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.entries)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self.entries)

    @property
    def support(self) -> FinSet:
        return FinSet(tuple(index for index, _ in self.entries))

    def __add__(self, other: FinSuppSeq) -> FinSuppSeq:
        total = self.as_dict()
        for index, value in other.entries:
            total[index] = total.get(index, Fraction(0)) + value
        return FinSuppSeq.from_mapping(total)

    def __neg__(self) -> FinSuppSeq:
        return FinSuppSeq(tuple((index, -value) for index, value in self.entries))

    def __sub__(self, other: FinSuppSeq) -> FinSuppSeq:
        return self + (-other)

    def scale(self, factor: RationalLike) -> FinSuppSeq:
        factor = as_rational(factor)
        return FinSuppSeq(tuple((index, factor * value) for index, value in self.entries))


@dataclass(frozen=True)
class FiniteMetric:
    """Labeled points with an exact distance matrix; build it through validate_metric."""

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as exc:
            raise DomainError("MISSING_LABEL", f"unknown point {label!r}") from exc

    def distance(self, first: str, second: str) -> Fraction:
        return self.dist[self.index(first)][self.index(second)]

    def pairs(self) -> Iterator[tuple[int, int]]:
        size = len(self.labels)
        for i in range(size):
            for j in range(i + 1, size):
                yield i, j

    def off_diagonal(self) -> list[Fraction]:
        return [self.dist[i][j] for i, j in self.pairs()]

    def scaled(self, factor: RationalLike) -> FiniteMetric:
        factor = as_rational(factor)
        return FiniteMetric(
            self.labels,
            tuple(tuple(factor * value for value in row) for row in self.dist),
        )


class Modulus(ABC):
    """Nondecreasing map [0, ∞) → [0, ∞) used as a compression or expansion bound."""

    @abstractmethod
    def __call__(self, t: RationalLike) -> Fraction:
        raise NotImplementedError

    @abstractmethod
    def supremum(self) -> Optional[Fraction]:
        """Least upper bound of the values, or None when unbounded."""


@dataclass(frozen=True)
class StepModulus(Modulus):
    """Right-continuous step function.

    The value is ``base`` below the first threshold and the value of the last
    breakpoint whose threshold is <= t otherwise. ``zero_at_origin`` forces the
    value 0 at t = 0 for expansion-type moduli.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...] = ()
    base: Fraction = Fraction(0)
    zero_at_origin: bool = False

    def __post_init__(self) -> None:
        points = tuple((as_rational(t), as_rational(v)) for t, v in self.breakpoints)
        base = as_rational(self.base)
        thresholds = [t for t, _ in points]
        values = [base] + [v for _, v in points]
        if base < 0 or any(t < 0 for t in thresholds):
            raise DomainError("INVALID_MODULUS", "moduli live on [0, ∞)")
        if any(left >= right for left, right in zip(thresholds, thresholds[1:])):
            raise DomainError("INVALID_MODULUS", "thresholds must be strictly increasing")
        if any(left > right for left, right in zip(values, values[1:])):
            raise DomainError("INVALID_MODULUS", "step values must be nondecreasing")
        object.__setattr__(self, "breakpoints", points)
        object.__setattr__(self, "base", base)

    def __call__(self, t: RationalLike) -> Fraction:
        t = as_rational(t)
        if t < 0:
            raise DomainError("INVALID_ARGUMENT", "moduli are evaluated on [0, ∞)")
        if t == 0 and self.zero_at_origin:
            return Fraction(0)
        position = bisect_right([threshold for threshold, _ in self.breakpoints], t)
        return self.base if position == 0 else self.breakpoints[position - 1][1]

    def supremum(self) -> Optional[Fraction]:
        return self.breakpoints[-1][1] if self.breakpoints else self.base


@dataclass(frozen=True)
class LinearModulus(Modulus):
    """t ↦ max(0, slope·t − offset); slope 1, offset 0 is the identity."""

    slope: Fraction = Fraction(1)
    offset: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "slope", as_rational(self.slope))
        object.__setattr__(self, "offset", as_rational(self.offset))
        if self.slope < 0:
            raise DomainError("INVALID_MODULUS", "slope must be nonnegative")

    def __call__(self, t: RationalLike) -> Fraction:
        t = as_rational(t)
        if t < 0:
            raise DomainError("INVALID_ARGUMENT", "moduli are evaluated on [0, ∞)")
        return max(Fraction(0), self.slope * t - self.offset)

    def supremum(self) -> Optional[Fraction]:
        return None if self.slope > 0 else max(Fraction(0), -self.offset)


@dataclass(frozen=True)
class GeodesicPath:
    vertices: tuple[FinSet, ...]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class EvenMetric:
    """Finite metric whose off-diagonal distances are even positive integers."""

    base: FiniteMetric

    def __post_init__(self) -> None:
        for i, j in self.base.pairs():
            value = self.base.dist[i][j]
            if value.denominator != 1 or value.numerator % 2 != 0:
                raise DomainError(
                    "ODD_DISTANCE",
                    f"d({self.base.labels[i]},{self.base.labels[j]}) = {value} is not an even integer",
                    witness=[self.base.labels[i], self.base.labels[j]],
                )


@dataclass(frozen=True)
class EmbeddingResult:
    assignment: dict[str, FinSet]
    k: int
    scale: Fraction
    epsilon: Fraction
    certified_distortion: Fraction
    q: int = 1
    auxiliary_distance: int = 0
    bound_k: Optional[int] = None
    block_widths: tuple[int, ...] = ()
    base_k: Optional[int] = None

    @property
    def construction_k(self) -> int:
        """Cardinality produced by the block construction, before any lift."""
        return self.k if self.base_k is None else self.base_k

    @property
    def certified(self) -> bool:
        within_distortion = self.certified_distortion * (1 - self.epsilon) <= 1
        within_size = self.bound_k is None or (
            self.construction_k <= self.bound_k and self.k >= self.construction_k
        )
        return within_distortion and within_size


@dataclass(frozen=True)
class PairRatio:
    first: str
    second: str
    distance: Fraction
    image_distance: int
    ratio: Fraction
    within_bounds: bool


@dataclass(frozen=True)
class EmbeddingReport:
    pairs: tuple[PairRatio, ...]
    distortion: Optional[Fraction]
    k: int
    base_k: int
    bound_k: int
    k_within_bound: bool
    distortion_within_bound: bool

    @property
    def violations(self) -> tuple[PairRatio, ...]:
        return tuple(pair for pair in self.pairs if not pair.within_bounds)

    @property
    def passed(self) -> bool:
        return not self.violations and self.k_within_bound and self.distortion_within_bound


@dataclass(frozen=True, order=True)
class OrdinalCNF:
    """Ordinal below ω^ω as ((exponent, coefficient), ...) with decreasing exponents."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        terms = tuple((int(e), int(c)) for e, c in self.terms)
        if any(e < 0 or c <= 0 for e, c in terms):
            raise DomainError("PARSE_ERROR", f"non-canonical ordinal terms {terms}")
        if any(left[0] <= right[0] for left, right in zip(terms, terms[1:])):
            raise DomainError("PARSE_ERROR", f"exponents must strictly decrease: {terms}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def finite(cls, value: int) -> OrdinalCNF:
        if value < 0:
            raise DomainError("PARSE_ERROR", "ordinals are nonnegative")
        return cls(((0, value),)) if value else cls()

    @classmethod
    def omega_power(cls, exponent: int, coefficient: int = 1) -> OrdinalCNF:
        return cls(((exponent, coefficient),)) if coefficient else cls()

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def successor(self) -> OrdinalCNF:
        return self + OrdinalCNF.finite(1)

    def predecessor(self) -> OrdinalCNF:
        if not self.is_successor:
            raise DomainError("NOT_SUCCESSOR", f"{self} has no predecessor")
        head, (_, coefficient) = self.terms[:-1], self.terms[-1]
        tail = ((0, coefficient - 1),) if coefficient > 1 else ()
        return OrdinalCNF(head + tail)

    def __add__(self, other: OrdinalCNF) -> OrdinalCNF:
        if other.is_zero:
            return self
        lead_exponent, lead_coefficient = other.terms[0]
        kept = [term for term in self.terms if term[0] > lead_exponent]
        same = [c for e, c in self.terms if e == lead_exponent]
        merged = (lead_exponent, lead_coefficient + sum(same))
        return OrdinalCNF(tuple(kept) + (merged,) + other.terms[1:])

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for exponent, coefficient in self.terms:
            if exponent == 0:
                parts.append(str(coefficient))
                continue
            text = "w" if exponent == 1 else f"w^{exponent}"
            parts.append(text if coefficient == 1 else f"{text}*{coefficient}")
        return "+".join(parts)


@dataclass(frozen=True)
class SchreierPoint:
    """Point Σ c_i e_i of c_00 with integer or rational coefficients."""

    coeffs: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", FinSuppSeq(self.coeffs).entries)

    @property
    def support(self) -> FinSet:
        return FinSet(tuple(index for index, _ in self.coeffs))

    def value(self, index: int) -> Fraction:
        return dict(self.coeffs).get(index, Fraction(0))

    def label(self) -> str:
        return ",".join(f"{index}:{value}" for index, value in self.coeffs)


@dataclass(frozen=True)
class FinTree:
    """Finite prefix-closed set of finite sequences."""

    nodes: frozenset[tuple] = frozenset()

    def __post_init__(self) -> None:
        nodes = frozenset(tuple(node) for node in self.nodes)
        for node in nodes:
            if node and node[:-1] not in nodes:
                raise DomainError(
                    "NOT_A_TREE",
                    f"{node} is present but its prefix {node[:-1]} is not",
                    witness=[list(node), list(node[:-1])],
                )
        object.__setattr__(self, "nodes", nodes)

    def __len__(self) -> int:
        return len(self.nodes)


FunctionKey = tuple[Fraction, ...]


@dataclass(frozen=True)
class Bunch:
    """Family (x_f) indexed by every f: ground → alphabet, keyed by values in ground order."""

    ground: FinSet
    alphabet: tuple[Fraction, ...]
    values: tuple[tuple[FunctionKey, str], ...]

    def __post_init__(self) -> None:
        alphabet = tuple(sorted({as_rational(letter) for letter in self.alphabet}))
        if Fraction(0) not in alphabet:
            raise DomainError("INVALID_BUNCH", "the alphabet must contain 0")
        values = tuple(
            sorted((tuple(as_rational(v) for v in key), str(point)) for key, point in self.values)
        )
        keys = [key for key, _ in values]
        expected = set(product(alphabet, repeat=len(self.ground)))
        if len(keys) != len(set(keys)) or set(keys) != expected:
            raise DomainError(
                "INVALID_BUNCH",
                f"values must cover the {len(expected)} functions on {self.ground} exactly once",
            )
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(
        cls,
        ground: FinSet,
        alphabet: Iterable[RationalLike],
        values: Mapping[FunctionKey, str],
    ) -> Bunch:
        return cls(ground, tuple(as_rational(a) for a in alphabet), tuple(values.items()))

    def value_map(self) -> dict[FunctionKey, str]:
        return dict(self.values)

    def point(self, key: FunctionKey) -> str:
        return self.value_map()[key]


@dataclass(frozen=True)
class Vine:
    bunches: frozenset[Bunch] = frozenset()

    def __len__(self) -> int:
        return len(self.bunches)


@dataclass(frozen=True)
class BunchCheck:
    ok: bool
    witness: Optional[tuple[FunctionKey, FunctionKey, Fraction]] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class DistanceTable:
    """Symmetric distance lookup between opaque point identifiers."""

    entries: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)

    def __call__(self, first: str, second: str) -> Fraction:
        if first == second:
            return Fraction(0)
        if (first, second) in self.entries:
            return self.entries[(first, second)]
        if (second, first) in self.entries:
            return self.entries[(second, first)]
        raise DomainError(
            "MISSING_DISTANCE",
            f"no distance recorded between {first!r} and {second!r}",
            witness=[first, second],
        )


@dataclass(frozen=True)
class RadiiLadder:
    """Radii r_0 = 0 < r_1 < ...; negative indices read as 0."""

    radii: tuple[int, ...]

    def __post_init__(self) -> None:
        radii = tuple(int(r) for r in self.radii)
        if not radii or radii[0] != 0:
            raise DomainError("INVALID_LADDER", "a ladder starts at r_0 = 0")
        if any(left >= right for left, right in zip(radii, radii[1:])):
            raise DomainError("INVALID_LADDER", "radii must be strictly increasing")
        object.__setattr__(self, "radii", radii)

    def __len__(self) -> int:
        return len(self.radii)

    def radius(self, index: int) -> int:
        if index < 0:
            return 0
        if index >= len(self.radii):
            raise DomainError("LADDER_TOO_SHORT", f"ladder has no radius r_{index}")
        return self.radii[index]

    @property
    def coverage(self) -> int:
        """Norms strictly below this value have an active window for every i."""
        return self.radius(len(self.radii) - 4) if len(self.radii) >= 4 else 0


@dataclass(frozen=True)
class IndexFunction:
    """Prefix f(1), ..., f(N) of a nondecreasing map with f(1) = 0 and unit steps."""

    prefix: tuple[int, ...]

    def __post_init__(self) -> None:
        prefix = tuple(int(v) for v in self.prefix)
        if not prefix or prefix[0] != 0:
            raise DomainError("NOT_IN_CLASS", "an index function starts with f(1) = 0")
        if any(not 0 <= right - left <= 1 for left, right in zip(prefix, prefix[1:])):
            raise DomainError("NOT_IN_CLASS", "steps must satisfy f(n) <= f(n+1) <= f(n) + 1")
        object.__setattr__(self, "prefix", prefix)

    def __call__(self, n: int) -> int:
        if not 1 <= n <= len(self.prefix):
            raise DomainError("OUT_OF_WINDOW", f"f({n}) lies outside the stored prefix")
        return self.prefix[n - 1]

    def __len__(self) -> int:
        return len(self.prefix)


@dataclass(frozen=True)
class GrowthFunction:
    """Prefix g(0), ..., g(N) with g(0) = 0 and g(n+1) >= g(n) + 1."""

    prefix: tuple[int, ...]

    def __post_init__(self) -> None:
        prefix = tuple(int(v) for v in self.prefix)
        if not prefix or prefix[0] != 0:
            raise DomainError("NOT_IN_CLASS", "a growth function starts with g(0) = 0")
        if any(right < left + 1 for left, right in zip(prefix, prefix[1:])):
            raise DomainError("NOT_IN_CLASS", "g must satisfy g(n+1) >= g(n) + 1")
        object.__setattr__(self, "prefix", prefix)

    def __call__(self, n: int) -> int:
        if not 0 <= n < len(self.prefix):
            raise DomainError("OUT_OF_WINDOW", f"g({n}) lies outside the stored prefix")
        return self.prefix[n]

    def __len__(self) -> int:
        return len(self.prefix)


Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class GluePair:
    x: Point
    y: Point
    norm: Fraction
    distance: Fraction
    lower: Fraction
    upper: Fraction

    @property
    def ok(self) -> bool:
        return self.lower <= self.distance <= self.upper


@dataclass(frozen=True)
class GlueReport:
    pairs: tuple[GluePair, ...]

    @property
    def violations(self) -> tuple[GluePair, ...]:
        return tuple(pair for pair in self.pairs if not pair.ok)

    @property
    def passed(self) -> bool:
        return not self.violations
