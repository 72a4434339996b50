from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, Field, RootModel

from interlace.errors import DomainError
from interlace.models import Bunch, EmbeddingReport, EmbeddingResult, FiniteMetric, FinSet, FinTree, GlueReport

RATIONAL_PATTERN = r"^-?\d+(/0*[1-9]\d*)?$"
FINSET_PATTERN = r"^(\d+(,\d+)*)?$"


def format_rational(value: Fraction) -> str:
    return str(value)


class MetricFile(BaseModel):
    labels: list[str] = Field(..., min_length=1, description="Distinct point labels.")
    dist: list[list[str]] = Field(
        ...,
        description='Square matrix of rationals encoded as "p" or "p/q".',
    )

    model_config = {
        "json_schema_extra": {
            "example": {
                "labels": ["a", "b"],
                "dist": [["0", "2"], ["2", "0"]],
            }
        }
    }

    def matrix(self) -> list[list[Fraction]]:
        return [[_parse_rational(cell) for cell in row] for row in self.dist]

    @classmethod
    def from_metric(cls, metric: FiniteMetric) -> MetricFile:
        return cls(
            labels=list(metric.labels),
            dist=[[format_rational(value) for value in row] for row in metric.dist],
        )


def _parse_rational(text: str) -> Fraction:
    if not re.fullmatch(RATIONAL_PATTERN, text.strip()):
        raise DomainError("INVALID_INPUT", f"not a rational: {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError as exc:
        raise DomainError("INVALID_INPUT", f"zero denominator in {text!r}") from exc


class DistResponse(BaseModel):
    d: int = Field(..., ge=0)
    adjacent: bool
    bfs: Optional[int] = Field(default=None, ge=0)

    model_config = {"json_schema_extra": {"example": {"d": 1, "adjacent": True}}}


class GeodesicResponse(BaseModel):
    length: int = Field(..., ge=0)
    path: list[str]

    model_config = {
        "json_schema_extra": {
            "example": {"length": 2, "path": ["1,2", "2,3", "3,4"]},
        }
    }


class LiftResponse(BaseModel):
    m: int = Field(..., ge=0)
    sets: list[str]


class SweepResponse(BaseModel):
    universe: int = Field(..., ge=1)
    pairs: int = Field(..., ge=0)
    geodesics_checked: int = Field(..., ge=0)
    mismatches: list[list[str]] = Field(default_factory=list)
    passed: bool


class EmbeddingResponse(BaseModel):
    epsilon: str = Field(..., pattern=RATIONAL_PATTERN)
    scale: str = Field(..., pattern=RATIONAL_PATTERN)
    q: int = Field(..., ge=1)
    auxiliary_distance: int = Field(..., ge=0)
    k: int = Field(..., ge=0)
    base_k: Optional[int] = Field(default=None, ge=0)
    bound_k: Optional[int] = Field(default=None, ge=0)
    distortion: str = Field(..., pattern=RATIONAL_PATTERN)
    certified: bool
    sets: dict[str, list[int]]
    report: Optional[VerifyResponse] = None

    model_config = {
        "json_schema_extra": {
            "example": {
                "epsilon": "1/2",
                "scale": "2",
                "q": 1,
                "auxiliary_distance": 2,
                "k": 7,
                "base_k": 7,
                "bound_k": 17,
                "distortion": "1",
                "certified": True,
                "sets": {"p": [1, 2, 3, 8, 9, 10, 11], "q": [1, 4, 5, 6, 7, 8, 9]},
            }
        }
    }

    @classmethod
    def from_result(cls, result: EmbeddingResult) -> EmbeddingResponse:
        return cls(
            epsilon=format_rational(result.epsilon),
            scale=format_rational(result.scale),
            q=result.q,
            auxiliary_distance=result.auxiliary_distance,
            k=result.k,
            base_k=result.base_k,
            bound_k=result.bound_k,
            distortion=format_rational(result.certified_distortion),
            certified=result.certified,
            sets={label: list(result.assignment[label].elements) for label in sorted(result.assignment)},
        )

    def to_result(self) -> EmbeddingResult:
        return EmbeddingResult(
            assignment={label: FinSet(tuple(values)) for label, values in self.sets.items()},
            k=self.k,
            scale=Fraction(self.scale),
            epsilon=Fraction(self.epsilon),
            certified_distortion=Fraction(self.distortion),
            q=self.q,
            auxiliary_distance=self.auxiliary_distance,
            bound_k=self.bound_k,
            base_k=self.base_k,
        )


class PairRatioResponse(BaseModel):
    first: str
    second: str
    distance: str
    image_distance: int
    ratio: str
    ok: bool


class VerifyResponse(BaseModel):
    passed: bool
    distortion: Optional[str] = None
    k: int
    base_k: int
    bound_k: int
    k_within_bound: bool
    distortion_within_bound: bool
    violations: int = Field(..., ge=0)
    pairs: list[PairRatioResponse]

    @classmethod
    def from_report(cls, report: EmbeddingReport) -> VerifyResponse:
        return cls(
            passed=report.passed,
            distortion=None if report.distortion is None else format_rational(report.distortion),
            k=report.k,
            base_k=report.base_k,
            bound_k=report.bound_k,
            k_within_bound=report.k_within_bound,
            distortion_within_bound=report.distortion_within_bound,
            violations=len(report.violations),
            pairs=[
                PairRatioResponse(
                    first=pair.first,
                    second=pair.second,
                    distance=format_rational(pair.distance),
                    image_distance=pair.image_distance,
                    ratio=format_rational(pair.ratio),
                    ok=pair.within_bounds,
                )
                for pair in report.pairs
            ],
        )


EmbeddingResponse.model_rebuild()


class SchreierMemberResponse(BaseModel):
    alpha: str
    set: str = Field(..., pattern=FINSET_PATTERN)
    member: bool
    witness: Optional[list[str]] = None


class SchreierEnumResponse(BaseModel):
    alpha: str
    n: int = Field(..., ge=1)
    count: int = Field(..., ge=0)
    sets: list[str]


class SpreadResponse(BaseModel):
    alpha: str
    beta: str
    n: int = Field(..., ge=1)
    spreading: list[int]
    ok: bool


class PointsResponse(BaseModel):
    alpha: str
    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    count: int = Field(..., ge=0)
    points: list[str]
    diameter: Optional[str] = None


class TreeFile(RootModel[list[list[int]]]):
    model_config = {"json_schema_extra": {"example": [[], [1], [1, 2]]}}

    def to_tree(self) -> FinTree:
        return FinTree(frozenset(tuple(node) for node in self.root))


class BunchFile(BaseModel):
    ground: list[int] = Field(default_factory=list)
    alphabet: list[str] = Field(..., min_length=1)
    values: dict[str, str] = Field(
        ...,
        description="Point identifier per function, keyed by its comma-joined values in ground order.",
    )

    model_config = {
        "json_schema_extra": {
            "example": {
                "ground": [3],
                "alphabet": ["0", "1"],
                "values": {"0": "x0", "1": "x1"},
            }
        }
    }

    def to_bunch(self) -> Bunch:
        alphabet = tuple(_parse_rational(letter) for letter in self.alphabet)
        values = []
        for key, point in self.values.items():
            parts = [part for part in key.split(",")] if key != "" else []
            values.append((tuple(_parse_rational(part) for part in parts), point))
        return Bunch(FinSet(tuple(self.ground)), alphabet, tuple(values))

    @classmethod
    def from_bunch(cls, bunch: Bunch) -> BunchFile:
        return cls(
            ground=list(bunch.ground),
            alphabet=[format_rational(letter) for letter in bunch.alphabet],
            values={",".join(str(v) for v in key): point for key, point in bunch.values},
        )


class VineFile(BaseModel):
    bunches: list[BunchFile] = Field(default_factory=list)


class RankResponse(BaseModel):
    kind: str = Field(..., pattern=r"^(tree|vine)$")
    size: int = Field(..., ge=0)
    rank: int = Field(..., ge=0)


class GluePairResponse(BaseModel):
    t: str
    distance: str
    lower: str
    upper: str
    ok: bool


class GlueDemoResponse(BaseModel):
    dimension: int = Field(..., ge=1)
    ladder: list[int]
    coverage: int
    samples: int = Field(..., ge=0)
    violations: int = Field(..., ge=0)
    passed: bool
    pairs: list[GluePairResponse]

    @classmethod
    def from_report(cls, dimension: int, ladder: list[int], coverage: int, report: GlueReport) -> GlueDemoResponse:
        return cls(
            dimension=dimension,
            ladder=ladder,
            coverage=coverage,
            samples=len(report.pairs),
            violations=len(report.violations),
            passed=report.passed,
            pairs=[
                GluePairResponse(
                    t=format_rational(pair.norm),
                    distance=format_rational(pair.distance),
                    lower=format_rational(pair.lower),
                    upper=format_rational(pair.upper),
                    ok=pair.ok,
                )
                for pair in report.pairs
            ],
        )


class RandomMetricResponse(BaseModel):
    points: int
    diam: str
    sep: str
    aspect_ratio: str
    path: Optional[str] = None
    metric: Optional[MetricFile] = None
