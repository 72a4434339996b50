from __future__ import annotations

import argparse
from pathlib import Path

from interlace.commands.common import epsilon_arg, positive_int
from interlace.config import get_settings
from interlace.schemas import EmbeddingResponse, MetricFile, RandomMetricResponse, VerifyResponse
from interlace.services.embedding_service import EmbeddingService
from interlace.services.metric_service import MetricService


def get_embedding_service() -> EmbeddingService:
    return EmbeddingService(get_settings())


def get_metric_service() -> MetricService:
    return MetricService(get_settings())


def register(subparsers: argparse._SubParsersAction) -> None:
    embed = subparsers.add_parser("embed", help="Embed a finite metric into equal-size sets.")
    embed.add_argument("--input", type=Path, required=True, help="Metric JSON file.")
    embed.add_argument("--epsilon", type=epsilon_arg, required=True, help='Rational in (0, 1), e.g. "1/4".')
    embed.add_argument("--target-k", type=positive_int, default=None, help="Lift the image sets to this size.")
    embed.add_argument("--verify", action="store_true", help="Recheck the certificate independently.")
    embed.add_argument("--output", type=Path, default=None, help="Also write the result JSON here.")
    embed.add_argument("--jobs", type=positive_int, default=None)
    embed.set_defaults(handler=embed_command)

    verify = subparsers.add_parser("verify", help="Recheck a stored embedding result against its metric.")
    verify.add_argument("--input", type=Path, required=True, help="Metric JSON file.")
    verify.add_argument("--result", type=Path, required=True, help="Embedding result JSON file.")
    verify.add_argument("--jobs", type=positive_int, default=None)
    verify.set_defaults(handler=verify_command)

    random_metric = subparsers.add_parser("random-metric", help="Write a seeded random metric file.")
    random_metric.add_argument("--n", type=positive_int, required=True)
    random_metric.add_argument("--seed", type=int, default=0)
    random_metric.add_argument("--even", action="store_true", help="Even integer distances only.")
    random_metric.add_argument("--max-distance", type=positive_int, default=12)
    random_metric.add_argument("--output", type=Path, default=None)
    random_metric.set_defaults(handler=random_metric_command)


def embed_command(args: argparse.Namespace) -> EmbeddingResponse:
    metric = get_metric_service().load(args.input)
    service = get_embedding_service()
    result = service.embed(metric, args.epsilon, target_k=args.target_k)
    response = EmbeddingResponse.from_result(result)
    if args.output is not None:
        args.output.write_text(response.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")
    if args.verify:
        response.report = VerifyResponse.from_report(service.verify(metric, result, jobs=args.jobs))
    return response


def verify_command(args: argparse.Namespace) -> VerifyResponse:
    metric = get_metric_service().load(args.input)
    service = get_embedding_service()
    result = service.load_result(args.result)
    return VerifyResponse.from_report(service.verify(metric, result, jobs=args.jobs))


def random_metric_command(args: argparse.Namespace) -> RandomMetricResponse:
    service = get_metric_service()
    metric = service.random(args.n, args.seed, even=args.even, max_distance=args.max_distance)
    service.dump(metric, args.output)
    return RandomMetricResponse(
        **service.summary(metric),
        path=str(args.output) if args.output else None,
        metric=None if args.output else MetricFile.from_metric(metric),
    )
