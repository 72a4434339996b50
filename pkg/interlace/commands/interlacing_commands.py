from __future__ import annotations

import argparse

from interlace.commands.common import finset_arg, positive_int
from interlace.config import get_settings
from interlace.schemas import DistResponse, GeodesicResponse, LiftResponse, SweepResponse
from interlace.services.interlacing_service import InterlacingService


def get_interlacing_service() -> InterlacingService:
    return InterlacingService(get_settings())


def register(subparsers: argparse._SubParsersAction) -> None:
    dist = subparsers.add_parser("dist", help="Summing distance and adjacency of two sets.")
    dist.add_argument("--a", type=finset_arg, required=True, help='Comma-separated set, "" for the empty set.')
    dist.add_argument("--b", type=finset_arg, required=True)
    dist.add_argument("--oracle", action="store_true", help="Cross-check against breadth-first search.")
    dist.set_defaults(handler=dist_command)

    geodesic = subparsers.add_parser("geodesic", help="A shortest path in the interlacing graph.")
    geodesic.add_argument("--a", type=finset_arg, required=True)
    geodesic.add_argument("--b", type=finset_arg, required=True)
    geodesic.set_defaults(handler=geodesic_command)

    lift = subparsers.add_parser("lift", help="Lift equal-size sets to a larger common size.")
    lift.add_argument("--sets", type=finset_arg, nargs="+", required=True)
    lift.add_argument("--m", type=int, required=True)
    lift.set_defaults(handler=lift_command)

    sweep = subparsers.add_parser("sweep", help="Exhaustive distance and geodesic check on {1..N}.")
    sweep.add_argument("--universe", type=positive_int, default=6)
    sweep.add_argument("--no-geodesics", dest="geodesics", action="store_false")
    sweep.add_argument("--jobs", type=positive_int, default=None)
    sweep.set_defaults(handler=sweep_command)


def dist_command(args: argparse.Namespace) -> DistResponse:
    service = get_interlacing_service()
    return DistResponse(**service.distance(args.a, args.b, oracle=args.oracle))


def geodesic_command(args: argparse.Namespace) -> GeodesicResponse:
    path = get_interlacing_service().geodesic(args.a, args.b)
    return GeodesicResponse(length=path.length, path=[str(vertex) for vertex in path.vertices])


def lift_command(args: argparse.Namespace) -> LiftResponse:
    lifted = get_interlacing_service().lift(args.sets, args.m)
    return LiftResponse(m=args.m, sets=[str(member) for member in lifted])


def sweep_command(args: argparse.Namespace) -> SweepResponse:
    service = get_interlacing_service()
    return SweepResponse(**service.sweep(args.universe, with_geodesics=args.geodesics, jobs=args.jobs))
