from __future__ import annotations

import argparse

from interlace.commands.common import finset_arg, int_list_arg, ordinal_arg, positive_int
from interlace.config import get_settings
from interlace.schemas import PointsResponse, SchreierEnumResponse, SchreierMemberResponse, SpreadResponse
from interlace.services.schreier_service import SchreierService, schreier_point_format


def get_schreier_service() -> SchreierService:
    return SchreierService(get_settings())


def register(subparsers: argparse._SubParsersAction) -> None:
    schreier = subparsers.add_parser("schreier", help="Schreier family queries.")
    actions = schreier.add_subparsers(dest="action", required=True)

    member = actions.add_parser("member", help="Is the set in S_alpha?")
    member.add_argument("--alpha", type=ordinal_arg, required=True, help='Ordinal such as "w^2*3+w+1".')
    member.add_argument("--set", dest="subset", type=finset_arg, required=True)
    member.set_defaults(handler=member_command)

    enum = actions.add_parser("enum", help="All sets of S_alpha inside {1..N}.")
    enum.add_argument("--alpha", type=ordinal_arg, required=True)
    enum.add_argument("--n", type=positive_int, required=True)
    enum.set_defaults(handler=enum_command)

    spread = actions.add_parser("spread", help="Check or search a map carrying S_alpha into S_beta.")
    spread.add_argument("--alpha", type=ordinal_arg, required=True)
    spread.add_argument("--beta", type=ordinal_arg, required=True)
    spread.add_argument("--n", type=positive_int, required=True)
    spread.add_argument("--map", dest="mapping", type=int_list_arg, default=None, help="Check this map instead of searching.")
    spread.set_defaults(handler=spread_command)

    points = subparsers.add_parser("points", help="Points of the Schreier space with integer coefficients.")
    points.add_argument("--alpha", type=ordinal_arg, required=True)
    points.add_argument("--n", type=positive_int, required=True)
    points.add_argument("--m", type=positive_int, default=1)
    points.add_argument("--diameter", action="store_true", help="Also report the largest d_inf distance.")
    points.set_defaults(handler=points_command)


def member_command(args: argparse.Namespace) -> SchreierMemberResponse:
    member, witness = get_schreier_service().member(args.subset, args.alpha)
    return SchreierMemberResponse(alpha=str(args.alpha), set=str(args.subset), member=member, witness=witness)


def enum_command(args: argparse.Namespace) -> SchreierEnumResponse:
    sets = get_schreier_service().enumerate(args.alpha, args.n)
    return SchreierEnumResponse(alpha=str(args.alpha), n=args.n, count=len(sets), sets=[str(s) for s in sets])


def spread_command(args: argparse.Namespace) -> SpreadResponse:
    service = get_schreier_service()
    if args.mapping is None:
        mapping = service.spread_search(args.alpha, args.beta, args.n)
        ok = True
    else:
        mapping = args.mapping
        ok = service.spread_check(mapping, args.alpha, args.beta, args.n)
    return SpreadResponse(alpha=str(args.alpha), beta=str(args.beta), n=args.n, spreading=mapping, ok=ok)


def points_command(args: argparse.Namespace) -> PointsResponse:
    service = get_schreier_service()
    found = service.points(args.alpha, args.n, args.m)
    return PointsResponse(
        alpha=str(args.alpha),
        n=args.n,
        m=args.m,
        count=len(found),
        points=[schreier_point_format(point) for point in found],
        diameter=str(service.diameter(found)) if args.diameter else None,
    )
