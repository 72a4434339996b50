from __future__ import annotations

import argparse
from pathlib import Path

from interlace.commands.common import ordinal_arg, positive_int
from interlace.config import get_settings
from interlace.schemas import RankResponse
from interlace.services.indices_service import IndicesService


def get_indices_service() -> IndicesService:
    return IndicesService(get_settings())


def register(subparsers: argparse._SubParsersAction) -> None:
    rank = subparsers.add_parser("rank", help="Derivation rank of a finite tree or vine.")
    source = rank.add_mutually_exclusive_group(required=True)
    source.add_argument("--tree", type=Path, help="JSON list of nodes, each a list of integers.")
    source.add_argument("--vine", type=Path, help="JSON object with a list of bunches.")
    source.add_argument("--schreier", type=ordinal_arg, metavar="ALPHA", help="Use the Schreier tree of S_alpha.")
    rank.add_argument("--n", type=positive_int, default=6, help="Universe {1..N} for --schreier.")
    rank.add_argument("--m", type=positive_int, default=None, help="With --schreier, rank the point vine instead.")
    rank.set_defaults(handler=rank_command)


def rank_command(args: argparse.Namespace) -> RankResponse:
    service = get_indices_service()
    if args.tree is not None:
        tree = service.load_tree(args.tree)
        return RankResponse(kind="tree", size=len(tree), rank=service.tree_rank(tree))
    if args.vine is not None:
        vine = service.load_vine(args.vine)
        return RankResponse(kind="vine", size=len(vine), rank=service.vine_rank(vine))
    if args.m is not None:
        vine, _ = service.schreier_vine(args.schreier, args.n, args.m)
        return RankResponse(kind="vine", size=len(vine), rank=service.vine_rank(vine))
    tree = service.schreier_tree(args.schreier, args.n)
    return RankResponse(kind="tree", size=len(tree), rank=service.tree_rank(tree))
