from __future__ import annotations

import argparse
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from interlace.commands.common import positive_int  # noqa: E402
from interlace.config import get_settings  # noqa: E402
from interlace.models import GlueReport  # noqa: E402
from interlace.schemas import GlueDemoResponse  # noqa: E402
from interlace.services.gluing_service import GluingService  # noqa: E402

logger = logging.getLogger(__name__)


def get_gluing_service() -> GluingService:
    return GluingService(get_settings())


def register(subparsers: argparse._SubParsersAction) -> None:
    demo = subparsers.add_parser("glue-demo", help="Glue ball embeddings of Q^d and check the distance sandwich.")
    demo.add_argument("--dimension", type=positive_int, default=3)
    demo.add_argument("--ladder-length", type=positive_int, default=20)
    demo.add_argument("--samples", type=positive_int, default=1000)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--radius", type=positive_int, default=100, help="Sample pairs in this max-norm ball.")
    demo.add_argument("--contracting", action="store_true", help="Use a provider that breaks its declared moduli.")
    demo.add_argument("--jobs", type=positive_int, default=None)
    demo.add_argument("--plot", type=Path, default=None, help="Write a PNG of distance against t.")
    demo.set_defaults(handler=glue_demo_command)


def plot_report(report: GlueReport, path: Path) -> None:
    frame = pd.DataFrame(
        {
            "t": [float(pair.norm) for pair in report.pairs],
            "distance": [float(pair.distance) for pair in report.pairs],
            "lower": [float(pair.lower) for pair in report.pairs],
            "upper": [float(pair.upper) for pair in report.pairs],
        }
    ).sort_values("t")

    fig, ax = plt.subplots()
    ax.scatter(frame["t"], frame["distance"], s=4, label="d(F(x), F(y))")
    ax.plot(frame["t"], frame["lower"], color="tab:green", label="lower bound")
    ax.plot(frame["t"], frame["upper"], color="tab:red", label="upper bound")
    ax.set_xlabel("‖x − y‖")
    ax.set_ylabel("distance")
    ax.legend()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info("Wrote plot to %s", path)


def glue_demo_command(args: argparse.Namespace) -> GlueDemoResponse:
    ladder, report = get_gluing_service().demo(
        args.dimension,
        args.ladder_length,
        args.samples,
        args.seed,
        radius=args.radius,
        contracting=args.contracting,
        jobs=args.jobs,
    )
    if args.plot is not None:
        plot_report(report, args.plot)
    return GlueDemoResponse.from_report(args.dimension, list(ladder.radii), ladder.coverage, report)
