from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path
from typing import Callable, Iterable

from pydantic import ValidationError

from interlace.config import Settings
from interlace.errors import DomainError
from interlace.models import (
    Bunch,
    BunchCheck,
    DistanceTable,
    FinSet,
    FinTree,
    Modulus,
    OrdinalCNF,
    RationalLike,
    SchreierPoint,
    Vine,
    as_rational,
)
from interlace.schemas import TreeFile, VineFile
from interlace.services.schreier_service import d_inf, schreier_enumerate

logger = logging.getLogger(__name__)


def tree_derivative(tree: FinTree) -> FinTree:
    """Drop the maximal nodes: keep exactly the nodes with an extension."""
    return FinTree(frozenset(node[:-1] for node in tree.nodes if node))


def tree_rank(tree: FinTree) -> int:
    rank = 0
    while tree.nodes:
        derived = tree_derivative(tree)
        assert len(derived) < len(tree), "derivation did not shrink the tree"
        tree = derived
        rank += 1
    return rank


def schreier_tree(alpha: OrdinalCNF, n: int, cap: int) -> FinTree:
    """Increasing sequences with entries <= N whose sets lie in S_alpha."""
    return FinTree(frozenset(subset.elements for subset in schreier_enumerate(alpha, n, cap)))


def _sup_distance(first: tuple[Fraction, ...], second: tuple[Fraction, ...]) -> Fraction:
    return max((abs(a - b) for a, b in zip(first, second)), default=Fraction(0))


Bound = Callable[[Fraction], Fraction]


def _check_pairs(bunch: Bunch, dist: DistanceTable, lower: Bound, upper: Bound) -> BunchCheck:
    for (f, x_f), (g, x_g) in combinations(bunch.values, 2):
        gap = _sup_distance(f, g)
        observed = dist(x_f, x_g)
        if not lower(gap) <= observed <= upper(gap):
            logger.debug("Bunch over %s fails at %s, %s: d = %s", bunch.ground, f, g, observed)
            return BunchCheck(False, (f, g, observed))
    return BunchCheck(True)


def bunch_check_lipschitz(bunch: Bunch, dist: DistanceTable, c: RationalLike) -> BunchCheck:
    """(1/C)·‖f−g‖ <= d(x_f, x_g) <= C·‖f−g‖ for every pair of functions."""
    c = as_rational(c)
    if c < 1:
        raise DomainError("INVALID_ARGUMENT", f"C must be at least 1, got {c}")
    return _check_pairs(bunch, dist, lambda t: t / c, lambda t: c * t)


def bunch_check_coarse(bunch: Bunch, dist: DistanceTable, rho: Modulus, omega: Modulus) -> BunchCheck:
    return _check_pairs(bunch, dist, rho, omega)


def bunch_restrict(bunch: Bunch, length: int) -> Bunch:
    """Restriction to the initial segment of the ground set with ``length`` elements."""
    if not 0 <= length <= len(bunch.ground):
        raise DomainError("INVALID_ARGUMENT", f"no initial segment of length {length} in {bunch.ground}")
    padding = (Fraction(0),) * (len(bunch.ground) - length)
    lookup = bunch.value_map()
    values = tuple(
        (key, lookup[key + padding]) for key in product(bunch.alphabet, repeat=length)
    )
    return Bunch(FinSet(bunch.ground.elements[:length]), bunch.alphabet, values)


def project(bunch: Bunch) -> Bunch:
    """Forget the largest ground element."""
    if not bunch.ground:
        raise DomainError("INVALID_ARGUMENT", "a bunch over the empty set has no projection")
    return bunch_restrict(bunch, len(bunch.ground) - 1)


def precedes(lower: Bunch, upper: Bunch) -> bool:
    size = len(lower.ground)
    return (
        lower.alphabet == upper.alphabet
        and lower.ground.elements == upper.ground.elements[:size]
        and bunch_restrict(upper, size) == lower
    )


def check_vine(bunches: Iterable[Bunch]) -> Vine:
    vine = Vine(frozenset(bunches))
    alphabets = {bunch.alphabet for bunch in vine.bunches}
    if len(alphabets) > 1:
        raise DomainError(
            "NOT_A_VINE",
            "bunches use different alphabets",
            witness=[[str(letter) for letter in alphabet] for alphabet in sorted(alphabets)],
        )
    for bunch in vine.bunches:
        if bunch.ground and project(bunch) not in vine.bunches:
            raise DomainError(
                "NOT_A_VINE",
                f"the restriction of the bunch over {bunch.ground} to its initial segments is missing",
                witness=str(bunch.ground),
            )
    return vine


def is_vine(bunches: Iterable[Bunch]) -> bool:
    try:
        check_vine(bunches)
    except DomainError:
        return False
    return True


def vine_derivative(vine: Vine) -> Vine:
    vine = check_vine(vine.bunches)
    return Vine(frozenset(project(bunch) for bunch in vine.bunches if bunch.ground))


def vine_rank(vine: Vine) -> int:
    rank = 0
    while vine.bunches:
        vine = vine_derivative(vine)
        rank += 1
    return rank


def _encode(key: tuple[Fraction, ...]) -> str:
    return ",".join(str(value) for value in key)


def chain_vine(ground: FinSet, alphabet: Iterable[RationalLike] = (0, 1)) -> Vine:
    """Bunches over every initial segment of ``ground``, values named after the full function."""
    letters = tuple(sorted({as_rational(letter) for letter in alphabet}))
    size = len(ground)
    top = Bunch(
        ground,
        letters,
        tuple((key, f"x[{_encode(key)}]") for key in product(letters, repeat=size)),
    )
    return Vine(frozenset(bunch_restrict(top, length) for length in range(size + 1)))


def schreier_vine(alpha: OrdinalCNF, n: int, m: int, cap: int) -> tuple[Vine, DistanceTable]:
    """Bunches x_f = f over every G in S_alpha on {1..N}, alphabet Z ∩ [-m, m], with d_inf distances."""
    letters = tuple(Fraction(value) for value in range(-m, m + 1))
    bunches = []
    entries: dict[tuple[str, str], Fraction] = {}
    for support in schreier_enumerate(alpha, n, cap):
        points = {
            key: SchreierPoint(tuple(zip(support, key)))
            for key in product(letters, repeat=len(support))
        }
        values = tuple((key, f"e[{point.label()}]") for key, point in points.items())
        bunches.append(Bunch(support, letters, values))
        for (_, first), (_, second) in combinations(points.items(), 2):
            entries[(f"e[{first.label()}]", f"e[{second.label()}]")] = d_inf(first, second)
        if len(entries) > cap:
            raise DomainError("BUDGET_EXCEEDED", f"more than {cap} distances")
    logger.info("Schreier vine for %s on {1..%d}: %d bunches", alpha, n, len(bunches))
    return check_vine(bunches), DistanceTable(entries)


class IndicesService:
    """Tree and vine files, derivations and ranks."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def load_tree(self, path: Path) -> FinTree:
        try:
            return TreeFile.model_validate_json(Path(path).read_text(encoding="utf-8")).to_tree()
        except ValidationError as exc:
            raise DomainError("INVALID_INPUT", str(exc)) from exc
        except OSError as exc:
            raise DomainError("INVALID_INPUT", f"cannot read {path}: {exc}") from exc

    def load_vine(self, path: Path) -> Vine:
        try:
            payload = VineFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise DomainError("INVALID_INPUT", str(exc)) from exc
        except OSError as exc:
            raise DomainError("INVALID_INPUT", f"cannot read {path}: {exc}") from exc
        return check_vine(bunch.to_bunch() for bunch in payload.bunches)

    def tree_rank(self, tree: FinTree) -> int:
        return tree_rank(tree)

    def vine_rank(self, vine: Vine) -> int:
        return vine_rank(vine)

    def schreier_tree(self, alpha: OrdinalCNF, n: int) -> FinTree:
        return schreier_tree(alpha, n, self.settings.enumeration_cap)

    def schreier_vine(self, alpha: OrdinalCNF, n: int, m: int) -> tuple[Vine, DistanceTable]:
        return schreier_vine(alpha, n, m, self.settings.enumeration_cap)

