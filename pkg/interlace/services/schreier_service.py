from __future__ import annotations

import logging
import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Optional, Sequence

from interlace.config import Settings
from interlace.errors import DomainError
from interlace.models import FinSet, OrdinalCNF, SchreierPoint
from interlace.services.interlacing_service import spread

logger = logging.getLogger(__name__)

_TERM = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def ordinal_parse(text: str) -> OrdinalCNF:
    """Parse ``w^E*C + ... + C0``, summing left to right."""
    pieces = [piece.strip() for piece in text.replace(" ", "").split("+")]
    if not text.strip() or any(not piece for piece in pieces):
        raise DomainError("PARSE_ERROR", f"empty term in {text!r}")

    terms: list[tuple[int, int]] = []
    for piece in pieces:
        match = _TERM.match(piece)
        if match is None:
            raise DomainError("PARSE_ERROR", f"cannot read term {piece!r} of {text!r}")
        exponent, coefficient, finite = match.groups()
        if finite is not None:
            terms.append((0, int(finite)))
        else:
            terms.append((int(exponent or 1), int(coefficient or 1)))

    result = OrdinalCNF()
    for exponent, coefficient in terms:
        result = result + OrdinalCNF.omega_power(exponent, coefficient)

    written = [term for term in terms if term[1] > 0]
    in_order = all(left[0] > right[0] for left, right in zip(written, written[1:]))
    canonical = in_order and (len(written) == len(terms) or terms == [(0, 0)])
    if not canonical:
        logger.warning("Normalized non-canonical ordinal %r to %s", text, result)
    return result


def ordinal_cmp(first: OrdinalCNF, second: OrdinalCNF) -> int:
    return (first > second) - (first < second)


def is_limit(alpha: OrdinalCNF) -> bool:
    return alpha.is_limit


def fundamental_seq(alpha: OrdinalCNF, n: int) -> OrdinalCNF:
    """gamma + w^(k+1) maps to gamma + w^k * n."""
    if not alpha.is_limit:
        raise DomainError("NOT_LIMIT", f"{alpha} is not a limit ordinal")
    if n < 1:
        raise DomainError("INVALID_ARGUMENT", f"fundamental sequences are indexed from 1, got {n}")
    exponent, coefficient = alpha.terms[-1]
    head = alpha.terms[:-1] + (((exponent, coefficient - 1),) if coefficient > 1 else ())
    return OrdinalCNF(head) + OrdinalCNF.omega_power(exponent - 1, n)


@lru_cache(maxsize=None)
def _block_split(elements: tuple[int, ...], predecessor: OrdinalCNF) -> Optional[tuple[tuple[int, ...], ...]]:
    """Fewest consecutive nonempty blocks of ``elements`` that all lie in S_predecessor."""
    best: list[Optional[tuple[tuple[int, ...], ...]]] = [()] + [None] * len(elements)
    for end in range(1, len(elements) + 1):
        for start in range(end):
            prior = best[start]
            block = elements[start:end]
            if prior is None or not schreier_member(FinSet(block), predecessor):
                continue
            if best[end] is None or len(prior) + 1 < len(best[end]):
                best[end] = prior + (block,)
    return best[-1]


@lru_cache(maxsize=None)
def schreier_member(subset: FinSet, alpha: OrdinalCNF) -> bool:
    # the empty set belongs to every family
    if not subset:
        return True
    if alpha.is_zero:
        return len(subset) == 1
    if alpha.is_successor:
        blocks = _block_split(subset.elements, alpha.predecessor())
        return blocks is not None and len(blocks) <= subset.minimum
    return any(schreier_member(subset, fundamental_seq(alpha, n)) for n in range(1, subset.minimum + 1))


def schreier_decompose(subset: FinSet, alpha: OrdinalCNF) -> Optional[list[str]]:
    """A readable membership witness, or None for non-members."""
    if not schreier_member(subset, alpha):
        return None
    if not subset or alpha.is_zero:
        return [str(subset)] if subset else []
    if alpha.is_successor:
        blocks = _block_split(subset.elements, alpha.predecessor())
        return [",".join(str(x) for x in block) for block in blocks]
    for n in range(1, subset.minimum + 1):
        branch = fundamental_seq(alpha, n)
        if schreier_member(subset, branch):
            return [f"{alpha}[{n}]={branch}"] + schreier_decompose(subset, branch)
    raise AssertionError(f"{subset} accepted for {alpha} without a witness")


def _increasing_tuples(top: int) -> Iterator[tuple[int, ...]]:
    # lexicographic order: (), (1,), (1, 2), (1, 2, 3), ..., (2,), ...
    stack: list[tuple[int, ...]] = [()]
    while stack:
        current = stack.pop()
        yield current
        start = current[-1] + 1 if current else 1
        stack.extend((current + (value,)) for value in range(top, start - 1, -1))


def iter_schreier_sets(alpha: OrdinalCNF, n: int) -> Iterator[FinSet]:
    for elements in _increasing_tuples(n):
        subset = FinSet(elements)
        if schreier_member(subset, alpha):
            yield subset


def schreier_enumerate(alpha: OrdinalCNF, n: int, cap: int) -> list[FinSet]:
    if n < 1:
        raise DomainError("INVALID_ARGUMENT", "N must be at least 1")
    found: list[FinSet] = []
    for subset in iter_schreier_sets(alpha, n):
        found.append(subset)
        if len(found) > cap:
            raise DomainError("BUDGET_EXCEEDED", f"more than {cap} sets in S_{alpha} on {{1..{n}}}")
    logger.info("S_%s on {1..%d} has %d sets", alpha, n, len(found))
    return found


def _require_order(alpha: OrdinalCNF, beta: OrdinalCNF) -> None:
    if not alpha < beta:
        raise DomainError("ORDINAL_ORDER", f"spreading needs alpha < beta, got {alpha} and {beta}")


def spreading_check(mapping: Sequence[int], alpha: OrdinalCNF, beta: OrdinalCNF, n: int, cap: int) -> bool:
    """Every A in S_alpha on {1..N} is carried by L into S_beta."""
    _require_order(alpha, beta)
    if len(mapping) < n:
        raise DomainError("MAP_TOO_SHORT", f"L has {len(mapping)} entries, need {n}")
    return all(
        schreier_member(spread(subset, mapping), beta) for subset in schreier_enumerate(alpha, n, cap)
    )


def spreading_search(alpha: OrdinalCNF, beta: OrdinalCNF, n: int, element_bound: int, cap: int) -> list[int]:
    """Greedy smallest-next choice of l_1 < l_2 < ... < l_N."""
    _require_order(alpha, beta)
    mapping: list[int] = []
    for position in range(1, n + 1):
        ending_here = [
            subset
            for subset in schreier_enumerate(alpha, position, cap)
            if subset and subset.maximum == position
        ]
        candidate = mapping[-1] + 1 if mapping else 1
        while not all(schreier_member(spread(subset, mapping + [candidate]), beta) for subset in ending_here):
            candidate += 1
            if candidate > element_bound:
                raise DomainError(
                    "SEARCH_EXHAUSTED",
                    f"no l_{position} <= {element_bound} spreads S_{alpha} into S_{beta}",
                    witness=mapping,
                )
        mapping.append(candidate)
        logger.debug("l_%d = %d", position, candidate)
    assert spreading_check(mapping, alpha, beta, n, cap), f"search returned a failing map {mapping}"
    return mapping


def d_inf(first: SchreierPoint, second: SchreierPoint) -> Fraction:
    indices = first.support.union(second.support)
    return max((abs(first.value(i) - second.value(i)) for i in indices), default=Fraction(0))


def schreier_points(alpha: OrdinalCNF, n: int, m: int, cap: int) -> list[SchreierPoint]:
    """Points with support in S_alpha on {1..N} and coefficients in [-m, m] minus 0."""
    if m < 1:
        raise DomainError("INVALID_ARGUMENT", "m must be at least 1")
    letters = [value for value in range(-m, m + 1) if value != 0]
    points: list[SchreierPoint] = []
    for support in schreier_enumerate(alpha, n, cap):
        for coefficients in product(letters, repeat=len(support)):
            points.append(SchreierPoint(tuple(zip(support, (Fraction(c) for c in coefficients)))))
            if len(points) > cap:
                raise DomainError("BUDGET_EXCEEDED", f"more than {cap} points")
    return points


def schreier_point_parse(text: str) -> SchreierPoint:
    """Read ``"2:1,3:-1"``; the empty string is the zero point."""
    if not text.strip():
        return SchreierPoint()
    try:
        pairs = [part.split(":") for part in text.split(",")]
        return SchreierPoint(tuple((int(index), Fraction(value)) for index, value in pairs))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError("PARSE_ERROR", f"cannot read point {text!r}") from exc


def schreier_point_format(point: SchreierPoint) -> str:
    return point.label()


class SchreierService:
    """Schreier families, spreading maps and Schreier point spaces."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def member(self, subset: FinSet, alpha: OrdinalCNF) -> tuple[bool, Optional[list[str]]]:
        witness = schreier_decompose(subset, alpha)
        return witness is not None, witness

    def enumerate(self, alpha: OrdinalCNF, n: int) -> list[FinSet]:
        return schreier_enumerate(alpha, n, self.settings.enumeration_cap)

    def spread_check(self, mapping: Sequence[int], alpha: OrdinalCNF, beta: OrdinalCNF, n: int) -> bool:
        return spreading_check(mapping, alpha, beta, n, self.settings.enumeration_cap)

    def spread_search(self, alpha: OrdinalCNF, beta: OrdinalCNF, n: int) -> list[int]:
        return spreading_search(alpha, beta, n, self.settings.search_element_bound, self.settings.enumeration_cap)

    def points(self, alpha: OrdinalCNF, n: int, m: int) -> list[SchreierPoint]:
        return schreier_points(alpha, n, m, self.settings.enumeration_cap)

    def diameter(self, points: Sequence[SchreierPoint]) -> Fraction:
        return max((d_inf(first, second) for first, second in combinations(points, 2)), default=Fraction(0))
