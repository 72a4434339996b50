from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import pytest

from interlace.config import get_settings
from interlace.errors import DomainError
from interlace.models import FinSet, OrdinalCNF, SchreierPoint
from interlace.services.interlacing_service import all_subsets
from interlace.services.schreier_service import (
    SchreierService,
    d_inf,
    fundamental_seq,
    is_limit,
    ordinal_cmp,
    ordinal_parse,
    schreier_decompose,
    schreier_enumerate,
    schreier_member,
    schreier_point_format,
    schreier_point_parse,
    schreier_points,
    spreading_check,
    spreading_search,
)

CAP = 100_000

ORDINALS = ["0", "1", "2", "3", "w", "w+1", "w*2", "w^2"]


def fs(text: str) -> FinSet:
    return FinSet.parse(text)


@lru_cache(maxsize=None)
def brute_member(elements: tuple[int, ...], alpha: OrdinalCNF) -> bool:
    """Unfold the recursive definition by trying every split into consecutive blocks."""
    if not elements:
        return True
    if alpha.is_zero:
        return len(elements) == 1
    if alpha.is_limit:
        return any(brute_member(elements, fundamental_seq(alpha, n)) for n in range(1, elements[0] + 1))
    predecessor = alpha.predecessor()

    def splits(rest: tuple[int, ...], budget: int) -> bool:
        if not rest:
            return True
        if budget == 0:
            return False
        return any(
            brute_member(rest[:cut], predecessor) and splits(rest[cut:], budget - 1)
            for cut in range(1, len(rest) + 1)
        )

    return splits(elements, elements[0])


@pytest.mark.parametrize(
    ("text", "terms", "limit"),
    [
        ("w*2+3", ((1, 2), (0, 3)), False),
        ("w^2*3+w+1", ((2, 3), (1, 1), (0, 1)), False),
        ("w^3", ((3, 1),), True),
        ("w", ((1, 1),), True),
        ("0", (), False),
        ("7", ((0, 7),), False),
    ],
)
def test_ordinal_parse(text, terms, limit):
    alpha = ordinal_parse(text)
    assert alpha.terms == terms
    assert is_limit(alpha) is limit
    assert str(alpha) == text


def test_ordinal_parse_normalizes_with_a_warning(caplog):
    with caplog.at_level(logging.WARNING):
        alpha = ordinal_parse("3+w")
    assert alpha == OrdinalCNF.omega_power(1)
    assert "non-canonical" in caplog.text


@pytest.mark.parametrize("text", ["", "w^", "x", "w+", "2*w"])
def test_ordinal_parse_rejects_garbage(text):
    with pytest.raises(DomainError) as info:
        ordinal_parse(text)
    assert info.value.code == "PARSE_ERROR"


def test_ordinal_ordering():
    ordered = [ordinal_parse(text) for text in ["0", "1", "5", "w", "w+1", "w*2", "w^2", "w^2+w*7"]]
    for smaller, larger in combinations(ordered, 2):
        assert ordinal_cmp(smaller, larger) == -1
        assert ordinal_cmp(larger, smaller) == 1
    assert ordinal_cmp(ordered[3], ordinal_parse("w")) == 0


@pytest.mark.parametrize(
    ("alpha", "n", "expected"),
    [("w", 4, "4"), ("w^2", 3, "w*3"), ("w*2", 2, "w+2"), ("w^2+w", 5, "w^2+5"), ("w^3*2", 1, "w^3+w^2")],
)
def test_fundamental_sequences(alpha, n, expected):
    assert str(fundamental_seq(ordinal_parse(alpha), n)) == expected


def test_fundamental_sequence_needs_a_limit():
    with pytest.raises(DomainError) as info:
        fundamental_seq(ordinal_parse("w+1"), 2)
    assert info.value.code == "NOT_LIMIT"


@pytest.mark.parametrize(
    ("subset", "alpha", "expected"),
    [
        ("2,3", "1", True),
        ("1,2", "1", False),
        ("2,3,4,5", "2", True),
        ("3,4,5", "w", True),
        ("1,2", "w", False),
        ("", "0", True),
        ("4", "0", True),
        ("4,5", "0", False),
    ],
)
def test_schreier_member_examples(subset, alpha, expected):
    assert schreier_member(fs(subset), ordinal_parse(alpha)) is expected


@pytest.mark.parametrize("alpha", ORDINALS)
def test_singletons_belong_to_every_family(alpha):
    for n in range(1, 20):
        assert schreier_member(FinSet((n,)), ordinal_parse(alpha))


@pytest.mark.parametrize("alpha", ORDINALS)
def test_membership_matches_unfolded_definition(alpha):
    ordinal = ordinal_parse(alpha)
    for subset in all_subsets(8):
        assert schreier_member(subset, ordinal) == brute_member(subset.elements, ordinal)


@pytest.mark.parametrize("alpha", ORDINALS)
def test_enumeration_matches_membership(alpha):
    ordinal = ordinal_parse(alpha)
    listed = set(schreier_enumerate(ordinal, 8, CAP))
    assert listed == {subset for subset in all_subsets(8) if schreier_member(subset, ordinal)}


@pytest.mark.parametrize("alpha", ORDINALS)
def test_families_are_hereditary_and_spreading(alpha):
    ordinal = ordinal_parse(alpha)
    universe = all_subsets(8)
    for member in schreier_enumerate(ordinal, 8, CAP):
        for other in universe:
            spread_of_member = len(other) == len(member) and all(a <= b for a, b in zip(member, other))
            if other.issubset(member) or spread_of_member:
                assert schreier_member(other, ordinal), (str(member), str(other))


def test_enumeration_examples():
    assert [str(s) for s in schreier_enumerate(OrdinalCNF(), 3, CAP)] == ["", "1", "2", "3"]
    assert {str(s) for s in schreier_enumerate(OrdinalCNF.finite(1), 3, CAP)} == {"", "1", "2", "3", "2,3"}
    assert len(schreier_enumerate(OrdinalCNF.finite(1), 5, CAP)) == 13


def test_enumeration_respects_the_cap():
    with pytest.raises(DomainError) as info:
        schreier_enumerate(ordinal_parse("w"), 8, 10)
    assert info.value.code == "BUDGET_EXCEEDED"


def test_decompose_gives_blocks_and_branches():
    assert schreier_decompose(fs("2,3,4,5"), ordinal_parse("2")) == ["2", "3,4,5"]
    witness = schreier_decompose(fs("3,4,5"), ordinal_parse("w"))
    assert witness[0].startswith("w[")
    assert schreier_decompose(fs("1,2"), ordinal_parse("1")) is None


def test_spreading_identity_and_search():
    one, two = OrdinalCNF.finite(1), OrdinalCNF.finite(2)
    assert spreading_check([1, 2, 3], one, two, 3, CAP)
    assert spreading_search(one, two, 3, 64, CAP) == [1, 2, 3]
    assert spreading_search(OrdinalCNF(), ordinal_parse("w"), 1, 64, CAP) == [1]


def test_identity_does_not_carry_three_into_omega():
    assert not spreading_check(list(range(1, 9)), OrdinalCNF.finite(3), ordinal_parse("w"), 8, CAP)


def test_spreading_requires_increasing_ordinals():
    with pytest.raises(DomainError) as info:
        spreading_check([1, 2, 3], OrdinalCNF.finite(2), OrdinalCNF.finite(2), 3, CAP)
    assert info.value.code == "ORDINAL_ORDER"


def test_d_inf():
    first = SchreierPoint(((2, Fraction(2)),))
    second = SchreierPoint(((3, Fraction(-1)),))
    assert d_inf(first, first) == 0
    assert d_inf(first, second) == 2


@pytest.mark.parametrize("alpha", [0, 1])
def test_d_inf_is_a_metric_on_point_sets(alpha):
    points = schreier_points(OrdinalCNF.finite(alpha), 3, 1, CAP)
    for f in points:
        for g in points:
            assert (d_inf(f, g) == 0) == (f == g)
            assert d_inf(f, g) == d_inf(g, f)
            for h in points:
                assert d_inf(f, h) <= d_inf(f, g) + d_inf(g, h)


def test_schreier_points_counts():
    points = schreier_points(OrdinalCNF(), 2, 1, CAP)
    assert len(points) == 5
    assert len([point for point in points if point.coeffs]) == 4
    supports = {point.support for point in schreier_points(OrdinalCNF.finite(1), 4, 2, CAP)}
    assert all(schreier_member(support, OrdinalCNF.finite(1)) for support in supports)


def test_point_text_form():
    point = schreier_point_parse("2:1,3:-1")
    assert point.value(3) == -1
    assert schreier_point_format(point) == "2:1,3:-1"
    assert schreier_point_parse("") == SchreierPoint()
    with pytest.raises(DomainError):
        schreier_point_parse("2-1")


def test_service_member_and_diameter(small_budgets):
    service = SchreierService(get_settings())
    member, witness = service.member(fs("2,3,4,5"), OrdinalCNF.finite(2))
    assert member and witness == ["2", "3,4,5"]
    assert service.diameter(service.points(OrdinalCNF(), 3, 1)) == 2
