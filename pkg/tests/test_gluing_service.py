from __future__ import annotations

from fractions import Fraction

import pytest

from interlace.config import get_settings
from interlace.errors import DomainError
from interlace.models import FinSet, GrowthFunction, IndexFunction, LinearModulus, RadiiLadder, StepModulus
from interlace.services.gluing_service import (
    BallEmbeddingProvider,
    ContractingProvider,
    GluingService,
    IdentityProvider,
    active_window,
    bump,
    choose_radii,
    glue,
    glued_distance,
    growth_majorant,
    index_minorant,
    j_inv,
    j_of,
    k_inv,
    k_of,
    omega_from_growth_function,
    rho_from_index_function,
    sample_ball,
    verify_glue,
)

LIMIT = 10**15


@pytest.fixture
def identity_ladder() -> RadiiLadder:
    return choose_radii(LinearModulus(), LinearModulus(), 20, LIMIT)


def _random_index_prefix(rng, length: int) -> IndexFunction:
    steps = rng.integers(0, 2, size=length - 1)
    values = [0]
    for step in steps:
        values.append(values[-1] + int(step))
    return IndexFunction(tuple(values))


@pytest.mark.parametrize(
    ("rho", "expected"),
    [
        (LinearModulus(), (0, 1, 3, 7, 15)),
        (LinearModulus(slope=Fraction(1, 2)), (0, 1, 5, 21, 85)),
    ],
)
def test_choose_radii_is_greedy_minimal(rho, expected):
    assert choose_radii(rho, LinearModulus(), len(expected), LIMIT).radii == expected


def test_choose_radii_rejects_bounded_compression():
    with pytest.raises(DomainError) as info:
        choose_radii(StepModulus(((Fraction(1), Fraction(1)),)), LinearModulus(), 3, LIMIT)
    assert info.value.code == "RHO_BOUNDED"
    assert info.value.witness == [0, 1]


def test_choose_radii_stops_at_the_search_limit():
    slow = LinearModulus(slope=Fraction(1, 10**6))
    with pytest.raises(DomainError) as info:
        choose_radii(slow, LinearModulus(), 6, 10**6)
    assert info.value.code == "RHO_BOUNDED"


def test_ladder_reads_negative_indices_as_zero(identity_ladder):
    assert identity_ladder.radius(-3) == 0
    with pytest.raises(DomainError) as info:
        identity_ladder.radius(20)
    assert info.value.code == "LADDER_TOO_SHORT"
    assert identity_ladder.coverage == 2**16 - 1


@pytest.mark.parametrize(
    ("t", "expected"),
    [
        (Fraction(0), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1), Fraction(1)),
        (Fraction(7), Fraction(1)),
        (Fraction(11), Fraction(1, 2)),
        (Fraction(15), Fraction(0)),
        (Fraction(16), Fraction(0)),
    ],
)
def test_bump_shape(identity_ladder, t, expected):
    # n = 4: support (r_0, r_4) = (0, 15), plateau [r_1, r_3] = [1, 7]
    assert bump(4, identity_ladder, t) == expected


def test_first_bumps_are_one_at_the_origin(identity_ladder):
    assert bump(1, identity_ladder, 0) == 1
    assert bump(2, identity_ladder, 0) == 1


def test_bumps_cover_every_norm(identity_ladder):
    for t in [Fraction(n, 3) for n in range(0, 3000)]:
        windows = [4 * active_window(identity_ladder, i, t) + i for i in range(4)]
        assert max(bump(index, identity_ladder, t) for index in windows) == 1


def test_active_window_past_the_ladder(identity_ladder):
    with pytest.raises(DomainError) as info:
        active_window(identity_ladder, 3, Fraction(identity_ladder.radii[-1]))
    assert info.value.code == "LADDER_TOO_SHORT"


def test_glue_sends_origin_to_base_point(identity_ladder):
    provider = IdentityProvider(3)
    assert glue(provider, identity_ladder, provider.base_point) == (provider.base_point,) * 4


def test_glue_equal_points_have_distance_zero(identity_ladder):
    provider = IdentityProvider(2)
    x = (Fraction(3), Fraction(-5, 2))
    image = glue(provider, identity_ladder, x)
    assert glued_distance(provider, image, image) == 0
    report = verify_glue(provider, identity_ladder, [(x, x)])
    assert report.passed


def test_identity_provider_meets_the_sandwich(rng, identity_ladder):
    provider = IdentityProvider(3)
    samples = [(sample_ball(rng, 3, 100), sample_ball(rng, 3, 100)) for _ in range(10_000)]
    report = verify_glue(provider, identity_ladder, samples)
    assert report.passed
    assert len(report.pairs) == 10_000


def test_contracting_provider_breaks_the_lower_bound(rng, identity_ladder):
    provider = ContractingProvider(3)
    samples = [(sample_ball(rng, 3, 100), sample_ball(rng, 3, 100)) for _ in range(200)]
    report = verify_glue(provider, identity_ladder, samples)
    assert not report.passed
    assert all(pair.distance < pair.lower for pair in report.violations)


def test_identity_provider_refuses_points_outside_the_ball():
    with pytest.raises(DomainError) as info:
        IdentityProvider(1).embed(3, (Fraction(4),))
    assert info.value.code == "OUTSIDE_BALL"


def test_sample_ball_stays_on_the_grid(rng):
    for _ in range(100):
        point = sample_ball(rng, 4, 10)
        assert len(point) == 4
        assert all(abs(c) <= 10 and (4 * c).denominator == 1 for c in point)


def test_j_examples():
    f = IndexFunction((0, 0, 1, 1, 2))
    assert j_of(f) == FinSet((2, 4))
    assert [j_inv(FinSet((2, 4)), n) for n in range(1, 6)] == [0, 0, 1, 1, 2]


def test_j_round_trip_and_monotonicity(rng):
    for _ in range(1000):
        length = int(rng.integers(1, 51))
        f = _random_index_prefix(rng, length)
        jumps = j_of(f)
        assert all(j_inv(jumps, n) == f(n) for n in range(1, length + 1))

        other = _random_index_prefix(rng, length)
        bigger = jumps.union(j_of(other))
        assert all(j_inv(jumps, n) <= j_inv(bigger, n) for n in range(1, length + 1))


def test_k_round_trip():
    g = GrowthFunction((0, 2, 3, 7))
    assert k_of(g) == FinSet((2, 3, 7))
    assert [k_inv(k_of(g), n) for n in range(4)] == [0, 2, 3, 7]
    with pytest.raises(DomainError) as info:
        k_inv(k_of(g), 4)
    assert info.value.code == "OUT_OF_WINDOW"


def test_function_classes_validate_prefixes():
    with pytest.raises(DomainError):
        IndexFunction((0, 2))
    with pytest.raises(DomainError):
        IndexFunction((1, 1))
    with pytest.raises(DomainError):
        GrowthFunction((0, 1, 1))


def test_rho_from_index_function():
    rho = rho_from_index_function(IndexFunction((0, 0, 1, 1, 2)))
    assert [rho(t) for t in (0, Fraction(1, 2), 1, 3, Fraction(7, 2), 5, 100)] == [0, 0, 0, 1, 1, 2, 2]


def test_omega_from_growth_function_is_a_majorant():
    g = GrowthFunction((0, 2, 3, 7))
    omega = omega_from_growth_function(g)
    assert omega(0) == 0
    for n in range(1, 3):
        for t in (Fraction(2 * n - 1, 2), Fraction(n)):
            assert omega(t) >= g(n)


def test_index_minorant_and_growth_majorant():
    rho = LinearModulus(slope=Fraction(1, 2))
    f = index_minorant(rho, 12)
    assert all(f(n) <= rho(n) for n in range(1, 13))
    assert f(12) == 6

    omega = LinearModulus(slope=3)
    g = growth_majorant(omega, 6)
    assert g.prefix == (0, 3, 6, 9, 12, 15, 18)
    assert growth_majorant(LinearModulus(slope=Fraction(1, 3)), 3).prefix == (0, 1, 2, 3)


def test_service_demo():
    service = GluingService(get_settings())
    ladder, report = service.demo(3, 20, 200, seed=5, radius=100)
    assert len(ladder) == 20
    assert report.passed
    _, broken = service.demo(3, 20, 200, seed=5, radius=100, contracting=True)
    assert not broken.passed


def test_service_demo_needs_enough_radii():
    service = GluingService(get_settings())
    with pytest.raises(DomainError) as info:
        service.demo(3, 4, 10, seed=0)
    assert info.value.code == "LADDER_TOO_SHORT"
    with pytest.raises(DomainError) as info:
        service.demo(3, 6, 10, seed=0, radius=1000)
    assert info.value.code == "LADDER_TOO_SHORT"


def test_provider_interface_methods_must_be_overridden():
    with pytest.raises(TypeError):
        BallEmbeddingProvider()

    point = (Fraction(1),)
    provider = IdentityProvider(1)
    for method, args in [("gap", (point, point)), ("distance", (point, point)), ("norm", (point,))]:
        with pytest.raises(NotImplementedError):
            getattr(BallEmbeddingProvider, method)(provider, *args)
