import math
from fractions import Fraction

import numpy as np
import pytest

from seqheight.algebra import normalize
from seqheight.equidist import (
    CloudPoint,
    chordal_distance,
    cloud_rows,
    empirical_pairing,
    equidistribution_report,
    preimage_cloud,
    preimages_one_step,
    roundtrip_residual,
)
from seqheight.errors import EnumerationTooLarge
from seqheight.green import constant_one, sphere_height
from seqheight.heights import canonical_height
from seqheight.morphisms import Constant, PeriodicWord, perturbed_power_map, power_map

SQ = power_map(1, 2, "sq")
PSQ = perturbed_power_map(1, 2, "psq")


def test_one_step_square_roots_of_unity():
    pts = preimages_one_step(SQ, 1)
    got = sorted((p.z for p in pts), key=lambda z: z.real)
    assert got[0] == pytest.approx(-1.0, abs=1e-12)
    assert got[1] == pytest.approx(1.0, abs=1e-12)
    assert all(p.multiplicity == 1 and not p.at_infinity for p in pts)


def test_one_step_infinity_is_double_under_squaring():
    (p,) = preimages_one_step(SQ, None)
    assert p.at_infinity and p.multiplicity == 2


def test_one_step_perturbed_sends_one_to_infinity_doubly():
    # x0^2 + x1^2 = x1^2 forces x0 = 0 with multiplicity two
    (p,) = preimages_one_step(PSQ, 1)
    assert p.at_infinity and p.multiplicity == 2


def test_one_step_double_root_at_origin():
    (p,) = preimages_one_step(SQ, 0)
    assert p.z == 0 and p.multiplicity == 2 and not p.at_infinity


def test_depth_three_squaring_cloud_is_eighth_roots():
    cloud = preimage_cloud(Constant(SQ), 2, 3)
    assert cloud.total == 8
    assert len(cloud.points) == 8
    r = 2.0 ** (1.0 / 8.0)
    eighth = sorted(
        (r * np.exp(2j * np.pi * k / 8) for k in range(8)),
        key=lambda z: (round(z.real, 9), round(z.imag, 9)),
    )
    got = sorted(
        (p.z for p in cloud.points),
        key=lambda z: (round(z.real, 9), round(z.imag, 9)),
    )
    for a, b in zip(got, eighth):
        assert a == pytest.approx(b, abs=1e-12)


def test_mixed_word_depth_two_cloud():
    spec = PeriodicWord((SQ, PSQ), (0, 1))
    target = normalize([17, 16])
    cloud = preimage_cloud(spec, target, 2)
    zs = sorted(
        (p.z for p in cloud.points),
        key=lambda z: (round(z.real, 9), round(z.imag, 9)),
    )
    expect = sorted(
        [2.0 + 0j, -2.0 + 0j, 2.0j, -2.0j],
        key=lambda z: (round(z.real, 9), round(z.imag, 9)),
    )
    for a, b in zip(zs, expect):
        assert a == pytest.approx(b, abs=1e-12)
    assert roundtrip_residual(spec, cloud, target) < 1e-12


def test_cloud_budget_guard():
    with pytest.raises(EnumerationTooLarge):
        preimage_cloud(Constant(SQ), 1, 20, budget=1000)


def test_multiplicity_conservation():
    spec = PeriodicWord((SQ, PSQ), (1, 0, 1))
    for depth in (1, 2, 3, 4, 5):
        cloud = preimage_cloud(spec, Fraction(3, 7), depth)
        assert sum(p.multiplicity for p in cloud.points) == 2**depth
        assert cloud.total == 2**depth


def test_roundtrip_residual_certifies_cloud():
    spec = PeriodicWord((PSQ, SQ), (0, 1))
    cloud = preimage_cloud(spec, 1 + 1j, 6)
    assert roundtrip_residual(spec, cloud, 1 + 1j) < 1e-6


def test_preimages_satisfy_height_functional_equation():
    # (1:2) -> sq -> (1:4) -> psq -> (17:16); pulling the height back
    # through two steps multiplies it by the degree product
    spec = PeriodicWord((SQ, PSQ), (0, 1))
    h_down = canonical_height(normalize([1, 2]), spec, tol=1e-12).value
    h_up = canonical_height(
        normalize([17, 16]), spec.shift().shift(), tol=1e-12
    ).value
    assert h_up == pytest.approx(4.0 * h_down, abs=1e-8)


def test_empirical_pairing_of_one_is_exact():
    cloud = preimage_cloud(Constant(PSQ), 1, 5)
    assert empirical_pairing(cloud, constant_one()) == 1.0


def test_empirical_pairing_weights_infinity():
    # the depth-1 cloud of target 1 under psq sits entirely at infinity,
    # where the polar harmonic takes the value -1 (chart 1 at w = 0)
    cloud = preimage_cloud(Constant(PSQ), 1, 1)
    assert empirical_pairing(cloud, sphere_height()) == pytest.approx(-1.0)


def test_chordal_distance_basics():
    assert chordal_distance([1, 0], [0, 1]) == pytest.approx(1.0)
    assert chordal_distance([1, 1], [2, 2]) == pytest.approx(0.0)
    assert chordal_distance([1, 0], [1, 1]) == pytest.approx(1 / math.sqrt(2))


def test_report_trends_decrease():
    spec = Constant(SQ)
    rep = equidistribution_report(
        spec, 2, depths=(2, 6, 8), resolution=128
    )
    assert rep.passed
    assert rep.max_roundtrip < 1e-8
    heights = [r for r in rep.rows if r.phi == "height"]
    assert heights[-1].delta < heights[0].delta
    assert all(r.delta < 0.5 for r in rep.rows)


def test_cloud_rows_export():
    # depth 1 lands entirely at infinity; depth 2 pulls that back to +-i
    shallow = list(cloud_rows(preimage_cloud(Constant(PSQ), 1, 1)))
    assert shallow == [(0.0, 0.0, True, 2)]
    rows = list(cloud_rows(preimage_cloud(Constant(PSQ), 1, 2)))
    assert all(len(r) == 4 for r in rows)
    assert sum(r[3] for r in rows) == 4
    assert not any(r[2] for r in rows)


def test_cloud_point_embedding():
    assert CloudPoint(0.0j, True, 1).embedding() == (0, 1)
    assert CloudPoint(2.5 + 1j, False, 1).embedding() == (1, 2.5 + 1j)
