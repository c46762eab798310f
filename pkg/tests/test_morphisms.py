import math
import random

import pytest

from seqheight.algebra import HomogeneousForm, normalize
from seqheight.errors import DegreeTooSmall, Degenerate, NoRecurringPhase
from seqheight.morphisms import (
    Constant,
    ExplicitWord,
    PeriodicWord,
    RandomWord,
    maps_from_config,
    perturbed_power_map,
    power_map,
    sample_word,
    sequence_from_config,
    validate,
)


def test_power_map_has_zero_distortion():
    for m in (2, 3, 5):
        g = power_map(1, m)
        assert g.distortion.kappa_plus == 0.0
        assert g.distortion.kappa_minus == 0.0
        assert g.distortion.c_bound == 0.0


def test_perturbed_square_distortion():
    g = perturbed_power_map(1, 2)
    assert g.distortion.amplification == 2
    assert g.distortion.attenuation == 2
    assert g.distortion.kappa_plus == pytest.approx(math.log(2))
    assert g.distortion.kappa_minus == pytest.approx(math.log(2))
    assert g.distortion.c_bound == pytest.approx(math.log(2) / 2)


def test_kappa_plus_from_coefficient_sums():
    forms = [
        HomogeneousForm.from_terms(2, 2, {(2, 0): 3, (0, 2): 1}),
        HomogeneousForm.monomial(2, (0, 2)),
    ]
    g = validate(forms)
    assert g.distortion.amplification == 4
    assert g.distortion.kappa_plus == pytest.approx(math.log(4))


def test_kappa_minus_carries_certificate_denominator():
    forms = [
        HomogeneousForm.from_terms(2, 2, {(2, 0): 1, (0, 2): 1}),
        HomogeneousForm.from_terms(2, 2, {(0, 2): 2}),
    ]
    g = validate(forms)
    # e = 2, cofactor l1 max = 3, so attenuation B = 6
    assert g.distortion.attenuation == 6
    assert g.distortion.kappa_minus == pytest.approx(math.log(6))


def test_validate_rejects_degree_one():
    forms = [
        HomogeneousForm.monomial(2, (1, 0)),
        HomogeneousForm.monomial(2, (0, 1)),
    ]
    with pytest.raises(DegreeTooSmall):
        validate(forms)


def test_validate_rejects_degenerate():
    forms = [
        HomogeneousForm.monomial(2, (2, 0)),
        HomogeneousForm.from_terms(2, 2, {(1, 1): 1}),
    ]
    with pytest.raises(Degenerate):
        validate(forms)


@pytest.mark.parametrize(
    "builder",
    [
        lambda: power_map(1, 2),
        lambda: perturbed_power_map(1, 2),
        lambda: power_map(2, 3),
        lambda: perturbed_power_map(2, 2),
        lambda: validate(
            [
                HomogeneousForm.from_terms(2, 3, {(3, 0): 2, (1, 2): -1}),
                HomogeneousForm.from_terms(2, 3, {(0, 3): 1, (2, 1): 1}),
            ]
        ),
    ],
)
def test_distortion_inequalities_exact(builder):
    # the certificate's content: A and B really do sandwich the height on
    # canonical integer points, checked as big-integer inequalities
    g = builder()
    a = g.distortion.amplification
    b = g.distortion.attenuation
    d = g.degree
    rng = random.Random(17)
    n = g.num_vars
    checked = 0
    while checked < 10_000:
        raw = [rng.randint(-50, 50) for _ in range(n)]
        if all(v == 0 for v in raw):
            continue
        x = normalize(raw)
        h = max(abs(c) for c in x.coords)
        try:
            y = g.apply(x)
        except Degenerate:
            continue
        hy = max(abs(c) for c in y.coords)
        assert hy <= a * h**d
        assert h**d <= b * hy
        checked += 1


def test_constant_word_semantics():
    g = perturbed_power_map(1, 2)
    spec = Constant(g)
    assert spec.index_at(0) == spec.index_at(999) == 0
    assert spec.shift() is spec
    assert spec.phase_at(123) == 0
    assert spec.c_bound == g.distortion.c_bound


def test_periodic_word_shift_rotates():
    a, b = power_map(1, 2, "a"), perturbed_power_map(1, 2, "b")
    spec = PeriodicWord((a, b), (0, 1, 1))
    assert [spec.index_at(i) for i in range(6)] == [0, 1, 1, 0, 1, 1]
    shifted = spec.shift()
    assert [shifted.index_at(i) for i in range(6)] == [1, 1, 0, 1, 1, 0]
    assert spec.phase_at(0) != spec.phase_at(1)
    assert spec.phase_at(0) == spec.phase_at(3)


def test_explicit_word_prefix_then_tail():
    a, b = power_map(1, 2, "a"), perturbed_power_map(1, 2, "b")
    spec = ExplicitWord((a, b), prefix=(1, 0), tail=(0, 1))
    assert [spec.index_at(i) for i in range(7)] == [1, 0, 0, 1, 0, 1, 0]
    shifted = spec.shift()
    assert [shifted.index_at(i) for i in range(6)] == [0, 0, 1, 0, 1, 0]
    twice = shifted.shift()
    # prefix consumed; further shifts rotate the tail
    assert [twice.index_at(i) for i in range(4)] == [0, 1, 0, 1]
    assert twice.shift().index_at(0) == 1


def test_explicit_word_default_tail_repeats_last():
    a, b = power_map(1, 2, "a"), perturbed_power_map(1, 2, "b")
    spec = ExplicitWord((a, b), prefix=(1, 0))
    assert [spec.index_at(i) for i in range(5)] == [1, 0, 0, 0, 0]


def test_random_word_shift_is_offset():
    gens = (power_map(1, 2), power_map(1, 3))
    spec = RandomWord(gens, seed=5)
    shifted = spec.shift()
    for i in range(40):
        assert shifted.index_at(i) == spec.index_at(i + 1)
    assert spec.phase_at(3) is None


def test_sample_word_frozen_prefix():
    gens = (power_map(1, 2), power_map(1, 3))
    assert sample_word(gens, 12, 42) == (1, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1)


def test_sample_word_degree_weighted_frequency():
    gens = (power_map(1, 2), power_map(1, 3))
    word = sample_word(gens, 100_000, 7)
    freq = word.count(1) / len(word)
    assert abs(freq - 0.6) <= 0.005


def test_sample_word_matches_random_word_spec():
    gens = (power_map(1, 2), power_map(1, 3))
    spec = RandomWord(gens, seed=11)
    assert sample_word(gens, 20, 11) == tuple(spec.index_at(i) for i in range(20))


CONFIG = {
    "dim": 1,
    "maps": [
        {"name": "sq", "degree": 2, "forms": [[[[2, 0], 1]], [[[0, 2], 1]]]},
        {
            "name": "psq",
            "degree": 2,
            "forms": [[[[2, 0], 1], [[0, 2], 1]], [[[0, 2], 1]]],
        },
    ],
    "sequence": {"type": "periodic", "word": ["sq", "psq"]},
}


def test_config_round_trip():
    maps = maps_from_config(CONFIG)
    assert [m.name for m in maps] == ["sq", "psq"]
    assert maps[0].distortion.c_bound == 0.0
    spec = sequence_from_config(CONFIG, maps)
    assert isinstance(spec, PeriodicWord)
    assert spec.word_prefix(4) == (0, 1, 0, 1)
    x = normalize([1, 1])
    assert maps[1].apply(x).coords == (2, 1)


def test_config_random_sequence():
    cfg = dict(CONFIG)
    cfg["sequence"] = {"type": "random", "seed": 9}
    maps = maps_from_config(cfg)
    spec = sequence_from_config(cfg, maps)
    assert isinstance(spec, RandomWord)
    assert spec.seed == 9


def test_forward_orbit_refuses_random_word():
    from seqheight.orbits import forward_orbit

    gens = (power_map(1, 2), power_map(1, 3))
    spec = RandomWord(gens, seed=1)
    with pytest.raises(NoRecurringPhase):
        forward_orbit(normalize([1, 1]), spec)
