"""Validated morphisms of P^N and bounded sequences of them.

A CheckedMap bundles integer forms with two certificates:

  * a Nullstellensatz certificate (no common zero, so the map is total), and
  * a distortion certificate with integer carriers A and B such that

        H(f(x)) <= A * H(x)^d        (triangle inequality; A = max_j sum|coeff|)
        H(x)^d  <= B * H(f(x))       (from the certificate; B = C_inf * e)

    on canonical points.  kappa_plus = log A, kappa_minus = log B, and
    c_bound = max(kappa_plus, kappa_minus) / d bounds the one-step defect
    |h(f(x))/d - h(x)| of the logarithmic height.

Sequences f_1, f_2, ... drawn from a finite generating set are described by a
SequenceSpec: constant, periodic, explicit prefix with periodic tail, or an
i.i.d. degree-weighted random word.  Every variant supports O(1) shift()
(dropping f_1) and position lookup; deterministic variants also expose a
recurring "phase" so orbit code can detect cycles of (point, phase) states.

Random words use a counter-based splitmix64 stream: the symbol at position i
is a pure function of (seed, i), so shifting is an offset bump and replay is
bit-identical across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

from .algebra import (
    HomogeneousForm,
    NullstellensatzCertificate,
    RationalProjectivePoint,
    _canonical_values,
    certify,
)
from .errors import DegreeTooSmall, DimensionMismatch, MapsToZero

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit words."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_value(seed: int, index: int) -> int:
    """64-bit value at a counter position of the keyed stream."""
    return _mix64((seed + (index + 1) * _GOLDEN) & _MASK64)


def child_seed(seed: int, tag: int) -> int:
    """Derived seed for an independent substream (per-sample tasks)."""
    return _mix64(stream_value(seed, tag) ^ 0xD1B54A32D192ED03)


def _weighted_index(u64: int, weights: Sequence[int]) -> int:
    """Map a uniform 64-bit word to an index with P(j) ~ weights[j]."""
    total = sum(weights)
    r = (u64 * total) >> 64
    acc = 0
    for j, w in enumerate(weights):
        acc += w
        if r < acc:
            return j
    return len(weights) - 1


@dataclass(frozen=True)
class DistortionCertificate:
    """Two-sided height distortion bounds for one morphism.

    amplification and attenuation are the exact integer carriers; the float
    fields are their logarithms (natural log) and the normalized bound.
    """

    kappa_plus: float
    kappa_minus: float
    c_bound: float
    amplification: int
    attenuation: int
    cofactor_l1: int
    denominator: int


@dataclass(frozen=True)
class CheckedMap:
    """A validated morphism of P^N given by integer forms of degree d >= 2."""

    forms: tuple[HomogeneousForm, ...]
    degree: int
    certificate: NullstellensatzCertificate
    distortion: DistortionCertificate
    name: str | None = None

    @property
    def num_vars(self) -> int:
        return self.forms[0].num_vars

    @property
    def dim(self) -> int:
        return self.num_vars - 1

    def apply(self, point: RationalProjectivePoint) -> RationalProjectivePoint:
        """Image of a canonical point, renormalized exactly.

        Any common divisor of the output components divides the certificate
        denominator (the cofactor identity e*x_j^M = sum G_jk F_k holds over
        the integers and the input coordinates are coprime), so the
        renormalization gcd runs modulo that small constant instead of on
        the full coordinates, which deep orbits cannot afford.
        """
        if len(point.coords) != self.num_vars:
            raise DimensionMismatch("form/point variable counts differ")
        values = [f.evaluate(point.coords) for f in self.forms]
        if all(v == 0 for v in values):
            raise MapsToZero(f"forms vanish at {point}")
        e = self.certificate.denominator
        g = math.gcd(*[v % e for v in values], e) if e > 1 else 1
        return RationalProjectivePoint._from_canonical(
            _canonical_values(values, g)
        )

    def __str__(self) -> str:
        label = self.name or "map"
        return f"{label}: ({', '.join(str(f) for f in self.forms)})"


def amplification_bound(forms: Sequence[HomogeneousForm]) -> int:
    """Integer A with H(f(x)) <= A * H(x)^d: the largest coefficient l1 norm."""
    return max(f.coefficient_l1() for f in forms)


def kappa_plus(forms: Sequence[HomogeneousForm] | CheckedMap) -> float:
    """Archimedean amplification exponent log A.

    For integer forms the finite places only ever shrink the height, so the
    triangle inequality at the archimedean place is the whole story.
    """
    if isinstance(forms, CheckedMap):
        return forms.distortion.kappa_plus
    return math.log(amplification_bound(forms))


def kappa_minus(cert: NullstellensatzCertificate | CheckedMap) -> float:
    """Attenuation exponent log(C_inf) + log(e) from a certificate."""
    if isinstance(cert, CheckedMap):
        return cert.distortion.kappa_minus
    return math.log(cert.cofactor_l1()) + math.log(cert.denominator)


def validate(
    forms: Sequence[HomogeneousForm],
    name: str | None = None,
    max_certificate_degree: int | None = None,
) -> CheckedMap:
    """Check that the forms define a morphism and compute its certificates.

    Raises Degenerate when the forms share a projective zero, DegreeTooSmall
    below degree 2, DimensionMismatch on shape errors.
    """
    if not forms:
        raise DimensionMismatch("no forms")
    n = forms[0].num_vars
    d = forms[0].degree
    if len(forms) != n:
        raise DimensionMismatch(
            f"P^{n - 1} needs {n} forms, got {len(forms)}"
        )
    if any(f.num_vars != n or f.degree != d for f in forms):
        raise DimensionMismatch("forms must share variables and degree")
    if d < 2:
        raise DegreeTooSmall(f"degree {d} < 2: heights would not contract")
    cert = certify(forms, max_certificate_degree)
    amp = amplification_bound(forms)
    c_inf = cert.cofactor_l1()
    att = c_inf * cert.denominator
    kp = math.log(amp)
    km = math.log(att)
    dist = DistortionCertificate(
        kappa_plus=kp,
        kappa_minus=km,
        c_bound=max(kp, km) / d,
        amplification=amp,
        attenuation=att,
        cofactor_l1=c_inf,
        denominator=cert.denominator,
    )
    return CheckedMap(tuple(forms), d, cert, dist, name)


def power_map(dim: int, exponent: int, name: str | None = None) -> CheckedMap:
    """The coordinate power map (x_0^m : ... : x_N^m); c_bound is 0."""
    n = dim + 1
    forms = [
        HomogeneousForm.monomial(n, tuple(exponent if i == j else 0 for i in range(n)))
        for j in range(n)
    ]
    return validate(forms, name or f"pow{exponent}")


def perturbed_power_map(dim: int, exponent: int, name: str | None = None) -> CheckedMap:
    """(x_0^m + x_1^m : x_1^m : ... : x_N^m); same degree, nonzero c_bound."""
    n = dim + 1
    forms = [
        HomogeneousForm.from_terms(
            n,
            exponent,
            {
                tuple(exponent if i == 0 else 0 for i in range(n)): 1,
                tuple(exponent if i == 1 else 0 for i in range(n)): 1,
            },
        )
    ]
    for j in range(1, n):
        forms.append(
            HomogeneousForm.monomial(
                n, tuple(exponent if i == j else 0 for i in range(n))
            )
        )
    return validate(forms, name or f"ppow{exponent}")


class SequenceSpec:
    """A bounded sequence of morphisms drawn from a finite generating set.

    Subclasses implement index_at/shift/phase_at.  Positions are 0-based: the
    map applied first is generator_at(0).
    """

    generators: tuple[CheckedMap, ...]

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    @property
    def c_bound(self) -> float:
        """Uniform distortion bound max_j c_bound(g_j); finite by construction."""
        return max(g.distortion.c_bound for g in self.generators)

    def index_at(self, position: int) -> int:
        raise NotImplementedError

    def generator_at(self, position: int) -> CheckedMap:
        return self.generators[self.index_at(position)]

    def shift(self) -> "SequenceSpec":
        """The sequence with its first map dropped (f_2, f_3, ...)."""
        raise NotImplementedError

    def phase_at(self, position: int) -> Hashable | None:
        """A recurring state token, or None when no recurrence is promised.

        Two equal phases guarantee identical map subsequences from those
        positions on, which is what cycle detection needs.
        """
        return None

    def word_prefix(self, length: int) -> tuple[int, ...]:
        return tuple(self.index_at(i) for i in range(length))

    def describe(self) -> dict:
        raise NotImplementedError

    def _check_generators(self) -> None:
        if not self.generators:
            raise DimensionMismatch("no generators")
        n = self.generators[0].num_vars
        if any(g.num_vars != n for g in self.generators):
            raise DimensionMismatch("generators act on different spaces")


@dataclass(frozen=True)
class Constant(SequenceSpec):
    """Iteration of a single morphism."""

    map: CheckedMap

    def __post_init__(self):
        object.__setattr__(self, "generators", (self.map,))
        self._check_generators()

    def index_at(self, position: int) -> int:
        return 0

    def shift(self) -> "Constant":
        return self

    def phase_at(self, position: int) -> int:
        return 0

    def describe(self) -> dict:
        return {"type": "constant", "word": [0]}


@dataclass(frozen=True)
class PeriodicWord(SequenceSpec):
    """Cyclic repetition of a finite word of generator indices."""

    generators: tuple[CheckedMap, ...]
    word: tuple[int, ...]

    def __post_init__(self):
        self._check_generators()
        if not self.word:
            raise ValueError("empty word")
        if any(not 0 <= w < len(self.generators) for w in self.word):
            raise ValueError("word index out of range")

    def index_at(self, position: int) -> int:
        return self.word[position % len(self.word)]

    def shift(self) -> "PeriodicWord":
        w = self.word
        return PeriodicWord(self.generators, w[1:] + w[:1])

    def phase_at(self, position: int) -> int:
        return position % len(self.word)

    def describe(self) -> dict:
        return {"type": "periodic", "word": list(self.word)}


@dataclass(frozen=True)
class ExplicitWord(SequenceSpec):
    """A finite prefix followed by a periodic tail.

    The default tail repeats the last prefix symbol; an explicit tail may be
    given.  This keeps the sequence total and the phase recurring.
    """

    generators: tuple[CheckedMap, ...]
    prefix: tuple[int, ...]
    tail: tuple[int, ...] = ()

    def __post_init__(self):
        self._check_generators()
        if not self.prefix and not self.tail:
            raise ValueError("need a prefix or a tail")
        tail = self.tail or (self.prefix[-1],)
        object.__setattr__(self, "tail", tuple(tail))
        for w in (*self.prefix, *self.tail):
            if not 0 <= w < len(self.generators):
                raise ValueError("word index out of range")

    def index_at(self, position: int) -> int:
        if position < len(self.prefix):
            return self.prefix[position]
        return self.tail[(position - len(self.prefix)) % len(self.tail)]

    def shift(self) -> "ExplicitWord":
        if self.prefix:
            return ExplicitWord(self.generators, self.prefix[1:], self.tail)
        t = self.tail
        return ExplicitWord(self.generators, (), t[1:] + t[:1])

    def phase_at(self, position: int) -> Hashable:
        if position < len(self.prefix):
            return ("head", position)
        return ("tail", (position - len(self.prefix)) % len(self.tail))

    def describe(self) -> dict:
        return {
            "type": "explicit",
            "prefix": list(self.prefix),
            "tail": list(self.tail),
        }


@dataclass(frozen=True)
class RandomWord(SequenceSpec):
    """I.i.d. word with P(g_j) proportional to deg(g_j).

    The symbol at each position is a pure function of (seed, offset +
    position); shift() bumps the offset, so a shifted spec replays the same
    tail symbols.
    """

    generators: tuple[CheckedMap, ...]
    seed: int
    offset: int = 0

    def __post_init__(self):
        self._check_generators()

    def index_at(self, position: int) -> int:
        u = stream_value(self.seed, self.offset + position)
        return _weighted_index(u, self.degrees)

    def shift(self) -> "RandomWord":
        return RandomWord(self.generators, self.seed, self.offset + 1)

    def phase_at(self, position: int) -> None:
        return None

    def describe(self) -> dict:
        return {"type": "random", "seed": self.seed, "offset": self.offset}


def sample_word(
    generators: Sequence[CheckedMap], length: int, seed: int
) -> tuple[int, ...]:
    """An i.i.d. degree-weighted word of generator indices.

    Deterministic in (generators' degrees, length, seed); the same stream
    primitive RandomWord uses, so CLI runs replay bit-identically.
    """
    degrees = [g.degree for g in generators]
    return tuple(
        _weighted_index(stream_value(seed, i), degrees) for i in range(length)
    )


def _form_from_config(entry: Sequence, num_vars: int, degree: int) -> HomogeneousForm:
    terms: dict[tuple[int, ...], int] = {}
    for exps, coeff in entry:
        if len(exps) != num_vars:
            raise DimensionMismatch("exponent vector length != dim + 1")
        key = tuple(int(e) for e in exps)
        terms[key] = terms.get(key, 0) + int(coeff)
    return HomogeneousForm.from_terms(num_vars, degree, terms)


def maps_from_config(cfg: dict) -> list[CheckedMap]:
    """Build and validate the generating set of a config dictionary.

    Expected shape: {"dim": N, "maps": [{"name": str, "degree": d,
    "forms": [[[e0..eN], coeff], ...] per component}, ...]}.
    """
    dim = int(cfg["dim"])
    n = dim + 1
    out = []
    for m in cfg["maps"]:
        degree = int(m["degree"])
        comps = m["forms"]
        if len(comps) != n:
            raise DimensionMismatch(
                f"map {m.get('name')!r}: P^{dim} needs {n} components"
            )
        forms = [_form_from_config(c, n, degree) for c in comps]
        out.append(validate(forms, name=m.get("name")))
    return out


def _resolve_word(entries: Sequence, maps: Sequence[CheckedMap]) -> tuple[int, ...]:
    by_name = {m.name: i for i, m in enumerate(maps) if m.name}
    word = []
    for w in entries:
        if isinstance(w, str):
            if w not in by_name:
                raise ValueError(f"unknown map name {w!r} in word")
            word.append(by_name[w])
        else:
            idx = int(w)
            if not 0 <= idx < len(maps):
                raise ValueError(f"word index {idx} out of range")
            word.append(idx)
    return tuple(word)


def sequence_from_config(cfg: dict, maps: Sequence[CheckedMap]) -> SequenceSpec:
    """Build the sequence spec of a config dictionary over validated maps."""
    seq = cfg.get("sequence") or {"type": "constant", "map": 0}
    kind = seq.get("type", "constant")
    gens = tuple(maps)
    if kind == "constant":
        sel = seq.get("map", 0)
        idx = _resolve_word([sel], maps)[0]
        return Constant(gens[idx]) if len(gens) == 1 else PeriodicWord(gens, (idx,))
    if kind == "periodic":
        return PeriodicWord(gens, _resolve_word(seq["word"], maps))
    if kind == "explicit":
        return ExplicitWord(
            gens,
            _resolve_word(seq.get("prefix", []), maps),
            _resolve_word(seq.get("tail", []), maps),
        )
    if kind == "random":
        return RandomWord(gens, int(seq.get("seed", 0)))
    raise ValueError(f"unknown sequence type {kind!r}")
