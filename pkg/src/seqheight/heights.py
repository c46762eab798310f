"""Naive and canonical heights along bounded sequences of morphisms.

On the canonical integer representative of a rational point the logarithmic
height is h(x) = log max|x_i|; all finite places vanish there, so the whole
computation is exact big-integer arithmetic with a single log at the end.

For a sequence f = (f_1, f_2, ...) of validated morphisms the normalized
truncations

    h_i(x) = h(f_i o ... o f_1 (x)) / (d_1 * ... * d_i)

form a Cauchy sequence: each validated map satisfies |h(f(y))/d - h(y)| <=
c_bound(f), so |h_{i+1} - h_i| <= c / prod_{a<=i} d_a <= c / 2^i with
c = c(spec) = max over generators.  The limit is the canonical height; the
tail after depth i is at most 2c / prod_{a<=i} d_a, which is the certified
radius reported with every estimate.  Two consequences used throughout:

  * |canonical - naive| <= 2c, and
  * the canonical height vanishes exactly on points that are preperiodic
    for the word (detected here by (point, phase) recurrence).

Heights are carried as (integer H, integer normalizer) pairs; ExactLogHeight
defers the floating log so exact comparisons stay available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import RationalProjectivePoint
from .errors import BudgetExceeded
from .morphisms import SequenceSpec

DEFAULT_BUDGET_BITS = 1 << 20


@dataclass(frozen=True)
class ExactLogHeight:
    """A height log(H)/normalizer with its exact integer payload."""

    multiplicative: int
    normalizer: int = 1

    @property
    def value(self) -> float:
        if self.multiplicative == 1:
            return 0.0
        return math.log(self.multiplicative) / self.normalizer


@dataclass(frozen=True)
class HeightEstimate:
    """A canonical height value with a certified truncation radius.

    The true canonical height lies in [value - radius, value + radius].
    multiplicative/normalizer carry the exact truncation payload when the
    value is a plain truncation (None for exact preperiodic zeros).
    conforming is False when a bit budget stopped the iteration before the
    requested tolerance; the radius is then honest but larger than asked.
    """

    value: float
    radius: float
    depth: int
    c_used: float
    multiplicative: int | None = None
    normalizer: int = 1
    conforming: bool = True


def multiplicative_height(point: RationalProjectivePoint) -> int:
    return max(abs(c) for c in point.coords)


def naive_height(point: RationalProjectivePoint) -> ExactLogHeight:
    """h(x) = log max|x_i| on the canonical representative."""
    return ExactLogHeight(multiplicative_height(point), 1)


def _check_bits(point: RationalProjectivePoint, budget_bits: int, step: int) -> None:
    worst = max(abs(c).bit_length() for c in point.coords)
    if worst > budget_bits:
        raise BudgetExceeded(
            f"orbit coordinate reached {worst} bits (> {budget_bits}) at step {step}"
        )


def height_sequence(
    x: RationalProjectivePoint,
    spec: SequenceSpec,
    depth: int,
    budget_bits: int = DEFAULT_BUDGET_BITS,
) -> list[ExactLogHeight]:
    """Normalized height truncations h_0 .. h_depth along the exact orbit."""
    out = [naive_height(x)]
    p = x
    normalizer = 1
    for i in range(depth):
        g = spec.generator_at(i)
        p = g.apply(p)
        _check_bits(p, budget_bits, i + 1)
        normalizer *= g.degree
        out.append(ExactLogHeight(multiplicative_height(p), normalizer))
    return out


def canonical_height(
    x: RationalProjectivePoint,
    spec: SequenceSpec,
    tol: float,
    budget_bits: int = DEFAULT_BUDGET_BITS,
) -> HeightEstimate:
    """Canonical height of x for the sequence, to a certified radius <= tol.

    Iterates the exact orbit until the tail bound 2c/prod(d) drops below
    tol.  Two shortcuts keep easy cases exact: c = 0 means the naive height
    is already canonical (radius 0), and a repeated (point, phase) state
    proves preperiodicity, hence an exact zero.  If the bit budget is hit
    first, the partial truncation is returned flagged non-conforming.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = spec.c_bound
    p = x
    normalizer = 1
    depth = 0
    seen: dict[tuple, int] | None = None
    if spec.phase_at(0) is not None:
        seen = {(p, spec.phase_at(0)): 0}
    while 2.0 * c / normalizer > tol:
        g = spec.generator_at(depth)
        try:
            p_next = g.apply(p)
            _check_bits(p_next, budget_bits, depth + 1)
        except BudgetExceeded:
            return HeightEstimate(
                value=ExactLogHeight(multiplicative_height(p), normalizer).value,
                radius=2.0 * c / normalizer,
                depth=depth,
                c_used=c,
                multiplicative=multiplicative_height(p),
                normalizer=normalizer,
                conforming=False,
            )
        p = p_next
        normalizer *= g.degree
        depth += 1
        if seen is not None:
            key = (p, spec.phase_at(depth))
            if key in seen:
                return HeightEstimate(
                    value=0.0,
                    radius=0.0,
                    depth=depth,
                    c_used=c,
                    multiplicative=None,
                    normalizer=normalizer,
                )
            seen[key] = depth
    h = ExactLogHeight(multiplicative_height(p), normalizer)
    return HeightEstimate(
        value=h.value,
        radius=2.0 * c / normalizer,
        depth=depth,
        c_used=c,
        multiplicative=h.multiplicative,
        normalizer=h.normalizer,
    )


_EXACT_COMPARE_BIT_CAP = 1 << 24


def _exact_residual_zero(
    lhs: HeightEstimate, rhs: HeightEstimate, d1: int
) -> bool | None:
    """Decide log-exactly whether lhs.value == d1 * rhs.value.

    Both estimates must be exact (radius 0).  Returns None when the integer
    cross-powers would be too large to compare economically.
    """
    if lhs.radius != 0.0 or rhs.radius != 0.0:
        return None
    if lhs.multiplicative is None and rhs.multiplicative is None:
        return True
    hl = lhs.multiplicative if lhs.multiplicative is not None else 1
    hr = rhs.multiplicative if rhs.multiplicative is not None else 1
    # lhs = log(hl)/nl, d1*rhs = d1*log(hr)/nr: equal iff hl^nr == hr^(d1*nl)
    if (
        lhs.normalizer * hr.bit_length() * d1 > _EXACT_COMPARE_BIT_CAP
        or rhs.normalizer * hl.bit_length() > _EXACT_COMPARE_BIT_CAP
    ):
        return None
    return hl ** rhs.normalizer == hr ** (d1 * lhs.normalizer)


def functional_equation_residual(
    x: RationalProjectivePoint,
    spec: SequenceSpec,
    tol: float,
    budget_bits: int = DEFAULT_BUDGET_BITS,
) -> float:
    """|hhat_shift(f_1(x)) - d_1 * hhat(x)|, both sides at tolerance tol.

    The identity is exact for the limits, so the residual is bounded by
    (1 + d_1) * tol.  When both sides are exact truncations the comparison
    is made on the integer payloads and an exact zero is returned as 0.0.
    """
    g1 = spec.generator_at(0)
    lhs = canonical_height(g1.apply(x), spec.shift(), tol, budget_bits)
    rhs = canonical_height(x, spec, tol, budget_bits)
    exact = _exact_residual_zero(lhs, rhs, g1.degree)
    if exact:
        return 0.0
    return abs(lhs.value - g1.degree * rhs.value)
