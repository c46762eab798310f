"""Forward orbits, preperiodic point censuses, and a height-growth exhibit.

Preperiodicity for a word is equivalent to canonical height zero, and every
point of a preperiodic orbit satisfies h(y) <= 2c, so the whole search space
is the finite set T = {y : H(y) <= floor(e^{2c})}.  Build the directed graph
on T with an edge y -> g_j(y) whenever the image stays in T; then a point is
preperiodic for SOME word over the generators exactly when it starts an
infinite walk, i.e. when it survives repeated deletion of out-degree-zero
vertices.  Both directions are elementary: an infinite walk in a finite
graph reaches a cycle, and a preperiodic orbit is itself such a walk.

Escape is certified exactly: the first orbit point with h > 2c (an integer
power comparison, no floats) proves the start was not preperiodic for the
word being followed.

unbounded_demo builds the classical bad family: degree-2 maps f_i of P^1,
each with a persistent fixed point at (1:0), rigged so that the point
(1 : i) lands on (1:0) after i steps.  Every truncation of the normalized
height at (1 : i) is 0 while the naive height log i grows without bound,
showing that no uniform two-sided comparison can hold when sup c(f_i) is
infinite.  All identities are verified by exact evaluation as the report is
assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .algebra import HomogeneousForm, RationalProjectivePoint, evaluate_forms
from .errors import BudgetExceeded, EnumerationTooLarge, NoRecurringPhase
from .heights import DEFAULT_BUDGET_BITS, multiplicative_height
from .morphisms import CheckedMap, SequenceSpec, amplification_bound

DEFAULT_CENSUS_CAP = 10**6


@dataclass(frozen=True)
class FiniteOrbit:
    """A fully resolved preperiodic orbit: tail of length preperiod, then a
    cycle of length period.  points lists the distinct states in visit
    order (preperiod + period of them)."""

    points: tuple[RationalProjectivePoint, ...]
    preperiod: int
    period: int


@dataclass(frozen=True)
class HeightEscape:
    """Certified non-preperiodicity: the orbit point at `step` has naive
    height exceeding 2*c(spec), verified by exact integer comparison."""

    step: int
    height: float
    point: RationalProjectivePoint


@dataclass(frozen=True)
class BudgetHit:
    """Neither resolution within max_steps (should not occur with exact
    escape testing unless max_steps is very small)."""

    step: int


OrbitOutcome = FiniteOrbit | HeightEscape | BudgetHit


def _escape_carrier(spec: SequenceSpec) -> tuple[int, int]:
    """(B, d) with 2*c(spec) = (2/d) log B, for exact h > 2c tests."""
    best = max(
        spec.generators,
        key=lambda g: g.distortion.c_bound,
    )
    b = max(best.distortion.amplification, best.distortion.attenuation)
    return b, best.degree


def _exceeds_2c(h_mult: int, carrier: tuple[int, int]) -> bool:
    b, d = carrier
    return h_mult**d > b * b


def forward_orbit(
    x: RationalProjectivePoint,
    spec: SequenceSpec,
    max_steps: int = 10_000,
    budget_bits: int = DEFAULT_BUDGET_BITS,
) -> OrbitOutcome:
    """Resolve the orbit of x under the word as Finite or HeightEscape.

    Requires a recurring phase (deterministic word); RandomWord specs are
    refused since (point, phase) recurrence is undecidable for them.
    """
    if spec.phase_at(0) is None:
        raise NoRecurringPhase("forward_orbit needs a deterministic word")
    carrier = _escape_carrier(spec)
    seen: dict[tuple, int] = {}
    points: list[RationalProjectivePoint] = []
    p = x
    for step in range(max_steps):
        if _exceeds_2c(multiplicative_height(p), carrier):
            return HeightEscape(
                step=step,
                height=math.log(multiplicative_height(p)),
                point=p,
            )
        key = (p, spec.phase_at(step))
        if key in seen:
            first = seen[key]
            return FiniteOrbit(tuple(points), preperiod=first, period=step - first)
        seen[key] = step
        points.append(p)
        q = spec.generator_at(step).apply(p)
        if max(abs(c).bit_length() for c in q.coords) > budget_bits:
            raise BudgetExceeded(f"orbit coordinates exceeded {budget_bits} bits")
        p = q
    return BudgetHit(step=max_steps)


def _floor_root(value: int, k: int) -> int:
    """floor(value ** (1/k)) for nonnegative integers, exactly."""
    if value < 0:
        raise ValueError("negative radicand")
    if value in (0, 1) or k == 1:
        return value
    r = int(round(value ** (1.0 / k)))
    while r > 0 and r**k > value:
        r -= 1
    while (r + 1) ** k <= value:
        r += 1
    return r


def bounded_height_points(
    dim: int, h_max: int, cap: int = DEFAULT_CENSUS_CAP
) -> list[RationalProjectivePoint]:
    """All canonical points of P^dim(Q) with multiplicative height <= h_max."""
    n = dim + 1
    raw_estimate = ((2 * h_max + 1) ** n - 1) // 2
    if raw_estimate > cap:
        raise EnumerationTooLarge(
            f"about {raw_estimate} candidate tuples exceeds cap {cap}"
        )
    pts = []

    def rec(prefix: list[int]) -> None:
        if len(prefix) == n:
            if all(c == 0 for c in prefix):
                return
            if math.gcd(*[abs(c) for c in prefix]) != 1:
                return
            first = next(c for c in prefix if c != 0)
            if first < 0:
                return
            pts.append(RationalProjectivePoint(tuple(prefix)))
            return
        for c in range(-h_max, h_max + 1):
            rec(prefix + [c])

    rec([])
    return pts


def preperiodic_census(
    generators: Sequence[CheckedMap], cap: int = DEFAULT_CENSUS_CAP
) -> frozenset[RationalProjectivePoint]:
    """Points preperiodic for at least one word over the generators.

    Exact and exhaustive: enumerates T = {H <= floor(e^{2c})}, builds the
    in-T transition graph, and keeps the vertices from which an infinite
    walk exists (survivors of out-degree-zero peeling).
    """
    if not generators:
        raise ValueError("no generators")
    best = max(generators, key=lambda g: g.distortion.c_bound)
    b = max(best.distortion.amplification, best.distortion.attenuation)
    h_max = _floor_root(b * b, best.degree)
    points = bounded_height_points(generators[0].dim, h_max, cap)
    in_t = set(points)
    succ: dict[RationalProjectivePoint, list[RationalProjectivePoint]] = {}
    for p in points:
        images = []
        for g in generators:
            q = g.apply(p)
            if q in in_t:
                images.append(q)
        succ[p] = images
    out_deg = {p: len(v) for p, v in succ.items()}
    pred: dict[RationalProjectivePoint, list[RationalProjectivePoint]] = {
        p: [] for p in points
    }
    for p, images in succ.items():
        for q in images:
            pred[q].append(p)
    stack = [p for p, dcount in out_deg.items() if dcount == 0]
    dead: set[RationalProjectivePoint] = set()
    while stack:
        p = stack.pop()
        if p in dead:
            continue
        dead.add(p)
        for q in pred[p]:
            out_deg[q] -= 1
            if out_deg[q] == 0:
                stack.append(q)
    return frozenset(in_t - dead)


def census_threshold(generators: Sequence[CheckedMap]) -> int:
    """floor(e^{2c}) for the generating set: the height cutoff of T."""
    best = max(generators, key=lambda g: g.distortion.c_bound)
    b = max(best.distortion.amplification, best.distortion.attenuation)
    return _floor_root(b * b, best.degree)


@dataclass(frozen=True)
class UnboundedDemoRow:
    """One member of the bad family and its exactly verified bookkeeping."""

    index: int
    perturbation: int
    kappa_plus: float
    naive_height: float
    truncated_height: float
    steps_to_fixed_point: int


@dataclass(frozen=True)
class UnboundedDemoReport:
    rows: tuple[UnboundedDemoRow, ...]
    fixed_point_checked: bool


def _demo_form_pair(k: int) -> tuple[HomogeneousForm, HomogeneousForm]:
    """The degree-2 pair (x0^2, x1^2 - k x0 x1), i.e. t -> t(t - k) on the
    affine chart t = x1/x0, fixing (1:0)."""
    f0 = HomogeneousForm.monomial(2, (2, 0))
    f1 = HomogeneousForm.from_terms(2, 2, {(0, 2): 1, (1, 1): -k})
    return f0, f1


def unbounded_demo(
    i_max: int, budget_bits: int = DEFAULT_BUDGET_BITS
) -> UnboundedDemoReport:
    """Sequences with unbounded c(f_i): naive height grows, truncations stay 0.

    For each i <= i_max the maps f_1..f_i (with perturbations k_1=1 and
    k_a = F_{a-1} o ... o F_1(a)) send (1:i) to the common fixed point (1:0)
    in exactly i steps, all verified by exact arithmetic while the report is
    built.  kappa_plus(f_i) = log(1 + k_i) grows roughly doubly
    exponentially, so sup_i c(f_i) = infinity and no uniform naive-vs-limit
    comparison is possible.
    """
    if i_max < 1:
        raise ValueError("need i_max >= 1")
    ks: list[int] = [1]
    for i in range(2, i_max + 1):
        t = i
        for a in range(1, i):
            t = t * (t - ks[a - 1])
        if abs(t).bit_length() > budget_bits:
            raise BudgetExceeded(f"perturbation k_{i} exceeds {budget_bits} bits")
        ks.append(t)

    fixed = RationalProjectivePoint((1, 0))
    fixed_ok = True
    rows = []
    for i in range(1, i_max + 1):
        pair = _demo_form_pair(ks[i - 1])
        if evaluate_forms(pair, fixed) != fixed:
            fixed_ok = False
        p = RationalProjectivePoint((1, i))
        steps = 0
        for a in range(1, i + 1):
            p = evaluate_forms(_demo_form_pair(ks[a - 1]), p)
            steps += 1
            if p == fixed:
                break
        if p != fixed:
            raise RuntimeError(f"demo orbit for i={i} missed the fixed point")
        rows.append(
            UnboundedDemoRow(
                index=i,
                perturbation=ks[i - 1],
                kappa_plus=math.log(amplification_bound(_demo_form_pair(ks[i - 1]))),
                naive_height=math.log(i) if i > 1 else 0.0,
                truncated_height=0.0,
                steps_to_fixed_point=steps,
            )
        )
    return UnboundedDemoReport(tuple(rows), fixed_ok)
