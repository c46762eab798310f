"""Backward orbits on P^1 and their equidistribution toward the sequence
current.

The preimages of a target a under the composition f_i o ... o f_1 are pulled
back one map at a time, last map first: preimages of (a0 : a1) under a single
map F = (F0 : F1) of degree d are the roots of the binary form

    B(x0, x1) = a1 * F0(x0, x1) - a0 * F1(x0, x1),

counted with multiplicity (d of them on P^1; a drop in the dehomogenized
degree is multiplicity at infinity).  Roots are found by the companion-matrix
eigenvalue method and polished with Newton steps to a scaled residual below
1e-10; an Aberth-Ehrlich iteration serves as the fallback.  Nearby roots are
clustered into a single point with a multiplicity, at tolerance
1e-5 * (1 + |t|).

The normalized counting measures on those clouds converge weakly to the
current T = dd^c G of the same sequence, so pairing a fixed test function
against the cloud and against the quadrature current must agree better and
better as depth grows; equidistribution_report records both numbers per
depth and checks the trend (with an absolute noise floor, since symmetric
configurations can sit at roundoff on every depth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import RationalProjectivePoint
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    RootFindingFailed,
    UnsupportedDimension,
)
from .green import (
    DEFAULT_TRANSITION,
    ChartFunction,
    ComplexLiftMap,
    LiftSequence,
    PairingGrid,
    radial_bump,
    sphere_height,
    sphere_im,
    sphere_re,
)
from .morphisms import CheckedMap, SequenceSpec

DEFAULT_CLOUD_BUDGET = 1 << 16
RESIDUAL_SCALE = 1e-10
CLUSTER_SCALE = 1e-5
NOISE_FLOOR = 1e-9


@dataclass(frozen=True)
class CloudPoint:
    """One point of a preimage cloud in the chart z = x1/x0."""

    z: complex
    at_infinity: bool
    multiplicity: int

    def embedding(self) -> tuple[complex, complex]:
        return (0.0 + 0.0j, 1.0 + 0.0j) if self.at_infinity else (1.0 + 0.0j, self.z)


@dataclass(frozen=True)
class PreimageCloud:
    points: tuple[CloudPoint, ...]
    depth: int
    total: int
    word: tuple[int, ...]

    def weight(self) -> int:
        return sum(p.multiplicity for p in self.points)


def _target_pair(target) -> tuple:
    """Normalize a target to homogeneous coordinates (a0, a1)."""
    if isinstance(target, RationalProjectivePoint):
        if target.dim != 1:
            raise UnsupportedDimension("backward orbits are implemented on P^1")
        return target.coords
    if isinstance(target, CloudPoint):
        return target.embedding()
    if isinstance(target, (tuple, list)) and len(target) == 2:
        return tuple(target)
    if target is None:
        return (0, 1)
    return (1, complex(target))


def _exact_scalar(value) -> bool:
    return isinstance(value, (int, Fraction))


def _binary_coefficients(cmap: CheckedMap, a0, a1) -> list:
    """Coefficients c_j of B(1, t) = sum c_j t^j, j = 0..d.

    Exact integers/Fractions when the target is rational, complex otherwise.
    """
    d = cmap.degree
    exact = _exact_scalar(a0) and _exact_scalar(a1)
    zero = 0 if exact else 0.0j
    coeffs = [zero] * (d + 1)
    for (e0, e1), c in cmap.forms[0].terms:
        coeffs[e1] += a1 * c if exact else complex(a1) * c
    for (e0, e1), c in cmap.forms[1].terms:
        coeffs[e1] -= a0 * c if exact else complex(a0) * c
    return coeffs


def _trim_leading(coeffs: list) -> tuple[list, int]:
    """Drop (near-)zero top-degree coefficients; return (trimmed, dropped).

    Exact coefficients are compared to zero exactly; floats against
    1e-13 of the largest magnitude.
    """
    exact = all(_exact_scalar(c) for c in coeffs)
    if exact:
        keep = [c != 0 for c in coeffs]
    else:
        mags = [abs(complex(c)) for c in coeffs]
        top = max(mags) if mags else 0.0
        if top == 0.0:
            raise RootFindingFailed("target pullback form vanishes identically")
        keep = [m > 1e-13 * top for m in mags]
    if not any(keep):
        raise RootFindingFailed("target pullback form vanishes identically")
    k = max(j for j, flag in enumerate(keep) if flag)
    dropped = len(coeffs) - 1 - k
    return coeffs[: k + 1], dropped


def _horner(coeffs_low_first: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate p and p' at t; coefficients ordered low degree first."""
    p = np.zeros_like(t)
    dp = np.zeros_like(t)
    for c in coeffs_low_first[::-1]:
        dp = dp * t + p
        p = p * t + c
    return p, dp


def _residual_ok(coeffs_low: np.ndarray, roots: np.ndarray) -> np.ndarray:
    p, _ = _horner(coeffs_low, roots)
    scale = float(np.sum(np.abs(coeffs_low)))
    bound = RESIDUAL_SCALE * scale * np.maximum(1.0, np.abs(roots)) ** (
        len(coeffs_low) - 1
    )
    return np.abs(p) <= bound


def _newton_polish(coeffs_low: np.ndarray, roots: np.ndarray) -> np.ndarray:
    z = roots.astype(np.complex128)
    for _ in range(60):
        ok = _residual_ok(coeffs_low, z)
        if ok.all():
            break
        p, dp = _horner(coeffs_low, z)
        step = np.where(dp != 0, p / np.where(dp == 0, 1.0, dp), 0.0)
        z = np.where(ok, z, z - step)
    return z


def _aberth(coeffs_low: np.ndarray, max_iter: int = 400) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration from a Cauchy-bound circle."""
    k = len(coeffs_low) - 1
    monic = coeffs_low / coeffs_low[-1]
    radius = 1.0 + float(np.max(np.abs(monic[:-1]))) if k > 0 else 1.0
    angles = 2.0 * math.pi * (np.arange(k) + 0.25) / k + 0.39996
    z = radius * np.exp(1j * angles)
    for _ in range(max_iter):
        p, dp = _horner(monic, z)
        w = np.where(dp != 0, p / np.where(dp == 0, 1.0, dp), 0.1)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        denom = 1.0 - w * s
        corr = np.where(denom != 0, w / np.where(denom == 0, 1.0, denom), w)
        z = z - corr
        if np.max(np.abs(corr)) <= 1e-14 * (1.0 + np.max(np.abs(z))):
            break
    return z


def _poly_roots(coeffs: list) -> np.ndarray:
    """All complex roots of sum c_j t^j with certified residuals."""
    top = max(abs(complex(c)) for c in coeffs)
    low = np.array([complex(c) / top for c in coeffs], dtype=np.complex128)
    k = len(low) - 1
    if k == 0:
        return np.empty(0, dtype=np.complex128)
    raw = np.roots(low[::-1])
    polished = _newton_polish(low, raw)
    if not _residual_ok(low, polished).all():
        polished = _newton_polish(low, _aberth(low))
        if not _residual_ok(low, polished).all():
            raise RootFindingFailed(
                f"polynomial roots did not reach residual {RESIDUAL_SCALE:g}"
            )
    return polished


def _cluster(roots: np.ndarray) -> list[tuple[complex, int]]:
    """Greedy clustering at 1e-5 * (1 + |t|) into (center, multiplicity)."""
    order = np.argsort(np.abs(roots), kind="stable")
    out: list[list] = []
    for idx in order:
        t = complex(roots[idx])
        placed = False
        for entry in out:
            if abs(t - entry[0]) <= CLUSTER_SCALE * (1.0 + abs(t)):
                entry[1] += 1
                entry[0] = entry[0] + (t - entry[0]) / entry[1]
                placed = True
                break
        if not placed:
            out.append([t, 1])
    return [(c, m) for c, m in out]


def preimages_one_step(cmap: CheckedMap, target) -> list[CloudPoint]:
    """Preimages of one target point under one map, with multiplicities
    summing to the degree."""
    if cmap.dim != 1:
        raise UnsupportedDimension("backward orbits are implemented on P^1")
    a0, a1 = _target_pair(target)
    coeffs = _binary_coefficients(cmap, a0, a1)
    trimmed, at_inf = _trim_leading(coeffs)
    roots = _poly_roots(trimmed)
    points = [
        CloudPoint(center, False, mult) for center, mult in _cluster(roots)
    ]
    if at_inf:
        points.append(CloudPoint(0.0j, True, at_inf))
    return points


def preimage_cloud(
    spec: SequenceSpec,
    target,
    depth: int,
    budget: int = DEFAULT_CLOUD_BUDGET,
) -> PreimageCloud:
    """The full preimage cloud of target under f_depth o ... o f_1.

    Pullbacks run backward (position depth-1 down to 0); the first pullback
    of a rational target uses exact integer coefficients.
    """
    if spec.dim != 1:
        raise UnsupportedDimension("backward orbits are implemented on P^1")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    total = 1
    for pos in range(depth):
        total *= spec.generator_at(pos).degree
        if total > budget:
            raise EnumerationTooLarge(
                f"cloud size {total}+ exceeds budget {budget}"
            )
    word = spec.word_prefix(depth)
    current: list[tuple] = [(_target_pair(target), 1)]
    for pos in range(depth - 1, -1, -1):
        gen = spec.generator_at(pos)
        nxt: list[tuple] = []
        for tgt, mult in current:
            for p in preimages_one_step(gen, tgt):
                nxt.append((p, mult * p.multiplicity))
        current = nxt
    merged = _merge_cloud(current)
    return PreimageCloud(tuple(merged), depth, total, word)


def _merge_cloud(entries: list[tuple]) -> list[CloudPoint]:
    """Combine coincident branches; entries are (CloudPoint | pair, mult)."""
    inf_mult = 0
    finite: list[list] = []
    for item, mult in entries:
        if isinstance(item, CloudPoint):
            if item.at_infinity:
                inf_mult += mult
                continue
            z = item.z
        else:
            a0, a1 = item
            if a0 == 0:
                inf_mult += mult
                continue
            z = complex(a1) / complex(a0)
        placed = False
        for entry in finite:
            if abs(z - entry[0]) <= CLUSTER_SCALE * (1.0 + abs(z)):
                entry[1] += mult
                placed = True
                break
        if not placed:
            finite.append([z, mult])
    out = [CloudPoint(z, False, m) for z, m in finite]
    if inf_mult:
        out.append(CloudPoint(0.0j, True, inf_mult))
    return out


def chordal_distance(v: Sequence[complex], w: Sequence[complex]) -> float:
    """Chordal metric on P^1 from homogeneous pairs; range [0, 1]."""
    v0, v1 = complex(v[0]), complex(v[1])
    w0, w1 = complex(w[0]), complex(w[1])
    num = abs(v0 * w1 - v1 * w0)
    return num / (math.hypot(abs(v0), abs(v1)) * math.hypot(abs(w0), abs(w1)))


def roundtrip_residual(spec: SequenceSpec, cloud: PreimageCloud, target) -> float:
    """Largest chordal distance between the forward image of a cloud point
    and the original target; small residuals certify the cloud."""
    a = _target_pair(target)
    a_vec = np.array([complex(a[0]), complex(a[1])], dtype=np.complex128)
    lifts = [ComplexLiftMap.from_checked(g) for g in spec.generators]
    worst = 0.0
    for p in cloud.points:
        v = np.array(p.embedding(), dtype=np.complex128)
        v /= np.linalg.norm(v)
        for pos in range(cloud.depth):
            v = lifts[spec.index_at(pos)].evaluate(v)
            v /= np.linalg.norm(v)
        worst = max(worst, chordal_distance(v, a_vec))
    return worst


def _phi_scalar(phi: ChartFunction, point: CloudPoint) -> float:
    if point.at_infinity:
        return float(phi.value(1, np.array([0.0j]))[0])
    z = point.z
    if abs(z) <= 1.0:
        return float(phi.value(0, np.array([z]))[0])
    return float(phi.value(1, np.array([1.0 / z]))[0])


def empirical_pairing(cloud: PreimageCloud, phi: ChartFunction) -> float:
    """Average of phi over the cloud with multiplicities; the empirical
    counterpart of pairing phi with the current."""
    acc = math.fsum(
        p.multiplicity * _phi_scalar(phi, p) for p in cloud.points
    )
    return acc / cloud.total


def default_test_functions() -> tuple[ChartFunction, ...]:
    return (
        sphere_re(),
        sphere_im(),
        sphere_height(),
        radial_bump(1.0 + 0.0j, 0.75),
        radial_bump(0.8j, 0.75),
    )


@dataclass(frozen=True)
class EquidistributionRow:
    depth: int
    phi: str
    empirical: float
    reference: float
    delta: float


@dataclass(frozen=True)
class EquidistributionReport:
    rows: tuple[EquidistributionRow, ...]
    trends: dict
    max_roundtrip: float
    passed: bool


def equidistribution_report(
    spec: SequenceSpec,
    target,
    depths: Sequence[int] = (2, 4, 6, 8, 10),
    phis: Sequence[ChartFunction] | None = None,
    resolution: int = 256,
    transition: float = DEFAULT_TRANSITION,
    green_tol: float = 1e-9,
    workers: int = 1,
    noise_floor: float = NOISE_FLOOR,
    budget: int = DEFAULT_CLOUD_BUDGET,
) -> EquidistributionReport:
    """Pair each test function against clouds of increasing depth and
    against the quadrature current, and check the discrepancy trend.

    The trend rule is delta(depths[-1]) <= max(delta(depths[0]),
    noise_floor): configurations with an exact symmetry keep every delta at
    roundoff, which the floor treats as a pass rather than demanding decay
    of pure noise.
    """
    if phis is None:
        phis = default_test_functions()
    depths = sorted(depths)
    if not depths:
        raise ValueError("need at least one depth")
    grid = PairingGrid(
        LiftSequence.from_spec(spec), resolution, transition, green_tol, workers
    )
    references = {phi.name: grid.pair(phi) for phi in phis}
    rows: list[EquidistributionRow] = []
    max_rt = 0.0
    for depth in depths:
        cloud = preimage_cloud(spec, target, depth, budget)
        max_rt = max(max_rt, roundtrip_residual(spec, cloud, target))
        for phi in phis:
            emp = empirical_pairing(cloud, phi)
            ref = references[phi.name]
            rows.append(
                EquidistributionRow(depth, phi.name, emp, ref, abs(emp - ref))
            )
    trends = {}
    for phi in phis:
        mine = [r for r in rows if r.phi == phi.name]
        first = mine[0].delta
        last = mine[-1].delta
        trends[phi.name] = last <= max(first, noise_floor)
    return EquidistributionReport(
        rows=tuple(rows),
        trends=trends,
        max_roundtrip=max_rt,
        passed=all(trends.values()),
    )


def cloud_rows(cloud: PreimageCloud):
    """(re, im, at_infinity, multiplicity) tuples for CSV export."""
    for p in cloud.points:
        yield (p.z.real, p.z.imag, int(p.at_infinity), p.multiplicity)
