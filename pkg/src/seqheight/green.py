"""Green functions, admissible potentials, and current pairings for
sequences of homogeneous lifts on C^{n}.

For lifts F^1, F^2, ... of degrees d_a >= 2 the normalized escape logs

    G_i(x) = log |F^i o ... o F^1 (x)|^2 / (d_1 ... d_i),        |.| Euclidean,

converge uniformly away from the origin: each lift satisfies a two-sided bound
|log|F(v)| / d| <= c_bar on unit vectors, giving |G_i - G_{i-1}| <=
2 c_bar / (d_1..d_{i-1}) <= c_bar / 2^{i-2} and a certified tail of at most
4 c_bar / (d_1..d_i) after depth i.  The iteration renormalizes to unit
vectors each step and accumulates the log, so no overflow occurs at any
depth.

The limit G is d-homogeneous-compatible: G(lambda x) = G(x) + 2 log|lambda|,
so u(x) = log|x|^2 - G(x) descends to a continuous potential on P^{n-1}
("admissible potential"); the associated current on P^1 is

    T = omega_FS - dd^c u,      dd^c = (i/2 pi) d dbar,

with total mass 1.  current_pairing integrates a C^2 test function against T
over two overlapping chart disks |z| <= R, R = e^a, glued by the smooth
log-symmetric weight chi(|z|) with chi(s) + chi(1/s) = 1, using cell-centered
midpoint quadrature:

    T(phi) = sum_charts sum_cells rho * (phi * fs - u * laplacian(phi)/4pi) * h^2

where fs(z) = (1/pi)(1+|z|^2)^{-2} is the Fubini-Study density.  The cutoff
is a quintic smoothstep (C^2 at both ends), which keeps the midpoint error
at the 1e-6 scale on a 512^2 grid; the advertised 1e-3 mass tolerance has a
wide margin.

Rescaling lifts F^a -> c_a F^a shifts the Green function by the constant
sum_k log|c_k|^2 / (d_1..d_k) and leaves the current (and all pairings)
unchanged; lift_scaling_check verifies both statements numerically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateNearZero,
    DimensionMismatch,
    NonzeroRequired,
    UnsupportedDimension,
)
from .morphisms import CheckedMap, SequenceSpec

DEFAULT_TRANSITION = 0.25


class ComplexLiftMap:
    """A homogeneous polynomial lift C^n -> C^n with a distortion constant.

    c_bar bounds |log|F(v)|/d| on Euclidean unit vectors.  Lifts built from
    validated integer maps carry a certified bound derived from the integer
    distortion certificate; lifts from raw complex coefficients get a
    sampled estimate and are flagged uncertified.
    """

    def __init__(
        self,
        degree: int,
        num_vars: int,
        components: Sequence[tuple[np.ndarray, np.ndarray]],
        c_bar: float,
        certified: bool,
        label: str | None = None,
    ):
        if len(components) != num_vars:
            raise DimensionMismatch("need num_vars components")
        self.degree = degree
        self.num_vars = num_vars
        self.components = []
        for exps, coeffs in components:
            e = np.array(exps, dtype=np.int64).reshape(-1, num_vars)
            c = np.array(coeffs, dtype=np.complex128).reshape(-1)
            if len(e) != len(c):
                raise DimensionMismatch("exponent/coefficient length mismatch")
            e.setflags(write=False)
            c.setflags(write=False)
            self.components.append((e, c))
        self.c_bar = float(c_bar)
        self.certified = certified
        self.label = label

    @classmethod
    def from_checked(cls, cmap: CheckedMap, scale: complex = 1.0) -> "ComplexLiftMap":
        """Lift of a validated integer map, optionally scaled, with a
        certified c_bar.

        With n = num_vars, A the amplification and C_inf, e the certificate
        constants, on unit vectors

            (1/d) log|F(v)|  <=  (log A + log(n)/2) / d
            (1/d) log|F(v)|  >=  -log(C_inf/e)/d - log(n)/2

        and a scalar multiplies the bound by |log|scale||/d.
        """
        n = cmap.num_vars
        d = cmap.degree
        comps = []
        for form in cmap.forms:
            exps = [list(e) for e, _ in form.terms] or [[0] * n]
            coeffs = [complex(c) * scale for _, c in form.terms] or [0.0j]
            comps.append((np.array(exps), np.array(coeffs)))
        dist = cmap.distortion
        up = (math.log(dist.amplification) + 0.5 * math.log(n)) / d
        down = (
            math.log(dist.cofactor_l1 / dist.denominator) / d + 0.5 * math.log(n)
        )
        c_bar = max(up, down)
        if scale != 1.0:
            c_bar += abs(cmath.log(scale).real) / d
        return cls(d, n, comps, c_bar, certified=True, label=cmap.name)

    @classmethod
    def from_coefficients(
        cls,
        degree: int,
        num_vars: int,
        components: Sequence[dict],
        c_bar: float | None = None,
        label: str | None = None,
        sample_count: int = 20000,
        seed: int = 7,
    ) -> "ComplexLiftMap":
        """Lift from raw {exponents: complex coefficient} dictionaries.

        Without an explicit c_bar, estimates it by sampling unit vectors and
        padding by 25 percent; the result is flagged uncertified.
        """
        comps = []
        for comp in components:
            exps = [list(e) for e in comp] or [[0] * num_vars]
            coeffs = [complex(comp[e]) for e in comp] or [0.0j]
            comps.append((np.array(exps), np.array(coeffs)))
        lift = cls(degree, num_vars, comps, 0.0, certified=False, label=label)
        if c_bar is None:
            rng = np.random.default_rng(seed)
            v = rng.standard_normal((num_vars, sample_count)) + 1j * rng.standard_normal(
                (num_vars, sample_count)
            )
            v /= np.linalg.norm(v, axis=0)
            norms = np.linalg.norm(lift.evaluate(v), axis=0)
            if norms.min() <= 0:
                raise DegenerateNearZero("lift vanishes on a sampled unit vector")
            worst = max(abs(np.log(norms.max())), abs(np.log(norms.min()))) / degree
            c_bar = 1.25 * worst + 1e-9
        lift.c_bar = float(c_bar)
        return lift

    def rescaled(self, scale: complex) -> "ComplexLiftMap":
        comps = [(e, c * scale) for e, c in self.components]
        extra = abs(cmath.log(complex(scale)).real) / self.degree
        return ComplexLiftMap(
            self.degree,
            self.num_vars,
            comps,
            self.c_bar + extra,
            self.certified,
            self.label,
        )

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Apply the lift to a batch of column vectors, shape (n, B)."""
        pts = np.asarray(points, dtype=np.complex128)
        squeeze = pts.ndim == 1
        if squeeze:
            pts = pts[:, None]
        if pts.shape[0] != self.num_vars:
            raise DimensionMismatch("point batch has wrong variable count")
        out = np.empty_like(pts)
        for j, (exps, coeffs) in enumerate(self.components):
            acc = np.zeros(pts.shape[1], dtype=np.complex128)
            for t in range(len(coeffs)):
                term = np.full(pts.shape[1], coeffs[t])
                for i in range(self.num_vars):
                    e = exps[t, i]
                    if e:
                        term = term * pts[i] ** int(e)
                acc += term
            out[j] = acc
        return out[:, 0] if squeeze else out


class LiftSequence:
    """A sequence of lifts over a finite generating set with a word rule.

    Mirrors SequenceSpec on the analytic side; per-position scalars support
    the rescaling experiments.
    """

    def __init__(
        self,
        generators: Sequence[ComplexLiftMap],
        index_fn: Callable[[int], int],
        scalars: Sequence[complex] = (),
        description: str = "custom",
    ):
        if not generators:
            raise DimensionMismatch("no generators")
        n = generators[0].num_vars
        if any(g.num_vars != n for g in generators):
            raise DimensionMismatch("lifts act on different spaces")
        self.generators = tuple(generators)
        self._index_fn = index_fn
        self.scalars = tuple(complex(s) for s in scalars)
        self.description = description
        self._scaled_cache: dict[int, ComplexLiftMap] = {}

    @classmethod
    def constant(cls, lift: ComplexLiftMap) -> "LiftSequence":
        return cls((lift,), lambda pos: 0, description="constant")

    @classmethod
    def periodic(
        cls, generators: Sequence[ComplexLiftMap], word: Sequence[int]
    ) -> "LiftSequence":
        w = tuple(word)
        if not w:
            raise ValueError("empty word")
        return cls(generators, lambda pos: w[pos % len(w)], description="periodic")

    @classmethod
    def from_spec(cls, spec: SequenceSpec) -> "LiftSequence":
        lifts = tuple(ComplexLiftMap.from_checked(g) for g in spec.generators)
        return cls(lifts, spec.index_at, description="from_spec")

    @property
    def num_vars(self) -> int:
        return self.generators[0].num_vars

    @property
    def c_bar(self) -> float:
        base = max(g.c_bar for g in self.generators)
        for pos, s in enumerate(self.scalars):
            if s != 1.0:
                base = max(base, self.lift_at(pos).c_bar)
        return base

    @property
    def certified(self) -> bool:
        return all(g.certified for g in self.generators)

    def lift_at(self, position: int) -> ComplexLiftMap:
        base = self.generators[self._index_fn(position)]
        if position < len(self.scalars) and self.scalars[position] != 1.0:
            got = self._scaled_cache.get(position)
            if got is None:
                got = base.rescaled(self.scalars[position])
                self._scaled_cache[position] = got
            return got
        return base

    def scaled(self, scalars: Sequence[complex]) -> "LiftSequence":
        if self.scalars:
            raise ValueError("sequence already carries scalars")
        return LiftSequence(
            self.generators, self._index_fn, scalars, self.description + "+scaled"
        )


@dataclass(frozen=True)
class GreenValue:
    """A Green function value with its certified truncation radius."""

    value: float
    depth: int
    radius: float


def _plan_depth(seq: LiftSequence, tol: float, depth: int | None) -> int:
    """Smallest depth with certified tail 4 c_bar / prod(d) <= tol."""
    if depth is not None:
        return depth
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = seq.c_bar
    prod = 1.0
    i = 0
    while 4.0 * c / prod > tol:
        prod *= seq.lift_at(i).degree
        i += 1
        if i > 10_000:
            raise ValueError("tolerance unreachably small")
    return i


def green_values(
    seq: LiftSequence,
    points: np.ndarray,
    tol: float = 1e-9,
    depth: int | None = None,
) -> tuple[np.ndarray, int, float]:
    """Batch Green function values; returns (values, depth, radius).

    points has shape (n, B).  The same depth serves the whole batch, chosen
    from the certified tail bound, so results are deterministic.
    """
    pts = np.asarray(points, dtype=np.complex128)
    if pts.ndim != 2 or pts.shape[0] != seq.num_vars:
        raise DimensionMismatch("expected point batch of shape (num_vars, B)")
    norms = np.linalg.norm(pts, axis=0)
    if np.any(norms == 0):
        raise NonzeroRequired("Green function of the zero vector")
    steps = _plan_depth(seq, tol, depth)
    acc = np.log(norms)
    v = pts / norms
    prod = 1
    for a in range(steps):
        lift = seq.lift_at(a)
        y = lift.evaluate(v)
        ny = np.linalg.norm(y, axis=0)
        if np.any(ny < 1e-280):
            raise DegenerateNearZero(
                f"lift at step {a + 1} drove a unit vector to ~0"
            )
        acc = lift.degree * acc + np.log(ny)
        v = y / ny
        prod *= lift.degree
    radius = 4.0 * seq.c_bar / prod
    return 2.0 * acc / prod, steps, radius


def green_function(
    seq: LiftSequence,
    x: Sequence[complex],
    tol: float = 1e-9,
    depth: int | None = None,
) -> GreenValue:
    """Green function of one point, to a certified radius <= tol."""
    vec = np.asarray(x, dtype=np.complex128).reshape(-1, 1)
    values, steps, radius = green_values(seq, vec, tol, depth)
    return GreenValue(float(values[0]), steps, radius)


def admissible_potential(
    seq: LiftSequence,
    x: Sequence[complex],
    tol: float = 1e-9,
    depth: int | None = None,
) -> float:
    """u(x) = log|x|^2 - G(x); invariant under scaling of x."""
    vec = np.asarray(x, dtype=np.complex128).reshape(-1)
    norm = float(np.linalg.norm(vec))
    if norm == 0:
        raise NonzeroRequired("potential of the zero vector")
    g = green_function(seq, vec, tol, depth)
    return 2.0 * math.log(norm) - g.value


class ChartFunction:
    """A C^2 test function on P^1 given per chart with its flat Laplacian.

    chart 0 uses the coordinate z = x1/x0, chart 1 uses w = x0/x1; the two
    descriptions agree under z = 1/w.  laplacian() is the flat Laplacian in
    the local coordinate of the chart asked for (the 4 d/dz d/dzbar one), so
    dd^c phi = laplacian/(4 pi) dA in that chart.
    """

    def __init__(
        self,
        name: str,
        value_fn: Callable[[int, np.ndarray], np.ndarray],
        laplacian_fn: Callable[[int, np.ndarray], np.ndarray],
    ):
        self.name = name
        self._value = value_fn
        self._laplacian = laplacian_fn

    def value(self, chart: int, z) -> np.ndarray:
        return self._value(chart, np.asarray(z, dtype=np.complex128))

    def laplacian(self, chart: int, z) -> np.ndarray:
        return self._laplacian(chart, np.asarray(z, dtype=np.complex128))

    @classmethod
    def from_callable(
        cls, name: str, fn: Callable[[int, np.ndarray], np.ndarray], stencil_h: float = 1e-4
    ) -> "ChartFunction":
        """Wrap a plain chart-wise function; Laplacian by 5-point stencil."""

        def lap(chart: int, z: np.ndarray) -> np.ndarray:
            h = stencil_h
            return (
                fn(chart, z + h)
                + fn(chart, z - h)
                + fn(chart, z + 1j * h)
                + fn(chart, z - 1j * h)
                - 4.0 * fn(chart, z)
            ) / h**2

        return cls(name, lambda c, z: np.asarray(fn(c, z), dtype=float), lap)


def constant_one() -> ChartFunction:
    return ChartFunction(
        "one",
        lambda chart, z: np.ones(z.shape, dtype=float),
        lambda chart, z: np.zeros(z.shape, dtype=float),
    )


def _sphere_eigen(name: str, chart_sign: tuple[float, float], part) -> ChartFunction:
    """Degree-1 spherical harmonics: Delta phi = -8 phi / (1+|z|^2)^2 in any
    stereographic chart; only the sign flips between charts."""

    def val(chart: int, z: np.ndarray) -> np.ndarray:
        r2 = np.abs(z) ** 2
        return chart_sign[chart] * part(z) / (1.0 + r2)

    def lap(chart: int, z: np.ndarray) -> np.ndarray:
        r2 = np.abs(z) ** 2
        return -8.0 * val(chart, z) / (1.0 + r2) ** 2

    return ChartFunction(name, val, lap)


def sphere_re() -> ChartFunction:
    """Re(z)/(1+|z|^2): equals Re(w)/(1+|w|^2) in the other chart."""
    return _sphere_eigen("re", (1.0, 1.0), lambda z: np.real(z))


def sphere_im() -> ChartFunction:
    """Im(z)/(1+|z|^2): picks up a sign in the other chart."""
    return _sphere_eigen("im", (1.0, -1.0), lambda z: np.imag(z))


def sphere_height() -> ChartFunction:
    """(1-|z|^2)/(1+|z|^2): the polar harmonic, odd under chart swap."""

    def val(chart: int, z: np.ndarray) -> np.ndarray:
        r2 = np.abs(z) ** 2
        sign = 1.0 if chart == 0 else -1.0
        return sign * (1.0 - r2) / (1.0 + r2)

    def lap(chart: int, z: np.ndarray) -> np.ndarray:
        r2 = np.abs(z) ** 2
        return -8.0 * val(chart, z) / (1.0 + r2) ** 2

    return ChartFunction("height", val, lap)


def radial_bump(center: complex, radius: float) -> ChartFunction:
    """The C^infinity bump exp(1 - r^2/(r^2 - |z - z0|^2)) on chart 0.

    Supported in |z - z0| < radius (away from infinity), transferred to
    chart 1 by z = 1/w; the flat Laplacian transforms conformally by
    1/|w|^4.
    """
    z0 = complex(center)
    rho2 = float(radius) ** 2

    def chart0_pair(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.abs(z - z0) ** 2
        inside = t < rho2 * (1.0 - 1e-12)
        tt = np.where(inside, t, 0.0)
        denom = rho2 - tt
        val = np.where(inside, np.exp(1.0 - rho2 / denom), 0.0)
        d1 = -rho2 / denom**2 * val
        d2 = val * (rho2**2 / denom**4) - 2.0 * rho2 / denom**3 * val
        lap = np.where(inside, 4.0 * (tt * d2 + d1), 0.0)
        return val, lap

    def val(chart: int, z: np.ndarray) -> np.ndarray:
        if chart == 0:
            return chart0_pair(z)[0]
        safe = np.where(z == 0, 1.0, z)
        v = chart0_pair(1.0 / safe)[0]
        return np.where(z == 0, 0.0, v)

    def lap(chart: int, z: np.ndarray) -> np.ndarray:
        if chart == 0:
            return chart0_pair(z)[1]
        safe = np.where(z == 0, 1.0, z)
        l0 = chart0_pair(1.0 / safe)[1]
        return np.where(z == 0, 0.0, l0 / np.abs(safe) ** 4)

    return ChartFunction(f"bump({z0.real:g}{z0.imag:+g}i,{radius:g})", val, lap)


def _smooth_cutoff(s: np.ndarray, a: float) -> np.ndarray:
    """chi(s): 1 for s <= e^-a, 0 for s >= e^a, quintic in log s between;
    satisfies chi(s) + chi(1/s) = 1 exactly."""
    with np.errstate(divide="ignore"):
        u = np.clip((np.log(np.maximum(s, 1e-300)) / a + 1.0) / 2.0, 0.0, 1.0)
    smooth = u**3 * (6.0 * u**2 - 15.0 * u + 10.0)
    return 1.0 - smooth


class PairingGrid:
    """Cell-centered quadrature data for pairing test functions against the
    current of a lift sequence (or against omega_FS alone when seq is None).

    P^1 only.  Two charts cover the sphere with disks |z| <= R = e^a glued
    by a smooth partition of unity; all arrays are flattened row-major over
    the full square [-R, R]^2 (points outside the disk simply carry weight
    zero, and the CSV export wants the full square anyway).
    """

    def __init__(
        self,
        seq: LiftSequence | None,
        resolution: int = 512,
        transition: float = DEFAULT_TRANSITION,
        green_tol: float = 1e-9,
        workers: int = 1,
    ):
        if seq is not None and seq.num_vars != 2:
            raise UnsupportedDimension("current_pairing is implemented for P^1")
        self.resolution = int(resolution)
        self.transition = float(transition)
        self.radius = math.exp(self.transition)
        self.green_tol = float(green_tol)
        n = self.resolution
        r = self.radius
        self.cell = 2.0 * r / n
        centers = (np.arange(n) + 0.5) * self.cell - r
        xx, yy = np.meshgrid(centers, centers, indexing="xy")
        z = (xx + 1j * yy).ravel()
        self.charts = []
        for chart in (0, 1):
            if chart == 0:
                emb = np.vstack([np.ones_like(z), z])
            else:
                emb = np.vstack([z, np.ones_like(z)])
            if seq is None:
                g = np.zeros(z.shape, dtype=float)
                depth = 0
            else:
                g, depth, _ = _chunked_green(seq, emb, self.green_tol, workers)
            u = np.log1p(np.abs(z) ** 2) - g
            self.charts.append(
                {
                    "z": z,
                    "x": xx.ravel(),
                    "y": yy.ravel(),
                    "rho": _smooth_cutoff(np.abs(z), self.transition),
                    "fs": (1.0 / math.pi) / (1.0 + np.abs(z) ** 2) ** 2,
                    "green": g,
                    "u": u,
                    "depth": depth,
                }
            )

    def pair(self, phi: ChartFunction) -> float:
        """T(phi) = integral phi omega_FS - integral u dd^c phi."""
        total = 0.0
        w = self.cell**2
        for chart, data in enumerate(self.charts):
            vals = phi.value(chart, data["z"])
            laps = phi.laplacian(chart, data["z"])
            integrand = data["rho"] * (
                vals * data["fs"] - data["u"] * laps / (4.0 * math.pi)
            )
            total += float(np.sum(integrand)) * w
        return total

    def mass(self) -> float:
        return self.pair(constant_one())

    def chart_rows(self, chart: int):
        """(x, y, G, psi) tuples over the full square grid of one chart."""
        data = self.charts[chart]
        return zip(data["x"], data["y"], data["green"], data["u"])


def _chunked_green(
    seq: LiftSequence, emb: np.ndarray, tol: float, workers: int
) -> tuple[np.ndarray, int, float]:
    if workers <= 1 or emb.shape[1] < 4096:
        return green_values(seq, emb, tol)
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(np.arange(emb.shape[1]), workers)
    out = np.empty(emb.shape[1], dtype=float)
    depth = 0
    radius = 0.0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(
            lambda idx: (idx, green_values(seq, emb[:, idx], tol)), chunks
        )
        for idx, (vals, d, rad) in results:
            out[idx] = vals
            depth, radius = d, rad
    return out, depth, radius


def current_pairing(
    seq: LiftSequence,
    phi: ChartFunction,
    resolution: int = 512,
    transition: float = DEFAULT_TRANSITION,
    green_tol: float = 1e-9,
    workers: int = 1,
) -> float:
    """One-off pairing; build a PairingGrid directly to pair many functions
    against the same current."""
    grid = PairingGrid(seq, resolution, transition, green_tol, workers)
    return grid.pair(phi)


@dataclass(frozen=True)
class LiftScalingReport:
    """Measured vs predicted Green shift under per-step lift rescaling."""

    delta_green: float
    predicted: float
    error: float
    psi_delta: float
    depth: int
    passed: bool


def lift_scaling_check(
    seq: LiftSequence,
    scalars: Sequence[complex],
    x: Sequence[complex],
    tol: float = 1e-10,
    check_tol: float = 1e-8,
) -> LiftScalingReport:
    """Verify G_scaled - G = sum_k log|c_k|^2 / (d_1 .. d_k).

    Both Green functions run to the same depth (at least len(scalars)), so
    the identity holds exactly up to float accumulation; psi shifts by the
    opposite constant.
    """
    scaled = seq.scaled(scalars)
    depth = max(
        _plan_depth(seq, tol, None),
        _plan_depth(scaled, tol, None),
        len(scalars),
    )
    g0 = green_function(seq, x, tol, depth=depth)
    g1 = green_function(scaled, x, tol, depth=depth)
    predicted = 0.0
    prod = 1
    for k, s in enumerate(scalars):
        prod *= seq.lift_at(k).degree
        predicted += math.log(abs(complex(s)) ** 2) / prod
    delta = g1.value - g0.value
    err = abs(delta - predicted)
    return LiftScalingReport(
        delta_green=delta,
        predicted=predicted,
        error=err,
        psi_delta=-delta,
        depth=depth,
        passed=err <= check_tol,
    )
