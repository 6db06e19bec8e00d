"""Cone metric spaces over the two shipped algebras, plus sequence probes.

A space bundles a carrier set, an algebra kind, and a distance map into the
cone of that algebra.  Distances are exact float expressions of absolute
differences and maxima; the axiom checker therefore samples points from a
dyadic lattice (steps of 2^-20 across the box) so that every difference,
scale by an integer parameter, and sum in the axiom comparisons is computed
without rounding.  Off-lattice carriers would turn one-ulp roundoff into
spurious axiom violations, which is noise, not geometry.

The convergence probe treats "gets small in the cone sense" operationally:
a sequence passes for a probe c if from some index on every member sits
strictly inside the cone below c, with a configurable tail of consecutive
passing indices required before the verdict counts at the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    R2Elem,
    UT2Elem,
    cone_compare,
    in_cone,
    norm,
    zero,
)
from .errors import MemberOutsideCone, PointOutsideCarrier
from .grid import GridFunction

__all__ = [
    "IntervalDomain",
    "BoxDomain",
    "IntervalUT2Space",
    "PlaneR2Space",
    "BieleckiPairSpace",
    "AxiomReport",
    "check_metric_axioms",
    "CSeqProbeConfig",
    "ProbeOutcome",
    "CSeqProbeReport",
    "default_probes",
    "is_c_sequence",
    "bielecki_norm",
]

# lattice resolution for carrier sampling; fine enough to behave like a
# uniform draw at desk scale, coarse enough that differences are exact
_LATTICE = 1 << 20


def _lattice_draw(rng: np.random.Generator, lo: float, hi: float, count: int,
                  open_hi: bool = False) -> np.ndarray:
    top = _LATTICE if not open_hi else _LATTICE - 1
    j = rng.integers(0, top, size=count, endpoint=True)
    step = (hi - lo) / _LATTICE
    return lo + j * step


@dataclass(frozen=True)
class IntervalDomain:
    """Closed interval on the line, optionally open at either end.

    A single point (lo == hi with both ends closed) is a valid degenerate
    interval; families of shrinking sub-domains start from one.
    """

    lo: float
    hi: float
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("interval must have lo <= hi")
        if self.lo == self.hi and (self.open_lo or self.open_hi):
            raise ValueError("a single-point interval must be closed at both ends")

    def contains(self, x: float) -> bool:
        above = x > self.lo if self.open_lo else x >= self.lo
        below = x < self.hi if self.open_hi else x <= self.hi
        return above and below

    def sample(self, rng: np.random.Generator, count: int) -> list[float]:
        return [float(v) for v in
                _lattice_draw(rng, self.lo, self.hi, count, self.open_hi)]


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned rectangle in the plane, optionally open at the top."""

    lo: tuple[float, float]
    hi: tuple[float, float]
    open_hi: bool = False

    def __post_init__(self) -> None:
        if not (self.lo[0] < self.hi[0] and self.lo[1] < self.hi[1]):
            raise ValueError("box must have lo < hi in both coordinates")

    def contains(self, p: tuple[float, float]) -> bool:
        x, y = p
        if self.open_hi:
            return self.lo[0] <= x < self.hi[0] and self.lo[1] <= y < self.hi[1]
        return self.lo[0] <= x <= self.hi[0] and self.lo[1] <= y <= self.hi[1]

    def sample(self, rng: np.random.Generator, count: int) -> list[tuple[float, float]]:
        xs = _lattice_draw(rng, self.lo[0], self.hi[0], count, self.open_hi)
        ys = _lattice_draw(rng, self.lo[1], self.hi[1], count, self.open_hi)
        return [(float(x), float(y)) for x, y in zip(xs, ys)]


@dataclass(frozen=True)
class IntervalUT2Space:
    """Points of [0, 1]; distance (|x - y|, scale * |x - y|) as a matrix pair.

    The scale parameter must be >= 1.  Integer scales keep the axiom
    arithmetic exact on lattice samples.
    """

    scale_param: float = 1.0
    kind = UT2Elem

    def __post_init__(self) -> None:
        if not self.scale_param >= 1.0:
            raise ValueError("scale_param must be >= 1")

    @property
    def carrier(self) -> IntervalDomain:
        return IntervalDomain(0.0, 1.0)

    def contains(self, x: float) -> bool:
        return 0.0 <= x <= 1.0

    def sample(self, rng: np.random.Generator, count: int) -> list[float]:
        return self.carrier.sample(rng, count)

    def distance(self, x: float, y: float) -> UT2Elem:
        if not (self.contains(x) and self.contains(y)):
            raise PointOutsideCarrier(f"point outside [0, 1]: {x!r}, {y!r}")
        m = abs(x - y)
        return UT2Elem(m, self.scale_param * m)


@dataclass(frozen=True)
class PlaneR2Space:
    """Rectangle in the plane; distance is the componentwise absolute gap.

    The carrier box may be unbounded; sampling then falls back to the
    sample_box window, which must be finite.
    """

    lo: tuple[float, float] = (-math.inf, -math.inf)
    hi: tuple[float, float] = (math.inf, math.inf)
    open_hi: bool = False
    sample_box: tuple[tuple[float, float], tuple[float, float]] = ((-8.0, -8.0), (8.0, 8.0))
    kind = R2Elem

    def contains(self, p: tuple[float, float]) -> bool:
        x, y = p
        if self.open_hi:
            return self.lo[0] <= x < self.hi[0] and self.lo[1] <= y < self.hi[1]
        return self.lo[0] <= x <= self.hi[0] and self.lo[1] <= y <= self.hi[1]

    def _sampling_domain(self) -> BoxDomain:
        lo = (max(self.lo[0], self.sample_box[0][0]), max(self.lo[1], self.sample_box[0][1]))
        hi = (min(self.hi[0], self.sample_box[1][0]), min(self.hi[1], self.sample_box[1][1]))
        return BoxDomain(lo, hi, open_hi=self.open_hi)

    @property
    def carrier(self) -> BoxDomain:
        # the samplable stand-in for the carrier: the box itself when finite,
        # clipped to the sample window when unbounded
        return self._sampling_domain()

    def sample(self, rng: np.random.Generator, count: int) -> list[tuple[float, float]]:
        return self._sampling_domain().sample(rng, count)

    def distance(self, p: tuple[float, float], q: tuple[float, float]) -> R2Elem:
        if not (self.contains(p) and self.contains(q)):
            raise PointOutsideCarrier(f"point outside carrier box: {p!r}, {q!r}")
        return R2Elem(abs(p[0] - q[0]), abs(p[1] - q[1]))


def bielecki_norm(f: GridFunction, tau: float, offset: float = 0.0) -> float:
    """Weighted sup norm max |f(t)| * exp(-tau * (t - offset)) over the grid.

    At tau = 0 the weights are exactly one and this is the plain max norm.
    """
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        return f.max_abs()
    weights = np.exp(-tau * (f.nodes - offset))
    return float(np.max(np.abs(f.values) * weights))


@dataclass(frozen=True)
class BieleckiPairSpace:
    """Pairs of grid functions measured in a pair of weighted sup norms.

    Points are (y, z) tuples of GridFunction on this space's grid.  The
    distance is an R2Elem whose coordinates are the weighted norms of the
    coordinate gaps.  The weight anchor (offset) is shared by both norms.

    The weights this space uses are exp(-tau * (t - offset)) rounded to 29
    significand bits (relative error below 2^-29).  With sampled values on
    the dyadic lattice, every |gap| * weight product is then exactly
    representable, which carries the triangle inequality through the maxima
    without roundoff; true exponential weights would leak one-ulp axiom
    violations.  The module preamble explains the same tradeoff for the
    point carriers.
    """

    lo: float
    hi: float
    grid_pts: int
    tau1: float
    tau2: float
    offset: float
    value_box: tuple[float, float] = (-1.0, 1.0)
    kind = R2Elem

    def __post_init__(self) -> None:
        if self.grid_pts < 2:
            raise ValueError("grid_pts must be >= 2")
        if not self.lo < self.hi:
            raise ValueError("interval must have lo < hi")
        if self.tau1 < 0.0 or self.tau2 < 0.0:
            raise ValueError("weights need tau >= 0")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.grid_pts)

    def _weights(self, tau: float) -> np.ndarray:
        raw = np.exp(-tau * (self.nodes - self.offset))
        mant, expo = np.frexp(raw)
        return np.ldexp(np.round(np.ldexp(mant, 29)), expo - 29)

    def contains(self, p: tuple[GridFunction, GridFunction]) -> bool:
        y, z = p
        ok_grid = (
            y.nodes.size == self.grid_pts
            and z.nodes.size == self.grid_pts
            and y.same_grid(z)
            and np.array_equal(y.nodes, self.nodes)
        )
        return bool(ok_grid and np.all(np.isfinite(y.values)) and np.all(np.isfinite(z.values)))

    def _snap(self, values: np.ndarray) -> np.ndarray:
        # interpolation rounds off the lattice; snap back so that value
        # differences in the axiom comparisons stay exact
        v_lo, v_hi = self.value_box
        step = (v_hi - v_lo) / _LATTICE
        return v_lo + np.round((values - v_lo) / step) * step

    def sample(self, rng: np.random.Generator, count: int
               ) -> list[tuple[GridFunction, GridFunction]]:
        # random piecewise-linear interpolants: a handful of lattice-valued
        # breakpoints joined linearly, then read off on the grid
        nodes = self.nodes
        pieces = 5
        knots = np.linspace(self.lo, self.hi, pieces)
        out = []
        for _ in range(count):
            fy = _lattice_draw(rng, self.value_box[0], self.value_box[1], pieces)
            fz = _lattice_draw(rng, self.value_box[0], self.value_box[1], pieces)
            y = GridFunction(nodes, self._snap(np.interp(nodes, knots, fy)))
            z = GridFunction(nodes, self._snap(np.interp(nodes, knots, fz)))
            out.append((y, z))
        return out

    def distance(self, p: tuple[GridFunction, GridFunction],
                 q: tuple[GridFunction, GridFunction]) -> R2Elem:
        if not (self.contains(p) and self.contains(q)):
            raise PointOutsideCarrier("pair is not on this space's grid")
        d1 = float(np.max(np.abs((p[0] - q[0]).values) * self._weights(self.tau1)))
        d2 = float(np.max(np.abs((p[1] - q[1]).values) * self._weights(self.tau2)))
        return R2Elem(d1, d2)


def _points_equal(x, y) -> bool:
    if isinstance(x, tuple) and isinstance(x[0], GridFunction):
        return bool(
            np.array_equal(x[0].values, y[0].values)
            and np.array_equal(x[1].values, y[1].values)
        )
    return x == y


@dataclass(frozen=True)
class AxiomReport:
    """Violation tallies from a randomized metric axiom check."""

    samples: int
    d1_violations: int
    d2_violations: int
    d3_violations: int

    @property
    def clean(self) -> bool:
        return self.d1_violations == 0 and self.d2_violations == 0 and self.d3_violations == 0


def check_metric_axioms(space, samples: int = 10_000, seed: int = 0) -> AxiomReport:
    """Sample triples from the carrier and count metric axiom violations.

    Checked per triple (x, y, z):
      positivity and identity: d(x, y) in the cone, theta exactly when x = y,
      and d(x, x) = theta;
      symmetry: d(x, y) equals d(y, x) exactly;
      triangle: d(x, y) precedes d(x, z) + d(z, y) in the cone order.

    Comparisons are exact; see the module docstring for the sampling lattice
    that makes exactness attainable.
    """
    rng = np.random.default_rng(seed)
    pts = space.sample(rng, 3 * samples)
    theta = zero(space.kind)
    d1 = d2 = d3 = 0
    for i in range(samples):
        x, y, z = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        dxy = space.distance(x, y)
        dyx = space.distance(y, x)
        dxz = space.distance(x, z)
        dzy = space.distance(z, y)
        same = _points_equal(x, y)
        if not in_cone(dxy) or (dxy == theta) != same or space.distance(x, x) != theta:
            d1 += 1
        if dxy != dyx:
            d2 += 1
        if not cone_compare(dxy, dxz + dzy).le:
            d3 += 1
    return AxiomReport(samples, d1, d2, d3)


def default_probes(kind) -> tuple:
    """Interior probes (s, s) at four scales, largest first."""
    return tuple(kind.of(s, s) for s in (1.0, 0.1, 0.01, 0.001))


@dataclass(frozen=True)
class CSeqProbeConfig:
    """Probe set and horizon for the empirical smallness check.

    tail_required is the number of consecutive passing indices demanded at
    the end of the horizon before a probe verdict counts as a pass.
    """

    probes: tuple
    horizon: int = 10_000
    tail_required: int = 16
    start: int = 1

    def __post_init__(self) -> None:
        if not self.probes:
            raise ValueError("need at least one probe")
        if not (self.horizon >= self.tail_required >= 1):
            raise ValueError("need horizon >= tail_required >= 1")
        if self.start < 0:
            raise ValueError("start must be >= 0")
        for c in self.probes:
            if not (c.first > 0.0 and c.second > 0.0):
                raise ValueError("probes must lie strictly inside the cone")

    @classmethod
    def default(cls, kind, horizon: int = 10_000, tail_required: int = 16) -> "CSeqProbeConfig":
        return cls(default_probes(kind), horizon, tail_required)


@dataclass(frozen=True)
class ProbeOutcome:
    """Per-probe result: first index from which the sequence stays below."""

    probe: tuple[float, float]
    n_found: int | None
    verdict: bool
    norm_tail_ok: bool

    def to_jsonable(self) -> dict:
        # norm_tail_ok is an in-memory diagnostic; the serialized shape is
        # exactly probe / N_found / verdict
        return {
            "probe": list(self.probe),
            "N_found": self.n_found,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class CSeqProbeReport:
    outcomes: tuple[ProbeOutcome, ...]
    horizon: int
    passed: bool

    def outcome_for(self, probe) -> ProbeOutcome:
        key = (probe.first, probe.second)
        for o in self.outcomes:
            if o.probe == key:
                return o
        raise KeyError(f"no outcome recorded for probe {key}")

    def to_jsonable(self) -> dict:
        return {
            "horizon": self.horizon,
            "passed": self.passed,
            "probes": [o.to_jsonable() for o in self.outcomes],
        }


def is_c_sequence(seq, cfg: CSeqProbeConfig) -> CSeqProbeReport:
    """Probe whether a cone sequence gets eventually small, empirically.

    seq is either a callable on integer indices or an indexable sequence;
    indices cfg.start .. cfg.horizon inclusive are evaluated once.  Every
    entry must lie in the cone (MemberOutsideCone otherwise).

    For each probe c the report carries the least index N such that every
    evaluated entry from N on sits strictly below c in the cone interior
    sense, with N = 0 meaning no entry ever failed.  The probe verdict
    requires the final tail_required indices to pass; a sequence that only
    dips below c briefly does not pass.  The norm_tail_ok flag is a
    diagnostic: whether norm(seq(n)) < norm(c) across that same tail.
    """
    fetch = seq if callable(seq) else seq.__getitem__
    entries = []
    for n in range(cfg.start, cfg.horizon + 1):
        v = fetch(n)
        if not in_cone(v):
            raise MemberOutsideCone(f"entry at index {n} left the cone: {v!r}")
        entries.append(v)
    outcomes = []
    for c in cfg.probes:
        last_fail = None
        for pos, v in enumerate(entries):
            if not cone_compare(v, c).way_below:
                last_fail = cfg.start + pos
        if last_fail is None:
            n_found: int | None = 0
            verdict = True
        elif last_fail <= cfg.horizon - cfg.tail_required:
            n_found = last_fail + 1
            verdict = True
        else:
            n_found = None
            verdict = False
        c_norm = norm(c)
        tail = entries[-cfg.tail_required:]
        norm_tail_ok = all(norm(v) < c_norm for v in tail)
        outcomes.append(ProbeOutcome((c.first, c.second), n_found, verdict, norm_tail_ok))
    return CSeqProbeReport(tuple(outcomes), cfg.horizon, all(o.verdict for o in outcomes))
