"""Contraction maps on cone metric spaces and convergence-mode checkers.

The solver is plain Picard iteration with an a-posteriori stopping rule: if
the coefficient's spectral radius estimate is r, iteration stops once the
norm of the step distance falls below tol * (1 - r) / max(r, 1e-15), which
converts a step size into a distance-to-fixed-point guarantee.

The harnesses replay limit theorems for families of contractions at desk
scale.  Each harness computes, per index n, the distance between a member
fixed point and the limit fixed point together with the theorem's certified
upper bound for that distance, and reports whether the cone inequality held
and whether the distance sequence passes the smallness probe.

Bounds are outward rounded: series inverses are truncations, so the raw
product (inverse * displacement) can undershoot the true bound by the
dropped tail plus accumulated roundoff.  Every reported bound therefore
adds a certified pad (tail bound plus a roundoff allowance) to both
coordinates.  Without the pad, families that meet their bound with equality
would flip bound_respected on one-ulp noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import cone_compare, mul, norm, scale, spectral_radius
from .algebra import _neumann_with_tail
from .errors import IterateEscapedDomain, NoConvergence, WitnessOutsideDomain
from .spaces import BoxDomain, CSeqProbeConfig, CSeqProbeReport, IntervalDomain, is_c_sequence

__all__ = [
    "ContractionMap",
    "PlainMap",
    "FunctionFamily",
    "MapFamily",
    "FixedPointResult",
    "ContractionCheckReport",
    "ConvergenceReport",
    "verify_contraction",
    "picard_solve",
    "check_pointwise_convergence",
    "check_uniform_convergence",
    "check_equicontinuity",
    "uniform_limit_harness",
    "pointwise_limit_harness",
    "subdomain_limit_harness",
    "fixed_point_cluster_check",
    "property_g_check",
    "property_h_check",
    "h_limit_implies_g_limit_check",
    "g_limit_uniqueness_check",
    "equicontinuous_pointwise_check",
    "dense_sample",
]

_EPS = 2.0 ** -52


@dataclass
class ContractionMap:
    """A self map with a declared cone Lipschitz coefficient.

    The coefficient's spectral radius estimate must be below 1 at
    construction.  verified starts False and is flipped by
    verify_contraction once sampling finds no violations; constructing a
    map does not prove the declared coefficient, it only sanity checks it.
    """

    map: Callable
    alpha: object
    domain: object | None = None
    verified: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        rho = spectral_radius(self.alpha)
        if not rho < 1.0:
            raise ValueError(
                f"declared coefficient has spectral radius estimate {rho}, needs < 1"
            )

    def __call__(self, x):
        return self.map(x)

    @property
    def radius_estimate(self) -> float:
        return spectral_radius(self.alpha)


@dataclass(frozen=True)
class PlainMap:
    """A bare self map with an optional domain, no coefficient attached.

    The convergence-mode checkers only need something to apply, so families
    of non-contractions (the whole point of some counterexamples) wrap
    their callables in this instead of ContractionMap.
    """

    map: Callable
    domain: object | None = None

    def __call__(self, x):
        return self.map(x)


class FunctionFamily:
    """An indexed family of plain maps with a limit, for mode checking.

    Same member/limit/adversarial surface as MapFamily, minus anything
    about coefficients; usable with the pointwise, uniform, and
    equicontinuity checkers but not with the fixed point harnesses.
    """

    def __init__(
        self,
        members: Callable[[int], PlainMap],
        limit: PlainMap,
        adversarial: Callable[[int], list] | None = None,
    ) -> None:
        self._members = members
        self.limit = limit
        self.adversarial = adversarial
        self._cache: dict[int, PlainMap] = {}

    def member(self, n: int) -> PlainMap:
        got = self._cache.get(n)
        if got is None:
            got = self._members(n)
            self._cache[n] = got
        return got


class MapFamily:
    """An indexed family of contraction maps with a limit map.

    members is a callable n -> ContractionMap for n >= 1; lookups are
    memoised because harnesses and probes revisit the same indices.
    coefficient_bound, when given, must dominate every member coefficient
    in the cone order (used by the pointwise-limit bound).  adversarial,
    when given, maps n to extra domain points the uniform checker must
    include for that index.
    """

    def __init__(
        self,
        members: Callable[[int], ContractionMap],
        limit: ContractionMap,
        coefficient_bound=None,
        adversarial: Callable[[int], list] | None = None,
    ) -> None:
        self._members = members
        self.limit = limit
        self.coefficient_bound = coefficient_bound
        self.adversarial = adversarial
        self._cache: dict[int, ContractionMap] = {}

    def member(self, n: int) -> ContractionMap:
        got = self._cache.get(n)
        if got is None:
            got = self._members(n)
            self._cache[n] = got
        return got

    @property
    def bound_coefficient(self):
        return self.coefficient_bound if self.coefficient_bound is not None else self.limit.alpha


@dataclass(frozen=True)
class FixedPointResult:
    point: object
    iterations: int
    residual: object
    converged: bool


@dataclass(frozen=True)
class ContractionCheckReport:
    samples: int
    violations: int
    worst_excess: float
    example: tuple | None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def verify_contraction(
    T: ContractionMap,
    space,
    samples: int = 1000,
    seed: int = 0,
    slack: float = 1e-12,
) -> ContractionCheckReport:
    """Sample point pairs and test d(Tx, Ty) against alpha * d(x, y).

    slack is an absolute allowance added to both coordinates of the right
    side before the exact cone test; it absorbs the one-ulp noise that maps
    with additive constants produce at equality, per the pre-rounding rule
    for order comparisons.  Pass slack=0 for a literal test.  On success
    (zero violations) the map is marked verified.
    """
    rng = np.random.default_rng(seed)
    domain = T.domain if T.domain is not None else space
    pts = domain.sample(rng, 2 * samples)
    pad = type(T.alpha).of(slack, slack)
    violations = 0
    worst = 0.0
    example = None
    for i in range(samples):
        x, y = pts[2 * i], pts[2 * i + 1]
        lhs = space.distance(T.map(x), T.map(y))
        rhs = mul(T.alpha, space.distance(x, y)) + pad
        if not cone_compare(lhs, rhs).le:
            violations += 1
            excess = max(lhs.first - rhs.first, lhs.second - rhs.second)
            if excess > worst:
                worst = excess
                example = (x, y)
    T.verified = violations == 0
    return ContractionCheckReport(samples, violations, worst, example)


def picard_solve(
    T: ContractionMap,
    space,
    x0,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> FixedPointResult:
    """Iterate x <- T(x) until the step distance certifies tol accuracy.

    Raises IterateEscapedDomain if an iterate leaves the declared domain
    and NoConvergence if max_iter is reached first.  A start already at the
    fixed point returns after one application with residual theta.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    r = T.radius_estimate
    threshold = tol * (1.0 - r) / max(r, 1e-15)
    domain = T.domain
    if domain is not None and not domain.contains(x0):
        raise IterateEscapedDomain(f"start point {x0!r} is outside the declared domain")
    x = x0
    for it in range(1, max_iter + 1):
        x_next = T.map(x)
        if domain is not None and not domain.contains(x_next):
            raise IterateEscapedDomain(
                f"iterate {it} left the declared domain: {x_next!r}"
            )
        delta = space.distance(x_next, x)
        step = norm(delta)
        x = x_next
        if step < threshold or step == 0.0:
            residual = space.distance(T.map(x), x)
            return FixedPointResult(x, it, residual, True)
    raise NoConvergence(f"no fixed point within {max_iter} iterations (tol {tol})")


# ---------------------------------------------------------------------------
# convergence mode checkers


def dense_sample(domain, count: int) -> list:
    """Deterministic dense point set for sup-style checks over a domain."""
    if isinstance(domain, IntervalDomain):
        lo, hi = domain.lo, domain.hi
        pts = np.linspace(lo, hi, count)
        step = (hi - lo) / max(count - 1, 1)
        vals = list(map(float, pts))
        if domain.open_lo:
            vals[0] = lo + 0.5 * step
        if domain.open_hi:
            vals[-1] = hi - 0.5 * step
        return vals
    if isinstance(domain, BoxDomain):
        per_axis = max(2, int(math.isqrt(count)))
        xs = np.linspace(domain.lo[0], domain.hi[0], per_axis, endpoint=not domain.open_hi)
        ys = np.linspace(domain.lo[1], domain.hi[1], per_axis, endpoint=not domain.open_hi)
        return [(float(x), float(y)) for x in xs for y in ys]
    raise TypeError(f"no dense sampler for domain type {type(domain).__name__}")


@dataclass(frozen=True)
class PointwiseReport:
    points: tuple
    reports: tuple[CSeqProbeReport, ...]
    passed: bool

    def to_jsonable(self) -> dict:
        return {
            "passed": self.passed,
            "points": [list(p) if isinstance(p, tuple) else p for p in self.points],
            "reports": [r.to_jsonable() for r in self.reports],
        }


def check_pointwise_convergence(
    family: MapFamily,
    space,
    points,
    cfg: CSeqProbeConfig,
) -> PointwiseReport:
    """Probe d(T_n x, T x) separately at each supplied point."""
    reports = []
    limit_map = family.limit.map
    for x in points:
        fx = limit_map(x)
        report = is_c_sequence(
            lambda n: space.distance(family.member(n).map(x), fx), cfg
        )
        reports.append(report)
    return PointwiseReport(tuple(points), tuple(reports), all(r.passed for r in reports))


def _componentwise_sup(values, kind):
    a = max(v.first for v in values)
    b = max(v.second for v in values)
    return kind.of(a, b)


@dataclass(frozen=True)
class UniformReport:
    report: CSeqProbeReport
    grid_size: int
    passed: bool

    def to_jsonable(self) -> dict:
        return {
            "passed": self.passed,
            "grid_size": self.grid_size,
            "report": self.report.to_jsonable(),
        }


def check_uniform_convergence(
    family: MapFamily,
    space,
    cfg: CSeqProbeConfig,
    domain=None,
    grid_count: int = 256,
) -> UniformReport:
    """Probe the per-index sup of d(T_n x, T x) over a dense sample.

    The sup is the componentwise max, which is the least upper bound for
    the componentwise cone order of the shipped algebras.  Per index n the
    sample is the dense grid plus any adversarial points the family
    supplies for that n, so a family can be convicted by witnesses that
    travel with n.
    """
    if domain is None:
        domain = family.limit.domain if family.limit.domain is not None else space.carrier
    base_points = dense_sample(domain, grid_count)
    limit_map = family.limit.map
    kind = space.kind

    def sup_at(n: int):
        member_map = family.member(n).map
        pts = base_points
        if family.adversarial is not None:
            extra = family.adversarial(n)
            for p in extra:
                if not domain.contains(p):
                    raise WitnessOutsideDomain(
                        f"adversarial point {p!r} at index {n} is outside the domain"
                    )
            pts = base_points + list(extra)
        return _componentwise_sup(
            [space.distance(member_map(x), limit_map(x)) for x in pts], kind
        )

    report = is_c_sequence(sup_at, cfg)
    return UniformReport(report, len(base_points), report.passed)


@dataclass(frozen=True)
class EquicontinuityReport:
    """Outcome of the shrink-until-it-works search at one point."""

    point: object
    target: tuple[float, float]
    found_scale: float | None
    scales_tried: tuple[float, ...]
    witnesses_checked: int

    @property
    def found(self) -> bool:
        return self.found_scale is not None


def check_equicontinuity(
    family: MapFamily,
    space,
    x,
    c1,
    schedule: tuple[float, ...] = tuple(0.5 ** i for i in range(13)),
    index_samples: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64),
    witness_count: int = 32,
    seed: int = 0,
) -> EquicontinuityReport:
    """Search for a ball size c2 = s * c1 that the whole family respects.

    For each scale s in the schedule, sample points y with d(x, y) strictly
    below s * c1 and require d(T_n x, T_n y) strictly below c1 at every
    sampled index n.  The first scale where all witnesses pass is reported;
    exhausting the schedule reports found_scale None.  A report, not a
    verdict: failure means the search failed at this resolution.
    """
    rng = np.random.default_rng(seed)
    domain = family.limit.domain if family.limit.domain is not None else space.carrier
    checked = 0
    for s in schedule:
        c2 = scale(s, c1)
        witnesses = []
        attempts = 0
        while len(witnesses) < witness_count and attempts < 200 * witness_count:
            batch = domain.sample(rng, witness_count)
            attempts += len(batch)
            for y in batch:
                if cone_compare(space.distance(x, y), c2).way_below:
                    witnesses.append(y)
                    if len(witnesses) == witness_count:
                        break
        if not witnesses:
            continue  # ball too small to hit by sampling; try the next scale
        ok = True
        for n in index_samples:
            m = family.member(n).map
            tx = m(x)
            for y in witnesses:
                checked += 1
                if not cone_compare(space.distance(tx, m(y)), c1).way_below:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return EquicontinuityReport(
                x, (c1.first, c1.second), s, tuple(schedule), checked
            )
    return EquicontinuityReport(x, (c1.first, c1.second), None, tuple(schedule), checked)


# ---------------------------------------------------------------------------
# limit theorem harnesses


@dataclass(frozen=True)
class ConvergenceReport:
    """Distances, certified bounds, and probe verdicts for a map family.

    Rows are indexed by n; dist and bound are cone elements stored as
    coordinate pairs.  verdict is True when every row respected its bound
    and the distance sequence passed the probe.
    """

    label: str
    indices: tuple[int, ...]
    dists: tuple
    bounds: tuple
    respected: tuple[bool, ...]
    probe: CSeqProbeReport
    verdict: bool

    def rows(self):
        for n, d, b, ok in zip(self.indices, self.dists, self.bounds, self.respected):
            yield n, d, b, ok

    def to_jsonable(self) -> dict:
        return {
            "label": self.label,
            "rows": [
                {
                    "n": n,
                    "dist": [d.first, d.second],
                    "bound": [b.first, b.second],
                    "bound_respected": ok,
                }
                for n, d, b, ok in self.rows()
            ],
            "c_sequence": self.probe.to_jsonable(),
            "verdict": self.verdict,
        }

    def to_csv(self) -> str:
        lines = ["n,dist_c1,dist_c2,bound_c1,bound_c2,bound_respected"]
        for n, d, b, ok in self.rows():
            lines.append(
                f"{n},{d.first!r},{d.second!r},{b.first!r},{b.second!r},{str(ok).lower()}"
            )
        return "\n".join(lines) + "\n"


def _padded_bound(inv, inv_tail: float, displacement, kind):
    """inv * displacement, outward rounded into a certified upper bound."""
    raw = mul(inv, displacement)
    pad = inv_tail * norm(displacement) + 16.0 * _EPS * (1.0 + norm(inv)) * (
        1.0 + norm(displacement)
    )
    return raw + kind.of(pad, pad)


def _solve_members(
    family: MapFamily,
    space,
    start,
    tol: float,
    max_iter: int,
    cache: dict | None,
):
    cache = cache if cache is not None else {}

    def solved(n: int) -> FixedPointResult:
        got = cache.get(n)
        if got is None:
            got = picard_solve(family.member(n), space, start(n), tol, max_iter)
            cache[n] = got
        return got

    return solved


def uniform_limit_harness(
    family: MapFamily,
    space,
    cfg: CSeqProbeConfig,
    indices,
    start,
    start_limit=None,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    fp_cache: dict | None = None,
    inverse_tail_tol: float = 1e-14,
) -> ConvergenceReport:
    """Distance of member fixed points to the limit fixed point, with the
    bound driven by the limit map's displacement at each member's point.

    Per index n the certified bound is

        inverse(e - alpha) * d(T_n x_n, T x_n)

    with alpha the limit coefficient, the inverse taken as an outward
    rounded series sum.  start may be a callable n -> x0 or a single point
    used everywhere; start_limit defaults to the same start.
    """
    indices = tuple(indices)
    start_fn = start if callable(start) else (lambda n: start)
    limit_start = start_limit if start_limit is not None else start_fn(1)
    kind = space.kind
    inv, inv_tail = _neumann_with_tail(family.limit.alpha, inverse_tail_tol)
    solved = _solve_members(family, space, start_fn, tol, max_iter, fp_cache)
    x_star = picard_solve(family.limit, space, limit_start, tol, max_iter).point
    limit_map = family.limit.map

    dists, bounds, respected = [], [], []
    for n in indices:
        x_n = solved(n).point
        dist = space.distance(x_n, x_star)
        displacement = space.distance(family.member(n).map(x_n), limit_map(x_n))
        bound = _padded_bound(inv, inv_tail, displacement, kind)
        dists.append(dist)
        bounds.append(bound)
        respected.append(cone_compare(dist, bound).le)
    probe = is_c_sequence(lambda n: space.distance(solved(n).point, x_star), cfg)
    verdict = all(respected) and probe.passed
    return ConvergenceReport(
        "uniform-limit fixed point bound",
        indices, tuple(dists), tuple(bounds), tuple(respected), probe, verdict,
    )


def pointwise_limit_harness(
    family: MapFamily,
    space,
    cfg: CSeqProbeConfig,
    indices,
    start,
    start_limit=None,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    fp_cache: dict | None = None,
    inverse_tail_tol: float = 1e-14,
) -> ConvergenceReport:
    """Same distances as the uniform-limit harness, but the bound is driven
    by the members' displacement at the limit fixed point,

        inverse(e - M) * d(T_n x_star, T x_star)

    where M dominates every member coefficient (family.coefficient_bound,
    falling back to the limit coefficient for families with a shared one).
    """
    indices = tuple(indices)
    start_fn = start if callable(start) else (lambda n: start)
    limit_start = start_limit if start_limit is not None else start_fn(1)
    kind = space.kind
    inv, inv_tail = _neumann_with_tail(family.bound_coefficient, inverse_tail_tol)
    solved = _solve_members(family, space, start_fn, tol, max_iter, fp_cache)
    x_star = picard_solve(family.limit, space, limit_start, tol, max_iter).point
    fx_star = family.limit.map(x_star)

    dists, bounds, respected = [], [], []
    for n in indices:
        x_n = solved(n).point
        dist = space.distance(x_n, x_star)
        displacement = space.distance(family.member(n).map(x_star), fx_star)
        bound = _padded_bound(inv, inv_tail, displacement, kind)
        dists.append(dist)
        bounds.append(bound)
        respected.append(cone_compare(dist, bound).le)
    probe = is_c_sequence(lambda n: space.distance(solved(n).point, x_star), cfg)
    verdict = all(respected) and probe.passed
    return ConvergenceReport(
        "pointwise-limit fixed point bound",
        indices, tuple(dists), tuple(bounds), tuple(respected), probe, verdict,
    )


def subdomain_limit_harness(
    family: MapFamily,
    space,
    cfg: CSeqProbeConfig,
    indices,
    start,
    witness: Callable[[int], object],
    x_inf=None,
    bound_form: str = "witness",
    responder: Callable[[int], object] | None = None,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    fp_cache: dict | None = None,
    inverse_tail_tol: float = 1e-14,
) -> ConvergenceReport:
    """Fixed point convergence bounds for members living on moving
    sub-domains, measured against a limit fixed point x_inf.

    bound_form "witness": per index n, with y_n = witness(n) a point of the
    member domain,

        bound = inverse(e - k) * (k * d(y_n, x_inf) + d(T_n y_n, T x_inf))

    bound_form "responder": with x_n the member fixed point (the challenge)
    and y_n = responder(n) a point of the limit domain,

        bound = inverse(e - k) * (d(T_n x_n, T y_n) + k * d(y_n, x_n))

    k is the dominating coefficient (family.coefficient_bound, else the
    limit coefficient).  x_inf defaults to solving the limit map from the
    first witness point.
    """
    if bound_form not in ("witness", "responder"):
        raise ValueError("bound_form must be 'witness' or 'responder'")
    if bound_form == "responder" and responder is None:
        raise ValueError("responder form needs a responder callable")
    indices = tuple(indices)
    start_fn = start if callable(start) else (lambda n: start)
    kind = space.kind
    k_coeff = family.bound_coefficient
    inv, inv_tail = _neumann_with_tail(k_coeff, inverse_tail_tol)
    solved = _solve_members(family, space, start_fn, tol, max_iter, fp_cache)
    if x_inf is None:
        x_inf = picard_solve(family.limit, space, witness(1), tol, max_iter).point
    limit_map = family.limit.map

    dists, bounds, respected = [], [], []
    for n in indices:
        member = family.member(n)
        x_n = solved(n).point
        dist = space.distance(x_n, x_inf)
        if bound_form == "witness":
            y_n = witness(n)
            if member.domain is not None and not member.domain.contains(y_n):
                raise WitnessOutsideDomain(
                    f"witness at index {n} is outside the member domain: {y_n!r}"
                )
            displacement = mul(k_coeff, space.distance(y_n, x_inf)) + space.distance(
                member.map(y_n), limit_map(x_inf)
            )
        else:
            y_n = responder(n)
            if family.limit.domain is not None and not family.limit.domain.contains(y_n):
                raise WitnessOutsideDomain(
                    f"responder point at index {n} is outside the limit domain: {y_n!r}"
                )
            displacement = space.distance(member.map(x_n), limit_map(y_n)) + mul(
                k_coeff, space.distance(y_n, x_n)
            )
        bound = _padded_bound(inv, inv_tail, displacement, kind)
        dists.append(dist)
        bounds.append(bound)
        respected.append(cone_compare(dist, bound).le)
    probe = is_c_sequence(lambda n: space.distance(solved(n).point, x_inf), cfg)
    verdict = all(respected) and probe.passed
    return ConvergenceReport(
        f"sub-domain fixed point bound ({bound_form} form)",
        indices, tuple(dists), tuple(bounds), tuple(respected), probe, verdict,
    )


@dataclass(frozen=True)
class ClusterCheckReport:
    """Existence-of-limit check for a sequence of member fixed points."""

    converged: bool
    cluster_point: object | None
    cluster_radius: float
    fixed_point_residual: object | None
    residual_ok: bool
    conclusion: str

    def to_jsonable(self) -> dict:
        res = self.fixed_point_residual
        return {
            "converged": self.converged,
            "cluster_point": self.cluster_point,
            "cluster_radius": self.cluster_radius,
            "residual": None if res is None else [res.first, res.second],
            "residual_ok": self.residual_ok,
            "conclusion": self.conclusion,
        }


def fixed_point_cluster_check(
    family: MapFamily,
    space,
    indices,
    start,
    tol: float = 1e-4,
    solver_tol: float = 1e-12,
    max_iter: int = 100_000,
    polish_cap: int = 5000,
    fp_cache: dict | None = None,
) -> ClusterCheckReport:
    """Test whether member fixed points settle, and if so whether the
    settling value is fixed by the limit map.

    The last quarter of the solved fixed points must sit inside a ball of
    radius 10 * tol around their final value; otherwise the report says
    not convergent and draws no conclusion.  On a cluster, the candidate is
    polished by iterating the limit map until the float iteration reaches
    an exact fixed point or polish_cap applications pass, and the residual
    d(y, T y) at the polished point is reported, acceptable when its norm
    is at most 10 * tol.
    """
    indices = tuple(indices)
    start_fn = start if callable(start) else (lambda n: start)
    solved = _solve_members(family, space, start_fn, solver_tol, max_iter, fp_cache)
    points = [solved(n).point for n in indices]
    quarter = points[-max(1, len(points) // 4):]
    anchor = quarter[-1]
    radius = max(norm(space.distance(p, anchor)) for p in quarter)
    if radius > 10.0 * tol:
        return ClusterCheckReport(
            False, None, radius, None, False, "not convergent, no conclusion"
        )
    y = anchor
    limit_map = family.limit.map
    for _ in range(polish_cap):
        y_next = limit_map(y)
        if y_next == y:
            break
        y = y_next
    residual = space.distance(y, limit_map(y))
    ok = norm(residual) <= 10.0 * tol
    conclusion = (
        "convergent, limit is a fixed point of the limit map"
        if ok
        else "convergent, but the limit map moves the cluster point"
    )
    return ClusterCheckReport(True, y, radius, residual, ok, conclusion)


# ---------------------------------------------------------------------------
# approximation property checks


@dataclass(frozen=True)
class ApproxPropertyReport:
    """Per-point outcomes for an approximation property of a family."""

    labels: tuple
    point_reports: tuple
    passed: bool

    def to_jsonable(self) -> dict:
        return {
            "passed": self.passed,
            "points": [
                {"point": list(p) if isinstance(p, tuple) else p,
                 "distance_probe": a.to_jsonable(),
                 "image_probe": b.to_jsonable()}
                for p, (a, b) in zip(self.labels, self.point_reports)
            ],
        }


def property_g_check(
    family: MapFamily,
    space,
    witness: Callable[[object], Callable[[int], object]],
    cfg: CSeqProbeConfig,
    points,
) -> ApproxPropertyReport:
    """Approach-from-inside property: every limit-domain point admits a
    sequence through the member domains whose positions and images both
    get small against the probes.

    witness(x) returns the sequence n -> x_n for the point x; each x_n must
    lie in the member domain for its index (WitnessOutsideDomain if not).
    """
    limit_map = family.limit.map
    reports = []
    for x in points:
        seq = witness(x)

        def checked_seq(n: int, seq=seq):
            y = seq(n)
            dom = family.member(n).domain
            if dom is not None and not dom.contains(y):
                raise WitnessOutsideDomain(
                    f"witness at index {n} is outside the member domain: {y!r}"
                )
            return y

        fx = limit_map(x)
        dist_rep = is_c_sequence(lambda n: space.distance(checked_seq(n), x), cfg)
        image_rep = is_c_sequence(
            lambda n: space.distance(family.member(n).map(checked_seq(n)), fx), cfg
        )
        reports.append((dist_rep, image_rep))
    passed = all(a.passed and b.passed for a, b in reports)
    return ApproxPropertyReport(tuple(points), tuple(reports), passed)


def property_h_check(
    family: MapFamily,
    space,
    challenge: Callable[[int], object],
    responder: Callable[[Callable[[int], object]], Callable[[int], object]],
    cfg: CSeqProbeConfig,
) -> ApproxPropertyReport:
    """Answer-from-inside property: for a challenge sequence through the
    member domains, the responder must produce limit-domain points that
    track the challenge and whose limit-map images track the member images.
    """

    def checked_challenge(n: int):
        x = challenge(n)
        dom = family.member(n).domain
        if dom is not None and not dom.contains(x):
            raise WitnessOutsideDomain(
                f"challenge at index {n} is outside the member domain: {x!r}"
            )
        return x

    answer = responder(checked_challenge)

    def checked_answer(n: int):
        y = answer(n)
        dom = family.limit.domain
        if dom is not None and not dom.contains(y):
            raise WitnessOutsideDomain(
                f"responder point at index {n} is outside the limit domain: {y!r}"
            )
        return y

    limit_map = family.limit.map
    dist_rep = is_c_sequence(
        lambda n: space.distance(checked_challenge(n), checked_answer(n)), cfg
    )
    image_rep = is_c_sequence(
        lambda n: space.distance(
            family.member(n).map(checked_challenge(n)), limit_map(checked_answer(n))
        ),
        cfg,
    )
    passed = dist_rep.passed and image_rep.passed
    return ApproxPropertyReport(("challenge",), ((dist_rep, image_rep),), passed)


@dataclass(frozen=True)
class CompositeCheckReport:
    """Hypothesis-by-hypothesis outcomes plus the implied conclusion."""

    hypotheses: dict
    conclusion_passed: bool
    detail: object | None

    def to_jsonable(self) -> dict:
        hyp = {
            k: (v.to_jsonable() if hasattr(v, "to_jsonable") else v)
            for k, v in self.hypotheses.items()
        }
        det = self.detail.to_jsonable() if hasattr(self.detail, "to_jsonable") else self.detail
        return {"hypotheses": hyp, "conclusion_passed": self.conclusion_passed, "detail": det}


def h_limit_implies_g_limit_check(
    family: MapFamily,
    space,
    witness: Callable[[object], Callable[[int], object]],
    responder,
    cfg: CSeqProbeConfig,
    points,
) -> CompositeCheckReport:
    """Sampled replay of: answer-from-inside plus approachable domains plus
    a sequentially continuous limit map give the approach-from-inside
    property.

    Hypotheses checked empirically: (a) for each sampled point the witness
    sequence approaches it; (b) the limit map is sequentially continuous
    along those witness sequences; (c) the family answers challenges.  The
    conclusion re-runs the approach property with the same witness.
    """
    limit_map = family.limit.map
    approach_ok = True
    continuity_ok = True
    for x in points:
        seq = witness(x)
        rep = is_c_sequence(lambda n: space.distance(seq(n), x), cfg)
        approach_ok = approach_ok and rep.passed
        fx = limit_map(x)
        rep2 = is_c_sequence(lambda n: space.distance(limit_map(seq(n)), fx), cfg)
        continuity_ok = continuity_ok and rep2.passed
    h_rep = property_h_check(family, space, lambda n: witness(points[0])(n), responder, cfg)
    g_rep = property_g_check(family, space, witness, cfg, points)
    return CompositeCheckReport(
        {
            "domains_approachable": approach_ok,
            "limit_map_sequentially_continuous": continuity_ok,
            "answers_challenges": h_rep.passed,
        },
        g_rep.passed,
        g_rep,
    )


def g_limit_uniqueness_check(
    family: MapFamily,
    space,
    other_limit: ContractionMap,
    points,
) -> CompositeCheckReport:
    """Two candidate limit maps of the same family must agree: report the
    worst distance between their images over sampled points."""
    worst = 0.0
    for x in points:
        worst = max(worst, norm(space.distance(family.limit.map(x), other_limit.map(x))))
    agree = worst <= 1e-9
    return CompositeCheckReport(
        {"worst_image_gap_norm": worst}, agree, None
    )


def equicontinuous_pointwise_check(
    family: MapFamily,
    space,
    witness,
    cfg: CSeqProbeConfig,
    points,
    c1,
    seed: int = 0,
) -> CompositeCheckReport:
    """Sampled replay of: approach-from-inside plus equicontinuity at each
    point give plain pointwise convergence of the member images."""
    equi_ok = True
    for x in points:
        rep = check_equicontinuity(family, space, x, c1, seed=seed)
        equi_ok = equi_ok and rep.found
    g_rep = property_g_check(family, space, witness, cfg, points)
    pw = check_pointwise_convergence(family, space, points, cfg)
    return CompositeCheckReport(
        {"equicontinuous_at_points": equi_ok, "approach_property": g_rep.passed},
        pw.passed,
        pw,
    )
