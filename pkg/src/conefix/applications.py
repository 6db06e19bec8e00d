"""Coupled scalar systems and initial value problem pairs solved by
certified Picard iteration.

Two application shapes live here.  The first turns a pair of scalar
equations F(x, y) = 0, G(x, y) = 0 into the self map
(x, y) -> (x + F(x, y), y + G(x, y)) and solves it as a contraction on the
plane with the coordinatewise absolute-difference distance.  The declared
contraction condition perturbs one variable at a time, so systems whose
cross dependence matters need the condition check disabled and carry no
certificate; see coupled_solve.

The second builds a weighted-norm certificate for a pair of decoupled
initial value problems y' = f(x, y), z' = g(x, z) on a shared interval and
solves both by integral Picard iteration on a fixed grid.  The solve
interval half-width comes from an inflated bound on |f| and |g| so the
iterates provably stay inside the stated tube, and the weight rates are
chosen so the iteration contracts with factor at most one half.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import R2Elem, cone_compare, norm, spectral_radius
from .algebra import _neumann_with_tail
from .errors import (
    ConditionViolated,
    DegenerateBox,
    LeftInvariantSet,
    NoConvergence,
)
from .fixed_point import (
    ContractionMap,
    ConvergenceReport,
    MapFamily,
    _padded_bound,
    picard_solve,
    pointwise_limit_harness,
)
from .grid import GridFunction, cumulative_trapezoid_from
from .spaces import BoxDomain, CSeqProbeConfig, PlaneR2Space, is_c_sequence

__all__ = [
    "CoupledSystem",
    "CouplingCheckReport",
    "CoupledRoot",
    "verify_condition",
    "coupled_solve",
    "coupled_sequence_harness",
    "OdeProblem",
    "OdeCertificate",
    "OdeSolution",
    "ode_certify",
    "ode_solve",
    "ode_sequence_harness",
]


@dataclass(frozen=True)
class CoupledSystem:
    """Pair of scalar equations F(x, y) = 0, G(x, y) = 0 with a declared
    one-variable-at-a-time dissipation rate lip < 1:

        |F(x1, y) - F(x2, y) + (x1 - x2)| <= lip * |x1 - x2|
        |G(x, y1) - G(x, y2) + (y1 - y2)| <= lip * |y1 - y2|
    """

    f: Callable[[float, float], float]
    g: Callable[[float, float], float]
    lip: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lip < 1.0:
            raise ValueError(f"lip must be in [0, 1), got {self.lip}")

    def operator(self, p):
        x, y = p
        return (x + self.f(x, y), y + self.g(x, y))

    def as_contraction(self, domain=None) -> ContractionMap:
        return ContractionMap(self.operator, R2Elem(self.lip, 0.0), domain)


@dataclass(frozen=True)
class CouplingCheckReport:
    samples: int
    violations: int
    worst_excess: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


_DEFAULT_BOX = BoxDomain((-8.0, -8.0), (8.0, 8.0))


def verify_condition(
    system: CoupledSystem,
    box: BoxDomain | None = None,
    samples: int = 2000,
    seed: int = 0,
    slack: float = 1e-12,
) -> CouplingCheckReport:
    """Sample the declared dissipation condition over a box.

    Each sample perturbs one coordinate while holding the other, matching
    the condition as stated; cross dependence between the equations is
    invisible to this check by construction.
    """
    box = box if box is not None else _DEFAULT_BOX
    rng = np.random.default_rng(seed)
    pts = box.sample(rng, 3 * samples)
    violations = 0
    worst = 0.0
    for i in range(samples):
        (x1, y1), (x2, y2), (x3, y3) = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        lhs_f = abs(system.f(x1, y1) - system.f(x2, y1) + (x1 - x2))
        rhs_f = system.lip * abs(x1 - x2) + slack
        lhs_g = abs(system.g(x3, y1) - system.g(x3, y2) + (y1 - y2))
        rhs_g = system.lip * abs(y1 - y2) + slack
        excess = max(lhs_f - rhs_f, lhs_g - rhs_g)
        if excess > 0.0:
            violations += 1
            worst = max(worst, excess)
    return CouplingCheckReport(samples, violations, worst)


@dataclass(frozen=True)
class CoupledRoot:
    x: float
    y: float
    iterations: int
    residual: R2Elem
    converged: bool


def coupled_solve(
    system: CoupledSystem,
    start: tuple[float, float] = (0.0, 0.0),
    tol: float = 1e-10,
    max_iter: int = 100_000,
    check_condition: bool = True,
    box: BoxDomain | None = None,
    seed: int = 0,
) -> CoupledRoot:
    """Solve F = G = 0 by iterating the induced self map.

    With check_condition the declared dissipation condition is sampled
    first and a failure raises ConditionViolated.  Disabling the check
    permits systems with cross dependence; the stopping rule then treats
    the declared lip as a plain heuristic rate and the only guarantee left
    is the final residual test, which requires
    |F| + |G| < tol * (1 + lip) / (1 - lip) at the returned point.
    """
    if check_condition:
        report = verify_condition(system, box, seed=seed)
        if not report.ok:
            raise ConditionViolated(
                f"dissipation condition failed on {report.violations} of "
                f"{report.samples} samples (worst excess {report.worst_excess:.3e})"
            )
    space = PlaneR2Space()
    result = picard_solve(system.as_contraction(), space, tuple(start), tol, max_iter)
    x, y = result.point
    residual = R2Elem(abs(system.f(x, y)), abs(system.g(x, y)))
    allowed = tol * (1.0 + system.lip) / (1.0 - system.lip)
    if norm(residual) >= allowed:
        raise NoConvergence(
            f"root residual {norm(residual):.3e} exceeds {allowed:.3e}; "
            "the declared rate does not describe this system"
        )
    return CoupledRoot(x, y, result.iterations, residual, True)


def coupled_sequence_harness(
    members: Callable[[int], CoupledSystem],
    limit: CoupledSystem,
    indices,
    cfg: CSeqProbeConfig,
    start: tuple[float, float] = (0.0, 0.0),
    coefficient_bound: R2Elem | None = None,
    tol: float = 1e-12,
    fp_cache: dict | None = None,
) -> ConvergenceReport:
    """Roots of a system family against the limit system's root, with the
    varying-coefficient fixed point bound driven by the members'
    displacement at the limit root."""
    space = PlaneR2Space()
    if coefficient_bound is None:
        coefficient_bound = R2Elem(max(members(1).lip, limit.lip), 0.0)
    family = MapFamily(
        lambda n: members(n).as_contraction(),
        limit.as_contraction(),
        coefficient_bound=coefficient_bound,
    )
    return pointwise_limit_harness(
        family, space, cfg, indices, start, tol=tol, fp_cache=fp_cache
    )


# ---------------------------------------------------------------------------
# initial value problem pairs


@dataclass(frozen=True)
class OdeProblem:
    """Decoupled pair y' = f(x, y), z' = g(x, z) with y(center) = y_init,
    z(center) = z_init, studied on the box |x - center| <= x_radius,
    |y - y_init| <= y_radius, |z - z_init| <= z_radius.

    f and g must accept numpy arrays (evaluated on whole grids at once).
    lip_f and lip_g are one-sided rates: |f(x, u) - f(x, v)| <= lip_f|u - v|
    on the box, likewise for g.
    """

    f: Callable
    g: Callable
    center: float
    y_init: float
    z_init: float
    x_radius: float
    y_radius: float
    z_radius: float
    lip_f: float
    lip_g: float


@dataclass(frozen=True)
class OdeCertificate:
    """Solve-interval and contraction data derived from an OdeProblem.

    max_f and max_g carry a five percent inflation over the sampled box
    maxima, so the interval half-width h is slightly conservative and the
    tube invariance survives quadrature and roundoff error.  sample_pts
    records the per-axis mesh density behind those maxima.  tau1 and tau2
    are the weight rates; the weight is exp(-tau * |x - center|), centered
    because integration runs both ways from the initial condition (a weight
    anchored at one end would not contract on the other side).  alpha is
    the contraction coefficient of the integral operator pair under that
    weighted distance.
    """

    h: float
    h1: float
    h2: float
    max_f: float
    max_g: float
    sampled_max_f: float
    sampled_max_g: float
    tau1: float
    tau2: float
    alpha: R2Elem
    lo: float
    hi: float
    center: float
    sample_pts: int

    def to_jsonable(self) -> dict:
        return {
            "h": self.h,
            "h1": self.h1,
            "h2": self.h2,
            "max_f": self.max_f,
            "max_g": self.max_g,
            "sampled_max_f": self.sampled_max_f,
            "sampled_max_g": self.sampled_max_g,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "alpha": [self.alpha.first, self.alpha.second],
            "lo": self.lo,
            "hi": self.hi,
            "center": self.center,
            "sample_pts": self.sample_pts,
        }


_INFLATION = 1.05


def _check_sampled_lipschitz(label: str, fn, xs, us, lip: float, width: float) -> None:
    # all value pairs at every x of the mesh; u differences are exact
    # (linspace steps are dyadic here only by luck, so keep a product-
    # rounding allowance on the right side)
    vals = fn(*np.meshgrid(xs, us, indexing="ij"))
    lhs = np.abs(vals[:, :, None] - vals[:, None, :])
    rhs = lip * np.abs(us[None, :, None] - us[None, None, :])
    slack = 1e-12 * (1.0 + abs(lip) * (1.0 + width))
    worst = float(np.max(lhs - rhs))
    if worst > slack:
        raise ConditionViolated(
            f"declared rate for {label} fails on the sample mesh "
            f"(worst excess {worst:.3e} over slack {slack:.3e})"
        )


def ode_certify(problem: OdeProblem, sample_pts: int = 33) -> OdeCertificate:
    """Derive the certified solve interval and contraction coefficient.

    |f| and |g| are sampled on an endpoint-including mesh of the box and
    inflated by five percent; h1 = min(x_radius, y_radius / max_f) and
    h2 likewise for g, with a vanishing right side meaning no constraint
    (identically zero slope keeps any tube).  The declared one-sided rates
    are sampled on the same mesh (ConditionViolated on failure).  The
    weight rates are tau1 = tau2 = 2 * max(lip_f, lip_g, 1/2), making the
    coefficient's first coordinate lip/tau <= 1/2.
    """
    if problem.x_radius <= 0.0 or problem.y_radius <= 0.0 or problem.z_radius <= 0.0:
        raise DegenerateBox(
            "box half-widths must be positive, got "
            f"({problem.x_radius}, {problem.y_radius}, {problem.z_radius})"
        )
    xs = np.linspace(problem.center - problem.x_radius,
                     problem.center + problem.x_radius, sample_pts)
    ys = np.linspace(problem.y_init - problem.y_radius,
                     problem.y_init + problem.y_radius, sample_pts)
    zs = np.linspace(problem.z_init - problem.z_radius,
                     problem.z_init + problem.z_radius, sample_pts)
    _check_sampled_lipschitz("f", problem.f, xs, ys, problem.lip_f, 2.0 * problem.y_radius)
    _check_sampled_lipschitz("g", problem.g, xs, zs, problem.lip_g, 2.0 * problem.z_radius)
    xg, yg = np.meshgrid(xs, ys, indexing="ij")
    sampled_f = float(np.max(np.abs(problem.f(xg, yg))))
    xg, zg = np.meshgrid(xs, zs, indexing="ij")
    sampled_g = float(np.max(np.abs(problem.g(xg, zg))))
    max_f = _INFLATION * sampled_f
    max_g = _INFLATION * sampled_g
    h1 = problem.x_radius if max_f == 0.0 else min(problem.x_radius, problem.y_radius / max_f)
    h2 = problem.x_radius if max_g == 0.0 else min(problem.x_radius, problem.z_radius / max_g)
    h = min(h1, h2)
    tau = 2.0 * max(problem.lip_f, problem.lip_g, 0.5)
    alpha = R2Elem(max(problem.lip_f / tau, problem.lip_g / tau), 0.0)
    return OdeCertificate(
        h, h1, h2, max_f, max_g, sampled_f, sampled_g, tau, tau, alpha,
        problem.center - h, problem.center + h, problem.center, sample_pts,
    )


@dataclass(frozen=True)
class OdeSolution:
    y: GridFunction
    z: GridFunction
    iterations: int
    delta_history: tuple
    ratio_history: tuple[float, ...]
    converged: bool


def _tube_slack(radius: float) -> float:
    return 1e-9 * (1.0 + radius)


def ode_solve(
    problem: OdeProblem,
    grid_pts: int = 257,
    tol: float = 1e-10,
    max_iter: int = 200,
    certificate: OdeCertificate | None = None,
) -> OdeSolution:
    """Integral Picard iteration for both equations on a shared grid.

    grid_pts must be odd so the initial condition sits on the center node;
    each sweep rebuilds y and z from the running integral of the slopes,
    anchored there.  Every iterate is checked against the certified tube
    (LeftInvariantSet on escape).  Iteration stops when the weighted step
    distance certifies tol accuracy at the contraction rate, and raises
    NoConvergence at max_iter.
    """
    if grid_pts < 3 or grid_pts % 2 == 0:
        raise ValueError(f"grid_pts must be odd and at least 3, got {grid_pts}")
    cert = certificate if certificate is not None else ode_certify(problem)
    nodes = np.linspace(cert.lo, cert.hi, grid_pts)
    spacing = (cert.hi - cert.lo) / (grid_pts - 1)
    mid = (grid_pts - 1) // 2
    w1 = np.exp(-cert.tau1 * np.abs(nodes - cert.center))
    w2 = np.exp(-cert.tau2 * np.abs(nodes - cert.center))
    rate = spectral_radius(cert.alpha)
    threshold = tol * (1.0 - rate) / max(rate, 1e-15)
    y = np.full(grid_pts, float(problem.y_init))
    z = np.full(grid_pts, float(problem.z_init))
    deltas: list[R2Elem] = []
    ratios: list[float] = []
    for it in range(1, max_iter + 1):
        y_next = problem.y_init + cumulative_trapezoid_from(problem.f(nodes, y), spacing, mid)
        z_next = problem.z_init + cumulative_trapezoid_from(problem.g(nodes, z), spacing, mid)
        y_exc = float(np.max(np.abs(y_next - problem.y_init))) - problem.y_radius
        z_exc = float(np.max(np.abs(z_next - problem.z_init))) - problem.z_radius
        if y_exc > _tube_slack(problem.y_radius) or z_exc > _tube_slack(problem.z_radius):
            raise LeftInvariantSet(
                f"iterate {it} left the certified tube "
                f"(y excess {max(y_exc, 0.0):.3e}, z excess {max(z_exc, 0.0):.3e})"
            )
        delta = R2Elem(
            float(np.max(np.abs(y_next - y) * w1)),
            float(np.max(np.abs(z_next - z) * w2)),
        )
        deltas.append(delta)
        if len(deltas) >= 2 and norm(deltas[-2]) > 0.0:
            ratios.append(norm(delta) / norm(deltas[-2]))
        y, z = y_next, z_next
        if norm(delta) < threshold or norm(delta) == 0.0:
            return OdeSolution(
                GridFunction(nodes, y),
                GridFunction(nodes, z),
                it,
                tuple(deltas),
                tuple(ratios),
                True,
            )
    raise NoConvergence(f"no settled solution within {max_iter} sweeps (tol {tol})")


def _family_certificate(
    member_cert: OdeCertificate, limit_cert: OdeCertificate, center: float
) -> OdeCertificate:
    """Shared certificate: the tighter interval with the larger rates, so
    one grid and one weight serve every solve in the family."""
    h = min(member_cert.h, limit_cert.h)
    tau1 = max(member_cert.tau1, limit_cert.tau1)
    tau2 = max(member_cert.tau2, limit_cert.tau2)
    alpha = R2Elem(
        max(member_cert.alpha.first, limit_cert.alpha.first),
        max(member_cert.alpha.second, limit_cert.alpha.second),
    )
    return OdeCertificate(
        h,
        min(member_cert.h1, limit_cert.h1),
        min(member_cert.h2, limit_cert.h2),
        max(member_cert.max_f, limit_cert.max_f),
        max(member_cert.max_g, limit_cert.max_g),
        max(member_cert.sampled_max_f, limit_cert.sampled_max_f),
        max(member_cert.sampled_max_g, limit_cert.sampled_max_g),
        tau1,
        tau2,
        alpha,
        center - h,
        center + h,
        center,
        min(member_cert.sample_pts, limit_cert.sample_pts),
    )


def ode_sequence_harness(
    members: Callable[[int], OdeProblem],
    limit: OdeProblem,
    indices,
    cfg: CSeqProbeConfig,
    grid_pts: int = 257,
    tol: float = 1e-10,
    max_iter: int = 200,
    inverse_tail_tol: float = 1e-14,
    solution_cache: dict | None = None,
    distance_log: dict | None = None,
) -> ConvergenceReport:
    """Solutions of a problem family against the limit problem's solution.

    All solves share one certificate (tighter interval, larger rates, built
    from the first member and the limit) so distances compare functions on
    a common grid under a common weight.  Per index n the distance is the
    weighted-norm pair between the member and limit solutions, and the
    certified bound is

        inverse(e - alpha) * d(S_n u, S u) + (2 tol, 2 tol)

    where u is the limit solution and S_n, S are one sweep of the member
    and limit integral operators, both applied literally to u.  The first
    term bounds the gap between the exact solutions; the additive term
    covers the two solver stops, each certified within tol of its exact
    fixed point in every weighted component.

    When a distance_log dict is supplied, every index the probe or the rows
    touch is recorded there as n -> distance element, so callers can study
    the full decay profile without re-solving anything.
    """
    indices = tuple(indices)
    first = members(1)
    if first.center != limit.center:
        raise ValueError("family members and limit must share the expansion center")
    cert = _family_certificate(ode_certify(first), ode_certify(limit), limit.center)
    nodes = np.linspace(cert.lo, cert.hi, grid_pts)
    spacing = (cert.hi - cert.lo) / (grid_pts - 1)
    mid = (grid_pts - 1) // 2
    w1 = np.exp(-cert.tau1 * np.abs(nodes - cert.center))
    w2 = np.exp(-cert.tau2 * np.abs(nodes - cert.center))
    kind = R2Elem
    inv, inv_tail = _neumann_with_tail(cert.alpha, inverse_tail_tol)

    limit_sol = ode_solve(limit, grid_pts, tol, max_iter, cert)
    u_y, u_z = limit_sol.y.values, limit_sol.z.values

    cache = solution_cache if solution_cache is not None else {}

    def solved(n: int) -> OdeSolution:
        got = cache.get(n)
        if got is None:
            got = ode_solve(members(n), grid_pts, tol, max_iter, cert)
            cache[n] = got
        return got

    def distance_to_limit(n: int) -> R2Elem:
        sol = solved(n)
        d = R2Elem(
            float(np.max(np.abs(sol.y.values - u_y) * w1)),
            float(np.max(np.abs(sol.z.values - u_z) * w2)),
        )
        if distance_log is not None:
            distance_log[n] = d
        return d

    def sweep(problem: OdeProblem):
        sy = problem.y_init + cumulative_trapezoid_from(problem.f(nodes, u_y), spacing, mid)
        sz = problem.z_init + cumulative_trapezoid_from(problem.g(nodes, u_z), spacing, mid)
        return sy, sz

    limit_sweep_y, limit_sweep_z = sweep(limit)
    solver_slack = R2Elem(2.0 * tol, 2.0 * tol)
    dists, bounds, respected = [], [], []
    for n in indices:
        dist = distance_to_limit(n)
        member_sweep_y, member_sweep_z = sweep(members(n))
        displacement = R2Elem(
            float(np.max(np.abs(member_sweep_y - limit_sweep_y) * w1)),
            float(np.max(np.abs(member_sweep_z - limit_sweep_z) * w2)),
        )
        bound = _padded_bound(inv, inv_tail, displacement, kind) + solver_slack
        dists.append(dist)
        bounds.append(bound)
        respected.append(cone_compare(dist, bound).le)
    probe = is_c_sequence(distance_to_limit, cfg)
    verdict = all(respected) and probe.passed
    return ConvergenceReport(
        "ode family solution bound",
        indices, tuple(dists), tuple(bounds), tuple(respected), probe, verdict,
    )
