"""Coupled functional equations and the certified ODE-pair solver."""

import dataclasses

import numpy as np
import pytest

from conefix.algebra import R2Elem, zero
from conefix.applications import (
    CoupledSystem,
    OdeProblem,
    coupled_sequence_harness,
    coupled_solve,
    ode_certify,
    ode_sequence_harness,
    ode_solve,
    verify_condition,
)
from conefix.errors import (
    ConditionViolated,
    DegenerateBox,
    LeftInvariantSet,
    NoConvergence,
)
from conefix.spaces import CSeqProbeConfig

TWO_PROBES = (R2Elem(1.0, 1.0), R2Elem(0.05, 0.05))


def _aligned_system() -> CoupledSystem:
    return CoupledSystem(
        lambda x, y: -0.5 * x + 0.25,
        lambda x, y: -0.5 * y + 0.125,
        0.5,
    )


def _crossed_system() -> CoupledSystem:
    return CoupledSystem(
        lambda x, y: -0.5 * x + 0.125 * y + 1.0,
        lambda x, y: 0.125 * x - 0.5 * y + 1.0,
        0.625,
    )


def _linear_ivp() -> OdeProblem:
    return OdeProblem(
        f=lambda x, y: -y,
        g=lambda x, z: -2.0 * z,
        center=0.0,
        y_init=1.0,
        z_init=1.0,
        x_radius=0.5,
        y_radius=1.0,
        z_radius=1.0,
        lip_f=1.0,
        lip_g=2.0,
    )


# ---------------------------------------------------------------- coupled


def test_coupled_solve_aligned_literal():
    root = coupled_solve(_aligned_system(), tol=1e-12)
    assert root.converged
    assert abs(root.x - 0.5) < 1e-10
    assert abs(root.y - 0.25) < 1e-10
    # both equations are satisfied to solver accuracy at the root
    assert root.residual.first < 1e-11 and root.residual.second < 1e-11


def test_coupled_solve_zeroing_system_stops_at_origin():
    system = CoupledSystem(lambda x, y: -x, lambda x, y: -y, 0.0)
    root = coupled_solve(system)
    assert (root.x, root.y) == (0.0, 0.0)
    assert root.iterations == 1
    assert root.residual == zero(R2Elem)


def test_coupled_solve_crossed_matches_linear_oracle():
    oracle = np.linalg.solve(
        np.array([[0.5, -0.125], [-0.125, 0.5]]), np.array([1.0, 1.0])
    )
    assert oracle[0] == pytest.approx(8.0 / 3.0, rel=1e-12)
    root = coupled_solve(_crossed_system(), tol=1e-12)
    assert abs(root.x - oracle[0]) < 1e-8
    assert abs(root.y - oracle[1]) < 1e-8


def test_coupled_condition_gate():
    steep = CoupledSystem(lambda x, y: -2.0 * x + 1.0, lambda x, y: -0.5 * y, 0.5)
    report = verify_condition(steep, samples=200, seed=3)
    assert report.violations > 0
    with pytest.raises(ConditionViolated):
        coupled_solve(steep)
    # bypassing the gate just exposes the oscillation to the iteration cap
    with pytest.raises(NoConvergence):
        coupled_solve(steep, check_condition=False, max_iter=50)
    assert verify_condition(_crossed_system(), samples=200).violations == 0


def test_coupled_solve_rejects_sloppy_stop():
    """An understated coefficient loosens the stop rule; the final residual
    check must refuse the result instead of returning it."""
    hasty = CoupledSystem(lambda x, y: -0.5 * x + 1.0, lambda x, y: -0.5 * y, 0.01)
    with pytest.raises(NoConvergence):
        coupled_solve(hasty, check_condition=False)


def test_coupled_system_validation():
    with pytest.raises(ValueError):
        CoupledSystem(lambda x, y: 0.0, lambda x, y: 0.0, 1.0)
    with pytest.raises(ValueError):
        CoupledSystem(lambda x, y: 0.0, lambda x, y: 0.0, -0.1)
    assert _aligned_system().as_contraction().alpha == R2Elem(0.5, 0.0)


def test_coupled_sequence_harness_family():
    members = lambda n: CoupledSystem(
        lambda x, y, n=n: -0.5 * x + 0.25 + 1.0 / n,
        lambda x, y: -0.5 * y + 0.125,
        0.5,
    )
    cfg = CSeqProbeConfig(probes=TWO_PROBES, horizon=300)
    cache: dict = {}
    # solve tightly: member and limit share the y equation, and a loose stop
    # leaves a solver gap there bigger than the bound pad
    report = coupled_sequence_harness(
        members, _aligned_system(), range(1, 41), cfg, tol=1e-14, fp_cache=cache
    )
    assert report.verdict and all(report.respected)
    for n in range(1, 41):
        point = cache[n].point
        assert abs(point[0] - (0.5 + 2.0 / n)) < 1e-8
        assert abs(point[1] - 0.25) < 1e-8
    # the default coefficient bound is the shared lip, so the first bound
    # is about twice the first member's equation gap at the limit root
    assert report.bounds[0].first == pytest.approx(2.0, rel=1e-9)


def test_coupled_sequence_harness_frozen_family():
    cfg = CSeqProbeConfig(probes=TWO_PROBES, horizon=60)
    report = coupled_sequence_harness(
        lambda n: _aligned_system(), _aligned_system(), range(1, 11), cfg
    )
    assert report.verdict
    assert all(d == zero(R2Elem) for d in report.dists)
    assert all(o.n_found == 0 for o in report.probe.outcomes)


# ------------------------------------------------------------ certificates


def test_ode_certificate_linear_ivp_fields():
    cert = ode_certify(_linear_ivp())
    assert cert.sampled_max_f == 2.0 and cert.sampled_max_g == 4.0
    assert cert.max_f == 2.1 and cert.max_g == 4.2
    assert cert.h1 == 1.0 / 2.1
    assert cert.h2 == 1.0 / 4.2
    assert cert.h == min(cert.h1, cert.h2) == cert.h2
    assert cert.tau1 == 4.0 and cert.tau2 == 4.0
    assert cert.alpha == R2Elem(0.5, 0.0)
    assert cert.lo == -cert.h and cert.hi == cert.h
    assert cert.center == 0.0 and cert.sample_pts == 33


def test_ode_certificate_narrow_z_budget():
    problem = dataclasses.replace(_linear_ivp(), z_radius=0.1)
    cert = ode_certify(problem)
    assert cert.h2 == 0.1 / cert.max_g
    assert cert.h == min(cert.h1, cert.h2)


def test_ode_certificate_zero_slopes():
    flat = OdeProblem(
        f=lambda x, y: 0.0 * y, g=lambda x, z: 0.0 * z,
        center=0.0, y_init=1.0, z_init=-1.0,
        x_radius=0.5, y_radius=1.0, z_radius=1.0,
        lip_f=0.0, lip_g=0.0,
    )
    cert = ode_certify(flat)
    assert cert.max_f == 0.0 and cert.max_g == 0.0
    assert cert.h1 == cert.h2 == cert.h == 0.5
    assert cert.tau1 == 1.0 and cert.alpha == R2Elem(0.0, 0.0)
    sol = ode_solve(flat, grid_pts=65)
    assert sol.iterations == 1
    assert np.all(sol.y.values == 1.0) and np.all(sol.z.values == -1.0)


def test_ode_certificate_validation():
    with pytest.raises(DegenerateBox):
        ode_certify(dataclasses.replace(_linear_ivp(), x_radius=0.0))
    with pytest.raises(ConditionViolated):
        ode_certify(dataclasses.replace(_linear_ivp(), lip_f=0.5))


def test_ode_certificate_serialization():
    doc = ode_certify(_linear_ivp()).to_jsonable()
    assert set(doc) == {
        "h", "h1", "h2", "max_f", "max_g", "sampled_max_f", "sampled_max_g",
        "tau1", "tau2", "alpha", "lo", "hi", "center", "sample_pts",
    }
    assert doc["alpha"] == [0.5, 0.0]


# ----------------------------------------------------------------- solving


def test_ode_solve_linear_ivp_against_exponentials():
    sol = ode_solve(_linear_ivp(), grid_pts=257, tol=1e-11)
    assert sol.converged
    nodes = sol.y.nodes
    assert float(np.max(np.abs(sol.y.values - np.exp(-nodes)))) < 1e-6
    assert float(np.max(np.abs(sol.z.values - np.exp(-2.0 * nodes)))) < 1e-6
    # observed contraction never outruns the certified coefficient by much
    assert all(r <= 0.5 + 0.05 for r in sol.ratio_history)
    # iterates keep the solution inside the certified tube
    assert float(np.max(np.abs(sol.y.values - 1.0))) <= 1.0 + 1e-9
    assert float(np.max(np.abs(sol.z.values - 1.0))) <= 1.0 + 1e-9


def test_ode_solve_quadrature_only_problem():
    kickless = OdeProblem(
        f=lambda x, y: np.cos(x) + 0.0 * y, g=lambda x, z: 0.0 * z,
        center=0.0, y_init=0.0, z_init=0.0,
        x_radius=0.5, y_radius=1.0, z_radius=1.0,
        lip_f=0.0, lip_g=0.0,
    )
    sol = ode_solve(kickless, grid_pts=257)
    nodes = sol.y.nodes
    assert float(np.max(np.abs(sol.y.values - np.sin(nodes)))) < 1e-5
    assert np.all(sol.z.values == 0.0)


def test_ode_solve_halving_the_spacing_quarters_the_error():
    problem = _linear_ivp()
    errs = []
    for pts in (501, 1001):
        sol = ode_solve(problem, grid_pts=pts, tol=1e-11)
        errs.append(float(np.max(np.abs(sol.y.values - np.exp(-sol.y.nodes)))))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_ode_solve_grid_validation():
    problem = _linear_ivp()
    for bad in (2, 4, 256):
        with pytest.raises(ValueError):
            ode_solve(problem, grid_pts=bad)


def test_ode_solve_refuses_leaky_tube():
    problem = _linear_ivp()
    # certificate doctored to cover a window wider than the safe one; the
    # z component then drifts past its radius and the solver must notice
    wide = dataclasses.replace(ode_certify(problem), h=1.0, lo=-1.0, hi=1.0)
    with pytest.raises(LeftInvariantSet):
        ode_solve(problem, grid_pts=257, certificate=wide)


def test_ode_solve_iteration_budget():
    with pytest.raises(NoConvergence):
        ode_solve(_linear_ivp(), grid_pts=65, max_iter=1)


# ----------------------------------------------------------- ODE families


def test_ode_sequence_harness_damping_family():
    members = lambda n: dataclasses.replace(
        _linear_ivp(),
        f=lambda x, y, n=n: -(1.0 + 1.0 / n) * y,
        lip_f=1.0 + 1.0 / n,
    )
    cfg = CSeqProbeConfig(probes=TWO_PROBES, horizon=60)
    log: dict = {}
    report = ode_sequence_harness(
        members, _linear_ivp(), (1, 2, 5, 10, 20), cfg, distance_log=log
    )
    assert report.verdict and all(report.respected)
    # the z equation is shared, and for every member past the first the
    # sweep counts agree, so the z gap vanishes bitwise
    assert log[1].second > 0.0
    assert all(log[n].second == 0.0 for n in (2, 5, 10, 20))


def test_ode_sequence_harness_forcing_family_decays_linearly():
    limit = _linear_ivp()
    members = lambda n: dataclasses.replace(
        limit, f=lambda x, y, n=n: -y + np.cos(x) / n
    )
    cfg = CSeqProbeConfig(probes=TWO_PROBES, horizon=60)
    log: dict = {}
    cache: dict = {}
    report = ode_sequence_harness(
        members, limit, (8, 16), cfg, distance_log=log, solution_cache=cache
    )
    assert report.verdict
    # variation of constants: the gap to the limit solution scales as 1/n
    assert 1.8 <= log[8].first / log[16].first <= 2.2
    n = 8
    sol = cache[n]
    nodes = sol.y.nodes
    oracle = np.exp(-nodes) + (np.cos(nodes) + np.sin(nodes) - np.exp(-nodes)) / (2.0 * n)
    assert float(np.max(np.abs(sol.y.values - oracle))) < 1e-5


def test_ode_sequence_harness_center_mismatch():
    limit = _linear_ivp()
    members = lambda n: dataclasses.replace(limit, center=0.1)
    cfg = CSeqProbeConfig(probes=TWO_PROBES, horizon=30)
    with pytest.raises(ValueError):
        ode_sequence_harness(members, limit, (1, 2), cfg)


def test_ode_sequence_harness_generator_indices():
    limit = _linear_ivp()
    cfg = CSeqProbeConfig(probes=TWO_PROBES, horizon=30)
    report = ode_sequence_harness(
        (lambda n: limit), limit, (n for n in (1, 3)), cfg
    )
    assert report.indices == (1, 3)
    assert all(d == zero(R2Elem) for d in report.dists)
