"""Contraction solving, convergence-mode checkers, and limit harnesses."""

import pytest

from conefix.algebra import R2Elem, UT2Elem, norm, zero
from conefix.errors import (
    IterateEscapedDomain,
    WitnessOutsideDomain,
)
from conefix.fixed_point import (
    ContractionMap,
    FunctionFamily,
    MapFamily,
    PlainMap,
    check_equicontinuity,
    check_pointwise_convergence,
    check_uniform_convergence,
    dense_sample,
    equicontinuous_pointwise_check,
    fixed_point_cluster_check,
    g_limit_uniqueness_check,
    h_limit_implies_g_limit_check,
    picard_solve,
    pointwise_limit_harness,
    property_g_check,
    property_h_check,
    subdomain_limit_harness,
    uniform_limit_harness,
    verify_contraction,
)
from conefix.errors import NoConvergence
from conefix.spaces import (
    BoxDomain,
    CSeqProbeConfig,
    IntervalDomain,
    IntervalUT2Space,
    PlaneR2Space,
    default_probes,
)

UNIT_INTERVAL = IntervalDomain(0.0, 1.0)


def _half_plus(shift: float, domain=None) -> ContractionMap:
    return ContractionMap(lambda x: 0.5 * x + shift, UT2Elem(0.5, 0.0), domain)


def _shifted_family() -> MapFamily:
    # affine members sliding onto the limit map as the shift dies out
    return MapFamily(
        lambda n: _half_plus(1.0 / (n + 2.0)),
        _half_plus(0.0),
    )


def _subinterval_family() -> MapFamily:
    members = lambda n: ContractionMap(
        lambda x, n=n: 0.5 * x + 1.0 / (2.0 * n),
        UT2Elem(0.5, 0.0),
        IntervalDomain(1.0 / n, 1.0),
    )
    limit = ContractionMap(lambda x: 0.5 * x, UT2Elem(0.5, 0.0), UNIT_INTERVAL)
    return MapFamily(members, limit)


def _power_box_family() -> FunctionFamily:
    """Coordinatewise powers on the open unit box, shrinking to the zero map
    pointwise but not uniformly."""
    box = BoxDomain((0.0, 0.0), (1.0, 1.0), open_hi=True)
    members = lambda n: PlainMap(
        lambda p, n=n: (p[0] ** (n * n), p[1] ** n), box
    )
    limit = PlainMap(lambda p: (0.0, 0.0), box)
    return FunctionFamily(
        members, limit,
        adversarial=lambda n: [(5.0 ** (-1.0 / (n * n)), 3.0 ** (-1.0 / n))],
    )


# ----------------------------------------------------------------- picard


def test_picard_literals():
    space = IntervalUT2Space(1.0)
    res = picard_solve(_half_plus(0.25), space, 0.0)
    assert res.converged
    assert abs(res.point - 0.5) < 1e-10
    assert norm(res.residual) < 1e-9

    plane = PlaneR2Space()
    pair = ContractionMap(
        lambda p: (0.5 * p[0] + 0.25, 0.5 * p[1] + 0.125), R2Elem(0.5, 0.0)
    )
    res = picard_solve(pair, plane, (0.0, 0.0))
    assert abs(res.point[0] - 0.5) < 1e-10
    assert abs(res.point[1] - 0.25) < 1e-10


def test_picard_at_the_fixed_point_stops_immediately():
    space = IntervalUT2Space(1.0)
    res = picard_solve(_half_plus(0.0), space, 0.0)
    assert res.point == 0.0
    assert res.iterations <= 1
    assert res.residual == zero(UT2Elem)


def test_picard_domain_escapes():
    space = IntervalUT2Space(1.0)
    walker = ContractionMap(
        lambda x: x + 0.25, UT2Elem(0.5, 0.0), UNIT_INTERVAL
    )
    with pytest.raises(IterateEscapedDomain):
        picard_solve(walker, space, 0.9)
    with pytest.raises(IterateEscapedDomain):
        picard_solve(_half_plus(0.25, UNIT_INTERVAL), space, 1.5)


def test_picard_iteration_budget():
    space = IntervalUT2Space(1.0)
    with pytest.raises(NoConvergence):
        picard_solve(_half_plus(0.0), space, 1.0, tol=1e-12, max_iter=2)
    with pytest.raises(ValueError):
        picard_solve(_half_plus(0.0), space, 1.0, tol=0.0)


def test_contraction_map_coefficient_validation():
    with pytest.raises(ValueError):
        ContractionMap(lambda x: x, UT2Elem(1.0, 0.0))
    # nilpotent coefficient has radius zero no matter the second entry
    ContractionMap(lambda x: x, UT2Elem(0.0, 5.0))


def test_verify_contraction_accepts_halving():
    space = IntervalUT2Space(1.0)
    t = _half_plus(0.25)
    report = verify_contraction(t, space, samples=400, seed=1, slack=0.0)
    assert report.violations == 0
    assert t.verified

    plane = PlaneR2Space()
    pair = ContractionMap(
        lambda p: (0.5 * p[0] + 0.25, 0.5 * p[1] + 0.125), R2Elem(0.5, 0.0)
    )
    assert verify_contraction(pair, plane, samples=400).violations == 0


def test_verify_contraction_convicts_identity():
    space = IntervalUT2Space(1.0)
    liar = ContractionMap(lambda x: x, UT2Elem(0.5, 0.0))
    report = verify_contraction(liar, space, samples=400, seed=1)
    assert report.violations > 0
    assert report.example is not None
    assert report.worst_excess > 0.0
    assert not liar.verified


# ----------------------------------------------------------------- sampling


def test_dense_sample_intervals():
    pts = dense_sample(UNIT_INTERVAL, 5)
    assert len(pts) == 5
    assert pts[0] == 0.0 and pts[-1] == 1.0
    open_pts = dense_sample(IntervalDomain(0.0, 1.0, open_hi=True), 5)
    assert all(p < 1.0 for p in open_pts)
    assert max(open_pts) > 0.8


def test_dense_sample_boxes():
    pts = dense_sample(BoxDomain((0.0, 0.0), (1.0, 2.0)), 9)
    assert len(pts) == 9
    assert (0.0, 0.0) in pts and (1.0, 2.0) in pts
    with pytest.raises(TypeError):
        dense_sample("not a domain", 4)


# ---------------------------------------------------------------- checkers


def test_pointwise_convergence_on_power_family():
    family = _power_box_family()
    space = PlaneR2Space()
    cfg = CSeqProbeConfig.default(R2Elem, horizon=300)
    report = check_pointwise_convergence(
        family, space, [(0.5, 0.5), (0.9, 0.9)], cfg
    )
    assert report.passed
    assert len(report.reports) == 2


def test_pointwise_convergence_trivial_and_failing():
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig.default(UT2Elem, horizon=100)
    frozen = FunctionFamily(
        lambda n: PlainMap(lambda x: 0.5 * x, UNIT_INTERVAL),
        PlainMap(lambda x: 0.5 * x, UNIT_INTERVAL),
    )
    report = check_pointwise_convergence(frozen, space, [0.0, 0.3, 1.0], cfg)
    assert report.passed
    for rep in report.reports:
        assert all(o.n_found == 0 for o in rep.outcomes)

    stuck = FunctionFamily(
        lambda n: PlainMap(lambda x: x, UNIT_INTERVAL),
        PlainMap(lambda x: 0.0, UNIT_INTERVAL),
    )
    report = check_pointwise_convergence(stuck, space, [0.7], cfg)
    assert not report.passed


def test_uniform_convergence_pass_and_implication():
    space = IntervalUT2Space(1.0)
    family = FunctionFamily(
        lambda n: PlainMap(lambda x, n=n: x / n, UNIT_INTERVAL),
        PlainMap(lambda x: 0.0, UNIT_INTERVAL),
    )
    cfg = CSeqProbeConfig.default(UT2Elem, horizon=2000)
    uniform = check_uniform_convergence(family, space, cfg, grid_count=64)
    assert uniform.passed
    # a uniform pass must imply a pointwise pass over any sampled points
    pointwise = check_pointwise_convergence(family, space, [0.1, 0.5, 1.0], cfg)
    assert pointwise.passed


def test_uniform_convergence_fails_on_power_family():
    family = _power_box_family()
    space = PlaneR2Space()
    pinned = R2Elem(1.0 / 11.0, 1.0 / 8.0)
    cfg = CSeqProbeConfig(probes=(pinned,), horizon=300)
    uniform = check_uniform_convergence(family, space, cfg, grid_count=16)
    assert not uniform.passed
    assert uniform.report.outcome_for(pinned).n_found is None


def test_uniform_convergence_rejects_stray_witness():
    box = BoxDomain((0.0, 0.0), (1.0, 1.0), open_hi=True)
    family = FunctionFamily(
        lambda n: PlainMap(lambda p: (0.0, 0.0), box),
        PlainMap(lambda p: (0.0, 0.0), box),
        adversarial=lambda n: [(1.5, 0.5)],
    )
    cfg = CSeqProbeConfig.default(R2Elem, horizon=50)
    with pytest.raises(WitnessOutsideDomain):
        check_uniform_convergence(family, PlaneR2Space(), cfg, grid_count=4)


def test_equicontinuity_finds_unit_scale_for_mild_families():
    space = IntervalUT2Space(1.0)
    c1 = UT2Elem(0.1, 0.1)
    shrinking = FunctionFamily(
        lambda n: PlainMap(lambda x, n=n: x / n, UNIT_INTERVAL),
        PlainMap(lambda x: 0.0, UNIT_INTERVAL),
    )
    assert check_equicontinuity(shrinking, space, 0.5, c1).found_scale == 1.0
    single = MapFamily(lambda n: _half_plus(0.25), _half_plus(0.25))
    assert check_equicontinuity(single, space, 0.5, c1).found_scale == 1.0


def test_equicontinuity_exhausts_on_steep_powers():
    dom = IntervalDomain(0.0, 1.0, open_hi=True)
    family = FunctionFamily(
        lambda n: PlainMap(lambda x, n=n: x ** n, dom),
        PlainMap(lambda x: 0.0, dom),
    )
    space = IntervalUT2Space(1.0)
    report = check_equicontinuity(
        family, space, 0.999, UT2Elem(0.01, 0.01), schedule=(1.0, 0.5, 0.25)
    )
    assert report.found_scale is None
    assert not report.found
    assert report.scales_tried == (1.0, 0.5, 0.25)


# ---------------------------------------------------------------- harnesses


def test_uniform_limit_harness_equality_family():
    """For the shifted halving family the distance and bound first
    components agree to roundoff, and the bound is never undercut."""
    family = _shifted_family()
    space = IntervalUT2Space(2.0)
    cfg = CSeqProbeConfig(
        probes=(UT2Elem(1.0, 1.0), UT2Elem(0.05, 0.05)), horizon=300
    )
    report = uniform_limit_harness(
        family, space, cfg, range(1, 61), start=0.0, start_limit=0.0, tol=1e-14
    )
    assert report.verdict
    assert all(report.respected)
    assert report.indices == tuple(range(1, 61))
    for dist, bound in zip(report.dists, report.bounds):
        assert abs(dist.first - bound.first) <= 1e-12


def test_uniform_limit_harness_accepts_generator_indices():
    family = _shifted_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5),), horizon=60)
    report = uniform_limit_harness(
        family, space, cfg, (n * n for n in range(1, 4)), start=0.0, start_limit=0.0
    )
    assert report.indices == (1, 4, 9)
    assert len(list(report.rows())) == 3


def test_pointwise_limit_harness_with_varying_coefficients():
    members = lambda n: ContractionMap(
        lambda x, n=n: (0.5 - 1.0 / (n + 3.0)) * x + 1.0 / (n + 2.0),
        UT2Elem(0.5 - 1.0 / (n + 3.0), 0.0),
    )
    family = MapFamily(
        members, _half_plus(0.0), coefficient_bound=UT2Elem(0.5, 0.0)
    )
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(
        probes=(UT2Elem(1.0, 1.0), UT2Elem(0.05, 0.05)), horizon=300
    )
    report = pointwise_limit_harness(
        family, space, cfg, range(1, 41), start=0.0, start_limit=0.0
    )
    assert report.verdict
    assert all(report.respected)


def test_pointwise_limit_harness_on_frozen_family_is_degenerate():
    family = MapFamily(lambda n: _half_plus(0.25), _half_plus(0.25))
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=default_probes(UT2Elem), horizon=40)
    report = pointwise_limit_harness(
        family, space, cfg, range(1, 11), start=0.0, start_limit=0.0
    )
    assert all(d == zero(UT2Elem) for d in report.dists)
    assert all(report.respected)
    assert all(o.n_found == 0 for o in report.probe.outcomes)


def test_convergence_report_serialization():
    family = _shifted_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5),), horizon=60)
    report = uniform_limit_harness(
        family, space, cfg, range(1, 6), start=0.0, start_limit=0.0
    )
    csv = report.to_csv().splitlines()
    assert csv[0] == "n,dist_c1,dist_c2,bound_c1,bound_c2,bound_respected"
    assert len(csv) == 6
    doc = report.to_jsonable()
    assert doc["label"] == "uniform-limit fixed point bound"
    assert len(doc["rows"]) == 5


def test_subdomain_harness_witness_and_responder_forms():
    family = _subinterval_family()
    space = IntervalUT2Space(2.0)
    cfg = CSeqProbeConfig(
        probes=(UT2Elem(1.0, 1.0), UT2Elem(0.05, 0.05)), horizon=300
    )
    edge = lambda n: 1.0 / n
    cache: dict = {}
    witness_rep = subdomain_limit_harness(
        family, space, cfg, range(1, 51), start=1.0,
        witness=edge, x_inf=0.0, fp_cache=cache,
    )
    assert witness_rep.verdict and all(witness_rep.respected)
    assert witness_rep.to_jsonable()["label"].endswith("(witness form)")
    responder_rep = subdomain_limit_harness(
        family, space, cfg, range(1, 51), start=1.0,
        witness=edge, x_inf=0.0, bound_form="responder", responder=edge,
        fp_cache=cache,
    )
    assert responder_rep.verdict and all(responder_rep.respected)
    # witness form pays the coefficient on the witness gap, so it is the
    # looser of the two on this family
    for wide, tight in zip(witness_rep.bounds, responder_rep.bounds):
        assert wide.first >= tight.first - 1e-12


def test_subdomain_harness_defaults_and_validation():
    family = _subinterval_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5),), horizon=60)
    edge = lambda n: 1.0 / n
    # x_inf omitted: the limit fixed point is solved from witness(1)
    report = subdomain_limit_harness(
        family, space, cfg, range(1, 11), start=1.0, witness=edge
    )
    assert report.verdict
    with pytest.raises(ValueError):
        subdomain_limit_harness(
            family, space, cfg, range(1, 4), start=1.0,
            witness=edge, bound_form="responder",
        )
    with pytest.raises(ValueError):
        subdomain_limit_harness(
            family, space, cfg, range(1, 4), start=1.0,
            witness=edge, bound_form="sideways",
        )
    with pytest.raises(WitnessOutsideDomain):
        subdomain_limit_harness(
            family, space, cfg, range(1, 4), start=1.0,
            witness=lambda n: 0.0, x_inf=0.0,
        )


def test_cluster_check_settling_family():
    family = _subinterval_family()
    space = IntervalUT2Space(2.0)
    report = fixed_point_cluster_check(
        family, space, range(1, 201), start=1.0, tol=1e-3
    )
    assert report.converged
    assert report.cluster_point == 0.0
    assert report.fixed_point_residual == zero(UT2Elem)
    assert report.residual_ok
    assert report.conclusion == "convergent, limit is a fixed point of the limit map"


def test_cluster_check_frozen_family():
    family = MapFamily(lambda n: _half_plus(0.25), _half_plus(0.25))
    space = IntervalUT2Space(1.0)
    report = fixed_point_cluster_check(
        family, space, range(1, 41), start=0.0, tol=1e-6
    )
    assert report.converged and report.cluster_radius == 0.0
    assert abs(report.cluster_point - 0.5) < 1e-9
    assert report.residual_ok


def test_cluster_check_oscillating_family_draws_no_conclusion():
    members = lambda n: _half_plus(0.1 if n % 2 else 0.4)
    family = MapFamily(members, _half_plus(0.0))
    space = IntervalUT2Space(1.0)
    report = fixed_point_cluster_check(
        family, space, range(1, 101), start=0.0, tol=1e-3
    )
    assert not report.converged
    assert report.cluster_point is None
    assert report.conclusion == "not convergent, no conclusion"


def test_cluster_check_flags_moved_cluster():
    # member fixed points settle at 1/4, but the limit map swaps around 1/2
    # and never fixes anything reachable by polish
    members = lambda n: _half_plus(0.125)
    limit = ContractionMap(lambda x: 1.0 - x, UT2Elem(0.5, 0.0), UNIT_INTERVAL)
    family = MapFamily(members, limit)
    space = IntervalUT2Space(1.0)
    report = fixed_point_cluster_check(
        family, space, range(1, 41), start=0.0, tol=1e-4
    )
    assert report.converged
    assert not report.residual_ok
    assert report.conclusion == "convergent, but the limit map moves the cluster point"


# ------------------------------------------------------ property G and H


def test_property_g_constant_witness_on_full_domains():
    family = _shifted_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5), UT2Elem(0.05, 0.05)), horizon=120)
    witness = lambda x: (lambda n: x)
    report = property_g_check(family, space, witness, cfg, [0.2, 0.7, 1.0])
    assert report.passed


def test_property_g_edge_witness_on_subdomains():
    family = _subinterval_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5), UT2Elem(0.05, 0.05)), horizon=120)
    witness = lambda x: (lambda n, x=x: max(x, 1.0 / n))
    report = property_g_check(family, space, witness, cfg, [0.0, 0.3, 1.0])
    assert report.passed


def test_property_g_convicts_far_witness():
    space = IntervalUT2Space(1.0)
    frozen = FunctionFamily(
        lambda n: PlainMap(lambda x: x, UNIT_INTERVAL),
        PlainMap(lambda x: x, UNIT_INTERVAL),
    )
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5),), horizon=60)
    report = property_g_check(
        frozen, space, lambda x: (lambda n: 1.0), cfg, [0.3]
    )
    assert not report.passed
    dist_rep, image_rep = report.point_reports[0]
    assert not dist_rep.passed  # the witness never approaches the point
    with pytest.raises(WitnessOutsideDomain):
        property_g_check(
            _subinterval_family(), space, lambda x: (lambda n: 0.0), cfg, [0.5]
        )


def test_property_h_identity_responder_tracks_uniform_families():
    family = _shifted_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5), UT2Elem(0.05, 0.05)), horizon=120)
    challenge = lambda n: 1.0 / n
    report = property_h_check(
        family, space, challenge, lambda seq: seq, cfg
    )
    assert report.passed


def test_property_h_fails_on_power_family_challenge():
    family = _power_box_family()
    space = PlaneR2Space()
    cfg = CSeqProbeConfig(probes=(R2Elem(1.0 / 11.0, 1.0 / 8.0),), horizon=120)
    challenge = lambda n: (5.0 ** (-1.0 / (n * n)), 3.0 ** (-1.0 / n))
    report = property_h_check(family, space, challenge, lambda seq: seq, cfg)
    assert not report.passed
    dist_rep, image_rep = report.point_reports[0]
    assert dist_rep.passed  # responder sits on the challenge itself
    assert not image_rep.passed  # images stay (1/5, 1/3) away from the limit
    with pytest.raises(WitnessOutsideDomain):
        property_h_check(
            family, space, challenge, lambda seq: (lambda n: (1.5, 0.5)), cfg
        )


def test_h_implies_g_composition():
    family = _subinterval_family()
    space = IntervalUT2Space(1.0)
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5), UT2Elem(0.05, 0.05)), horizon=120)
    witness = lambda x: (lambda n, x=x: max(x, 1.0 / n))
    report = h_limit_implies_g_limit_check(
        family, space, witness, lambda seq: seq, cfg, [0.0, 0.5, 1.0]
    )
    assert report.hypotheses["domains_approachable"]
    assert report.hypotheses["limit_map_sequentially_continuous"]
    assert report.hypotheses["answers_challenges"]
    assert report.conclusion_passed


def test_g_limit_uniqueness():
    family = _subinterval_family()
    space = IntervalUT2Space(1.0)
    same = ContractionMap(lambda x: 0.5 * x, UT2Elem(0.5, 0.0), UNIT_INTERVAL)
    report = g_limit_uniqueness_check(family, space, same, [0.0, 0.25, 1.0])
    assert report.hypotheses["worst_image_gap_norm"] == 0.0
    assert report.conclusion_passed

    shifted = ContractionMap(
        lambda x: 0.5 * x + 1e-9, UT2Elem(0.5, 0.0), UNIT_INTERVAL
    )
    report = g_limit_uniqueness_check(family, space, shifted, [0.0, 0.25, 1.0])
    # the gap is reported, not asserted away: both coordinates carry 1e-9
    assert report.hypotheses["worst_image_gap_norm"] == pytest.approx(2e-9, rel=1e-6)
    assert not report.conclusion_passed


def test_equicontinuous_pointwise_composition():
    space = IntervalUT2Space(1.0)
    family = FunctionFamily(
        lambda n: PlainMap(lambda x, n=n: x / n, UNIT_INTERVAL),
        PlainMap(lambda x: 0.0, UNIT_INTERVAL),
    )
    cfg = CSeqProbeConfig(probes=(UT2Elem(0.5, 0.5), UT2Elem(0.05, 0.05)), horizon=120)
    report = equicontinuous_pointwise_check(
        family, space, lambda x: (lambda n: x), cfg, [0.3, 0.6], UT2Elem(0.25, 0.25)
    )
    assert report.hypotheses["equicontinuous_at_points"]
    assert report.hypotheses["approach_property"]
    assert report.conclusion_passed
