import numpy as np
import pytest

from conftest import assert_cloud_equal, brute_hausdorff
from gdifs.contraction import LinearComparison, RatioComparison
from gdifs.exprfn import PointMap
from gdifs.gdsystem import (Edge, GraphIFS, MapEvaluationError,
                            NonConvergenceError, PointCapError,
                            PointCloudVector, apply_T, iterate_attractor,
                            residual, seed_fixed_point, validate)
from gdifs.semimetric import PowerTransformer, SemiMetricSpec

SPEC1 = SemiMetricSpec("euclid1d")


def _edge(src, dst, source, phi):
    return Edge(src, dst, PointMap.from_strings(source), phi)


def _exa1(j_override=None, spec=SPEC1, c=1.0 / 7.0):
    edges = [
        _edge(1, 1, "x/7", LinearComparison(c)),
        _edge(1, 2, "(x+2)/7", LinearComparison(c)),
        _edge(2, 1, "(x+4)/7", LinearComparison(c)),
        _edge(2, 2, "(x+6)/7", LinearComparison(c)),
    ]
    return GraphIFS(2, edges, spec, j_override)


def _exa3(j_override=None):
    edges = [
        _edge(1, 1, "x/(x+1)", RatioComparison()),
        _edge(1, 2, "(x+1)/2", LinearComparison(0.5)),
        _edge(2, 1, "x/2", LinearComparison(0.5)),
        _edge(2, 2, "1/(2-x)", RatioComparison()),
    ]
    return GraphIFS(2, edges, SPEC1, j_override)


def test_validate_exa1_ok(exa1_config):
    report = validate(exa1_config.system)
    assert report.ok
    assert len(report.certificates) == 4
    assert all(cert.passed for _, cert in report.certificates)


def test_validate_missing_outgoing_edge():
    g = GraphIFS(2, [_edge(1, 1, "x/2", LinearComparison(0.5)),
                     _edge(1, 2, "x/3", LinearComparison(0.5))], SPEC1)
    report = validate(g)
    assert not report.ok
    assert any(issue.kind == "no-outgoing-edge" and issue.witness == 2
               for issue in report.issues)


def test_validate_not_self_map():
    g = GraphIFS(1, [_edge(1, 1, "x+1", LinearComparison(0.5))], SPEC1)
    report = validate(g)
    assert any(issue.kind == "not-self-map" and issue.witness == 1.0
               for issue in report.issues)


def test_validate_contraction_violation():
    g = GraphIFS(1, [_edge(1, 1, "x", LinearComparison(0.9))], SPEC1)
    report = validate(g)
    assert any(issue.kind == "contraction-violation" for issue in report.issues)


def test_validate_aggregates_all():
    g = GraphIFS(3, [_edge(1, 1, "x+1", LinearComparison(0.5)),
                     _edge(2, 2, "x", LinearComparison(0.9))], SPEC1)
    report = validate(g)
    kinds = {issue.kind for issue in report.issues}
    assert kinds == {"no-outgoing-edge", "not-self-map", "contraction-violation"}


def test_seed_with_override():
    seed = seed_fixed_point(_exa1(j_override={1: 1, 2: 2}))
    assert abs(seed.z[0]) <= 1e-9
    assert abs(seed.z[1] - 1.0) <= 1e-9
    assert seed.j == {1: 1, 2: 2}
    assert seed.cloud.counts() == (1, 1)


def test_seed_default_j():
    # x = x/7 gives 0; y = (x+4)/7 gives 4/7
    seed = seed_fixed_point(_exa1())
    assert seed.j == {1: 1, 2: 1}
    assert abs(seed.z[0]) <= 1e-9
    assert abs(seed.z[1] - 4.0 / 7.0) <= 1e-9


def test_seed_self_loop_fixed_point():
    # p = p/2 + 1/4 has the unique fixed point 1/2
    g = GraphIFS(1, [_edge(1, 1, "x/2+1/4", LinearComparison(0.5))], SPEC1)
    seed = seed_fixed_point(g)
    assert abs(seed.z[0] - 0.5) <= 1e-9


def test_seed_nonconvergence():
    with pytest.raises(NonConvergenceError):
        seed_fixed_point(_exa3({1: 1, 2: 2}), tol=1e-12, max_iter=50)


def test_seed_override_names_missing_edge():
    with pytest.raises(ValueError):
        seed_fixed_point(_exa1(j_override={1: 2, 2: 3}))


def test_apply_T_exa1():
    H = PointCloudVector.from_points([0.0], [1.0])
    out = apply_T(_exa1(), H)
    assert_cloud_equal(out, [[0.0, 3.0 / 7.0], [4.0 / 7.0, 1.0]])


def test_apply_T_exa3():
    H = PointCloudVector.from_points([0.0], [1.0])
    out = apply_T(_exa3(), H)
    assert_cloud_equal(out, [[0.0, 1.0], [0.0, 1.0]])


def test_apply_T_subinvariant_superset():
    g = _exa1()
    H = PointCloudVector.from_points([0.0], [1.0])
    out = apply_T(g, H)
    for h, t in zip(H.components, out.components):
        assert set(h.tolist()) <= set(t.tolist())


def test_apply_T_dedup_snaps():
    g = GraphIFS(1, [_edge(1, 1, "x/2", LinearComparison(0.5))], SPEC1)
    H = PointCloudVector.from_points([0.60002, 0.59998])
    out = apply_T(g, H, dedup=1e-3)
    assert_cloud_equal(out, [[0.3]])


def test_apply_T_domain_error_witness():
    g = GraphIFS(1, [_edge(1, 1, "1/(1-x)", LinearComparison(0.5))], SPEC1)
    H = PointCloudVector.from_points([1.0])
    with pytest.raises(MapEvaluationError) as err:
        apply_T(g, H)
    assert err.value.edge.label() == "1->1"


def test_residual_exa1_seed():
    # brute-force oracle on the 2-point sets: the value is 3/7
    g = _exa1()
    H = PointCloudVector.from_points([0.0], [1.0])
    T = apply_T(g, H)
    oracle = max(brute_hausdorff(t, h, SPEC1)
                 for t, h in zip(T.components, H.components))
    assert oracle == pytest.approx(3.0 / 7.0, rel=1e-15)
    assert residual(g, H) == oracle


def test_residual_exact_invariant():
    g = GraphIFS(1, [_edge(1, 1, "x/2", LinearComparison(0.5))], SPEC1)
    H = PointCloudVector.from_points([0.0])
    assert residual(g, H) == 0.0


def test_residual_exa3_grid():
    g = _exa3()
    grid = np.linspace(0.0, 1.0, 1001)
    H = PointCloudVector([grid, grid])
    T = apply_T(g, H)
    oracle = max(brute_hausdorff(t, h, SPEC1)
                 for t, h in zip(T.components, H.components))
    assert residual(g, H) == oracle
    assert oracle <= 1e-3


def test_iterate_depth1_exa1():
    g = _exa1()
    seed = PointCloudVector.from_points([0.0], [1.0])
    result = iterate_attractor(g, seed, max_depth=1)
    assert result.depth == 1
    assert_cloud_equal(result.cloud, [[0.0, 3.0 / 7.0], [4.0 / 7.0, 1.0]])
    assert result.residual == pytest.approx(3.0 / 7.0, rel=1e-15)
    assert result.history == [result.residual]


def test_iterate_monotone_inclusion():
    g = _exa1()
    seed = PointCloudVector.from_points([0.0], [1.0])
    prev = iterate_attractor(g, seed, max_depth=3).cloud
    nxt = iterate_attractor(g, seed, max_depth=4).cloud
    for a, b in zip(prev.components, nxt.components):
        assert set(a.tolist()) <= set(b.tolist())


def test_isotone_operator():
    g = _exa1()
    rng = np.random.default_rng(13)
    for _ in range(10):
        B1, B2 = rng.random(7), rng.random(5)
        A1 = B1[rng.random(7) < 0.6]
        A2 = B2[rng.random(5) < 0.6]
        if len(A1) == 0 or len(A2) == 0:
            continue
        TA = apply_T(g, PointCloudVector([A1, A2]))
        TB = apply_T(g, PointCloudVector([B1, B2]))
        for a, b in zip(TA.components, TB.components):
            assert set(a.tolist()) <= set(b.tolist())


def test_iterate_contraction_step():
    g = _exa1()
    seed = PointCloudVector.from_points([0.0], [1.0])
    result = iterate_attractor(g, seed, max_depth=6)
    hist = result.history
    for n in range(1, len(hist)):
        assert hist[n] <= hist[n - 1] / 7.0 + 1e-12


def test_iterate_residual_stop():
    g = _exa1()
    seed = PointCloudVector.from_points([0.0], [1.0])
    result = iterate_attractor(g, seed, max_depth=64, residual_tol=1e-3)
    assert result.residual <= 1e-3
    assert result.depth < 64


def test_iterate_point_cap():
    g = _exa1()
    seed = PointCloudVector.from_points([0.0], [1.0])
    with pytest.raises(PointCapError):
        iterate_attractor(g, seed, max_depth=10, point_cap=50)


def test_iterate_rejects_bad_seed():
    g = _exa1()
    seed = PointCloudVector.from_points([0.3], [0.7])
    with pytest.raises(ValueError):
        iterate_attractor(g, seed, max_depth=2)


def test_seed_independence_small():
    tol = 1e-3
    a = iterate_attractor(_exa1({1: 1, 2: 2}),
                          seed_fixed_point(_exa1({1: 1, 2: 2})).cloud,
                          max_depth=64, residual_tol=tol)
    b = iterate_attractor(_exa1(),
                          seed_fixed_point(_exa1()).cloud,
                          max_depth=64, residual_tol=tol)
    from gdifs.hausdorff import hp_inf
    assert hp_inf(a.cloud, b.cloud, SPEC1) <= 2.0 * tol


def test_transformer_independence_exact():
    # same maps, rescaled certificates; the clouds agree point for point
    plain = _exa1({1: 1, 2: 2})
    powered = _exa1({1: 1, 2: 2},
                    spec=SemiMetricSpec("euclid1d", PowerTransformer(0.5)),
                    c=(1.0 / 7.0) ** 0.5)
    assert validate(powered).ok
    sa = seed_fixed_point(plain)
    sb = seed_fixed_point(powered)
    assert sa.z == sb.z
    ra = iterate_attractor(plain, sa.cloud, max_depth=5)
    rb = iterate_attractor(powered, sb.cloud, max_depth=5)
    for a, b in zip(ra.cloud.components, rb.cloud.components):
        assert np.array_equal(a, b)


def test_point_cloud_vector_invariants():
    pcv = PointCloudVector([np.array([0.5, 0.1, 0.5]), np.array([0.2])])
    assert pcv.counts() == (2, 1)
    assert pcv.dim == 1
    assert np.array_equal(pcv.components[0], [0.1, 0.5])
    with pytest.raises(ValueError):
        PointCloudVector([np.array([0.1]), np.array([[0.1, 0.2]])])


def test_graph_construction_errors():
    with pytest.raises(ValueError):
        GraphIFS(0, [], SPEC1)
    with pytest.raises(ValueError):
        GraphIFS(1, [_edge(1, 2, "x/2", LinearComparison(0.5))], SPEC1)
    with pytest.raises(ValueError):
        GraphIFS(1, [Edge(1, 1, PointMap.from_strings("x/2", "x/2"),
                          LinearComparison(0.5))], SPEC1)


def test_max_comparison_over_edges():
    g = _exa3()
    phi = g.max_comparison()
    assert phi(1.0) == 0.5  # max(1/2, ratio(1)=1/2)
    assert phi(0.1) == pytest.approx(max(0.05, 0.1 / 1.1), abs=1e-16)
