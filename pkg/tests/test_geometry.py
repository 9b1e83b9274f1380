import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fibre_forge.expr import parse
from fibre_forge.forms import Form, evaluate_exprs
from fibre_forge.geometry import (DegreeError, GeometryError, PartitionError, UnknownManifold,
                                  build_atlas, build_partition, catalog_partition, integrate,
                                  set_threads)


@pytest.fixture(scope="module")
def sphere():
    return build_atlas("sphere2", 200)


@pytest.fixture(scope="module")
def torus():
    return build_atlas("torus4", 48)


@pytest.fixture(scope="module")
def circle():
    return build_atlas("circle3", 64)


def test_unknown_manifold_and_bad_resolution():
    with pytest.raises(UnknownManifold):
        build_atlas("klein", 50)
    with pytest.raises(GeometryError):
        build_atlas("sphere2", 4)
    with pytest.raises(GeometryError):
        build_atlas("sphere2", 50.5)


def test_sphere_overlap_maps(sphere):
    pts = sphere.overlap_points(0, 1)
    assert len(pts) and np.all(np.hypot(pts[:, 0], pts[:, 1]) > 0.5)
    q = sphere.transition(0, 1, pts)
    back = sphere.transition(1, 0, q)
    assert np.max(np.abs(back - pts)) < 1e-14
    # w = 1/z: Jacobian against central differences
    h = 1e-6
    jac = sphere.jacobian(0, 1, pts[:50])
    for a in range(2):
        e = np.zeros(2)
        e[a] = h
        fd = (sphere.transition(0, 1, pts[:50] + e) - sphere.transition(0, 1, pts[:50] - e)) / (2 * h)
        assert np.max(np.abs(fd - jac[:, :, a])) < 1e-6


def test_sphere_grid_avoids_the_origin():
    for n in (8, 9, 200, 201):
        pts = build_atlas("sphere2", n).sample_points(0)
        assert np.min(np.hypot(pts[:, 0], pts[:, 1])) > 0


@pytest.mark.parametrize("mid", ["circle3", "torus4"])
def test_periodic_transitions_are_lattice_shifts(mid):
    atlas = build_atlas(mid, 40)
    for (j, i) in atlas.overlaps():
        pts = atlas.overlap_points(i, j)
        shift = (atlas.transition(i, j, pts) - pts) / (2 * math.pi)
        assert np.max(np.abs(shift - np.round(shift))) < 1e-12
        assert np.all(atlas.charts[j].contains(atlas.transition(i, j, pts)))


def test_triple_overlaps_exist(torus, circle):
    assert len(circle.triple_overlaps()) == 0 or all(len(t) == 3 for t in circle.triple_overlaps())
    assert len(torus.triple_overlaps()) > 0


@pytest.mark.parametrize("mid, res", [("sphere2", 60), ("circle3", 64), ("torus4", 40)])
@pytest.mark.parametrize("variant", ["A", "B"])
def test_catalog_partitions_sum_to_one(mid, res, variant):
    atlas = build_atlas(mid, res)
    part = catalog_partition(atlas, variant)
    for i in range(atlas.n_charts):
        pts = atlas.sample_points(i)
        alphas = evaluate_exprs([part.alpha(k, i) for k in range(atlas.n_charts)], pts)
        betas = evaluate_exprs([part.beta(k, i) for k in range(atlas.n_charts)], pts)
        assert np.max(np.abs(alphas.sum(axis=0) - 1)) < 1e-13
        assert np.max(np.abs((betas ** 2).sum(axis=0) - 1)) < 1e-13
        assert np.min(alphas.real) >= -1e-15


def test_partition_rejects_bad_bumps(sphere):
    # |z|^2 does not vanish at the chart edge
    with pytest.raises(PartitionError, match="boundary"):
        build_partition(sphere, ["x^2 + y^2", "1"])
    with pytest.raises(PartitionError):
        build_partition(sphere, ["1 - smoothstep(x^2 + y^2, 1, 3)"])
    torus = build_atlas("torus4", 24)
    with pytest.raises(PartitionError):
        build_partition(torus, ["-1"] * 4)


def test_partition_detects_common_zero():
    atlas = build_atlas("sphere2", 40)
    narrow = "1 - smoothstep(x^2 + y^2, 0.1, 0.2)"
    with pytest.raises(PartitionError, match="common zero"):
        build_partition(atlas, [narrow, narrow])


def test_sphere_area_matches_closed_form(sphere):
    # round metric in either stereographic chart: 4 / (1 + |z|^2)^2 dx^dy
    area = Form(2, 2, {(0, 1): parse("4/(1 + x^2 + y^2)^2")})
    for variant in ("A", "B"):
        total = integrate(sphere, catalog_partition(sphere, variant), [area, area])
        assert abs(total - 4 * math.pi) < 1e-4


def test_stokes_on_the_sphere(sphere):
    # f = 1/(1+|z|^2) and h = x/(1+|z|^2) written in both charts; d(f dh) integrates to 0
    f = [Form.function(2, parse("1/(1 + x^2 + y^2)")),
         Form.function(2, parse("(x^2 + y^2)/(1 + x^2 + y^2)"))]
    h = [Form.function(2, parse("x/(1 + x^2 + y^2)")),
         Form.function(2, parse("x/(1 + x^2 + y^2)"))]
    exact = [f[k].d().wedge(h[k].d()) for k in range(2)]
    pts = sphere.overlap_points(0, 1)[:200]
    q = sphere.transition(0, 1, pts)
    for a, b in ((f[0], f[1]), (h[0], h[1])):
        assert np.max(np.abs(a.evaluate(pts) - b.evaluate(q))) < 1e-13
    val = integrate(sphere, catalog_partition(sphere, "A"), exact)
    assert abs(val) < 1e-6


def test_torus_volume():
    # the steep bump edges limit the midpoint rule: about 1e-5 at 48 nodes, 7e-8 at 160
    torus = build_atlas("torus4", 160)
    vol = Form(2, 2, {(0, 1): parse("1")})
    val = integrate(torus, catalog_partition(torus, "A"), [vol] * 4)
    assert abs(val - 4 * math.pi ** 2) < 1e-6


def test_circle_integral_of_periodic_function():
    circle = build_atlas("circle3", 160)
    form = Form(1, 1, {(0,): parse("1 + exp(i*x)")})
    val = integrate(circle, catalog_partition(circle, "B"), [form] * 3)
    assert abs(val - 2 * math.pi) < 1e-10


def test_integrate_rejects_wrong_degree(sphere):
    with pytest.raises(DegreeError):
        integrate(sphere, catalog_partition(sphere), [Form(2, 1, {(0,): parse("x")})] * 2)


@given(st.integers(1, 6))
@settings(max_examples=6, deadline=None)
def test_integration_is_thread_count_independent(threads):
    atlas = build_atlas("sphere2", 64)
    part = catalog_partition(atlas)
    form = Form(2, 2, {(0, 1): parse("exp(x)*y^2/(1 + x^2 + y^2)^3")})
    set_threads(1)
    ref = integrate(atlas, part, [form, form], chunk=512)
    set_threads(threads)
    try:
        assert integrate(atlas, part, [form, form], chunk=512) == ref
    finally:
        set_threads(1)
