import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minh2r.domains import (
    MINUS,
    PLUS,
    DomainError,
    Edge,
    EdgeData,
    PolygonDomain,
    axis_at_infinity_domain,
    domain_from_text,
    domain_to_text,
    generalized_scherk_polygon,
    helicoid_data,
    helicoidal_sector,
    jenkins_serrin_check,
    nonperiodic_domain,
    onnis_data,
    scherk_triangle,
)
from minh2r.hyperbolic import ORIGIN, IdealPoint


def test_scherk_triangle_layout():
    d = scherk_triangle(2, 1.0)
    assert d.vertices[2].angle == pytest.approx(math.pi / 4)
    kinds = [(e.label, e.data.kind, e.data.value) for e in d.edges]
    assert kinds == [("0p1", "constant", 0.0), ("p1p2", "plus_inf", None), ("0p2", "constant", 1.0)]
    assert scherk_triangle(1, 1.0).vertices[2].angle == pytest.approx(math.pi / 2)
    assert d.geodesic(0).kind == "diameter" and d.geodesic(2).kind == "diameter"


def test_generalized_polygon_alternates():
    d = generalized_scherk_polygon(2, 1.0, [math.pi / 16, math.pi / 8, 3 * math.pi / 16])
    signs = [e.data.sign for e in d.edges]
    assert signs == [0, 1, -1, 1, -1, 0]
    assert generalized_scherk_polygon(2, 1.0, []) == scherk_triangle(2, 1.0)
    k = 4
    qs = [j * math.pi / (2 * 2 * (k - 1)) for j in range(1, k - 1)]
    assert len(generalized_scherk_polygon(2, 1.0, qs).vertices) == 3 + len(qs)


@pytest.mark.parametrize("qs", [[0.0], [math.pi / 4], [0.5, 0.3], [-0.1]])
def test_generalized_polygon_rejects_bad_qs(qs):
    with pytest.raises(DomainError):
        generalized_scherk_polygon(2, 1.0, qs)


def test_parameter_validation():
    with pytest.raises(DomainError):
        scherk_triangle(0, 1.0)
    with pytest.raises(DomainError):
        scherk_triangle(2, 0.0)
    with pytest.raises(DomainError):
        axis_at_infinity_domain(4.0, 1.0)
    with pytest.raises(DomainError):
        helicoidal_sector(4, 1.0, PLUS)


def test_helicoidal_sector_and_jump():
    d = helicoidal_sector(4, 0.5, helicoid_data(4, 0.5))
    assert d.vertices[2].angle == pytest.approx(math.pi / 4)
    assert d.edges[1].kind == "arc"
    assert helicoidal_sector(1, 1.0, EdgeData.constant(0.3)).vertices[2].angle == pytest.approx(math.pi)
    jump = EdgeData.sampled([0.0, 0.4, 0.4, math.pi / 4], [0.0, 0.0, 1.0, 1.0])
    d = helicoidal_sector(4, 1.0, jump)
    assert d.edges[1].data.jumps() == [0.4]
    assert jump.evaluate(0.4) == 0.5
    assert jump.evaluate(0.39) == 0.0 and jump.evaluate(0.41) == 1.0


def test_sampled_rejects_decreasing_and_triple():
    with pytest.raises(DomainError):
        EdgeData.sampled([0.0, 0.2, 0.1], [0, 0, 0])
    with pytest.raises(DomainError):
        EdgeData.sampled([0.0, 0.1, 0.1, 0.1], [0, 0, 1, 2])


def test_axis_at_infinity_variants():
    d = axis_at_infinity_domain(math.pi / 2, 1.0)
    assert [v.angle for v in d.vertices] == pytest.approx([math.pi, 0.0, math.pi / 2])
    assert [e.data.kind for e in d.edges] == ["constant", "plus_inf", "constant"]
    f = onnis_data(math.pi / 2, 1.0)
    d = axis_at_infinity_domain(math.pi / 2, 1.0, "helicoidal", f=f)
    assert d.edges[1].kind == "arc"
    assert d.edges[1].data.evaluate(math.pi / 4) == pytest.approx(0.5)


def test_axis_domain_mirror_symmetry():
    theta = 1.1
    d = axis_at_infinity_domain(theta, 1.0)
    # the reflection across the ray at theta/2 swaps p1 and p2
    a, b = d.vertices[1].angle, d.vertices[2].angle
    assert (theta - a) % (2 * math.pi) == pytest.approx(b)


def test_nonperiodic_flags():
    one = EdgeData.constant(1.0)
    assert nonperiodic_domain(math.pi / 2, one).params["embedding_guaranteed"]
    assert nonperiodic_domain(2 * math.pi / 3, one).params["embedding_guaranteed"]
    neg = EdgeData.from_function(math.cos, 0.0, 2 * math.pi / 3)
    assert not nonperiodic_domain(2 * math.pi / 3, neg).params["embedding_guaranteed"]
    assert nonperiodic_domain(2 * math.pi / 3, neg).edges[0].data.kind == "plus_inf"


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("h", [0.1, 1.0, 10.0])
def test_scherk_triangle_admissible(n, h):
    c = jenkins_serrin_check(scherk_triangle(n, h))
    assert c.admissible and c.margin > 0
    # the truncation cancels: margin = -2 ln sin(pi / 4n)
    assert c.margin == pytest.approx(-2 * math.log(math.sin(math.pi / (4 * n))), abs=1e-9)


@pytest.mark.parametrize("q", [math.pi / 16, math.pi / 8, 3 * math.pi / 16])
def test_k1_polygon_admissible_and_stable(q):
    c = jenkins_serrin_check(generalized_scherk_polygon(2, 1.0, [q]))
    assert c.admissible
    (d0, m0), (d1, m1) = c.history[:2]
    assert d1 == d0 / 2
    assert abs(m1 - m0) <= 0.05 * abs(m0)
    expected = min(-2 * math.log(math.sin(q / 2)), -2 * math.log(math.sin((math.pi / 4 - q) / 2)))
    assert c.margin == pytest.approx(expected, abs=1e-9)


def test_two_consecutive_plus_sides_rejected():
    d = PolygonDomain(
        (ORIGIN, IdealPoint(0.0), IdealPoint(math.pi / 4)),
        (
            Edge(0, 1, "geodesic", PLUS, "0p1"),
            Edge(1, 2, "geodesic", PLUS, "p1p2"),
            Edge(2, 0, "geodesic", EdgeData.constant(1.0), "0p2"),
        ),
    )
    c = jenkins_serrin_check(d)
    assert not c.admissible and c.margin <= 0
    assert c.worst_polygon == (0, 1, 2)


def test_all_infinite_quadrilateral_is_boundary_case():
    vs = tuple(IdealPoint(k * math.pi / 2) for k in range(4))
    es = tuple(Edge(k, (k + 1) % 4, "geodesic", PLUS if k % 2 == 0 else MINUS) for k in range(4))
    c = jenkins_serrin_check(PolygonDomain(vs, es))
    assert c.boundary_case
    assert c.margin == pytest.approx(0.0, abs=1e-9)
    assert not c.admissible


def test_overlapping_horocycles_rejected():
    with pytest.raises(DomainError):
        jenkins_serrin_check(generalized_scherk_polygon(2, 1.0, [1e-3]), delta=0.5, auto_halve=False)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.02, math.pi / 4 - 0.02), min_size=1, max_size=3, unique=True))
def test_admissibility_mirror_invariant(qs):
    qs = sorted(qs)
    if min(np.diff(qs), default=1.0) < 0.03:
        return
    mirrored = sorted(math.pi / 4 - q for q in qs)
    a = jenkins_serrin_check(generalized_scherk_polygon(2, 1.0, qs), delta=0.01, auto_halve=False)
    b = jenkins_serrin_check(generalized_scherk_polygon(2, 1.0, mirrored), delta=0.01, auto_halve=False)
    assert a.admissible == b.admissible
    assert a.margin == pytest.approx(b.margin, rel=1e-9, abs=1e-9)


_samples = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=8)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 6),
    st.floats(0.01, 100, allow_nan=False),
    _samples,
)
def test_round_trip_bit_exact(m, h, vals):
    top = math.pi / m
    f = EdgeData.sampled(np.linspace(0.0, top, len(vals)), vals)
    for d in (
        helicoidal_sector(m, h, f),
        generalized_scherk_polygon(m, h, [top / 5, top / 3]),
        nonperiodic_domain(min(top, 3.0), EdgeData.constant(h)),
    ):
        back = domain_from_text(domain_to_text(d))
        assert back == d
        assert domain_to_text(back) == domain_to_text(d)
