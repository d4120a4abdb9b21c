import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from minh2r.hyperbolic import (
    IDENTITY,
    DegenerateError,
    DiskPoint,
    GeometryError,
    IdealPoint,
    axis_rotation,
    busemann,
    compose,
    geodesic_between,
    horizontal_reflection,
    horocycle_level,
    hyp_distance,
    parabolic_by,
    parabolic_translation,
    point_toward,
    reflect_across,
    rotation_about_origin,
    screw_motion,
    vertical_flip,
    vertical_translation,
)

rng = np.random.default_rng(7)


def random_disk(n, rmax=0.95):
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


disk_points = st.builds(
    lambda r, a: r * cmath.exp(1j * a),
    st.floats(0.0, 0.97),
    st.floats(0.0, 2 * math.pi),
)


def test_distance_trivial_and_quadrature():
    assert hyp_distance(0j, 0j) == 0.0
    expected, _ = quad(lambda r: 2.0 / (1.0 - r * r), 0.0, 0.5, epsabs=1e-14)
    assert hyp_distance(0j, 0.5) == pytest.approx(expected, abs=1e-13)
    assert expected == pytest.approx(1.0986, abs=1e-4)


def test_distance_symmetric_random_pairs():
    p, q = random_disk(100), random_disk(100)
    np.testing.assert_array_equal(hyp_distance(p, q), hyp_distance(q, p))


@settings(max_examples=200, deadline=None)
@given(disk_points, disk_points, disk_points)
def test_triangle_inequality(a, b, c):
    assert hyp_distance(a, c) <= hyp_distance(a, b) + hyp_distance(b, c) + 1e-9


def test_distance_rejects_boundary():
    with pytest.raises(GeometryError):
        hyp_distance(0j, 1.0)
    with pytest.raises(GeometryError):
        DiskPoint(1.0)


def test_ideal_point_normalises():
    assert IdealPoint(-math.pi / 2).angle == pytest.approx(3 * math.pi / 2)
    assert IdealPoint(2 * math.pi).angle == 0.0


def test_geodesic_kinds():
    g = geodesic_between(DiskPoint(0), IdealPoint(0))
    assert g.kind == "diameter" and g.direction == 1
    g = geodesic_between(IdealPoint(0), IdealPoint(math.pi))
    assert g.kind == "diameter"
    g = geodesic_between(IdealPoint(0), IdealPoint(math.pi / 2))
    assert g.kind == "arc"
    assert abs(g.center - (1 + 1j)) < 1e-14
    assert g.radius == pytest.approx(1.0, abs=1e-14)


def test_geodesic_degenerate():
    with pytest.raises(DegenerateError):
        geodesic_between(IdealPoint(1.0), IdealPoint(1.0))
    with pytest.raises(DegenerateError):
        geodesic_between(DiskPoint(0.3j), DiskPoint(0.3j))


@settings(max_examples=200, deadline=None)
@given(disk_points, disk_points)
def test_geodesic_passes_through_and_is_orthogonal(a, b):
    if abs(a - b) < 1e-6:
        return
    g = geodesic_between(DiskPoint(a), DiskPoint(b))
    assert g.orthogonality_residual() < 1e-12 * max(1.0, abs(g.center or 0) ** 2)
    assert g.residual(a) < 1e-9 * max(1.0, g.radius or 1.0)
    assert g.residual(b) < 1e-9 * max(1.0, g.radius or 1.0)


def test_geodesic_between_ideal_points_orthogonal():
    for _ in range(100):
        s, t = rng.random(2) * 2 * np.pi
        g = geodesic_between(IdealPoint(s), IdealPoint(t))
        assert g.orthogonality_residual() < 1e-12 * max(1.0, abs(g.center or 0) ** 2)


def test_reflection_conjugation_and_involution():
    g = geodesic_between(IdealPoint(0), IdealPoint(math.pi))
    assert reflect_across(g, 0.3 + 0.4j) == 0.3 - 0.4j
    for _ in range(50):
        s, t = rng.random(2) * 2 * np.pi
        if abs(s - t) < 1e-3:
            continue
        g = geodesic_between(IdealPoint(s), IdealPoint(t))
        p = random_disk(20)
        np.testing.assert_allclose(g.reflect(g.reflect(p)), p, atol=1e-11)


def test_reflection_fixes_geodesic_and_is_isometry():
    g = geodesic_between(IdealPoint(0.3), IdealPoint(2.0))
    on = np.array([point_toward(_foot(g), g.a.z, d) for d in np.linspace(0, 3, 7)])
    np.testing.assert_allclose(g.reflect(on), on, atol=1e-12)
    p, q = random_disk(100), random_disk(100)
    err = np.abs(hyp_distance(g.reflect(p), g.reflect(q)) - hyp_distance(p, q))
    assert err.max() < 1e-12 * max(1.0, hyp_distance(p, q).max())


def _foot(g):
    # closest point of an arc geodesic to the origin
    c = g.center
    return c / abs(c) * (abs(c) - g.radius)


def test_distance_to_geodesic_matches_sampling():
    g = geodesic_between(IdealPoint(0.2), IdealPoint(1.7))
    foot = _foot(g)
    samples = np.array([point_toward(foot, g.a.z, d) for d in np.linspace(0, 6, 3001)])
    samples = np.concatenate([samples, [point_toward(foot, g.b.z, d) for d in np.linspace(0, 6, 3001)]])
    for z in random_disk(5, 0.6):
        brute = hyp_distance(np.full(samples.shape, z), samples).min()
        assert g.distance(z) == pytest.approx(brute, abs=2e-5)
    d = geodesic_between(IdealPoint(0), IdealPoint(math.pi))
    assert d.distance(0.5j) == pytest.approx(hyp_distance(0, 0.5), abs=1e-14)


def test_busemann_level_of_horocycle():
    delta = 0.05
    assert busemann(1.0, 1.0 - delta) == pytest.approx(horocycle_level(delta), abs=1e-14)
    # along a geodesic into xi the Busemann function drops at unit rate
    xi = cmath.exp(0.7j)
    w = 0.2 + 0.1j
    b0 = busemann(xi, w)
    assert busemann(xi, point_toward(w, xi, 1.3)) == pytest.approx(b0 - 1.3, abs=1e-12)


def test_rotation_about_origin():
    z, t = rotation_about_origin(0.0).apply(0.3 + 0.2j, 1.5)
    assert z == 0.3 + 0.2j and t == 1.5
    z, _ = rotation_about_origin(math.pi).apply(0.3, 0.0)
    assert abs(z + 0.3) < 1e-15
    for n in range(1, 7):
        r = rotation_about_origin(math.pi / n)
        acc = IDENTITY
        for _ in range(2 * n):
            acc = compose(r, acc)
        p = random_disk(10)
        np.testing.assert_allclose(acc.mobius(p), p, atol=1e-12)


def test_parabolic_translation_double_angle():
    theta = math.pi / 3
    p = parabolic_translation(IdealPoint(math.pi), IdealPoint(0.0), IdealPoint(2 * theta))
    assert p.apply_ideal(0.0) == pytest.approx(2 * math.pi / 3, abs=1e-12)
    assert p.apply_ideal(math.pi) == pytest.approx(math.pi, abs=1e-10)
    assert abs(p.mobius(-1.0 + 0j) - (-1.0)) < 1e-10


def test_parabolic_one_parameter_group():
    fixed, src, dst = IdealPoint(math.pi), IdealPoint(0.0), IdealPoint(2 * math.pi / 3)
    p = parabolic_translation(fixed, src, dst)
    pp = compose(p, p)
    assert pp.apply_ideal(src.angle) == pytest.approx(p.apply_ideal(dst.angle), abs=1e-12)
    # P_a o P_b = P_{a+b} on boundary angles
    for a, b in [(0.3, 0.7), (-1.1, 0.4), (2.0, 2.0)]:
        left = parabolic_by(fixed, a).compose(parabolic_by(fixed, b))
        right = parabolic_by(fixed, a + b)
        for ang in np.linspace(0.1, 6.0, 7):
            assert left.apply_ideal(ang) == pytest.approx(right.apply_ideal(ang), abs=1e-10)


def test_parabolic_degenerate():
    with pytest.raises(DegenerateError):
        parabolic_translation(IdealPoint(1.0), IdealPoint(1.0), IdealPoint(2.0))


def test_screw_motion_power_is_translation():
    n, h = 2, 0.5
    s = screw_motion(math.pi / n, 2, unit=h)
    acc = IDENTITY
    for _ in range(2 * n):
        acc = compose(s, acc)
    assert acc.vshift == Fraction(4 * n)
    assert acc.shift_value == 4.0
    assert not acc.vflip
    p = random_disk(20)
    np.testing.assert_allclose(acc.mobius(p), p, atol=1e-12)
    t = vertical_translation(4 * n, unit=h)
    assert compose(t, t.inverse()).isclose(IDENTITY)


def test_flip_composition_is_translation():
    c1, c2 = Fraction(3, 2), Fraction(-1, 3)
    f = compose(vertical_flip(c1), vertical_flip(c2))
    assert not f.vflip
    assert f.vshift == 2 * (c1 - c2)


def test_apply_translation_and_identity():
    n, h = 3, 0.25
    t = vertical_translation(4 * n, unit=h)
    z, s = t.apply(0.1 + 0.2j, 0.7)
    assert z == 0.1 + 0.2j and s == pytest.approx(0.7 + 4 * n * h)
    assert IDENTITY.apply(0.4j, -2.0) == (0.4j, -2.0)


def test_random_compositions_preserve_distance_and_invert():
    gens = [
        rotation_about_origin(0.4),
        screw_motion(1.1, 2, unit=0.3),
        parabolic_translation(IdealPoint(math.pi), IdealPoint(0), IdealPoint(2.0)),
        horizontal_reflection(geodesic_between(IdealPoint(0.1), IdealPoint(2.5)), 1, unit=0.3),
        axis_rotation(),
    ]
    for _ in range(30):
        acc = IDENTITY
        for k in rng.integers(0, len(gens), size=5):
            acc = compose(gens[k], acc)
        p, q = random_disk(10, 0.8), random_disk(10, 0.8)
        d0 = hyp_distance(p, q)
        d1 = hyp_distance(acc.mobius(p), acc.mobius(q))
        assert np.max(np.abs(d1 - d0)) < 1e-11 * max(1.0, d0.max())
        back = compose(acc.inverse(), acc)
        np.testing.assert_allclose(back.mobius(p), p, atol=1e-11)
        assert back.vshift == 0 and not back.vflip
        if not acc.vflip:
            t = rng.random(10)
            np.testing.assert_allclose(acc.height(t) - acc.height(0.0), t, atol=1e-12)


def test_composition_associative():
    a = screw_motion(0.3, 1, unit=0.5)
    b = horizontal_reflection(geodesic_between(IdealPoint(0.0), IdealPoint(1.0)), 2, unit=0.5)
    c = parabolic_translation(IdealPoint(math.pi), IdealPoint(0), IdealPoint(1.0))
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert left.isclose(right, 1e-12)
