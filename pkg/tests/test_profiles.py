import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoprofile import (
    DomainError,
    SphereGeometry,
    cylinder_family,
    cylinder_profile,
    euclidean_constant,
    euclidean_profile,
    scale_profile,
    sphere_ball,
    sphere_profile,
    sphere_volume,
    tube_function,
)

# Frozen from an independent 40-digit mpmath evaluation: closed-form sine
# integrals, substitution y = eta - t^2, gap by direct subtraction at high
# precision, and root finding on eta for the profile values.
FAMILY_ORACLE = [
    # m, eta, volume, area (unit scale)
    (2, 1.0, 3.59179313069331, 10.622978647074),
    (3, 1.0, 3.64092696260654, 13.9063826989856),
    (3, 2.0, 21.814272059835, 40.1818714521588),
    (4, 1.5, 14.1123253758208, 40.3994247096519),
]

PROFILE_ORACLE = [
    # m, scale, volume, profile value
    (3, 2.0, 65.0, 99.39828249919418),
    (4, 2.0**1.5, 60.0, 151.8631286716003),
    (4, 2.0 ** (5 / 3), 140.0, 280.5992859460745),
    (4, 2.0 ** (5 / 3), 13.0, 49.86279335877368),
]


# --- Euclidean -------------------------------------------------------------

def test_euclidean_examples():
    assert euclidean_profile(2)(1.0) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)
    assert euclidean_profile(2)(4.0) == pytest.approx(4 * math.sqrt(math.pi), rel=1e-14)
    assert euclidean_profile(3)(1.0) == pytest.approx(4.8360, abs=5e-5)


# --- Spheres ---------------------------------------------------------------

def test_sphere_ball_examples():
    vol, area = sphere_ball(SphereGeometry(2), math.pi / 2)
    assert (vol, area) == pytest.approx((2 * math.pi, 2 * math.pi), rel=1e-12)
    vol, area = sphere_ball(SphereGeometry(2), math.pi)
    assert vol == pytest.approx(4 * math.pi, rel=1e-12) and area == 0.0
    vol, area = sphere_ball(SphereGeometry(4), math.pi / 2)
    assert vol == pytest.approx(sphere_volume(4) / 2, rel=1e-12)
    assert vol == pytest.approx(13.159, abs=5e-4)
    assert area == pytest.approx(2 * math.pi**2, rel=1e-12)


@pytest.mark.parametrize("r", [-0.1, math.pi + 0.01])
def test_sphere_ball_radius_domain(r):
    with pytest.raises(DomainError):
        sphere_ball(SphereGeometry(3), r)


def test_sphere_geometry_invariants():
    assert SphereGeometry(4, 4.7).total_volume == pytest.approx(4.7**2 * sphere_volume(4), rel=1e-14)
    with pytest.raises(DomainError):
        SphereGeometry(0)
    with pytest.raises(DomainError):
        SphereGeometry(2, -1.0)


def test_s2_profile_closed_form():
    p = sphere_profile(SphereGeometry(2))
    assert p(2 * math.pi) == pytest.approx(2 * math.pi, rel=1e-12)
    assert p(0.9 * 4 * math.pi) == pytest.approx(4 * math.pi * 0.3, rel=1e-12)
    v = np.linspace(0.01, 4 * math.pi - 0.01, 200)
    np.testing.assert_allclose(p(v), np.sqrt(v * (4 * math.pi - v)), rtol=1e-12)


@pytest.mark.parametrize("m, mu", [(2, 1.0), (3, 2.0), (4, 4.7), (5, 2.77), (5, 7.5)])
def test_sphere_half_volume_identity(m, mu):
    p = sphere_profile(SphereGeometry(m, mu))
    half = 0.5 * SphereGeometry(m, mu).total_volume
    assert p(half) == pytest.approx(mu ** ((m - 1) / 2) * sphere_volume(m - 1), rel=1e-8)


def test_sphere_profile_symmetric(s4_47):
    total = s4_47.v_max
    v = np.linspace(1.0, total / 2, 50)
    np.testing.assert_allclose(s4_47(v), s4_47(total - v), rtol=1e-10)


def test_sphere_profile_domain(s4_47):
    for bad in (-1.0, s4_47.v_max * 1.001, math.nan):
        with pytest.raises(DomainError):
            s4_47(bad)
    # boundary volumes evaluate to 0 by continuous extension
    assert s4_47(0.0) == 0.0 and s4_47(s4_47.v_max) == 0.0


def test_s4_maximizer(s4_47):
    half = 4.7**2 * sphere_volume(4) / 2
    assert half == pytest.approx(290.69, abs=5e-3)
    v = np.linspace(200, 380, 9001)
    assert v[np.argmax(s4_47(v))] == pytest.approx(half, rel=1e-3)


# --- Cylinders -------------------------------------------------------------

@pytest.mark.parametrize("m, eta, vol, area", FAMILY_ORACLE)
def test_family_integrals_match_oracle(m, eta, vol, area):
    from isoprofile.profiles import _cylinder_integrals

    v, a = _cylinder_integrals(m, np.array([eta]))
    assert v[0] == pytest.approx(vol, rel=1e-10)
    assert a[0] == pytest.approx(area, rel=1e-10)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_family_volume_strictly_increasing(m):
    fam = cylinder_family(m)
    assert np.all(np.diff(fam.volumes) > 0)
    assert np.all(fam.areas > 0)
    assert 0 < fam.eta_turn < math.pi


@pytest.mark.parametrize("m", [2, 3, 4])
def test_family_small_regions_are_euclidean(m):
    fam = cylinder_family(m)
    ratio = fam.areas[:5] / fam.volumes[:5] ** (m / (m + 1))
    np.testing.assert_allclose(ratio, euclidean_constant(m + 1), rtol=1e-2)


def test_family_fold_exceeds_slab():
    # past the crossing the ball branch loses to slabs all the way to the fold
    fam = cylinder_family(3)
    assert fam.areas[-1] > fam.slab_area
    assert fam.slab_area == pytest.approx(4 * math.pi**2, rel=1e-14)


def test_family_scaling():
    base, scaled = cylinder_family(3), cylinder_family(3, scale=2.0)
    np.testing.assert_allclose(scaled.volumes, base.volumes * 2.0**2, rtol=1e-14)
    np.testing.assert_allclose(scaled.areas, base.areas * 2.0**1.5, rtol=1e-14)


def test_family_rejects_bad_arguments():
    with pytest.raises(DomainError):
        cylinder_family(1)
    with pytest.raises(DomainError):
        cylinder_family(3, eta_grid_size=10)


@pytest.mark.parametrize("m, mu, v, area", PROFILE_ORACLE)
def test_cylinder_profile_matches_oracle(m, mu, v, area):
    assert cylinder_profile(m, mu)(v) == pytest.approx(area, rel=1e-7)


def test_cylinder_value_at_65(cyl3_mu2):
    assert cyl3_mu2(65.0) == pytest.approx(99.4, rel=5e-3)


def test_cylinder_unit_value_at_16_25():
    # 99.4 / 2^{3/2}
    assert cylinder_profile(3)(16.25) == pytest.approx(35.14, rel=5e-3)


def test_cylinder_value_at_60(cyl4_mu32):
    assert 0.99 * cyl4_mu32(60.0) > 118.245


def test_cylinder_ball_area_matches_family_samples():
    fam = cylinder_family(3)
    i = np.arange(40, 500, 37)
    np.testing.assert_allclose(fam.ball_area(fam.volumes[i]), fam.areas[i], rtol=1e-7)


def test_cylinder_large_volume_is_slab():
    p = cylinder_profile(3)
    assert p(1e4) == pytest.approx(4 * math.pi**2, rel=1e-14)


def test_cylinder_domain():
    p = cylinder_profile(3)
    with pytest.raises(DomainError):
        p(-2.0)
    assert p(0.0) == 0.0


def test_slab_dominates(cyl3_mu2):
    v = np.geomspace(1e-3, 1e3, 400)
    assert np.all(cyl3_mu2(v) <= 2.0**1.5 * 2 * sphere_volume(3) * (1 + 1e-12))


def _all_profiles(cyl3_mu2, cyl4_mu32, s4_47):
    return [
        (euclidean_profile(2), 2),
        (euclidean_profile(5), 5),
        (sphere_profile(SphereGeometry(2)), 2),
        (s4_47, 4),
        (sphere_profile(SphereGeometry(5, 2.77)), 5),
        (sphere_profile(SphereGeometry(5, 7.5)), 5),
        (cylinder_profile(2), 3),
        (cylinder_profile(3), 4),
        (cyl3_mu2, 4),
        (cyl4_mu32, 5),
    ]


def test_small_volume_euclidean_limit(cyl3_mu2, cyl4_mu32, s4_47):
    v = 1e-4
    for p, d in _all_profiles(cyl3_mu2, cyl4_mu32, s4_47):
        assert p(v) / v ** ((d - 1) / d) == pytest.approx(euclidean_constant(d), rel=2e-2), p.name


def test_profiles_positive_inside_domain(cyl3_mu2, cyl4_mu32, s4_47):
    for p, _ in _all_profiles(cyl3_mu2, cyl4_mu32, s4_47):
        top = p.v_max if math.isfinite(p.v_max) else 1e3
        v = np.linspace(top * 1e-3, top * (1 - 1e-3), 300)
        assert np.all(p(v) > 0), p.name


@pytest.mark.parametrize("m, mu", [(2, 1.0), (3, 2.0), (4, 2.0**1.5), (4, 2.0 ** (5 / 3))])
def test_monotone_flag_holds_on_dense_grid(m, mu):
    p = cylinder_profile(m, mu)
    assert p.monotone_nondecreasing
    v = np.linspace(0.01, 3 * cylinder_family(m, scale=mu).crossing_volume, 1500)
    assert np.all(np.diff(p(v)) >= -1e-9)


# --- Scaling and tubes -----------------------------------------------------

def test_scale_identity():
    p = sphere_profile(SphereGeometry(2))
    assert scale_profile(p, 2, 1.0) is p


def test_scale_doubles_sphere():
    p = sphere_profile(SphereGeometry(2))
    q = scale_profile(p, 2, 4.0)
    assert q.v_max == pytest.approx(16 * math.pi, rel=1e-14)
    assert q(8 * math.pi) == pytest.approx(4 * math.pi, rel=1e-12)


def test_scaled_sphere_matches_geometry():
    direct = sphere_profile(SphereGeometry(4, 4.7))
    manual = scale_profile(sphere_profile(SphereGeometry(4)), 4, 4.7)
    v = np.linspace(1, 580, 77)
    np.testing.assert_allclose(direct(v), manual(v), rtol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.integers(0, 2**32 - 1))
def test_scaling_composition(mu1, mu2, seed):
    p = sphere_profile(SphereGeometry(3))
    two = scale_profile(scale_profile(p, 3, mu1), 3, mu2)
    one = scale_profile(p, 3, mu1 * mu2)
    assert two.v_max == pytest.approx(one.v_max, rel=1e-12)
    v = np.random.default_rng(seed).uniform(0, one.v_max, 100)
    v = v[v > 0]
    np.testing.assert_allclose(two(v), one(v), rtol=1e-9)


def test_scaling_composition_cylinder(rng):
    p = cylinder_profile(3)
    two = scale_profile(scale_profile(p, 4, 1.7), 4, 0.6)
    one = scale_profile(p, 4, 1.7 * 0.6)
    v = rng.uniform(1e-3, 80, 100)
    np.testing.assert_allclose(two(v), one(v), rtol=1e-9)


def test_scale_rejects_nonpositive():
    with pytest.raises(DomainError):
        scale_profile(euclidean_profile(3), 3, 0.0)


def test_tube_function():
    t = tube_function(4 * math.pi, 2)
    assert t.coefficient == pytest.approx(4 * math.pi, rel=1e-14)
    assert tube_function(1.0, 2).coefficient == pytest.approx(euclidean_constant(2), rel=1e-14)
    assert t(100.0) == pytest.approx(40 * math.pi, rel=1e-14)
    with pytest.raises(DomainError):
        tube_function(0.0, 2)
