import math

import numpy as np
import pytest

from beltrami import catalog, frame
from beltrami.errors import IrregularPoint, ParabolicPoint
from beltrami.report import Grid
from beltrami.surface import check_third_form, verify_weingarten

U0, V0 = 0.7, 0.3


def test_sphere_first_layer_closed_form():
    r = 2.0
    fr = frame(catalog.sphere(r), U0, V0)
    x = fr.x.value
    # outward normal for this parametrization
    np.testing.assert_allclose(fr.N.value, x / r, atol=1e-15)
    np.testing.assert_allclose(fr.g.value, [[r**2, 0], [0, r**2 * math.sin(U0) ** 2]], atol=1e-14)
    np.testing.assert_allclose(fr.b.value, -fr.g.value / r, atol=1e-14)
    np.testing.assert_allclose(fr.e.value, fr.g.value / r**2, atol=1e-14)
    assert fr.K.value == pytest.approx(1 / r**2, rel=1e-14)
    assert fr.H.value == pytest.approx(-1 / r, rel=1e-14)
    assert fr.R.value == pytest.approx(-2 * r, rel=1e-14)
    assert fr.W.value == pytest.approx(-r, rel=1e-14)


@pytest.mark.parametrize("u", [0.0, 0.4, -1.0])
def test_torus_curvatures_closed_form(u):
    a, r = 2.0, 1.0
    fr = frame(catalog.torus(a, r), u, 1.1)
    rho = a + r * math.cos(u)
    k2 = math.cos(u) / rho
    assert fr.K.value == pytest.approx(k2 / r, rel=1e-13)
    assert fr.H.value == pytest.approx(0.5 * (1 / r + k2), rel=1e-13)
    assert fr.R.value == pytest.approx(r + rho / math.cos(u), rel=1e-13)
    if u == 0.0:
        assert fr.K.value == pytest.approx(1 / 3, rel=1e-14)
        assert fr.R.value == pytest.approx(4.0, rel=1e-14)


def test_minimal_surfaces_have_zero_mean_curvature():
    for name, K in [("catenoid", lambda u, v: -1 / math.cosh(u) ** 4),
                    ("helicoid", lambda u, v: -1 / (1 + u * u) ** 2),
                    ("enneper", lambda u, v: -4 / (1 + u * u + v * v) ** 4)]:
        fr = frame(catalog.get_surface(name), U0, V0)
        assert abs(fr.H.value) < 1e-14
        assert abs(fr.R.value) < 1e-14
        assert fr.K.value == pytest.approx(K(U0, V0), rel=1e-13)


def test_jet_order_budget():
    n = 6
    fr = frame(catalog.torus(), U0, V0, order=n)
    assert fr.x.order == n
    assert fr.xd.order == fr.N.order == fr.g.order == fr.W.order == n - 1
    assert fr.b.order == fr.e.order == fr.K.order == fr.H.order == fr.R.order == n - 2
    with pytest.raises(ValueError):
        frame(catalog.torus(), U0, V0, order=2)


def test_rotational_symmetry_of_scalars():
    v = np.linspace(0.0, 2 * math.pi, 17)
    fr = frame(catalog.torus(), np.full_like(v, 0.5), v)
    for q in (fr.K, fr.H, fr.R, fr.W):
        assert np.ptp(q.value) < 1e-12


def test_third_fundamental_form_relation_and_weingarten():
    fr = frame(catalog.ellipsoid(), *Grid(6, 6).points(catalog.ellipsoid().domain))
    assert np.nanmax(check_third_form(fr)) < 1e-12
    for name in ("unit-sphere", "torus", "catenoid", "ellipsoid", "enneper"):
        rep = verify_weingarten(catalog.get_surface(name), Grid(8, 8))
        assert rep.status == "pass", (name, rep.residual_max)


def test_swapping_parameters_flips_the_normal():
    s = catalog.sphere(1.0)
    a = frame(s, U0, V0)
    b = frame(s.swapped(), V0, U0)
    np.testing.assert_allclose(b.N.value, -a.N.value, atol=1e-15)
    assert b.K.value == pytest.approx(a.K.value, rel=1e-14)
    assert b.H.value == pytest.approx(-a.H.value, rel=1e-14)


def test_degenerate_points():
    with pytest.raises(IrregularPoint):
        frame(catalog.sphere(1.0), 0.0, 0.3)
    with pytest.raises(ParabolicPoint):
        frame(catalog.cylinder(), 0.1, 0.2)
    fr = frame(catalog.cylinder(), np.array([0.1, 0.2]), np.array([0.0, 1.0]), strict=False)
    assert fr.parabolic.all() and not fr.irregular.any()
    assert list(fr.reasons) == ["parabolic", "parabolic"]
    fr = frame(catalog.sphere(1.0), np.array([0.0, 1.0]), np.array([0.3, 0.3]), strict=False)
    assert list(fr.irregular) == [True, False]
    assert np.isfinite(fr.K.value[1])


def test_catalog_names_and_arguments():
    assert catalog.get_surface("sphere").name == "sphere(2)"
    assert catalog.get_surface("torus(3, 0.5)").name == "torus(3,0.5)"
    with pytest.raises(KeyError):
        catalog.get_surface("klein-bottle")
    kinds = {row[0] for row in catalog.listing()}
    assert kinds == {"surface", "profile"}
