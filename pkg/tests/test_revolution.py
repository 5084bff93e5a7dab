import math

import numpy as np
import pytest

from beltrami import catalog, expr, frame, jets
from beltrami.errors import ExcludedSurface, NotArcLength, ProfileError, UnknownIdentifier
from beltrami.report import Grid
from beltrami.revolution import (
    R_and_Rprime,
    Profile,
    Thresholds,
    Verdict,
    classify,
    closed_form_laplacian_III,
    component_routes,
    ensure_arclength,
    offset_profile,
    phi_profile,
    reparametrize_arclength,
    revolve,
    speed_defect,
    verify_closed_form_operator,
    verify_component_laplacians,
    verify_iterated_laplacian,
    verify_R_formulas,
)
from beltrami.tensor import laplacian

GRID = Grid(8, 8)


def test_profile_validation():
    with pytest.raises(UnknownIdentifier):
        Profile.from_exprs("bad", "1 + v", "u", (0, 1))
    with pytest.raises(ProfileError):
        Profile.from_exprs("crosses-axis", "u", "1", (-1, 1))
    with pytest.raises(ProfileError):
        Profile.from_exprs("empty", "1", "u", (1, 1))


def test_catenary_arclength_reparametrization():
    p = catalog.get_profile("catenary")
    assert speed_defect(p) > 0.5
    q = reparametrize_arclength(p, origin=0.0)
    s = np.linspace(-1.5, 1.5, 7)
    f, g = q.values(s)
    np.testing.assert_allclose(f, np.sqrt(1 + s**2), rtol=1e-12)
    np.testing.assert_allclose(g, np.arcsinh(s), atol=1e-12)
    assert speed_defect(q, s) < 1e-13
    # unit speed holds at higher orders as well: f'f'' + g'g'' = 0
    fs, gs = q.series(s, 5)
    np.testing.assert_allclose(fs[:, 1] * fs[:, 2] + gs[:, 1] * gs[:, 2], 0, atol=1e-13)
    np.testing.assert_allclose(fs[:, 2] * 2, 1 / (1 + s**2) ** 1.5, rtol=1e-10)
    assert q.interval[0] == pytest.approx(-math.sinh(1.5), rel=1e-12)
    assert ensure_arclength(q) is q
    circle = catalog.get_profile("circle-arc")
    assert ensure_arclength(circle) is circle


def test_revolved_circle_is_the_unit_sphere():
    s = revolve(catalog.get_profile("circle-arc"))
    fr = frame(s, 0.7, 0.3)
    assert fr.K.value == pytest.approx(1.0, rel=1e-14)
    assert fr.R.value == pytest.approx(2.0, rel=1e-14)
    assert np.linalg.norm(fr.x.value) == pytest.approx(1.0, rel=1e-15)


def test_profile_angle_quantities_on_circle_arc():
    p = catalog.get_profile("circle-arc")
    u = np.array([0.4, 1.2, 2.5])
    pp = phi_profile(p, u)
    np.testing.assert_allclose(pp.phi.value, u, atol=1e-14)
    np.testing.assert_allclose(pp.kappa.value, 1.0, atol=1e-14)
    np.testing.assert_allclose(pp.dkappa.value, 0.0, atol=1e-14)
    R, Rp = R_and_Rprime(pp)
    np.testing.assert_allclose(R, 2.0, atol=1e-14)
    np.testing.assert_allclose(Rp, 0.0, atol=1e-13)
    with pytest.raises(NotArcLength):
        phi_profile(catalog.get_profile("catenary"), u)


def test_normal_of_revolved_profile_matches_angle_form():
    p = ensure_arclength(catalog.get_profile("torus-profile"))
    u, v = np.array([-0.8, 0.1, 0.9]), np.array([0.4, 2.0, 5.0])
    pp = phi_profile(p, u)
    fr = frame(revolve(p), u, v)
    sphi, cphi = np.sin(pp.phi.value), np.cos(pp.phi.value)
    want = np.stack([-sphi * np.cos(v), -sphi * np.sin(v), cphi])
    np.testing.assert_allclose(fr.N.value, want, atol=1e-14)


@pytest.mark.parametrize("name", ["circle-arc", "catenary", "torus-profile"])
def test_closed_form_operator_agrees_with_christoffel_pipeline(name):
    p = ensure_arclength(catalog.get_profile(name))
    u, v = np.array([0.3, 0.8]) + p.interval[0], np.array([1.0, 4.0])
    pp = phi_profile(p, u)
    fr = frame(revolve(p), u, v)
    F = expr.eval_jet(expr.parse("sin(u)*cos(v) + u^2"), fr.u, fr.v)
    want = laplacian(fr, "III", F).value
    for variant in ("phi", "kappa"):
        got = closed_form_laplacian_III(pp, F, variant=variant).value
        np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-12)
    op, by_phi, by_R = component_routes(pp, v)
    for route in (by_phi, by_R):
        np.testing.assert_allclose(route, op, rtol=1e-11, atol=1e-12)
    np.testing.assert_allclose(op, laplacian(fr, "III", fr.x).value, rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("name", ["circle-arc", "catenary", "torus-profile", "unit-catenary"])
def test_profile_verifiers(name):
    p = catalog.get_profile(name)
    fields = [expr.unparse(expr.random_expression(np.random.default_rng(3), 4)) for _ in range(5)]
    for rep in (verify_component_laplacians(p, GRID), verify_R_formulas(p, GRID),
                verify_closed_form_operator(p, fields, GRID),
                verify_closed_form_operator(p, fields, GRID, variant="kappa")):
        assert rep.status == "pass", (rep.identity, rep.residual_max)


def test_iterated_laplacian():
    for name in ("circle-arc", "catenary"):
        rep = verify_iterated_laplacian(catalog.get_profile(name), 2, GRID)
        assert rep.status == "pass", rep.residual_max
        assert rep.details["residual_m2"] < 1e-6
    assert verify_iterated_laplacian(catalog.get_profile("torus-profile"), 2, GRID).status == "n/a"
    with pytest.raises(ValueError):
        verify_iterated_laplacian(catalog.get_profile("circle-arc"), 4, GRID)


def test_classifier_verdicts():
    v = classify(catalog.get_profile("circle-arc"), GRID)
    assert v.kind is Verdict.SPHERE_TYPE_1
    assert v.evidence["eigenvalue"] == pytest.approx(2.0, abs=1e-6)
    assert v.evidence["radius_spread"] < 1e-8
    v = classify(catalog.get_profile("catenary"), GRID)
    assert v.kind is Verdict.CATENOID_NULL_TYPE_1 and v.evidence["reparametrized"]
    v = classify(catalog.get_profile("torus-profile"), GRID)
    assert v.kind is Verdict.NOT_CONSTANT_R
    with pytest.raises(ExcludedSurface):
        classify(catalog.get_profile("line"), GRID)


def test_classifier_off_centre_sphere_and_perturbation():
    shifted = Profile.from_exprs("shifted", "sin(u)", "3 - cos(u)", (0.2, math.pi - 0.2))
    v = classify(shifted, GRID)
    assert v.kind is Verdict.SPHERE_TYPE_1
    np.testing.assert_allclose(v.evidence["centre"], [0, 0, 3], atol=1e-8)
    bumped = Profile.from_exprs("bumped", "sin(u)*(1 + 0.001*cos(3*u))", "-cos(u)", (0.2, math.pi - 0.2))
    assert classify(bumped, GRID).kind is Verdict.NOT_CONSTANT_R
    strict = Thresholds(const_floor=1e-12)
    assert classify(catalog.get_profile("circle-arc"), GRID, strict).kind is Verdict.SPHERE_TYPE_1


def test_offset_catenary_is_parallel_of_catenoid():
    p = offset_profile(catalog.get_profile("catenary"), 0.4)
    v = classify(p, Grid(6, 6))
    assert v.kind is Verdict.PARALLEL_OF_CATENOID_NULL_TYPE_2
    assert v.evidence["R_mean"] == pytest.approx(-0.8, abs=1e-6)
    assert v.evidence["de_offset_H_max"] < 1e-6
    assert v.to_dict()["kind"] == "ParallelOfCatenoidNullType2"


def test_closed_form_acts_componentwise_on_vector_fields():
    p = catalog.get_profile("circle-arc")
    u = np.array([0.5, 1.0])
    pp = phi_profile(p, u)
    U = jets.seed(u, "u", pp.order)
    V = jets.seed(np.zeros(2), "v", pp.order)
    X = jets.stack([U * 1.0, V * 1.0])
    got = closed_form_laplacian_III(pp, X).value
    assert got.shape == (2, 2)
    # Delta u on the unit sphere in polar coordinates: -cot(u)
    np.testing.assert_allclose(got[0], -np.cos(u) / np.sin(u), rtol=1e-12)
    np.testing.assert_allclose(got[1], 0.0, atol=1e-14)
