import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concircular.expr import ExpressionSyntaxError, parse
from concircular.geometry import (
    CURVATURE_SIGN,
    DomainError,
    GeodesicState,
    MetricError,
    PointState,
    ZeroVelocity,
    bivector,
    bivector_dot,
    concircular_force,
    covariant_velocity_derivative,
    euclidean,
    force_at,
    frenet_curvature,
    hyperbolic,
    load_metric,
    lowered_curvature,
    sigma_at,
    signed_curvature_at,
    sphere,
    spin_tensor,
    star_bivector,
    star_vector,
    star_vector_inverse,
    wedge_norm,
)
from concircular.integrator.equations import myeq_expression

import oracles

SPHERE = sphere(1).cache()
HYPER = hyperbolic().cache()
EUCLID = euclidean().cache()
CURVED = [(SPHERE, oracles.sphere_sympy(), (0.4, 2.6), (-3.0, 3.0)),
          (HYPER, oracles.hyperbolic_sympy(), (-2.0, 2.0), (0.3, 2.5))]


def random_states(rng, box1, box2, n):
    for _ in range(n):
        x = np.array([rng.uniform(*box1), rng.uniform(*box2)])
        yield PointState.of(x, rng.normal(size=2), rng.normal(size=2))


# ---------------------------------------------------------------------------
# loading


def test_euclidean_identity():
    m = load_metric("euclidean")
    assert [[e.constant_value() for e in row] for row in m.g] == [[1, 0], [0, 1]]


def test_sphere_chart():
    m = load_metric("sphere(1)")
    assert m.g[0][0] == parse("1")
    assert m.g[1][1] == parse("sin(x1)^2")


def test_sphere_embedding_pullback():
    rng = np.random.default_rng(5)
    for R, cache in ((1, SPHERE), (2, sphere(2).cache())):
        for _ in range(10):
            x = (rng.uniform(0.2, 2.9), rng.uniform(-3, 3))
            np.testing.assert_allclose(cache.at(x).g, oracles.sphere_pullback(R, x), atol=1e-8)


@pytest.mark.parametrize("name", ["hyperbolic", "hyperbolic-half-plane", "half-plane"])
def test_hyperbolic_aliases(name):
    assert load_metric(name).g == hyperbolic().g


def test_metric_file(tmp_path):
    path = tmp_path / "g.json"
    doc = {"g11": "1 + x2^2", "g12": "x1/10", "g21": "x1/10", "g22": "2", "signature": "riemannian"}
    path.write_text(json.dumps(doc))
    m = load_metric(str(path))
    assert m.cache().at((0.5, 1.0)).g[0, 0] == 2.0


def test_asymmetric_file_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"g11": "1", "g12": "x1", "g21": "x2", "g22": "1"}))
    with pytest.raises(MetricError):
        load_metric(str(path))


def test_metric_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"g11": "1 +", "g12": "0", "g21": "0", "g22": "1"}))
    with pytest.raises(ExpressionSyntaxError):
        load_metric(str(path))


def test_unknown_metric_and_bad_radius():
    with pytest.raises(MetricError):
        load_metric("torus")
    with pytest.raises(MetricError):
        load_metric("sphere(-1)")


def test_metric_may_not_depend_on_velocity():
    from concircular.geometry import metric_from_mapping

    with pytest.raises(MetricError):
        metric_from_mapping({"g11": "1", "g12": "0", "g21": "0", "g22": "u1^2"})


# ---------------------------------------------------------------------------
# connection and curvature


def test_euclidean_all_zero():
    pg = EUCLID.at((0.3, -2.0))
    assert not pg.gamma.any() and not pg.curvature.any()
    assert EUCLID.is_flat


def test_sphere_christoffel_symbols():
    G = sphere(1).christoffel
    assert G[0][1][1] == parse("-sin(x1)*cos(x1)")
    assert (G[1][0][1] - parse("cos(x1)/sin(x1)")).is_zero_canonical()
    assert G[1][0][1] == G[1][1][0]
    for i, l, j in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 1, 1)]:
        assert G[i][l][j].is_zero_canonical()


def test_hyperbolic_christoffel_symbols():
    G = hyperbolic().christoffel
    assert G[0][0][1] == parse("-1/x2")
    assert G[1][0][0] == parse("1/x2")
    assert G[1][1][1] == parse("-1/x2")


@pytest.mark.parametrize("idx", [0, 1])
def test_christoffel_against_finite_differences(idx):
    cache, gsym, b1, b2 = CURVED[idx]
    geo = oracles.SympyGeometry(gsym)
    rng = np.random.default_rng(8)
    for s in random_states(rng, b1, b2, 10):
        np.testing.assert_allclose(cache.at(s.x).gamma, oracles.fd_christoffel(geo.metric, s.x), atol=1e-8)


def test_christoffel_lower_symmetry():
    for cache, _, b1, b2 in CURVED:
        pg = cache.at((1.0, 1.0))
        np.testing.assert_array_equal(pg.gamma, pg.gamma.transpose(0, 2, 1))


def test_metric_compatibility():
    """d_k g_ij - Gamma^m_{ki} g_mj - Gamma^m_{kj} g_im = 0 with d_k g by central differences."""
    h = 1e-6
    for cache, _, b1, b2 in CURVED:
        for s in random_states(np.random.default_rng(9), b1, b2, 10):
            pg = cache.at(s.x)
            for k in range(2):
                e = np.eye(2)[k] * h
                dg = (cache.at(s.x + e).g - cache.at(s.x - e).g) / (2 * h)
                conn = np.einsum("mi,mj->ij", pg.gamma[:, k, :], pg.g) + np.einsum("mj,im->ij", pg.gamma[:, k, :], pg.g)
                np.testing.assert_allclose(dg - conn, 0, atol=1e-6)


@pytest.mark.parametrize("idx", [0, 1])
def test_curvature_against_sympy(idx):
    cache, gsym, b1, b2 = CURVED[idx]
    geo = oracles.SympyGeometry(gsym)
    for s in random_states(np.random.default_rng(10), b1, b2, 5):
        np.testing.assert_allclose(cache.at(s.x).curvature, geo.curvature(s.x), atol=1e-12)


def test_curvature_first_pair_antisymmetric():
    for cache, _, b1, b2 in CURVED:
        R = cache.at((1.0, 1.2)).curvature
        np.testing.assert_allclose(R, -R.transpose(1, 0, 2, 3), atol=1e-14)


def test_gauss_curvature():
    x = (math.pi / 3, 0.2)
    assert sphere(1).gauss_curvature.evaluate({"x1": x[0], "x2": x[1]}) == pytest.approx(1.0, abs=1e-14)
    assert sphere(2).gauss_curvature.evaluate({"x1": x[0], "x2": x[1]}) == pytest.approx(0.25, abs=1e-14)
    assert hyperbolic().gauss_curvature.evaluate({"x1": 0.3, "x2": 1.2}) == pytest.approx(-1.0, abs=1e-14)
    # Brioschi oracle
    brioschi = oracles.brioschi_orthogonal
    assert brioschi(lambda a, b: 1.0 + 0 * a, lambda a, b: np.sin(a) ** 2, x) == pytest.approx(1, abs=1e-6)
    assert brioschi(lambda a, b: 4.0 + 0 * a, lambda a, b: 4 * np.sin(a) ** 2, x) == pytest.approx(0.25, abs=1e-6)


def test_curvature_sign_convention():
    # R_{12,2}^1 / g22 = CURVATURE_SIGN * K; CURVATURE_SIGN is fixed by the action oracle below
    for R in (1, 2):
        pg = sphere(R).cache().at((math.pi / 3, 0.2))
        assert pg.curvature[0, 1, 1, 0] / pg.g[1, 1] == pytest.approx(CURVATURE_SIGN / R ** 2, rel=1e-13)


# ---------------------------------------------------------------------------
# kinematics


def test_unit_circle_curvature():
    s = PointState.of((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0))
    assert frenet_curvature(s, EUCLID) == 1.0


def test_geodesic_state_has_zero_curvature():
    for cache, _, b1, b2 in CURVED:
        for s in random_states(np.random.default_rng(12), b1, b2, 5):
            pg = cache.at(s.x)
            geo = PointState.of(s.x, s.u, -np.einsum("ilj,l,j->i", pg.gamma, s.u, s.u))
            assert frenet_curvature(geo, cache) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_curvature_reparametrisation_invariance(seed):
    rng = np.random.default_rng(seed)
    lam, mu = 1.7, 0.3
    for cache, _, b1, b2 in CURVED:
        s = next(random_states(rng, b1, b2, 1))
        # (u, du) -> (lam u, lam^2 du + mu u): w scales the same way since Gamma(u,u) is quadratic
        t = PointState.of(s.x, lam * s.u, lam ** 2 * s.du + mu * s.u)
        k1, k2 = frenet_curvature(s, cache), frenet_curvature(t, cache)
        assert abs(k1 - k2) <= 1e-12 * max(1.0, k1)


def test_zero_velocity_rejected():
    with pytest.raises(ZeroVelocity):
        frenet_curvature(PointState.of((1.0, 1.0), (0.0, 0.0), (1.0, 0.0)), SPHERE)


def test_chart_guards():
    with pytest.raises(DomainError):
        SPHERE.at((0.0, 1.0))
    with pytest.raises(DomainError):
        SPHERE.at((math.pi, 1.0))
    with pytest.raises(DomainError):
        HYPER.at((0.0, 0.0))
    with pytest.raises(DomainError):
        HYPER.at((0.0, -1.0))


def test_hodge_star_inverse_and_square():
    for cache, _, b1, b2 in CURVED:
        for s in random_states(np.random.default_rng(13), b1, b2, 5):
            pg = cache.at(s.x)
            c = star_vector(pg, s.u)
            np.testing.assert_allclose(star_vector_inverse(pg, c), s.u, rtol=1e-13)
            # ** = -1: raise *a with g^-1 and star again
            np.testing.assert_allclose(star_vector(pg, pg.ginv @ c), -(pg.g @ s.u), rtol=1e-12, atol=1e-14)


def test_signed_curvature_orientation():
    # counter-clockwise unit circle: eps_12 = -1 makes *(u ^ w) negative
    s = PointState.of((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0))
    assert signed_curvature_at(EUCLID.at(s.x), s) == -1.0


# ---------------------------------------------------------------------------
# force, sigma, spin


def test_force_zero_in_euclidean():
    assert not concircular_force(PointState.of((0, 0), (1, 2), (3, 4)), EUCLID).any()


def test_force_orthogonal_to_velocity():
    s = PointState.of((math.pi / 2, 0.0), (1.0, 1.0), (0.0, 0.0))
    assert abs(concircular_force(s, SPHERE) @ s.u) < 1e-14
    for cache, _, b1, b2 in CURVED:
        for t in random_states(np.random.default_rng(14), b1, b2, 20):
            f = concircular_force(t, cache)
            assert abs(f @ t.u) < 1e-13 * max(1.0, np.linalg.norm(f) * np.linalg.norm(t.u))


@pytest.mark.parametrize("idx", [0, 1])
def test_force_against_bruteforce(idx):
    cache, gsym, b1, b2 = CURVED[idx]
    geo = oracles.SympyGeometry(gsym)
    for s in random_states(np.random.default_rng(15), b1, b2, 10):
        np.testing.assert_allclose(concircular_force(s, cache), oracles.force_bruteforce(geo, s.x, s.u),
                                   rtol=1e-12, atol=1e-12)


def test_force_frozen_values():
    # frozen from tests/oracles.py force_bruteforce
    u = np.array([0.7, -1.3])
    np.testing.assert_allclose(concircular_force(PointState.of((1.1, 0.4), u, (0, 0)), SPHERE),
                               [0.8559054426692426, 0.46087216143728443], rtol=1e-12)
    np.testing.assert_allclose(concircular_force(PointState.of((0.3, 1.2), u, (0, 0)), HYPER),
                               [-0.7337259166018126, -0.39508318586251456], rtol=1e-12)


def test_sigma_annihilates_velocity():
    for cache, _, b1, b2 in CURVED:
        for s in random_states(np.random.default_rng(16), b1, b2, 20):
            pg = cache.at(s.x)
            sig = sigma_at(pg, s.u)
            # u_i sigma^i_j with u_i = g_ik u^k
            np.testing.assert_allclose((pg.g @ s.u) @ sig, 0, atol=1e-13)


def test_spin_tensor_basics():
    s = PointState.of((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0))
    S = spin_tensor(s, EUCLID)
    assert S[0, 1] == -S[1, 0]
    assert abs(S[0, 1]) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(GeodesicState):
        spin_tensor(PointState.of((1.0, 0.0), (0.0, 1.0), (0.0, 2.0)), EUCLID)


def test_spin_identity():
    """1/2 R_{lj,pi} u^j S^{pi} equals the force up to the orientation of (u, w)."""
    for cache, _, b1, b2 in CURVED:
        for s in random_states(np.random.default_rng(17), b1, b2, 20):
            pg = cache.at(s.x)
            S = spin_tensor(s, cache)
            lhs = 0.5 * np.einsum("ljpi,j,pi->l", lowered_curvature(pg), s.u, S)
            w = covariant_velocity_derivative(pg, s)
            orient = np.sign(star_bivector(pg, s.u, w))
            np.testing.assert_allclose(lhs, orient * force_at(pg, s.u), rtol=1e-12, atol=1e-13)


# ---------------------------------------------------------------------------
# two-dimensional identities (small sample; the 10^5 run is in the acceptance suite)


def random_spd(rng):
    a = rng.normal(size=(2, 2))
    return a @ a.T + 0.1 * np.eye(2)


class _PG:
    def __init__(self, g):
        self.g = g
        self.sqrt_det = math.sqrt(np.linalg.det(g))
        self.flat = False


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_wedge_identities(seed):
    rng = np.random.default_rng(seed)
    pg = _PG(random_spd(rng))
    a, c, v, w = rng.normal(size=(4, 2))
    lhs = wedge_norm(pg, a, c) * wedge_norm(pg, v, w)
    rhs = abs(bivector_dot(pg, a, c, v, w))
    assert abs(lhs - rhs) <= 1e-12 * max(lhs, rhs, 1e-300) + 1e-300
    dot = lambda p, q: p @ pg.g @ q  # noqa: E731
    terms = (dot(a, a) * bivector_dot(pg, v, c, v, c), dot(a, v) * bivector_dot(pg, v, c, a, c),
             dot(a, c) * bivector_dot(pg, v, c, a, v))
    assert abs(terms[0] - terms[1] + terms[2]) <= 1e-12 * sum(map(abs, terms))


def test_bivector_is_antisymmetric():
    b = bivector(np.array([1.0, 2.0]), np.array([3.0, -1.0]))
    np.testing.assert_array_equal(b, -b.T)


# ---------------------------------------------------------------------------
# sign of the curvature term, fixed by the discrete action


@pytest.mark.parametrize("idx", [0, 1])
def test_curved_action_variation_matches_equation(idx):
    cache, gsym, _, _ = CURVED[idx]
    geo = oracles.SympyGeometry(gsym)
    m = 0.7
    x0 = (1.0, 0.3) if idx == 0 else (0.2, 1.3)

    def path(t):
        x = np.array([x0[0] + 0.3 * np.sin(t) + 0.1 * t, x0[1] + 0.5 * t + 0.1 * np.cos(2 * t)])
        u = np.array([0.3 * np.cos(t) + 0.1, 0.5 - 0.2 * np.sin(2 * t)])
        du = np.array([-0.3 * np.sin(t), -0.4 * np.cos(2 * t)])
        ddu = np.array([-0.3 * np.cos(t), 0.8 * np.sin(2 * t)])
        return x, u, du, ddu

    direction = np.array([0.3, -0.7])
    tf = np.linspace(0.4, 1.6, 2001)
    vals, vals_flip = [], []
    for t in tf:
        x, u, du, ddu = path(t)
        pg = cache.at(x)
        E = myeq_expression(pg, PointState.of(x, u, du), ddu, m)
        eta = oracles.bump(t, 1.0, 0.6) * direction
        vals.append(E @ eta)
        vals_flip.append((E + 2 * force_at(pg, u)) @ eta)
    exact, flipped = np.trapezoid(vals, tf), np.trapezoid(vals_flip, tf)
    errs = []
    for h in (4e-3, 2e-3):
        T = np.arange(0.0, 2.0 + h / 2, h)
        X = np.array([path(t)[0] for t in T])
        eta = oracles.bump(T, 1.0, 0.6)[:, None] * direction
        errs.append(abs(oracles.curved_discrete_variation(geo, X, h, eta, m) - exact))
    assert errs[1] < 1e-3 * abs(exact)
    assert errs[0] / errs[1] > 3.5  # second order
    assert abs(exact - flipped) > 100 * errs[1]
