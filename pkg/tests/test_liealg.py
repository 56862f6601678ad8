import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from fracpme.errors import DomainError
from fracpme.liealg import (IDENTITY, AffineScalingField, AlgebraSpec,
                            PointTransformation, Representative, adjoint,
                            adjoint_table, basis_field, canonicalize,
                            canonicalizing_word, commutator, flow,
                            optimal_labels, parse_field, transport_solution)

ALGEBRAS = [AlgebraSpec("H1", 0.3, 2.0), AlgebraSpec("H1", 0.7, 0.5),
            AlgebraSpec("H2", 0.3), AlgebraSpec("H2", 0.7)]


def geometric_ad(X):
    """ad_X from field commutators, decomposed back into the basis."""
    alg = X.algebra
    cols = [alg.decompose(commutator(X.field, v)).vector for v in alg.basis()]
    return np.array(cols).T


def expm_oracle(eps, X, Y):
    return expm(-eps * geometric_ad(X)) @ Y.vector


# -- generators and brackets ----------------------------------------------------------

def test_basis_fields():
    H1 = AlgebraSpec("H1", 0.4, 3.0)
    assert basis_field(H1, 1) == AffineScalingField(at=1.0, eu=-0.4 / 2.0)
    assert basis_field(H1, 3) == AffineScalingField(cc=1.0)
    assert basis_field(AlgebraSpec("H2", 0.4), 3) == AffineScalingField(ec=1.0)


def test_h1_rejects_r_equal_one():
    with pytest.raises(DomainError):
        AlgebraSpec("H1", 0.5, 1.0)


def test_tau_vanishes_at_t_zero():
    for alg in ALGEBRAS:
        for v in alg.basis():
            assert v.tau(1.7, 0.0, 2.3) == 0.0


def test_nonzero_brackets():
    H1, H2 = AlgebraSpec("H1", 0.4, 3.0), AlgebraSpec("H2", 0.4)
    V11, V12, V13 = H1.basis()
    V21, V22, V23 = H2.basis()
    assert commutator(V12, V13) == -1.0 * V13
    assert commutator(V21, V23) == 0.4 * V23
    assert commutator(V11, V11).is_zero()


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: f"{a.name}-{a.alpha}")
def test_structure_constants_match_field_commutators(alg):
    c = alg.structure_constants
    for i, j in itertools.product(range(3), repeat=2):
        br = commutator(alg.basis()[i], alg.basis()[j])
        np.testing.assert_array_equal(alg.decompose(br).vector, c[i, j])


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: f"{a.name}-{a.alpha}")
def test_antisymmetry_and_jacobi(alg):
    c = alg.structure_constants
    np.testing.assert_array_equal(c, -c.transpose(1, 0, 2))
    jac = (np.einsum("ijm,mkn->ijkn", c, c) + np.einsum("jkm,min->ijkn", c, c)
           + np.einsum("kim,mjn->ijkn", c, c))
    assert np.all(jac == 0)


def test_only_the_listed_brackets_are_nonzero():
    for alg in ALGEBRAS:
        nz = {(i, j) for i, j in itertools.product(range(3), repeat=2)
              if np.any(alg.structure_constants[i, j])}
        assert nz == ({(1, 2), (2, 1)} if alg.name == "H1" else {(0, 2), (2, 0)})


# -- adjoint action --------------------------------------------------------------------

@pytest.mark.parametrize("eps", [-2.0, -0.5, 0.5, 2.0])
def test_adjoint_examples(eps):
    H1, H2 = AlgebraSpec("H1", 0.3, 2.0), AlgebraSpec("H2", 0.3)
    V = [H1.basis_element(i) for i in (1, 2, 3)]
    W = [H2.basis_element(i) for i in (1, 2, 3)]
    np.testing.assert_allclose(adjoint(eps, V[1], V[2]).vector, [0, 0, math.exp(eps)], rtol=1e-14)
    np.testing.assert_allclose(adjoint(eps, V[2], V[1]).vector, [0, 1, -eps], rtol=1e-14)
    np.testing.assert_allclose(adjoint(eps, W[0], W[2]).vector, [0, 0, math.exp(-0.3 * eps)],
                               rtol=1e-14)


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: f"{a.name}-{a.alpha}")
@pytest.mark.parametrize("eps", [-2.0, -0.5, 0.0, 0.5, 2.0])
def test_adjoint_table_matches_matrix_exponential(alg, eps):
    table = adjoint_table(alg, eps)
    for i, j in itertools.product(range(3), repeat=2):
        X, Y = alg.basis_element(i + 1), alg.basis_element(j + 1)
        np.testing.assert_allclose(table[i][j].vector, expm_oracle(eps, X, Y),
                                   rtol=1e-12, atol=1e-12)


def test_zero_epsilon_gives_identity_table():
    for alg in ALGEBRAS:
        table = adjoint_table(alg, 0.0)
        M = np.array([[e.vector for e in row] for row in table])
        for i in range(3):
            np.testing.assert_array_equal(M[i], np.eye(3))


def test_h2_row_v23_acting_on_v21():
    # [V23, V21] = -alpha V23, so Ad(exp(eps V23)) V21 = V21 + alpha eps V23
    H2 = AlgebraSpec("H2", 0.7)
    entry = adjoint_table(H2, 2.0)[2][0]
    np.testing.assert_allclose(entry.vector, [1.0, 0.0, 0.7 * 2.0], rtol=1e-14)


def test_adjoint_rejects_mixed_algebras():
    with pytest.raises(DomainError):
        adjoint(1.0, AlgebraSpec("H1", 0.3, 2.0).basis_element(1),
                AlgebraSpec("H2", 0.3).basis_element(1))


vec = st.lists(st.floats(-3, 3), min_size=3, max_size=3)
eps_st = st.floats(-2, 2)


@settings(max_examples=150)
@given(st.sampled_from(ALGEBRAS), vec, vec, eps_st, eps_st)
def test_adjoint_one_parameter_group(alg, x, y, e1, e2):
    X, Y = alg.element(x), alg.element(y)
    lhs = adjoint(e1, X, adjoint(e2, X, Y)).vector
    rhs = adjoint(e1 + e2, X, Y).vector
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


@settings(max_examples=150)
@given(st.sampled_from(ALGEBRAS), vec, vec, vec, eps_st)
def test_adjoint_is_automorphism(alg, x, y, z, eps):
    X, Y, Z = alg.element(x), alg.element(y), alg.element(z)
    lhs = adjoint(eps, X, Y).bracket(adjoint(eps, X, Z)).vector
    rhs = adjoint(eps, X, Y.bracket(Z)).vector
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


# -- optimal systems --------------------------------------------------------------------

def test_canonicalize_examples():
    H1, H2 = AlgebraSpec("H1", 0.5, 2.0), AlgebraSpec("H2", 0.5)
    assert canonicalize(H1.element(1, 0, 0)) == Representative("r11")
    assert canonicalize(H1.element(2, 6, 7)) == Representative("r16", 3.0)
    assert canonicalize(H2.element(0, 1, -3)) == Representative("r25")


def test_canonicalize_rejects_zero():
    with pytest.raises(DomainError):
        canonicalize(AlgebraSpec("H2", 0.5).element(0, 0, 0))


def test_brute_force_orbit_reaches_r16():
    # scan Ad(exp(eps V13)) for the eps that clears the V13 component of (2, 6, 7)
    H1 = AlgebraSpec("H1", 0.5, 2.0)
    W, V13 = H1.element(2, 6, 7), H1.basis_element(3)
    grid = np.linspace(-5, 5, 4001)
    images = np.array([adjoint(e, V13, W).vector for e in grid])
    k = np.argmin(np.abs(images[:, 2]))
    assert abs(images[k, 2]) < 1e-2
    assert images[k, 1] / images[k, 0] == pytest.approx(3.0)


def test_brute_force_orbit_reaches_r25():
    # Ad(exp(eps V21)) scales the V23 component without changing its sign
    H2 = AlgebraSpec("H2", 0.5)
    W, V21 = H2.element(0, 1, -3), H2.basis_element(1)
    grid = np.linspace(-6, 6, 4801)
    images = np.array([adjoint(e, V21, W).vector for e in grid])
    k = np.argmin(np.abs(images[:, 2] / images[:, 1] + 1.0))
    assert images[k, 2] / images[k, 1] == pytest.approx(-1.0, abs=1e-3)
    assert np.all(images[:, 2] < 0)


@settings(max_examples=200)
@given(st.sampled_from(ALGEBRAS),
       vec.filter(lambda v: max(map(abs, v)) > 1e-3
                  # coefficients under the zero threshold are dropped, not annihilated
                  and all(c == 0 or abs(c) > 1e-6 for c in v)))
def test_canonicalizing_word_lands_on_representative(alg, coeffs):
    W = alg.element(coeffs)
    steps, scale = canonicalizing_word(W)
    image = W
    for eps, idx in steps:
        image = adjoint(eps, alg.basis_element(idx), image)
    rep = canonicalize(W)
    np.testing.assert_allclose(scale * image.vector, rep.element(alg).vector,
                               rtol=1e-9, atol=1e-9)


def _random_orbit_point(alg, rng, W):
    for _ in range(rng.integers(0, 4)):
        X = alg.basis_element(int(rng.integers(1, 4)))
        W = adjoint(rng.uniform(-2, 2), X, W)
    return W * rng.uniform(0.1, 10.0)


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: f"{a.name}-{a.alpha}")
def test_canonicalize_is_orbit_invariant(alg):
    rng = np.random.default_rng(20261017)
    for _ in range(300):
        pattern = rng.integers(0, 2, size=3)
        if not pattern.any():
            pattern[0] = 1
        W = alg.element(pattern * rng.uniform(-3, 3, size=3))
        rep = canonicalize(W)
        other = canonicalize(_random_orbit_point(alg, rng, W))
        assert other.label == rep.label
        if rep.param is not None:
            assert other.param == pytest.approx(rep.param, rel=1e-9)


def test_listed_representatives_are_pairwise_inequivalent():
    for alg in ALGEBRAS:
        reps = [Representative(lbl, 2.0 if lbl in ("r16", "r26") else None)
                for lbl in optimal_labels(alg)]
        assert [canonicalize(r.element(alg)) for r in reps] == reps


def test_parse_field():
    H1 = AlgebraSpec("H1", 0.5, 2.0)
    assert parse_field("V11+3V12", H1).coeffs == (1.0, 3.0, 0.0)
    assert parse_field("2*V12-V13", H1).coeffs == (0.0, 2.0, -1.0)
    assert parse_field("r16", H1, 4.0).coeffs == (1.0, 4.0, 0.0)
    with pytest.raises(DomainError):
        parse_field("V21", H1)


# -- flows --------------------------------------------------------------------------------

def test_flow_of_v11_in_closed_form():
    H1 = AlgebraSpec("H1", 0.4, 3.0)
    T = flow(H1.basis_element(1), 0.7)
    assert T.t_scale == pytest.approx(math.exp(0.7))
    assert T.x_scale == 1.0 and T.x_shift == 0.0
    assert T.u_scale == pytest.approx(math.exp(-0.4 * 0.7 / 2.0))


def test_flow_translation_and_identity():
    H1 = AlgebraSpec("H1", 0.4, 3.0)
    T = flow(H1.basis_element(3), 1.25)
    assert T(1.0, 2.0, 3.0) == (1.0, 3.25, 3.0)
    assert flow(H1.element(1, 2, 3), 0.0) == IDENTITY


@pytest.mark.parametrize("coeffs", [(1, 0, 0), (0, 1, 0), (1, -2, 0.5), (0.3, 0.7, -1.1)])
def test_flow_matches_ode_integration(coeffs):
    X = AlgebraSpec("H1", 0.4, 3.0).element(coeffs).field
    y0 = np.array([0.8, 1.3, 2.1])
    sol = solve_ivp(lambda e, y: [X.tau(y[1], y[0], y[2]), X.xi(y[1], y[0], y[2]),
                                  X.eta(y[1], y[0], y[2])],
                    (0.0, 0.9), y0, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(flow(X, 0.9)(*y0), sol.y[:, -1], rtol=1e-9)


@settings(max_examples=100)
@given(st.sampled_from(ALGEBRAS), vec, eps_st, eps_st)
def test_flow_group_law(alg, coeffs, e1, e2):
    X = alg.element(coeffs)
    composed = flow(X, e1).compose(flow(X, e2))
    direct = flow(X, e1 + e2)
    pts = (np.array([0.3, 1.0, 2.5]), np.array([1.1, -0.4, 3.0]), np.array([0.5, 2.0, -1.0]))
    for a, b in zip(composed(*pts), direct(*pts)):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_point_transformation_inverse():
    T = PointTransformation(2.0, 0.5, 1.5, 3.0, -0.25)
    round_trip = T.compose(T.inverse())
    for name in ("t_scale", "x_scale", "x_shift", "u_scale", "u_shift"):
        assert getattr(round_trip, name) == pytest.approx(getattr(IDENTITY, name), abs=1e-15)
    pts = (0.7, 1.9, 2.2)
    back = T.inverse()(*T(*pts))
    np.testing.assert_allclose(back, pts, rtol=1e-14)


def test_point_transformation_needs_positive_scales():
    with pytest.raises(DomainError):
        PointTransformation(t_scale=-1.0)


def test_transport_by_translation():
    H1 = AlgebraSpec("H1", 0.4, 3.0)
    base = lambda x, t: 2.0 * t ** 0.5 * x ** 3
    moved = transport_solution(flow(H1.basis_element(3), 0.4), base)
    assert moved(1.5, 0.3) == pytest.approx(2.0 * 0.3 ** 0.5 * 1.1 ** 3)
    assert transport_solution(IDENTITY, base)(1.5, 0.3) == base(1.5, 0.3)


def test_v11_fixes_the_r_one_half_solution():
    alpha = 0.5
    H1 = AlgebraSpec("H1", alpha, 0.5)
    A = (6 * math.gamma(alpha + 1) / math.gamma(2 * alpha + 1)) ** 2
    base = lambda x, t: A * t ** (2 * alpha) * x ** -4.0
    for eps in (-1.0, 0.5, 2.0):
        moved = transport_solution(flow(H1.basis_element(1), eps), base)
        for x, t in [(1.2, 0.3), (1.9, 0.8)]:
            assert moved(x, t) == pytest.approx(base(x, t), rel=1e-13)
