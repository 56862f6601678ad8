import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpme import pdemodel as pm
from fracpme import verify as v
from fracpme.errors import PreconditionError
from fracpme.frackernel import gamma
from fracpme.liealg import AlgebraSpec, Representative, flow, transport_solution

D1, D2, D3, D4 = sp.symbols("D1:5")
c_s = sp.Symbol("c")


# -- determining equations ----------------------------------------------------------

def test_fpme_family_verifies_with_tau_vanishing_at_origin():
    rep = v.check_determining("fpme", values={"C2": 0})
    assert rep.verdict == v.VERIFIED and rep.terms == ()


def test_fpme_family_with_time_shift_fails_only_the_origin_condition():
    rep = v.check_determining("fpme")
    assert rep.terms == ("tau(t=0): C2",)


def test_fpme_scaling_equation_cancels_by_construction():
    fam = v.general_family("fpme")
    eq = v.alpha_s * sp.diff(fam.tau, v.t) * v.u - 2 * v.u * sp.diff(fam.xi, v.x) + (v.r_s - 1) * fam.eta
    assert sp.simplify(eq) == 0


def test_fdpme_third_equation_leaves_minus_c_d4():
    rep = v.check_determining("fdpme", values={"D2": 0})
    residuals = dict((label, expr) for label, expr in rep.data if label == "E3")
    assert sp.simplify(residuals["E3"] + c_s * D4) == 0
    assert rep.verdict == v.REFUTED


def test_fdpme_unit_constants():
    rep = v.check_determining("fdpme", values={"D1": 0, "D2": 0, "D4": 1}, params={"c": 1})
    assert rep.terms == ("E3: -1",)


def test_fdpme_without_d4_and_with_a_zero_verifies():
    rep = v.check_determining("fdpme", values={"D2": 0, "D4": 0}, params={"a": 0})
    assert rep.verdict == v.VERIFIED


@settings(max_examples=20, deadline=None)
@given(st.integers(-5, 5).filter(bool), st.integers(-5, 5).filter(bool))
def test_determining_residuals_are_homogeneous(k1, k4):
    base = v.check_determining("fdpme", values={"D2": 0, "D1": 1, "D4": 1}, params={"a": 2, "c": 3})
    scaled = v.check_determining("fdpme", values={"D2": 0, "D1": k1, "D4": k4},
                                 params={"a": 2, "c": 3})
    b = {lbl: sp.nsimplify(e) for lbl, e in _collect(base.data).items()}
    s = {lbl: sp.nsimplify(e) for lbl, e in _collect(scaled.data).items()}
    assert s["E3"] == k4 * b["E3"]
    assert s["E4"] == k1 * b["E4"]


def _collect(data):
    out = {}
    for label, expr in data:
        out[label] = out.get(label, 0) + expr
    return out


def test_field_family_from_h1_generator():
    H1 = AlgebraSpec("H1", 0.4, 3.0)
    fam = v.family_from_field(H1.element(1, 2, 3), "fpme")
    rep = v.check_determining("fpme", fam, params={"alpha": 0.4, "r": 3.0}, tol=1e-12)
    assert rep.verdict == v.VERIFIED


def test_h2_translation_in_u_fails_determining_system():
    H2 = AlgebraSpec("H2", 0.5)
    fam = v.family_from_field(H2.basis_element(3), "fdpme")
    rep = v.check_determining("fdpme", fam, params={"alpha": 0.5, "a": 1, "b": 1, "c": 1})
    assert rep.verdict == v.REFUTED


# -- invariant surfaces ---------------------------------------------------------------

def test_translation_generator_fixes_time_only_functions():
    H1 = AlgebraSpec("H1", 0.4, 3.0)
    rep = v.check_invariant_surface(H1.basis_element(3), lambda x, t: np.sin(t) + 0 * x)
    assert rep.max_abs == 0.0


@pytest.mark.parametrize("label, param", [("r11", None), ("r12", None), ("r13", None),
                                          ("r14", None), ("r15", None), ("r16", 0.7),
                                          ("r16", -2.0)])
@pytest.mark.parametrize("prof", pm.PROFILES, ids=lambda p: p.name)
def test_h1_ansatz_families_are_invariant(label, param, prof):
    alpha, r = 0.3, 2.0
    H1 = AlgebraSpec("H1", alpha, r)
    rep_ = Representative(label, param)
    sol = pm.ansatz_family(rep_, alpha, r).build(prof)
    report = v.check_invariant_surface(rep_.element(H1), sol)
    assert report.max_abs <= 1e-8


def test_r16_with_sine_profile_uses_finite_differences():
    alpha, r, g = 0.3, 2.0, 0.7
    H1 = AlgebraSpec("H1", alpha, r)

    def theta(x, t):
        return np.sin(t * x ** (-1 / g)) * x ** ((2 * g - alpha) / (g * (r - 1)))

    report = v.check_invariant_surface(Representative("r16", g).element(H1), theta)
    assert report.notes == "central differences"
    assert report.max_abs <= 1e-8


def test_sign_flipped_r15_multiplier_is_not_invariant():
    alpha, r = 0.3, 2.0
    H1 = AlgebraSpec("H1", alpha, r)
    sol = pm.ansatz_family(Representative("r15"), alpha, r, printed=True).build(pm.PROFILES[0])
    assert v.check_invariant_surface(Representative("r15").element(H1), sol).verdict == v.REFUTED


@pytest.mark.parametrize("label, param", [("r21", None), ("r22", None), ("r24", None),
                                          ("r25", None), ("r26", 1.5)])
def test_h2_ansatz_families_are_invariant(label, param):
    H2 = AlgebraSpec("H2", 0.3)
    rep_ = Representative(label, param)
    for prof in pm.PROFILES:
        sol = pm.ansatz_family(rep_, 0.3).build(prof)
        assert v.check_invariant_surface(rep_.element(H2), sol).max_abs <= 1e-8


# -- numeric residuals ------------------------------------------------------------------

def test_t33ii_numeric_on_default_grid():
    params = pm.model_params("T33ii")
    rep = v.check_residual_numeric(params, pm.catalog("T33ii"), quad_tol=1e-8)
    assert rep.verdict == v.VERIFIED
    assert rep.max_abs <= 1e-7 * rep.scale


def test_constant_density_is_refuted_numerically():
    params = pm.FPMEParams(0.5, 2.0)
    rep = v.check_residual_numeric(params, pm.SeparableSolution(1.0, 0.0, 0.0))
    assert rep.verdict == v.REFUTED
    # largest |t^-0.5/Gamma(0.5)| on t >= 0.25
    assert rep.max_abs == pytest.approx(0.25 ** -0.5 / gamma(0.5), rel=1e-7)


def test_numeric_residual_of_proof_variant_matches_monomial():
    entry = "T33iii-paper-proof-variant"
    params = pm.model_params(entry)
    sol = pm.catalog(entry)
    grid = v.Grid(nx=3, nt=3)
    rep = v.check_residual_numeric(params, sol, grid, quad_tol=1e-9)
    assert rep.verdict == v.REFUTED
    lhs, rhs = rep.data
    mono = pm.separable_residual(params, sol).residual
    X, T = np.meshgrid(grid.xs, grid.ts, indexing="ij")
    np.testing.assert_allclose(lhs - rhs, mono(X, T), atol=1e-7)


@pytest.mark.parametrize("entry", ["T33i", "T33iii", "FPME-case3", "FDPME-case2"])
def test_symbolic_and_numeric_modes_agree(entry):
    params = pm.model_params(entry)
    sol = pm.catalog(entry)
    sym = v.check_solution_symbolic(params, sol, entry)
    num = v.check_residual_numeric(params, sol, v.Grid(nx=4, nt=4), quad_tol=1e-8)
    assert sym.verdict == num.verdict == v.VERIFIED


def test_fd_fallback_for_plain_callables():
    params = pm.model_params("T33ii")
    sol = pm.catalog("T33ii")
    rep = v.check_residual_numeric(params, lambda x, t: sol(x, t), v.Grid(nx=3, nt=3),
                                   quad_tol=1e-8, threshold=1e-5)
    assert rep.verdict == v.VERIFIED


def test_grid_parse():
    g = v.Grid.parse("1:2:5,0.5:1:3")
    assert (g.nx, g.nt, g.x_lo, g.t_hi) == (5, 3, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        v.Grid.parse("1:2,0:1:3")
    with pytest.raises(PreconditionError):
        v.Grid.parse("0:2:5,0.5:1:3")


# -- transport -----------------------------------------------------------------------------

@pytest.mark.parametrize("entry", ["T33ii", "FPME-case3"])
@pytest.mark.parametrize("index", [1, 2, 3])
def test_h1_generators_transport_exact_solutions(entry, index):
    params = pm.model_params(entry)
    X = params.algebra().basis_element(index)
    rep = v.check_symmetry_transport(params, X, pm.catalog(entry), [-1.0, 0.5, 2.0])
    assert rep.verdict == v.VERIFIED


def test_translation_of_t33ii_uses_numeric_fallback():
    params = pm.model_params("T33ii")
    rep = v.check_symmetry_transport(params, params.algebra().basis_element(3),
                                     pm.catalog("T33ii"), [0.5])
    assert rep.mode == "numeric" and rep.verdict == v.VERIFIED


def test_u_translation_of_fdpme_case2_is_refuted():
    alpha, eps = 0.5, 2.0
    params = pm.FDPMEParams(alpha)
    X = params.algebra().basis_element(3)
    rep = v.check_symmetry_transport(params, X, pm.catalog("FDPME-case2"), [eps])
    assert rep.verdict == v.REFUTED
    # eps t^-alpha / Gamma(1 - alpha) with the Gamma kept symbolic
    assert rep.terms == ("eps=2: 2·t^-0.5/Γ(0.5)",)


def test_transport_needs_exact_base():
    params = pm.FPMEParams(0.5, 2.0)
    with pytest.raises(PreconditionError):
        v.check_symmetry_transport(params, params.algebra().basis_element(1),
                                   pm.SeparableSolution(1.0, 0.0, 0.0), [1.0])


@settings(max_examples=50)
@given(st.integers(1, 3), st.floats(-2, 2))
def test_transport_round_trip(index, eps):
    params = pm.model_params("T33ii")
    base = pm.catalog("T33ii")
    X = params.algebra().basis_element(index)
    there = transport_solution(flow(X, eps), base)
    back = transport_solution(flow(X, -eps), there)
    xs, ts = np.array([1.1, 1.6, 2.0]), np.array([0.3, 0.6, 1.0])
    np.testing.assert_allclose(back(xs, ts), base(xs, ts), rtol=1e-12)


# -- reports and catalog sweep ----------------------------------------------------------------

def test_report_records_layout():
    rep = v.ResidualReport("demo", "symbolic", v.REFUTED, terms=("x", "t"), notes="n")
    assert rep.to_records() == ["subject=demo mode=symbolic verdict=refuted terms=2",
                                "term=x", "term=t", "notes=n"]


@pytest.mark.parametrize("entry", pm.entry_ids())
def test_verify_entry_matches_expected_verdict(entry):
    info = pm.entry_info(entry)
    assert v.overall(v.verify_entry(entry)) == info.expected


def test_reduction_checks_confirm_balanced_forms():
    for entry in ("FPME-case1-reduced", "FPME-case2-reduced", "FDPME-case1"):
        reports = v.verify_entry(entry)
        red = [r for r in reports if r.subject.endswith("-reduction")]
        assert red and red[0].verdict == v.VERIFIED
        if entry != "FPME-case2-reduced":
            assert "misses by" in red[0].notes
