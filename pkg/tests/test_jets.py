from fractions import Fraction
from math import factorial

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from expochar.exact import IndexContext
from expochar.jets import (
    DensityJetModel,
    InsufficientOrderError,
    MaclaurinJet,
    MissingDerivativeError,
    UnderdeterminedError,
    g_jet,
    induction_solver,
    induction_steps,
    jet_antiderivative,
    jet_convolve,
    jet_mul,
    jet_scale_arg,
    k_derivative_closed,
    k_jet,
    lemma2_closed,
    max_density_jet,
    newstep2_sides,
    reconstruct_density,
    step0_sides,
)

X, Z, U = sp.symbols("x z u")
UNIT = DensityJetModel.unit_exponential()
PATTERNS = [UNIT, DensityJetModel(2, -4), DensityJetModel(3, -9), DensityJetModel(Fraction(1, 2), Fraction(-3, 4))]

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=9)
jets = st.lists(small_fracs, min_size=1, max_size=7).map(MaclaurinJet)


def sympy_coeffs(expr, var, order):
    ser = sp.series(expr, var, 0, order + 1).removeO()
    return [Fraction(str(sp.nsimplify(ser.coeff(var, k)))) for k in range(order + 1)]


def exp_jet(order, rate=1):
    return MaclaurinJet([Fraction(rate) ** k / factorial(k) for k in range(order + 1)])


class TestArithmetic:
    def test_mul_examples(self):
        assert jet_mul(MaclaurinJet([1, 1, 0]), MaclaurinJet([1, -1, 0])) == MaclaurinJet([1, 0, -1])
        f = exp_jet(5)
        assert jet_mul(f, MaclaurinJet.constant(1, 5)) == f
        assert jet_mul(exp_jet(4), exp_jet(4)) == exp_jet(4, rate=2)

    def test_mul_truncates_to_smaller_order(self):
        assert jet_mul(exp_jet(6), exp_jet(3)).order == 3

    @given(jets, jets)
    def test_mul_commutes(self, a, b):
        assert a * b == b * a

    @given(jets, jets, jets)
    @settings(max_examples=50)
    def test_mul_distributes(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    def test_antiderivative_examples(self):
        assert jet_antiderivative(MaclaurinJet([1])) == MaclaurinJet([0, 1])
        F = jet_antiderivative(UNIT.jet(6))
        assert F.order == 7
        assert (F.derivative_at_zero(0), F.derivative_at_zero(1), F.derivative_at_zero(2)) == (0, 1, -1)
        assert F.coeffs == tuple(sympy_coeffs(1 - sp.exp(-X), X, 7))

    @given(jets)
    def test_antiderivative_then_first_derivative(self, a):
        assert jet_antiderivative(a).derivative_at_zero(1) == a[0]

    def test_scale_examples(self):
        f = UNIT.jet(6)
        assert jet_scale_arg(f, 1) == f
        assert jet_scale_arg(f, 2).coeffs == tuple(Fraction((-2) ** k, factorial(k)) for k in range(7))
        assert jet_scale_arg(f, 0) == MaclaurinJet([1] + [0] * 6)

    def test_convolve_examples(self):
        one = MaclaurinJet([1, 0, 0])
        assert jet_convolve(one, one).coeffs[:3] == (0, 1, 0)
        assert jet_convolve(one, MaclaurinJet([0, 1, 0])).coeffs[:3] == (0, 0, Fraction(1, 2))
        assert jet_convolve(MaclaurinJet([0, 0]), exp_jet(1)) == MaclaurinJet([0, 0, 0])

    def test_convolve_against_sympy(self):
        b, c = sp.exp(-2 * X), sp.cos(X) + X
        conv = sp.integrate(b * c.subs(X, Z - X), (X, 0, Z))
        want = sympy_coeffs(conv, Z, 6)
        got = jet_convolve(MaclaurinJet(sympy_coeffs(b, X, 6)), MaclaurinJet(sympy_coeffs(c, X, 6)))
        assert got.order == 7
        assert list(got.coeffs[:7]) == want

    @given(jets, jets)
    @settings(max_examples=50)
    def test_convolve_commutes(self, a, b):
        assert jet_convolve(a, b) == jet_convolve(b, a)

    def test_extraction_beyond_order_is_an_error(self):
        with pytest.raises(InsufficientOrderError):
            exp_jet(3).derivative_at_zero(4)
        with pytest.raises(InsufficientOrderError):
            exp_jet(3).truncate(5)

    def test_no_floats(self):
        with pytest.raises(TypeError):
            MaclaurinJet([0.5])


class TestDensityModel:
    def test_unit_pattern(self):
        assert [UNIT.derivative(k) for k in range(6)] == [(-1) ** k for k in range(6)]

    def test_pattern_formula(self):
        m = DensityJetModel(3, -9)
        for k in range(1, 8):
            assert m.derivative(k) == (m.f1 / m.f0) ** (k - 1) * m.f1

    def test_custom_rule(self):
        m = DensityJetModel(1, 0, rule=lambda k: 0)
        assert m.jet(4) == MaclaurinJet([1, 0, 0, 0, 0])

    def test_rejects_nonpositive_f0(self):
        with pytest.raises(ValueError):
            DensityJetModel(0, -1)


class TestPowerTimesDensity:
    def test_examples(self):
        f = UNIT.jet(8)
        assert g_jet(0, f) == jet_antiderivative(f)
        assert g_jet(1, f).derivative_at_zero(2) == -3
        assert g_jet(2, f).derivative_at_zero(1) == 0

    def test_closed_examples(self):
        assert lemma2_closed(1, 1, 1, -1) == -3
        assert lemma2_closed(2, 0, 1, -1) == 2
        assert lemma2_closed(3, -2, 1, -1) == 0

    def test_closed_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            lemma2_closed(2, -3, 1, -1)
        with pytest.raises(ValueError):
            lemma2_closed(2, 0, 0, -1)

    def test_against_sympy(self):
        f = 2 * sp.exp(-2 * X)
        F = sp.integrate(f.subs(X, U), (U, 0, X))
        jet = DensityJetModel(2, -4).jet(10)
        for m in (1, 2, 3):
            assert list(g_jet(m, jet).coeffs) == sympy_coeffs(F**m * f, X, 10)

    @pytest.mark.parametrize("model", PATTERNS, ids=lambda m: f"f0={m.f0},f1={m.f1}")
    def test_oracle_grid(self, model):
        f = model.jet(12)
        for m in range(1, 7):
            G = g_jet(m, f)
            for d in range(-m, 7):
                assert G.derivative_at_zero(m + d) == lemma2_closed(m, d, model.f0, model.f1)

    def test_max_density_convention(self):
        f = UNIT.jet(5)
        assert max_density_jet(0, f) == f
        assert max_density_jet(3, f) == g_jet(3, f)


class TestKernel:
    def test_examples(self):
        d = UNIT.jet(12).derivatives()
        assert k_derivative_closed(2, 2, 1, d) == 1
        assert k_derivative_closed(3, 2, 1, d) == 1
        assert k_jet(3, 2, UNIT.jet(12)).derivative_at_zero(1) == 1
        assert k_derivative_closed(3, 2, 2, d) == k_jet(3, 2, UNIT.jet(12)).derivative_at_zero(2)

    def test_low_derivatives_vanish(self):
        for n in range(3, 7):
            for s in range(2, n):
                K = k_jet(n, s, UNIT.jet(8))
                assert all(K.derivative_at_zero(i) == 0 for i in range(s - 1))

    def test_zero_density(self):
        assert k_jet(3, 2, MaclaurinJet([0])) == MaclaurinJet([0, 0])

    def test_rejects_low_order(self):
        with pytest.raises(ValueError):
            k_derivative_closed(4, 3, 1, UNIT.jet(5).derivatives())

    def test_missing_derivative(self):
        with pytest.raises(MissingDerivativeError):
            k_derivative_closed(4, 2, 6, [1, -1])

    @pytest.mark.parametrize("n", range(3, 7))
    def test_grid(self, n):
        # any density works: the multi-sum is an identity for all f
        for f in (UNIT.jet(12), UNIT.jet(12).perturbed(2, 5)):
            for s in range(2, n):
                K = k_jet(n, s, f)
                for m in range(s - 1, s + 5):
                    assert K.derivative_at_zero(m) == k_derivative_closed(n, s, m, f.derivatives())

    def test_against_sympy(self):
        f = lambda t: sp.exp(-t)  # noqa: E731
        inner = sp.integrate(f(3 * X) * f(2 * (Z - X)), (X, 0, Z))  # K_{3,1}
        assert list(k_jet(3, 2, UNIT.jet(6)).coeffs[:7]) == sympy_coeffs(inner, Z, 6)


class TestIntegralIdentity:
    @pytest.mark.parametrize("n,s,order", [(2, 1, 10), (5, 3, 12)])
    def test_examples(self, n, s, order):
        lhs, rhs = step0_sides(n, s, UNIT.jet(order), order)
        assert lhs == rhs

    @pytest.mark.parametrize("model", PATTERNS, ids=lambda m: f"f0={m.f0},f1={m.f1}")
    def test_pattern_grid(self, model):
        f = model.jet(12)
        for n in range(2, 6):
            for s in range(1, n):
                lhs, rhs = step0_sides(n, s, f, 12)
                assert lhs == rhs and lhs.order == 12

    def test_half_normal_like_witness(self):
        # rational stand-in for the half-normal germ: exp(-x^2/2)
        f = MaclaurinJet(sympy_coeffs(sp.exp(-(X**2) / 2), X, 10))
        lhs, rhs = step0_sides(3, 1, f, 10)
        assert lhs != rhs

    def test_perturbed_witnesses(self):
        for n in range(2, 6):
            for s in range(1, n):
                lhs, rhs = step0_sides(n, s, UNIT.jet(12).perturbed(2), 12)
                assert lhs != rhs

    def test_against_sympy_densities(self):
        # n = 3, s = 1: int_0^z F f(x) f(3(z-x)) dx  vs  f(z) int_0^z F f
        f = sp.exp(-X)
        F = 1 - sp.exp(-X)
        lhs = sp.integrate((F * f) * f.subs(X, 3 * (Z - X)), (X, 0, Z))
        rhs = f.subs(X, Z) * sp.integrate(F * f, (X, 0, Z))
        jl, jr = step0_sides(3, 1, UNIT.jet(8), 8)
        assert list(jl.coeffs) == sympy_coeffs(lhs, Z, 8)
        assert list(jr.coeffs) == sympy_coeffs(rhs, Z, 8)

    def test_rejects_order_beyond_jet(self):
        with pytest.raises(InsufficientOrderError):
            step0_sides(3, 1, UNIT.jet(6), 10)

    def test_truncation_consistency(self):
        for n, s in [(3, 1), (4, 2), (5, 4)]:
            small = step0_sides(n, s, UNIT.jet(8).perturbed(1), 8)
            big = step0_sides(n, s, UNIT.jet(12).perturbed(1), 12)
            assert [b.truncate(8) for b in big] == list(small)


class TestDifferentiatedIdentity:
    @pytest.mark.parametrize("n,s,t", [(2, 1, 1), (4, 2, 2)])
    def test_null_examples(self, n, s, t):
        f = UNIT.jet(12)
        gd = max_density_jet(n - s - 1, f).derivatives()
        lhs, rhs = newstep2_sides(IndexContext(n, s, t), f.derivatives(), gd)
        assert lhs == rhs

    def test_low_g_entries_are_never_weighted(self):
        n, s, t = 4, 1, 2
        f = UNIT.jet(12)
        gd = list(max_density_jet(n - s - 1, f).derivatives())
        assert gd[: n - s - 1] == [0] * (n - s - 1)
        base = newstep2_sides(IndexContext(n, s, t), f.derivatives(), gd)
        gd[: n - s - 1] = [0] * (n - s - 1)
        assert newstep2_sides(IndexContext(n, s, t), f.derivatives(), gd) == base

    @pytest.mark.parametrize("perturb", [None, 1, 3])
    def test_equals_derivatives_of_integral_sides(self, perturb):
        f = UNIT.jet(12) if perturb is None else UNIT.jet(12).perturbed(perturb)
        for n in range(2, 6):
            for s in range(1, n):
                for t in range(1, 13 - n):
                    lhs_jet, rhs_jet = step0_sides(n, s, f, n + t)
                    gd = max_density_jet(n - s - 1, f).derivatives()
                    got = newstep2_sides(IndexContext(n, s, t), f.derivatives(), gd)
                    assert got == (lhs_jet.derivative_at_zero(n + t), rhs_jet.derivative_at_zero(n + t))

    def test_missing_derivative(self):
        with pytest.raises(MissingDerivativeError):
            newstep2_sides(IndexContext(3, 1, 2), [1, -1], [0, 1, -3, 7])


class TestInduction:
    @pytest.mark.parametrize(
        "n,s,f0,f1,T",
        [(2, 1, 1, -1, 8), (5, 3, 1, -1, 6), (3, 1, 2, -4, 5)],
    )
    def test_examples(self, n, s, f0, f1, T):
        ratio = Fraction(f1, f0)
        want = [ratio ** (k - 1) * f1 for k in range(2, T + 2)]
        assert induction_solver(n, s, f0, f1, T) == want

    @pytest.mark.parametrize("n", range(2, 6))
    def test_grid_with_nonzero_pivot(self, n):
        for s in range(1, n):
            for f0, f1 in [(1, -1), (2, -4), (3, -9), (1, 2)]:
                for step in induction_steps(n, s, f0, f1, 8):
                    assert step.coefficient != 0
                    assert step.coefficient == step.closed_coefficient
                    assert step.value == DensityJetModel(f0, f1).derivative(step.t + 1)

    def test_literal_zero_kernel_would_be_underdetermined(self):
        # with G_0 = F the pivot carries G_0(0) = F(0) = 0
        assert g_jet(0, UNIT.jet(3)).derivative_at_zero(0) == 0
        assert max_density_jet(0, UNIT.jet(3)).derivative_at_zero(0) == 1

    def test_preconditions(self):
        with pytest.raises(ValueError):
            induction_solver(3, 1, 0, -1, 3)
        with pytest.raises(ValueError):
            induction_solver(3, 1, 1, 0, 3)

    def test_underdetermined_is_an_arithmetic_error(self):
        assert issubclass(UnderdeterminedError, ArithmeticError)


class TestReconstruct:
    @pytest.mark.parametrize(
        "f0,f1,rate,normalized",
        [(1, -1, 1, True), (2, -4, 2, True), (1, -2, 2, False)],
    )
    def test_examples(self, f0, f1, rate, normalized):
        assert reconstruct_density(f0, f1) == (rate, normalized)

    @pytest.mark.parametrize("f1", [0, 1])
    def test_rejects_nonnegative_slope(self, f1):
        with pytest.raises(ValueError):
            reconstruct_density(1, f1)
