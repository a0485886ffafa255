"""Grid-driven verification suites over the exact kernel and the jet oracles."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

from .exact import IndexContext, coeff_c, lemma1_check, ruiz_check, ruiz_expected, step3_check
from .jets import (
    DensityJetModel,
    MaclaurinJet,
    UnderdeterminedError,
    g_jet,
    induction_steps,
    k_derivative_closed,
    k_jet,
    lemma2_closed,
    max_density_jet,
    newstep2_sides,
    step0_sides,
)

RUIZ_N_MAX = 10
RUIZ_PROBES = tuple(Fraction(7 * k - 30, 11) for k in range(20))
PATTERN_MODELS = (
    DensityJetModel(Fraction(1), Fraction(-1)),
    DensityJetModel(Fraction(2), Fraction(-4)),
    DensityJetModel(Fraction(3), Fraction(-9)),
    DensityJetModel(Fraction(1, 2), Fraction(-3, 4)),
)
SOLVER_MODELS = PATTERN_MODELS[:3]
WITNESS_COEFF = 2
LEMMA2_M_MAX = 6
LEMMA2_D_MAX = 6

# supported grid ranges: (low, high) inclusive
LIMITS = {"n_max": (2, 10), "s_max": (1, 12), "r_max": (1, 20), "t_max": (1, 10), "order": (1, 40)}


@dataclass
class VerificationReport:
    suite: str
    tag: str
    cases_run: int = 0
    cases_passed: int = 0
    first_failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.cases_passed == self.cases_run

    def record(self, case: dict, expected: Any, got: Any, passed: bool | None = None):
        self.cases_run += 1
        if passed is None:
            passed = expected == got
        if passed:
            self.cases_passed += 1
        elif self.first_failure is None:
            self.first_failure = {"case": case, "expected": _show(expected), "got": _show(got)}

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "tag": self.tag,
            "cases_run": self.cases_run,
            "cases_passed": self.cases_passed,
            "first_failure": self.first_failure,
        }


def _show(v):
    if isinstance(v, (tuple, list)):
        return [_show(x) for x in v]
    if isinstance(v, MaclaurinJet):
        return [str(c) for c in v.coeffs]
    return str(v)


def check_limits(**bounds):
    for name, value in bounds.items():
        lo, hi = LIMITS[name]
        if not lo <= value <= hi:
            raise ValueError(f"{name}={value} outside supported range [{lo}, {hi}]")


def identity_suites(n_max: int = 6, s_max: int = 8, r_max: int = 12, t_max: int = 4) -> list[VerificationReport]:
    check_limits(n_max=n_max, s_max=s_max, r_max=r_max, t_max=t_max)
    reports = []
    tags = {"i": "binomial recurrence", "ii": "shifted-binomial recurrence", "iii": "geometric recurrence"}
    for variant, tag in tags.items():
        rep = VerificationReport(f"recurrence-{variant}", tag)
        for s in range(1, s_max + 1):
            for r in range(1, r_max + 1):
                lhs, rhs = lemma1_check(variant, s, r)
                rep.record({"s": s, "r": r}, rhs, lhs)
        reports.append(rep)

    rep = VerificationReport("vanishing-differences", "H_{n,i} = 0 for i < n, n! at i = n")
    for n in range(RUIZ_N_MAX + 1):
        want = ruiz_expected(n)
        for x in RUIZ_PROBES:
            rep.record({"n": n, "x": str(x)}, want, ruiz_check(n, x))
    reports.append(rep)

    contexts = [IndexContext(n, s, t) for n in range(2, n_max + 1) for s in range(1, n) for t in range(1, t_max + 1)]
    rep = VerificationReport("nested-sum-closure", "a-sum = b-sum = H_{n-1,n+t}(n)/(n-1)_s")
    for ctx in contexts:
        lhs, rhs, closed = step3_check(ctx)
        rep.record({"n": ctx.n, "s": ctx.s, "t": ctx.t}, (closed, closed, closed), (lhs, rhs, closed))
    reports.append(rep)

    rep = VerificationReport("corner-coefficient", "c_{0,...,0,n-s+t} = 0")
    for ctx in contexts:
        idx = (0,) * (ctx.s - 1) + (ctx.n - ctx.s + ctx.t,)
        rep.record({"n": ctx.n, "s": ctx.s, "t": ctx.t}, Fraction(0), coeff_c(ctx, idx))
    reports.append(rep)
    return reports


def _first_gap(a: MaclaurinJet, b: MaclaurinJet) -> int | None:
    for k, (x, y) in enumerate(zip(a.coeffs, b.coeffs)):
        if x != y:
            return k
    return None


def analytic_suites(
    n_max: int = 6,
    order: int = 12,
    solver_T: int = 8,
    perturb: int | None = None,
) -> list[VerificationReport]:
    """Jet oracles against closed forms.

    ``perturb=k`` adds 1 to coefficient ``k`` of every pattern jet, a negative
    control that must surface as a failure at that order.
    """
    check_limits(n_max=n_max, order=order, t_max=solver_T)
    need = LEMMA2_M_MAX + LEMMA2_D_MAX
    if order < need:
        raise ValueError(f"jet order {order} is below the {need} needed for the G_m derivative grid")
    if perturb is not None and not 0 <= perturb <= order:
        raise ValueError(f"perturb index {perturb} outside 0..{order}")

    def pattern_jet(model: DensityJetModel, N: int) -> MaclaurinJet:
        jet = model.jet(N)
        return jet.perturbed(perturb) if perturb is not None and perturb <= N else jet

    reports = []
    rep = VerificationReport("power-times-density", "G_m^{(m+d)}(0) closed form")
    for model in PATTERN_MODELS:
        f = pattern_jet(model, order)
        for m in range(1, LEMMA2_M_MAX + 1):
            G = g_jet(m, f)
            for d in range(-m, LEMMA2_D_MAX + 1):
                rep.record(
                    {"f0": str(model.f0), "f1": str(model.f1), "m": m, "d": d},
                    lemma2_closed(m, d, model.f0, model.f1),
                    G.derivative_at_zero(m + d),
                )
    reports.append(rep)

    rep = VerificationReport("convolution-kernel", "K_{n,s-1}^{(m)}(0) multi-sum")
    f = pattern_jet(PATTERN_MODELS[0], order)
    for n in range(3, n_max + 1):
        for s in range(2, n):
            K = k_jet(n, s, f)
            for m in range(s - 1, s + 5):
                rep.record({"n": n, "s": s, "m": m}, k_derivative_closed(n, s, m, f.derivatives()), K.derivative_at_zero(m))
    reports.append(rep)

    step_n = min(n_max, 5)
    rep = VerificationReport("integral-identity", "sum side = max side, to the jet order")
    wit = VerificationReport("integral-witness", "perturbed density breaks the identity")
    for model in PATTERN_MODELS:
        f = pattern_jet(model, order)
        witness = model.jet(order).perturbed(WITNESS_COEFF)
        for n in range(2, step_n + 1):
            for s in range(1, n):
                case = {"f0": str(model.f0), "f1": str(model.f1), "n": n, "s": s}
                lhs, rhs = step0_sides(n, s, f, order)
                gap = _first_gap(lhs, rhs)
                if gap is None:
                    rep.record(case, rhs, lhs)
                else:
                    rep.record({**case, "coefficient": gap}, rhs[gap], lhs[gap])
                wl, wr = step0_sides(n, s, witness, order)
                wit.record(case, "differ", "differ" if wl != wr else "equal")
    reports += [rep, wit]

    rep = VerificationReport("differentiated-identity", "multi-sums = (n+t)-th derivatives")
    f = pattern_jet(PATTERN_MODELS[0], order)
    for n in range(2, step_n + 1):
        for s in range(1, n):
            for t in range(1, order - n + 1):
                ctx = IndexContext(n, s, t)
                lhs_jet, rhs_jet = step0_sides(n, s, f, n + t)
                gd = max_density_jet(n - s - 1, f).derivatives()
                lhs, rhs = newstep2_sides(ctx, f.derivatives(), gd)
                want = (lhs_jet.derivative_at_zero(n + t), rhs_jet.derivative_at_zero(n + t))
                rep.record({"n": n, "s": s, "t": t}, want, (lhs, rhs))
    reports.append(rep)

    rep = VerificationReport("induction", "solved f^{(k)}(0) follow the exponential pattern")
    for model in SOLVER_MODELS:
        for n in range(2, step_n + 1):
            for s in range(1, n):
                case = {"f0": str(model.f0), "f1": str(model.f1), "n": n, "s": s}
                try:
                    steps = induction_steps(n, s, model.f0, model.f1, solver_T)
                except UnderdeterminedError as exc:
                    rep.record(case, "determined", str(exc), passed=False)
                    continue
                want = [model.derivative(k) for k in range(2, solver_T + 2)]
                got = [st.value for st in steps]
                ok = want == got and all(st.coefficient != 0 and st.coefficient == st.closed_coefficient for st in steps)
                rep.record(case, want, got, passed=ok)
    reports.append(rep)
    return reports


def all_passed(reports: Iterable[VerificationReport]) -> bool:
    return all(r.ok for r in reports)
