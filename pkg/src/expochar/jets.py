"""Truncated Maclaurin series ("jets") with exact rational coefficients.

A jet stores power-series coefficients ``a_k = f^{(k)}(0) / k!`` for
``k <= order``; whatever lies beyond ``order`` is unknown, not zero.  Binary
operations truncate to the smaller order, so an answer is never extended past
what its inputs determine.

On top of the arithmetic sit the derivative oracles for ``G_m = F^m f`` and the
nested convolution kernels ``K_{n,s-1}``.  They are used to check the closed
forms and to replay the induction that forces the exponential derivative
pattern ``f^{(k)}(0) = (f'(0)/f(0))^{k-1} f'(0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .exact import IndexContext, as_exact, coeff_a, coeff_b, coeff_c, h

DEFAULT_ORDER = 12

__all__ = [
    "DEFAULT_ORDER",
    "MaclaurinJet",
    "DensityJetModel",
    "InsufficientOrderError",
    "MissingDerivativeError",
    "UnderdeterminedError",
    "InductionStep",
    "jet_mul",
    "jet_antiderivative",
    "jet_scale_arg",
    "jet_convolve",
    "g_jet",
    "max_density_jet",
    "lemma2_closed",
    "k_derivative_closed",
    "k_jet",
    "step0_sides",
    "newstep2_sides",
    "induction_solver",
    "induction_steps",
    "reconstruct_density",
]


class InsufficientOrderError(ValueError):
    """A derivative or coefficient was requested beyond the jet's order."""


class MissingDerivativeError(KeyError):
    """A derivative table lacks an order the requested sum needs."""


class UnderdeterminedError(ArithmeticError):
    """The unknown derivative has coefficient zero, so it cannot be solved for."""


class MaclaurinJet:
    """Immutable truncated power series about 0."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence):
        if len(coeffs) == 0:
            raise ValueError("a jet needs at least the constant coefficient")
        self._coeffs = tuple(as_exact(c) for c in coeffs)

    @classmethod
    def from_derivatives(cls, derivs: Sequence) -> "MaclaurinJet":
        return cls([as_exact(v) / factorial(k) for k, v in enumerate(derivs)])

    @classmethod
    def constant(cls, value, order: int = 0) -> "MaclaurinJet":
        return cls([value] + [0] * order)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if not 0 <= k <= self.order:
            raise InsufficientOrderError(f"coefficient {k} requested from a jet of order {self.order}")
        return self._coeffs[k]

    def derivative_at_zero(self, k: int) -> Fraction:
        return self[k] * factorial(k)

    def derivatives(self) -> tuple[Fraction, ...]:
        return tuple(c * factorial(k) for k, c in enumerate(self._coeffs))

    def truncate(self, order: int) -> "MaclaurinJet":
        if order > self.order:
            raise InsufficientOrderError(f"cannot extend a jet of order {self.order} to {order}")
        return MaclaurinJet(self._coeffs[: order + 1])

    def perturbed(self, k: int, delta=1) -> "MaclaurinJet":
        c = list(self._coeffs)
        c[k] += as_exact(delta)
        return MaclaurinJet(c)

    def __add__(self, other: "MaclaurinJet") -> "MaclaurinJet":
        N = min(self.order, other.order)
        return MaclaurinJet([self._coeffs[k] + other._coeffs[k] for k in range(N + 1)])

    def __sub__(self, other: "MaclaurinJet") -> "MaclaurinJet":
        N = min(self.order, other.order)
        return MaclaurinJet([self._coeffs[k] - other._coeffs[k] for k in range(N + 1)])

    def __mul__(self, other: "MaclaurinJet") -> "MaclaurinJet":
        return jet_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, MaclaurinJet):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"MaclaurinJet([{', '.join(str(c) for c in self._coeffs)}])"


def jet_mul(a: MaclaurinJet, b: MaclaurinJet) -> MaclaurinJet:
    """Cauchy product, truncated to ``min(a.order, b.order)``."""
    N = min(a.order, b.order)
    ca, cb = a.coeffs, b.coeffs
    return MaclaurinJet([sum((ca[p] * cb[k - p] for p in range(k + 1)), Fraction(0)) for k in range(N + 1)])


def jet_antiderivative(a: MaclaurinJet) -> MaclaurinJet:
    """``x -> int_0^x a``; zero constant term, order grows by one."""
    return MaclaurinJet([Fraction(0)] + [c / (k + 1) for k, c in enumerate(a.coeffs)])


def jet_scale_arg(a: MaclaurinJet, d) -> MaclaurinJet:
    """Series of ``x -> a(d x)``."""
    d = as_exact(d)
    return MaclaurinJet([c * d**k for k, c in enumerate(a.coeffs)])


def jet_convolve(b: MaclaurinJet, c: MaclaurinJet) -> MaclaurinJet:
    """Series of ``z -> int_0^z b(x) c(z - x) dx``.

    ``x^p`` against ``(z-x)^q`` integrates to ``p! q! / (p+q+1)! z^{p+q+1}``.
    The result has order ``min(b.order, c.order) + 1``.
    """
    N = min(b.order, c.order)
    out = [Fraction(0)] * (N + 2)
    cb, cc = b.coeffs, c.coeffs
    for k in range(N + 1):
        acc = Fraction(0)
        for p in range(k + 1):
            q = k - p
            acc += cb[p] * cc[q] * factorial(p) * factorial(q)
        out[k + 1] = acc / factorial(k + 1)
    return MaclaurinJet(out)


@dataclass(frozen=True)
class DensityJetModel:
    """Density germ at 0 given by ``f(0)``, ``f'(0)`` and a rule for higher orders.

    Without ``rule`` the exponential pattern is used, i.e. the germ of
    ``f0 * exp((f1/f0) x)``.  ``rule(k)`` must return ``f^{(k)}(0)``.
    """

    f0: Fraction
    f1: Fraction
    rule: Callable[[int], Fraction] | None = None

    def __post_init__(self):
        object.__setattr__(self, "f0", as_exact(self.f0))
        object.__setattr__(self, "f1", as_exact(self.f1))
        if self.f0 <= 0:
            raise ValueError(f"f(0) must be positive, got {self.f0}")

    @classmethod
    def unit_exponential(cls) -> "DensityJetModel":
        return cls(Fraction(1), Fraction(-1))

    def derivative(self, k: int) -> Fraction:
        if k == 0:
            return self.f0
        if k == 1:
            return self.f1
        if self.rule is not None:
            return as_exact(self.rule(k))
        return (self.f1 / self.f0) ** (k - 1) * self.f1

    def jet(self, order: int = DEFAULT_ORDER) -> MaclaurinJet:
        return MaclaurinJet.from_derivatives([self.derivative(k) for k in range(order + 1)])


def g_jet(m: int, f: MaclaurinJet) -> MaclaurinJet:
    """``G_m = F^m f`` for ``m >= 1`` and ``G_0 = F``, with ``F = int_0 f``."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    F = jet_antiderivative(f)
    if m == 0:
        return F
    out = f
    for _ in range(m):
        out = jet_mul(out, F)
    return out


def max_density_jet(m: int, f: MaclaurinJet) -> MaclaurinJet:
    """``F^m f`` for every ``m >= 0``.

    This is the density of the maximum of ``m+1`` draws divided by ``m+1``.
    It agrees with :func:`g_jet` for ``m >= 1``, but at ``m = 0`` it is ``f``,
    not ``F``. The maxima identity at ``s = n-1`` needs the ``f`` version.
    """
    if m == 0:
        return f
    return g_jet(m, f)


def lemma2_closed(m: int, d: int, f0, f1) -> Fraction:
    """Closed form of ``G_m^{(m+d)}(0)`` under the exponential pattern."""
    f0, f1 = as_exact(f0), as_exact(f1)
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if d < -m:
        raise ValueError(f"d must be >= -m, got d={d}, m={m}")
    if f0 <= 0:
        raise ValueError(f"f0 must be positive, got {f0}")
    if d < 0:
        return Fraction(0)
    return (f1 / f0) ** d * f0 ** (m + 1) * h(m, m + d, m + 1)


def _deriv(table: Sequence, k: int, name: str = "f") -> Fraction:
    if k < 0 or k >= len(table):
        raise MissingDerivativeError(f"{name}^({k})(0) is not in a table of length {len(table)}")
    return as_exact(table[k])


def k_derivative_closed(n: int, s: int, m: int, fderivs: Sequence) -> Fraction:
    """``K_{n,s-1}^{(m)}(0)`` from the closed multi-sum over compositions.

    ``fderivs[k]`` holds ``f^{(k)}(0)``; scales are ``d_j = n - j + 1``.
    """
    if s < 2 or s > n:
        raise ValueError(f"need 2 <= s <= n, got s={s}, n={n}")
    if m < s - 1:
        raise ValueError(f"need m >= s-1, got m={m}, s={s}")
    d = [n - j + 1 for j in range(1, s + 1)]

    def walk(j: int, budget: int) -> Fraction:
        # budget is l_j = m - s + 1 - (i_1 + ... + i_{j-1})
        if j == s:
            return Fraction(d[s - 1]) ** budget * _deriv(fderivs, budget)
        acc = Fraction(0)
        for i in range(budget + 1):
            acc += Fraction(d[j - 1]) ** i * _deriv(fderivs, i) * walk(j + 1, budget - i)
        return acc

    return walk(1, m - s + 1)


def k_jet(n: int, s: int, f: MaclaurinJet) -> MaclaurinJet:
    """``K_{n,s-1}``: convolution of ``f(n x), f((n-1) x), ..., f((n-s+1) x)``."""
    if s < 1 or s > n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    if s == 1:
        return jet_scale_arg(f, n)
    return jet_convolve(jet_scale_arg(f, n), k_jet(n - 1, s - 1, f))


def step0_sides(n: int, s: int, f: MaclaurinJet, order: int = DEFAULT_ORDER) -> tuple[MaclaurinJet, MaclaurinJet]:
    """Series of both sides of the integral form of the maxima identity.

    Both sides are the densities of the two maxima expressions divided by
    ``(n)_{s+1}``. The left is ``F^{n-s-1} f`` convolved with ``K_{n,s-1}``.
    The right is ``f(z) int_0^z f(x_1) ... int_0^{x_{s-1}} F^{n-s-1} f``,
    built from the inside out.
    """
    if not 1 <= s <= n - 1:
        raise ValueError(f"need 1 <= s <= n-1, got s={s}, n={n}")
    if f.order < order:
        raise InsufficientOrderError(f"order {order} requested from a density jet of order {f.order}")
    inner = max_density_jet(n - s - 1, f)
    lhs = jet_convolve(inner, k_jet(n, s, f))
    rhs = inner
    for _ in range(s):
        rhs = jet_mul(f, jet_antiderivative(rhs))
    return lhs.truncate(order), rhs.truncate(order)


def newstep2_sides(ctx: IndexContext, fderivs: Sequence, gderivs: Sequence) -> tuple[Fraction, Fraction]:
    """Both multi-sums of the differentiated identity, term by term.

    ``fderivs[k] = f^{(k)}(0)`` and ``gderivs[k] = G^{(k)}(0)`` with
    ``G = F^{n-s-1} f``. The sums equal the ``(n+t)``-th derivatives at 0 of
    the two :func:`step0_sides`.
    """
    lhs = Fraction(0)
    rhs = Fraction(0)
    s = ctx.s
    for idx in ctx.indices():
        common = _deriv(fderivs, ctx.r(s, idx) - idx[-1] - 1) * _deriv(gderivs, idx[-1], "G")
        for i in idx[:-1]:
            common *= _deriv(fderivs, i)
        lhs += coeff_a(ctx, idx) * common
        rhs += coeff_b(ctx, idx) * common
    return lhs, rhs


@dataclass(frozen=True)
class InductionStep:
    t: int
    value: Fraction  # solved f^{(t+1)}(0)
    coefficient: Fraction  # multiplier of the unknown in the reduced equation
    closed_coefficient: Fraction  # f0^{s-1} G^{(n-s-1)}(0) * sum of c over the pivot set


def _pivot_indices(ctx: IndexContext) -> list[tuple[int, ...]]:
    # i_s = n-s-1 with a zero prefix, or a prefix holding a single t+1.
    base = [0] * (ctx.s - 1)
    out = [tuple(base) + (ctx.n - ctx.s - 1,)]
    for j in range(ctx.s - 1):
        p = list(base)
        p[j] = ctx.t + 1
        out.append(tuple(p) + (ctx.n - ctx.s - 1,))
    return out


def _reduced_sum(ctx: IndexContext, fderivs: Sequence, gderivs: Sequence) -> Fraction:
    m = ctx.n - ctx.s - 1
    acc = Fraction(0)
    for idx in ctx.indices():
        if idx[-1] < m:
            continue
        c = coeff_c(ctx, idx)
        if c == 0:
            continue
        term = c * _deriv(fderivs, ctx.r(ctx.s, idx) - idx[-1] - 1) * _deriv(gderivs, idx[-1], "G")
        for i in idx[:-1]:
            term *= _deriv(fderivs, i)
        acc += term
    return acc


def induction_steps(n: int, s: int, f0, f1, T: int) -> list[InductionStep]:
    """Solve for ``f^{(2)}(0), ..., f^{(T+1)}(0)`` one order at a time.

    At step ``t`` the reduced equation (sum of ``c`` times derivative products
    starting at ``i_s = n-s-1``) contains only derivatives of ``f`` of order at most
    ``t+1``.  It is affine in the unknown ``f^{(t+1)}(0)``, so two evaluations give
    its slope and intercept.
    """
    f0, f1 = as_exact(f0), as_exact(f1)
    if f0 <= 0:
        raise ValueError(f"f0 must be positive, got {f0}")
    if f1 == 0:
        raise ValueError("f1 must be nonzero")
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    m = n - s - 1
    known = [f0, f1]
    steps = []
    for t in range(1, T + 1):
        ctx = IndexContext(n, s, t)
        top = n - s + t  # highest G order read

        def evaluate(x: Fraction) -> Fraction:
            fd = known + [x]
            # G_m^{(m+d)}(0) involves f only up to order d <= t+1, so the zero
            # padding needed to carry the jet to order m+t+1 is never read.
            fjet = MaclaurinJet.from_derivatives(fd + [Fraction(0)] * max(0, top - len(fd) + 1))
            gd = max_density_jet(m, fjet).derivatives()
            return _reduced_sum(ctx, fd, gd)

        e0, e1, e2 = evaluate(Fraction(0)), evaluate(Fraction(1)), evaluate(Fraction(2))
        slope = e1 - e0
        assert e2 - e1 == slope, "reduced equation is not affine in the unknown"

        pivot_c = sum((coeff_c(ctx, idx) for idx in _pivot_indices(ctx)), Fraction(0))
        closed = f0 ** (s - 1) * f0 ** (m + 1) * h(m, m, m + 1) * pivot_c
        if slope == 0:
            raise UnderdeterminedError(f"coefficient of f^({t + 1})(0) vanishes at n={n}, s={s}, t={t}")
        value = -e0 / slope
        known.append(value)
        steps.append(InductionStep(t, value, slope, closed))
    return steps


def induction_solver(n: int, s: int, f0, f1, T: int) -> list[Fraction]:
    """Return the solved ``f^{(2)}(0), ..., f^{(T+1)}(0)``."""
    return [step.value for step in induction_steps(n, s, f0, f1, T)]


def reconstruct_density(f0, f1) -> tuple[Fraction, bool]:
    """Rate of ``f0 exp((f1/f0) x)`` and whether that function integrates to one."""
    f0, f1 = as_exact(f0), as_exact(f1)
    if f0 <= 0:
        raise ValueError(f"f0 must be positive, got {f0}")
    if f1 >= 0:
        raise ValueError(f"f1 must be negative for a normalizable density, got {f1}")
    rate = -f1 / f0
    return rate, f0 == rate
