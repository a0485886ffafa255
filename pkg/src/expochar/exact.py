"""Exact rational kernel for the alternating binomial sums H_{n,i}(x).

Every value here is a :class:`fractions.Fraction`, so the identities can be
checked with ``==`` and no tolerance.

    H_{n,i}(x) = sum_{j=0}^{n} (-1)^j C(n, j) (x - j)^i

The multi-index machinery (``IndexContext``, ``coeff_a``/``coeff_b``/``coeff_c``)
follows the nested sums that appear when both sides of the maxima identity are
differentiated at zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import Iterator, Sequence

ExactScalar = Fraction

__all__ = [
    "ExactScalar",
    "HQuery",
    "IndexContext",
    "InadmissibleIndexError",
    "as_exact",
    "h",
    "falling_factorial",
    "coeff_a",
    "coeff_b",
    "coeff_c",
    "lemma1_check",
    "step3_check",
    "ruiz_check",
]


class InadmissibleIndexError(ValueError):
    """A multi-index lies outside the admissible set of its context."""


def as_exact(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"7/2"`` to a Fraction.

    Floats are refused: they would smuggle rounding into exact checks.
    """
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars; pass a Fraction or str")
    return Fraction(x)


@dataclass(frozen=True)
class HQuery:
    n: int
    i: int
    x: Fraction

    def __post_init__(self):
        if self.n < 0 or self.i < 0:
            raise ValueError(f"n and i must be nonnegative, got n={self.n}, i={self.i}")
        object.__setattr__(self, "x", as_exact(self.x))


def h(n: int, i: int, x) -> Fraction:
    """Evaluate H_{n,i}(x) exactly."""
    q = HQuery(n, i, x)
    total = Fraction(0)
    for j in range(q.n + 1):
        term = comb(q.n, j) * (q.x - j) ** q.i
        total += -term if j % 2 else term
    return total


def falling_factorial(n: int, s: int) -> Fraction:
    """``n (n-1) ... (n-s+1)``."""
    if s < 1:
        raise ValueError(f"s must be positive, got {s}")
    out = 1
    for k in range(s):
        out *= n - k
    return Fraction(out)


@dataclass(frozen=True)
class IndexContext:
    """The ``(n, s, t)`` triple and its derived scales ``d_j`` and ranges ``r_j``.

    ``r_j`` depends on the prefix ``i_1..i_{j-1}`` of a multi-index; the sum is
    taken over ``k = 1..j-1`` (equivalently ``k = 0..j-1`` with ``i_0 = 0``).
    """

    n: int
    s: int
    t: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 1 <= self.s <= self.n - 1:
            raise ValueError(f"s must satisfy 1 <= s <= n-1, got s={self.s}, n={self.n}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")

    def d(self, j: int) -> int:
        return self.n - j + 1

    def r(self, j: int, idx: Sequence[int]) -> int:
        return self.n - self.s + self.t + 1 - sum(idx[: j - 1])

    def is_admissible(self, idx: Sequence[int]) -> bool:
        if len(idx) != self.s or any(i < 0 for i in idx):
            return False
        for j in range(1, self.s):
            if idx[j - 1] > self.r(j, idx):
                return False
        return idx[-1] <= self.r(self.s, idx) - 1

    def indices(self) -> Iterator[tuple[int, ...]]:
        """Admissible multi-indices in lexicographic order."""
        yield from self._walk(())

    def _walk(self, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        j = len(prefix) + 1
        bound = self.r(j, prefix)
        if j == self.s:
            for last in range(bound):
                yield prefix + (last,)
            return
        for i in range(bound + 1):
            yield from self._walk(prefix + (i,))

    def check(self, idx: Sequence[int]) -> tuple[int, ...]:
        idx = tuple(int(i) for i in idx)
        if not self.is_admissible(idx):
            raise InadmissibleIndexError(f"index {idx} is not admissible for {self}")
        return idx


def coeff_a(ctx: IndexContext, idx: Sequence[int]) -> Fraction:
    """Scale-power coefficient ``d_s^{r_s-i_s-1} prod_{j<s} d_j^{i_j}``."""
    idx = ctx.check(idx)
    s = ctx.s
    out = ctx.d(s) ** (ctx.r(s, idx) - idx[-1] - 1)
    for j in range(1, s):
        out *= ctx.d(j) ** idx[j - 1]
    return Fraction(out)


def coeff_b(ctx: IndexContext, idx: Sequence[int]) -> Fraction:
    """Binomial coefficient ``C(r_s, i_s+1) prod_{j<s} C(r_j+s-j, i_j)``."""
    idx = ctx.check(idx)
    s = ctx.s
    out = comb(ctx.r(s, idx), idx[-1] + 1)
    for j in range(1, s):
        out *= comb(ctx.r(j, idx) + s - j, idx[j - 1])
    return Fraction(out)


def coeff_c(ctx: IndexContext, idx: Sequence[int]) -> Fraction:
    return coeff_a(ctx, idx) - coeff_b(ctx, idx)


def lemma1_check(variant: str, s: int, r: int) -> tuple[Fraction, Fraction]:
    """Both sides of one of the three H recurrences, evaluated separately.

    ``"i"``:   sum_{j<r} C(r,j) H_{s-1,j}(s)         = H_{s,r}(s+1)
    ``"ii"``:  sum_{j<r} C(r,j+1) H_{s,j}(s+1)       = H_{s+1,r}(s+2) / (s+1)
    ``"iii"``: sum_{j<r} (s+2)^{r-1-j} H_{s,j}(s+1)  = H_{s+1,r}(s+2) / (s+1)
    """
    if s < 1 or r < 1:
        raise ValueError(f"s and r must be positive, got s={s}, r={r}")
    if variant == "i":
        lhs = sum((comb(r, j) * h(s - 1, j, s) for j in range(r)), Fraction(0))
        rhs = h(s, r, s + 1)
    elif variant == "ii":
        lhs = sum((comb(r, j + 1) * h(s, j, s + 1) for j in range(r)), Fraction(0))
        rhs = h(s + 1, r, s + 2) / (s + 1)
    elif variant == "iii":
        lhs = sum(((s + 2) ** (r - 1 - j) * h(s, j, s + 1) for j in range(r)), Fraction(0))
        rhs = h(s + 1, r, s + 2) / (s + 1)
    else:
        raise ValueError(f"unknown variant {variant!r}; expected 'i', 'ii' or 'iii'")
    return lhs, rhs


def _brute_indices(ctx: IndexContext) -> Iterator[tuple[int, ...]]:
    # Superset box filtered by admissibility; independent of IndexContext.indices.
    top = ctx.n - ctx.s + ctx.t + 1
    for idx in product(range(top + 1), repeat=ctx.s):
        if ctx.is_admissible(idx):
            yield idx


def step3_check(ctx: IndexContext) -> tuple[Fraction, Fraction, Fraction]:
    """Return ``(sum a*H, sum b*H, closed form)`` over the admissible set.

    The a-sum walks the recursive enumerator, the b-sum a filtered box, and the
    closed form ``H_{n-1,n+t}(n) / (n-1)_s`` touches neither.
    """
    m = ctx.n - ctx.s - 1
    hcache: dict[int, Fraction] = {}

    def hv(i):
        if i not in hcache:
            hcache[i] = h(m, i, ctx.n - ctx.s)
        return hcache[i]

    lhs = sum((coeff_a(ctx, idx) * hv(idx[-1]) for idx in ctx.indices()), Fraction(0))
    rhs = sum((coeff_b(ctx, idx) * hv(idx[-1]) for idx in _brute_indices(ctx)), Fraction(0))
    closed = h(ctx.n - 1, ctx.n + ctx.t, ctx.n) / falling_factorial(ctx.n - 1, ctx.s)
    return lhs, rhs, closed


def ruiz_check(n: int, x) -> tuple[Fraction, ...]:
    """``(H_{n,0}(x), ..., H_{n,n}(x))``; expected ``(0, ..., 0, n!)`` for every x."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    x = as_exact(x)
    return tuple(h(n, i, x) for i in range(n + 1))


def ruiz_expected(n: int) -> tuple[Fraction, ...]:
    return (Fraction(0),) * n + (Fraction(factorial(n)),)
