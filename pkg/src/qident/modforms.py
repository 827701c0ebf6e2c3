"""Classical q-expansions: Delta, E4, the j-function, and derived counts.

Everything here is exact.  The building blocks are

    Delta(q) = q prod_{n>=1} (1 - q^n)^24
    E4(q)    = 1 + 240 sum_{n>=1} sigma_3(n) q^n
    j(q)     = E4^3 / Delta = q^-1 + 744 + 196884 q + ...

The expansion coefficients c(n) of j - 744 drive the product identities;
c'(n) is the same sequence with the constant term replaced by 24.  The
colored partition counts p_k(n) (partitions of n into parts of k colors)
give the inverse Delta expansion Delta^-1 = sum p_24(n) q^(n-1) and the
physical-state multiplicity formulas, with the distinguished dimension 26
using p_24(1 - norm/2) and every other dimension k > 2 using
p_(k-1)(1 - norm/2) - p_(k-1)(norm/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Mapping

from .exactseries import (
    QSeries,
    as_integer,
    extract_product_exponents,
    power_product,
)


def sigma_k(n: int, k: int) -> int:
    """Sum of k-th powers of the divisors of n."""
    if n < 1:
        raise ValueError("divisor sums need n >= 1")
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def eisenstein_e4(trunc: int) -> QSeries:
    coeffs: Dict[int, int] = {0: 1}
    for n in range(1, trunc + 1):
        coeffs[n] = 240 * sigma_k(n, 3)
    return QSeries(coeffs, 0, trunc)


def delta(trunc: int) -> QSeries:
    """The discriminant cusp form q prod_{n>=1} (1 - q^n)^24."""
    if trunc < 1:
        raise ValueError("delta needs trunc >= 1")
    return power_product({n: 24 for n in range(1, trunc)}, trunc - 1).shift(1)


@lru_cache(maxsize=None)
def _colored_partition_row(k: int, n_max: int) -> tuple[int, ...]:
    # Coefficients of prod_{m=1..n_max} (1 - q^m)^-k by iterated convolution
    # with the binomial series of each factor.
    row = [0] * (n_max + 1)
    row[0] = 1
    for m in range(1, n_max + 1):
        new = [0] * (n_max + 1)
        for j in range(n_max // m + 1):
            w = comb(k + j - 1, j)
            base = m * j
            for i in range(base, n_max + 1):
                if row[i - base]:
                    new[i] += w * row[i - base]
        row = new
    return tuple(row)


def p_colored(k: int, n: int) -> int:
    """Partitions of n with k colors: [q^n] prod (1 - q^m)^-k; 0 for n < 0."""
    if k < 1:
        raise ValueError("need at least one color")
    if n < 0:
        return 0
    return _colored_partition_row(k, max(n, 1))[n]


@lru_cache(maxsize=None)
def j_minus_744(trunc: int) -> QSeries:
    """E4^3/Delta - 744, exact to the requested truncation.

    The leading window is q^-1 + 0 + 196884 q + 21493760 q^2 + ...
    """
    pad = trunc + 2
    e4 = eisenstein_e4(pad)
    num = e4 * e4 * e4
    series = num * delta(pad).invert() - QSeries({0: 744}, 0, pad)
    out = series.truncate(trunc)
    assert out.coeff(-1) == 1 and out.coeff(0) == 0
    return out


def c_coefficient(n: int) -> int:
    """c(n): the coefficient of q^n in j - 744; zero below q^-1."""
    if n < -1:
        return 0
    return as_integer(j_minus_744(max(n, 1)).coeff(n), f"c({n})")


def c_prime(n: int) -> int:
    """c'(n): equal to c(n) except that c'(0) = 24."""
    if n == 0:
        return 24
    return c_coefficient(n)


def noghost_multiplicity(k: int, norm2: int) -> int:
    """Physical state count in dimension k for a vector of even norm norm2.

    For k = 26 this is p_24(1 - norm2/2); otherwise
    p_(k-1)(1 - norm2/2) - p_(k-1)(norm2/2).  Defined for k > 2 only.
    """
    if k <= 2:
        raise ValueError(f"no transverse states in dimension {k}")
    if norm2 % 2 != 0:
        raise ValueError(f"norm must be even, got {norm2}")
    half = norm2 // 2
    if k == 26:
        return p_colored(24, 1 - half)
    return p_colored(k - 1, 1 - half) - p_colored(k - 1, half)


def c0_square_exponents(trunc: int) -> Dict[int, int]:
    """Exponents a_n with j = q^-1 prod_{n>=1} (1 - q^n)^{a_n}.

    Recovered by the product-exponent solve applied to q*j; each a_n is
    the expansion coefficient sequence evaluated at the square n^2, and
    only those square arguments are ever produced.
    """
    qj = (j_minus_744(trunc) + QSeries({0: 744}, 0, trunc)).shift(1)
    return extract_product_exponents(qj)


@dataclass(frozen=True)
class ModformTable:
    """Bundled exact expansions used by the identity verifiers."""

    trunc: int
    delta: QSeries
    j_minus_744: QSeries
    p24: Mapping[int, int]
    c: Mapping[int, int]

    def c_at(self, n: int) -> int:
        if n < -1:
            return 0
        if n > self.trunc:
            raise ValueError(f"c({n}) beyond table truncation {self.trunc}")
        return self.c[n]


def modform_table(trunc: int) -> ModformTable:
    if trunc < 1:
        raise ValueError("table needs trunc >= 1")
    j = j_minus_744(trunc)
    d = delta(trunc)
    inv = delta(trunc + 2).invert()
    p24 = {}
    for n in range(0, trunc + 1):
        val = as_integer(inv.coeff(n - 1), f"p24({n})")
        assert val == p_colored(24, n)
        p24[n] = val
    c = {n: as_integer(j.coeff(n), f"c({n})") for n in range(-1, trunc + 1)}
    return ModformTable(trunc=trunc, delta=d, j_minus_744=j, p24=p24, c=c)
