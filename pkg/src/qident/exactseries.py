"""Truncated Laurent series with exact rational coefficients.

A QSeries represents

    f(q) = sum_{d = min_deg}^{trunc} c_d q^d  +  O(q^(trunc+1))

as a sparse map from degree to coefficient.  Degrees below min_deg are
exactly zero; degrees above trunc are unknown and never read or written.
Coefficients are held exactly (Python ints, or Fraction when a value is
not integral), so every equality decided here is an exact statement about
the stated window.

A PQSeries is a two-variable truncated expansion: a map from p-degree m
to the QSeries coefficient of p^m.  The grading convention follows the
infinite products handled by pq_product, where the only factor that can
lower the q-degree is (1 - p q^-1): at p-degree m the q-window is
[-m-1, q_trunc].

The main derived operations are log/exp of series, the Euler-type product
prod_{n>=1} (1 - q^n)^{a_n}, recovery of the exponents a_n from a series
(a triangular divisor solve on the logarithm), and assembly of the graded
two-variable products

    p^-1 (1 - p q^-1)^{e(1,-1)} prod_{m>=1} (1 - p^m)^{e(m,0)}
         prod_{m,n>=1} (1 - p^m q^n)^{e(m,n)}.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Callable, Dict, Iterable, Mapping, Tuple

Scalar = int | Fraction


class NotInvertibleError(ValueError):
    """Leading coefficient is zero or absent where an inverse is required."""


class IntegralityError(ValueError):
    """A value that must be an integer came out fractional."""


def _norm_scalar(x: Scalar) -> Scalar:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return x
    if isinstance(x, int):
        return x
    raise TypeError(f"coefficient must be int or Fraction, got {type(x).__name__}")


def as_integer(x: Scalar, context: str = "value") -> int:
    """Checked cast to int; raises IntegralityError on a fractional value."""
    x = _norm_scalar(x)
    if isinstance(x, int):
        return x
    raise IntegralityError(f"{context} is not an integer: {x}")


class QSeries:
    """Sparse truncated Laurent series over the rationals."""

    __slots__ = ("coeffs", "min_deg", "trunc")

    def __init__(self, coeffs: Mapping[int, Scalar], min_deg: int, trunc: int):
        if trunc < min_deg:
            raise ValueError(f"empty window: min_deg={min_deg} > trunc={trunc}")
        clean: Dict[int, Scalar] = {}
        for d, c in coeffs.items():
            if not isinstance(d, int):
                raise TypeError("degrees must be ints")
            if d < min_deg or d > trunc:
                raise ValueError(f"degree {d} outside window [{min_deg}, {trunc}]")
            c = _norm_scalar(c)
            if c != 0:
                clean[d] = c
        self.coeffs = clean
        self.min_deg = min_deg
        self.trunc = trunc

    @staticmethod
    def zero(trunc: int, min_deg: int = 0) -> "QSeries":
        return QSeries({}, min_deg, trunc)

    @staticmethod
    def one(trunc: int) -> "QSeries":
        return QSeries({0: 1}, 0, trunc)

    @staticmethod
    def monomial(c: Scalar, d: int, trunc: int) -> "QSeries":
        return QSeries({d: c}, d, trunc)

    def coeff(self, d: int) -> Scalar:
        if d > self.trunc:
            raise ValueError(f"degree {d} above truncation {self.trunc}")
        return self.coeffs.get(d, 0)

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """Lowest degree with a nonzero stored coefficient."""
        if not self.coeffs:
            raise ValueError("valuation of the zero series")
        return min(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.trunc, tuple(sorted(self.coeffs.items()))))

    def __repr__(self) -> str:
        terms = []
        for d in sorted(self.coeffs):
            terms.append(f"{self.coeffs[d]}*q^{d}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.trunc + 1}))"

    def same_coeffs(self, other: "QSeries") -> bool:
        """Coefficient equality on the overlap of the two windows."""
        hi = min(self.trunc, other.trunc)
        for d in set(self.coeffs) | set(other.coeffs):
            if d <= hi and self.coeffs.get(d, 0) != other.coeffs.get(d, 0):
                return False
        return True

    def truncate(self, trunc: int) -> "QSeries":
        if trunc > self.trunc:
            raise ValueError(f"cannot extend truncation {self.trunc} to {trunc}")
        kept = {d: c for d, c in self.coeffs.items() if d <= trunc}
        return QSeries(kept, min(self.min_deg, trunc), trunc)

    def rewindow(self, min_deg: int, trunc: int) -> "QSeries":
        """Restate the window; any nonzero coefficient outside it is an error."""
        if trunc > self.trunc:
            raise ValueError(f"cannot extend truncation {self.trunc} to {trunc}")
        for d in self.coeffs:
            if d < min_deg or d > trunc:
                raise ValueError(f"nonzero coefficient at degree {d} outside [{min_deg}, {trunc}]")
        return QSeries(self.coeffs, min_deg, trunc)

    def __neg__(self) -> "QSeries":
        return QSeries({d: -c for d, c in self.coeffs.items()}, self.min_deg, self.trunc)

    def __add__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        min_deg = min(self.min_deg, other.min_deg)
        out: Dict[int, Scalar] = {}
        for d in set(self.coeffs) | set(other.coeffs):
            if d <= trunc:
                out[d] = self.coeffs.get(d, 0) + other.coeffs.get(d, 0)
        return QSeries(out, min_deg, trunc)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def scale(self, c: Scalar) -> "QSeries":
        c = _norm_scalar(c)
        if c == 0:
            return QSeries({}, self.min_deg, self.trunc)
        return QSeries({d: v * c for d, v in self.coeffs.items()}, self.min_deg, self.trunc)

    def shift(self, k: int) -> "QSeries":
        """Multiply by the exact monomial q^k."""
        return QSeries({d + k: c for d, c in self.coeffs.items()},
                       self.min_deg + k, self.trunc + k)

    def __mul__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        trunc = min(self.trunc + other.min_deg, other.trunc + self.min_deg)
        min_deg = self.min_deg + other.min_deg
        out: Dict[int, Scalar] = {}
        for da, ca in self.coeffs.items():
            for db, cb in other.coeffs.items():
                d = da + db
                if d <= trunc:
                    out[d] = out.get(d, 0) + ca * cb
        return QSeries(out, min_deg, trunc)

    def invert(self) -> "QSeries":
        """Multiplicative inverse; requires a nonzero leading coefficient.

        For f = c q^v (1 + u) with u of positive relative degree and f known
        to q^T, the inverse is known to q^(T - 2v).
        """
        if self.is_zero():
            raise NotInvertibleError("cannot invert the zero series")
        v = self.valuation()
        lead = self.coeffs[v]
        rel_order = self.trunc - v
        # Relative unit part a_k = coeff(v + k) / lead for k = 0..rel_order.
        a = [Fraction(self.coeffs.get(v + k, 0)) / lead for k in range(rel_order + 1)]
        b: list[Fraction] = [Fraction(1)]
        for k in range(1, rel_order + 1):
            acc = Fraction(0)
            for i in range(1, k + 1):
                if a[i]:
                    acc += a[i] * b[k - i]
            b.append(-acc)
        out = {(-v) + k: b[k] / lead for k in range(rel_order + 1)}
        return QSeries(out, -v, self.trunc - 2 * v)


def log_series(a: QSeries) -> QSeries:
    """log of a series with constant term 1 and no negative-degree terms.

    Uses the derivative recurrence n l_n = n a_n - sum_{k<n} k l_k a_{n-k}.
    """
    if a.coeffs.get(0, 0) != 1:
        raise ValueError("log requires constant term exactly 1")
    if any(d < 0 for d in a.coeffs):
        raise ValueError("log requires no negative-degree terms")
    n_max = a.trunc
    l: list[Fraction] = [Fraction(0)] * (n_max + 1)
    for n in range(1, n_max + 1):
        acc = Fraction(n) * a.coeffs.get(n, 0)
        for k in range(1, n):
            cnk = a.coeffs.get(n - k, 0)
            if cnk and l[k]:
                acc -= k * l[k] * cnk
        l[n] = acc / n
    return QSeries({n: l[n] for n in range(1, n_max + 1)}, 1 if n_max >= 1 else 0, n_max)


def exp_series(a: QSeries) -> QSeries:
    """exp of a series with all terms of positive degree.

    Uses n e_n = sum_{k<=n} k a_k e_{n-k}, e_0 = 1.
    """
    if any(d < 1 for d in a.coeffs):
        raise ValueError("exp requires all terms to have positive degree")
    n_max = a.trunc
    e: list[Fraction] = [Fraction(1)] + [Fraction(0)] * n_max
    for n in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(1, n + 1):
            ak = a.coeffs.get(k, 0)
            if ak and e[n - k]:
                acc += k * ak * e[n - k]
        e[n] = acc / n
    return QSeries({n: e[n] for n in range(n_max + 1)}, 0, n_max)


def power_product(exponents: Mapping[int, int], trunc: int) -> QSeries:
    """prod_{n>=1} (1 - q^n)^{a_n} to the given truncation.

    Computed through log and exp:  log of the product is
    -sum_n a_n sum_{k>=1} q^{nk}/k, collected by total degree.
    Exponents may be any integers (negative exponents give the inverse
    factors); indices above trunc are irrelevant and ignored.
    """
    logcoeffs: Dict[int, Fraction] = {}
    for n, a_n in exponents.items():
        if n < 1:
            raise ValueError(f"product index must be >= 1, got {n}")
        if a_n == 0 or n > trunc:
            continue
        k = 1
        while n * k <= trunc:
            d = n * k
            logcoeffs[d] = logcoeffs.get(d, Fraction(0)) - Fraction(a_n, k)
            k += 1
    return exp_series(QSeries(logcoeffs, 1 if trunc >= 1 else 0, trunc))


def extract_product_exponents(f: QSeries) -> Dict[int, int]:
    """Recover integer exponents a_n with f = q^v prod (1 - q^n)^{a_n}.

    Requires integer coefficients and leading coefficient 1.  Writing
    b_m = m [q^m](-log g) for the normalized g = f / q^v, the exponents
    satisfy b_m = sum_{n | m} n a_n and are recovered by a triangular
    solve over divisors.  Exponents are returned for 1 <= n <= trunc - v.
    """
    for d, c in f.coeffs.items():
        as_integer(c, f"coefficient of q^{d}")
    if f.is_zero():
        raise ValueError("zero series has no product expansion")
    v = f.valuation()
    if f.coeffs[v] != 1:
        raise NotInvertibleError(f"leading coefficient must be 1, got {f.coeffs[v]}")
    g = f.shift(-v)
    lg = log_series(g)
    n_max = lg.trunc
    a: Dict[int, int] = {}
    for m in range(1, n_max + 1):
        b_m = -m * Fraction(lg.coeffs.get(m, 0))
        acc = b_m
        for n in range(1, m):
            if m % n == 0 and n in a:
                acc -= n * a[n]
        a[m] = as_integer(acc / m, f"product exponent at n={m}")
    return a


def binomial_factor_terms(exponent: int, j_max: int) -> Dict[int, int]:
    """Coefficients of (1 - x)^exponent in x^j for j = 0..j_max, exactly.

    For negative exponents this is the binomial series of (1-x)^-|e|.
    """
    out: Dict[int, int] = {}
    e = exponent
    for j in range(j_max + 1):
        if e >= 0:
            if j > e:
                break
            out[j] = (-1) ** j * comb(e, j)
        else:
            out[j] = comb(-e + j - 1, j)
    return out


# ---------------------------------------------------------------------------
# Two-variable expansions
# ---------------------------------------------------------------------------

class PQSeries:
    """Truncated expansion in p whose coefficients are QSeries in q.

    Rows are indexed by p-degree in [p_min, p_trunc]; every stored row
    shares the uniform q-truncation q_trunc.  Absent rows are zero.
    """

    __slots__ = ("rows", "p_min", "p_trunc", "q_trunc")

    def __init__(self, rows: Mapping[int, QSeries], p_min: int, p_trunc: int, q_trunc: int):
        if p_trunc < p_min:
            raise ValueError(f"empty p-window: [{p_min}, {p_trunc}]")
        clean: Dict[int, QSeries] = {}
        for m, series in rows.items():
            if m < p_min or m > p_trunc:
                raise ValueError(f"p-degree {m} outside window [{p_min}, {p_trunc}]")
            if series.trunc < q_trunc:
                raise ValueError(
                    f"row {m} only known to q^{series.trunc}, need q^{q_trunc}")
            s = series.truncate(q_trunc)
            if not s.is_zero():
                clean[m] = s
        self.rows = clean
        self.p_min = p_min
        self.p_trunc = p_trunc
        self.q_trunc = q_trunc

    def row(self, m: int) -> QSeries:
        if m > self.p_trunc:
            raise ValueError(f"p-degree {m} above truncation {self.p_trunc}")
        got = self.rows.get(m)
        if got is not None:
            return got
        return QSeries.zero(self.q_trunc, min_deg=min(0, -m - 1))

    def coeff(self, m: int, n: int) -> Scalar:
        return self.row(m).coeff(n)

    def term_count(self) -> int:
        return sum(len(s.coeffs) for s in self.rows.values())

    def shift_p(self, k: int) -> "PQSeries":
        return PQSeries({m + k: s for m, s in self.rows.items()},
                        self.p_min + k, self.p_trunc + k, self.q_trunc)

    def __neg__(self) -> "PQSeries":
        return PQSeries({m: -s for m, s in self.rows.items()},
                        self.p_min, self.p_trunc, self.q_trunc)

    def __add__(self, other: "PQSeries") -> "PQSeries":
        if not isinstance(other, PQSeries):
            return NotImplemented
        q_trunc = min(self.q_trunc, other.q_trunc)
        p_min = min(self.p_min, other.p_min)
        p_trunc = min(self.p_trunc, other.p_trunc)
        rows: Dict[int, QSeries] = {}
        for m in set(self.rows) | set(other.rows):
            if p_min <= m <= p_trunc:
                a = self.rows.get(m)
                b = other.rows.get(m)
                s = a + b if (a is not None and b is not None) else (a if a is not None else b)
                rows[m] = s.truncate(q_trunc)
        return PQSeries(rows, p_min, p_trunc, q_trunc)

    def __sub__(self, other: "PQSeries") -> "PQSeries":
        return self + (-other)

    def __mul__(self, other: "PQSeries") -> "PQSeries":
        if not isinstance(other, PQSeries):
            return NotImplemented
        p_min = self.p_min + other.p_min
        p_trunc = min(self.p_trunc + other.p_min, other.p_trunc + self.p_min)
        acc: Dict[int, QSeries] = {}
        for ma, sa in self.rows.items():
            for mb, sb in other.rows.items():
                m = ma + mb
                if m > p_trunc:
                    continue
                prod = sa * sb
                acc[m] = prod if m not in acc else acc[m] + prod
        if not acc:
            return PQSeries({}, p_min, p_trunc, min(self.q_trunc, other.q_trunc))
        q_trunc = min(s.trunc for s in acc.values())
        return PQSeries(acc, p_min, p_trunc, q_trunc)

    def conform(self, p_min: int, p_trunc: int, q_trunc: int) -> "PQSeries":
        """Cut to the target windows; q-window of row m becomes [-m-1, q_trunc].

        Rows above p_trunc are discarded (ordinary truncation).  A nonzero
        coefficient below either window bound is an error, since degrees
        below a window are asserted to be exactly zero.
        """
        rows: Dict[int, QSeries] = {}
        for m, s in self.rows.items():
            if m > p_trunc:
                continue
            if m < p_min:
                raise ValueError(f"nonzero row at p-degree {m} below window start {p_min}")
            rows[m] = s.truncate(q_trunc).rewindow(-m - 1, q_trunc)
        return PQSeries(rows, p_min, p_trunc, q_trunc)

    def first_difference(self, other: "PQSeries") -> Tuple[int, int, Scalar, Scalar] | None:
        """First (p, q, lhs, rhs) where coefficients differ, scanning p then q.

        Both operands must share identical windows.
        """
        if (self.p_min, self.p_trunc, self.q_trunc) != (other.p_min, other.p_trunc, other.q_trunc):
            raise ValueError("window mismatch in comparison")
        for m in range(self.p_min, self.p_trunc + 1):
            a = self.rows.get(m)
            b = other.rows.get(m)
            degs = set()
            if a is not None:
                degs |= set(a.coeffs)
            if b is not None:
                degs |= set(b.coeffs)
            for n in sorted(degs):
                ca = a.coeffs.get(n, 0) if a is not None else 0
                cb = b.coeffs.get(n, 0) if b is not None else 0
                if ca != cb:
                    return (m, n, ca, cb)
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PQSeries):
            return NotImplemented
        return ((self.p_min, self.p_trunc, self.q_trunc)
                == (other.p_min, other.p_trunc, other.q_trunc)
                and self.first_difference(other) is None)

    def __hash__(self) -> int:
        raise TypeError("PQSeries is not hashable")

    @staticmethod
    def from_p_series(qs: QSeries, q_trunc: int) -> "PQSeries":
        """Reinterpret a one-variable series as living in the p variable."""
        rows = {d: QSeries({0: c}, 0, q_trunc) for d, c in qs.coeffs.items()}
        return PQSeries(rows, qs.min_deg, qs.trunc, q_trunc)

    @staticmethod
    def from_q_series(qs: QSeries, p_min: int, p_trunc: int) -> "PQSeries":
        """Embed a one-variable q-series as the p^0 row."""
        return PQSeries({0: qs}, p_min, p_trunc, qs.trunc)


def pq_factor_index_set(p_trunc: int, q_trunc: int) -> Tuple[Tuple[int, int], ...]:
    """Factor indices (m, n) that can touch the truncated window of pq_product.

    The product carries a p^-1 prefactor, so partial products live at
    p-degrees 0..p_trunc+1.  A factor term p^(jm) q^(jn) multiplies a
    complementary term whose q-degree is at least -(row - jm), so it can
    reach the window only when jn <= q_trunc + p_trunc + 1 - jm.  Taking
    j = 1 bounds the factors that matter:

        1 <= m <= p_trunc + 1,   n <= q_trunc + p_trunc + 1 - m,

    with n >= -1 and n = -1 only at m = 1 (the single q-lowering factor).
    """
    out = []
    budget = p_trunc + 1
    for m in range(1, budget + 1):
        n_lo = -1 if m == 1 else 0
        for n in range(n_lo, q_trunc + budget - m + 1):
            out.append((m, n))
    return tuple(out)


def _product_of_factors(factors: Iterable[Tuple[int, int, int]],
                        p_budget: int, q_work: int) -> Dict[int, QSeries]:
    """Rows of prod (1 - p^m q^n)^e over p-degrees 0..p_budget.

    Factor terms are exact monomials, so per-row truncations only ever
    shift; every returned row is reliable to at least q_work - p_budget.
    """
    rows: Dict[int, QSeries] = {0: QSeries.one(q_work + p_budget)}
    for m, n, e in factors:
        if e == 0:
            continue
        terms = binomial_factor_terms(e, p_budget // m)
        new_rows: Dict[int, QSeries] = {}
        for r in range(p_budget + 1):
            acc: QSeries | None = None
            for j, cj in terms.items():
                src = rows.get(r - j * m)
                if src is None:
                    continue
                piece = src.shift(j * n).scale(cj)
                top = min(piece.trunc, q_work + p_budget)
                piece = piece.truncate(top)
                acc = piece if acc is None else acc + piece
            if acc is not None and not acc.is_zero():
                new_rows[r] = acc
        rows = new_rows
    return rows


def pq_product(exponent_fn: Callable[[int, int], int],
               p_trunc: int, q_trunc: int) -> PQSeries:
    """Expand p^-1 (1-p q^-1)^e(1,-1) prod (1-p^m)^e(m,0) prod (1-p^m q^n)^e(m,n).

    The result is exact on p-degrees [-1, p_trunc] with the q-window of
    row m equal to [-m-1, q_trunc].
    """
    q_work = q_trunc + p_trunc + 2
    factors = [(m, n, exponent_fn(m, n)) for m, n in pq_factor_index_set(p_trunc, q_trunc)]
    rows = _product_of_factors(factors, p_trunc + 1, q_work)
    shifted = {m - 1: s for m, s in rows.items()}
    out = PQSeries(shifted, -1, p_trunc,
                   min(s.trunc for s in shifted.values()) if shifted else q_work)
    return out.conform(-1, p_trunc, q_trunc)
