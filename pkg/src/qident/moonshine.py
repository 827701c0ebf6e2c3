"""Twisted graded product relations for conjugacy-class trace series.

The twisted analogue of the bivariate product expansion replaces the
factored left side with

    p^-1 exp(- sum_{N>0} (1/N) sum_{m>0, n} t_N(mn) p^(mN) q^(nN))

where t_N(k) is the q^k coefficient of the trace series attached to the
N-th power of a group element, and equates it with T(p-side) - T(q-side)
built from the first series.  When every series is the expansion of
j - 744 the exponential collapses factorwise through
exp(-sum_N x^N / N) = 1 - x and the relation becomes the plain graded
product identity.

The solver runs this pipeline with symbols: coefficients of the first
series above a known horizon become unknowns, coefficient matching at
each bidegree yields affine-linear equations (products of two unknowns
are marked nonlinear and skipped), and equations that pin down exactly
one unknown are fired, iterating to a fixpoint.  Nothing is ever
guessed; what stays undetermined is reported as such.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .exactseries import PQSeries, QSeries, Scalar, as_integer
from .identities import IdentityReport
from .modforms import j_minus_744

__all__ = [
    "ThompsonData",
    "InsufficientDataError",
    "InconsistentSystemError",
    "SolveResult",
    "identity_element_data",
    "load_thompson_data",
    "required_trace_depth",
    "twisted_lhs",
    "twisted_rhs",
    "verify_twisted",
    "solve_coefficients",
]


class InsufficientDataError(ValueError):
    """The supplied trace data does not cover a needed power or depth."""


class InconsistentSystemError(ValueError):
    """The coefficient equations admit no solution.

    ``bidegree`` records the (p-degree, q-degree) of the first equation
    that failed.
    """

    def __init__(self, bidegree: Tuple[int, int], message: str):
        super().__init__(f"{message} at bidegree {bidegree}")
        self.bidegree = bidegree


@dataclass(frozen=True)
class ThompsonData:
    """Trace series for the powers of one group element.

    ``power_series[N]`` expands sum_k t_N(k) q^k, the traces of the N-th
    power on the graded module; every series starts at q^-1 with leading
    coefficient 1.
    """

    label: str
    power_series: Mapping[int, QSeries]
    max_power: int

    def __post_init__(self) -> None:
        if self.max_power < 1:
            raise ValueError("max_power must be at least 1")
        if set(self.power_series) != set(range(1, self.max_power + 1)):
            raise ValueError(
                f"power_series must cover exactly 1..{self.max_power}")
        for n, s in self.power_series.items():
            if s.min_deg != -1 or s.coeff(-1) != 1:
                raise ValueError(
                    f"series for power {n} must start at q^-1 with coefficient 1")

    def series_for_power(self, n: int) -> QSeries:
        got = self.power_series.get(n)
        if got is None:
            raise InsufficientDataError(f"no trace series for power {n}")
        return got


def identity_element_data(trunc: int, max_power: int = 8) -> ThompsonData:
    """Data for the identity class: every power series is j - 744."""
    if trunc < 1:
        raise ValueError("trunc must be at least 1")
    base = j_minus_744(trunc)
    return ThompsonData("1A", {n: base for n in range(1, max_power + 1)},
                        max_power)


def load_thompson_data(text: str) -> ThompsonData:
    """Parse the line-oriented trace data format.

    Header line ``class <label> maxpower <M>``, then one line per power
    ``N: a_-1 a_0 a_1 ...`` with integer coefficients from q^-1 upward.
    ``#`` starts a comment.
    """
    lines: List[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty trace data")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "class" or header[2] != "maxpower":
        raise ValueError(f"bad header line: {lines[0]!r}")
    label = header[1]
    try:
        max_power = int(header[3])
    except ValueError:
        raise ValueError(f"bad maxpower value: {header[3]!r}") from None
    series: Dict[int, QSeries] = {}
    for line in lines[1:]:
        head, sep, tail = line.partition(":")
        if not sep:
            raise ValueError(f"missing ':' in data line: {line!r}")
        try:
            n = int(head)
            coeffs = [int(tok) for tok in tail.split()]
        except ValueError:
            raise ValueError(f"non-integer entry in data line: {line!r}") from None
        if n in series:
            raise ValueError(f"duplicate series for power {n}")
        if not coeffs:
            raise ValueError(f"no coefficients for power {n}")
        series[n] = QSeries({-1 + i: c for i, c in enumerate(coeffs)},
                            -1, -1 + len(coeffs) - 1)
    return ThompsonData(label, series, max_power)


def required_trace_depth(p_trunc: int, q_trunc: int) -> Dict[int, int]:
    """Deepest trace index read from each power series at this window."""
    q_work = q_trunc + p_trunc + 1
    budget = p_trunc + 1
    return {n: (budget // n) * (q_work // n) for n in range(1, budget + 1)}


def _exp_argument_rows(data: ThompsonData, p_trunc: int, q_trunc: int
                       ) -> Tuple[Dict[int, Dict[int, Scalar]], int]:
    """Rows of sum_N (1/N) sum_{m,n} t_N(mn) p^(mN) q^(nN), by p-degree."""
    q_work = q_trunc + p_trunc + 1
    budget = p_trunc + 1
    rows: Dict[int, Dict[int, Scalar]] = {}
    for n_pow in range(1, budget + 1):
        series = data.series_for_power(n_pow)
        for m in range(1, budget // n_pow + 1):
            r = m * n_pow
            row = rows.setdefault(r, {})
            n_lo = -1 if m == 1 else 0
            for n in range(n_lo, q_work // n_pow + 1):
                k = m * n
                try:
                    t = series.coeff(k)
                except ValueError:
                    raise InsufficientDataError(
                        f"trace series for power {n_pow} known to "
                        f"q^{series.trunc}, need q^{k}") from None
                if t:
                    d = n * n_pow
                    row[d] = row.get(d, 0) + Fraction(t, n_pow)
    return rows, q_work


def _num_rows_mul(a: Dict[int, Dict[int, Scalar]],
                  b: Dict[int, Dict[int, Scalar]],
                  p_cap: int, q_cap: int) -> Dict[int, Dict[int, Scalar]]:
    out: Dict[int, Dict[int, Scalar]] = {}
    for ra, row_a in a.items():
        for rb, row_b in b.items():
            r = ra + rb
            if r > p_cap:
                continue
            dest = out.setdefault(r, {})
            for na, va in row_a.items():
                for nb, vb in row_b.items():
                    n = na + nb
                    if n > q_cap:
                        continue
                    dest[n] = dest.get(n, 0) + va * vb
    return out


def twisted_lhs(data: ThompsonData, p_trunc: int, q_trunc: int,
                strict_integrality: Optional[bool] = None) -> PQSeries:
    """The exponential side of the twisted relation on [-1, p_trunc].

    The exponential is expanded on a working grid one p-row above and
    p_trunc + 1 q-columns beyond the requested window, which is exactly
    the slack row products consume; each returned row is then exact.
    Intermediate coefficients are rational from the 1/N weights; with
    ``strict_integrality`` (defaulting to true exactly for the identity
    class) any non-integer surviving to the output raises.
    """
    if p_trunc < 1 or q_trunc < 1:
        raise ValueError("window bounds must be at least 1")
    if strict_integrality is None:
        strict_integrality = data.label == "1A"
    raw, q_work = _exp_argument_rows(data, p_trunc, q_trunc)
    budget = p_trunc + 1
    total: Dict[int, Dict[int, Scalar]] = {0: {0: 1}}
    power = raw
    for k in range(1, budget + 1):
        if k > 1:
            power = _num_rows_mul(power, raw, budget, q_work)
        c = Fraction((-1) ** k, factorial(k))
        for r, row in power.items():
            dest = total.setdefault(r, {})
            for n, v in row.items():
                dest[n] = dest.get(n, 0) + v * c
    out_rows = {}
    for r, row in total.items():
        m = r - 1
        if m > p_trunc:
            continue
        kept = {n: v for n, v in row.items() if n <= q_trunc}
        out_rows[m] = QSeries(kept, -m - 1, q_trunc)
    out = PQSeries(out_rows, -1, p_trunc, q_trunc)
    if strict_integrality:
        for m in range(out.p_min, out.p_trunc + 1):
            for n, c in out.row(m).coeffs.items():
                as_integer(c, f"twisted product coefficient at p^{m} q^{n}")
    return out


def twisted_rhs(data: ThompsonData, p_trunc: int, q_trunc: int) -> PQSeries:
    """T(p-side) - T(q-side) from the first trace series."""
    first = data.series_for_power(1)
    need = max(p_trunc, q_trunc)
    if first.trunc < need:
        raise InsufficientDataError(
            f"first trace series known to q^{first.trunc}, need q^{need}")
    p_side = PQSeries.from_p_series(first.truncate(p_trunc), q_trunc)
    q_side = PQSeries.from_q_series(first.truncate(q_trunc), -1, p_trunc)
    return (p_side - q_side).conform(-1, p_trunc, q_trunc)


def _coerce_data(data: Union[ThompsonData, str],
                 p_trunc: int, q_trunc: int) -> ThompsonData:
    if isinstance(data, ThompsonData):
        return data
    if data == "1A":
        depth = required_trace_depth(p_trunc, q_trunc)[1]
        return identity_element_data(depth, max_power=p_trunc + 1)
    raise ValueError(f"no bundled trace data for class {data!r}")


def verify_twisted(data: Union[ThompsonData, str], p_trunc: int,
                   q_trunc: int) -> IdentityReport:
    """Compare the two sides of the twisted relation coefficientwise.

    ``data`` may be the literal label "1A", for which the identity-class
    data is built at the depth the window requires.  Integrality of the
    exponential side is asserted for the identity class and reported in
    the notes otherwise.
    """
    data = _coerce_data(data, p_trunc, q_trunc)
    strict = data.label == "1A"
    lhs = twisted_lhs(data, p_trunc, q_trunc, strict_integrality=strict)
    rhs = twisted_rhs(data, p_trunc, q_trunc)
    integral = True
    for m in range(lhs.p_min, lhs.p_trunc + 1):
        if any(not isinstance(c, int) for c in lhs.row(m).coeffs.values()):
            integral = False
            break
    diff = lhs.first_difference(rhs)
    notes = (
        f"trace data for class {data.label}, powers up to {data.max_power}",
        "all exponential-side coefficients integral: "
        + ("yes" if integral else "no"),
    )
    return IdentityReport(
        name="twisted",
        p_trunc=p_trunc,
        q_trunc=q_trunc,
        lhs_terms=lhs.term_count(),
        rhs_terms=rhs.term_count(),
        equal=diff is None,
        first_discrepancy=diff,
        notes=notes,
        lhs=lhs,
        rhs=rhs,
    )


# ---------------------------------------------------------------------------
# Coefficient solver: affine-linear forms over unknown trace coefficients.

class _Nonlinear:
    """Marker for a coefficient that involves a product of two unknowns."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "<nonlinear>"


NONLINEAR = _Nonlinear()


class LinForm:
    """const + sum coeff_u * unknown_u with at least one unknown term."""

    __slots__ = ("const", "terms")

    def __init__(self, const: Scalar, terms: Dict[object, Scalar]):
        self.const = const
        self.terms = terms


Sym = Union[int, Fraction, LinForm, _Nonlinear]


def _mk_form(const: Scalar, terms: Dict[object, Scalar]) -> Sym:
    terms = {k: c for k, c in terms.items() if c != 0}
    if not terms:
        return const
    return LinForm(const, terms)


def _sym_add(a: Sym, b: Sym) -> Sym:
    if a is NONLINEAR or b is NONLINEAR:
        return NONLINEAR
    if isinstance(a, LinForm) or isinstance(b, LinForm):
        ca = a.const if isinstance(a, LinForm) else a
        cb = b.const if isinstance(b, LinForm) else b
        terms = dict(a.terms) if isinstance(a, LinForm) else {}
        if isinstance(b, LinForm):
            for k, c in b.terms.items():
                terms[k] = terms.get(k, 0) + c
        return _mk_form(ca + cb, terms)
    return a + b


def _sym_scale(a: Sym, c: Scalar) -> Sym:
    if c == 0:
        return 0
    if a is NONLINEAR:
        return NONLINEAR
    if isinstance(a, LinForm):
        return _mk_form(a.const * c, {k: v * c for k, v in a.terms.items()})
    return a * c


def _sym_mul(a: Sym, b: Sym) -> Sym:
    if a == 0 or b == 0:
        return 0
    if a is NONLINEAR or b is NONLINEAR:
        return NONLINEAR
    if isinstance(a, LinForm) and isinstance(b, LinForm):
        return NONLINEAR
    if isinstance(a, LinForm):
        return _sym_scale(a, b)
    if isinstance(b, LinForm):
        return _sym_scale(b, a)
    return a * b


SymRows = Dict[int, Dict[int, Sym]]


def _sym_rows_mul(a: SymRows, b: SymRows, p_cap: int, q_cap: int) -> SymRows:
    out: SymRows = {}
    for ra, row_a in a.items():
        for rb, row_b in b.items():
            r = ra + rb
            if r > p_cap:
                continue
            dest = out.setdefault(r, {})
            for na, va in row_a.items():
                for nb, vb in row_b.items():
                    n = na + nb
                    if n > q_cap:
                        continue
                    prod = _sym_mul(va, vb)
                    if prod == 0:
                        continue
                    cur = dest.get(n, 0)
                    dest[n] = _sym_add(cur, prod)
    return out


@dataclass(frozen=True)
class SolveResult:
    """Outcome of the coefficient determination sweep.

    ``series`` extends the first trace series with every determined value
    up to the target; positions in ``underdetermined`` were not pinned
    down by any single-unknown equation and are left absent rather than
    guessed.  ``values`` also keeps determined coefficients beyond the
    target, which arise as stepping stones.
    """

    series: QSeries
    determined: Tuple[int, ...]
    underdetermined: Tuple[int, ...]
    iterations: int
    values: Mapping[int, int] = field(repr=False)


def solve_coefficients(data: ThompsonData, known_up_to: int,
                       target_up_to: int, *, max_iterations: int = 50,
                       p_window: int = 4, q_window: Optional[int] = None,
                       scan_order: str = "rows",
                       self_powered: Optional[bool] = None) -> SolveResult:
    """Determine trace coefficients above ``known_up_to`` from the relation.

    Coefficients of the first series above the horizon are treated as
    unknowns even when the data holds values for them (those values then
    serve as an external check, not an input).  When every stored series
    is identical the element behaves as its own powers and the unknowns
    are shared across all power rows; otherwise higher-power series
    contribute their stored values and unknown positions of their own.
    """
    if known_up_to < 1:
        raise ValueError("known horizon must be at least 1")
    if target_up_to < known_up_to:
        raise ValueError("target must not be below the known horizon")
    if scan_order not in ("rows", "columns"):
        raise ValueError(f"unknown scan order {scan_order!r}")
    if q_window is None:
        q_window = target_up_to + 1
    first = data.series_for_power(1)
    if first.trunc < known_up_to:
        raise InsufficientDataError(
            f"first trace series known to q^{first.trunc}, "
            f"need q^{known_up_to}")
    if self_powered is None:
        self_powered = all(s == first for s in data.power_series.values())

    p_cap = p_window + 1
    q_work = q_window + p_window + 1
    solved: Dict[object, int] = {}

    def trace_sym(n_pow: int, k: int) -> Sym:
        if k < -1:
            return 0
        shared = n_pow == 1 or self_powered
        if shared:
            if k <= known_up_to:
                return first.coeff(k)
            key: object = ("c", k)
        else:
            series = data.series_for_power(n_pow)
            if k <= series.trunc:
                return series.coeff(k)
            key = ("t", n_pow, k)
        if key in solved:
            return solved[key]
        return _mk_form(0, {key: 1})

    def build_lhs_rows() -> SymRows:
        arg: SymRows = {}
        for n_pow in range(1, p_cap + 1):
            if not self_powered:
                data.series_for_power(n_pow)
            for m in range(1, p_cap // n_pow + 1):
                r = m * n_pow
                row = arg.setdefault(r, {})
                n_lo = -1 if m == 1 else 0
                for n in range(n_lo, q_work // n_pow + 1):
                    t = trace_sym(n_pow, m * n)
                    if t == 0:
                        continue
                    d = n * n_pow
                    row[d] = _sym_add(row.get(d, 0),
                                      _sym_scale(t, Fraction(1, n_pow)))
        total: SymRows = {0: {0: 1}}
        power = arg
        for k in range(1, p_cap + 1):
            if k > 1:
                power = _sym_rows_mul(power, arg, p_cap, q_work)
            c = Fraction((-1) ** k, factorial(k))
            for r, row in power.items():
                dest = total.setdefault(r, {})
                for n, v in row.items():
                    dest[n] = _sym_add(dest.get(n, 0), _sym_scale(v, c))
        return total

    def rhs_sym(a: int, b: int) -> Sym:
        if a == -1:
            return 1 if b == 0 else 0
        if a == 0:
            return _sym_scale(trace_sym(1, b), -1)
        return trace_sym(1, a) if b == 0 else 0

    def bidegrees():
        if scan_order == "rows":
            for a in range(-1, p_window + 1):
                for b in range(-a - 1, q_window + 1):
                    yield a, b
        else:
            for b in range(-p_window - 1, q_window + 1):
                for a in range(-1, p_window + 1):
                    if b >= -a - 1:
                        yield a, b

    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        exp_rows = build_lhs_rows()
        fired_this_pass: Dict[object, Tuple[int, int]] = {}
        for a, b in bidegrees():
            lhs = exp_rows.get(a + 1, {}).get(b, 0)
            eq = _sym_add(lhs, _sym_scale(rhs_sym(a, b), -1))
            if eq is NONLINEAR:
                continue
            if not isinstance(eq, LinForm):
                if eq != 0:
                    raise InconsistentSystemError(
                        (a, b), "equation reduces to a nonzero constant")
                continue
            if len(eq.terms) != 1:
                continue
            (key, coeff), = eq.terms.items()
            value = Fraction(-eq.const, 1) / coeff
            if value.denominator != 1:
                raise InconsistentSystemError(
                    (a, b), f"non-integral solution for {key}")
            ivalue = int(value)
            if key in solved:
                if solved[key] != ivalue:
                    raise InconsistentSystemError(
                        (a, b), f"conflicting values for {key}")
                continue
            solved[key] = ivalue
            fired_this_pass[key] = (a, b)
        if not fired_this_pass:
            break

    values = {k[1]: v for k, v in solved.items() if k[0] == "c"}
    coeffs = {d: c for d, c in first.coeffs.items() if d <= known_up_to}
    for k, v in values.items():
        if k <= target_up_to:
            coeffs[k] = v
    series = QSeries(coeffs, -1, target_up_to)
    determined = tuple(sorted(values))
    underdetermined = tuple(k for k in range(known_up_to + 1, target_up_to + 1)
                            if k not in values)
    return SolveResult(series=series, determined=determined,
                       underdetermined=underdetermined,
                       iterations=iterations, values=values)
