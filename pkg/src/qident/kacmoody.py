"""Generalized Cartan matrices, Weyl groups, and denominator identities.

Roots and weights are handled in simple-root coordinates throughout: a
vector x stands for sum x_i alpha_i.  The sign conventions follow the
lowest-weight picture: the Weyl vector satisfies (rho, alpha_i) =
-(alpha_i, alpha_i)/2, dominant lowest weights pair nonpositively with
the simple roots, and both sides of the denominator identity

    sum_w det(w) e^{mu_w} . w(eps)  =  prod_{alpha > 0} (1 - e^alpha)^{mult alpha}

are expansions in e^{alpha_i} with nonnegative exponents.  Here mu_w is
defined by mu_1 = 0 and mu_{s_i w} = alpha_i + s_i(mu_w), which avoids
naming rho itself; that matters for affine matrices, where no Weyl vector
exists inside the span of the simple roots.  The correction eps sums over
sets of pairwise orthogonal imaginary simple roots and is 1 when there
are none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exactseries import QSeries, Scalar, as_integer, _norm_scalar

Coords = Tuple[int, ...]


class NotSymmetrizableError(ValueError):
    pass


class AffineConventionError(ValueError):
    """Raised when a construction needs a Weyl vector in the root span but
    the Cartan matrix is singular."""


# ---------------------------------------------------------------------------
# Cartan matrices
# ---------------------------------------------------------------------------

class GCM:
    """A square matrix of exact rationals, indexed [row][col], with the
    crystallographic reading a[i][j] = <alpha_j, alpha_i^vee> when row i
    is a real index (a[i][i] > 0)."""

    def __init__(self, rows: Sequence[Sequence[Scalar]]):
        n = len(rows)
        if n == 0:
            raise ValueError("empty matrix")
        data = []
        for r in rows:
            row = tuple(_norm_scalar(Fraction(v)) for v in r)
            if len(row) != n:
                raise ValueError("matrix must be square")
            data.append(row)
        self.entries: Tuple[Tuple[Scalar, ...], ...] = tuple(data)
        self.rank = n

    def __getitem__(self, ij: Tuple[int, int]) -> Scalar:
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other) -> bool:
        return isinstance(other, GCM) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"GCM({[list(r) for r in self.entries]})"

    def apply(self, x: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        return tuple(_norm_scalar(sum(row[j] * x[j] for j in range(self.rank)))
                     for row in self.entries)


def load_gcm(text: str) -> GCM:
    """Parse a matrix from text: one row per line, entries whitespace
    separated, integers or p/q fractions, '#' starts a comment."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([Fraction(tok) for tok in line.split()])
    if not rows:
        raise ValueError("no matrix rows found")
    return GCM(rows)


@dataclass(frozen=True)
class ValidationReport:
    classic_failures: Tuple[str, ...]
    generalized_failures: Tuple[str, ...]

    @property
    def is_classic(self) -> bool:
        return not self.classic_failures

    @property
    def is_generalized(self) -> bool:
        return not self.generalized_failures


def validate(gcm: GCM) -> ValidationReport:
    """Check the defining conditions for a classic Cartan matrix and for
    the generalized (possibly imaginary-diagonal) kind."""
    classic: List[str] = []
    general: List[str] = []
    n = gcm.rank
    for i in range(n):
        aii = gcm[i, i]
        if aii != 2:
            classic.append(f"diagonal entry a[{i}][{i}] = {aii} != 2")
            if aii > 0:
                general.append(f"positive diagonal a[{i}][{i}] = {aii} != 2")
        for j in range(n):
            if i == j:
                continue
            aij = gcm[i, j]
            if aij > 0:
                msg = f"off-diagonal a[{i}][{j}] = {aij} > 0"
                classic.append(msg)
                general.append(msg)
            if not isinstance(aij, int):
                classic.append(f"off-diagonal a[{i}][{j}] = {aij} not an integer")
                if gcm[i, i] == 2:
                    general.append(
                        f"real row {i} has non-integer entry a[{i}][{j}] = {aij}")
            if (aij == 0) != (gcm[j, i] == 0):
                classic.append(f"zero pattern asymmetric at ({i}, {j})")
                general.append(f"zero pattern asymmetric at ({i}, {j})")
    try:
        symmetrizer(gcm)
    except NotSymmetrizableError as exc:
        general.append(str(exc))
        classic.append(str(exc))
    return ValidationReport(tuple(classic), tuple(general))


def symmetrizer(gcm: GCM) -> Tuple[Scalar, ...]:
    """Positive rationals d_i with d_i a_ij = d_j a_ji, normalized to
    coprime positive integers per run of the whole matrix."""
    n = gcm.rank
    d: List[Optional[Fraction]] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        queue = [start]
        while queue:
            i = queue.pop()
            for j in range(n):
                if i == j or gcm[i, j] == 0:
                    continue
                if gcm[j, i] == 0:
                    raise NotSymmetrizableError(
                        f"zero pattern asymmetric at ({i}, {j})")
                cand = d[i] * Fraction(gcm[i, j]) / Fraction(gcm[j, i])
                if cand <= 0:
                    raise NotSymmetrizableError(
                        f"symmetrizer forced nonpositive at index {j}")
                if d[j] is None:
                    d[j] = cand
                    queue.append(j)
                elif d[j] != cand:
                    raise NotSymmetrizableError(
                        f"inconsistent symmetrizer around index {j}")
    denom_lcm = 1
    for v in d:
        denom_lcm = denom_lcm * v.denominator // math.gcd(denom_lcm, v.denominator)
    ints = [int(v * denom_lcm) for v in d]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(v // g for v in ints)


def symmetrized(gcm: GCM) -> Tuple[Tuple[Scalar, ...], ...]:
    """The symmetric matrix s_ij = d_i a_ij of pairings (alpha_i, alpha_j)."""
    d = symmetrizer(gcm)
    n = gcm.rank
    s = tuple(tuple(_norm_scalar(d[i] * gcm[i, j]) for j in range(n)) for i in range(n))
    for i in range(n):
        for j in range(n):
            if s[i][j] != s[j][i]:
                raise NotSymmetrizableError("symmetrization failed")
    return s


def root_norm(gcm: GCM, coords: Sequence[Scalar]) -> Scalar:
    s = symmetrized(gcm)
    n = gcm.rank
    return _norm_scalar(sum(coords[i] * s[i][j] * coords[j]
                            for i in range(n) for j in range(n)))


def root_pairing(gcm: GCM, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
    s = symmetrized(gcm)
    n = gcm.rank
    return _norm_scalar(sum(x[i] * s[i][j] * y[j] for i in range(n) for j in range(n)))


@dataclass(frozen=True)
class Classification:
    label: str  # finite | affine | indefinite | degenerate
    pivots: Tuple[Scalar, ...]
    corank: int


def classify(gcm: GCM) -> Classification:
    """Signature of the symmetrized matrix via an exact LDL^T sweep.

    All pivots positive: finite type.  Positive semidefinite with a
    one-dimensional kernel: affine.  Larger kernel: degenerate.  Any
    negative direction: indefinite.
    """
    s = [list(row) for row in symmetrized(gcm)]
    n = gcm.rank
    pivots: List[Scalar] = []
    for k in range(n):
        p = s[k][k]
        if p > 0:
            pivots.append(_norm_scalar(Fraction(p)))
            for i in range(k + 1, n):
                f = Fraction(s[i][k]) / Fraction(p)
                for j in range(k, n):
                    s[i][j] = _norm_scalar(s[i][j] - f * s[k][j])
        elif p == 0:
            if any(s[k][j] != 0 for j in range(k + 1, n)) or \
               any(s[i][k] != 0 for i in range(k + 1, n)):
                # a zero pivot with a live coupling hides a negative direction
                return Classification("indefinite", tuple(pivots), 0)
            pivots.append(0)
        else:
            return Classification("indefinite", tuple(pivots + [p]), 0)
    corank = sum(1 for p in pivots if p == 0)
    if corank == 0:
        label = "finite"
    elif corank == 1:
        label = "affine"
    else:
        label = "degenerate"
    return Classification(label, tuple(pivots), corank)


# ---------------------------------------------------------------------------
# Reflections and roots
# ---------------------------------------------------------------------------

def real_indices(gcm: GCM) -> Tuple[int, ...]:
    return tuple(i for i in range(gcm.rank) if gcm[i, i] > 0)


def simple_reflection(gcm: GCM, i: int, x: Coords) -> Coords:
    """s_i(x) = x - (2/a_ii) (A x)_i alpha_i in simple-root coordinates."""
    if gcm[i, i] <= 0:
        raise ValueError(f"index {i} is imaginary, no reflection")
    ax_i = sum(gcm[i, j] * x[j] for j in range(gcm.rank))
    c = as_integer(_norm_scalar(Fraction(2) * ax_i / Fraction(gcm[i, i])),
                   "reflection coefficient")
    out = list(x)
    out[i] -= c
    return tuple(out)


def height(x: Coords) -> int:
    return sum(x)


def real_positive_roots(gcm: GCM, max_height: Optional[int] = None) -> List[Coords]:
    """Closure of the simple real roots under simple reflections,
    restricted to the positive cone.  A height cap is required unless the
    matrix is of finite type."""
    if max_height is None and classify(gcm).label != "finite":
        raise ValueError("a height cap is required outside finite type")
    idx = real_indices(gcm)
    seen = set()
    frontier = []
    for i in idx:
        e = tuple(1 if j == i else 0 for j in range(gcm.rank))
        seen.add(e)
        frontier.append(e)
    while frontier:
        nxt = []
        for r in frontier:
            for i in idx:
                img = simple_reflection(gcm, i, r)
                if img in seen or any(c < 0 for c in img):
                    continue
                if max_height is not None and height(img) > max_height:
                    continue
                seen.add(img)
                nxt.append(img)
        frontier = nxt
    return sorted(seen, key=lambda r: (height(r), r))


# ---------------------------------------------------------------------------
# Weyl group slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    columns: Tuple[Coords, ...]  # images of the simple roots
    length: int
    det: int
    mu: Coords  # rho - w rho without naming rho

    def apply(self, x: Sequence[int]) -> Coords:
        n = len(self.columns)
        out = [0] * n
        for j, c in enumerate(x):
            if c:
                col = self.columns[j]
                for k in range(n):
                    out[k] += c * col[k]
        return tuple(out)


def weyl_enumerate(gcm: GCM, max_len: int) -> List[WeylElement]:
    """All Weyl elements of length at most max_len by breadth-first
    composition, deduplicated by their matrix.  Along the way mu_w is
    carried by the recursion mu_{s_i w} = alpha_i + s_i(mu_w) and checked
    for consistency whenever two reduced paths meet."""
    n = gcm.rank
    idx = real_indices(gcm)
    ident = WeylElement(
        tuple(tuple(1 if k == j else 0 for k in range(n)) for j in range(n)),
        0, 1, (0,) * n)
    seen: Dict[Tuple[Coords, ...], WeylElement] = {ident.columns: ident}
    out = [ident]
    frontier = [ident]
    for ln in range(1, max_len + 1):
        nxt = []
        for w in frontier:
            for i in idx:
                cols = tuple(simple_reflection(gcm, i, col) for col in w.columns)
                mu = list(simple_reflection(gcm, i, w.mu))
                mu[i] += 1
                mu_t = tuple(mu)
                prev = seen.get(cols)
                if prev is not None:
                    assert (ln - prev.length) % 2 == 0, "length parity broke"
                    if prev.length == ln:
                        assert prev.mu == mu_t, "mu recursion inconsistent"
                    continue
                elem = WeylElement(cols, ln, -w.det, mu_t)
                seen[cols] = elem
                nxt.append(elem)
                out.append(elem)
        frontier = nxt
        if not frontier:
            break
    return out


def weyl_vector(gcm: GCM) -> Tuple[Scalar, ...]:
    """Coordinates of the vector with (rho, alpha_i) = -(alpha_i, alpha_i)/2,
    i.e. the solution of A c = (-a_ii / 2)_i.  Raises for singular A: an
    affine matrix has no such vector among the simple-root combinations."""
    n = gcm.rank
    m = [[Fraction(gcm[i, j]) for j in range(n)] + [Fraction(-gcm[i, i], 2)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise AffineConventionError(
                "singular Cartan matrix: no Weyl vector in the root span")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(_norm_scalar(m[i][n]) for i in range(n))


def fundamental_weights(gcm: GCM) -> Tuple[Tuple[Scalar, ...], ...]:
    """Root-coordinate columns w^(i) with <w^(i), alpha_j^vee> = -delta_ij,
    the lowest-weight counterparts of the usual fundamental weights."""
    n = gcm.rank
    out = []
    for i in range(n):
        m = [[Fraction(gcm[r, c]) for c in range(n)] +
             [Fraction(-1) if r == i else Fraction(0)] for r in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col] != 0), None)
            if piv is None:
                raise AffineConventionError(
                    "singular Cartan matrix: fundamental weights leave the root span")
            m[col], m[piv] = m[piv], m[col]
            inv = 1 / m[col][col]
            m[col] = [v * inv for v in m[col]]
            for r in range(n):
                if r != col and m[r][col] != 0:
                    f = m[r][col]
                    m[r] = [a - f * b for a, b in zip(m[r], m[col])]
        out.append(tuple(_norm_scalar(m[r][n]) for r in range(n)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Truncated group ring of the positive root cone
# ---------------------------------------------------------------------------

class CharElement:
    """Finite sum of e^x over nonnegative root coordinates x, truncated by
    height: terms of height above the cutoff are unknown and dropped."""

    __slots__ = ("rank", "cutoff", "coeffs")

    def __init__(self, rank: int, cutoff: int,
                 coeffs: Optional[Dict[Coords, Scalar]] = None):
        self.rank = rank
        self.cutoff = cutoff
        clean: Dict[Coords, Scalar] = {}
        for x, c in (coeffs or {}).items():
            if len(x) != rank:
                raise ValueError(f"coordinate rank mismatch: {x}")
            if any(v < 0 for v in x):
                raise ValueError(f"negative exponent coordinates: {x}")
            c = _norm_scalar(c)
            if c != 0 and height(x) <= cutoff:
                clean[x] = c
        self.coeffs = clean

    @staticmethod
    def one(rank: int, cutoff: int) -> "CharElement":
        return CharElement(rank, cutoff, {(0,) * rank: 1})

    @staticmethod
    def term(rank: int, cutoff: int, coords: Coords, coeff: Scalar = 1) -> "CharElement":
        return CharElement(rank, cutoff, {tuple(coords): coeff})

    def coeff(self, coords: Coords) -> Scalar:
        coords = tuple(coords)
        if height(coords) > self.cutoff:
            raise KeyError(f"height {height(coords)} above cutoff {self.cutoff}")
        return self.coeffs.get(coords, 0)

    def support(self) -> List[Coords]:
        return sorted(self.coeffs, key=lambda x: (height(x), x))

    def _check(self, other: "CharElement"):
        if self.rank != other.rank or self.cutoff != other.cutoff:
            raise ValueError("mixed ranks or cutoffs")

    def __add__(self, other: "CharElement") -> "CharElement":
        self._check(other)
        out = dict(self.coeffs)
        for x, c in other.coeffs.items():
            out[x] = out.get(x, 0) + c
        return CharElement(self.rank, self.cutoff, out)

    def __sub__(self, other: "CharElement") -> "CharElement":
        return self + (-other)

    def __neg__(self) -> "CharElement":
        return CharElement(self.rank, self.cutoff,
                           {x: -c for x, c in self.coeffs.items()})

    def scale(self, k: Scalar) -> "CharElement":
        return CharElement(self.rank, self.cutoff,
                           {x: k * c for x, c in self.coeffs.items()})

    def __mul__(self, other: "CharElement") -> "CharElement":
        self._check(other)
        out: Dict[Coords, Scalar] = {}
        for x, cx in self.coeffs.items():
            hx = height(x)
            for y, cy in other.coeffs.items():
                if hx + height(y) > self.cutoff:
                    continue
                z = tuple(a + b for a, b in zip(x, y))
                out[z] = out.get(z, 0) + cx * cy
        return CharElement(self.rank, self.cutoff, out)

    def apply_matrix(self, w: WeylElement) -> "CharElement":
        """Push every exponent through a Weyl element; images must stay in
        the positive cone for the result to make sense here."""
        out: Dict[Coords, Scalar] = {}
        for x, c in self.coeffs.items():
            z = w.apply(x)
            if any(v < 0 for v in z):
                raise ValueError(f"image {z} left the positive cone")
            if height(z) <= self.cutoff:
                out[z] = out.get(z, 0) + c
        return CharElement(self.rank, self.cutoff, out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CharElement) and self.rank == other.rank
                and self.cutoff == other.cutoff and self.coeffs == other.coeffs)

    def first_difference(self, other: "CharElement"):
        """Earliest coordinate (height, then lex) where the two disagree,
        or None."""
        self._check(other)
        keys = set(self.coeffs) | set(other.coeffs)
        for x in sorted(keys, key=lambda t: (height(t), t)):
            a, b = self.coeffs.get(x, 0), other.coeffs.get(x, 0)
            if a != b:
                return x, a, b
        return None

    def specialize(self, weights: Optional[Sequence[int]] = None) -> QSeries:
        """Substitute e^{alpha_i} -> q^{w_i} (w_i = 1 by default).  The
        height cutoff bounds the reliable q-degree only when every weight
        is at least 1."""
        w = tuple(weights) if weights is not None else (1,) * self.rank
        if len(w) != self.rank or any(v < 1 for v in w):
            raise ValueError("specialization weights must be positive ints")
        data: Dict[int, Scalar] = {}
        for x, c in self.coeffs.items():
            d = sum(a * b for a, b in zip(x, w))
            if d <= self.cutoff:
                data[d] = data.get(d, 0) + c
        return QSeries(data, min_deg=0, trunc=self.cutoff)

    def __repr__(self) -> str:
        parts = [f"{c}*e{list(x)}" for x, c in
                 sorted(self.coeffs.items(), key=lambda t: (height(t[0]), t[0]))[:8]]
        more = "..." if len(self.coeffs) > 8 else ""
        return f"CharElement(h<={self.cutoff}: {' + '.join(parts)}{more})"


def char_quotient(num: "CharElement", den: "CharElement") -> "CharElement":
    """Solve q * den = num by increasing height; den must have constant
    term 1.  The result is asserted to reproduce num exactly."""
    if den.coeff((0,) * den.rank) != 1:
        raise ValueError("denominator must have constant term 1")
    num._check(den)
    rank, cutoff = num.rank, num.cutoff
    den_rest = {x: c for x, c in den.coeffs.items() if height(x) > 0}
    q: Dict[Coords, Scalar] = {}
    todo: Dict[Coords, Scalar] = dict(num.coeffs)
    # heights are processed in order; dividing spreads support upward only
    for h in range(cutoff + 1):
        layer = [x for x in list(todo) if height(x) == h]
        for x in sorted(layer):
            c = todo.pop(x, 0)
            if c == 0:
                continue
            q[x] = c
            for y, cy in den_rest.items():
                z = tuple(a + b for a, b in zip(x, y))
                if height(z) <= cutoff:
                    todo[z] = todo.get(z, 0) - c * cy
    result = CharElement(rank, cutoff, q)
    assert result * den == num, "quotient roundtrip failed"
    return result


# ---------------------------------------------------------------------------
# Denominator identities
# ---------------------------------------------------------------------------

@dataclass
class DenominatorReport:
    equal: bool
    first_difference: Optional[Tuple[Coords, Scalar, Scalar]]
    lhs: CharElement
    rhs: CharElement
    n_weyl: int
    n_roots: int
    notes: List[str] = field(default_factory=list)


def root_multiplicity_product(gcm: GCM, mults: Dict[Coords, int],
                              cutoff: int) -> CharElement:
    """prod over roots (1 - e^alpha)^{m_alpha} inside the truncated ring."""
    out = CharElement.one(gcm.rank, cutoff)
    for coords, m in sorted(mults.items(), key=lambda t: (height(t[0]), t[0])):
        if m == 0:
            continue
        base = CharElement.one(gcm.rank, cutoff) - \
            CharElement.term(gcm.rank, cutoff, coords)
        power = CharElement.one(gcm.rank, cutoff)
        for _ in range(abs(m)):
            power = power * base
        if m > 0:
            out = out * power
        else:
            out = char_quotient(out, power)
    return out


def _collect_multiplicities(gcm: GCM, cutoff: int,
                            imaginary_multiplicities: Optional[Dict[Coords, int]],
                            multiplicity_delta: Optional[Dict[Coords, int]]
                            ) -> Dict[Coords, int]:
    mults: Dict[Coords, int] = {}
    for r in real_positive_roots(gcm, max_height=cutoff):
        mults[r] = 1
    for coords, m in (imaginary_multiplicities or {}).items():
        coords = tuple(coords)
        if height(coords) <= cutoff:
            mults[coords] = mults.get(coords, 0) + m
    for coords, dm in (multiplicity_delta or {}).items():
        coords = tuple(coords)
        mults[coords] = mults.get(coords, 0) + dm
    return {c: m for c, m in mults.items() if m != 0}


def denominator_check(gcm: GCM, max_height: Optional[int] = None,
                      imaginary_multiplicities: Optional[Dict[Coords, int]] = None,
                      multiplicity_delta: Optional[Dict[Coords, int]] = None
                      ) -> DenominatorReport:
    """Verify sum_w det(w) e^{mu_w} = prod_{alpha>0} (1-e^alpha)^{m_alpha}
    up to the given height.

    Real root multiplicities are always 1; imaginary ones must be supplied
    (affine type needs the null-direction multiplicities).  The optional
    delta perturbs the product side for negative controls.
    """
    cls = classify(gcm)
    notes: List[str] = [f"type {cls.label}"]
    if max_height is None:
        if cls.label != "finite":
            raise ValueError("a height cap is required outside finite type")
        roots = real_positive_roots(gcm)
        max_height = sum(height(r) for r in roots)
        notes.append(f"height cap defaulted to {max_height}")
    elements = weyl_enumerate(gcm, max_len=max_height)
    acc: Dict[Coords, Scalar] = {}
    for w in elements:
        if height(w.mu) <= max_height:
            acc[w.mu] = acc.get(w.mu, 0) + w.det
    lhs = CharElement(gcm.rank, max_height, acc)
    mults = _collect_multiplicities(gcm, max_height,
                                    imaginary_multiplicities, multiplicity_delta)
    rhs = root_multiplicity_product(gcm, mults, max_height)
    diff = lhs.first_difference(rhs)
    if multiplicity_delta:
        notes.append(f"product side perturbed by {dict(multiplicity_delta)}")
    return DenominatorReport(diff is None, diff, lhs, rhs,
                             n_weyl=len(elements), n_roots=len(mults), notes=notes)


# ---------------------------------------------------------------------------
# Imaginary simple roots and the correction term
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImaginarySimple:
    coords: Coords
    norm: Scalar
    mult: int


def epsilon_series(gcm: GCM, simples: Sequence[ImaginarySimple],
                   lam_inner_products: Optional[Sequence[Scalar]], cutoff: int
                   ) -> CharElement:
    """sum over sets of pairwise orthogonal imaginary simple roots
    perpendicular to lam, signed by set size.

    lam is described by its inner products (lam, alpha_i) with the simple
    roots; None means lam = 0.  The supplied simples must be pairwise
    orthogonal, which turns the sum into a product with one factor per
    simple: (1 - e^x)^mult for norm 0, 1 - mult*e^x for negative norm (a
    negative-norm root is never orthogonal to itself, so it appears at
    most once).  Simples not perpendicular to lam only contribute the
    empty choice.
    """
    rank = gcm.rank
    out = CharElement.one(rank, cutoff)
    entries = list(simples)
    for k, e in enumerate(entries):
        declared = _norm_scalar(Fraction(e.norm))
        computed = root_norm(gcm, e.coords)
        if declared != computed:
            raise ValueError(
                f"declared norm {declared} != {computed} from the matrix for {e.coords}")
        if declared > 0:
            raise ValueError(f"imaginary simple {e.coords} has positive norm")
        if e.mult < 1:
            raise ValueError("multiplicities are positive")
        for other in entries[k + 1:]:
            if root_pairing(gcm, e.coords, other.coords) != 0:
                raise ValueError(
                    f"simples {e.coords} and {other.coords} are not orthogonal")
    for e in entries:
        if lam_inner_products is not None:
            pair_lam = sum(Fraction(e.coords[i]) * Fraction(lam_inner_products[i])
                           for i in range(rank))
            if pair_lam != 0:
                continue
        if height(e.coords) > cutoff:
            continue
        if e.norm == 0:
            base = CharElement.one(rank, cutoff) - \
                CharElement.term(rank, cutoff, e.coords)
            factor = CharElement.one(rank, cutoff)
            for _ in range(e.mult):
                factor = factor * base
        else:
            factor = CharElement.one(rank, cutoff) - \
                CharElement.term(rank, cutoff, e.coords, e.mult)
        out = out * factor
    return out


def gkm_denominator_check(gcm: GCM, simples: Sequence[ImaginarySimple],
                          root_multiplicities: Dict[Coords, int],
                          max_height: int,
                          multiplicity_delta: Optional[Dict[Coords, int]] = None
                          ) -> DenominatorReport:
    """Denominator identity with an imaginary correction:
    sum_w det(w) e^{mu_w} w(eps) = prod (1 - e^alpha)^{m_alpha}.

    All root multiplicities for the product side are supplied by the
    caller; real roots found by reflection closure are added with
    multiplicity 1 unless already listed.
    """
    eps = epsilon_series(gcm, simples, None, max_height)
    elements = weyl_enumerate(gcm, max_len=max_height)
    lhs = CharElement(gcm.rank, max_height)
    for w in elements:
        if height(w.mu) > max_height:
            continue
        contrib = eps.apply_matrix(w)
        term = CharElement.term(gcm.rank, max_height, w.mu, w.det)
        lhs = lhs + term * contrib
    mults: Dict[Coords, int] = {}
    for r in real_positive_roots(gcm, max_height=max_height):
        mults[r] = 1
    for coords, m in root_multiplicities.items():
        mults[tuple(coords)] = m
    for coords, dm in (multiplicity_delta or {}).items():
        mults[tuple(coords)] = mults.get(tuple(coords), 0) + dm
    mults = {c: m for c, m in mults.items() if m != 0 and height(c) <= max_height}
    rhs = root_multiplicity_product(gcm, mults, max_height)
    diff = lhs.first_difference(rhs)
    notes = [f"{len(simples)} imaginary simples"]
    if multiplicity_delta:
        notes.append(f"product side perturbed by {dict(multiplicity_delta)}")
    return DenominatorReport(diff is None, diff, lhs, rhs,
                             n_weyl=len(elements), n_roots=len(mults), notes=notes)


# ---------------------------------------------------------------------------
# Characters of dominant lowest-weight modules
# ---------------------------------------------------------------------------

@dataclass
class CharacterResult:
    weight_offsets: CharElement  # coefficient of e^x = mult of weight lam + x
    numerator: CharElement
    denominator: CharElement
    notes: List[str] = field(default_factory=list)

    def total_multiplicity(self) -> Scalar:
        return sum(self.weight_offsets.coeffs.values())


def character(gcm: GCM, lowest_weight_pairings: Sequence[Scalar],
              max_height: int,
              imaginary_multiplicities: Optional[Dict[Coords, int]] = None
              ) -> CharacterResult:
    """Weight multiplicities of the irreducible module with dominant
    lowest weight lam, given by its pairings <lam, alpha_i^vee> (integers,
    all nonpositive).

    Works from the quotient of two Weyl sums: the numerator tracks
    x_w = (lam + rho) - w(lam + rho), carried by the same rho-free
    recursion as mu_w, so affine matrices are fine; imaginary root
    multiplicities for the denominator must then be supplied.
    """
    n = gcm.rank
    pair = [as_integer(_norm_scalar(Fraction(p)), "weight pairing")
            for p in lowest_weight_pairings]
    if len(pair) != n:
        raise ValueError("pairing count != rank")
    if any(p > 0 for p in pair):
        raise ValueError("dominant lowest weights pair nonpositively")
    idx = real_indices(gcm)
    if len(idx) != n:
        raise ValueError("characters are implemented for real simple roots only")

    shifted = [p - 1 for p in pair]  # <lam + rho, alpha_i^vee>
    ident_cols = tuple(tuple(1 if k == j else 0 for k in range(n)) for j in range(n))
    # state per element: (columns, length, det, x_w)
    seen: Dict[Tuple[Coords, ...], Tuple[int, int, Coords]] = {
        ident_cols: (0, 1, (0,) * n)}
    frontier = [(ident_cols, 1, (0,) * n)]
    num_acc: Dict[Coords, Scalar] = {(0,) * n: 1}
    for ln in range(1, max_height + 1):
        nxt = []
        for cols, det, x in frontier:
            for i in idx:
                new_cols = tuple(simple_reflection(gcm, i, c) for c in cols)
                new_x = list(simple_reflection(gcm, i, x))
                new_x[i] -= shifted[i]
                new_x = tuple(new_x)
                prev = seen.get(new_cols)
                if prev is not None:
                    if prev[0] == ln:
                        assert prev[2] == new_x, "weight recursion inconsistent"
                    continue
                seen[new_cols] = (ln, -det, new_x)
                nxt.append((new_cols, -det, new_x))
                if height(new_x) <= max_height:
                    num_acc[new_x] = num_acc.get(new_x, 0) + (-det)
        frontier = nxt
        if not frontier:
            break
    numerator = CharElement(n, max_height, num_acc)
    mults = _collect_multiplicities(gcm, max_height, imaginary_multiplicities, None)
    denominator = root_multiplicity_product(gcm, mults, max_height)
    weights = char_quotient(numerator, denominator)
    for x, c in weights.coeffs.items():
        as_integer(c, f"weight multiplicity at {x}")
        if c < 0:
            raise ValueError(f"negative weight multiplicity at {x}")
    return CharacterResult(weights, numerator, denominator,
                           notes=[f"{len(seen)} Weyl elements visited"])
