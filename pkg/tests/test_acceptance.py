"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single ``ACCEPTANCE NN <label>: PASS`` (or FAIL) line
and asserts a wall-clock bound where one is promised.  Oracles are kept
self-contained in this file on purpose: the colored-partition counter,
the theta-series table, and the Freudenthal multiplicity recursion are
written from scratch here rather than imported, so that agreement is
evidence and not circularity.  Run with ``pytest -s`` to see the lines.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

from qident.autoforms import (
    SlicePoint,
    check_functional_equation,
    check_periodicity,
    phi_slice,
)
from qident.exactseries import QSeries
from qident.identities import (
    PINNED_J_EXPONENTS,
    verify_fmid,
    verify_j_product,
    verify_mid,
)
from qident.kacmoody import (
    GCM,
    ImaginarySimple,
    character,
    denominator_check,
    gkm_denominator_check,
)
from qident.lorentzlattice import (
    RHO,
    LatticeVector,
    LeechClass,
    class_difference_norm,
    inner_product,
    is_member,
    norm,
    random_member,
    random_rho_member,
    reflect,
)
from qident.modforms import c0_square_exponents, c_coefficient, delta, j_minus_744
from qident.moonshine import (
    ThompsonData,
    identity_element_data,
    required_trace_depth,
    solve_coefficients,
    verify_twisted,
)

A1 = GCM([[2]])
A2 = GCM([[2, -1], [-1, 2]])
B2 = GCM([[2, -1], [-2, 2]])
AFF_A1 = GCM([[2, -2], [-2, 2]])
MIXED_GKM = GCM([[2, -1], [-1, 0]])


@contextmanager
def criterion(num, label, limit=None):
    start = time.monotonic()
    ok = False
    try:
        yield
        elapsed = time.monotonic() - start
        if limit is not None:
            assert elapsed < limit, (
                f"criterion {num} took {elapsed:.2f}s, bound is {limit}s")
        ok = True
        print(f"ACCEPTANCE {num:02d} {label}: PASS ({elapsed:.2f}s)")
    finally:
        if not ok:
            print(f"ACCEPTANCE {num:02d} {label}: FAIL")


# ---------------------------------------------------------------------------
# oracles, written independently of the library
# ---------------------------------------------------------------------------

def colored_partition_counts(n_max, colors=24):
    """ways[n] = number of partitions of n with parts in ``colors`` colors.

    Processed one part size at a time; choosing k parts of size m across
    c colors is a multiset choice, C(k + c - 1, c - 1).
    """
    ways = [1] + [0] * n_max
    for m in range(1, n_max + 1):
        new = [0] * (n_max + 1)
        for n in range(n_max + 1):
            k = 0
            while k * m <= n:
                new[n] += ways[n - k * m] * math.comb(k + colors - 1,
                                                      colors - 1)
                k += 1
        ways = new
    return ways


def gauss_square_theta(trunc):
    """Coefficients of sum_{k in Z} (-1)^k q^(k^2) through q^trunc."""
    out = [0] * (trunc + 1)
    out[0] = 1
    k = 1
    while k * k <= trunc:
        out[k * k] = 2 * (-1) ** k
        k += 1
    return out


def _solve_exact(matrix, rhs):
    """Solve an invertible integer system over the rationals."""
    n = len(matrix)
    m = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(rhs[i])]
         for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        m[col] = [v / m[col][col] for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def freudenthal_multiplicities(cartan, symmetrizer, pos_roots, pairings,
                               max_height):
    """Weight multiplicities of the irreducible highest-weight module.

    Tracks offsets below the highest weight in simple-root coordinates
    and fills them in increasing height with the Freudenthal recursion;
    inner products use the symmetrized matrix throughout.
    """
    n = len(cartan)
    sym = [[Fraction(symmetrizer[i] * cartan[i][j]) for j in range(n)]
           for i in range(n)]
    lam = _solve_exact(cartan, pairings)
    rho = _solve_exact(cartan, [1] * n)

    def ip(u, v):
        return sum(u[i] * sym[i][j] * v[j]
                   for i in range(n) for j in range(n))

    def shifted(offset):
        return [lam[i] - offset[i] + rho[i] for i in range(n)]

    top_sq = ip(shifted((0,) * n), shifted((0,) * n))

    def offsets_of_height(h, size):
        if size == 1:
            yield (h,)
            return
        for first in range(h + 1):
            for rest in offsets_of_height(h - first, size - 1):
                yield (first,) + rest

    mult = {(0,) * n: 1}
    for h in range(1, max_height + 1):
        for x in offsets_of_height(h, n):
            denom = top_sq - ip(shifted(x), shifted(x))
            total = Fraction(0)
            for a in pos_roots:
                k = 1
                while True:
                    up = tuple(x[i] - k * a[i] for i in range(n))
                    if any(v < 0 for v in up):
                        break
                    m_up = mult.get(up, 0)
                    if m_up:
                        mu = [lam[i] - up[i] for i in range(n)]
                        total += 2 * m_up * ip(mu, list(a))
                    k += 1
            if denom == 0:
                assert total == 0, f"recursion broke at offset {x}"
                continue
            val = total / denom
            assert val.denominator == 1, (x, val)
            if val:
                mult[x] = int(val)
    return mult


# ---------------------------------------------------------------------------
# the twelve criteria
# ---------------------------------------------------------------------------

def test_criterion_01_j_expansion():
    with criterion(1, "j-expansion coefficients exact at depth 50", 1.0):
        f = j_minus_744(50)
        assert f.coeff(-1) == 1
        assert f.coeff(0) == 0
        assert f.coeff(1) == 196884
        assert f.coeff(2) == 21493760
        for k in (-1, 0, 1, 2):
            assert c_coefficient(k) == f.coeff(k)


def test_criterion_02_delta_inverse_counts_colored_partitions():
    with criterion(2, "1/Delta coefficients count 24-colored partitions",
                   1.0):
        inv = delta(14).invert()
        table = colored_partition_counts(12)
        for n in range(13):
            assert inv.coeff(n - 1) == table[n], n


def test_criterion_03_product_identity_window_six():
    with criterion(3, "two-variable product identity at window (6, 6)",
                   10.0):
        report = verify_mid(6, 6)
        assert report.equal
        assert report.first_discrepancy is None
        mutated = verify_mid(6, 6, exponent_delta={(1, 1): 1})
        assert not mutated.equal


def test_criterion_04_fake_monster_identity_window_five():
    with criterion(4, "rank-two form of the identity at window (5, 5)",
                   30.0):
        report = verify_fmid(5, 5)
        assert report.equal
        assert report.first_discrepancy is None


def test_criterion_05_j_product_exponents_and_roundtrip():
    with criterion(5, "product exponents for j pinned and roundtripped",
                   5.0):
        derived = c0_square_exponents(3)
        assert derived[1] == -744
        assert derived[2] == 80256
        assert derived[3] == -12288744
        for n, value in PINNED_J_EXPONENTS.items():
            assert derived[n] == value
        report = verify_j_product(10)
        assert report.equal
        assert report.rhs.trunc >= 9


def test_criterion_06_twisted_identity_class():
    with criterion(6, "twisted relation for the identity class at (5, 5)",
                   30.0):
        report = verify_twisted("1A", 5, 5)
        assert report.equal
        assert report.first_discrepancy is None
        assert any("integral: yes" in note for note in report.notes)


def test_criterion_07_coefficient_determination():
    with criterion(7, "recursion recovers c(6)..c(10) from c(-1)..c(5)",
                   60.0):
        data = identity_element_data(5, max_power=5)
        result = solve_coefficients(data, 5, 10)
        assert result.underdetermined == ()
        assert set(range(6, 11)) <= set(result.determined)
        for k in range(6, 11):
            assert result.series.coeff(k) == c_coefficient(k), k


def test_criterion_08_denominator_identities():
    with criterion(8, "denominator identities, finite and affine", 10.0):
        for gcm in (A1, A2, B2):
            rep = denominator_check(gcm)
            assert rep.equal, gcm
        h = 12
        rep = denominator_check(
            AFF_A1, max_height=h,
            imaginary_multiplicities={(k, k): 1 for k in range(1, h + 1)})
        assert rep.equal
        spec = rep.lhs.specialize()
        expect = gauss_square_theta(h)
        for n in range(h + 1):
            assert spec.coeff(n) == expect[n], n


def test_criterion_09_characters_match_freudenthal():
    with criterion(9, "character dimensions match the Freudenthal oracle",
                   10.0):
        cases = (
            (A1, [1], [(1,)], 4),
            (A2, [1, 1], [(1, 0), (0, 1), (1, 1)], 8),
            (B2, [2, 1], [(1, 0), (0, 1), (1, 1), (1, 2)], 16),
        )
        for gcm, symmetrizer, pos_roots, cap in cases:
            rank = len(symmetrizer)
            cartan = [[gcm[i, j] for j in range(rank)] for i in range(rank)]
            for dominant in _dominant_weights(rank, 4):
                res = character(gcm, [-x for x in dominant], cap)
                oracle = freudenthal_multiplicities(
                    cartan, symmetrizer, pos_roots, list(dominant), cap)
                assert res.total_multiplicity() == sum(oracle.values()), \
                    (cartan, dominant)
                assert sorted(res.weight_offsets.coeffs.values()) \
                    == sorted(oracle.values()), (cartan, dominant)
            trivial = character(gcm, [0] * rank, cap)
            assert trivial.total_multiplicity() == 1
            assert trivial.weight_offsets.coeffs == {(0,) * rank: 1}


def _dominant_weights(rank, height_cap):
    def rec(remaining, size):
        if size == 1:
            for v in range(remaining + 1):
                yield (v,)
            return
        for first in range(remaining + 1):
            for rest in rec(remaining - first, size - 1):
                yield (first,) + rest
    return rec(height_cap, rank)


def test_criterion_10_lattice_suite():
    with criterion(10, "even Lorentzian lattice property suite", 5.0):
        rng = random.Random(20260822)
        assert inner_product(RHO, RHO) == 0
        for _ in range(100):
            x = random_member(rng)
            y = random_member(rng)
            assert is_member(x) and is_member(y)
            assert is_member(x + y) and is_member(x - y)
        spatial = list(range(25))
        for _ in range(100):
            a, b = rng.sample(spatial, 2)
            coords = [0] * 25
            coords[a] = rng.choice((1, -1))
            coords[b] = rng.choice((1, -1))
            root = LatticeVector.from_ints(coords, 0)
            assert is_member(root) and norm(root) == 2
            x = random_member(rng)
            y = random_member(rng)
            rx, ry = reflect(root, x), reflect(root, y)
            assert inner_product(rx, ry) == inner_product(x, y)
            assert norm(rx) == norm(x)
            assert is_member(rx) and is_member(ry)
        classes = []
        seen = set()
        while len(classes) < 50:
            c = LeechClass.of(random_rho_member(rng))
            if c not in seen:
                seen.add(c)
                classes.append(c)
        for i, u in enumerate(classes):
            for v in classes[i + 1:]:
                assert class_difference_norm(u, v) >= 4


def test_criterion_11_slice_numerics():
    with criterion(11, "reflective form slice numerics", 1.0):
        points = (SlicePoint(2j, 3j),
                  SlicePoint(1j, 1j * math.sqrt(2.0)))
        for pt in points:
            rep = check_functional_equation(pt, trunc=40)
            assert rep.equal
            assert rep.relative_difference < 1e-8
        per = check_periodicity(SlicePoint(2j, 3j), trunc=40)
        assert per.equal
        assert per.relative_difference < 1e-10
        forward = phi_slice(SlicePoint(2j, 3j))
        backward = phi_slice(SlicePoint(3j, 2j))
        assert forward == -backward


def test_criterion_12_negative_controls():
    with criterion(12, "seeded corruptions are caught and located"):
        rep = verify_mid(3, 3, exponent_delta={(1, 1): 1})
        assert not rep.equal
        assert rep.first_discrepancy == (0, 1, -196885, -196884)

        clean = verify_fmid(3, 3)
        rep = verify_fmid(3, 3, exponent_delta={(1, 1): 1})
        assert not rep.equal
        assert rep.first_discrepancy == (1, 2, clean.lhs.coeff(1, 2) - 1,
                                         clean.rhs.coeff(1, 2))

        rep = verify_j_product(4, exponent_delta={1: 1})
        assert not rep.equal
        assert rep.first_discrepancy == (0, 0, 743, 744)

        depth = required_trace_depth(4, 4)[1]
        base = j_minus_744(depth)
        bad = QSeries({**base.coeffs, 1: base.coeff(1) + 1}, -1, depth)
        data = ThompsonData("1A", {n: bad for n in range(1, 6)}, 5)
        rep = verify_twisted(data, 4, 4)
        assert not rep.equal
        assert rep.first_discrepancy == (1, 2, 196884, 0)

        rep = denominator_check(A2, multiplicity_delta={(1, 1): 1})
        assert not rep.equal
        assert rep.first_difference[0] == (1, 1)

        mults = {(1, 0): 1, (0, 1): 1, (1, 1): 1, (1, 2): 1, (1, 3): 1,
                 (1, 4): 1, (2, 3): 1, (1, 5): 1, (2, 4): 1, (1, 6): 1,
                 (2, 5): 2, (3, 4): 1, (1, 7): 1, (2, 6): 2, (3, 5): 2}
        rep = gkm_denominator_check(
            MIXED_GKM, [ImaginarySimple((0, 1), 0, 1)], mults, 8,
            multiplicity_delta={(1, 2): 1})
        assert not rep.equal
        assert rep.first_difference[0] == (1, 2)

        spoiled = delta(40)
        spoiled = QSeries({**spoiled.coeffs, 2: spoiled.coeff(2) + 1},
                          spoiled.min_deg, spoiled.trunc)
        rep = check_functional_equation(
            SlicePoint(3j, 1j),
            expansions=(spoiled, j_minus_744(40)))
        assert not rep.equal
        assert rep.relative_difference > 1e-3
