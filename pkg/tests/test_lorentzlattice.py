"""Tests for the signature-(25,1) even unimodular lattice layer."""

import random
from fractions import Fraction

import pytest

from qident.lorentzlattice import (
    DIMENSION,
    GLUE_W,
    RHO,
    RHO_II11,
    GradedRoot,
    LatticeVector,
    LeechClass,
    class_difference_norm,
    fm_simple_root,
    ii11_pairing,
    inner_product,
    is_member,
    leech_representative,
    light_like_root,
    norm,
    random_member,
    random_rho_member,
    reflect,
)


class TestVectorBasics:
    def test_rho_is_null(self):
        """0^2 + 1^2 + ... + 24^2 = 4900 = 70^2, so rho has norm 0."""
        assert sum(k * k for k in range(25)) == 4900
        assert norm(RHO) == 0
        assert is_member(RHO)

    def test_mixed_parity_rejected(self):
        with pytest.raises(ValueError):
            LatticeVector((1,) + (0,) * (DIMENSION - 1))

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            LatticeVector((0,) * (DIMENSION - 1))

    def test_unit_vector_is_not_a_member(self):
        """(1, 0, ..., 0; 0) pairs to 1/2 with the glue vector."""
        e1 = LatticeVector.from_ints([1] + [0] * 24, 0)
        assert inner_product(e1, GLUE_W) == Fraction(1, 2)
        assert not is_member(e1)

    def test_base_root_is_a_member(self):
        """(-1, -1, 0, ..., 0; 0) is a norm-2 member pairing -1 with rho."""
        b = LatticeVector.from_ints([-1, -1] + [0] * 23, 0)
        assert is_member(b)
        assert norm(b) == 2
        assert inner_product(b, RHO) == -1

    def test_glue_vector_is_a_member(self):
        assert is_member(GLUE_W)
        assert norm(GLUE_W) == 6

    def test_member_closure(self):
        """Sums and differences of members are members."""
        rng = random.Random(411)
        for _ in range(50):
            x, y = random_member(rng), random_member(rng)
            assert is_member(x + y)
            assert is_member(x - y)
            assert is_member(-x)

    def test_inner_product_symmetric_bilinear(self):
        rng = random.Random(412)
        for _ in range(20):
            x, y, z = (random_member(rng) for _ in range(3))
            assert inner_product(x, y) == inner_product(y, x)
            assert inner_product(x + y, z) == inner_product(x, z) + inner_product(y, z)

    def test_member_norms_are_even(self):
        rng = random.Random(413)
        for _ in range(50):
            n = norm(random_member(rng))
            assert isinstance(n, int) and n % 2 == 0


class TestReflections:
    def test_reflection_is_an_involution(self):
        rng = random.Random(421)
        root = LatticeVector.from_ints([-1, -1] + [0] * 23, 0)
        for _ in range(100):
            x = random_member(rng)
            assert reflect(root, reflect(root, x)) == x

    def test_reflection_preserves_norm_and_membership(self):
        rng = random.Random(422)
        root = LatticeVector.from_ints([1, 0, -1] + [0] * 22, 0)
        assert norm(root) == 2
        for _ in range(50):
            x = random_member(rng)
            y = reflect(root, x)
            assert is_member(y)
            assert norm(y) == norm(x)

    def test_reflection_negates_the_root(self):
        root = LatticeVector.from_ints([-1, -1] + [0] * 23, 0)
        assert reflect(root, root) == -root

    def test_reflection_fixes_the_orthogonal_complement(self):
        root = LatticeVector.from_ints([1, -1] + [0] * 23, 0)
        other = LatticeVector.from_ints([0, 0, 1, 1] + [0] * 21, 0)
        assert inner_product(root, other) == 0
        assert reflect(root, other) == other

    def test_reflection_rejects_wrong_norm(self):
        with pytest.raises(ValueError):
            reflect(RHO, RHO)

    def test_reflection_rejects_non_member_root(self):
        """A norm-2 half-integer point outside the lattice is not a root."""
        fake = LatticeVector((3,) + (1,) * 24 + (5,))
        assert norm(fake) == 2
        assert not is_member(fake)
        with pytest.raises(ValueError):
            reflect(fake, RHO)


class TestLeechProjection:
    def test_representative_has_norm_two(self):
        rng = random.Random(431)
        for _ in range(50):
            x = random_rho_member(rng)
            rep = leech_representative(x)
            assert norm(rep) == 2
            assert inner_product(rep, RHO) == -1
            # the representative differs from x by a multiple of rho
            d = rep - x
            assert inner_product(d, RHO) == 0 and norm(d) == 0

    def test_representative_is_idempotent(self):
        rng = random.Random(432)
        x = random_rho_member(rng)
        rep = leech_representative(x)
        assert leech_representative(rep) == rep

    def test_representative_requires_member(self):
        e1 = LatticeVector.from_ints([1] + [0] * 24, 0)
        with pytest.raises(ValueError):
            leech_representative(e1)

    def test_representative_requires_rho_pairing(self):
        with pytest.raises(ValueError):
            leech_representative(RHO)

    def test_rho_shift_lands_in_same_class(self):
        rng = random.Random(433)
        x = random_rho_member(rng)
        assert LeechClass.of(x) == LeechClass.of(x + RHO.scaled(5))
        assert LeechClass.of(x) == LeechClass.of(x - RHO.scaled(3))

    def test_distinct_classes_differ_by_norm_at_least_four(self):
        """The projected lattice has minimal norm 4: no roots survive."""
        rng = random.Random(434)
        classes = [LeechClass.of(random_rho_member(rng)) for _ in range(30)]
        for i in range(len(classes)):
            for j in range(i + 1, len(classes)):
                if classes[i] == classes[j]:
                    continue
                d = class_difference_norm(classes[i], classes[j])
                assert d % 2 == 0
                assert d >= 4


class TestGradedRoots:
    def test_simple_root_template_norms(self):
        """(lambda, 1, lambda^2/2 - 1) has norm 2 and pairs -1 with (0,0,1)."""
        for leech_norm in (0, 2, 4, 6, 8, 46, 100):
            r = fm_simple_root(leech_norm)
            assert r.norm() == 2
            assert ii11_pairing(r, RHO_II11) == -1
            assert r.m == 1 and r.n == leech_norm // 2 - 1

    def test_zero_norm_template_is_the_exceptional_root(self):
        assert fm_simple_root(0) == GradedRoot(0, 1, -1)

    def test_simple_root_rejects_odd_or_negative(self):
        with pytest.raises(ValueError):
            fm_simple_root(3)
        with pytest.raises(ValueError):
            fm_simple_root(-2)

    def test_light_like_roots(self):
        for n in (1, 2, 7):
            r = light_like_root(n)
            assert r.norm() == 0
            assert ii11_pairing(r, RHO_II11) == 0
        with pytest.raises(ValueError):
            light_like_root(0)

    def test_pairing_uses_supplied_leech_part(self):
        a = GradedRoot(4, 1, 1)
        b = GradedRoot(4, 1, 1)
        assert ii11_pairing(a, b, leech_pairing=4) == 2
        assert ii11_pairing(a, b) == -2
