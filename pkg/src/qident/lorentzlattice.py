"""The even unimodular Lorentzian lattice of signature (25, 1).

Vectors are stored in doubled integer coordinates (2*x_1, ..., 2*x_25; 2*x_0)
so that half-odd-integer points are representable exactly.  The lattice
consists of the points whose coordinates are all integers or all half odd
integers and whose inner product with the glue vector (1/2, ..., 1/2; 1/2)
is integral; the bilinear form is x_1 y_1 + ... + x_25 y_25 - x_0 y_0.

The distinguished primitive null vector rho = (0, 1, 2, ..., 24; 70) has
norm 0 because 1^2 + ... + 24^2 = 4900 = 70^2.  Vectors x with x.rho = -1
project onto the Leech lattice: the coset x + Z*rho contains exactly one
norm-2 representative, and differences of distinct cosets have norm >= 4
(the Leech lattice has no vectors of norm 2).

Graded roots model elements (lambda, m, n) of Leech + II_1,1 where the
hyperbolic summand pairs (m, n) with (m', n') to -m n' - n m', so a graded
vector has norm lambda^2 - 2mn.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterable, Tuple

from .exactseries import Scalar, as_integer

DIMENSION = 26


@dataclass(frozen=True)
class LatticeVector:
    """A point of the ambient space at half-integer resolution.

    Doubled coordinates, spatial entries first, time entry last.  All
    entries must share one parity: even entries encode integer points,
    odd entries half-odd-integer points.
    """

    doubled: Tuple[int, ...]

    def __post_init__(self):
        if len(self.doubled) != DIMENSION:
            raise ValueError(f"need {DIMENSION} coordinates, got {len(self.doubled)}")
        if not all(isinstance(d, int) for d in self.doubled):
            raise TypeError("doubled coordinates must be ints")
        parities = {d % 2 for d in self.doubled}
        if len(parities) > 1:
            raise ValueError("coordinates must be all integers or all half odd integers")

    @staticmethod
    def from_ints(spatial: Iterable[int], time: int) -> "LatticeVector":
        sp = tuple(int(v) * 2 for v in spatial)
        return LatticeVector(sp + (2 * int(time),))

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a + b for a, b in zip(self.doubled, other.doubled)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a - b for a, b in zip(self.doubled, other.doubled)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.doubled))

    def scaled(self, k: int) -> "LatticeVector":
        return LatticeVector(tuple(k * a for a in self.doubled))


RHO = LatticeVector.from_ints(range(25), 70)
GLUE_W = LatticeVector(tuple([1] * DIMENSION))


def inner_product(x: LatticeVector, y: LatticeVector) -> Scalar:
    """Lorentzian pairing, exact; spatial entries count +, the time entry -."""
    dx, dy = x.doubled, y.doubled
    s = sum(dx[i] * dy[i] for i in range(25)) - dx[25] * dy[25]
    if s % 4 == 0:
        return s // 4
    return Fraction(s, 4)


def norm(x: LatticeVector) -> Scalar:
    return inner_product(x, x)


def is_member(x: LatticeVector) -> bool:
    """Lattice membership: coordinate parity is uniform by construction, so
    the deciding condition is integrality of the pairing with the glue
    vector (1/2, ..., 1/2; 1/2)."""
    return isinstance(inner_product(x, GLUE_W), int)


def reflect(root: LatticeVector, x: LatticeVector) -> LatticeVector:
    """Reflection in the hyperplane of a norm-2 lattice root:
    x - (root.x) root."""
    if norm(root) != 2:
        raise ValueError(f"reflection needs a norm-2 root, got norm {norm(root)}")
    if not is_member(root):
        raise ValueError("reflection root must lie in the lattice")
    c = as_integer(inner_product(root, x), "reflection pairing")
    return LatticeVector(tuple(dx - c * dr for dx, dr in zip(x.doubled, root.doubled)))


def leech_representative(x: LatticeVector) -> LatticeVector:
    """The unique norm-2 vector in the coset x + Z*rho.

    Requires a lattice member with x.rho = -1.  Adding k*rho changes the
    norm by -2k, so k = (norm(x) - 2) / 2.
    """
    if not is_member(x):
        raise ValueError("not a lattice member")
    if inner_product(x, RHO) != -1:
        raise ValueError(f"need x.rho = -1, got {inner_product(x, RHO)}")
    k = as_integer(Fraction(as_integer(norm(x), "norm") - 2, 2), "rho step")
    return x + RHO.scaled(k)


@dataclass(frozen=True)
class LeechClass:
    """A coset of rho inside the x.rho = -1 layer, named by its norm-2
    representative."""

    rep: LatticeVector

    @staticmethod
    def of(x: LatticeVector) -> "LeechClass":
        return LeechClass(leech_representative(x))


def class_difference_norm(a: LeechClass, b: LeechClass) -> int:
    """Norm of the difference of class representatives: 4 - 2(a.b), an even
    integer, and at least 4 when the classes are distinct."""
    return as_integer(norm(a.rep - b.rep), "class difference norm")


def random_member(rng: Random, box: int = 8) -> LatticeVector:
    """Random lattice member with doubled coordinates roughly inside [-box, box].

    Picks a parity class, draws coordinates in that class, then steps the
    time coordinate by 2 if needed so the glue pairing is integral."""
    parity = rng.choice([0, 1])
    half = max(box // 2, 1)

    def draw() -> int:
        return 2 * rng.randrange(-half, half + 1) + parity

    coords = [draw() for _ in range(25)]
    t = draw()
    if (sum(coords) - t) % 4:
        t += 2
    vec = LatticeVector(tuple(coords) + (t,))
    assert is_member(vec)
    return vec


_BASE_RHO_MINUS_ONE = LatticeVector.from_ints([-1, -1] + [0] * 23, 0)


def random_rho_member(rng: Random, box: int = 8) -> LatticeVector:
    """Random lattice member x with x.rho = -1.

    Built as base + y where base = (-1, -1, 0, ..., 0; 0) pairs to -1 with
    rho, and y is a random member of the rho-orthogonal sublattice: all
    coordinates are drawn freely except the spatial slot of rho-weight 1,
    which is solved for, and the weight-0 slot absorbs the glue condition.
    """
    parity = rng.choice([0, 1])
    half = max(box // 2, 1)

    def draw(scale: int = 1) -> int:
        return 2 * rng.randrange(-half // scale, half // scale + 1) + parity

    dy = [0] * DIMENSION
    for i in range(2, 25):
        dy[i] = draw()
    dy[25] = draw(4)
    dy[0] = draw()
    # rho-weight of spatial slot i is i (0-based): solve the weight-1 slot.
    dy[1] = 70 * dy[25] - sum(i * dy[i] for i in range(2, 25))
    defect = (sum(dy[:25]) - dy[25]) % 4
    if defect:
        assert defect == 2
        dy[0] += 2
    y = LatticeVector(tuple(dy))
    assert is_member(y) and inner_product(y, RHO) == 0
    out = _BASE_RHO_MINUS_ONE + y
    assert inner_product(out, RHO) == -1
    return out


# ---------------------------------------------------------------------------
# Graded roots of Leech + II_1,1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedRoot:
    """(lambda, m, n) with lambda recorded by its Leech norm (0 for the zero
    vector); the II_1,1 summand contributes -2mn to the norm."""

    leech_norm: int
    m: int
    n: int

    def norm(self) -> int:
        return self.leech_norm - 2 * self.m * self.n


RHO_II11 = GradedRoot(0, 0, 1)


def ii11_pairing(a: GradedRoot, b: GradedRoot, leech_pairing: int = 0) -> int:
    """Pairing of graded vectors; the Leech components' pairing must be
    supplied (0 whenever either side has zero Leech part)."""
    return leech_pairing - a.m * b.n - a.n * b.m


def fm_simple_root(lambda_norm: int) -> GradedRoot:
    """The simple-root template (lambda, 1, lambda^2/2 - 1) for a Leech
    vector of even norm lambda_norm.

    The result always has norm 2 and pairing -1 with the null grading
    vector (0, 0, 1), matching the Weyl-vector convention rho.r = -r^2/2.
    """
    if lambda_norm < 0 or lambda_norm % 2 != 0:
        raise ValueError(f"Leech norms are even and nonnegative, got {lambda_norm}")
    root = GradedRoot(lambda_norm, 1, lambda_norm // 2 - 1)
    assert root.norm() == 2
    assert ii11_pairing(root, RHO_II11) == -1
    return root


def light_like_root(n: int) -> GradedRoot:
    """The degree-n multiple of the grading null vector: norm 0, orthogonal
    to (0, 0, 1)."""
    if n < 1:
        raise ValueError("light-like root degrees are positive")
    root = GradedRoot(0, 0, n)
    assert root.norm() == 0
    assert ii11_pairing(root, RHO_II11) == 0
    return root
