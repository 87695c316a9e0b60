"""The plane cubic x^3 + y^3 + z^3 = 0 over a prime field, p != 3.

The chord-tangent construction with base flex O = (1 : -1 : 0) makes the
rational points an abelian group, and P -> [P - O] identifies that group
with Pic0 of the curve.  Everything here is exhaustive: point lists by
scan, element orders by repeated addition, quotients Pic0/2 and Pic0/3 by
enumerating the subgroup of multiples.  The sizes involved (p up to a few
hundred) never justify anything faster.

The Weierstrass model y^2 + y = x^3 - 7 of the same curve is kept as a
consistency check only: its point count and group shape are computed
independently and compared, with no coordinate map between the models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable

from .errors import BadPrime, CharacteristicThree, HypothesisFailed, NotPrime
from .field import is_prime

#: the base flex used for the group law, as unnormalized coordinates
BASE_FLEX = (1, -1, 0)


@dataclass(frozen=True)
class CurvePoint:
    """A point of the cubic, normalized to leading coordinate 1."""

    p: int
    coords: tuple[int, int, int]


def _check_prime(p: int) -> None:
    if p == 3:
        raise CharacteristicThree("the curve x^3+y^3+z^3 is singular mod 3")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


def curve_point(p: int, coords: Iterable[int]) -> CurvePoint:
    """Validate and normalize homogeneous coordinates of a curve point."""
    _check_prime(p)
    c = tuple(x % p for x in coords)
    if len(c) != 3 or not any(c):
        raise ValueError("expected three coordinates, not all zero")
    if sum(x ** 3 for x in c) % p:
        raise ValueError(f"{c} does not lie on the curve mod {p}")
    lead = next(x for x in c if x)
    inv = pow(lead, -1, p)
    return CurvePoint(p, tuple((x * inv) % p for x in c))


def base_point(p: int) -> CurvePoint:
    """The flex O = (1 : -1 : 0)."""
    return curve_point(p, BASE_FLEX)


@lru_cache(maxsize=None)
def curve_points(p: int) -> tuple[CurvePoint, ...]:
    """All rational points, chart by chart with the last coordinate fastest."""
    _check_prime(p)
    cubes = [pow(x, 3, p) for x in range(p)]
    out = []
    for a in range(p):
        for b in range(p):
            if (1 + cubes[a] + cubes[b]) % p == 0:
                out.append(CurvePoint(p, (1, a, b)))
    for c in range(p):
        if (1 + cubes[c]) % p == 0:
            out.append(CurvePoint(p, (0, 1, c)))
    # (0:0:1) would need 1 = 0
    return tuple(out)


def _third_distinct(a: CurvePoint, b: CurvePoint) -> CurvePoint:
    p = a.p
    u, v = a.coords, b.coords
    c1 = sum(3 * x * x * y for x, y in zip(u, v)) % p
    c2 = sum(3 * y * y * x for x, y in zip(u, v)) % p
    coords = tuple((c2 * x - c1 * y) % p for x, y in zip(u, v))
    return curve_point(p, coords)


def _tangent_second_point(a: CurvePoint) -> tuple[int, int, int]:
    """A point other than a itself on the tangent line at a."""
    p = a.p
    n = tuple(3 * x * x % p for x in a.coords)
    j0 = next(i for i, x in enumerate(n) if x)
    basis = []
    for m in range(3):
        if m == j0:
            continue
        vec = [0, 0, 0]
        vec[m] = 1
        vec[j0] = (-n[m] * pow(n[j0], -1, p)) % p
        basis.append(tuple(vec))
    pc = [a.coords[m] for m in range(3) if m != j0]
    m0 = next(i for i, x in enumerate(pc) if x)
    return basis[1 - m0]


def third_point(a: CurvePoint, b: CurvePoint) -> CurvePoint:
    """The residual intersection of the line through a and b (tangent when
    a = b) with the curve."""
    if a.p != b.p:
        raise ValueError("points live over different primes")
    if a != b:
        return _third_distinct(a, b)
    p = a.p
    u = a.coords
    w = _tangent_second_point(a)
    c2 = sum(3 * x * x * y for x, y in zip(w, u)) % p
    c3 = sum(x ** 3 for x in w) % p
    coords = tuple((c3 * x - c2 * y) % p for x, y in zip(u, w))
    return curve_point(p, coords)


def group_add(a: CurvePoint, b: CurvePoint) -> CurvePoint:
    """The chord-tangent sum with identity O."""
    return third_point(third_point(a, b), base_point(a.p))


def group_neg(a: CurvePoint) -> CurvePoint:
    return third_point(a, base_point(a.p))


def group_mul(a: CurvePoint, k: int) -> CurvePoint:
    o = base_point(a.p)
    if k < 0:
        a, k = group_neg(a), -k
    acc = o
    while k:
        if k & 1:
            acc = group_add(acc, a)
        a = group_add(a, a)
        k >>= 1
    return acc


def point_order(a: CurvePoint) -> int:
    o = base_point(a.p)
    acc = a
    k = 1
    while acc != o:
        acc = group_add(acc, a)
        k += 1
    return k


def flexes(p: int) -> list[CurvePoint]:
    """Points whose tangent meets the curve triply there."""
    return [a for a in curve_points(p) if third_point(a, a) == a]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def group_structure(p: int) -> tuple[int, ...]:
    """Invariant factors of C(F_p), by exhaustive order computation.

    The group of an elliptic curve over a finite field has at most two
    factors d1 | d2; d2 is the exponent and d1 the index of the cyclic
    part.  The shape is cross-checked by counting d-torsion for every
    divisor d of the exponent.
    """
    pts = curve_points(p)
    n = len(pts)
    orders = [point_order(a) for a in pts]
    exponent = 1
    for k in orders:
        exponent = _lcm(exponent, k)
    if n % exponent:
        raise AssertionError("exponent does not divide the group order")
    d1 = n // exponent
    if d1 > 1 and exponent % d1:
        raise AssertionError("group is not a product of two cyclic factors")
    for d in range(1, exponent + 1):
        if exponent % d:
            continue
        torsion = sum(1 for k in orders if d % k == 0)
        if torsion != gcd(d, d1) * gcd(d, exponent):
            raise AssertionError(f"{d}-torsion count does not match the shape")
    return (exponent,) if d1 == 1 else (d1, exponent)


def weierstrass_model_agrees(p: int) -> bool:
    """Whether y^2 + y = x^3 - 7 has the same count and shape over F_p.

    A model comparison without a coordinate map; only meaningful away
    from 2 and 3.
    """
    if p in (2, 3):
        raise BadPrime("the Weierstrass comparison needs p coprime to 6")
    _check_prime(p)
    count = 1  # the point at infinity
    pts = []
    for x in range(p):
        rhs = (x ** 3 - 7) % p
        for y in range(p):
            if (y * y + y) % p == rhs:
                count += 1
                pts.append((x, y))
    if count != len(curve_points(p)):
        return False
    return _weierstrass_structure(p, pts) == group_structure(p)


def _w_add(p, a, b):
    if a is None:
        return b
    if b is None:
        return a
    x1, y1 = a
    x2, y2 = b
    if x1 == x2 and (y1 + y2 + 1) % p == 0:
        return None
    if a == b:
        lam = 3 * x1 * x1 * pow(2 * y1 + 1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (-(lam * (x3 - x1) + y1) - 1) % p
    return (x3, y3)


def _weierstrass_structure(p, pts) -> tuple[int, ...]:
    n = len(pts) + 1
    exponent = 1
    orders = []
    for a in pts:
        acc = a
        k = 1
        while acc is not None:
            acc = _w_add(p, acc, a)
            k += 1
        orders.append(k)
        exponent = _lcm(exponent, k)
    d1 = n // exponent
    return (exponent,) if d1 == 1 else (d1, exponent)


def is_cube(p: int, a: int) -> bool:
    """Whether a is a cube mod p (cubing is onto when p = 2 mod 3)."""
    _check_prime(p)
    a %= p
    if a == 0 or p % 3 != 1:
        return True
    return pow(a, (p - 1) // 3, p) == 1


def two_division_check(p: int) -> bool:
    """Whether 4x^3 - 27 splits completely over F_p.

    Computed by root count and, independently, by the congruence and cube
    conditions on p; the two routes must agree.
    """
    _check_prime(p)
    if p == 2:
        raise BadPrime("the 2-division polynomial check needs p coprime to 6")
    roots = sum(1 for x in range(p) if (4 * x ** 3 - 27) % p == 0)
    by_roots = roots == 3
    by_condition = p % 3 == 1 and is_cube(p, 2)
    if by_roots != by_condition:
        raise AssertionError("the split test routes disagree")
    return by_roots


@dataclass(frozen=True)
class PrimeCondition:
    """Congruence, cube, and splitting conditions on an odd prime p != 3."""

    one_mod_three: bool
    two_is_cube: bool
    t3_minus_2_splits: bool

    def as_tuple(self) -> tuple[bool, bool, bool]:
        return (self.one_mod_three, self.two_is_cube, self.t3_minus_2_splits)


def prime_condition(p: int) -> PrimeCondition:
    """p = 1 mod 3, 2 a cube mod p, and whether t^3 - 2 splits."""
    _check_prime(p)
    if p == 2:
        raise BadPrime("the prime conditions are for p coprime to 6")
    cond_a = p % 3 == 1
    cond_b = is_cube(p, 2)
    roots = sum(1 for t in range(p) if (t ** 3 - 2) % p == 0)
    splits = roots == 3
    if splits != (cond_a and cond_b):
        raise AssertionError("t^3 - 2 splitting disagrees with the conditions")
    return PrimeCondition(cond_a, cond_b, splits)


@dataclass(frozen=True)
class PicClass:
    """A canonical coset representative in Pic0/n."""

    quotient: "PicQuotient" = field(compare=False, repr=False)
    rep: CurvePoint

    def __add__(self, other: "PicClass") -> "PicClass":
        if other.quotient is not self.quotient:
            raise ValueError("classes belong to different quotients")
        return self.quotient.class_of(group_add(self.rep, other.rep))

    def __neg__(self) -> "PicClass":
        return self.quotient.class_of(group_neg(self.rep))

    def __sub__(self, other: "PicClass") -> "PicClass":
        return self + (-other)

    @property
    def is_zero(self) -> bool:
        return self.rep == self.quotient.zero_rep


class PicQuotient:
    """Pic0(C_p)/n with every class carried by a point representative."""

    def __init__(self, p: int, n: int):
        if n not in (2, 3):
            raise ValueError("the quotient modulus must be 2 or 3")
        _check_prime(p)
        if p % 3 != 1:
            raise HypothesisFailed("the quotient lemmas need p = 1 mod 3")
        if n == 2 and not is_cube(p, 2):
            raise HypothesisFailed("the mod-2 lemma needs 2 to be a cube mod p")
        self.p = p
        self.n = n
        self.points = curve_points(p)
        multiples = {group_mul(a, n) for a in self.points}
        self.subgroup = multiples
        size, dim = len(self.points) // len(multiples), 0
        while size > 1:
            if size % n:
                raise AssertionError("quotient size is not a power of the modulus")
            size //= n
            dim += 1
        self.dim = dim
        rep_of: dict[CurvePoint, CurvePoint] = {}
        reps = []
        for a in self.points:
            if a in rep_of:
                continue
            reps.append(a)
            for g in multiples:
                rep_of[group_add(a, g)] = a
        self.reps = tuple(reps)
        self._rep_of = rep_of
        self.zero_rep = rep_of[base_point(p)]

        self._coord_of: dict[CurvePoint, tuple[int, ...]] | None = None

    def class_of(self, point: CurvePoint) -> PicClass:
        return PicClass(self, self._rep_of[point])

    @property
    def zero(self) -> PicClass:
        return PicClass(self, self.zero_rep)

    def coordinates(self, cls: PicClass) -> tuple[int, ...]:
        """F_n-coordinates of a class against a greedily chosen basis."""
        if cls.quotient is not self:
            raise ValueError("class belongs to a different quotient")
        if self._coord_of is None:
            span = {self.zero_rep: ()}
            for candidate in self.reps:
                if candidate in span:
                    continue
                grown = {}
                for rep, co in span.items():
                    acc = rep
                    for k in range(self.n):
                        grown[self._rep_of[acc]] = co + (k,)
                        acc = group_add(acc, candidate)
                span = grown
            if len(span) != self.n ** self.dim:
                raise AssertionError("coordinate table does not cover the quotient")
            self._coord_of = {rep: co + (0,) * (self.dim - len(co)) for rep, co in span.items()}
        return self._coord_of[cls.rep]


def pic_mod(p: int, n: int) -> PicQuotient:
    """The quotient Pic0(C_p)/n with dimension and point representatives."""
    return PicQuotient(p, n)
