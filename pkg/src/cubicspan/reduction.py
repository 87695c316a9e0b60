"""Rational points on the twisted Fermat families and their reduction mod p.

Two families of smooth cubic surfaces over the rationals are handled:

    x^3 + y^3 + z^3 + M z w^2 = 0        (tag "S_M")
    x^3 + y^3 + z^3 + M w^3   = 0        (tag "Sprime_M")

For a prime p dividing M (p != 3) the reduction of either surface is the
cone over the plane cubic x^3 + y^3 + z^3 = 0 with vertex (0:0:0:1).
Points reducing to the vertex are the bad locus; every other point maps
to a point of the curve by forgetting w.  Composing with the class map
of the curve and passing to Pic0/n (n = 2 for the first family, 3 for
the second) gives the reduction class of a rational point, and sums of
reduction classes over the intersection cycle of a rational line vanish.
That vanishing, the Newton-polygon bookkeeping behind its bad-reduction
case, and the resulting lower bound on the generator count are what this
module computes.

Everything is exact integer arithmetic: rational points are primitive
integer 4-tuples and p-adic valuations are taken on integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd, isqrt, prod
from typing import Iterable, Optional, Sequence

from .errors import (
    AllZero,
    BadPrime,
    BudgetExceeded,
    ConstantsUnavailable,
    EqualPoints,
    FamilyMismatch,
    NotFullyRational,
    NotPrime,
    PrimeConditionFailed,
)
from .field import is_prime
from .hsgroup import snf_with_transforms
from .planecubic import (
    CurvePoint,
    PicClass,
    PicQuotient,
    base_point,
    curve_point,
    curve_points,
    pic_mod,
    prime_condition,
)

FAMILY_S = "S_M"
FAMILY_SPRIME = "Sprime_M"

#: quotient modulus used by each family
FAMILY_MODULUS = {FAMILY_S: 2, FAMILY_SPRIME: 3}

_FAMILY_ALIASES = {
    "S": FAMILY_S,
    "S_M": FAMILY_S,
    "Sprime": FAMILY_SPRIME,
    "Sprime_M": FAMILY_SPRIME,
    "S'_M": FAMILY_SPRIME,
}

#: cap on the (2H+1)^2 outer search volume of point_search
MAX_SEARCH_HEIGHT = 1000


def family_tag(name: str) -> str:
    try:
        return _FAMILY_ALIASES[name]
    except KeyError:
        raise FamilyMismatch(f"unknown family {name!r}") from None


def form_value(family: str, m: int, coords: Sequence[int]) -> int:
    """Exact integer value of the family's defining form."""
    x, y, z, w = coords
    if family_tag(family) == FAMILY_S:
        return x ** 3 + y ** 3 + z ** 3 + m * z * w * w
    return x ** 3 + y ** 3 + z ** 3 + m * w ** 3


@dataclass(frozen=True)
class SurfacePoint:
    """A primitive integer point of S_M or Sprime_M, sign-canonical."""

    family: str
    m: int
    coords: tuple[int, int, int, int]


def surface_point(family: str, m: int, coords: Iterable[int]) -> SurfacePoint:
    family = family_tag(family)
    c = [int(x) for x in coords]
    if len(c) != 4 or not any(c):
        raise ValueError("expected four integers, not all zero")
    g = gcd(gcd(c[0], c[1]), gcd(c[2], c[3]))
    c = [x // g for x in c]
    if next(x for x in c if x) < 0:
        c = [-x for x in c]
    if form_value(family, m, c) != 0:
        raise ValueError(f"{tuple(c)} is not on the surface")
    return SurfacePoint(family, m, (c[0], c[1], c[2], c[3]))


def base_surface_point(family: str, m: int) -> SurfacePoint:
    """The rational point (1 : -1 : 0 : 0), on both families."""
    return surface_point(family, m, (1, -1, 0, 0))


def _check_reduction_prime(m: int, p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 3:
        raise BadPrime("reduction mod 3 hits the singular fibre")
    if m % p:
        raise BadPrime(f"{p} does not divide M = {m}")


@dataclass(frozen=True)
class Reduction:
    """Reduction of a surface point mod p: a curve point, or the vertex."""

    p: int
    point: Optional[CurvePoint]

    @property
    def bad(self) -> bool:
        return self.point is None


def reduce_to_curve(point: SurfacePoint, p: int) -> Reduction:
    """Reduce mod p | M onto the cone's base curve; the vertex is bad.

    On the w-cubed family the vertex cannot occur: primitivity would
    force p^2 | M there, so hitting it means the inputs were invalid.
    """
    _check_reduction_prime(point.m, p)
    x, y, z, w = point.coords
    if x % p == 0 and y % p == 0 and z % p == 0:
        if point.family == FAMILY_SPRIME:
            if point.m % (p * p):
                raise AssertionError(
                    "vertex reduction on the w-cubed family with M squarefree at p"
                )
            raise BadPrime(f"M = {point.m} is not squarefree at {p}")
        return Reduction(p, None)
    return Reduction(p, curve_point(p, (x, y, z)))


@lru_cache(maxsize=None)
def _quotient(p: int, n: int) -> PicQuotient:
    return pic_mod(p, n)


def _family_modulus(family: str, n: Optional[int]) -> int:
    expected = FAMILY_MODULUS[family_tag(family)]
    if n is not None and n != expected:
        raise FamilyMismatch(
            f"family {family} pairs with the quotient mod {expected}, not {n}"
        )
    return expected


def reduction_class(point: SurfacePoint, p: int, n: Optional[int] = None) -> PicClass:
    """The class of the reduction minus the base flex in Pic0/n.

    The bad locus maps to the zero class, extending the good-reduction
    map continuously.
    """
    n = _family_modulus(point.family, n)
    quotient = _quotient(p, n)
    red = reduce_to_curve(point, p)
    return quotient.class_of(red.point if red.point is not None else base_point(p))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class GoodLineParam:
    """A basis (u, v) of the saturated integer lattice of a rational line.

    Saturation means the 2x2 minors of the stacked matrix are globally
    coprime, so the basis stays independent after reduction mod every
    prime and every rational point of the line is an integer combination
    with coprime coefficients.
    """

    u: tuple[int, int, int, int]
    v: tuple[int, int, int, int]


def _primitive4(coords: Iterable[int]) -> tuple[int, ...]:
    c = [int(x) for x in coords]
    if len(c) != 4 or not any(c):
        raise ValueError("expected four integers, not all zero")
    g = gcd(gcd(c[0], c[1]), gcd(c[2], c[3]))
    c = [x // g for x in c]
    if next(x for x in c if x) < 0:
        c = [-x for x in c]
    return tuple(c)


def _minors2(u: Sequence[int], v: Sequence[int]) -> list[int]:
    return [u[i] * v[j] - u[j] * v[i] for i, j in combinations(range(4), 2)]


def _hnf_pair(r0: Sequence[int], r1: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a = list(r0)
    b = list(r1)
    j0 = next(j for j in range(4) if a[j] or b[j])
    g, s, t = _xgcd(a[j0], b[j0])
    new_a = [s * x + t * y for x, y in zip(a, b)]
    new_b = [(a[j0] // g) * y - (b[j0] // g) * x for x, y in zip(a, b)]
    a, b = new_a, new_b
    j1 = next(j for j in range(4) if b[j])
    if b[j1] < 0:
        b = [-x for x in b]
    q = a[j1] // b[j1]
    a = [x - q * y for x, y in zip(a, b)]
    return tuple(a), tuple(b)


def good_parametrization(p_coords: Iterable[int], q_coords: Iterable[int]) -> GoodLineParam:
    """Saturated integer basis for the line through two rational points.

    The stacked 2x4 matrix is put in Smith form; dividing out the two
    elementary divisors leaves the saturation, which is then Hermite
    reduced for a deterministic basis.
    """
    pu = _primitive4(p_coords)
    qu = _primitive4(q_coords)
    if pu == qu:
        raise EqualPoints("the two points coincide projectively")
    _, _, d, _, vinv = snf_with_transforms([list(pu), list(qu)])
    if d[1][1] == 0:
        raise EqualPoints("the two points coincide projectively")
    u, v = _hnf_pair(vinv[0], vinv[1])
    minors = _minors2(u, v)
    g = 0
    for x in minors:
        g = gcd(g, x)
    if g != 1:
        raise AssertionError("saturation failed: basis minors share a factor")
    return GoodLineParam(u, v)


def line_coordinates(param: GoodLineParam, coords: Iterable[int]) -> tuple[Fraction, Fraction]:
    """Coefficients (lam, mu) with lam*u + mu*v equal to the given point."""
    target = _primitive4(coords)
    u, v = param.u, param.v
    i, j = next(
        (i, j) for i, j in combinations(range(4), 2) if u[i] * v[j] - u[j] * v[i]
    )
    det = u[i] * v[j] - u[j] * v[i]
    lam = Fraction(target[i] * v[j] - target[j] * v[i], det)
    mu = Fraction(u[i] * target[j] - u[j] * target[i], det)
    for k in range(4):
        if lam * u[k] + mu * v[k] != target[k]:
            raise ValueError(f"{target} does not lie on the line")
    return lam, mu


def _restriction_coeffs(
    family: str, m: int, u: Sequence[int], v: Sequence[int]
) -> tuple[int, int, int, int]:
    """Coefficients of F(s*u + t*v) as a binary cubic in (s, t)."""
    c = [0, 0, 0, 0]
    for i in range(3):
        a, b = u[i], v[i]
        c[0] += a ** 3
        c[1] += 3 * a * a * b
        c[2] += 3 * a * b * b
        c[3] += b ** 3
    if family_tag(family) == FAMILY_S:
        a, b = u[2], v[2]
        e, f = u[3], v[3]
        c[0] += m * a * e * e
        c[1] += m * (b * e * e + 2 * a * e * f)
        c[2] += m * (2 * b * e * f + a * f * f)
        c[3] += m * b * f * f
    else:
        e, f = u[3], v[3]
        c[0] += m * e ** 3
        c[1] += 3 * m * e * e * f
        c[2] += 3 * m * e * f * f
        c[3] += m * f ** 3
    return c[0], c[1], c[2], c[3]


def _divisors(x: int) -> list[int]:
    """Positive divisors of x, ascending, via trial-division factoring.

    Dividing out each prime as it is found keeps the trial bound at the
    square root of the unfactored part, which matters here because the
    restriction coefficients reach 10^11 on tall lines.
    """
    n = abs(x)
    factors: list[tuple[int, int]] = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            factors.append((p, e))
    f = 5
    step = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            factors.append((f, e))
        f += step
        step = 6 - step
    if n > 1:
        factors.append((n, 1))
    divs = [1]
    for p, e in factors:
        block = divs
        divs = []
        power = 1
        for _ in range(e + 1):
            divs.extend(d * power for d in block)
            power *= p
    return sorted(divs)


def _divide_primitive_root(poly: Sequence[int], a: int, b: int) -> list[int]:
    """Exact division of an integer polynomial by (b*x - a), lowest-first.

    Valid only when a/b is a root in lowest terms; every quotient step
    then lands on an integer by the rational root theorem.
    """
    rev = list(poly[::-1])
    out = [rev[0] // b]
    for coef in rev[1:-1]:
        out.append((coef + a * out[-1]) // b)
    if rev[-1] + a * out[-1] != 0:
        raise AssertionError("dividing by a non-root")
    return out[::-1]


# Sieve moduli for the rational root scan.  Any rational root a/b of the
# primitive restriction polynomial reduces to a root mod q whenever q does
# not divide b, so candidate pairs failing that test mod both primes can be
# discarded without an exact evaluation.
_FILTER_PRIMES = (101, 103)


def _quadratic_pair(p0: int, p1: int, p2: int) -> Optional[list[tuple[int, int]]]:
    """Both rational roots of p0 + p1*tau + p2*tau^2 as primitive (s, t)
    pairs in ascending tau, or None when the conjugate pair is irrational."""
    disc = p1 * p1 - 4 * p0 * p2
    if disc < 0:
        return None
    r = isqrt(disc)
    if r * r != disc:
        return None
    lo = Fraction(-p1 - r, 2 * p2)
    hi = Fraction(-p1 + r, 2 * p2)
    if hi < lo:
        lo, hi = hi, lo
    return [(lo.denominator, lo.numerator), (hi.denominator, hi.numerator)]


def _smallest_cubic_root(c: Sequence[int]) -> Optional[tuple[int, int]]:
    """The rational root a/b of the primitive cubic c[0] + c[1]*tau +
    c[2]*tau^2 + c[3]*tau^3 with smallest tau, or None.

    a runs over signed divisors of c[0] and b over divisors of c[3]; the
    full cross product is far too large to sort on tall lines, so pairs
    are generated bucketed by the residue of a mod the first sieve prime
    and only those matching a polynomial root survive to the second sieve
    and the exact check.
    """
    tables = []
    for q in _FILTER_PRIMES:
        cq = [x % q for x in c]
        residue_roots = []
        for t in range(q):
            acc = 0
            for x in reversed(cq):
                acc = (acc * t + x) % q
            if acc == 0:
                residue_roots.append(t)
        tables.append((q, residue_roots))
    q1, roots1 = tables[0]
    q2, roots2 = tables[1]
    signed: list[int] = []
    for a in _divisors(c[0]):
        signed.append(a)
        signed.append(-a)
    buckets: dict[int, list[int]] = {}
    for a in signed:
        buckets.setdefault(a % q1, []).append(a)
    survivors: list[tuple[int, int]] = []
    for b in _divisors(c[-1]):
        b1 = b % q1
        if b1:
            pool: list[int] = []
            for t in roots1:
                pool.extend(buckets.get(t * b1 % q1, ()))
        else:
            # q1 divides b, so the root reduces to tau = infinity mod q1
            # and the sieve carries no information for this denominator.
            pool = signed
        b2 = b % q2
        if b2:
            allowed = {t * b2 % q2 for t in roots2}
            pool = [a for a in pool if a % q2 in allowed]
        survivors.extend((a, b) for a in pool if gcd(a, b) == 1)
    survivors.sort(key=lambda st: Fraction(st[0], st[1]))
    for a, b in survivors:
        if sum(x * a ** k * b ** (3 - k) for k, x in enumerate(c)) == 0:
            return a, b
    return None


def _binary_cubic_roots(coeffs: Sequence[int]) -> list[tuple[int, int]]:
    """Projective rational roots, with multiplicity, of a binary cubic.

    Roots are primitive pairs (s, t); the full multiplicity 3 must be
    rational or NotFullyRational is raised.
    """
    g = 0
    for x in coeffs:
        g = gcd(g, x)
    c = [x // g for x in coeffs]
    roots: list[tuple[int, int]] = []
    while len(c) > 1 and c[0] == 0:
        roots.append((1, 0))
        c = c[1:]
    trailing = 0
    while len(c) > 1 and c[-1] == 0:
        trailing += 1
        c = c[:-1]
    # c is now a dense polynomial in tau = t/s with nonzero ends, and it
    # inherits primitivity from the content division above.  Roots are
    # appended in ascending tau; any root of the quadratic cofactor is at
    # least the smallest root of the cubic, so the order survives the
    # split below.
    middle: list[tuple[int, int]] = []
    if len(c) == 2:
        tau = Fraction(-c[0], c[1])
        middle.append((tau.denominator, tau.numerator))
    elif len(c) == 3:
        pair = _quadratic_pair(c[0], c[1], c[2])
        if pair is not None:
            middle.extend(pair)
    elif len(c) == 4:
        first = _smallest_cubic_root(c)
        if first is not None:
            a, b = first
            middle.append((b, a))
            cofactor = _divide_primitive_root(c, a, b)
            pair = _quadratic_pair(cofactor[0], cofactor[1], cofactor[2])
            if pair is not None:
                middle.extend(pair)
    roots.extend(middle)
    roots.extend([(0, 1)] * trailing)
    if len(roots) != 3:
        raise NotFullyRational(
            f"only {len(roots)} of 3 intersection points are rational"
        )
    return roots


def line_cycle(param: GoodLineParam, family: str, m: int) -> tuple[SurfacePoint, ...]:
    """The three rational surface points cut out by the line, repetition
    marking multiplicity."""
    coeffs = _restriction_coeffs(family, m, param.u, param.v)
    if not any(coeffs):
        raise ValueError("the line lies on the surface; its cycle is undefined")
    pts = []
    for s0, t0 in _binary_cubic_roots(coeffs):
        coords = [s0 * x + t0 * y for x, y in zip(param.u, param.v)]
        pts.append(surface_point(family, m, coords))
    return tuple(pts)


def _ord_p(value, p: int) -> int:
    frac = Fraction(value)
    num, den = frac.numerator, frac.denominator
    k = 0
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull of (i, ord_p(a_i)) for a polynomial a_0 + ... + a_d t^d.

    Roots counted by the polygon have valuation equal to minus the
    segment slope, with multiplicity the horizontal length; roots at
    infinity from vanishing leading coefficients are not counted.
    """

    p: int
    points: tuple[tuple[int, int], ...]
    vertices: tuple[tuple[int, int], ...]
    segments: tuple[tuple[Fraction, int], ...]
    root_valuations: tuple[Fraction, ...]

    @property
    def positive_slope_segments(self) -> int:
        return sum(1 for slope, _ in self.segments if slope > 0)


def newton_polygon(coeffs: Sequence, p: int) -> NewtonPolygon:
    """Lower convex hull of the coefficient valuations."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    pts = [(i, _ord_p(c, p)) for i, c in enumerate(coeffs) if c != 0]
    if not pts:
        raise AllZero("every coefficient vanishes")
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (pt[1] - y0) - (y1 - y0) * (pt[0] - x0) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    segments = []
    valuations: list[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = Fraction(y1 - y0, x1 - x0)
        segments.append((slope, x1 - x0))
        valuations.extend([-slope] * (x1 - x0))
    return NewtonPolygon(
        p=p,
        points=tuple(pts),
        vertices=tuple(hull),
        segments=tuple(segments),
        root_valuations=tuple(valuations),
    )


def _vertex_basis(param: GoodLineParam, p: int) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Rebase (u, v) so u has last coordinate 0 and v reduces to the vertex.

    Only valid when the reduced line passes through the cone vertex,
    which holds whenever the reduction is contained in the cone.
    """
    u, v = param.u, param.v
    d, a, b = _xgcd(u[3], v[3])
    if d == 0 or d % p == 0:
        raise AssertionError("the reduced line misses the vertex")
    uu = [(v[3] // d) * x - (u[3] // d) * y for x, y in zip(u, v)]
    vv = [a * x + b * y for x, y in zip(u, v)]
    i = next(i for i in range(3) if uu[i] % p)
    k = (-vv[i] * pow(uu[i], -1, p)) % p
    vv = [x + k * y for x, y in zip(vv, uu)]
    if any(x % p for x in vv[:3]):
        raise AssertionError("the reduced line misses the vertex")
    return tuple(uu), tuple(vv), d


@dataclass(frozen=True)
class LineRelationReport:
    """Outcome of the reduction-class sum over one rational line cycle."""

    family: str
    m: int
    p: int
    modulus: int
    points: tuple[SurfacePoint, ...]
    relation_holds: bool
    reduction_contained: bool
    branch: str
    newton: Optional[NewtonPolygon]
    alpha2: Optional[int]
    z_coord_unit: Optional[bool]


def verify_line_relation(
    param: GoodLineParam, family: str, m: int, p: int, n: Optional[int] = None
) -> LineRelationReport:
    """Check that the three reduction classes of a line cycle sum to zero.

    The report also says which case applied: a transverse reduction,
    where the reduced line meets the cone properly, or a contained one,
    where the Newton polygon of the restricted form governs the split
    into one bad and two good points (coefficient valuation exactly 1 in
    degree 2 when the z-coordinate of the rebased basis is a unit).
    """
    family = family_tag(family)
    n = _family_modulus(family, n)
    _check_reduction_prime(m, p)
    cycle = line_cycle(param, family, m)
    total = None
    for pt in cycle:
        cls = reduction_class(pt, p, n)
        total = cls if total is None else total + cls
    coeffs = _restriction_coeffs(family, m, param.u, param.v)
    contained = all(c % p == 0 for c in coeffs)
    newton = None
    alpha2 = None
    z_unit = None
    if contained:
        uu, vv, _ = _vertex_basis(param, p)
        # keep the degree-3 term alive so the polygon sees every root
        tries = 0
        while form_value(family, m, vv) == 0:
            vv = tuple(x + p * y for x, y in zip(vv, uu))
            tries += 1
            if tries > 3:
                raise AssertionError("could not move v off the surface")
        a = _restriction_coeffs(family, m, uu, vv)
        z_unit = uu[2] % p != 0
        if any(a):
            newton = newton_polygon(a, p)
            alpha2 = _ord_p(a[2], p) if a[2] else None
    return LineRelationReport(
        family=family,
        m=m,
        p=p,
        modulus=n,
        points=cycle,
        relation_holds=total.is_zero,
        reduction_contained=contained,
        branch="contained" if contained else "transverse",
        newton=newton,
        alpha2=alpha2,
        z_coord_unit=z_unit,
    )


def point_search(family: str, m: int, height: int) -> list[SurfacePoint]:
    """All primitive points with coordinates bounded by the height.

    Meet-in-the-middle on x^3 + y^3: the (z, w) side determines the
    required cube sum, looked up in a table of all bounded pairs.
    Output is projectively deduplicated and lexicographically sorted.
    """
    family = family_tag(family)
    if height < 1:
        raise ValueError("height must be positive")
    if height > MAX_SEARCH_HEIGHT:
        raise BudgetExceeded(
            f"height {height} exceeds the search cap {MAX_SEARCH_HEIGHT}"
        )
    h = height
    cube = {i: i ** 3 for i in range(-h, h + 1)}
    pair_sums: dict[int, list[tuple[int, int]]] = {}
    for x in range(-h, h + 1):
        cx = cube[x]
        for y in range(x, h + 1):
            pair_sums.setdefault(cx + cube[y], []).append((x, y))
    bound = 2 * h ** 3
    seen = set()
    is_s = family == FAMILY_S
    for z in range(-h, h + 1):
        cz = cube[z]
        for w in range(-h, h + 1):
            tail = cz + (m * z * w * w if is_s else m * cube[w])
            k = -tail
            if k < -bound or k > bound:
                continue
            for x, y in pair_sums.get(k, ()):
                for c in ((x, y, z, w), (y, x, z, w)):
                    if not any(c):
                        continue
                    g = gcd(gcd(c[0], c[1]), gcd(c[2], c[3]))
                    if g != 1:
                        continue
                    if next(v for v in c if v) < 0:
                        c = tuple(-v for v in c)
                    seen.add(c)
    return [SurfacePoint(family, m, c) for c in sorted(seen)]


@dataclass(frozen=True)
class ReductionCoverage:
    """How much of the base curve bounded-height points reach."""

    p: int
    hit: int
    total: int
    missed: tuple[CurvePoint, ...]

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.hit, self.total)


def reduction_coverage(points: Iterable[SurfacePoint], p: int) -> ReductionCoverage:
    """Residue-level shadow of surjectivity onto the curve's points."""
    hit: set[CurvePoint] = set()
    for pt in points:
        red = reduce_to_curve(pt, p)
        if red.point is not None:
            hit.add(red.point)
    everything = curve_points(p)
    missed = tuple(a for a in everything if a not in hit)
    return ReductionCoverage(p=p, hit=len(hit), total=len(everything), missed=missed)


def _fn_rank(rows: list[list[int]], n: int) -> int:
    rows = [[x % n for x in row] for row in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, n)
        rows[r] = [(x * inv) % n for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % n for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
        if r == len(rows):
            break
    return rank


@dataclass(frozen=True)
class RankBoundReport:
    """Achieved dimension of the generated subgroup versus the target 2s."""

    family: str
    m: int
    primes: tuple[int, ...]
    modulus: int
    achieved_dim: int
    target_dim: int
    points_used: int


def rank_lower_bound(
    family: str, primes: Sequence[int], points: Sequence[SurfacePoint]
) -> RankBoundReport:
    """Dimension of the subgroup of the product of Pic0/n quotients
    generated by point images, relative to the base point (1:-1:0:0).

    The target 2s comes from each factor having dimension exactly 2
    under the prime conditions; the achieved value never exceeds it
    since surjectivity is a statement about all rational points, not a
    bounded search.
    """
    family = family_tag(family)
    n = FAMILY_MODULUS[family]
    primes = tuple(primes)
    if not primes:
        raise ValueError("need at least one prime")
    for p in primes:
        if not is_prime(p) or p == 3:
            raise NotPrime(f"{p} is not an admissible prime")
        cond = prime_condition(p)
        if family == FAMILY_S:
            if not (cond.one_mod_three and cond.two_is_cube):
                raise PrimeConditionFailed(
                    f"{p} fails the congruence or cube condition for {family}"
                )
        else:
            if not cond.one_mod_three:
                raise PrimeConditionFailed(f"{p} is not 1 mod 3")
    m = prod(primes) if family == FAMILY_S else 3 * prod(primes)
    quotients = [_quotient(p, n) for p in primes]
    base = base_surface_point(family, m)
    base_vec: list[int] = []
    for p, q in zip(primes, quotients):
        base_vec.extend(q.coordinates(reduction_class(base, p, n)))
    rows = []
    for pt in points:
        if pt.family != family or pt.m != m:
            raise FamilyMismatch(f"{pt} is not a point of {family} with M = {m}")
        vec: list[int] = []
        for p, q in zip(primes, quotients):
            vec.extend(q.coordinates(reduction_class(pt, p, n)))
        rows.append([(a - b) % n for a, b in zip(vec, base_vec)])
    target = sum(q.dim for q in quotients)
    achieved = _fn_rank(rows, n) if rows else 0
    if achieved > target:
        raise AssertionError("achieved dimension exceeded the ambient dimension")
    return RankBoundReport(
        family=family,
        m=m,
        primes=primes,
        modulus=n,
        achieved_dim=achieved,
        target_dim=target,
        points_used=len(rows),
    )


def _quadric_values(m: int, p: int, pt: Sequence[int]) -> tuple[int, int]:
    x, y, z, w, t = pt
    q1 = (x * x - x * y + y * y + z * t) % p
    q2 = (z * z + m * w * w - x * t - y * t) % p
    return q1, q2


def line_on_del_pezzo(m: int, p: int, points: Iterable[Sequence[int]]) -> bool:
    """Whether every listed point satisfies both quadrics of the degree-4
    model x^2 - x y + y^2 + z t = 0, z^2 + M w^2 - x t - y t = 0."""
    return all(_quadric_values(m, p, pt) == (0, 0) for pt in points)


@dataclass(frozen=True)
class DelPezzoLineReport:
    """Containment checks for the two line-orbit representatives."""

    m: int
    p: int
    zeta: int
    sqrt_minus_m: int
    theta: int
    first_orbit_contained: bool
    first_orbit_conjugate_contained: bool
    second_orbit_contained: bool

    @property
    def all_contained(self) -> bool:
        return (
            self.first_orbit_contained
            and self.first_orbit_conjugate_contained
            and self.second_orbit_contained
        )


def _first_orbit_points(p: int, zeta: int, s: int) -> list[tuple[int, int, int, int, int]]:
    pts = []
    for lam, mu in [(1, k) for k in range(p)] + [(0, 1)]:
        pts.append(((-zeta * lam) % p, lam % p, (-s * mu) % p, mu % p, 0))
    return pts


def _second_orbit_points(
    p: int, zeta: int, s: int, theta: int
) -> list[tuple[int, int, int, int, int]]:
    inv3t2 = pow(3 * theta * theta % p, -1, p)
    pts = []
    for z, w in [(1, k) for k in range(p)] + [(0, 1)]:
        t = theta * (z - s * w) % p
        x = (-((2 * zeta - 2) * theta * z + (zeta + 2) * t) * inv3t2) % p
        y = (-((-2 * zeta - 4) * theta * z + (-zeta + 1) * t) * inv3t2) % p
        pts.append((x, y, z % p, w % p, t))
    return pts


def _find_constants(m: int, p: int) -> tuple[int, int, int]:
    missing = []
    zeta = next((z for z in range(2, p) if (z * z + z + 1) % p == 0), None)
    if zeta is None:
        missing.append("a primitive cube root of unity")
    s = next((r for r in range(p) if (r * r + m) % p == 0), None)
    if s is None:
        missing.append(f"a square root of -{m}")
    theta = next((r for r in range(p) if (r ** 3 - 2) % p == 0), None)
    if theta is None:
        missing.append("a cube root of 2")
    if missing:
        raise ConstantsUnavailable(f"F_{p} lacks " + " and ".join(missing))
    return zeta, s, theta


def del_pezzo_line_check(m: int, p: int) -> DelPezzoLineReport:
    """Instantiate both line-orbit representatives over F_p and verify
    containment in the degree-4 del Pezzo model pointwise."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 3 or p == 2:
        raise BadPrime("the model needs p coprime to 6")
    if m % p == 0:
        raise ConstantsUnavailable(
            f"the square root of -M degenerates to zero for p = {p} dividing M"
        )
    zeta, s, theta = _find_constants(m, p)
    first = line_on_del_pezzo(m, p, _first_orbit_points(p, zeta, s))
    conj = line_on_del_pezzo(m, p, _first_orbit_points(p, zeta * zeta % p, s))
    second = line_on_del_pezzo(m, p, _second_orbit_points(p, zeta, s, theta))
    return DelPezzoLineReport(
        m=m,
        p=p,
        zeta=zeta,
        sqrt_minus_m=s,
        theta=theta,
        first_orbit_contained=first,
        first_orbit_conjugate_contained=conj,
        second_orbit_contained=second,
    )


def find_del_pezzo_prime(m: int, limit: int = 500) -> int:
    """Smallest prime over which all three constants exist."""
    for p in range(5, limit + 1):
        if not is_prime(p) or p == 3 or m % p == 0:
            continue
        try:
            _find_constants(m, p)
        except ConstantsUnavailable:
            continue
        return p
    raise ConstantsUnavailable(f"no admissible prime up to {limit}")
