"""Cubic surfaces in P^3: lines, tangency, point types, the Gauss map.

A surface is a nonzero homogeneous cubic form in four variables with
coefficients either in a finite field (codes, see field.py) or in the
integers (for the two named rational families).  All geometric routines
work over finite fields; the integer domain supports evaluation,
gradients and restriction, which is what the reduction machinery needs.

Enumeration of lines on a surface does not walk all of the roughly q^4
candidate matrices.  Each canonical row pattern is scanned through the
zero sets of the restrictions of the form to coordinate planes, so only
row pairs whose basis points already lie on the surface are tested for
full containment.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

from .errors import (
    BudgetExceeded,
    IdenticallyZero,
    LineNotOnSurface,
    PointNotOnSurface,
    SingularPoint,
)
from .field import (
    ExtField,
    embedding,
    field_from_dict,
    make_extension,
    roots_of_cubic,
    solve_quadratic,
)
from .projgeo import (
    Line3,
    Plane3,
    ProjPoint,
    line_through,
    lines_in_plane_through,
    normalize,
)

#: exponent vectors of the 20 degree-3 monomials, descending
MONOMIALS = tuple(
    sorted(
        (
            (e0, e1, e2, 3 - e0 - e1 - e2)
            for e0 in range(4)
            for e1 in range(4 - e0)
            for e2 in range(4 - e0 - e1)
        ),
        reverse=True,
    )
)

_UNIT = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))

#: largest q*q allowed for a single zero-set scan during line enumeration
LINE_SCAN_BUDGET = 1 << 22


def _ops(field: Optional[ExtField]):
    if field is None:
        return operator.add, operator.mul
    return field.add, field.mul


def _mono_indices(mono: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for i, e in enumerate(mono):
        out.extend([i] * e)
    return tuple(out)


def _dict_terms(poly: dict) -> list[tuple[object, tuple[int, ...]]]:
    return [(c, _mono_indices(mono)) for mono, c in poly.items()]


def _substitute_linear(field, terms, vectors):
    """Expand a form under x_i = sum_j y_j * vectors[j][i].

    terms is a list of (coefficient, variable-index tuple) pairs; the result
    is a dict over exponent tuples in the len(vectors) new variables.
    """
    add, mul = _ops(field)
    m = len(vectors)
    zero_key = (0,) * m
    out: dict = {}
    for coeff, idxs in terms:
        poly = {zero_key: coeff}
        for i in idxs:
            lin = [(j, vec[i]) for j, vec in enumerate(vectors) if vec[i]]
            if not lin:
                poly = None
                break
            new: dict = {}
            for mono, c in poly.items():
                for j, w in lin:
                    key = mono[:j] + (mono[j] + 1,) + mono[j + 1 :]
                    val = c if w == 1 else mul(c, w)
                    prev = new.get(key)
                    new[key] = val if prev is None else add(prev, val)
            poly = new
        if not poly:
            continue
        for mono, c in poly.items():
            if c:
                prev = out.get(mono)
                out[mono] = c if prev is None else add(prev, c)
    return {k: v for k, v in out.items() if v}


class CubicForm:
    """Homogeneous cubic in x0..x3 over a finite field or the integers."""

    __slots__ = ("field", "coeffs", "_terms", "_partial_terms")

    def __init__(self, field: Optional[ExtField], coeffs: dict):
        clean: dict = {}
        for mono, c in coeffs.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != 4 or any(e < 0 for e in mono) or sum(mono) != 3:
                raise ValueError(f"not a degree-3 exponent vector: {mono}")
            if field is not None:
                c = int(c)
                if not 0 <= c < field.q:
                    raise ValueError(f"coefficient {c} is not a code in GF({field.q})")
            if c:
                clean[mono] = c
        if not clean:
            raise IdenticallyZero("the zero form does not define a surface")
        self.field = field
        self.coeffs = clean
        self._terms = [(c, _mono_indices(mono)) for mono, c in sorted(clean.items(), reverse=True)]
        self._partial_terms = None

    # -- construction and serialization ---------------------------------

    @classmethod
    def from_family(cls, family: str, m: int) -> "CubicForm":
        """The integer surface x^3+y^3+z^3+M*z*w^2 ("S_M") or +M*w^3 ("S'_M")."""
        base = {(3, 0, 0, 0): 1, (0, 3, 0, 0): 1, (0, 0, 3, 0): 1}
        if family == "S_M":
            base[(0, 0, 1, 2)] = int(m)
        elif family == "S'_M":
            base[(0, 0, 0, 3)] = int(m)
        else:
            raise ValueError(f"unknown family {family!r}")
        return cls(None, base)

    @classmethod
    def from_dict(cls, data: dict) -> "CubicForm":
        if "family" in data:
            form = cls.from_family(data["family"], data["M"])
            if data.get("field"):
                form = form.reduce_mod(field_from_dict(data["field"]))
            return form
        fld = field_from_dict(data["field"]) if data.get("field") else None
        coeffs = {tuple(int(ch) for ch in key): v for key, v in data["coeffs"].items()}
        return cls(fld, coeffs)

    def to_dict(self) -> dict:
        coeffs = {"".join(map(str, mono)): c for mono, c in sorted(self.coeffs.items(), reverse=True)}
        return {
            "field": self.field.to_dict() if self.field is not None else None,
            "coeffs": coeffs,
        }

    def reduce_mod(self, field: ExtField) -> "CubicForm":
        """Reduce integer coefficients into the prime subfield of a finite field."""
        if self.field is not None:
            raise TypeError("only integer forms can be reduced")
        return CubicForm(field, {m: c % field.p for m, c in self.coeffs.items()})

    def embed(self, ext: ExtField) -> "CubicForm":
        """The same surface with coefficients pushed into an extension field."""
        if ext is self.field:
            return self
        emb = embedding(self.field, ext)
        return CubicForm(ext, {m: emb(c) for m, c in self.coeffs.items()})

    # -- evaluation ------------------------------------------------------

    def evaluate(self, coords: Sequence[int]):
        f = self.field
        if f is None:
            total = 0
            for c, idxs in self._terms:
                t = c
                for i in idxs:
                    t *= coords[i]
                    if t == 0:
                        break
                total += t
            return total
        add, mul = f.add, f.mul
        total = 0
        for c, idxs in self._terms:
            t = c
            for i in idxs:
                x = coords[i]
                if x == 0:
                    t = 0
                    break
                if x != 1:
                    t = mul(t, x)
            if t:
                total = add(total, t)
        return total

    def _partials(self):
        if self._partial_terms is None:
            parts = []
            p = self.field.p if self.field is not None else 0
            for i in range(4):
                terms = []
                for mono, c in sorted(self.coeffs.items(), reverse=True):
                    e = mono[i]
                    if not e:
                        continue
                    if self.field is not None:
                        scaled = self.field.mul(e % p, c)
                    else:
                        scaled = e * c
                    if scaled:
                        derived = list(mono)
                        derived[i] -= 1
                        terms.append((scaled, _mono_indices(derived)))
                parts.append(terms)
            self._partial_terms = parts
        return self._partial_terms

    def gradient(self, coords: Sequence[int]) -> tuple:
        """The four formal partial derivatives evaluated at a point."""
        f = self.field
        out = []
        for terms in self._partials():
            if f is None:
                total = 0
                for c, idxs in terms:
                    t = c
                    for i in idxs:
                        t *= coords[i]
                        if t == 0:
                            break
                    total += t
            else:
                add, mul = f.add, f.mul
                total = 0
                for c, idxs in terms:
                    t = c
                    for i in idxs:
                        x = coords[i]
                        if x == 0:
                            t = 0
                            break
                        if x != 1:
                            t = mul(t, x)
                    if t:
                        total = add(total, t)
            out.append(total)
        return tuple(out)

    # -- restriction -----------------------------------------------------

    def restrict_to_line(self, u: Sequence[int], v: Sequence[int]) -> tuple:
        """Coefficients (c0..c3) of F(s*u + t*v), with c_i on s^(3-i) t^i."""
        sub = _substitute_linear(self.field, self._terms, (tuple(u), tuple(v)))
        return tuple(sub.get((3 - i, i), 0) for i in range(4))

    def partial_on_line(self, i: int, u: Sequence[int], v: Sequence[int]) -> tuple:
        """The i-th partial restricted to s*u + t*v, as (A, B, C) on s^2, st, t^2."""
        sub = _substitute_linear(self.field, self._partials()[i], (tuple(u), tuple(v)))
        return tuple(sub.get((2 - j, j), 0) for j in range(3))

    def restrict_to_plane(self, basis: Sequence[Sequence[int]]) -> dict:
        """Ternary cubic of the surface pulled back along three spanning vectors."""
        return _substitute_linear(self.field, self._terms, tuple(tuple(b) for b in basis))

    def __eq__(self, other):
        return (
            isinstance(other, CubicForm)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        inside = "ZZ" if self.field is None else f"GF({self.field.q})"
        return f"CubicForm({inside}, {len(self.coeffs)} terms)"


def fermat_cubic(field: ExtField) -> CubicForm:
    """x0^3 + x1^3 + x2^3 + x3^3, smooth whenever the characteristic is not 3."""
    return CubicForm(field, {(3, 0, 0, 0): 1, (0, 3, 0, 0): 1, (0, 0, 3, 0): 1, (0, 0, 0, 3): 1})


def surface_with_27_lines_over_f64() -> CubicForm:
    """A smooth cubic surface over F_2 whose 27 lines all split over F_64.

    Its Eckardt geometry is extreme for characteristic 2: thirteen Eckardt
    points in total, three of the lines carrying five apiece.
    """
    f2 = make_extension(2, 1)
    return CubicForm(
        f2,
        {
            (2, 0, 1, 0): 1,
            (2, 0, 0, 1): 1,
            (1, 2, 0, 0): 1,
            (1, 1, 1, 0): 1,
            (1, 0, 0, 2): 1,
            (0, 2, 1, 0): 1,
            (0, 1, 2, 0): 1,
        },
    )


# -- fast zero-set scans ------------------------------------------------


def _scan_pair_zeros(form: CubicForm, base, u, v) -> Iterator[tuple[int, int]]:
    """(a, b) with F(base + a*u + b*v) = 0, in code order with b fastest."""
    f = form.field
    add, mul = f.add, f.mul
    tern = form.restrict_to_plane((base, u, v))
    biv: dict = {}
    for (e0, e1, e2), c in tern.items():
        key = (e1, e2)
        prev = biv.get(key)
        biv[key] = c if prev is None else add(prev, c)
    items = [(k, c) for k, c in biv.items() if c]
    q = f.q
    for a in range(q):
        a2 = mul(a, a)
        pw = (1, a, a2, mul(a2, a))
        cb = [0, 0, 0, 0]
        for (e1, e2), c in items:
            p = pw[e1]
            if p:
                cb[e2] = add(cb[e2], c if p == 1 else mul(c, p))
        c0, c1, c2, c3 = cb
        if not (c1 or c2 or c3):
            if c0 == 0:
                for b in range(q):
                    yield (a, b)
            continue
        for b in range(q):
            acc = add(mul(add(mul(add(mul(c3, b), c2), b), c1), b), c0)
            if acc == 0:
                yield (a, b)


def _scan_line_zeros(form: CubicForm, u, v) -> Iterator[int]:
    """t with F(u + t*v) = 0, ascending by code."""
    f = form.field
    add, mul = f.add, f.mul
    c0, c1, c2, c3 = form.restrict_to_line(u, v)
    for t in range(f.q):
        if add(mul(add(mul(add(mul(c3, t), c2), t), c1), t), c0) == 0:
            yield t


def zero_points(form: CubicForm) -> Iterator[tuple[int, ...]]:
    """All F_q-points of the surface, in the canonical chart-by-chart order."""
    f = form.field
    for y in range(f.q):
        for z, w in _scan_pair_zeros(form, (1, y, 0, 0), _UNIT[2], _UNIT[3]):
            yield (1, y, z, w)
    for z, w in _scan_pair_zeros(form, _UNIT[1], _UNIT[2], _UNIT[3]):
        yield (0, 1, z, w)
    for t in _scan_line_zeros(form, _UNIT[2], _UNIT[3]):
        yield (0, 0, 1, t)
    if form.evaluate(_UNIT[3]) == 0:
        yield (0, 0, 0, 1)


# -- lines on the surface ----------------------------------------------


def lines_on_surface(form: CubicForm, extension: int = 1, pair_budget: int = LINE_SCAN_BUDGET) -> list[Line3]:
    """Every line of P^3 over F_{q^extension} contained in the surface.

    Scans the six canonical row patterns through precomputed zero sets, so
    only candidates whose two basis points (and, for the dense pattern, the
    basis sum) lie on the surface reach the exact containment check.
    """
    f = form.field
    ext = make_extension(f.p, f.k * extension)
    if ext.q * ext.q > pair_budget:
        raise BudgetExceeded(f"line scan over GF({ext.q}) exceeds the pair budget")
    g = form.embed(ext) if ext is not f else form
    add = ext.add
    e0, e1, e2, e3 = _UNIT

    def contained(r0, r1):
        return not any(g.restrict_to_line(r0, r1))

    found = []
    # pivots (0, 1): rows (1,0,a,b), (0,1,c,d); filter by the two basis
    # points and their sum before the exact check
    z1 = list(_scan_pair_zeros(g, e0, e2, e3))
    z2 = list(_scan_pair_zeros(g, e1, e2, e3))
    z3 = set(_scan_pair_zeros(g, (1, 1, 0, 0), e2, e3))
    for a, b in z1:
        for c, d in z2:
            if (add(a, c), add(b, d)) in z3:
                rows = ((1, 0, a, b), (0, 1, c, d))
                if contained(*rows):
                    found.append(rows)
    # pivots (0, 2): rows (1,a,0,b), (0,0,1,c)
    z1 = list(_scan_pair_zeros(g, e0, e1, e3))
    z2 = list(_scan_line_zeros(g, e2, e3))
    for a, b in z1:
        for c in z2:
            rows = ((1, a, 0, b), (0, 0, 1, c))
            if contained(*rows):
                found.append(rows)
    # pivots (0, 3): rows (1,a,b,0), (0,0,0,1)
    if g.evaluate(e3) == 0:
        for a, b in _scan_pair_zeros(g, e0, e1, e2):
            rows = ((1, a, b, 0), (0, 0, 0, 1))
            if contained(*rows):
                found.append(rows)
    # pivots (1, 2): rows (0,1,0,a), (0,0,1,b)
    z1 = list(_scan_line_zeros(g, e1, e3))
    z2 = list(_scan_line_zeros(g, e2, e3))
    for a in z1:
        for b in z2:
            rows = ((0, 1, 0, a), (0, 0, 1, b))
            if contained(*rows):
                found.append(rows)
    # pivots (1, 3): rows (0,1,a,0), (0,0,0,1)
    if g.evaluate(e3) == 0:
        for a in _scan_line_zeros(g, e1, e2):
            rows = ((0, 1, a, 0), (0, 0, 0, 1))
            if contained(*rows):
                found.append(rows)
    # pivots (2, 3): the single row pair (0,0,1,0), (0,0,0,1)
    if contained(e2, e3):
        found.append((e2, e3))
    found.sort(key=lambda rows: rows[0] + rows[1])
    return [Line3(ext, rows, _canonical=True) for rows in found]


# -- smoothness ---------------------------------------------------------


@dataclass(frozen=True)
class SmoothnessReport:
    """Outcome of the bounded singular-point search.

    witness is (extension degree over the base field, coordinates over that
    extension) when a singular point was found.  scanned_degrees lists the
    extensions whose points were enumerated in full; on top of that the
    rational lines of the surface are searched for conjugate singular pairs,
    which catches every singular point of degree up to 2 exactly.
    """

    smooth: bool
    witness: Optional[tuple[int, tuple[int, ...]]]
    scanned_degrees: tuple[int, ...]
    line_reinforced: bool

    def __bool__(self) -> bool:
        return self.smooth


def is_smooth(form: CubicForm, k_max: int = 12, point_budget: int = 600_000) -> SmoothnessReport:
    """Search for singular points over F_{q^k}, k <= k_max, within budget.

    Full point scans run while the extension stays under point_budget; the
    rational-line reinforcement then rules out singular points of degree 2
    regardless of budget, because two conjugate singular points span a
    rational line that the surface must contain.
    """
    f = form.field
    if f is None:
        raise TypeError("smoothness is checked over a finite field")
    scanned = []
    for k in range(1, k_max + 1):
        ext = make_extension(f.p, f.k * k)
        if ext.q ** 3 > point_budget:
            break
        g = form.embed(ext) if k > 1 else form
        for coords in zero_points(g):
            if not any(g.gradient(coords)):
                return SmoothnessReport(False, (k, coords), tuple(scanned), False)
        scanned.append(k)
    reinforced = False
    if f.q * f.q <= LINE_SCAN_BUDGET:
        reinforced = True
        for line in lines_on_surface(form):
            witness = _singular_point_on_line(form, line)
            if witness is not None:
                return SmoothnessReport(False, witness, tuple(scanned), True)
    return SmoothnessReport(True, None, tuple(scanned), reinforced)


def _singular_point_on_line(form: CubicForm, line: Line3):
    """A common zero of the four partials along a contained line, if any.

    The restricted partials are binary quadratics; a common projective root
    is a singular surface point.  Dehomogenizing at s = 1 misses only the
    root (0 : 1), which shows up as every quadratic losing its t^2 term.
    """
    from .field import univariate_gcd

    f = form.field
    u, v = line.rows
    quads = [form.partial_on_line(i, u, v) for i in range(4)]
    nonzero = [q for q in quads if any(q)]
    if not nonzero:
        return (1, line.point_at(1, 0).coords)
    if all(q[2] == 0 for q in nonzero):
        return (1, line.point_at(0, 1).coords)
    g = list(nonzero[0])
    for quad in nonzero[1:]:
        g = univariate_gcd(f, g, list(quad))
        if len(g) <= 1:
            return None
    while g and g[-1] == 0:
        g.pop()
    if len(g) <= 1:
        return None
    if len(g) == 2:
        return (1, line.point_at(1, f.div(f.neg(g[0]), g[1])).coords)
    rational = solve_quadratic(f, g[2], g[1], g[0])
    if rational:
        t0 = rational[0][0]
        return (1, line.point_at(1, t0).coords)
    # irreducible quadratic gcd: conjugate singular pair over the quadratic
    # extension
    ext = make_extension(f.p, 2 * f.k)
    emb = embedding(f, ext)
    roots = solve_quadratic(ext, emb(g[2]), emb(g[1]), emb(g[0]))
    t0 = roots[0][0]
    ue = tuple(emb(c) for c in u)
    ve = tuple(emb(c) for c in v)
    coords = tuple(ext.add(a, ext.mul(t0, b)) for a, b in zip(ue, ve))
    return (2, normalize(ext, coords))


# -- line-surface intersection ------------------------------------------


@dataclass(frozen=True)
class DivisorEntry:
    point: ProjPoint
    multiplicity: int
    degree: int  # of the point's field of definition over the base field


@dataclass(frozen=True)
class IntersectionDivisor:
    """The degree-3 cycle cut on the surface by a line not contained in it.

    Entries carry exact coordinates; rational points live over the base
    field (degree 1) and resolved conjugate pairs over its quadratic
    extension.  Irreducible cubic factors are reported in unresolved as
    (degree, root count) without coordinates.
    """

    line: Line3
    contained: bool
    entries: tuple[DivisorEntry, ...]
    unresolved: tuple[tuple[int, int], ...]

    @property
    def rational_entries(self) -> tuple[DivisorEntry, ...]:
        return tuple(e for e in self.entries if e.degree == 1)

    @property
    def fully_rational(self) -> bool:
        return not self.contained and all(e.degree == 1 for e in self.entries) and not self.unresolved

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries) + sum(n for _, n in self.unresolved)

    def multiplicity_at(self, point: ProjPoint) -> int:
        for e in self.entries:
            if e.point == point:
                return e.multiplicity
        return 0


def intersect_line(form: CubicForm, line: Line3, resolve: bool = True) -> IntersectionDivisor:
    """The intersection cycle line . S as a root multiset of a binary cubic."""
    f = form.field
    if f is not line.field:
        raise ValueError("line and surface live over different fields")
    u, v = line.rows
    coeffs = form.restrict_to_line(u, v)
    if not any(coeffs):
        return IntersectionDivisor(line, True, (), ())
    cr = roots_of_cubic(f, coeffs)
    entries = [
        DivisorEntry(line.point_at(s, t), mult, 1) for (s, t), mult in cr.rational
    ]
    unresolved: list[tuple[int, int]] = []
    if cr.extension_roots:
        if cr.extension_degree == 2 and resolve:
            ext = make_extension(f.p, 2 * f.k)
            emb = embedding(f, ext)
            g = cr.leftover
            ue = tuple(emb(c) for c in u)
            ve = tuple(emb(c) for c in v)
            for t0, mult in solve_quadratic(ext, emb(g[2]), emb(g[1]), emb(g[0])):
                coords = [ext.add(a, ext.mul(t0, b)) for a, b in zip(ue, ve)]
                entries.append(DivisorEntry(ProjPoint(ext, coords), mult, 2))
        else:
            unresolved.append((cr.extension_degree, cr.extension_roots))
    return IntersectionDivisor(line, False, tuple(entries), tuple(unresolved))


# -- tangent planes and the curves cut by them --------------------------


def tangent_plane(form: CubicForm, point: ProjPoint) -> Plane3:
    """The plane with covector grad F at a smooth surface point."""
    if form.evaluate(point.coords) != 0:
        raise PointNotOnSurface(f"{point} is not on the surface")
    grad = form.gradient(point.coords)
    if not any(grad):
        raise SingularPoint(f"gradient vanishes at {point}")
    return Plane3(form.field, grad)


class GammaType(Enum):
    """Decomposition over the algebraic closure of a tangent-plane section."""

    THREE_LINES = "three-lines"
    CONIC_PLUS_LINE = "conic-plus-line"
    IRREDUCIBLE_NODAL = "irreducible-nodal"
    IRREDUCIBLE_CUSPIDAL = "irreducible-cuspidal"


@dataclass(frozen=True)
class GammaCurve:
    """The plane cubic cut on the surface by the tangent plane at a point.

    The curve is expressed in coordinates on the tangent plane through the
    three basis vectors; base_point is the distinguished (singular) point in
    those coordinates.  tangent_cone is (A, B, C) for A s^2 + B st + C t^2
    in the local frame whose directions map to local_directions in P^3.
    singularity names the tangent-cone root pattern at the base point:
    "node" for two distinct directions, "cusp" for one double direction,
    "triple" when the quadratic part vanishes identically.
    """

    plane: Plane3
    basis: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    cubic: dict
    base_point: tuple[int, int, int]
    tangent_cone: tuple[int, int, int]
    cone_roots: tuple[tuple[tuple[int, int], int], ...]
    cone_extension_roots: int
    cubic_tail: tuple[int, int, int, int]
    local_directions: tuple[tuple[int, ...], tuple[int, ...]]
    decomposition: GammaType
    singularity: str
    lines_through_base: tuple[Line3, ...]
    closure_lines_through_base: int


def _binary_quadratic_roots(field: ExtField, a: int, b: int, c: int):
    """Projective roots of a s^2 + b st + c t^2 with multiplicity.

    Returns (rational ((s, t), mult) list, number of extension roots).
    """
    if a == 0 and b == 0 and c == 0:
        raise IdenticallyZero("zero binary quadratic")
    if c == 0:
        roots = [((0, 1), 2 - (1 if b else 0))]
        if b:
            roots.append(((1, field.div(field.neg(a), b)), 1))
        return sorted(roots), 0
    sol = solve_quadratic(field, c, b, a)
    return [((1, t), mult) for t, mult in sol], 2 - sum(m for _, m in sol)


def _curve_contains_line(field, cubic_terms, pa, pb) -> bool:
    """Whether the P^2 line through two plane points lies inside a ternary cubic."""
    sub = _substitute_linear(field, cubic_terms, (tuple(pa), tuple(pb)))
    return not any(sub.values())


def gamma_curve(form: CubicForm, point: ProjPoint) -> GammaCurve:
    """The tangent-plane section at a smooth point, with its local analysis."""
    f = form.field
    if form.evaluate(point.coords) != 0:
        raise PointNotOnSurface(f"{point} is not on the surface")
    grad = form.gradient(point.coords)
    if not any(grad):
        raise SingularPoint(f"gradient vanishes at {point}")
    plane = Plane3(f, grad)
    n = plane.covector
    pivot = next(i for i, c in enumerate(n) if c)
    others = [j for j in range(4) if j != pivot]
    basis = []
    for j in others:
        vec = [0, 0, 0, 0]
        vec[j] = 1
        vec[pivot] = f.neg(f.div(n[j], n[pivot]))
        basis.append(tuple(vec))
    basis = tuple(basis)
    cubic = form.restrict_to_plane(basis)
    pp = normalize(f, tuple(point.coords[j] for j in others))
    m = next(i for i, c in enumerate(pp) if c)
    a_idx, b_idx = [i for i in range(3) if i != m]
    ea = tuple(1 if i == a_idx else 0 for i in range(3))
    eb = tuple(1 if i == b_idx else 0 for i in range(3))
    cubic_terms = _dict_terms(cubic)
    shifted = _substitute_linear(f, cubic_terms, (pp, ea, eb))
    get = shifted.get
    if get((3, 0, 0), 0) or get((2, 1, 0), 0) or get((2, 0, 1), 0):
        raise RuntimeError("tangent-plane section is not singular at the base point")
    cone = (get((1, 2, 0), 0), get((1, 1, 1), 0), get((1, 0, 2), 0))
    tail = (get((0, 3, 0), 0), get((0, 2, 1), 0), get((0, 1, 2), 0), get((0, 0, 3), 0))
    dirs = (basis[a_idx], basis[b_idx])

    def plane_dir(s: int, t: int) -> tuple[int, int, int]:
        return tuple(f.add(f.mul(s, x), f.mul(t, y)) for x, y in zip(ea, eb))

    def line_from_dir(s: int, t: int) -> Line3:
        second = [f.add(f.mul(s, x), f.mul(t, y)) for x, y in zip(dirs[0], dirs[1])]
        return line_through(point, ProjPoint(f, second))

    if not any(cone):
        # triple point: the section is three concurrent lines
        cr = roots_of_cubic(f, tail)
        lines = tuple(line_from_dir(s, t) for (s, t), _ in cr.rational)
        closure = len(cr.rational) + cr.extension_roots
        return GammaCurve(
            plane, basis, cubic, pp, cone, (), 0, tail, dirs,
            GammaType.THREE_LINES, "triple", lines, closure,
        )

    roots, ext_count = _binary_quadratic_roots(f, *cone)
    if ext_count:
        # conjugate direction pair: test one of the two lines over the
        # quadratic extension; divisibility is Galois-stable
        ext = make_extension(f.p, 2 * f.k)
        emb = embedding(f, ext)
        terms_e = [(emb(c), idxs) for c, idxs in cubic_terms]
        pp_e = tuple(emb(c) for c in pp)
        (t0, _), _pair = solve_quadratic(ext, emb(cone[2]), emb(cone[1]), emb(cone[0]))
        dir_e = tuple(ext.add(x, ext.mul(t0, y)) for x, y in zip((emb(c) for c in ea), (emb(c) for c in eb)))
        if _curve_contains_line(ext, terms_e, pp_e, dir_e):
            return GammaCurve(
                plane, basis, cubic, pp, cone, tuple(roots), ext_count, tail, dirs,
                GammaType.THREE_LINES, "node", (), 2,
            )
        return GammaCurve(
            plane, basis, cubic, pp, cone, tuple(roots), ext_count, tail, dirs,
            GammaType.IRREDUCIBLE_NODAL, "node", (), 0,
        )

    contained_dirs = [
        (s, t) for (s, t), _ in roots if _curve_contains_line(f, cubic_terms, pp, plane_dir(s, t))
    ]
    lines = tuple(line_from_dir(s, t) for s, t in contained_dirs)
    if len(roots) == 1:
        # one double direction
        if contained_dirs:
            decomposition = GammaType.CONIC_PLUS_LINE
        else:
            decomposition = GammaType.IRREDUCIBLE_CUSPIDAL
        return GammaCurve(
            plane, basis, cubic, pp, cone, tuple(roots), 0, tail, dirs,
            decomposition, "cusp", lines, len(lines),
        )
    if len(contained_dirs) == 2:
        decomposition = GammaType.THREE_LINES
    elif len(contained_dirs) == 1:
        decomposition = GammaType.CONIC_PLUS_LINE
    else:
        decomposition = GammaType.IRREDUCIBLE_NODAL
    return GammaCurve(
        plane, basis, cubic, pp, cone, tuple(roots), 0, tail, dirs,
        decomposition, "node", lines, len(lines),
    )


# -- point classification and asymptotic lines --------------------------


class PointKind(Enum):
    ECKARDT = "eckardt"
    PARABOLIC = "parabolic"  # parabolic and not Eckardt
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class PointClass:
    kind: PointKind
    ternary: bool
    line_count: int  # lines of the surface through the point, over the closure


@dataclass(frozen=True)
class AsymptoticLines:
    lines: tuple[Line3, ...]
    cardinality: Union[int, str]  # 1, 2 or "infinite" over the closure


def classify_point(form: CubicForm, point: ProjPoint) -> PointClass:
    """Eckardt / parabolic / hyperbolic / elliptic type of a smooth point."""
    gamma = gamma_curve(form, point)
    if gamma.singularity == "triple":
        kind = PointKind.ECKARDT
    elif gamma.singularity == "cusp":
        kind = PointKind.PARABOLIC
    elif gamma.cone_extension_roots:
        kind = PointKind.ELLIPTIC
    else:
        kind = PointKind.HYPERBOLIC
    return PointClass(kind, kind is not PointKind.ELLIPTIC, gamma.closure_lines_through_base)


def asymptotic_lines(form: CubicForm, point: ProjPoint) -> AsymptoticLines:
    """All rational lines meeting the surface with multiplicity >= 3 at the point."""
    gamma = gamma_curve(form, point)
    f = form.field
    if gamma.singularity == "triple":
        pencil = lines_in_plane_through(gamma.plane, point)
        return AsymptoticLines(tuple(pencil), "infinite")
    lines = []
    for (s, t), _mult in gamma.cone_roots:
        second = [f.add(f.mul(s, x), f.mul(t, y)) for x, y in zip(*gamma.local_directions)]
        lines.append(line_through(point, ProjPoint(f, second)))
    return AsymptoticLines(tuple(lines), 1 if gamma.singularity == "cusp" else 2)


# -- the Gauss map restricted to a contained line -----------------------


@dataclass(frozen=True)
class GaussMapOnLine:
    """Degree-2 data of P -> tangent plane at P along a line on the surface.

    coordinate_forms holds the two binary quadratics whose ratio realizes
    the map in the pencil of planes through the line; their common zeros
    would be singular surface points, so none exist here.
    """

    line: Line3
    separable: bool
    coordinate_forms: tuple[tuple[int, int, int], tuple[int, int, int]]
    parabolic_points: tuple[ProjPoint, ...]
    eckardt_points: tuple[ProjPoint, ...]
    closure_ramification: Union[int, str]  # 2, 1, or "all"
    degree: int = 2


def gauss_on_line(form: CubicForm, line: Line3) -> GaussMapOnLine:
    """Ramification data of the tangent-plane map along a contained line."""
    f = form.field
    u, v = line.rows
    if any(form.restrict_to_line(u, v)):
        raise LineNotOnSurface(f"{line} is not contained in the surface")
    pivots = [next(i for i, c in enumerate(row) if c) for row in line.rows]
    m1, m2 = [i for i in range(4) if i not in pivots]
    q = form.partial_on_line(m1, u, v)
    r = form.partial_on_line(m2, u, v)
    if f.p == 2:
        if q[1] == 0 and r[1] == 0:
            pts = tuple(line.points())
            eck = tuple(p for p in pts if classify_point(form, p).kind is PointKind.ECKARDT)
            return GaussMapOnLine(line, False, (q, r), pts, eck, "all")
        fiber_s2 = f.sub(f.mul(r[1], q[0]), f.mul(q[1], r[0]))
        fiber_t2 = f.sub(f.mul(r[1], q[2]), f.mul(q[1], r[2]))
        if fiber_s2 == 0 and fiber_t2 == 0:
            raise SingularPoint("the tangent-plane map is degenerate along the line")
        pt = line.point_at(f.sqrt(fiber_t2), f.sqrt(fiber_s2))
        eck = (pt,) if classify_point(form, pt).kind is PointKind.ECKARDT else ()
        return GaussMapOnLine(line, True, (q, r), (pt,), eck, 1)
    two = 2 % f.p
    four = 4 % f.p
    ja = f.mul(two, f.sub(f.mul(q[0], r[1]), f.mul(q[1], r[0])))
    jb = f.mul(four, f.sub(f.mul(q[0], r[2]), f.mul(q[2], r[0])))
    jc = f.mul(two, f.sub(f.mul(q[1], r[2]), f.mul(q[2], r[1])))
    if not (ja or jb or jc):
        raise SingularPoint("the tangent-plane map is degenerate along the line")
    roots, _ext = _binary_quadratic_roots(f, ja, jb, jc)
    pts = tuple(line.point_at(s, t) for (s, t), _ in roots)
    eck = tuple(p for p in pts if classify_point(form, p).kind is PointKind.ECKARDT)
    return GaussMapOnLine(line, True, (q, r), pts, eck, 2)


def eckardt_points(form: CubicForm, candidates: Optional[Sequence[ProjPoint]] = None) -> list[ProjPoint]:
    """All Eckardt points among the candidates (default: every rational point)."""
    f = form.field
    if candidates is None:
        candidates = (ProjPoint(f, c) for c in zero_points(form))
    out = [p for p in candidates if classify_point(form, p).kind is PointKind.ECKARDT]
    out.sort(key=lambda p: p.coords)
    return out
