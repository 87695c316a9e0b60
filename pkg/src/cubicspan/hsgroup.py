"""The divisor-class group of a cubic surface cut down by line relations.

G is the free abelian group on S(F_q).  G' is the subgroup generated by
the degree-3 sums P+Q+R arising from (i) lines not on the surface whose
intersection cycle is fully rational, with tangency giving 2P+Q and the
asymptotic case 3P, and (ii) every triple, repetition allowed, of rational
points on a line inside the surface.  G'' is the degree-0 part of G', the
span of the differences g - g0 of the generating sums against a fixed
base sum.  H = G/G'' and its degree-0 part H0 are what this module
presents, together with Smith normal form data for canonical coset
representatives.

The raw presentation is large (tens of thousands of rows on a few hundred
points by q = 13) but collapses: points sharing a contained line fall
into one class, as do all tangent third points of a fixed point.  The
quotient by those identifications is exact, since each identification is
itself a difference of two generating sums, so the group is computed from
a matrix over the handful of surviving classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    BudgetExceeded,
    NoRationalPoints,
    NoTernaryPoint,
    PointNotOnSurface,
)
from .projgeo import Line3, ProjPoint
from .span import SpanTable, minimal_generators
from .surface import CubicForm, classify_point, lines_on_surface


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    if a and b and len(a[0]) != len(b):
        raise ValueError("inner dimensions differ")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for x, brow in zip(row, b):
            if x:
                for j, y in enumerate(brow):
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def _bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k]), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class _SnfWorkspace:
    """Mutable A = U M V with all four transforms tracked exactly."""

    def __init__(self, m: Sequence[Sequence[int]]):
        self.a = [list(row) for row in m]
        rows = len(self.a)
        cols = len(self.a[0]) if rows else 0
        if any(len(row) != cols for row in self.a):
            raise ValueError("matrix rows have unequal lengths")
        self.rows = rows
        self.cols = cols
        self.u = _identity(rows)
        self.uinv = _identity(rows)
        self.v = _identity(cols)
        self.vinv = _identity(cols)

    def swap_rows(self, r1: int, r2: int) -> None:
        if r1 == r2:
            return
        self.a[r1], self.a[r2] = self.a[r2], self.a[r1]
        self.u[r1], self.u[r2] = self.u[r2], self.u[r1]
        for row in self.uinv:
            row[r1], row[r2] = row[r2], row[r1]

    def negate_row(self, r: int) -> None:
        self.a[r] = [-x for x in self.a[r]]
        self.u[r] = [-x for x in self.u[r]]
        for row in self.uinv:
            row[r] = -row[r]

    def add_row(self, r1: int, r2: int, c: int) -> None:
        """row r1 += c * row r2"""
        if c == 0:
            return
        self.a[r1] = [x + c * y for x, y in zip(self.a[r1], self.a[r2])]
        self.u[r1] = [x + c * y for x, y in zip(self.u[r1], self.u[r2])]
        for row in self.uinv:
            row[r2] -= c * row[r1]

    def swap_cols(self, c1: int, c2: int) -> None:
        if c1 == c2:
            return
        for row in self.a:
            row[c1], row[c2] = row[c2], row[c1]
        for row in self.v:
            row[c1], row[c2] = row[c2], row[c1]
        self.vinv[c1], self.vinv[c2] = self.vinv[c2], self.vinv[c1]

    def negate_col(self, c: int) -> None:
        for row in self.a:
            row[c] = -row[c]
        for row in self.v:
            row[c] = -row[c]
        self.vinv[c] = [-x for x in self.vinv[c]]

    def add_col(self, c1: int, c2: int, k: int) -> None:
        """col c1 += k * col c2"""
        if k == 0:
            return
        for row in self.a:
            row[c1] += k * row[c2]
        for row in self.v:
            row[c1] += k * row[c2]
        self.vinv[c2] = [x - k * y for x, y in zip(self.vinv[c2], self.vinv[c1])]


def _snf_with_inverses(m: Sequence[Sequence[int]]):
    """(U, Uinv, D, V, Vinv) with U M V = D diagonal, d1 | d2 | ..."""
    ws = _SnfWorkspace(m)
    a = ws.a
    t = 0
    limit = min(ws.rows, ws.cols)
    while t < limit:
        best = None
        for i in range(t, ws.rows):
            for j in range(t, ws.cols):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        while True:
            _, bi, bj = best
            ws.swap_rows(t, bi)
            ws.swap_cols(t, bj)
            if a[t][t] < 0:
                ws.negate_row(t)
            pivot = a[t][t]
            dirty = False
            for i in range(t + 1, ws.rows):
                if a[i][t]:
                    ws.add_row(i, t, -(a[i][t] // pivot))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, ws.cols):
                if a[t][j]:
                    ws.add_col(j, t, -(a[t][j] // pivot))
                    if a[t][j]:
                        dirty = True
            if not dirty:
                stray = None
                for i in range(t + 1, ws.rows):
                    for j in range(t + 1, ws.cols):
                        if a[i][j] % pivot:
                            stray = i
                            break
                    if stray is not None:
                        break
                if stray is None:
                    break
                ws.add_row(t, stray, 1)
            best = None
            for i in range(t, ws.rows):
                for j in range(t, ws.cols):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
        t += 1
    return ws.u, ws.uinv, ws.a, ws.v, ws.vinv


def smith_normal_form(m: Sequence[Sequence[int]]):
    """Smith normal form (U, D, V) of an integer matrix: U M V = D.

    D is diagonal with non-negative entries satisfying d1 | d2 | ...; U
    and V are unimodular.
    """
    u, _, d, v, _ = _snf_with_inverses(m)
    return u, d, v


def snf_with_transforms(m: Sequence[Sequence[int]]):
    """Smith form with inverse transforms: (U, Uinv, D, V, Vinv).

    U M V = D and M = Uinv D Vinv, so the first rank(M) rows of Vinv
    are a basis of the saturation of the row lattice of M.
    """
    return _snf_with_inverses(m)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


@dataclass(frozen=True)
class HsClass:
    """A canonical coset representative in the class group.

    The vector is sparse over point indices (keys are class
    representative points); two classes are equal exactly when their
    canonical vectors are equal.
    """

    presentation: "ZPresentation" = field(compare=False, repr=False)
    vector: tuple[tuple[int, int], ...]
    degree: int

    def __add__(self, other: "HsClass") -> "HsClass":
        if other.presentation is not self.presentation:
            raise ValueError("classes belong to different presentations")
        acc = dict(self.vector)
        for i, c in other.vector:
            acc[i] = acc.get(i, 0) + c
        return self.presentation._canonical_class(acc)

    def __neg__(self) -> "HsClass":
        return self.presentation._canonical_class({i: -c for i, c in self.vector})

    def __sub__(self, other: "HsClass") -> "HsClass":
        return self + (-other)

    @property
    def is_zero(self) -> bool:
        return not self.vector


@dataclass(frozen=True)
class GroupStructure:
    """Shape of H = G/G'' and of its degree-0 part H0.

    invariant_factors lists the non-unit torsion factors d1 | d2 | ...,
    shared by H and H0; the free rank of H exceeds that of H0 by one,
    the degree quotient H/H0 = Z.
    """

    points: int
    classes: int
    relations: int
    h0_free_rank: int
    invariant_factors: tuple[int, ...]
    h0_dim_mod2: int
    h0_dim_mod3: int
    two_torsion_dim: int

    @property
    def hs_free_rank(self) -> int:
        return self.h0_free_rank + 1

    @property
    def h0_trivial(self) -> bool:
        return self.h0_free_rank == 0 and not self.invariant_factors

    @property
    def h0_order_divides_two(self) -> bool:
        return self.h0_free_rank == 0 and all(d == 2 for d in self.invariant_factors)


class ZPresentation:
    """H as an explicit quotient, with SNF data for canonical cosets.

    Generating sums are collected once as sorted point-index triples
    (the same sum reached along different lines counts once).  Points are
    then merged into classes, the relation matrix is rewritten over the
    classes, reduced to a triangular lattice basis, and put in Smith
    normal form with invertible transforms.
    """

    def __init__(
        self,
        form: CubicForm,
        table: Optional[SpanTable] = None,
        lines: Optional[list[Line3]] = None,
    ):
        if table is None:
            table = SpanTable(form)
        if lines is None:
            lines = lines_on_surface(form)
        self.form = form
        self.table = table
        self.points = table.points
        self.lines = lines
        n = len(self.points)
        if n == 0:
            raise NoRationalPoints("the surface has no rational point")

        sums: set[tuple[int, int, int]] = set()
        pair = table.pair_third
        for i in range(n):
            base = i * n
            for j in range(i + 1, n):
                k = pair[base + j]
                if k >= 0:
                    sums.add(tuple(sorted((i, j, k))))
            for k in table.tangent_thirds[i]:
                sums.add(tuple(sorted((i, i, k))))
        line_indices = []
        for line in lines:
            idx = sorted(table.index[p.coords] for p in line.points())
            line_indices.append(idx)
            m = len(idx)
            for a in range(m):
                for b in range(a, m):
                    for c in range(b, m):
                        sums.add((idx[a], idx[b], idx[c]))
        self.sums = sorted(sums)

        uf = _UnionFind(n)
        for idx in line_indices:
            for x in idx[1:]:
                uf.union(idx[0], x)
        for i in range(n):
            thirds = table.tangent_thirds[i]
            for k in thirds[1:]:
                uf.union(thirds[0], k)
        self.rep = [uf.find(i) for i in range(n)]
        self.class_reps = sorted(set(self.rep))
        self.column = {r: c for c, r in enumerate(self.class_reps)}
        r = len(self.class_reps)

        imgs = sorted(
            {tuple(sorted((self.rep[a], self.rep[b], self.rep[c]))) for a, b, c in self.sums}
        )
        rows = []
        if imgs:
            base_vec = [0] * r
            for x in imgs[0]:
                base_vec[self.column[x]] += 1
            for img in imgs[1:]:
                row = [-x for x in base_vec]
                for x in img:
                    row[self.column[x]] += 1
                rows.append(row)
        self.matrix = rows

        reduced = self._triangular_basis(rows, r)
        self.reduced = reduced
        self.snf = _snf_with_inverses(reduced) if reduced else None
        self._structure: Optional[GroupStructure] = None

    @staticmethod
    def _triangular_basis(rows: list[list[int]], width: int) -> list[list[int]]:
        """A triangular lattice basis for the row span, by online insertion.

        Each incoming row is folded against the held pivot of its leading
        column: either reduced outright when the pivot divides its lead,
        or combined with the pivot by an extended gcd, a unimodular step
        that keeps the accumulated row span exact.
        """
        pivots: list[Optional[list[int]]] = [None] * width
        for row in rows:
            row = list(row)
            for c in range(width):
                if not row[c]:
                    continue
                held = pivots[c]
                if held is None:
                    if row[c] < 0:
                        row = [-x for x in row]
                    pivots[c] = row
                    break
                a, b = held[c], row[c]
                if b % a == 0:
                    q = b // a
                    row = [y - q * x for x, y in zip(held, row)]
                else:
                    g, s, t = _xgcd(a, b)
                    pivots[c] = [s * x + t * y for x, y in zip(held, row)]
                    row = [(a // g) * y - (b // g) * x for x, y in zip(held, row)]
        return [p for p in pivots if p is not None]

    def _canonical_class(self, sparse: dict[int, int]) -> HsClass:
        r = len(self.class_reps)
        x = [0] * r
        degree = 0
        for rep_point, coeff in sparse.items():
            degree += coeff
            x[self.column[rep_point]] += coeff
        if self.snf is not None:
            _, _, d, v, vinv = self.snf
            y = [sum(x[i] * v[i][j] for i in range(r)) for j in range(r)]
            for j in range(min(len(d), r)):
                dj = d[j][j]
                if dj:
                    y[j] %= dj
            x = [sum(y[i] * vinv[i][j] for i in range(r)) for j in range(r)]
        vec = tuple(
            (self.class_reps[c], coeff) for c, coeff in enumerate(x) if coeff
        )
        return HsClass(self, vec, degree)

    def _point_index(self, point: ProjPoint) -> int:
        i = self.table.index.get(point.coords)
        if i is None:
            raise PointNotOnSurface(f"{point} is not a rational point of the surface")
        return i

    def class_of(self, point: ProjPoint) -> HsClass:
        return self._canonical_class({self.rep[self._point_index(point)]: 1})

    def class_diff(self, p: ProjPoint, q: ProjPoint) -> HsClass:
        sparse: dict[int, int] = {}
        rp = self.rep[self._point_index(p)]
        rq = self.rep[self._point_index(q)]
        sparse[rp] = sparse.get(rp, 0) + 1
        sparse[rq] = sparse.get(rq, 0) - 1
        return self._canonical_class(sparse)

    @property
    def structure(self) -> GroupStructure:
        if self._structure is None:
            r = len(self.class_reps)
            rank = len(self.reduced)
            diag = []
            if self.snf is not None:
                d = self.snf[2]
                diag = [d[j][j] for j in range(min(len(d), r)) if d[j][j]]
            assert len(diag) == rank
            factors = tuple(x for x in diag if x > 1)
            h0_free = r - rank - 1
            self._structure = GroupStructure(
                points=len(self.points),
                classes=r,
                relations=len(self.sums) - 1,
                h0_free_rank=h0_free,
                invariant_factors=factors,
                h0_dim_mod2=h0_free + sum(1 for x in diag if x % 2 == 0),
                h0_dim_mod3=h0_free + sum(1 for x in diag if x % 3 == 0),
                two_torsion_dim=sum(1 for x in diag if x % 2 == 0),
            )
        return self._structure

    def verify(self) -> None:
        """Exact consistency checks on the cached decomposition."""
        for row in self.matrix:
            if sum(row) != 0:
                raise AssertionError("relation row with non-zero degree")
        if self.snf is None:
            return
        u, uinv, d, v, vinv = self.snf
        if _mat_mul(u, _mat_mul(self.reduced, v)) != d:
            raise AssertionError("U M V differs from D")
        if _bareiss_det(u) not in (1, -1) or _bareiss_det(v) not in (1, -1):
            raise AssertionError("transform is not unimodular")
        if _mat_mul(u, uinv) != _identity(len(u)):
            raise AssertionError("U inverse mismatch")
        if _mat_mul(v, vinv) != _identity(len(v)):
            raise AssertionError("V inverse mismatch")


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


def relation_rows(
    form: CubicForm,
    table: Optional[SpanTable] = None,
    lines: Optional[list[Line3]] = None,
    presentation: Optional[ZPresentation] = None,
) -> list[dict[int, int]]:
    """Rows spanning G'' as sparse vectors over point indices.

    One row per distinct generating sum beyond the first; the row for sum
    g is g - g0 with g0 the lexicographically least sum.
    """
    if presentation is None:
        presentation = ZPresentation(form, table=table, lines=lines)
    sums = presentation.sums
    if not sums:
        return []
    base = sums[0]
    out = []
    for g in sums[1:]:
        row: dict[int, int] = {}
        for x in g:
            row[x] = row.get(x, 0) + 1
        for x in base:
            row[x] = row.get(x, 0) - 1
        out.append({k: c for k, c in row.items() if c})
    return out


def hs_structure(
    form: CubicForm,
    table: Optional[SpanTable] = None,
    lines: Optional[list[Line3]] = None,
) -> GroupStructure:
    """Free rank, invariant factors, and mod-p dimensions of H and H0."""
    return ZPresentation(form, table=table, lines=lines).structure


def class_of(
    form: CubicForm,
    point: ProjPoint,
    presentation: Optional[ZPresentation] = None,
) -> HsClass:
    """The canonical class [P] of a rational surface point."""
    if presentation is None:
        presentation = ZPresentation(form)
    return presentation.class_of(point)


def class_diff(
    form: CubicForm,
    p: ProjPoint,
    q: ProjPoint,
    presentation: Optional[ZPresentation] = None,
) -> HsClass:
    """The canonical class [P - Q]."""
    if presentation is None:
        presentation = ZPresentation(form)
    return presentation.class_diff(p, q)


@dataclass(frozen=True)
class TernaryBoundReport:
    """The rank bound and generation claims checked on one surface."""

    ternary_point: ProjPoint
    h0_dim_mod2: int
    h0_dim_mod3: int
    r: Optional[int]
    bound_consistent: Optional[bool]
    generating_set_size: int
    generates_h0: bool


def ternary_bound_check(
    form: CubicForm,
    table: Optional[SpanTable] = None,
    presentation: Optional[ZPresentation] = None,
    r_max: int = 3,
    closure_budget: int = 20_000,
) -> TernaryBoundReport:
    """Check r >= dim H0/pH0 for p in {2, 3} and the generation claim.

    The base point is the first ternary point in scan order.  The bound is
    compared against the exhaustive minimal generator count when that
    search fits its budget; the generation claim is checked for the
    spanning witness (every class [P - P0], P in B, together generating
    H0), falling back to B = S(F_q) when no witness is available.
    """
    if presentation is None:
        presentation = ZPresentation(form, table=table)
    table = presentation.table
    base_point = None
    for p in presentation.points:
        if classify_point(form, p).ternary:
            base_point = p
            break
    if base_point is None:
        raise NoTernaryPoint("no ternary point on the surface")
    structure = presentation.structure

    r = None
    consistent: Optional[bool] = None
    try:
        found = minimal_generators(
            form, r_max=r_max, table=table, closure_budget=closure_budget
        )
        r = found.r
    except BudgetExceeded:
        pass
    if r is not None:
        consistent = r >= structure.h0_dim_mod2 and r >= structure.h0_dim_mod3

    if r is not None:
        witness = list(found.witness)
    else:
        witness = list(presentation.points)
    generates = _difference_classes_generate(presentation, base_point, witness)
    return TernaryBoundReport(
        base_point,
        structure.h0_dim_mod2,
        structure.h0_dim_mod3,
        r,
        consistent,
        len(witness),
        generates,
    )


def _difference_classes_generate(
    presentation: ZPresentation,
    base_point: ProjPoint,
    points: Iterable[ProjPoint],
) -> bool:
    """Whether the classes [P - P0] span the whole degree-0 part."""
    r = len(presentation.class_reps)
    base_col = presentation.column[presentation.rep[presentation._point_index(base_point)]]
    rows = [list(row) for row in presentation.reduced]
    for p in points:
        col = presentation.column[presentation.rep[presentation._point_index(p)]]
        if col == base_col:
            continue
        row = [0] * r
        row[col] = 1
        row[base_col] = -1
        rows.append(row)
    # drop a fixed column to express everything in the lattice of degree-0
    # vectors; generation means the quotient there is trivial
    trimmed = [row[1:] for row in rows]
    if not trimmed:
        return r - 1 == 0
    _, _, d, _, _ = _snf_with_inverses(trimmed)
    width = r - 1
    diag = [d[j][j] for j in range(min(len(d), width))]
    rank = sum(1 for x in diag if x)
    return rank == width and all(x == 1 for x in diag[:rank])
