"""Exact lattice geometry: integer linear algebra, convex hulls, polytopes.

Everything in this module is exact. Matrices are plain lists of Python
ints (or Fractions where stated), so there is no overflow and no floating
point anywhere. Ambient dimensions stay small (<= 6 in practice), which
keeps the straightforward algorithms fast enough without sparse tricks.

Conventions:
  * inequality systems are written A m + b >= 0, one row per inequality
  * facet normals are primitive integer *inner* normals
  * vertex and lattice point lists are sorted lexicographically
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

__all__ = [
    "primitive",
    "dot",
    "det_int",
    "smith_normal_form",
    "snf_diagonal",
    "integer_kernel",
    "sublattice_index",
    "solve_rational",
    "frac_solve_square",
    "frac_rank",
    "convex_hull",
    "Hull",
    "Polytope",
    "mixed_volume",
]


def dot(u, v):
    """Inner product of two equal-length sequences."""
    return sum(a * b for a, b in zip(u, v))


def primitive(v):
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def _identity(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def det_int(a):
    """Determinant of a square integer matrix, fraction-free (Bareiss)."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(a):
    """Smith normal form with transforms.

    Args:
        a: integer matrix as a list of m rows of n ints.

    Returns:
        (U, D, V) with U*a*V == D, U and V unimodular, and D diagonal with
        nonnegative entries satisfying the divisibility chain
        D[0][0] | D[1][1] | ... All three are lists of lists of ints.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, row)) for row in a]
    u = _identity(m)
    v = _identity(n)

    def row_sub(i, t, q):
        # row i -= q * row t, mirrored on u
        di, dt = d[i], d[t]
        for j in range(n):
            di[j] -= q * dt[j]
        ui, ut = u[i], u[t]
        for j in range(m):
            ui[j] -= q * ut[j]

    def col_sub(j, t, q):
        # col j -= q * col t, mirrored on v
        for r in d:
            r[j] -= q * r[t]
        for r in v:
            r[j] -= q * r[t]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry of the trailing block becomes the pivot
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] and (piv is None or abs(d[i][j]) < abs(d[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        if piv[0] != t:
            row_swap(t, piv[0])
        if piv[1] != t:
            col_swap(t, piv[1])
        while True:
            i = t + 1
            while i < m:
                if d[i][t]:
                    row_sub(i, t, d[i][t] // d[t][t])
                    if d[i][t]:
                        # remainder beats the pivot, promote it and retry
                        row_swap(t, i)
                        continue
                i += 1
            j = t + 1
            while j < n:
                if d[t][j]:
                    col_sub(j, t, d[t][j] // d[t][t])
                    if d[t][j]:
                        col_swap(t, j)
                j += 1
            if any(d[i][t] for i in range(t + 1, m)):
                continue  # column got dirtied by a column swap
            if any(d[t][j] for j in range(t + 1, n)):
                continue
            # divisibility sweep: every remaining entry must be a multiple
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % d[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_sub(t, bad, -1)  # fold the offending row into row t
        if d[t][t] < 0:
            for j in range(n):
                d[t][j] = -d[t][j]
            for j in range(m):
                u[t][j] = -u[t][j]
        t += 1
    return u, d, v


def snf_diagonal(a):
    """Diagonal of the Smith normal form of `a` (length min(m, n))."""
    _, d, _ = smith_normal_form(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def integer_kernel(a):
    """Lattice basis of {x in Z^n : a x = 0}.

    Returns a list of integer tuples. The list is a basis of the full
    kernel lattice (saturated), not just a finite-index sublattice.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    _, d, v = smith_normal_form(a)
    out = []
    for j in range(n):
        dj = d[j][j] if j < min(m, n) else 0
        if dj == 0:
            out.append(tuple(v[i][j] for i in range(n)))
    return out


def sublattice_index(vectors, n=None):
    """Index of the sublattice of Z^n spanned by integer `vectors`.

    Returns 0 when the vectors do not span rank n, otherwise the index
    (the product of the Smith invariant factors).
    """
    if not vectors:
        return 0 if (n is None or n > 0) else 1
    if n is None:
        n = len(vectors[0])
    diag = snf_diagonal([list(vec) for vec in vectors])
    nz = [x for x in diag if x != 0]
    if len(nz) < n:
        return 0
    idx = 1
    for x in nz:
        idx *= x
    return idx


def solve_rational(a, b):
    """Solve a x = b over the rationals.

    Args:
        a: integer matrix (m x n).
        b: length-m vector of ints or Fractions.

    Returns:
        None when the system is inconsistent, else a pair (x, kernel) where
        x is a particular solution as a tuple of Fractions and kernel is an
        integer lattice basis of the homogeneous solutions.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    u, d, v = smith_normal_form(a)
    ub = [dot(u[i], b) for i in range(m)]
    y = [Fraction(0)] * n
    kernel = []
    for j in range(n):
        dj = d[j][j] if j < min(m, n) else 0
        if dj == 0:
            kernel.append(tuple(v[i][j] for i in range(n)))
        else:
            y[j] = Fraction(ub[j], dj)
    for i in range(m):
        di = d[i][i] if i < min(m, n) else 0
        if di == 0 and ub[i] != 0:
            return None
    x = tuple(sum(Fraction(v[i][j]) * y[j] for j in range(n)) for i in range(n))
    return x, kernel


def frac_solve_square(m, rhs):
    """Solve a square linear system exactly over the rationals.

    Returns a tuple of Fractions, or None when the matrix is singular.
    """
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(m, rhs)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        pc = a[c][c]
        a[c] = [x / pc for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(a[i][n] for i in range(n))


def frac_rank(rows):
    """Rank over Q of a list of int/Fraction row vectors."""
    ech = []
    for row in rows:
        ech = _ech_append(ech, row)[0]
    return len(ech)


def _ech_append(ech, row):
    """Reduce `row` against an echelon list; append if independent.

    Returns (echelon, added) where added says whether the row increased
    the rank. The echelon rows are kept with a leading 1.
    """
    r = [Fraction(x) for x in row]
    n = len(r)
    for e in ech:
        lead = next(i for i in range(n) if e[i] != 0)
        if r[lead] != 0:
            f = r[lead]
            r = [x - f * y for x, y in zip(r, e)]
    lead = next((i for i in range(n) if r[i] != 0), None)
    if lead is None:
        return ech, False
    r = [x / r[lead] for x in r]
    return ech + [r], True


def _canon_num(x):
    """Collapse integral Fractions to int so tuples hash and sort cleanly."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    return int(x)


def _cross_normal(diffs):
    """Integer normal to the span of d-1 difference vectors in Z^d.

    Generalized cross product via cofactor expansion. Returns the zero
    vector when the diffs are linearly dependent.
    """
    d = len(diffs) + 1
    g = []
    cols = list(range(d))
    for j in range(d):
        minor = [[row[c] for c in cols if c != j] for row in diffs]
        g.append((-1) ** j * det_int(minor))
    return tuple(g)


class Hull:
    """Convex hull of a finite point set, exact.

    Attributes:
        points: deduplicated, lex-sorted input points (tuples of ints or
            Fractions).
        dim: affine dimension of the hull.
        vertex_indices: indices into `points` of the true vertices.
        facets: for full-dimensional hulls only, a lex-sorted list of
            (normal, offset) pairs with primitive integer inner normal g
            and exact offset c such that g.x + c >= 0 on the hull with
            equality on the facet. None when dim < ambient dimension.
    """

    __slots__ = ("points", "dim", "vertex_indices", "facets", "_simplices", "_ipoints", "_scale")

    def __init__(self, points, dim, vertex_indices, facets, simplices, ipoints, scale):
        self.points = points
        self.dim = dim
        self.vertex_indices = vertex_indices
        self.facets = facets
        self._simplices = simplices
        self._ipoints = ipoints
        self._scale = scale

    def volume(self):
        """Euclidean volume (exact Fraction); zero when not full-dimensional."""
        n = len(self.points[0])
        if self.dim < n:
            return Fraction(0)
        if self.dim == 0:
            return Fraction(1)  # 0-dimensional ambient space, degenerate
        v0 = self._ipoints[self.vertex_indices[0]]
        total = 0
        for simp in self._simplices:
            if self.vertex_indices[0] in simp:
                continue
            rows = [[self._ipoints[i][j] - v0[j] for j in range(n)] for i in simp]
            total += abs(det_int(rows))
        return Fraction(total, math.factorial(n) * self._scale**n)


def convex_hull(points):
    """Exact convex hull of integer or rational points.

    Handles lower-dimensional inputs (the hull of points in a proper
    affine subspace): vertices are still computed, facets are not.

    Args:
        points: iterable of equal-length tuples of ints or Fractions.

    Returns:
        a Hull.
    """
    pts = sorted({tuple(_canon_num(x) for x in p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty point set")
    n = len(pts[0])
    scale = 1
    for p in pts:
        for x in p:
            if isinstance(x, Fraction):
                scale = scale * x.denominator // math.gcd(scale, x.denominator)
    ip = [tuple(int(x * scale) for x in p) for p in pts]

    # affine dimension via exact echelon on differences from the base point
    base = ip[0]
    ech = []
    basis_rows = []
    for p in ip[1:]:
        diff = [p[j] - base[j] for j in range(n)]
        ech, added = _ech_append(ech, diff)
        if added:
            basis_rows.append(diff)
    dim = len(ech)

    if dim == 0:
        return Hull(pts, 0, [0], None, None, ip, scale)

    if dim < n:
        # project onto exact affine coordinates, hull there, map back
        bbt = [[dot(r1, r2) for r2 in basis_rows] for r1 in basis_rows]
        coords = []
        for p in ip:
            diff = [p[j] - base[j] for j in range(n)]
            rhs = [dot(r, diff) for r in basis_rows]
            y = frac_solve_square(bbt, rhs)
            coords.append(y)
        sub = convex_hull(coords)
        # sub.points are sorted coords; map each back to the original index
        back = {}
        for i, c in enumerate(coords):
            key = tuple(_canon_num(x) for x in c)
            back.setdefault(key, i)
        vidx = sorted(back[sub.points[i]] for i in sub.vertex_indices)
        return Hull(pts, dim, vidx, None, None, ip, scale)

    if n == 1:
        lo = min(range(len(ip)), key=lambda i: ip[i][0])
        hi = max(range(len(ip)), key=lambda i: ip[i][0])
        facets = sorted(
            [((1,), -Fraction(ip[lo][0], scale)), ((-1,), Fraction(ip[hi][0], scale))]
        )
        facets = [(g, _canon_num(c)) for g, c in facets]
        return Hull(pts, 1, sorted({lo, hi}), facets, [(lo,), (hi,)], ip, scale)

    # full-dimensional incremental hull with strict visibility
    init = [0]
    ech = []
    for i in range(1, len(ip)):
        diff = [ip[i][j] - ip[0][j] for j in range(n)]
        ech, added = _ech_append(ech, diff)
        if added:
            init.append(i)
        if len(init) == n + 1:
            break
    ref = tuple(Fraction(sum(ip[i][j] for i in init), n + 1) for j in range(n))

    def make_facet(idx_tuple):
        vs = [ip[i] for i in idx_tuple]
        diffs = [[vs[k][j] - vs[0][j] for j in range(n)] for k in range(1, n)]
        g = primitive(_cross_normal(diffs))
        if all(x == 0 for x in g):
            return None
        c = -dot(g, vs[0])
        val = dot(g, ref) + c
        if val < 0:
            g = tuple(-x for x in g)
            c = -c
        elif val == 0:
            return None  # plane through the interior reference, degenerate
        return (tuple(sorted(idx_tuple)), g, c)

    facets = []
    for s in combinations(init, n):
        f = make_facet(s)
        assert f is not None, "degenerate initial simplex"
        facets.append(f)

    for pi in range(len(ip)):
        if pi in init:
            continue
        p = ip[pi]
        visible = [f for f in facets if dot(f[1], p) + f[2] < 0]
        if not visible:
            continue
        ridge_count = {}
        for verts, _, _ in visible:
            for drop in verts:
                ridge = tuple(x for x in verts if x != drop)
                ridge_count[ridge] = ridge_count.get(ridge, 0) + 1
        vis_set = {f[0] for f in visible}
        facets = [f for f in facets if f[0] not in vis_set]
        for ridge, cnt in ridge_count.items():
            if cnt != 1:
                continue
            f = make_facet(ridge + (pi,))
            assert f is not None, "degenerate horizon facet"
            facets.append(f)

    simplices = [f[0] for f in facets]
    merged = {}
    for verts, g, c in facets:
        merged.setdefault((g, c), set()).update(verts)
    # g.(x*scale) + c >= 0 on scaled points means g.x + c/scale >= 0 originally
    facet_list = sorted((g, _canon_num(Fraction(c, scale))) for (g, c) in merged)
    candidates = sorted({i for verts in merged.values() for i in verts})
    vidx = []
    for i in candidates:
        active = [g for (g, c) in merged if dot(g, ip[i]) + c == 0]
        if frac_rank(active) == n:
            vidx.append(i)
    return Hull(pts, n, vidx, facet_list, simplices, ip, scale)


class Polytope:
    """A bounded convex polytope with exact vertex and inequality data.

    Build one with `from_points` (e.g. a Newton polytope) or
    `from_inequalities` for {m : A m + b >= 0}. H-representation input
    must be bounded; this is not checked, it is the caller's contract.

    Attributes:
        n: ambient dimension.
        dim: affine dimension (-1 when empty).
        vertices: lex-sorted exact vertices (tuples of ints/Fractions).
        ineqs: list of (normal, offset) rows with normal.m + offset >= 0
            on the polytope. For `from_points` this is the facet list and
            is only available in the full-dimensional case (None otherwise);
            for `from_inequalities` it is the defining system as given.
    """

    __slots__ = ("n", "dim", "vertices", "ineqs", "_hull")

    def __init__(self, n, dim, vertices, ineqs, hull=None):
        self.n = n
        self.dim = dim
        self.vertices = vertices
        self.ineqs = ineqs
        self._hull = hull

    @classmethod
    def from_points(cls, points):
        pts = list(points)
        if not pts:
            return cls(0, -1, [], None)
        h = convex_hull(pts)
        verts = [h.points[i] for i in sorted(h.vertex_indices)]
        return cls(len(pts[0]), h.dim, sorted(verts), h.facets, hull=h)

    @classmethod
    def from_inequalities(cls, a, b):
        """Polytope {m : a m + b >= 0}; `a` integer rows, `b` ints or Fractions.

        Vertices come from exact basic solutions (all n x n subsystems),
        so the input system must define a bounded set.
        """
        k = len(a)
        if k == 0:
            raise ValueError("empty inequality system")
        n = len(a[0])
        rows = [tuple(int(x) for x in r) for r in a]
        offs = [_canon_num(Fraction(x)) for x in b]
        verts = set()
        for sub in combinations(range(k), n):
            m = [rows[i] for i in sub]
            rhs = [-offs[i] for i in sub]
            x = frac_solve_square(m, rhs)
            if x is None:
                continue
            if all(dot(rows[i], x) + offs[i] >= 0 for i in range(k)):
                verts.add(tuple(_canon_num(v) for v in x))
        vlist = sorted(verts)
        if not vlist:
            return cls(n, -1, [], list(zip(rows, offs)))
        ech = []
        for p in vlist[1:]:
            ech, _ = _ech_append(ech, [p[j] - vlist[0][j] for j in range(n)])
        return cls(n, len(ech), vlist, list(zip(rows, offs)))

    @property
    def is_empty(self):
        return self.dim < 0

    def contains(self, pt):
        """Exact membership test (requires inequality data)."""
        if self.ineqs is None:
            raise ValueError("no inequality representation available")
        if self.is_empty:
            return False
        return all(dot(g, pt) + c >= 0 for g, c in self.ineqs)

    def bounding_box(self):
        """Per-coordinate integer floor/ceil bounds of the vertex set."""
        los = [math.floor(min(v[j] for v in self.vertices)) for j in range(self.n)]
        his = [math.ceil(max(v[j] for v in self.vertices)) for j in range(self.n)]
        return los, his

    def lattice_points(self):
        """All integer points of the polytope, lex-sorted."""
        if self.is_empty:
            return []
        if self.ineqs is None:
            raise ValueError("lattice point enumeration needs inequality data")
        los, his = self.bounding_box()
        ranges = [range(lo, hi + 1) for lo, hi in zip(los, his)]
        out = []
        rows = self.ineqs
        for m in product(*ranges):
            if all(dot(g, m) + c >= 0 for g, c in rows):
                out.append(m)
        return out

    def relint_lattice_points(self):
        """Integer points in the relative interior, lex-sorted.

        A defining row that vanishes identically on the polytope is an
        implicit equality and must stay tight; every other row must be
        strict.
        """
        if self.is_empty:
            return []
        if self.ineqs is None:
            raise ValueError("relative interior needs inequality data")
        const_zero = [
            all(dot(g, v) + c == 0 for v in self.vertices) for g, c in self.ineqs
        ]
        los, his = self.bounding_box()
        ranges = [range(lo, hi + 1) for lo, hi in zip(los, his)]
        out = []
        for m in product(*ranges):
            ok = True
            for (g, c), cz in zip(self.ineqs, const_zero):
                val = dot(g, m) + c
                if cz:
                    if val != 0:
                        ok = False
                        break
                elif val <= 0:
                    ok = False
                    break
            if ok:
                out.append(m)
        return out

    def volume(self):
        """Euclidean volume as an exact Fraction (0 when lower-dimensional)."""
        if self.is_empty:
            return Fraction(0)
        if self._hull is None:
            self._hull = convex_hull(self.vertices)
        return self._hull.volume()

    def minkowski(self, other):
        """Minkowski sum with another polytope in the same ambient space."""
        if self.n != other.n:
            raise ValueError("ambient dimensions differ")
        if self.is_empty or other.is_empty:
            raise ValueError("Minkowski sum with an empty polytope")
        sums = {
            tuple(_canon_num(x + y) for x, y in zip(u, v))
            for u in self.vertices
            for v in other.vertices
        }
        return Polytope.from_points(sums)

    def dilate(self, k):
        """Scale by a positive integer factor."""
        if k < 1:
            raise ValueError("dilation factor must be a positive integer")
        verts = [tuple(_canon_num(k * x) for x in v) for v in self.vertices]
        ineqs = None
        if self.ineqs is not None:
            ineqs = [(g, _canon_num(k * c)) for g, c in self.ineqs]
        return Polytope(self.n, self.dim, verts, ineqs)

    def codegree(self):
        """Smallest c >= 1 such that c*P has an interior lattice point.

        Only defined for full-dimensional polytopes; for those it is at
        most dim + 1.
        """
        if self.dim != self.n:
            raise ValueError("codegree needs a full-dimensional polytope")
        for c in range(1, self.n + 2):
            if self.dilate(c).relint_lattice_points():
                return c
        raise AssertionError("codegree exceeded dim + 1, input is not a lattice polytope?")

    def __repr__(self):
        return f"Polytope(n={self.n}, dim={self.dim}, vertices={len(self.vertices)})"


def mixed_volume(supports):
    """Mixed volume of n lattice polytopes in Z^n, BKK-normalized.

    Computed by inclusion-exclusion over Minkowski subsums:
    MV = sum over nonempty J of (-1)^(n-|J|) vol(sum of P_j, j in J).
    With this normalization MV of n unit simplices is 1, so the result is
    the generic torus root count.

    Args:
        supports: length-n list, each entry a Polytope or an iterable of
            integer exponent tuples.

    Returns:
        the mixed volume as an int.
    """
    polys = []
    for s in supports:
        polys.append(s if isinstance(s, Polytope) else Polytope.from_points(list(s)))
    n = polys[0].n
    if len(polys) != n:
        raise ValueError(f"need exactly {n} supports in dimension {n}, got {len(polys)}")
    total = Fraction(0)
    for mask in range(1, 1 << n):
        members = [polys[j] for j in range(n) if mask >> j & 1]
        pts = [tuple([0] * n)]
        for p in members:
            pts = [
                tuple(x + y for x, y in zip(s, v)) for s in pts for v in p.vertices
            ]
        vol = Polytope.from_points(set(pts)).volume()
        sign = -1 if (n - len(members)) % 2 else 1
        total += sign * vol
    if total.denominator != 1:
        raise AssertionError(f"mixed volume came out non-integral: {total}")
    return int(total)
