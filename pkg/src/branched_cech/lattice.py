"""Lattice polytope combinatorics in dimension four: face lattice,
lattice-point enumeration, and the lattice-point Hodge-number formula for
reflexive polytopes.

All computations are exact; polytopes here are tiny, so enumeration uses
bounding-box scans with half-space membership tests rather than any
polyhedral-decomposition machinery.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd

# A lattice point is a plain tuple of 4 ints.
LatticePoint4 = tuple


class NotFullDimensional(ValueError):
    pass


class NotReflexive(ValueError):
    pass


def _affine_rank(points):
    if not points:
        return -1
    base = points[0]
    vecs = [tuple(p[i] - base[i] for i in range(len(base))) for p in points[1:]]
    return _rank_int(vecs)


def _rank_int(vecs):
    rows = [list(map(Fraction, v)) for v in vecs if any(v)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for j in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][j]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][j]:
                f = rows[i][j] / pr[j]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def _primitive(vec):
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g == 0:
        return vec
    return tuple(v // g for v in vec)


def _in_convex_hull(point, generators):
    """Exact test whether point lies in conv(generators) (any dimension).

    By Caratheodory it suffices to test all subsets of size <= dim+2 via
    exact rational linear solves; the inputs here never exceed ~10 points.
    """
    dim = len(point)
    gens = list(dict.fromkeys(generators))
    if point in gens:
        return True
    for k in range(1, min(len(gens), dim + 1) + 1):
        for subset in combinations(gens, k):
            lam = _barycentric(point, subset)
            if lam is not None and all(l >= 0 for l in lam):
                return True
    return False


def _barycentric(point, subset):
    """Solve sum(l_i * s_i) = point, sum(l_i) = 1 exactly; None if singular
    or unsolvable."""
    n = len(subset)
    dim = len(point)
    rows = []
    rhs = []
    for c in range(dim):
        rows.append([Fraction(s[c]) for s in subset])
        rhs.append(Fraction(point[c]))
    rows.append([Fraction(1)] * n)
    rhs.append(Fraction(1))
    # Gaussian elimination on the (dim+1) x n system.
    aug = [row + [r] for row, r in zip(rows, rhs)]
    pivots = []
    r = 0
    for j in range(n):
        piv = None
        for i in range(r, len(aug)):
            if aug[i][j]:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pr = aug[r]
        for i in range(len(aug)):
            if i != r and aug[i][j]:
                f = aug[i][j] / pr[j]
                aug[i] = [a - f * b for a, b in zip(aug[i], pr)]
        pivots.append(j)
        r += 1
    # Inconsistent?
    for i in range(r, len(aug)):
        if aug[i][n]:
            return None
    lam = [Fraction(0)] * n
    for i, j in enumerate(pivots):
        lam[j] = aug[i][n] / aug[i][j]
    # Free variables left at zero; verify.
    for row, want in zip(rows, rhs):
        if sum(a * l for a, l in zip(row, lam)) != want:
            return None
    return lam


class LatticePolytope:
    """Convex hull of integer points in Z^4, stored by its vertex list.

    The vertex list must consist exactly of the extreme points.
    """

    def __init__(self, vertices):
        vertices = [tuple(int(c) for c in v) for v in vertices]
        if not vertices:
            raise ValueError("polytope needs at least one vertex")
        if any(len(v) != 4 for v in vertices):
            raise ValueError("vertices must have 4 coordinates")
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertices")
        for v in vertices:
            others = [w for w in vertices if w != v]
            if others and _in_convex_hull(v, others):
                raise ValueError(f"vertex {v} is not an extreme point")
        self.vertices = sorted(vertices)
        self.dim = _affine_rank(self.vertices)
        self._facets = None

    def is_full_dimensional(self):
        return self.dim == 4

    def facet_inequalities(self):
        """List of (normal, c) with <normal, x> <= c facet-defining; normals
        primitive integer vectors. Requires full dimension."""
        if not self.is_full_dimensional():
            raise NotFullDimensional("not full-dimensional")
        if self._facets is not None:
            return self._facets
        facets = {}
        for quad in combinations(range(len(self.vertices)), 4):
            pts = [self.vertices[i] for i in quad]
            if _affine_rank(pts) != 3:
                continue
            normal = _hyperplane_normal(pts)
            if normal is None:
                continue
            c = sum(a * b for a, b in zip(normal, pts[0]))
            vals = [sum(a * b for a, b in zip(normal, v)) for v in self.vertices]
            if all(v <= c for v in vals):
                facets[(normal, c)] = True
            elif all(v >= c for v in vals):
                neg = tuple(-a for a in normal)
                facets[(neg, -c)] = True
        self._facets = sorted(facets)
        return self._facets

    def contains(self, point):
        if self.is_full_dimensional():
            return all(
                sum(a * b for a, b in zip(n, point)) <= c
                for n, c in self.facet_inequalities())
        return _in_convex_hull(point, self.vertices)

    def bounding_box(self):
        lo = [min(v[i] for v in self.vertices) for i in range(4)]
        hi = [max(v[i] for v in self.vertices) for i in range(4)]
        return lo, hi


def _hyperplane_normal(pts):
    """Primitive integer normal of the affine span of 4 points (rank 3)."""
    base = pts[0]
    vecs = [tuple(p[i] - base[i] for i in range(4)) for p in pts[1:]]
    # Kernel of the 3x4 matrix via exact cross-product style minors.
    minors = []
    for j in range(4):
        cols = [k for k in range(4) if k != j]
        sub = [[v[c] for c in cols] for v in vecs]
        d = (sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
             - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
             + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]))
        minors.append(d if j % 2 == 0 else -d)
    if not any(minors):
        return None
    return _primitive(tuple(minors))


def enumerate_lattice_points(P: LatticePolytope):
    """All lattice points of the closed polytope, sorted lexicographically."""
    lo, hi = P.bounding_box()
    out = []
    if P.is_full_dimensional():
        ineqs = P.facet_inequalities()
        for pt in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
            if all(sum(a * b for a, b in zip(n, pt)) <= c for n, c in ineqs):
                out.append(pt)
    else:
        for pt in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
            if _in_convex_hull(pt, P.vertices):
                out.append(pt)
    return out


class Face:
    """Proper face of a full-dimensional polytope."""

    def __init__(self, polytope, vertex_ids, facet_ids):
        self.polytope = polytope
        self.vertex_ids = tuple(sorted(vertex_ids))
        self.facet_ids = tuple(sorted(facet_ids))
        self.vertices = [polytope.vertices[i] for i in self.vertex_ids]
        self.dim = _affine_rank(self.vertices)
        self.lattice_points = None
        self.interior_points = None
        self.subfaces = []
        self.superfaces = []

    def __repr__(self):
        return f"Face(dim={self.dim}, vertices={self.vertex_ids})"


def face_lattice(P: LatticePolytope):
    """All proper faces (dims 0..3) with incidence and point data.

    Faces are intersections of facets; each is represented by its vertex set
    and carries its lattice points and relative-interior points.
    """
    ineqs = P.facet_inequalities()
    nverts = len(P.vertices)
    # Vertex sets of facets.
    facet_vsets = []
    for n, c in ineqs:
        vs = frozenset(
            i for i, v in enumerate(P.vertices)
            if sum(a * b for a, b in zip(n, v)) == c)
        facet_vsets.append(vs)
    # Close under intersection.
    seen = {}
    for k, vs in enumerate(facet_vsets):
        seen.setdefault(vs, set()).add(k)
    frontier = list(seen)
    while frontier:
        new = []
        for vs in frontier:
            for k, fv in enumerate(facet_vsets):
                inter = vs & fv
                if inter and inter not in seen:
                    seen[inter] = set()
                    new.append(inter)
        frontier = new
    # Facet membership per face.
    faces = []
    for vs in sorted(seen, key=lambda s: (len(s), sorted(s))):
        fids = [k for k, fv in enumerate(facet_vsets) if vs <= fv]
        face = Face(P, vs, fids)
        if 0 <= face.dim <= 3:
            faces.append(face)
    # Lattice points per face: points of P satisfying this face's equalities.
    all_points = enumerate_lattice_points(P)
    for face in faces:
        eqs = [ineqs[k] for k in face.facet_ids]
        face.lattice_points = [
            pt for pt in all_points
            if all(sum(a * b for a, b in zip(n, pt)) == c for n, c in eqs)]
        assert len(face.lattice_points) >= len(face.vertex_ids)
    # Incidence and relative interiors.
    by_vset = {frozenset(f.vertex_ids): f for f in faces}
    for f in faces:
        for g in faces:
            if f is not g and set(f.vertex_ids) < set(g.vertex_ids):
                f.superfaces.append(g)
                g.subfaces.append(f)
    for f in faces:
        boundary = set()
        for g in f.subfaces:
            boundary.update(g.lattice_points)
        f.interior_points = [p for p in f.lattice_points if p not in boundary]
    assert by_vset
    return faces


def relative_interior_points(face: Face):
    """Lattice points of the face lying on no proper subface."""
    if face.interior_points is None:
        raise ValueError("face does not belong to a computed face lattice")
    return list(face.interior_points)


def interior_points(P: LatticePolytope):
    """Lattice points strictly inside the full-dimensional polytope."""
    ineqs = P.facet_inequalities()
    return [
        pt for pt in enumerate_lattice_points(P)
        if all(sum(a * b for a, b in zip(n, pt)) < c for n, c in ineqs)]


def is_reflexive(P: LatticePolytope):
    return P.is_full_dimensional() and interior_points(P) == [(0, 0, 0, 0)]


def batyrev_h21(P: LatticePolytope) -> int:
    """l(P) - n - 1 - sum of facet interior counts, with n = 4.

    l(P) is the total lattice-point count of the polytope (interior point
    included), which is what reproduces the expected values for reflexive
    simplices.
    """
    if not is_reflexive(P):
        raise NotReflexive("not reflexive")
    total = len(enumerate_lattice_points(P))
    faces = face_lattice(P)
    facet_interior = sum(
        len(f.interior_points) for f in faces if f.dim == 3)
    return total - 4 - 1 - facet_interior


def count_antik_sections(rays) -> int:
    """Number of lattice points m with <m, v> >= -1 for every ray generator v.

    This is the dimension of the space of global sections of the
    anticanonical sheaf of the complete toric variety with those rays.
    """
    rays = [tuple(map(int, r)) for r in getattr(rays, "rays", rays)]
    if _recession_nontrivial(rays):
        raise ValueError("fan is not complete: section polytope unbounded")
    lo, hi = _section_box(rays)
    count = 0
    for pt in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        if all(sum(a * b for a, b in zip(pt, v)) >= -1 for v in rays):
            count += 1
    return count


def _recession_nontrivial(rays):
    """True when some m != 0 satisfies <m, v> >= 0 for all rays."""
    dim = 4
    candidates = set()
    for triple in combinations(rays, 3):
        if _rank_int(triple) != 3:
            continue
        normal = _hyperplane_normal([(0, 0, 0, 0)] + list(triple))
        if normal is None:
            continue
        candidates.add(normal)
        candidates.add(tuple(-a for a in normal))
    # Also the degenerate case of fewer than dim independent rays.
    if _rank_int(rays) < dim:
        return True
    for m in candidates:
        if any(m) and all(sum(a * b for a, b in zip(m, v)) >= 0 for v in rays):
            return True
    return False


def _section_box(rays):
    """Exact coordinate bounds of {m : <m, v_r> >= -1} via vertex enumeration."""
    verts = []
    for quad in combinations(range(len(rays)), 4):
        sub = [rays[k] for k in quad]
        d = det([list(r) for r in sub])
        if not d:
            continue
        # Solve <m, v> = -1 for the four chosen rays by Cramer's rule.
        m = []
        for j in range(4):
            cols = []
            for jj in range(4):
                if jj == j:
                    cols.append([-1] * 4)
                else:
                    cols.append([sub[i][jj] for i in range(4)])
            mat = [[cols[jj][i] for jj in range(4)] for i in range(4)]
            m.append(Fraction(det(mat), d))
        if all(sum(a * b for a, b in zip(m, v)) >= -1 for v in rays):
            verts.append(m)
    assert verts, "section polytope has no vertices"
    lo = [int(min(v[i] for v in verts).__ceil__()) for i in range(4)]
    hi = [int(max(v[i] for v in verts).__floor__()) for i in range(4)]
    return lo, hi


def det(rows):
    from .exact_linalg import det as _d
    return _d(rows)


QUINTIC_VERTICES = (
    (-1, -1, -1, -1),
    (4, -1, -1, -1),
    (-1, 4, -1, -1),
    (-1, -1, 4, -1),
    (-1, -1, -1, 4),
)


def quintic_polytope() -> LatticePolytope:
    """The reflexive 4-simplex whose boundary carries the whole computation."""
    return LatticePolytope(QUINTIC_VERTICES)


def polytope_from_json(data) -> LatticePolytope:
    if not isinstance(data, dict) or "vertices" not in data:
        raise ValueError('polytope JSON must be {"vertices": [[...], ...]}')
    return LatticePolytope(data["vertices"])
