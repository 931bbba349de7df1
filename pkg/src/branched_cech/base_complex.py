"""The combinatorial base: boundary complex of the reflexive 4-simplex,
its discriminant graph, hexagonal regions, the 25-element open cover, and
the nerve of that cover.

Cell ids are vertex-index tuples of the polytope: an edge is a sorted pair,
a two-face a sorted triple, a three-cell a sorted quadruple. Cover elements
are ('E', edge), ('F', face), ('T', cell); the global ordering used for all
Cech sign conventions is edges < faces < cells, lexicographic within type.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import lattice


class UnsupportedPolytope(ValueError):
    pass


class FaceGeometry:
    """Affine frame for one triangular 2-face.

    Corners are the polytope vertex indices (a < b < c); local coordinates
    (s, t) refer to the lattice point corner_a + s*u + t*v where u, v are the
    primitive edge steps toward b and c. Side length is 5 for the quintic.
    """

    def __init__(self, polytope, face_ids, side):
        self.face = face_ids
        a, b, c = face_ids
        self.origin = polytope.vertices[a]
        self.side = side
        diff_u = tuple(polytope.vertices[b][i] - self.origin[i] for i in range(4))
        diff_v = tuple(polytope.vertices[c][i] - self.origin[i] for i in range(4))
        assert all(d % side == 0 for d in diff_u + diff_v)
        self.u = tuple(d // side for d in diff_u)
        self.v = tuple(d // side for d in diff_v)

    def point(self, s, t):
        return tuple(self.origin[i] + s * self.u[i] + t * self.v[i]
                     for i in range(4))

    def rational_point(self, s, t):
        return tuple(Fraction(self.origin[i]) + s * self.u[i] + t * self.v[i]
                     for i in range(4))

    def lattice_coords(self):
        n = self.side
        return [(s, t) for s in range(n + 1) for t in range(n + 1 - s)]

    def interior_coords(self):
        n = self.side
        return [(s, t) for s in range(1, n) for t in range(1, n - s)]

    def unit_triangles(self):
        """('U', s, t) has corners (s,t),(s+1,t),(s,t+1); ('D', s, t) has
        corners (s+1,t),(s,t+1),(s+1,t+1)."""
        n = self.side
        tris = [('U', s, t) for s in range(n) for t in range(n - s)]
        tris += [('D', s, t) for s in range(n - 1) for t in range(n - 1 - s)]
        return tris

    @staticmethod
    def triangle_corners(tri):
        kind, s, t = tri
        if kind == 'U':
            return ((s, t), (s + 1, t), (s, t + 1))
        return ((s + 1, t), (s, t + 1), (s + 1, t + 1))

    def barycenter(self, tri):
        cs = self.triangle_corners(tri)
        s = Fraction(sum(c[0] for c in cs), 3)
        t = Fraction(sum(c[1] for c in cs), 3)
        return self.rational_point(s, t)

    def unit_edges(self):
        """Sorted-corner pairs of all unit edges, with the list of adjacent
        unit triangles for each."""
        adj = {}
        for tri in self.unit_triangles():
            cs = self.triangle_corners(tri)
            for x, y in combinations(sorted(cs), 2):
                adj.setdefault((x, y), []).append(tri)
        return adj

    def sides_of(self, coord):
        """Polytope edges of the face containing a lattice coord (corners lie
        on two), as (edge_id, position) with the position indexing the point
        along the edge from its smaller vertex."""
        a, b, c = self.face
        s, t = coord
        n = self.side
        out = []
        if t == 0:
            out.append(((a, b), s))
        if s == 0:
            out.append(((a, c), t))
        if s + t == n:
            out.append(((b, c), t))
        return out


class BaseComplex:
    """Graded cells of the boundary 3-sphere with incidence data."""

    def __init__(self, polytope):
        self.polytope = polytope
        n = len(polytope.vertices)
        self.vertices = [(i,) for i in range(n)]
        self.edges = [tuple(e) for e in combinations(range(n), 2)]
        self.faces = [tuple(f) for f in combinations(range(n), 3)]
        self.cells = [tuple(t) for t in combinations(range(n), 4)]
        self.side = 5
        self.geometry = {f: FaceGeometry(polytope, f, self.side)
                         for f in self.faces}

    def cells_of_dim(self, d):
        return [self.vertices, self.edges, self.faces, self.cells][d]

    def faces_containing_edge(self, edge):
        return [f for f in self.faces if set(edge) <= set(f)]

    def cells_containing(self, face_ids):
        s = set(face_ids)
        return [t for t in self.cells if s <= set(t)]

    def edge_lattice_points(self, edge):
        """Lattice points along an edge in canonical order (6 for side 5)."""
        p = self.polytope.vertices[edge[0]]
        q = self.polytope.vertices[edge[1]]
        step = tuple((q[i] - p[i]) // self.side for i in range(4))
        return [tuple(p[i] + k * step[i] for i in range(4))
                for k in range(self.side + 1)]

    def edge_direction_mod2(self, edge):
        p = self.polytope.vertices[edge[0]]
        q = self.polytope.vertices[edge[1]]
        step = tuple((q[i] - p[i]) // self.side for i in range(4))
        return _mod2(step)

    def counts(self):
        return (len(self.vertices), len(self.edges),
                len(self.faces), len(self.cells))


def _mod2(vec):
    out = 0
    for i, c in enumerate(vec):
        if c & 1:
            out |= 1 << i
    return out


def build_base(P) -> BaseComplex:
    """Validate the polytope and build the cell complex of its boundary.

    Only boundaries combinatorially equivalent to the side-5 reflexive
    4-simplex are supported.
    """
    if len(P.vertices) != 5:
        raise UnsupportedPolytope("unsupported: expected a 4-simplex")
    if not P.is_full_dimensional():
        raise UnsupportedPolytope("not full-dimensional")
    if not lattice.is_reflexive(P):
        raise UnsupportedPolytope("unsupported: polytope is not reflexive")
    faces = lattice.face_lattice(P)
    by_dim = {d: [f for f in faces if f.dim == d] for d in range(4)}
    if tuple(len(by_dim[d]) for d in range(4)) != (5, 10, 10, 5):
        raise UnsupportedPolytope("unsupported: wrong face counts")
    for d, want in ((1, 4), (2, 6), (3, 4)):
        for f in by_dim[d]:
            if len(f.interior_points) != want:
                raise UnsupportedPolytope(
                    f"unsupported: a dim-{d} face has "
                    f"{len(f.interior_points)} interior points, wanted {want}")
    if len(lattice.enumerate_lattice_points(P)) != 126:
        raise UnsupportedPolytope("unsupported: wrong lattice point total")
    return BaseComplex(P)


class DiscriminantGraph:
    """Trivalent discriminant graph.

    Vertices carry a sign: negative vertices are barycenters of unit
    triangles inside two-faces, positive vertices are midpoints of the unit
    segments of polytope edges. Segments join two graph vertices inside a
    single host two-face (a negative-negative segment passes through the
    midpoint of an interior unit edge; a negative-positive segment is the
    stub reaching the polytope edge).
    """

    def __init__(self, base):
        self.base = base
        self.vertices = []   # (id, sign, host, location)
        self.segments = []   # (vid1, vid2, host_face, crossed_direction_mod2)
        self._build()

    def _build(self):
        base = self.base
        index = {}

        def add_vertex(key, sign, host, location):
            if key not in index:
                index[key] = len(self.vertices)
                self.vertices.append((key, sign, host, location))
            return index[key]

        for f in base.faces:
            geo = base.geometry[f]
            adj = geo.unit_edges()
            for tri in geo.unit_triangles():
                add_vertex(('neg', f, tri), 'negative', f, geo.barycenter(tri))
            for (x, y), tris in sorted(adj.items()):
                direction = _mod2((geo.u[0] * (y[0] - x[0]) + geo.v[0] * (y[1] - x[1]),
                                   geo.u[1] * (y[0] - x[0]) + geo.v[1] * (y[1] - x[1]),
                                   geo.u[2] * (y[0] - x[0]) + geo.v[2] * (y[1] - x[1]),
                                   geo.u[3] * (y[0] - x[0]) + geo.v[3] * (y[1] - x[1])))
                if len(tris) == 2:
                    v1 = index[('neg', f, tris[0])]
                    v2 = index[('neg', f, tris[1])]
                    self.segments.append((v1, v2, f, direction))
                else:
                    # Boundary unit edge: stub from the barycenter to the
                    # positive vertex on the polytope edge.
                    shared = {s[0]: s[1] for s in geo.sides_of(x)}
                    common = [(e, shared[e], pos) for e, pos in geo.sides_of(y)
                              if e in shared]
                    assert len(common) == 1
                    edge, pos_x, pos_y = common[0]
                    k = min(pos_x, pos_y) + 1
                    mid = tuple((Fraction(px + qx, 2)) for px, qx in zip(
                        geo.rational_point(*x), geo.rational_point(*y)))
                    pv = add_vertex(('pos', edge, k), 'positive', edge, mid)
                    nv = index[('neg', f, tris[0])]
                    self.segments.append((nv, pv, f, direction))

    def degree(self, vid):
        return sum(1 for s in self.segments if vid in s[:2])

    def positive_vertices(self):
        return [v for v in self.vertices if v[1] == 'positive']

    def negative_vertices(self):
        return [v for v in self.vertices if v[1] == 'negative']


def build_discriminant(base: BaseComplex) -> DiscriminantGraph:
    return DiscriminantGraph(base)


class Hexagon:
    """Hexagonal region around one interior lattice point of a two-face.

    boundary_arcs lists, in cyclic (anticlockwise) order, the six walls of
    the discriminant crossed toward each lattice neighbor, as
    (neighbor_delta, crossed_unit_edge) pairs.
    """

    NEIGHBOR_DELTAS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

    def __init__(self, face, center_coord, geometry):
        self.face = face
        self.center_coord = center_coord
        self.center = geometry.point(*center_coord)
        s, t = center_coord
        self.boundary_arcs = []
        for ds, dt in self.NEIGHBOR_DELTAS:
            x, y = sorted(((s, t), (s + ds, t + dt)))
            self.boundary_arcs.append(((ds, dt), (x, y)))

    def corner_triangle(self, i):
        """Unit triangle between arcs i and i+1 (hexagon corner)."""
        d1 = self.NEIGHBOR_DELTAS[i]
        d2 = self.NEIGHBOR_DELTAS[(i + 1) % 6]
        s, t = self.center_coord
        corners = sorted(((s, t), (s + d1[0], t + d1[1]), (s + d2[0], t + d2[1])))
        return _triangle_from_corners(corners)


def _triangle_from_corners(corners):
    ss = [c[0] for c in corners]
    ts = [c[1] for c in corners]
    s0, t0 = min(ss), min(ts)
    if (s0, t0) in corners:
        return ('U', s0, t0)
    return ('D', s0, t0)


def hexagons_of_face(base: BaseComplex, face):
    geo = base.geometry[face]
    return [Hexagon(face, c, geo) for c in sorted(geo.interior_coords())]


# ---------------------------------------------------------------------------
# Cover and nerve
# ---------------------------------------------------------------------------

def element_key(el):
    """Global sort key: edges < faces < cells, lexicographic within type."""
    kind, ids = el
    order = {'E': 0, 'F': 1, 'T': 2}
    return (order[kind], ids)


def build_cover(base: BaseComplex):
    """The 25 cover elements; vertex neighborhoods are absorbed into the
    edge elements, so only dims 1..3 appear."""
    cover = [('E', e) for e in base.edges]
    cover += [('F', f) for f in base.faces]
    cover += [('T', t) for t in base.cells]
    return sorted(cover, key=element_key)


def _shared_vertex(e1, e2):
    common = set(e1) & set(e2)
    return min(common) if len(common) == 1 else None


def build_nerve(cover):
    """Nerve simplices of the cover, by ascending degree.

    The nonempty-intersection rules: edge elements meet whenever they share
    a polytope vertex and meet every face/cell element whose face contains
    them; a face element meets the two cell elements containing it; distinct
    face elements and distinct cell elements never meet. Higher intersections
    are the compatible combinations; nothing has arity above 4.
    """
    edges = [el for el in cover if el[0] == 'E']
    faces = [el for el in cover if el[0] == 'F']
    cells = [el for el in cover if el[0] == 'T']

    def simplex(*els):
        return tuple(sorted(els, key=element_key))

    nerve = {0: [simplex(el) for el in cover], 1: [], 2: [], 3: []}

    for e1, e2 in combinations(edges, 2):
        if _shared_vertex(e1[1], e2[1]) is not None:
            nerve[1].append(simplex(e1, e2))
    for f in faces:
        for e in edges:
            if set(e[1]) <= set(f[1]):
                nerve[1].append(simplex(e, f))
    for t in cells:
        for e in edges:
            if set(e[1]) <= set(t[1]):
                nerve[1].append(simplex(e, t))
        for f in faces:
            if set(f[1]) <= set(t[1]):
                nerve[1].append(simplex(f, t))

    for e1, e2, e3 in combinations(edges, 3):
        common = set(e1[1]) & set(e2[1]) & set(e3[1])
        if len(common) == 1:
            nerve[2].append(simplex(e1, e2, e3))
    for f in faces:
        fs = set(f[1])
        f_edges = [e for e in edges if set(e[1]) <= fs]
        for e1, e2 in combinations(f_edges, 2):
            nerve[2].append(simplex(e1, e2, f))
    for t in cells:
        ts = set(t[1])
        t_edges = [e for e in edges if set(e[1]) <= ts]
        for e1, e2 in combinations(t_edges, 2):
            if _shared_vertex(e1[1], e2[1]) is not None:
                nerve[2].append(simplex(e1, e2, t))
        for f in faces:
            if set(f[1]) <= ts:
                for e in edges:
                    if set(e[1]) <= set(f[1]):
                        nerve[2].append(simplex(e, f, t))

    vertex_edges = {}
    for e in edges:
        for v in e[1]:
            vertex_edges.setdefault(v, []).append(e)
    for v, es in sorted(vertex_edges.items()):
        if len(es) >= 4:
            for quad in combinations(es, 4):
                nerve[3].append(simplex(*quad))
    for t in cells:
        ts = set(t[1])
        t_edges = [e for e in edges if set(e[1]) <= ts]
        for v in sorted(ts):
            at_v = [e for e in t_edges if v in e[1]]
            if len(at_v) == 3:
                nerve[3].append(simplex(*(at_v + [('T', t[1])])))
        for f in faces:
            if set(f[1]) <= ts:
                f_edges = [e for e in edges if set(e[1]) <= set(f[1])]
                for e1, e2 in combinations(f_edges, 2):
                    nerve[3].append(simplex(e1, e2, f, ('T', t[1])))

    for d in nerve:
        nerve[d] = sorted(set(nerve[d]))
    assert [len(nerve[d]) for d in range(4)] == [25, 110, 170, 85]
    return nerve


def enclosed_branches(simplex):
    """Branch descriptors (face, edge) whose discriminant walls are linked by
    loops inside the intersection region of the simplex.

    A descriptor (f, e) stands for the common monodromy of the five walls of
    face f that cross the polytope edge e. Regions touching a cell element
    are one-sided and enclose nothing; so do all vertex-ball regions.
    """
    kinds = [el[0] for el in simplex]
    if kinds == ['E']:
        e = simplex[0][1]
        return tuple(sorted((f, e) for f in _faces_containing(e)))
    if kinds == ['F']:
        f = simplex[0][1]
        chart = f[0]
        sides = [tuple(sorted((chart, w))) for w in f if w != chart]
        return tuple(sorted((f, s) for s in sides))
    if kinds == ['E', 'F']:
        e, f = simplex[0][1], simplex[1][1]
        return ((f, e),)
    return ()


def _faces_containing(edge):
    rest = [w for w in range(5) if w not in edge]
    return [tuple(sorted(edge + (w,))) for w in rest]


def nerve_report(base, nerve, component_counts):
    """JSON-ready nerve summary used by the engine and regression tests."""
    report = {"elements": len(nerve[0]), "by_degree": {}}
    for d in range(4):
        total = sum(component_counts[s] for s in nerve[d])
        report["by_degree"][str(d)] = {
            "simplices": len(nerve[d]),
            "components": total,
        }
    return report
