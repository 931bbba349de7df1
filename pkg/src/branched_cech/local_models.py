"""Finitely presented first-homology models of the cover-element preimages
and their pairwise intersections, with generator-level inclusion maps.

The preimage of a face element is computed honestly: the closed two-face
decomposes into 21 lattice-point regions separated by discriminant walls
(plus dents at the positive vertices on its boundary, which the face element
excludes), and the branched cover of that region complex is assembled as an
explicit CW complex. Hexagon pieces, glued faces, torsion classes, the three
corner circles and all restriction images of gap circles are then exact
cellular computations. Edge elements and edge-face intersections retract
onto wedges of gap circles, so they are presented freely on labeled circles.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .base_complex import _mod2
from .exact_linalg import (AbelianGroup, BitMatrix, SparseIntMatrix,
                           invariant_factors, smith_normal_form, solve_int)
from .monodromy import dot2


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

class H1Presentation:
    """Abelianized presentation: H1 = Z^generators / row span of relations."""

    def __init__(self, piece_id, generators, relation_rows, component_count):
        self.piece_id = piece_id
        self.generators = list(generators)
        self.relations = SparseIntMatrix.from_rows(
            relation_rows, len(generators)) if relation_rows else \
            SparseIntMatrix(0, len(generators))
        self.component_count = component_count

    def group(self) -> AbelianGroup:
        facs = invariant_factors(self.relations.transpose())
        return AbelianGroup(len(self.generators) - len(facs), facs)

    def functional_kernel(self):
        """Integer basis of Hom(H1, Z) as vectors on the generators."""
        if self.relations.rows == 0:
            n = len(self.generators)
            basis = []
            for k in range(n):
                v = [0] * n
                v[k] = 1
                basis.append(v)
            return basis
        form = smith_normal_form(self.relations)
        r = len([d for d in form.invariant_factors if d])
        cols = []
        V = form.V
        for k in range(r, self.relations.cols):
            cols.append([V[i, k] for i in range(self.relations.cols)])
        return cols

    def functional_kernel_mod2(self):
        """Basis of Hom(H1, Z/2) as bitmasks over the generators."""
        n = len(self.generators)
        if self.relations.rows == 0:
            return [1 << k for k in range(n)]
        return self.relations.mod2().nullspace()

    def to_json(self):
        return {
            "piece": self.piece_id,
            "generators": [list(map(str, g)) for g in self.generators],
            "relations": sorted(
                [i, j, v] for (i, j), v in self.relations.entries.items()),
            "components": self.component_count,
            "group": self.group().to_json(),
        }


class InclusionMap:
    """Generator-image matrix of a map between presented pieces.

    matrix[i] expresses the image of source generator i over the target
    generators (well-defined because the sources here are free).
    """

    def __init__(self, source, target, matrix):
        self.source = source
        self.target = target
        self.matrix = matrix
        assert source.relations.rows == 0, "source must be freely presented"

    def dual_block(self, functionals):
        """Rows: target functionals restricted to the source generators."""
        return [[sum(f[j] * row[j] for j in range(len(row)))
                 for row in self.matrix] for f in functionals]

    def dual_block_mod2(self, functional_masks):
        out = []
        for f in functional_masks:
            out.append([
                bin(f & _mask(row)) .count("1") & 1 if False else
                sum((row[j] & 1) * ((f >> j) & 1) for j in range(len(row))) & 1
                for row in self.matrix])
        return out


def _mask(row):
    m = 0
    for j, v in enumerate(row):
        if v & 1:
            m |= 1 << j
    return m


class LocalCohomology:
    """Sheaf data of one piece: component count plus H^1/H^2 over Z and Z/2."""

    def __init__(self, h0, h1_Z, h2_Z, h1_Z2_dim, h2_Z2_dim):
        self.h0 = h0
        self.h1_Z = h1_Z
        self.h2_Z = h2_Z
        self.h1_Z2_dim = h1_Z2_dim
        self.h2_Z2_dim = h2_Z2_dim


def local_cohomology(pres: H1Presentation, ring="Z") -> LocalCohomology:
    """Cohomology of a piece from its H1 presentation (all pieces here have
    vanishing H2, so H^2 is the Ext dual of the H1 torsion)."""
    h1 = pres.group()
    h2_Z = AbelianGroup(0, h1.torsion)
    lc = LocalCohomology(
        h0=pres.component_count,
        h1_Z=AbelianGroup(h1.free_rank, ()),
        h2_Z=h2_Z,
        h1_Z2_dim=h1.dim_mod2(),
        h2_Z2_dim=h1.torsion_dim_mod2(),
    )
    # Universal-coefficient consistency.
    assert lc.h1_Z2_dim - lc.h1_Z.free_rank == len(
        [d for d in lc.h2_Z.torsion if d % 2 == 0])
    if ring not in ("Z", "Z2"):
        raise ValueError("ring must be 'Z' or 'Z2'")
    return lc


# ---------------------------------------------------------------------------
# The region CW complex of one two-face and its branched cover
# ---------------------------------------------------------------------------

_VKIND = {'L': 0, 'B': 1, 'S': 2}


def _vkey(vid):
    return (_VKIND[vid[0]], vid[1:])


class FaceComplex:
    """Downstairs region decomposition of a closed two-face, with dents at
    the positive vertices of its boundary edges.

    Regions are lattice points; 1-cells are discriminant walls (between two
    barycenters), boundary stubs (barycenter to the free end next to a dent)
    and dent arcs (lattice point to the free end). Vertices are lattice
    points, barycenters and stub free-ends.
    """

    NEIGHBOR_DELTAS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

    def __init__(self, geometry):
        self.geo = geometry
        self.adj = geometry.unit_edges()
        self.regions = sorted(geometry.lattice_coords())
        self.cells1 = {}
        self.region_boundary = {}
        for x in self.regions:
            self.region_boundary[x] = self._boundary_walk(x)

    def edge_dir_mod2(self, edge):
        (x, y) = edge
        vec = tuple(self.geo.u[i] * (y[0] - x[0]) + self.geo.v[i] * (y[1] - x[1])
                    for i in range(4))
        return _mod2(vec)

    def coord2(self, vid):
        kind = vid[0]
        if kind == 'L':
            s, t = vid[1]
            return (Fraction(s), Fraction(t))
        if kind == 'B':
            corners = self.geo.triangle_corners(vid[1])
            return (Fraction(sum(c[0] for c in corners), 3),
                    Fraction(sum(c[1] for c in corners), 3))
        edge = vid[1]
        (x, y) = edge
        tri = self.adj[edge][0]
        bs, bt = self.coord2(('B', tri))
        return (Fraction(x[0] + y[0], 2) / 2 + bs / 2,
                Fraction(x[1] + y[1], 2) / 2 + bt / 2)

    def _cell(self, cid, v1, v2):
        if cid not in self.cells1:
            tail, head = sorted((v1, v2), key=_vkey)
            self.cells1[cid] = (tail, head)
        return cid

    def _region_cells(self, x):
        cells = []
        for d in self.NEIGHBOR_DELTAS:
            y = (x[0] + d[0], x[1] + d[1])
            edge = tuple(sorted((x, y)))
            tris = self.adj.get(edge)
            if not tris:
                continue
            if len(tris) == 2:
                cid = ('W', edge)
                self._cell(cid, ('B', tris[0]), ('B', tris[1]))
                cells.append(cid)
            else:
                st = ('St', edge)
                self._cell(st, ('B', tris[0]), ('S', edge))
                d_arc = ('D', x, edge)
                self._cell(d_arc, ('L', x), ('S', edge))
                cells.extend([st, d_arc])
        return cells

    def _boundary_walk(self, x):
        """Closed boundary of the region as [(cell_id, sign)], anticlockwise."""
        cells = self._region_cells(x)
        by_vertex = {}
        for cid in cells:
            for v in self.cells1[cid]:
                by_vertex.setdefault(v, []).append(cid)
        for v, cs in by_vertex.items():
            assert len(cs) == 2, (x, v, cs)
        start = min(cells)
        walk = []
        cur = start
        tail, head = self.cells1[cur]
        vertex_path = [tail, head]
        walk.append((cur, 1))
        at = head
        while at != vertex_path[0]:
            nxt = [c for c in by_vertex[at] if c != cur]
            assert len(nxt) == 1
            cur = nxt[0]
            t, h = self.cells1[cur]
            if t == at:
                walk.append((cur, 1))
                at = h
            else:
                walk.append((cur, -1))
                at = t
            vertex_path.append(at)
        assert len(walk) == len(cells)
        # Orient anticlockwise via the shoelace area of the vertex polygon.
        pts = [self.coord2(v) for v in vertex_path[:-1]]
        area2 = sum(pts[i][0] * pts[(i + 1) % len(pts)][1]
                    - pts[(i + 1) % len(pts)][0] * pts[i][1]
                    for i in range(len(pts)))
        assert area2 != 0
        if area2 < 0:
            walk = [(c, -s) for c, s in reversed(walk)]
        return walk

    def marked_cells(self):
        """1-cells on the discriminant, with crossed-edge direction masks."""
        out = {}
        for cid in self.cells1:
            if cid[0] in ('W', 'St'):
                out[cid] = self.edge_dir_mod2(cid[1])
        return out

    def vertex_marks(self, restrict_to=None):
        """Directions of marked cells incident to each vertex."""
        marked = self.marked_cells()
        if restrict_to is not None:
            marked = {c: d for c, d in marked.items() if c in restrict_to}
        out = {}
        for cid, direction in marked.items():
            for v in self.cells1[cid]:
                out.setdefault(v, set()).add(direction)
        return out


class H1Machine:
    """Homology of a 2-complex given as vertex list, edges with endpoints,
    and 2-cell boundary chains; provides coordinates for cycle classes.

    Subclasses populate self.vertices (hashable ids), self.edges (ids),
    self.edge_endpoint_map (edge id -> (tail vertex id, head vertex id)) and
    self.face_boundaries (list of chains {edge id: coeff}) before calling
    _build_homology.
    """

    def _build_homology(self):
        parent = {i: i for i in range(len(self.vertices))}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.eindex = {e: i for i, e in enumerate(self.edges)}
        tree = set()
        nontree = []
        for k, e in enumerate(self.edges):
            tv, hv = self.edge_endpoint_map[e]
            a, b = find(self.vindex[tv]), find(self.vindex[hv])
            if a != b:
                parent[max(a, b)] = min(a, b)
                tree.add(k)
            else:
                nontree.append(k)
        self.component_count = len(
            {find(i) for i in range(len(self.vertices))})
        self.nontree = nontree
        self.nontree_pos = {k: p for p, k in enumerate(nontree)}

        rows = [self.cycle_coords(ch) for ch in self.face_boundaries]
        self.relation_rows = rows
        R = SparseIntMatrix.from_rows(rows, len(nontree))
        self.relation_matrix = R
        form = smith_normal_form(R.transpose())
        self.h1_U = form.U
        self.h1_divisors = form.invariant_factors
        rk = len(self.h1_divisors)
        self.h1_rank = len(nontree) - rk
        self.h1_torsion = tuple(d for d in self.h1_divisors if d > 1)
        facs = invariant_factors(R)
        self.h2_rank = len(self.face_boundaries) - len(facs)
        self.h2_torsion_of_R = tuple(d for d in facs if d > 1)

    def cycle_coords(self, chain):
        """Coordinates of a 1-cycle over the fundamental (non-tree) edges."""
        vec = [0] * len(self.nontree)
        for e, c in chain.items():
            p = self.nontree_pos.get(self.eindex[e])
            if p is not None:
                vec[p] = c
        return vec

    def h1_group(self) -> AbelianGroup:
        return AbelianGroup(self.h1_rank, self.h1_torsion)

    def h2_group(self) -> AbelianGroup:
        return AbelianGroup(self.h2_rank, ())

    def h2_cohomology(self) -> AbelianGroup:
        """H^2 with integer coefficients (cokernel of the cochain map)."""
        return AbelianGroup(self.h2_rank, self.h2_torsion_of_R)

    def h1_class(self, chain):
        """Quotient coordinates [(kind, d, value)] of a 1-cycle's class."""
        c = self.cycle_coords(chain)
        u = self.h1_U.apply(c)
        out = []
        for i, val in enumerate(u):
            if i < len(self.h1_divisors):
                d = self.h1_divisors[i]
                if d > 1:
                    out.append(('tor', d, val % d))
            else:
                out.append(('free', 0, val))
        return out

    def class_is_zero(self, chain):
        return all(v == 0 for _, _, v in self.h1_class(chain))

    def assert_cycle(self, chain):
        boundary = {}
        for e, c in chain.items():
            tv, hv = self.edge_endpoint_map[e]
            boundary[hv] = boundary.get(hv, 0) + c
            boundary[tv] = boundary.get(tv, 0) - c
        assert all(v == 0 for v in boundary.values()), "chain is not a cycle"


class ClassSolver:
    """Expresses cycle classes over a fixed labeled generating family."""

    def __init__(self, machine: H1Machine, chains):
        self.machine = machine
        coords = [machine.h1_class(ch) for ch in chains]
        keylist = [k[:2] for k in machine.h1_class({})]
        nrows = len(keylist)
        cols = [[x[2] for x in c] for c in coords]
        for c in coords:
            assert [x[:2] for x in c] == keylist
        lattice_cols = []
        for r, (kind, d) in enumerate(keylist):
            if kind == 'tor':
                col = [0] * nrows
                col[r] = d
                lattice_cols.append(col)
        M = SparseIntMatrix(nrows, len(cols) + len(lattice_cols))
        for j, col in enumerate(cols + lattice_cols):
            for i, v in enumerate(col):
                if v:
                    M[i, j] = v
        self.matrix = M
        self.keys = keylist
        self.ngens = len(cols)
        for r in range(nrows):
            probe = [0] * nrows
            probe[r] = 1
            assert solve_int(M, probe) is not None, \
                "generators do not span H1"

    def express(self, chain):
        cls = self.machine.h1_class(chain)
        assert [x[:2] for x in cls] == self.keys
        sol = solve_int(self.matrix, [x[2] for x in cls])
        assert sol is not None
        return sol[: self.ngens]


class BranchedCoverComplex(H1Machine):
    """Cellular chain data of the branched cover of a set of regions of one
    face complex.

    sheets: the 7 tangent vectors at the anchored chamber. phi: the mask of
    the functional cutting out the face tangent plane (walls move exactly
    the sheets with phi = 1, by adding the crossed direction).
    """

    def __init__(self, face_complex, sheets, phi, regions=None, cells=None,
                 unmarked=()):
        self.fc = face_complex
        self.sheets = tuple(sorted(sheets))
        self.phi = phi
        self.regions = list(regions) if regions is not None else list(face_complex.regions)
        if cells is None:
            cellset = {}
            for x in self.regions:
                for cid, _ in face_complex.region_boundary[x]:
                    cellset[cid] = True
            self.cell_ids = sorted(cellset, key=_ckey)
        else:
            self.cell_ids = sorted(cells, key=_ckey)
        self.marked = {c: d for c, d in face_complex.marked_cells().items()
                       if c in set(self.cell_ids) and c not in set(unmarked)}
        self.vertex_dirs = self._vertex_dirs()
        self._build_lifts()
        self.face_boundaries = [self.boundary2(x, w) for (x, w) in self.faces2]
        self.edge_endpoint_map = {e: self.edge_endpoints(e) for e in self.edges}
        self._build_homology()

    # -- lifting ------------------------------------------------------------

    def _vertex_dirs(self):
        out = {}
        for cid, direction in self.marked.items():
            for v in self.fc.cells1[cid]:
                out.setdefault(v, set()).add(direction)
        for cid in self.cell_ids:
            for v in self.fc.cells1[cid]:
                out.setdefault(v, set())
        return out

    def moved(self, w):
        return dot2(self.phi, w) == 1

    def cell_orbit(self, cid, w):
        d = self.marked.get(cid)
        if d is None or not self.moved(w):
            return (w,)
        return tuple(sorted((w, w ^ d)))

    def vertex_orbit(self, vid, w):
        if not self.moved(w):
            return (w,)
        dirs = self.vertex_dirs[vid]
        span = {0}
        for d in dirs:
            span |= {s ^ d for s in span}
        return tuple(sorted(w ^ s for s in span))

    def _build_lifts(self):
        self.vertices = []
        for vid in sorted(self.vertex_dirs, key=_vkey):
            seen = set()
            for w in self.sheets:
                o = self.vertex_orbit(vid, w)
                if o not in seen:
                    seen.add(o)
                    self.vertices.append((vid, o))
        self.edges = []
        for cid in self.cell_ids:
            seen = set()
            for w in self.sheets:
                o = self.cell_orbit(cid, w)
                if o not in seen:
                    seen.add(o)
                    self.edges.append((cid, o))
        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.eindex = {e: i for i, e in enumerate(self.edges)}
        self.faces2 = [(x, w) for x in self.regions for w in self.sheets]

    def edge_endpoints(self, lifted_edge):
        cid, orbit = lifted_edge
        tail, head = self.fc.cells1[cid]
        w = orbit[0]
        return ((tail, self.vertex_orbit(tail, w)),
                (head, self.vertex_orbit(head, w)))

    def boundary2(self, region, w):
        """Signed lifted boundary chain of a lifted region 2-cell."""
        chain = {}
        for cid, sign in self.fc.region_boundary[region]:
            e = (cid, self.cell_orbit(cid, w))
            chain[e] = chain.get(e, 0) + sign
        return {e: v for e, v in chain.items() if v}

    # -- homology with coordinates -------------------------------------------


def _ckey(cid):
    order = {'W': 0, 'St': 1, 'D': 2}
    return (order[cid[0]],) + tuple(map(str, cid[1:]))


# ---------------------------------------------------------------------------
# The face model: cover of the whole face with labeled special cycles
# ---------------------------------------------------------------------------

class FaceModel:
    """Branched cover of one face element, with the hexagon presentations,
    the glued face presentation, torsion classes and restriction targets."""

    def __init__(self, base, cover_model, face):
        self.base = base
        self.face = face
        self.geo = base.geometry[face]
        self.anchor = cover_model.cells_of_face(face)[0]
        self.phi = cover_model.face_functional(self.anchor, face)
        self.sheets = cover_model.tangent[self.anchor]
        self.fc = FaceComplex(self.geo)
        self.cover = BranchedCoverComplex(self.fc, self.sheets, self.phi)
        assert self.cover.component_count == 4
        self.moved = tuple(sorted(w for w in self.sheets
                                  if dot2(self.phi, w)))
        self.hex_centers = sorted(self.geo.interior_coords())
        self._calibrate_hexagons()
        self._build_presentation()

    # -- raw wall circles ----------------------------------------------------

    def wall_circle_chain(self, edge):
        """Cycle +O1 - O2 over the two moved lifts of an interior wall."""
        cid = ('W', edge)
        d = self.fc.edge_dir_mod2(edge)
        w0 = self.moved[0]
        o1 = tuple(sorted((w0, w0 ^ d)))
        rest = [w for w in self.moved if w not in o1]
        o2 = tuple(sorted(rest))
        return {(cid, o1): 1, (cid, o2): -1}

    def hexagon_arcs(self, center):
        s, t = center
        out = []
        for ds, dt in FaceComplex.NEIGHBOR_DELTAS:
            out.append(tuple(sorted(((s, t), (s + ds, t + dt)))))
        return out

    # -- hexagon calibration --------------------------------------------------

    HEX_RELATIONS = ((0, 1, 3, 4), (1, 2, 4, 5), (2, 3, 5, 0))

    def _calibrate_hexagons(self):
        """Choose arc-circle signs so each hexagon satisfies the standard
        relations v_i + v_{i+1} + v_{i+3} + v_{i+4} = 0 exactly."""
        self.hex_signs = {}
        self.hex_models = {}
        for center in self.hex_centers:
            arcs = self.hexagon_arcs(center)
            cells = [('W', e) for e in arcs]
            sub = BranchedCoverComplex(
                self.fc, self.sheets, self.phi,
                regions=[center], cells=cells)
            self.hex_models[center] = sub
            chains = [self.wall_circle_chain(e) for e in arcs]
            chosen = None
            for mask in range(64):
                signs = [1 if (mask >> i) & 1 == 0 else -1 for i in range(6)]
                if signs[0] != 1:
                    continue
                ok = True
                for rel in self.HEX_RELATIONS:
                    total = {}
                    for i in rel:
                        for e, c in chains[i].items():
                            total[e] = total.get(e, 0) + signs[i] * c
                    if not sub.class_is_zero(total):
                        ok = False
                        break
                if ok:
                    chosen = signs
                    break
            assert chosen is not None, f"no sign calibration for hexagon {center}"
            self.hex_signs[center] = chosen

    def v_chain(self, center, i):
        """Calibrated arc circle i (0..5) of the hexagon at center."""
        sign = self.hex_signs[center][i]
        chain = self.wall_circle_chain(self.hexagon_arcs(center)[i])
        return {e: sign * c for e, c in chain.items()}

    # -- boundary helpers -------------------------------------------------

    def boundary_edges_at(self, coord):
        """Boundary unit edges at a lattice coord, sorted."""
        out = []
        for d in FaceComplex.NEIGHBOR_DELTAS:
            y = (coord[0] + d[0], coord[1] + d[1])
            edge = tuple(sorted((coord, y)))
            tris = self.fc.adj.get(edge)
            if tris and len(tris) == 1:
                out.append(edge)
        return sorted(out)

    def _arc_step(self, chain, cid, w, frm, to):
        tail, head = self.fc.cells1[cid]
        e = (cid, self.cover.cell_orbit(cid, w))
        sign = 1 if (frm, to) == (tail, head) else -1
        chain[e] = chain.get(e, 0) + sign

    # -- gap (detour) circles -------------------------------------------------

    def gap_circle_chain(self, coord, pair):
        """Image in the face of the gap circle at a boundary lattice point,
        for a moved sheet pair {w, w + edge direction}."""
        e_left, e_right = self.boundary_edges_at(coord)
        d = self.fc.edge_dir_mod2(e_left)
        assert d == self.fc.edge_dir_mod2(e_right)
        w0 = min(pair)
        assert (w0 ^ d) in pair
        l = ('L', coord)
        s1, s2 = ('S', e_left), ('S', e_right)
        a1, a2 = ('D', coord, e_left), ('D', coord, e_right)
        chain = {}
        w = w0
        self._arc_step(chain, a1, w, s1, l)
        self._arc_step(chain, a2, w, l, s2)
        w ^= d
        self._arc_step(chain, a2, w, s2, l)
        self._arc_step(chain, a1, w, l, s1)
        return {e: c for e, c in chain.items() if c}

    # -- gamma circles -----------------------------------------------------

    def sides(self):
        a, b, c = self.face
        return [tuple(sorted(p)) for p in ((a, b), (a, c), (b, c))]

    def side_coord(self, edge, m):
        """Face coordinate of the m-th lattice point along a polytope edge."""
        pt = self.base.edge_lattice_points(edge)[m]
        for coord in self.geo.lattice_coords():
            if self.geo.point(*coord) == pt:
                return coord
        raise AssertionError("edge point not on face")

    def _choose_gammas(self):
        """One gap circle per side completing the v classes to a generating
        set of H1, chosen as the first spanning triple in canonical order.

        The published pictures locate these three circles over boundary
        segments only loosely, so the concrete gaps are pinned here by the
        spanning requirement.
        """
        vcoords = [[x[2] for x in self.cover.h1_class(ch)]
                   for ch in self.gen_chains]
        keys = [k[:2] for k in self.cover.h1_class({})]
        nrows = len(keys)
        base_cols = list(vcoords)
        for r, (kind, d) in enumerate(keys):
            if kind == 'tor':
                col = [0] * nrows
                col[r] = d
                base_cols.append(col)

        def spans(triple_coords):
            cols = base_cols + list(triple_coords)
            M = SparseIntMatrix(nrows, len(cols))
            for j, col in enumerate(cols):
                for i, v in enumerate(col):
                    if v:
                        M[i, j] = v
            facs = invariant_factors(M)
            return len(facs) == nrows and all(d == 1 for d in facs)

        candidates = []
        for side in self.sides():
            d = self.base.edge_direction_mod2(side)
            pairs = sorted({tuple(sorted((w, w ^ d))) for w in self.moved})
            per_side = []
            for m in range(1, 5):
                coord = self.side_coord(side, m)
                for pair in pairs:
                    chain = self.gap_circle_chain(coord, pair)
                    per_side.append(((side, m, pair), chain))
            candidates.append(per_side)
        for k1, c1 in candidates[0]:
            q1 = [x[2] for x in self.cover.h1_class(c1)]
            for k2, c2 in candidates[1]:
                q2 = [x[2] for x in self.cover.h1_class(c2)]
                for k3, c3 in candidates[2]:
                    q3 = [x[2] for x in self.cover.h1_class(c3)]
                    if spans((q1, q2, q3)):
                        return [(k1, c1), (k2, c2), (k3, c3)]
        raise AssertionError("no gamma triple spans H1 of the face piece")

    # -- glued presentation ----------------------------------------------------

    def _build_presentation(self):
        gens = []
        self.gen_chains = []
        for center in self.hex_centers:
            for i in range(6):
                gens.append(('v', self.face, center, i + 1))
                self.gen_chains.append(self.v_chain(center, i))
        self.gamma_info = []
        for i, (key, chain) in enumerate(self._choose_gammas()):
            gens.append(('gamma', self.face, i + 1))
            self.gamma_info.append(key)
            self.gen_chains.append(chain)
        self.generator_index = {g: k for k, g in enumerate(gens)}

        rows = []
        # Hexagon relations (calibrated, so plain +1 coefficients).
        for h, center in enumerate(self.hex_centers):
            for rel in self.HEX_RELATIONS:
                row = [0] * len(gens)
                for i in rel:
                    row[6 * h + i] = 1
                rows.append(row)
        # Shared-arc identifications between adjacent hexagons.
        seen_walls = {}
        for h, center in enumerate(self.hex_centers):
            for i, edge in enumerate(self.hexagon_arcs(center)):
                seen_walls.setdefault(edge, []).append((h, i))
        for edge, users in sorted(seen_walls.items()):
            if len(users) != 2:
                continue
            (h1, i1), (h2, i2) = users
            s1 = self.hex_signs[self.hex_centers[h1]][i1]
            s2 = self.hex_signs[self.hex_centers[h2]][i2]
            row = [0] * len(gens)
            row[6 * h1 + i1] = 1
            row[6 * h2 + i2] = -s1 * s2
            rows.append(row)
        self.presentation = H1Presentation(
            ('F', self.face), gens, rows, component_count=4)

        # Validate against the cellular model. Together these three checks
        # pin the presentation exactly: the relation rows die in the model,
        # the generators span, and the presented group is isomorphic to the
        # computed one, which forces the relation lattice to be the full
        # kernel of the generator map.
        pres_group = self.presentation.group()
        model_group = self.cover.h1_group()
        assert pres_group == model_group, (pres_group, model_group)
        for row in rows:
            total = {}
            for k, coeff in enumerate(row):
                if coeff:
                    for e, c in self.gen_chains[k].items():
                        total[e] = total.get(e, 0) + coeff * c
            assert self.cover.class_is_zero(total)
        self._build_solver()

    def _build_solver(self):
        self.solver = ClassSolver(self.cover, self.gen_chains)

    def express(self, chain):
        """Coordinates of a cycle's class over the presentation generators."""
        return self.solver.express(chain)

    # -- torsion classes -------------------------------------------------------

    def torsion_class_chain(self, center):
        """The 2-torsion class of a hexagon: v_1 + v_4."""
        total = {}
        for i in (0, 3):
            for e, c in self.v_chain(center, i).items():
                total[e] = total.get(e, 0) + c
        return {e: c for e, c in total.items() if c}

    def torsion_classes_generate(self):
        """The six hexagon classes generate the full 2-torsion of H1."""
        tor_rows = []
        for center in self.hex_centers:
            cls = self.cover.h1_class(self.torsion_class_chain(center))
            assert all(kind == 'tor' or v == 0 for kind, d, v in cls)
            tor_rows.append([v for kind, d, v in cls if kind == 'tor'])
        if not tor_rows:
            return True
        bm = BitMatrix.from_rows(tor_rows)
        return bm.rank() == len(self.cover.h1_torsion) == len(tor_rows)


# ---------------------------------------------------------------------------
# The edge model: three face strips glued along the edge line
# ---------------------------------------------------------------------------

class EdgeModel(H1Machine):
    """Branched cover of an edge element: the union of the boundary strips
    of the three adjacent faces, joined along the (undented) edge line, with
    filler cells closing the dents and the full stub of each positive vertex
    branch-marked.

    Sheets over each face strip are labeled at that face's anchored chamber;
    the strips are matched along the edge line by the exact crossing
    transitions at each gap, which makes every identification mechanical.
    """

    def __init__(self, base, cover_model, edge, face_models):
        self.base = base
        self.cover_model = cover_model
        self.edge = edge
        self.faces = sorted(base.faces_containing_edge(edge))
        self.owner = self.faces[0]
        self.fms = {f: face_models[f] for f in self.faces}
        self.anchors = {f: cover_model.cells_of_face(f)[0] for f in self.faces}
        self.edir = base.edge_direction_mod2(edge)
        self.pts = base.edge_lattice_points(edge)
        self.sheets = {f: cover_model.tangent[self.anchors[f]]
                       for f in self.faces}
        self.strip_coords = {}
        for f in self.faces:
            geo = base.geometry[f]
            coord_of = {geo.point(s, t): (s, t)
                        for (s, t) in geo.lattice_coords()}
            self.strip_coords[f] = [coord_of[p] for p in self.pts]
        self.meridians = {
            f: cover_model.wall_transvection(self.anchors[f], f, self.edir)
            for f in self.faces}
        self._build_cells()
        self._build_classes()
        self._build_chain_data()
        self._build_homology()
        assert self.component_count == 4
        self._build_generators()

    # -- downstairs cells -----------------------------------------------------

    def _translate_vertex(self, f, vid):
        if vid[0] == 'L':
            coords = self.strip_coords[f]
            if vid[1] in coords:
                return ('L', coords.index(vid[1]))
        return ('v', f, vid)

    def _build_cells(self):
        self.cell_faces = {}      # 1-cell id -> approach faces
        self.cell_ends = {}       # 1-cell id -> (tail, head)
        self.cell_gap = {}        # shared 1-cell id -> gap index
        self.marked_cells = {}    # 1-cell id -> {face: meridian perm}
        self.vertex_faces = {}
        self.vertex_gap = {}
        self.region_cells = []    # (f, k)
        self.filler_cells = []    # (f, i, side)

        def add_vertex(vid, f, gap=None):
            self.vertex_faces.setdefault(vid, set()).add(f)
            if gap is not None:
                self.vertex_gap.setdefault(vid, set()).add(gap)

        for k in range(6):
            for f in self.faces:
                add_vertex(('L', k), f, k)
        for i in range(1, 6):
            for f in self.faces:
                add_vertex(('M', i), f, i - 1)
                add_vertex(('M', i), f, i)

        for f in self.faces:
            fc = self.fms[f].fc
            stub_edges = set()
            for k, coord in enumerate(self.strip_coords[f]):
                self.region_cells.append((f, k))
                for cid, _ in fc.region_boundary[coord]:
                    tid = ('c', f, cid)
                    tail, head = fc.cells1[cid]
                    t2 = self._translate_vertex(f, tail)
                    h2 = self._translate_vertex(f, head)
                    self.cell_ends[tid] = (t2, h2)
                    self.cell_faces.setdefault(tid, set()).add(f)
                    for v in (t2, h2):
                        add_vertex(v, f)
                    if cid[0] == 'St':
                        E = cid[1]
                        side_pts = [self.strip_coords[f][j] for j in range(6)]
                        if E[0] in side_pts and E[1] in side_pts:
                            self.marked_cells[tid] = {f: self.meridians[f]}
                            stub_edges.add(E)
            # Fillers: for each dent on this edge, two triangles joining the
            # stub free end back to the positive vertex and the edge line.
            for i in range(1, 6):
                c_left = self.strip_coords[f][i - 1]
                c_right = self.strip_coords[f][i]
                E = tuple(sorted((c_left, c_right)))
                assert E in stub_edges
                tip = ('tip', f, i)
                self.cell_ends[tip] = (('M', i), ('v', f, ('S', E)))
                self.cell_faces.setdefault(tip, set()).add(f)
                self.marked_cells[tip] = {f: self.meridians[f]}
                seg_l = ('seg', i, 'left')
                seg_r = ('seg', i, 'right')
                if seg_l not in self.cell_ends:
                    self.cell_ends[seg_l] = (('L', i - 1), ('M', i))
                    self.cell_gap[seg_l] = i - 1
                    self.cell_ends[seg_r] = (('M', i), ('L', i))
                    self.cell_gap[seg_r] = i
                self.cell_faces.setdefault(seg_l, set()).add(f)
                self.cell_faces.setdefault(seg_r, set()).add(f)
                self.filler_cells.append((f, i, 'left'))
                self.filler_cells.append((f, i, 'right'))

    # -- sheet conversions and lift classes -----------------------------------

    def conversion(self, f_from, f_to, gap):
        """Label map (sheets at f_from's anchor) -> (sheets at f_to's anchor)
        for the fibre over the gap's slab."""
        a, b = self.anchors[f_from], self.anchors[f_to]
        if a == b:
            return {w: w for w in self.sheets[f_from]}
        between = tuple(sorted(set(a) & set(b)))
        assert set(self.edge) <= set(between)
        return self.cover_model.theta(between, self.pts[gap], a, b)

    def _node(self, f, w):
        return (self.faces.index(f), w)

    def _build_classes(self):
        """Union-find over (cell, approach face, sheet) nodes."""
        self._uf_parent = {}

        def find(x):
            p = self._uf_parent
            p.setdefault(x, x)
            while p[x] != x:
                p[x] = p[p[x]]
                x = p[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                self._uf_parent[max(rx, ry)] = min(rx, ry)

        def cross_face_ids(cell_key, faces, gaps):
            for fa in faces:
                for fb in faces:
                    if fa >= fb:
                        continue
                    for gap in gaps:
                        conv = self.conversion(fa, fb, gap)
                        for w in self.sheets[fa]:
                            union((cell_key, self._node(fa, w)),
                                  (cell_key, self._node(fb, conv[w])))

        # 1-cells.
        for cid, faces in self.cell_faces.items():
            faces = sorted(faces)
            gaps = [self.cell_gap[cid]] if cid in self.cell_gap else []
            if len(faces) > 1:
                cross_face_ids(cid, faces, gaps)
            if cid in self.marked_cells:
                for f, perm in self.marked_cells[cid].items():
                    for w in self.sheets[f]:
                        union((cid, self._node(f, w)),
                              (cid, self._node(f, perm[w])))
        # 0-cells: inherit identifications from all incident 1-cells.
        incident = {}
        for cid, (tail, head) in self.cell_ends.items():
            incident.setdefault(tail, []).append(cid)
            incident.setdefault(head, []).append(cid)
        for vid, faces in self.vertex_faces.items():
            faces = sorted(faces)
            gaps = sorted(self.vertex_gap.get(vid, ()))
            if len(faces) > 1:
                cross_face_ids(vid, faces, gaps)
            for cid in incident.get(vid, ()):
                for f in sorted(self.cell_faces[cid]):
                    if cid in self.marked_cells and f in self.marked_cells[cid]:
                        perm = self.marked_cells[cid][f]
                        for w in self.sheets[f]:
                            union((vid, self._node(f, w)),
                                  (vid, self._node(f, perm[w])))
                gaps_c = [self.cell_gap[cid]] if cid in self.cell_gap else []
                fcs = sorted(self.cell_faces[cid])
                if len(fcs) > 1:
                    cross_face_ids(vid, fcs, gaps_c)
        self._find = find

    def lift(self, cell_or_vertex, f, w):
        return (cell_or_vertex, self._find((cell_or_vertex, self._node(f, w))))

    # -- chain data ------------------------------------------------------------

    def _build_chain_data(self):
        vertex_lifts = {}
        for vid, faces in self.vertex_faces.items():
            for f in sorted(faces):
                for w in self.sheets[f]:
                    vertex_lifts[self.lift(vid, f, w)] = True
        self.vertices = sorted(vertex_lifts, key=repr)
        edge_lifts = {}
        self.edge_endpoint_map = {}
        for cid, faces in self.cell_faces.items():
            tail, head = self.cell_ends[cid]
            for f in sorted(faces):
                for w in self.sheets[f]:
                    e = self.lift(cid, f, w)
                    if e not in edge_lifts:
                        edge_lifts[e] = True
                        self.edge_endpoint_map[e] = (
                            self.lift(tail, f, w), self.lift(head, f, w))
        self.edges = sorted(edge_lifts, key=repr)

        self.face_boundaries = []
        self.faces2 = []
        for (f, k) in self.region_cells:
            fc = self.fms[f].fc
            coord = self.strip_coords[f][k]
            for w in self.sheets[f]:
                chain = {}
                for cid, sign in fc.region_boundary[coord]:
                    e = self.lift(('c', f, cid), f, w)
                    chain[e] = chain.get(e, 0) + sign
                self.faces2.append(('region', f, k, w))
                self.face_boundaries.append(
                    {e: c for e, c in chain.items() if c})
        for (f, i, side) in self.filler_cells:
            cs = self.strip_coords[f]
            E = tuple(sorted((cs[i - 1], cs[i])))
            if side == 'left':
                corner = ('L', i - 1)
                seg = ('seg', i, 'left')
                arc = ('c', f, ('D', cs[i - 1], E))
            else:
                corner = ('L', i)
                seg = ('seg', i, 'right')
                arc = ('c', f, ('D', cs[i], E))
            tip = ('tip', f, i)
            for w in self.sheets[f]:
                chain = {}
                # corner -> M (seg), M -> S (tip), S -> corner (arc reversed)
                for cid, frm, to in ((seg, corner, ('M', i)),
                                     (tip, ('M', i), ('v', f, ('S', E))),
                                     (arc, ('v', f, ('S', E)), corner)):
                    tail, head = self.cell_ends[cid]
                    sign = 1 if (frm, to) == (tail, head) else -1
                    e = self.lift(cid, f, w)
                    chain[e] = chain.get(e, 0) + sign
                self.faces2.append(('filler', f, i, side, w))
                self.face_boundaries.append(
                    {e: c for e, c in chain.items() if c})

    # -- generators ------------------------------------------------------------

    def pair_orbits(self):
        moved = [w for w in self.sheets[self.owner] if w != self.edir]
        pairs = sorted({tuple(sorted((w, w ^ self.edir))) for w in moved
                        if (w ^ self.edir) != 0 and w != self.edir})
        pairs = [p for p in pairs if self.edir not in p]
        assert len(pairs) == 3
        return pairs

    def gap_circle_chain(self, pair, m):
        """Bigon over the gap segment through the m-th edge lattice point."""
        w0 = min(pair)
        w1 = w0 ^ self.edir
        f = self.owner
        chain = {}
        for w, sign in ((w0, 1), (w1, -1)):
            for cid in (('seg', m, 'right'), ('seg', m + 1, 'left')):
                e = self.lift(cid, f, w)
                chain[e] = chain.get(e, 0) + sign
        chain = {e: c for e, c in chain.items() if c}
        self.assert_cycle(chain)
        return chain

    def _build_generators(self):
        self.generators = []
        self.gen_chains = []
        for pair in self.pair_orbits():
            for m in range(1, 5):
                self.generators.append(('circle', self.edge, pair, m))
                self.gen_chains.append(self.gap_circle_chain(pair, m))
        assert self.h1_group() == AbelianGroup(12, ())
        self.solver = ClassSolver(self, self.gen_chains)

    def express_pair_chain(self, face, face_chain):
        """Class of a cycle of the face-strip submodel (given in face-model
        lift coordinates) over the edge generators."""
        chain = {}
        for (cid, orbit), coeff in face_chain.items():
            assert len(orbit) == 1, "pair chains must avoid branch cells"
            e = self.lift(('c', face, cid), face, orbit[0])
            chain[e] = chain.get(e, 0) + coeff
        chain = {e: c for e, c in chain.items() if c}
        self.assert_cycle(chain)
        return self.solver.express(chain)


# ---------------------------------------------------------------------------
# Hexagon / face / edge / pair presentation API
# ---------------------------------------------------------------------------

HEX_RELATION_ROWS = (
    (1, 1, 0, 1, 1, 0),
    (0, 1, 1, 0, 1, 1),
    (1, 0, 1, 1, 0, 1),
)


def hexagon_piece(face, center) -> H1Presentation:
    """Presentation of the nontrivial component over one hexagonal region:
    generators v_1..v_6 (the lifted boundary arcs, after discarding the
    redundant extra generator), relations from the standard column-reduced
    attaching matrix."""
    gens = [('v', face, center, i + 1) for i in range(6)]
    return H1Presentation(('H', face, center), gens,
                          [list(r) for r in HEX_RELATION_ROWS],
                          component_count=4)


def face_presentation(model: FaceModel) -> H1Presentation:
    return model.presentation


def edge_presentation(edge_model: EdgeModel) -> H1Presentation:
    """Free presentation of the edge element preimage: per non-section
    component (a sheet pair), one circle per gap between consecutive
    positive vertices. The circles are verified to be a basis of the first
    homology of the cellular edge model."""
    return H1Presentation(('E', edge_model.edge), edge_model.generators, [],
                          component_count=4)


def pair_presentation(cover_model, edge, face) -> H1Presentation:
    """Free presentation of an edge-face intersection: two non-section
    components, four gap circles each."""
    if not set(edge) <= set(face):
        raise ValueError("edge is not an edge of the face")
    simplex = (('E', edge), ('F', face))
    comps = cover_model.components(simplex)
    pairs = [c for c in comps if len(c) == 2]
    assert len(pairs) == 2 and len(comps) == 5
    gens = [('circle', edge, face, pair, m)
            for pair in sorted(pairs) for m in range(1, 5)]
    return H1Presentation(('EF', edge, face), gens, [], component_count=5)


def inclusion_to_edge(edge_model: EdgeModel, face, pair_pres, face_model,
                      edge_pres) -> InclusionMap:
    """Gap circles of the intersection expressed over the edge circles by
    exact cellular computation inside the edge model."""
    base = edge_model.base
    pts = base.edge_lattice_points(edge_model.edge)
    geo = face_model.geo
    coord_of = {geo.point(s, t): (s, t) for (s, t) in geo.lattice_coords()}
    matrix = []
    for (_, e, f, pair, m) in pair_pres.generators:
        coord = coord_of[pts[m]]
        chain = face_model.gap_circle_chain(coord, pair)
        matrix.append(edge_model.express_pair_chain(face, chain))
    return InclusionMap(pair_pres, edge_pres, matrix)


def inclusion_to_face(cover_model, edge, face, pair_pres, face_model) -> InclusionMap:
    """Gap circles expressed over the glued face generators by exact
    cellular computation of their pushed-in representatives."""
    base = cover_model.base
    pts = base.edge_lattice_points(edge)
    geo = face_model.geo
    coord_of = {geo.point(s, t): (s, t) for (s, t) in geo.lattice_coords()}
    matrix = []
    for (_, e, f, pair, m) in pair_pres.generators:
        coord = coord_of[pts[m]]
        chain = face_model.gap_circle_chain(coord, pair)
        matrix.append(face_model.express(chain))
    return InclusionMap(pair_pres, face_model.presentation, matrix)
