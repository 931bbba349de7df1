"""Direct cellular model of the whole branched cover: an independent
cross-check oracle for the spectral-sequence machinery.

Builds the full CW structure of the 7-sheeted cover of the boundary
3-sphere branched over the fine discriminant (all ten faces with their
region decompositions, undented, plus the lifted 3-cells) and computes its
homology by exact sparse reduction. The total space is a closed orientable
3-manifold, so H_1 here equals the second cohomology computed by the Cech
route, with the extension problem resolved.
"""

from __future__ import annotations

from .base_complex import _mod2
from .exact_linalg import AbelianGroup, SparseIntMatrix, invariant_factors
from .monodromy import dot2


class GlobalCoverModel:
    def __init__(self, model):
        self.base = model.base
        self.cover = model.cover
        self.faces = list(self.base.faces)
        self.anchors = {f: self.cover.cells_of_face(f)[0] for f in self.faces}
        self.sheets = {f: self.cover.tangent[self.anchors[f]]
                       for f in self.faces}
        self._build_downstairs()
        self._build_classes()
        self._build_chain()

    # -- downstairs cells ----------------------------------------------------

    def _edge_position(self, point):
        """(edge, index) for a lattice point lying on a polytope edge, else
        None; polytope vertices return ('vertex', vertex_index)."""
        for v, amb in enumerate(self.base.polytope.vertices):
            if tuple(point) == amb:
                return ('vertex', v)
        for e in self.base.edges:
            pts = self.base.edge_lattice_points(e)
            if tuple(point) in pts:
                return ('edge', e, pts.index(tuple(point)))
        return None

    def _build_downstairs(self):
        base = self.base
        self.cell_ends = {}
        self.cell_faces = {}
        self.marked = {}         # cell id -> {face: direction}
        self.vertex_faces = {}
        self.region_walks = {}   # (f, coord) -> [(cell, sign)]
        self.conv_point = {}     # shared cell -> ambient lattice point

        def add_vertex(vid, f):
            self.vertex_faces.setdefault(vid, set()).add(f)

        from fractions import Fraction
        for f in self.faces:
            geo = base.geometry[f]
            adj = geo.unit_edges()
            coord2 = {}
            for coord in geo.lattice_coords():
                add_vertex(('L', geo.point(*coord)), f)
                coord2[('L', geo.point(*coord))] = (
                    Fraction(coord[0]), Fraction(coord[1]))
            for coord in geo.lattice_coords():
                cells = []
                for ds, dt in ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)):
                    y = (coord[0] + ds, coord[1] + dt)
                    E = tuple(sorted((coord, y)))
                    tris = adj.get(E)
                    if not tris:
                        continue
                    direction = self._dir(geo, coord, y)
                    mid2 = (Fraction(E[0][0] + E[1][0], 2),
                            Fraction(E[0][1] + E[1][1], 2))
                    for tri in tris:
                        corners = geo.triangle_corners(tri)
                        coord2[('B', f, tri)] = (
                            Fraction(sum(c[0] for c in corners), 3),
                            Fraction(sum(c[1] for c in corners), 3))
                    if len(tris) == 2:
                        cid = ('W', f, E)
                        self.cell_ends[cid] = (('B', f, tris[0]),
                                               ('B', f, tris[1]))
                        self.cell_faces.setdefault(cid, set()).add(f)
                        self.marked.setdefault(cid, {})[f] = direction
                        cells.append(cid)
                        add_vertex(('B', f, tris[0]), f)
                        add_vertex(('B', f, tris[1]), f)
                    else:
                        sides_x = dict(geo.sides_of(E[0]))
                        sides_y = dict(geo.sides_of(E[1]))
                        side = [s for s in sides_x if s in sides_y][0]
                        i = min(sides_x[side], sides_y[side]) + 1
                        edge_global = tuple(sorted(side))
                        mid = ('M', edge_global, i)
                        coord2[mid] = mid2
                        stub = ('St', f, E)
                        self.cell_ends[stub] = (('B', f, tris[0]), mid)
                        self.cell_faces.setdefault(stub, set()).add(f)
                        self.marked.setdefault(stub, {})[f] = direction
                        seg = ('G', edge_global, i, geo.point(*coord))
                        self.cell_ends[seg] = (('L', geo.point(*coord)), mid)
                        self.cell_faces.setdefault(seg, set()).add(f)
                        self.conv_point[seg] = geo.point(*coord)
                        cells.extend([stub, seg])
                        add_vertex(('B', f, tris[0]), f)
                        add_vertex(mid, f)
                self.region_walks[(f, coord)] = self._walk(cells, coord2)
        # Conversion points for shared vertices.
        for vid in self.vertex_faces:
            if vid[0] == 'L':
                self.conv_point[vid] = vid[1]
            elif vid[0] == 'M':
                edge, i = vid[1], vid[2]
                pts = self.base.edge_lattice_points(edge)
                self.conv_point[vid] = None   # handled via incident cells

    @staticmethod
    def _dir(geo, x, y):
        vec = tuple(geo.u[i] * (y[0] - x[0]) + geo.v[i] * (y[1] - x[1])
                    for i in range(4))
        return _mod2(vec)

    def _walk(self, cells, coord2):
        by_vertex = {}
        for cid in cells:
            for v in self.cell_ends[cid]:
                by_vertex.setdefault(v, []).append(cid)
        for v, cs in by_vertex.items():
            assert len(cs) == 2, (v, cs)
        start = min(cells, key=repr)
        walk = [(start, 1)]
        tail, head = self.cell_ends[start]
        first, at = tail, head
        path = [tail, head]
        cur = start
        while at != first:
            nxt = [c for c in by_vertex[at] if c != cur]
            assert len(nxt) == 1
            cur = nxt[0]
            t, h = self.cell_ends[cur]
            if t == at:
                walk.append((cur, 1))
                at = h
            else:
                walk.append((cur, -1))
                at = t
            path.append(at)
        pts = [coord2[v] for v in path[:-1]]
        area2 = sum(pts[i][0] * pts[(i + 1) % len(pts)][1]
                    - pts[(i + 1) % len(pts)][0] * pts[i][1]
                    for i in range(len(pts)))
        assert area2 != 0
        if area2 < 0:
            walk = [(c, -s) for c, s in reversed(walk)]
        return walk

    # -- lift classes ----------------------------------------------------------

    def conversion(self, f_from, f_to, point):
        a, b = self.anchors[f_from], self.anchors[f_to]
        if a == b:
            return {w: w for w in self.sheets[f_from]}
        between = tuple(sorted(set(a) & set(b)))
        assert len(between) >= 3
        if len(between) == 4:
            return {w: w for w in self.sheets[f_from]}
        return self.cover.theta(between, point, a, b)

    def _node(self, f, w):
        return (self.faces.index(f), w)

    def _build_classes(self):
        self._uf = {}

        def find(x):
            p = self._uf
            p.setdefault(x, x)
            while p[x] != x:
                p[x] = p[p[x]]
                x = p[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                self._uf[max(rx, ry)] = min(rx, ry)

        self._find = find

        def identify(cell, faces, points):
            faces = sorted(faces)
            for i, fa in enumerate(faces):
                for fb in faces[i + 1:]:
                    for pt in points:
                        conv = self.conversion(fa, fb, pt)
                        for w in self.sheets[fa]:
                            union((cell, self._node(fa, w)),
                                  (cell, self._node(fb, conv[w])))

        # 1-cells: cross-face identifications and meridian merges.
        incident = {}
        for cid, (tail, head) in self.cell_ends.items():
            incident.setdefault(tail, []).append(cid)
            incident.setdefault(head, []).append(cid)
        for cid, faces in self.cell_faces.items():
            if len(faces) > 1:
                identify(cid, faces, [self.conv_point[cid]])
            for f, direction in self.marked.get(cid, {}).items():
                t = self.cover.wall_transvection(self.anchors[f], f, direction)
                for w in self.sheets[f]:
                    union((cid, self._node(f, w)),
                          (cid, self._node(f, t[w])))
        # 0-cells: inherit from incident 1-cells.
        for vid, faces in self.vertex_faces.items():
            pts = set()
            for cid in incident.get(vid, ()):
                if cid in self.conv_point:
                    pts.add(self.conv_point[cid])
            if vid[0] == 'L':
                pts.add(vid[1])
            if len(faces) > 1:
                identify(vid, faces, sorted(pts))
            for cid in incident.get(vid, ()):
                for f, direction in self.marked.get(cid, {}).items():
                    t = self.cover.wall_transvection(
                        self.anchors[f], f, direction)
                    for w in self.sheets[f]:
                        union((vid, self._node(f, w)),
                              (vid, self._node(f, t[w])))
                cf = sorted(self.cell_faces[cid])
                if len(cf) > 1:
                    identify(vid, cf, [self.conv_point[cid]])

    def lift(self, cell, f, w):
        return (cell, self._find((cell, self._node(f, w))))

    # -- chain complex -----------------------------------------------------------

    def _build_chain(self):
        vertex_lifts = {}
        for vid, faces in self.vertex_faces.items():
            for f in sorted(faces):
                for w in self.sheets[f]:
                    vertex_lifts[self.lift(vid, f, w)] = True
        self.v_list = sorted(vertex_lifts, key=repr)
        vpos = {v: i for i, v in enumerate(self.v_list)}

        edge_lifts = {}
        ends = {}
        for cid, faces in self.cell_faces.items():
            tail, head = self.cell_ends[cid]
            for f in sorted(faces):
                for w in self.sheets[f]:
                    e = self.lift(cid, f, w)
                    if e not in edge_lifts:
                        edge_lifts[e] = True
                        ends[e] = (self.lift(tail, f, w),
                                   self.lift(head, f, w))
        self.e_list = sorted(edge_lifts, key=repr)
        epos = {e: i for i, e in enumerate(self.e_list)}

        face_lifts = []
        fpos = {}
        for f in self.faces:
            geo = self.base.geometry[f]
            for coord in geo.lattice_coords():
                for w in self.sheets[f]:
                    fpos[(f, coord, w)] = len(face_lifts)
                    face_lifts.append((f, coord, w))
        self.f_list = face_lifts

        d1 = SparseIntMatrix(len(self.v_list), len(self.e_list))
        for e, (tv, hv) in ends.items():
            j = epos[e]
            d1[vpos[hv], j] = d1[vpos[hv], j] + 1
            d1[vpos[tv], j] = d1[vpos[tv], j] - 1
        d2 = SparseIntMatrix(len(self.e_list), len(face_lifts))
        for (f, coord, w), j in fpos.items():
            for cid, sign in self.region_walks[(f, coord)]:
                e = self.lift(cid, f, w)
                i = epos[e]
                d2[i, j] = d2[i, j] + sign
        cells3 = []
        for t in self.base.cells:
            for w in self.cover.tangent[t]:
                cells3.append((t, w))
        d3 = SparseIntMatrix(len(face_lifts), len(cells3))
        for j, (t, w) in enumerate(cells3):
            for pos, omitted in enumerate(t):
                face = tuple(v for v in t if v != omitted)
                sign = (-1) ** pos
                anchor = self.anchors[face]
                geo = self.base.geometry[face]
                for coord in geo.lattice_coords():
                    if t == anchor:
                        wa = w
                    else:
                        wa = self.cover.theta(face, geo.point(*coord),
                                              t, anchor)[w]
                    i = fpos[(face, coord, wa)]
                    d3[i, j] = d3[i, j] + sign
        assert d2.mul(d3).is_zero(), "d2 o d3 != 0"
        assert d1.mul(d2).is_zero(), "d1 o d2 != 0"
        self.d1, self.d2, self.d3 = d1, d2, d3

    def homology(self):
        from .exact_linalg import rank
        r1 = rank(self.d1)
        f2 = invariant_factors(self.d2)
        r2 = len(f2)
        f3 = invariant_factors(self.d3)
        r3 = len(f3)
        n0, n1 = len(self.v_list), len(self.e_list)
        n2, n3 = len(self.f_list), self.d3.cols
        h0 = AbelianGroup(n0 - r1, ())
        h1 = AbelianGroup(n1 - r1 - r2, tuple(d for d in f2 if d > 1))
        h2 = AbelianGroup(n2 - r2 - r3, tuple(d for d in f3 if d > 1))
        h3 = AbelianGroup(n3 - r3, ())
        return h0, h1, h2, h3


class GlobalCoarseModel:
    """Same construction for the coarse (one-Y-per-face) discriminant; the
    published independent computation gives H_1 = Z/2 for this cover."""

    def __init__(self, model):
        self.base = model.base
        self.cover = model.cover
        self.faces = list(self.base.faces)
        self.anchors = {f: self.cover.cells_of_face(f)[0] for f in self.faces}
        self.sheets = {f: self.cover.tangent[self.anchors[f]]
                       for f in self.faces}
        self._build()

    def conversion(self, f_from, f_to, point):
        a, b = self.anchors[f_from], self.anchors[f_to]
        if a == b:
            return {w: w for w in self.sheets[f_from]}
        between = tuple(sorted(set(a) & set(b)))
        if len(between) == 4:
            return {w: w for w in self.sheets[f_from]}
        return self.cover.theta(between, point, a, b)

    def _build(self):
        base = self.base
        P = base.polytope
        cell_ends = {}
        cell_faces = {}
        marked = {}
        vertex_faces = {}
        conv_point = {}
        region_walks = {}

        def add_vertex(vid, f):
            vertex_faces.setdefault(vid, set()).add(f)

        from fractions import Fraction
        for f in self.faces:
            a, b, c = f
            local = {a: (Fraction(0), Fraction(0)),
                     b: (Fraction(5), Fraction(0)),
                     c: (Fraction(0), Fraction(5))}
            bary = (Fraction(5, 3), Fraction(5, 3))
            for corner in f:
                others = sorted(w for w in f if w != corner)
                tau1 = tuple(sorted((corner, others[0])))
                tau2 = tuple(sorted((corner, others[1])))
                for tau in (tau1, tau2):
                    arm = ('A', f, tau)
                    if arm not in cell_ends:
                        cell_ends[arm] = (('B', f), ('M', tau))
                    cell_faces.setdefault(arm, set()).add(f)
                    marked.setdefault(arm, {})[f] = base.edge_direction_mod2(tau)
                    half = ('S', tau, corner)
                    if half not in cell_ends:
                        cell_ends[half] = (('L', corner), ('M', tau))
                        conv_point[half] = P.vertices[corner]
                    cell_faces.setdefault(half, set()).add(f)
                    add_vertex(('B', f), f)
                    add_vertex(('M', tau), f)
                    add_vertex(('L', corner), f)
                # walk: L -> M(tau1) -> B -> M(tau2) -> L, oriented
                # anticlockwise in the face frame.
                def mid(tau):
                    (x1, y1), (x2, y2) = local[tau[0]], local[tau[1]]
                    return (Fraction(x1 + x2, 2), Fraction(y1 + y2, 2))
                pts2 = [local[corner], mid(tau1), bary, mid(tau2)]
                area2 = sum(pts2[i][0] * pts2[(i + 1) % 4][1]
                            - pts2[(i + 1) % 4][0] * pts2[i][1]
                            for i in range(4))
                assert area2 != 0
                walk = [
                    (('S', tau1, corner), 1),
                    (('A', f, tau1), -1),
                    (('A', f, tau2), 1),
                    (('S', tau2, corner), -1),
                ]
                if area2 < 0:
                    walk = [(cid, -s) for cid, s in reversed(walk)]
                region_walks[(f, corner)] = walk

        uf = {}

        def find(x):
            uf.setdefault(x, x)
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                uf[max(rx, ry)] = min(rx, ry)

        def node(f, w):
            return (self.faces.index(f), w)

        def identify(cell, faces, pts):
            faces = sorted(faces)
            for i, fa in enumerate(faces):
                for fb in faces[i + 1:]:
                    for pt in pts:
                        conv = self.conversion(fa, fb, pt)
                        for w in self.sheets[fa]:
                            union((cell, node(fa, w)),
                                  (cell, node(fb, conv[w])))

        incident = {}
        for cid, (t, h) in cell_ends.items():
            incident.setdefault(t, []).append(cid)
            incident.setdefault(h, []).append(cid)
        for cid, faces in cell_faces.items():
            if len(faces) > 1:
                identify(cid, faces, [conv_point[cid]])
            for f, direction in marked.get(cid, {}).items():
                t = self.cover.wall_transvection(self.anchors[f], f, direction)
                for w in self.sheets[f]:
                    union((cid, node(f, w)), (cid, node(f, t[w])))
        for vid, faces in vertex_faces.items():
            pts = set()
            for cid in incident.get(vid, ()):
                if cid in conv_point:
                    pts.add(conv_point[cid])
            if vid[0] == 'L':
                pts.add(P.vertices[vid[1]])
            if len(faces) > 1:
                identify(vid, faces, sorted(pts))
            for cid in incident.get(vid, ()):
                for f, direction in marked.get(cid, {}).items():
                    t = self.cover.wall_transvection(
                        self.anchors[f], f, direction)
                    for w in self.sheets[f]:
                        union((vid, node(f, w)), (vid, node(f, t[w])))
                cf = sorted(cell_faces[cid])
                if len(cf) > 1:
                    identify(vid, cf, [conv_point[cid]])

        def lift(cell, f, w):
            return (cell, find((cell, node(f, w))))

        vertex_lifts = {}
        for vid, faces in vertex_faces.items():
            for f in sorted(faces):
                for w in self.sheets[f]:
                    vertex_lifts[lift(vid, f, w)] = True
        v_list = sorted(vertex_lifts, key=repr)
        vpos = {v: i for i, v in enumerate(v_list)}
        edge_lifts = {}
        ends = {}
        for cid, faces in cell_faces.items():
            tv, hv = cell_ends[cid]
            for f in sorted(faces):
                for w in self.sheets[f]:
                    e = lift(cid, f, w)
                    if e not in edge_lifts:
                        edge_lifts[e] = True
                        ends[e] = (lift(tv, f, w), lift(hv, f, w))
        e_list = sorted(edge_lifts, key=repr)
        epos = {e: i for i, e in enumerate(e_list)}
        face_lifts = []
        fpos = {}
        for f in self.faces:
            for corner in f:
                for w in self.sheets[f]:
                    fpos[(f, corner, w)] = len(face_lifts)
                    face_lifts.append((f, corner, w))

        d1 = SparseIntMatrix(len(v_list), len(e_list))
        for e, (tv, hv) in ends.items():
            j = epos[e]
            d1[vpos[hv], j] = d1[vpos[hv], j] + 1
            d1[vpos[tv], j] = d1[vpos[tv], j] - 1
        d2 = SparseIntMatrix(len(e_list), len(face_lifts))
        for (f, corner, w), j in fpos.items():
            for cid, sign in region_walks[(f, corner)]:
                e = lift(cid, f, w)
                i = epos[e]
                d2[i, j] = d2[i, j] + sign
        cells3 = []
        for t in self.base.cells:
            for w in self.cover.tangent[t]:
                cells3.append((t, w))
        d3 = SparseIntMatrix(len(face_lifts), len(cells3))
        for j, (t, w) in enumerate(cells3):
            for pos, omitted in enumerate(t):
                face = tuple(v for v in t if v != omitted)
                sign = (-1) ** pos
                anchor = self.anchors[face]
                for corner in face:
                    if t == anchor:
                        wa = w
                    else:
                        wa = self.cover.theta(face, P.vertices[corner],
                                              t, anchor)[w]
                    i = fpos[(face, corner, wa)]
                    d3[i, j] = d3[i, j] + sign
        assert d1.mul(d2).is_zero()
        assert d2.mul(d3).is_zero()
        self.d1, self.d2, self.d3 = d1, d2, d3
        self.sizes = (len(v_list), len(e_list), len(face_lifts), len(cells3))

    def homology(self):
        from .exact_linalg import rank
        r1 = rank(self.d1)
        f2 = invariant_factors(self.d2)
        f3 = invariant_factors(self.d3)
        n0, n1, n2, n3 = self.sizes
        return (AbelianGroup(n0 - r1, ()),
                AbelianGroup(n1 - r1 - len(f2), tuple(d for d in f2 if d > 1)),
                AbelianGroup(n2 - len(f2) - len(f3),
                             tuple(d for d in f3 if d > 1)),
                AbelianGroup(n3 - len(f3), ()))
