"""Sheet permutations of the 7-fold branched cover and orbit computations.

The seven sheets over a point near a three-cell are modelled as the nonzero
vectors of the mod-2 tangent space of that cell (a 3-dimensional subspace of
(Z/2)^4, hence exactly 7 nonzero vectors). Crossing a two-face near a lattice
point x identifies the two tangent spaces through the quotient by the mod-2
class of x; the monodromy around a discriminant wall is then the transvection
by the mod-2 direction of the unit edge the wall crosses. In the chart at any
polytope vertex this reproduces the standard table of twelve double
transpositions.

Permutations at the API level are maps of sheet labels 1..7; internally they
are dicts on the nonzero vectors of a cell's tangent space.
"""

from __future__ import annotations

from itertools import combinations

from .base_complex import element_key, enclosed_branches, _mod2


# Sheet labels 1..7 as (Z/2)^3 vectors in a vertex chart, matching the
# half-integral torsion points u_1..u_7 of the fibre torus.
SHEET_VECTORS = {
    1: (0, 0, 1),
    2: (1, 0, 1),
    3: (1, 0, 0),
    4: (1, 1, 0),
    5: (0, 1, 0),
    6: (0, 1, 1),
    7: (1, 1, 1),
}

# The published monodromy table in one vertex chart: T[(i,j),k] with
# k in {i,j} is the permutation of sheet labels around the walls of the
# face spanned by edges i and j that cross edge k.
QUINTIC_TABLE_CYCLES = {
    ((1, 2), 1): "(12)(67)", ((1, 2), 2): "(16)(27)",
    ((1, 3), 1): "(45)(67)", ((1, 3), 3): "(47)(56)",
    ((1, 4), 1): "(12)(45)", ((1, 4), 4): "(14)(25)",
    ((2, 3), 2): "(34)(27)", ((2, 3), 3): "(23)(47)",
    ((2, 4), 2): "(16)(34)", ((2, 4), 4): "(14)(36)",
    ((3, 4), 3): "(23)(56)", ((3, 4), 4): "(25)(36)",
}


def perm_from_cycles(text, n=7):
    """Parse cycle notation like "(12)(67)" into a 1-indexed tuple."""
    images = list(range(n + 1))
    for part in text.replace(")", ")|").split("|"):
        part = part.strip().strip("()")
        if not part:
            continue
        pts = [int(ch) for ch in part]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a] = b
    return tuple(images[1:])


def perm_to_cycles(perm):
    seen = set()
    out = []
    for start in range(1, len(perm) + 1):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start - 1]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt - 1]
        if len(cyc) > 1:
            out.append("(" + "".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def is_involution(perm):
    return all(perm[perm[i - 1] - 1] == i for i in range(1, len(perm) + 1))


def orbits(gens, points=range(1, 8)):
    """Orbit partition of the group generated by permutation tuples,
    canonicalized as a sorted tuple of sorted tuples."""
    points = list(points)
    parent = {p: p for p in points}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for p in points:
            q = g[p - 1] if isinstance(g, tuple) else g[p]
            a, b = find(p), find(q)
            if a != b:
                parent[max(a, b)] = min(a, b)
    blocks = {}
    for p in points:
        blocks.setdefault(find(p), []).append(p)
    return tuple(tuple(sorted(b)) for b in sorted(blocks.values()))


def dot2(a, b):
    return bin(a & b).count("1") & 1


class CoverModel:
    """The branched cover of the base in mod-2 linear-algebra form."""

    def __init__(self, base):
        self.base = base
        P = base.polytope
        self.vbar = [_mod2(v) for v in P.vertices]
        ineqs = P.facet_inequalities()
        # Match each 3-cell (4 vertex indices) with its facet inequality.
        self.normal = {}
        for cell in base.cells:
            for n, c in ineqs:
                on = [i for i, v in enumerate(P.vertices)
                      if sum(a * b for a, b in zip(n, v)) == c]
                if tuple(sorted(on)) == cell:
                    assert c % 2 == 1, "facet not at odd lattice distance"
                    self.normal[cell] = _mod2(n)
        assert len(self.normal) == len(base.cells)
        self.tangent = {
            cell: tuple(w for w in range(1, 16) if not dot2(nbar, w))
            for cell, nbar in self.normal.items()}
        for cell, vecs in self.tangent.items():
            assert len(vecs) == 7
        self._component_cache = {}

    # -- elementary moves ---------------------------------------------------

    def cells_of_face(self, face):
        return sorted(self.base.cells_containing(face))

    def theta(self, face, point, cell_from, cell_to):
        """Sheet transition across `face` near lattice `point` (a 4-tuple)."""
        xbar = _mod2(point)
        n_from, n_to = self.normal[cell_from], self.normal[cell_to]
        assert dot2(n_from, xbar) == 1 and dot2(n_to, xbar) == 1
        out = {}
        for w in self.tangent[cell_from]:
            out[w] = w if not dot2(n_to, w) else w ^ xbar
        return out

    def face_functional(self, cell, face):
        """Mask of the functional on the cell tangent space vanishing on the
        face tangent plane: the mod-2 normal of the other cell through face."""
        other = [t for t in self.cells_of_face(face) if t != cell]
        assert len(other) == 1
        return self.normal[other[0]]

    def wall_transvection(self, cell, face, direction):
        """Monodromy (at the given cell) around any discriminant wall of
        `face` crossing a unit edge with the given mod-2 direction."""
        phi = self.face_functional(cell, face)
        assert not dot2(self.normal[cell], direction)
        out = {}
        for w in self.tangent[cell]:
            out[w] = w ^ direction if dot2(phi, w) else w
        return out

    # -- door graphs for nerve regions --------------------------------------

    def chambers_and_doors(self, simplex):
        """Chambers (3-cells met by the intersection region) and doors
        (face crossings available inside it), each door a tuple
        (face, lattice_point, cell_a, cell_b)."""
        base = self.base
        kinds = [el[0] for el in simplex]
        if 'T' in kinds:
            cell = next(el[1] for el in simplex if el[0] == 'T')
            return [cell], []
        if kinds == ['F']:
            face = simplex[0][1]
            cells = self.cells_of_face(face)
            geo = base.geometry[face]
            doors = [(face, geo.point(*c), cells[0], cells[1])
                     for c in sorted(geo.lattice_coords())]
            return cells, doors
        if kinds == ['E']:
            edge = simplex[0][1]
            chambers = set()
            doors = []
            pts = base.edge_lattice_points(edge)
            for face in base.faces_containing_edge(edge):
                cells = self.cells_of_face(face)
                chambers.update(cells)
                for pt in pts:
                    doors.append((face, pt, cells[0], cells[1]))
            for v in edge:
                vpt = base.polytope.vertices[v]
                for face in base.faces:
                    if v in face:
                        cells = self.cells_of_face(face)
                        chambers.update(cells)
                        doors.append((face, vpt, cells[0], cells[1]))
            # Anchor must contain the edge so that components are labeled
            # by sheet pairs differing by the edge direction.
            ordered = sorted(c for c in chambers if set(edge) <= set(c))
            ordered += sorted(c for c in chambers if not set(edge) <= set(c))
            return ordered, sorted(set(doors))
        if kinds == ['E', 'F']:
            edge, face = simplex[0][1], simplex[1][1]
            cells = self.cells_of_face(face)
            doors = [(face, pt, cells[0], cells[1])
                     for pt in base.edge_lattice_points(edge)]
            return cells, doors
        # Edge-only simplices meeting at a vertex ball.
        edges = [el[1] for el in simplex if el[0] == 'E']
        common = set(edges[0])
        for e in edges[1:]:
            common &= set(e)
        assert len(common) == 1
        v = common.pop()
        vpt = self.base.polytope.vertices[v]
        if 'F' in kinds:
            face = next(el[1] for el in simplex if el[0] == 'F')
            cells = self.cells_of_face(face)
            return cells, [(face, vpt, cells[0], cells[1])]
        chambers = set()
        doors = []
        for face in base.faces:
            if v in face:
                cells = self.cells_of_face(face)
                chambers.update(cells)
                doors.append((face, vpt, cells[0], cells[1]))
        return sorted(chambers), sorted(set(doors))

    def anchor(self, simplex):
        return self.chambers_and_doors(simplex)[0][0]

    def _bfs_transports(self, simplex):
        """Deterministic transports anchor -> every chamber along a BFS tree
        of the door graph. Returns {chamber: dict sheet@anchor -> sheet@chamber}."""
        chambers, doors = self.chambers_and_doors(simplex)
        anchor = chambers[0]
        trans = {anchor: {w: w for w in self.tangent[anchor]}}
        frontier = [anchor]
        while frontier:
            new = []
            for c in frontier:
                for door in doors:
                    face, pt, a, b = door
                    if c == a and b not in trans:
                        step = self.theta(face, pt, a, b)
                        trans[b] = {w: step[v] for w, v in trans[c].items()}
                        new.append(b)
                    elif c == b and a not in trans:
                        step = self.theta(face, pt, b, a)
                        trans[a] = {w: step[v] for w, v in trans[c].items()}
                        new.append(a)
            frontier = new
        assert set(trans) == set(chambers)
        return trans

    def enclosed_perms(self, simplex):
        """Enclosed branch monodromies as permutation dicts at the anchor."""
        descriptors = enclosed_branches(simplex)
        if not descriptors:
            return []
        trans = self._bfs_transports(simplex)
        anchor = self.anchor(simplex)
        out = []
        for face, edge in descriptors:
            direction = self.base.edge_direction_mod2(edge)
            cells = self.cells_of_face(face)
            c = cells[0] if cells[0] in trans else cells[1]
            assert c in trans
            t = self.wall_transvection(c, face, direction)
            rho = trans[c]
            rho_inv = {v: w for w, v in rho.items()}
            out.append({w: rho_inv[t[rho[w]]] for w in self.tangent[anchor]})
        return out

    def components(self, simplex):
        """Canonical partition of the anchor sheet vectors into preimage
        components: sorted tuple of sorted tuples."""
        if simplex in self._component_cache:
            return self._component_cache[simplex]
        anchor = self.anchor(simplex)
        pts = list(self.tangent[anchor])
        perms = self.enclosed_perms(simplex)
        parent = {p: p for p in pts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in perms:
            for p in pts:
                a, b = find(p), find(g[p])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        blocks = {}
        for p in pts:
            blocks.setdefault(find(p), []).append(p)
        result = tuple(tuple(sorted(b)) for b in sorted(blocks.values()))
        self._component_cache[simplex] = result
        return result

    def transport_between(self, simplex_small, anchor_from):
        """Sheet transport from `anchor_from` (a chamber of the ambient
        region) to the anchor of simplex_small, moving inside that region."""
        trans = self._bfs_transports(simplex_small)
        rho = trans[anchor_from]   # anchor(small) -> anchor_from
        return {v: w for w, v in rho.items()}

    def restrict_component(self, simplex_small, simplex_big, block):
        """Image of a component of the big simplex's preimage inside the
        component set of a sub-simplex (one more open set dropped)."""
        t = self.transport_between(simplex_small, self.anchor(simplex_big))
        w = t[block[0]]
        for c in self.components(simplex_small):
            if w in c:
                return c
        raise AssertionError("component restriction failed")

    # -- vertex charts -------------------------------------------------------

    def chart_dictionary(self, vertex):
        """At a polytope vertex chart: sheet label (1..7) of each tangent
        vector of each adjacent cell, plus the chart labels 1..4 of the
        edges at the vertex (in increasing order of the other endpoint)."""
        base = self.base
        others = [w for w in range(5) if w != vertex]
        edge_dirs = [base.edge_direction_mod2(tuple(sorted((vertex, w))))
                     for w in others]
        vb = self.vbar[vertex]
        d1, d2, d3 = edge_dirs[:3]
        assert edge_dirs[3] in (d1 ^ d2 ^ d3, d1 ^ d2 ^ d3 ^ vb)
        labels = {}
        for c1 in (0, 1):
            for c2 in (0, 1):
                for c3 in (0, 1):
                    if not (c1 or c2 or c3):
                        continue
                    vec = (c1 * d1) ^ (c2 * d2) ^ (c3 * d3)
                    sheet = _chart_label(c1, c2, c3)
                    labels[vec] = sheet
                    labels[vec ^ vb] = sheet
        return labels, {k + 1: others[k] for k in range(4)}

    def table_at_chart(self, vertex):
        """The twelve monodromy permutations in the chart at a vertex, keyed
        like the published table."""
        labels, edge_of = self.chart_dictionary(vertex)
        table = {}
        for (i, j) in combinations(range(1, 5), 2):
            face = tuple(sorted((vertex, edge_of[i], edge_of[j])))
            cell = self.cells_of_face(face)[0]
            for k in (i, j):
                edge = tuple(sorted((vertex, edge_of[k])))
                t = self.wall_transvection(cell, face,
                                           self.base.edge_direction_mod2(edge))
                images = [0] * 7
                for w, img in t.items():
                    images[labels[w] - 1] = labels[img]
                table[((i, j), k)] = tuple(images)
        return table


def _chart_label(c1, c2, c3):
    for sheet, vec in SHEET_VECTORS.items():
        if vec == (c1, c2, c3):
            return sheet
    raise AssertionError


def quintic_monodromy_table():
    """The published table replicated over every vertex chart: a dict
    {(chart_vertex, (i, j), k): permutation tuple}."""
    table = {key: perm_from_cycles(text)
             for key, text in QUINTIC_TABLE_CYCLES.items()}
    out = {}
    for vertex in range(5):
        for ((i, j), k), perm in table.items():
            out[(vertex, (i, j), k)] = perm
    return out


def components(model: CoverModel, simplex):
    """Number-of-components view of a nerve simplex's preimage: the orbit
    partition of the enclosed monodromies."""
    return model.components(simplex)
