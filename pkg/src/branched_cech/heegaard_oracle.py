"""Independent verification path: first homology of the branched cover over
the coarse (one-Y-per-face) discriminant via a Heegaard splitting.

The complement of a thickening of that discriminant splits into two balls
once twelve passage disks are cut: one ball holds the central three-cell
(the one missing the vertex placed at infinity) together with the four
finite vertex hubs, the other holds the remaining four cells and the
infinity hub. The dual graph is therefore a two-vertex, twelve-edge graph
whose 7-fold lift has 14 vertices and 84 edges; meridian disks of 24 of the
30 discriminant edges (the complement of a six-edge forest) cut the other
handlebody into balls and contribute 120 abelianized relator rows over the
71 spanning-tree generators.
"""

from __future__ import annotations

import random
from itertools import combinations

from .exact_linalg import AbelianGroup, SparseIntMatrix, invariant_factors
from .monodromy import CoverModel, dot2


class TildeDiscriminant:
    """Trivalent graph: one center per two-face joined to the midpoints of
    its three sides; midpoints are shared between the three faces at an edge."""

    def __init__(self, base):
        self.base = base
        self.centers = [('c', f) for f in base.faces]
        self.midpoints = [('m', e) for e in base.edges]
        self.vertices = self.centers + self.midpoints
        self.edges = sorted(
            (('c', f), ('m', e))
            for f in base.faces
            for e in combinations(f, 2))

    def degree(self, v):
        return sum(1 for a, b in self.edges if v in (a, b))


def build_tilde_discriminant(base) -> TildeDiscriminant:
    graph = TildeDiscriminant(base)
    assert len(graph.vertices) == 20 and len(graph.edges) == 30
    assert all(graph.degree(v) == 3 for v in graph.vertices)
    return graph


class HandleGraph:
    """The two-vertex, twelve-edge dual graph of the outer handlebody.

    Edges are the cut passages (hub vertex, cell) with i, m both among the
    four finite vertices; each edge carries its sheet transport from the
    inner-ball anchor to the outer-ball anchor.
    """

    def __init__(self, cover: CoverModel, infinity=4):
        self.cover = cover
        base = cover.base
        self.infinity = infinity
        finite = [v for v in range(5) if v != infinity]
        self.inner_cell = tuple(sorted(finite))
        outer = [t for t in base.cells if t != self.inner_cell]
        self.outer_anchor = outer[0]
        self.vertices = ("V1", "V2")
        self.edges = []
        for hub in finite:
            for cell in outer:
                if hub in cell:
                    self.edges.append((hub, cell))
        self.edges.sort()
        assert len(self.edges) == 12
        self.transports = {g: self._transport(g) for g in self.edges}

    def _face_between(self, cell_a, cell_b):
        return tuple(sorted(set(cell_a) & set(cell_b)))

    def _transport(self, g):
        """Sheet map T(inner anchor) -> T(outer anchor) through passage g."""
        hub, cell = g
        cover = self.cover
        base = cover.base
        face1 = self._face_between(self.inner_cell, cell)
        pt1 = base.polytope.vertices[hub]
        t = cover.theta(face1, pt1, self.inner_cell, cell)
        if cell != self.outer_anchor:
            face2 = self._face_between(cell, self.outer_anchor)
            pt2 = base.polytope.vertices[self.infinity]
            step = cover.theta(face2, pt2, cell, self.outer_anchor)
            t = {w: step[v] for w, v in t.items()}
        return t

    def rho_inner(self, cell, hub):
        """Label transport to the inner anchor for a sheet sitting in `cell`
        near the given finite hub (identity when already in the inner cell)."""
        if cell == self.inner_cell:
            return {w: w for w in self.cover.tangent[cell]}
        face = self._face_between(self.inner_cell, cell)
        pt = self.cover.base.polytope.vertices[hub]
        t = self.cover.theta(face, pt, self.inner_cell, cell)
        return {v: w for w, v in t.items()}


class CoveringGraph:
    """7-fold lift of the handle graph."""

    def __init__(self, handle_graph: HandleGraph, transports=None):
        self.hg = handle_graph
        sheets = sorted(handle_graph.cover.tangent[handle_graph.inner_cell])
        self.sheets = sheets
        transports = transports or handle_graph.transports
        self.vertices = [("V1", w) for w in sheets] + [
            ("V2", w) for w in sorted(
                handle_graph.cover.tangent[handle_graph.outer_anchor])]
        self.edges = []
        for g in handle_graph.edges:
            t = transports[g]
            for w in sheets:
                self.edges.append((g, w, ("V1", w), ("V2", t[w])))

    def component_count(self):
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, _, a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        return len({find(v) for v in self.vertices})


def lift_graph(handle_graph: HandleGraph, transports=None) -> CoveringGraph:
    g = CoveringGraph(handle_graph, transports)
    assert len(g.vertices) == 14 and len(g.edges) == 84
    return g


def generators_from_spanning_tree(covering: CoveringGraph, rng=None):
    """Spanning tree plus oriented non-tree edges as H_1 generators.

    Returns (tree_edges, generators) where generators is a list of
    (edge_key, orientation) and edge_key identifies a lifted edge.
    """
    edges = list(covering.edges)
    if rng is not None:
        rng.shuffle(edges)
    parent = {v: v for v in covering.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    nontree = []
    for (g, w, a, b) in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree.append((g, w))
        else:
            nontree.append((g, w))
    assert len(tree) == 13, "covering graph is not connected"
    assert len(nontree) == 71
    orientations = {key: (rng.choice((1, -1)) if rng else 1)
                    for key in sorted(nontree)}
    generators = [(key, orientations[key]) for key in sorted(nontree)]
    return tree, generators


class DiskSystem:
    """Cut disks of the outer handlebody (the twelve passages) and the
    meridian disks of the 24 discriminant edges outside a chosen forest."""

    def __init__(self, tilde, uncut_forest):
        self.tilde = tilde
        self.uncut = sorted(uncut_forest)
        self.cut_edges = [e for e in tilde.edges if e not in set(self.uncut)]
        assert len(self.cut_edges) == 24
        assert not _has_cycle(self.uncut), "uncut edges must form a forest"


def default_disk_system(tilde, rng=None) -> DiskSystem:
    edges = list(tilde.edges)
    if rng is not None:
        rng.shuffle(edges)
    chosen = []
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = e
        ra, rb = find(a), find(b)
        if ra != rb and len(chosen) < 6:
            parent[ra] = rb
            chosen.append(e)
    assert len(chosen) == 6
    return DiskSystem(tilde, chosen)


def _has_cycle(edge_list):
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edge_list:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


class RelationMatrix:
    def __init__(self, matrix, words, generators):
        self.matrix = matrix          # SparseIntMatrix, rows x 71
        self.words = words            # full relator words incl. tree letters
        self.generators = generators


def disk_relations(model_cover: CoverModel, handle_graph: HandleGraph,
                   covering: CoveringGraph, disks: DiskSystem,
                   tree, generators) -> RelationMatrix:
    """Abelianized boundary words of the 120 lifted meridian disks."""
    base = model_cover.base
    tree_set = set(tree)
    gen_index = {key: i for i, (key, _) in enumerate(generators)}
    gen_sign = {key: s for key, s in generators}
    hg = handle_graph
    rows = []
    words = []
    for (cvert, mvert) in disks.cut_edges:
        face = cvert[1]
        tau = mvert[1]
        corner_p, corner_q = tau
        # Meridian transvection around this discriminant edge.
        direction = base.edge_direction_mod2(tau)
        phi = model_cover.face_functional(hg.inner_cell, face) \
            if hg.inner_cell in model_cover.cells_of_face(face) else None
        cells = model_cover.cells_of_face(face)
        t_cell = cells[0]
        phi = model_cover.face_functional(t_cell, face)
        meridian = {w: (w ^ direction if dot2(phi, w) else w)
                    for w in model_cover.tangent[t_cell]}
        orbits = {}
        for w in model_cover.tangent[t_cell]:
            o = tuple(sorted({w, meridian[w]}))
            orbits[o] = True
        assert len(orbits) == 5
        for orbit in sorted(orbits):
            word, row = _trace_meridian(
                model_cover, hg, gen_index, gen_sign, tree_set,
                face, corner_p, corner_q, t_cell, orbit[0], len(orbit))
            rows.append(row)
            words.append(word)
    matrix = SparseIntMatrix.from_rows(rows, len(generators))
    assert matrix.rows == 120
    rel = RelationMatrix(matrix, words, generators)
    _check_separating_parity(rel)
    return rel


def _trace_meridian(cover, hg, gen_index, gen_sign, tree_set,
                    face, corner_p, corner_q, start_cell, start_sheet, laps):
    """Walk the meridian loop of one discriminant edge, lifted at a sheet.

    The loop crosses the host face twice, once in the region of each
    endpoint of the polytope edge the discriminant edge reaches; each
    crossing passes through that corner's hub and traverses its two passage
    disks. Doubled orbits walk the loop twice.
    """
    base = cover.base
    cells = cover.cells_of_face(face)
    word = []
    row = [0] * len(gen_index)

    def emit(hub, cell, direction_sign, sheet_at_cell):
        # Lifted-passage letter, skipped for uncut passages.
        if hub == hg.infinity or hg.infinity in cell:
            if cell == hg.inner_cell:
                pass
            # (hub, inner_cell) and (infinity hub, cell) passages are uncut.
            if cell == hg.inner_cell or hub == hg.infinity:
                return
        label = hg.rho_inner(cell, hub)[sheet_at_cell]
        key = ((hub, cell), label)
        letter = (key, direction_sign)
        word.append(letter)
        if key in tree_set:
            return
        row[gen_index[key]] += direction_sign * gen_sign[key]

    cell = start_cell
    other = cells[0] if cells[1] == cell else cells[1]
    sheet = start_sheet
    for _ in range(laps):
        for corner in (corner_p, corner_q):
            pt = base.polytope.vertices[corner]
            # Leave `cell` into the hub at `corner`: crossing its passage
            # disk against the hub->cell orientation.
            emit(corner, cell, -1, sheet)
            theta = cover.theta(face, pt, cell, other)
            sheet = theta[sheet]
            emit(corner, other, +1, sheet)
            cell, other = other, cell
    assert cell == start_cell
    assert sheet == start_sheet, "meridian lift failed to close"
    return word, row


def _check_separating_parity(rel: RelationMatrix):
    """Closed lifted loops cross the full separating disk system an even
    number of times (every letter is one crossing)."""
    for word in rel.words:
        assert len(word) % 2 == 0


def h1_tilde(base=None, seed=None, cover=None):
    """First homology of the cover over the coarse discriminant, as the
    cokernel of the 120 x 71 relation matrix."""
    if cover is None:
        from .cech_engine import quintic_model
        model = quintic_model()
        cover = model.cover
        base = model.base
    rng = random.Random(seed) if seed is not None else None
    tilde = build_tilde_discriminant(base)
    hg = HandleGraph(cover)
    covering = lift_graph(hg)
    tree, generators = generators_from_spanning_tree(covering, rng)
    disks = default_disk_system(tilde, rng)
    rel = disk_relations(cover, hg, covering, disks, tree, generators)
    facs = invariant_factors(rel.matrix.transpose())
    group = AbelianGroup(len(generators) - len(facs), facs)
    return {
        "covering_graph": (len(covering.vertices), len(covering.edges)),
        "relation_matrix_shape": (rel.matrix.rows, rel.matrix.cols),
        "group": group,
        "relations": rel,
    }
