"""Mod-2 square-map rank for anticanonical hypersurfaces in smooth complete
toric fourfolds, computed from toric intersection numbers, with the table of
all 124 published rows embedded for tuple matching.

A fan is given by primitive ray generators and maximal cones. The divisor
class group modulo linear equivalence is presented by eliminating four rays
against a lattice basis of characters; the square matrix S[i][j] =
e_i^2 . e_j . (-K) is then reduced mod 2 and its rank reported.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

from .exact_linalg import BitMatrix, det
from .lattice import count_antik_sections


class FanError(ValueError):
    pass


class Fan:
    def __init__(self, rays, max_cones):
        self.rays = [tuple(int(c) for c in r) for r in rays]
        if any(len(r) != 4 for r in self.rays):
            raise FanError("rays must be 4-dimensional")
        for r in self.rays:
            g = 0
            for c in r:
                g = gcd(g, c)
            if g != 1:
                raise FanError(f"ray {r} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise FanError("duplicate rays")
        self.max_cones = [tuple(sorted(int(i) for i in cone))
                          for cone in max_cones]
        for cone in self.max_cones:
            if len(cone) != 4:
                raise FanError(f"maximal cone {cone} must have 4 rays")
            if not all(0 <= i < len(self.rays) for i in cone):
                raise FanError(f"cone {cone} has an out-of-range ray index")
        self.cone_set = set(self.max_cones)
        self._face_set = None

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or "rays" not in data \
                or "max_cones" not in data:
            raise FanError('fan JSON must have "rays" and "max_cones"')
        return cls(data["rays"], data["max_cones"])

    def faces(self):
        """All subsets of ray indices spanning a face of some maximal cone."""
        if self._face_set is None:
            out = set()
            for cone in self.max_cones:
                for k in range(5):
                    out.update(combinations(cone, k))
            self._face_set = out
        return self._face_set

    def cone_matrix(self, cone):
        return [list(self.rays[i]) for i in cone]


def validate_fan(fan: Fan):
    """Smoothness (unimodular maximal cones) and completeness (the union of
    cones covers R^4, checked through boundary triangles being shared)."""
    for cone in fan.max_cones:
        d = det(fan.cone_matrix(cone))
        if abs(d) != 1:
            raise FanError(f"not smooth: cone {cone} has determinant {d}")
    # Completeness: every 3-dimensional face must lie in exactly two
    # maximal cones, and the fan must have at least one cone.
    if not fan.max_cones:
        raise FanError("not complete: no maximal cones")
    counts = {}
    for cone in fan.max_cones:
        for facet in combinations(cone, 3):
            counts[facet] = counts.get(facet, 0) + 1
    for facet, c in sorted(counts.items()):
        if c != 2:
            raise FanError(
                f"not complete: boundary triple {facet} lies in {c} cones")


def intersection_number(fan: Fan, divisors) -> int:
    """Degree of a product of four toric boundary divisors (by ray index).

    Repeated factors are removed with linear-equivalence relations, reducing
    against a character that is 1 on the repeated ray and 0 on the other
    distinct rays of the term; four distinct rays then meet in 1 or 0 points
    according to whether they span a maximal cone.
    """
    divisors = tuple(divisors)
    if len(divisors) != 4:
        raise ValueError("intersection numbers need exactly 4 divisors")
    total = {}
    _reduce_term(fan, tuple(sorted(divisors)), 1, total)
    return sum(total.values())


def _reduce_term(fan, term, coeff, total):
    support = tuple(sorted(set(term)))
    if support not in fan.faces():
        return
    if len(support) == 4:
        if support in fan.cone_set:
            total[support] = total.get(support, 0) + coeff
        return
    # Find the first repeated ray and a character m with <m, v_rep> = 1 and
    # <m, v_s> = 0 for the other rays in the term.
    rep = None
    for r in support:
        if term.count(r) > 1:
            rep = r
            break
    assert rep is not None
    others = [r for r in support if r != rep]
    m = _dual_character(fan, rep, others)
    remaining = list(term)
    remaining.remove(rep)
    for r_new, ray in enumerate(fan.rays):
        if r_new == rep:
            continue
        pairing = sum(a * b for a, b in zip(m, ray))
        if pairing:
            _reduce_term(fan, tuple(sorted(remaining + [r_new])),
                         -coeff * pairing, total)


def _dual_character(fan, rep, others):
    """Integer m with <m, v_rep> = 1, <m, v_o> = 0 for o in others.

    Exists because {rep} + others span a smooth cone face."""
    rows = [fan.rays[rep]] + [fan.rays[o] for o in others]
    target = [1] + [0] * len(others)
    # Solve rows . m = target exactly over the integers by extending the
    # rows to a unimodular basis of a containing smooth cone.
    cone = next(c for c in fan.max_cones
                if set([rep] + list(others)) <= set(c))
    basis = fan.cone_matrix(cone)
    d = det(basis)
    assert abs(d) == 1
    # m = row of the inverse transpose matching rep's position in the cone.
    pos = cone.index(rep)
    inv = _unimodular_inverse(basis, d)
    m = tuple(inv[j][pos] for j in range(4))
    assert sum(a * b for a, b in zip(m, fan.rays[rep])) == 1
    for o in others:
        assert sum(a * b for a, b in zip(m, fan.rays[o])) == 0
    return m


def _unimodular_inverse(mat, d):
    """Exact inverse of a +-1-determinant 4x4 integer matrix (adjugate)."""
    n = 4
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[mat[r][c] for c in range(n) if c != j]
                   for r in range(n) if r != i]
            cof = det(sub) * ((-1) ** (i + j))
            inv[j][i] = cof * d    # d = 1/d for unimodular d
    return inv


class SquareReport:
    def __init__(self, h11, h0_antik, rank_square, d):
        self.h11 = h11
        self.h0_antik = h0_antik
        self.rank_square = rank_square
        self.d = d
        self.h1_lagrangian = h11 + d

    def tuple(self):
        return (self.h11, self.h0_antik, self.rank_square, self.d)

    def to_json(self):
        return {
            "h11": self.h11,
            "h0_antik": self.h0_antik,
            "rank_square": self.rank_square,
            "d": self.d,
            "h1_lagrangian": self.h1_lagrangian,
        }


def divisor_basis(fan: Fan):
    """Ray indices forming a divisor-class basis (all but four eliminated),
    plus the expression of every ray class over the basis.

    The four eliminated rays are chosen as late as possible in the input
    order subject to their generators forming a lattice basis.
    """
    n = len(fan.rays)
    eliminated = None
    for quad in combinations(range(n - 1, -1, -1), 4):
        quad = tuple(sorted(quad))
        if abs(det([list(fan.rays[i]) for i in quad])) == 1:
            eliminated = quad
            break
    if eliminated is None:
        raise FanError("no unimodular ray quadruple to eliminate against")
    basis = [i for i in range(n) if i not in eliminated]
    # Linear relations: for each character basis vector m_k (dual to the
    # eliminated rays), sum_r <m_k, v_r> D_r = 0, which solves for the
    # eliminated classes over the others.
    elim_matrix = [list(fan.rays[i]) for i in eliminated]
    d = det(elim_matrix)
    inv = _unimodular_inverse(elim_matrix, d)
    # m_k = column k of inv gives <m_k, v_elim_j> = delta_jk.
    expr = {}
    for b in basis:
        expr[b] = {b: 1}
    for k, i in enumerate(eliminated):
        m = tuple(inv[j][k] for j in range(4))
        coefs = {}
        for r in basis:
            p = sum(a * c for a, c in zip(m, fan.rays[r]))
            if p:
                coefs[r] = -p
        expr[i] = coefs
    return basis, expr


def square_report(fan: Fan) -> SquareReport:
    validate_fan(fan)
    basis, expr = divisor_basis(fan)
    k = len(basis)
    n = len(fan.rays)
    antik = {r: 1 for r in range(n)}      # -K = sum of all boundary divisors

    def pairing_4(c1, c2, c3, c4):
        total = 0
        for r1, a1 in c1.items():
            for r2, a2 in c2.items():
                for r3, a3 in c3.items():
                    for r4, a4 in c4.items():
                        coeff = a1 * a2 * a3 * a4
                        if coeff:
                            total += coeff * intersection_number(
                                fan, (r1, r2, r3, r4))
        return total

    classes = [expr[b] for b in basis]
    S = []
    for i in range(k):
        row = []
        for j in range(k):
            val = pairing_4(classes[i], classes[i], classes[j], antik)
            row.append(val & 1)
        S.append(row)
    rank = BitMatrix.from_rows(S, k).rank() if k else 0
    h0 = count_antik_sections(fan.rays)
    return SquareReport(k, h0, rank, k - rank)


def match_table(report: SquareReport):
    """Rows of the embedded table matching the computed tuple."""
    t = report.tuple()
    hits = [row for row in TABLE1 if row[1:] == t]
    status = "unmatched"
    if len(hits) == 1:
        status = "consistent"
    elif len(hits) > 1:
        status = "ambiguous"
    return {"tuple": list(t), "status": status,
            "ids": [row[0] for row in hits]}


# Published values per fourfold id: (id, h11, h0(-K), rank of the square
# map, d = kernel dimension).
TABLE1 = (
    (1, 3, 123, 2, 1), (2, 2, 159, 2, 0), (3, 4, 114, 2, 2),
    (4, 5, 78, 2, 3), (5, 4, 99, 2, 2), (6, 4, 96, 3, 1),
    (7, 3, 120, 2, 1), (8, 3, 117, 2, 1), (9, 4, 81, 2, 2),
    (10, 4, 102, 0, 4), (11, 4, 87, 2, 2), (12, 3, 114, 0, 3),
    (13, 4, 78, 4, 0), (14, 4, 84, 0, 4), (15, 4, 90, 3, 1),
    (16, 4, 72, 3, 1), (17, 3, 93, 3, 0), (18, 3, 108, 3, 0),
    (19, 3, 102, 0, 3), (20, 3, 84, 2, 1), (21, 2, 120, 2, 0),
    (22, 4, 104, 2, 2), (23, 5, 76, 4, 1), (24, 4, 92, 4, 0),
    (25, 4, 86, 4, 0), (26, 3, 114, 2, 1), (27, 4, 87, 3, 1),
    (28, 5, 69, 5, 0), (29, 5, 67, 2, 3), (30, 4, 70, 4, 0),
    (31, 5, 55, 3, 2), (32, 4, 69, 3, 1), (33, 5, 66, 3, 2),
    (34, 4, 78, 3, 1), (35, 4, 78, 3, 1), (36, 4, 81, 2, 2),
    (37, 3, 87, 2, 1), (38, 4, 81, 1, 3), (39, 5, 66, 5, 0),
    (40, 6, 51, 2, 4), (41, 3, 90, 3, 0), (42, 4, 70, 4, 0),
    (43, 3, 96, 2, 1), (44, 4, 75, 4, 0), (45, 3, 90, 2, 1),
    (46, 3, 85, 3, 0), (47, 2, 105, 2, 0), (48, 5, 92, 0, 5),
    (49, 6, 67, 0, 6), (50, 5, 83, 0, 5), (51, 4, 99, 0, 4),
    (52, 4, 96, 0, 4), (53, 5, 71, 0, 5), (54, 5, 85, 3, 2),
    (55, 6, 65, 4, 2), (56, 5, 85, 4, 1), (57, 6, 65, 4, 2),
    (58, 5, 79, 2, 3), (59, 5, 73, 3, 2), (60, 4, 93, 2, 2),
    (61, 5, 78, 0, 5), (62, 6, 63, 0, 6), (63, 6, 61, 4, 2),
    (64, 6, 59, 0, 6), (65, 5, 71, 3, 2), (66, 5, 71, 5, 0),
    (67, 5, 75, 0, 5), (68, 5, 77, 3, 2), (69, 5, 67, 0, 5),
    (70, 4, 86, 3, 1), (71, 4, 82, 0, 4), (72, 4, 87, 0, 4),
    (73, 4, 75, 0, 4), (74, 3, 100, 0, 3), (75, 6, 64, 2, 4),
    (76, 7, 56, 2, 5), (77, 8, 49, 2, 6), (78, 6, 63, 2, 4),
    (79, 5, 72, 2, 3), (80, 5, 70, 2, 3), (81, 4, 76, 2, 2),
    (82, 4, 90, 2, 2), (83, 4, 81, 2, 2), (84, 5, 65, 3, 2),
    (85, 4, 75, 2, 2), (86, 3, 85, 1, 2), (87, 4, 77, 3, 1),
    (88, 4, 82, 3, 1), (89, 4, 84, 0, 4), (90, 5, 69, 0, 5),
    (91, 4, 81, 2, 2), (92, 4, 81, 4, 0), (93, 4, 74, 3, 1),
    (94, 3, 95, 2, 1), (95, 4, 93, 4, 0), (96, 5, 72, 4, 1),
    (97, 5, 72, 0, 5), (98, 6, 63, 0, 6), (99, 5, 70, 2, 3),
    (100, 4, 87, 2, 2), (101, 4, 80, 2, 2), (102, 4, 78, 2, 2),
    (103, 4, 78, 0, 4), (104, 3, 90, 2, 1), (105, 3, 101, 2, 1),
    (106, 3, 102, 2, 1), (107, 4, 81, 0, 4), (108, 4, 75, 0, 4),
    (109, 3, 96, 2, 1), (110, 3, 90, 0, 3), (111, 3, 99, 2, 1),
    (112, 3, 90, 2, 1), (113, 3, 84, 2, 1), (114, 3, 84, 3, 0),
    (115, 2, 105, 1, 1), (116, 2, 129, 0, 2), (117, 3, 93, 0, 3),
    (118, 2, 105, 2, 0), (119, 4, 81, 0, 4), (120, 3, 90, 0, 3),
    (121, 2, 111, 2, 0), (122, 2, 105, 0, 2), (123, 2, 100, 2, 0),
    (124, 1, 126, 1, 0),
)


def projective_space_fan() -> Fan:
    rays = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
            (-1, -1, -1, -1)]
    cones = list(combinations(range(5), 4))
    return Fan(rays, cones)


def product_of_lines_fan() -> Fan:
    rays = []
    for i in range(4):
        plus = [0] * 4
        plus[i] = 1
        minus = [0] * 4
        minus[i] = -1
        rays.append(tuple(plus))
        rays.append(tuple(minus))
    cones = []
    for choice in range(16):
        cone = []
        for i in range(4):
            cone.append(2 * i + ((choice >> i) & 1))
        cones.append(tuple(cone))
    return Fan(rays, cones)


def line_times_threespace_fan() -> Fan:
    rays = [(1, 0, 0, 0), (-1, 0, 0, 0),
            (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (0, -1, -1, -1)]
    cones = []
    for a in (0, 1):
        for omit in range(2, 6):
            cone = [a] + [i for i in range(2, 6) if i != omit]
            cones.append(tuple(cone))
    return Fan(rays, cones)
