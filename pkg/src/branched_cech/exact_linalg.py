"""Exact sparse integer linear algebra: Smith normal form, mod-2 ranks,
and invariant-factor descriptions of finitely generated abelian groups.

Everything runs on arbitrary-precision Python integers; no floating point
is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


# When True, every Smith normal form with transforms re-multiplies U*M*V and
# compares against the diagonal. Enabled by the test suite.
SELF_CHECK = False


class SparseIntMatrix:
    """Integer matrix stored as {(row, col): value} with no explicit zeros."""

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                self[i, j] = v

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def __setitem__(self, key, value):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {key} outside {self.rows}x{self.cols}")
        if value:
            self.entries[key] = value
        else:
            self.entries.pop(key, None)

    def __eq__(self, other):
        return (isinstance(other, SparseIntMatrix)
                and (self.rows, self.cols) == (other.rows, other.cols)
                and self.entries == other.entries)

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    @classmethod
    def from_rows(cls, rows_list, cols=None):
        rows = len(rows_list)
        if cols is None:
            cols = len(rows_list[0]) if rows_list else 0
        m = cls(rows, cols)
        for i, row in enumerate(rows_list):
            for j, v in enumerate(row):
                if v:
                    m[i, j] = v
        return m

    def to_rows(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self):
        m = SparseIntMatrix(self.cols, self.rows)
        for (i, j), v in self.entries.items():
            m.entries[(j, i)] = v
        return m

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        out = SparseIntMatrix(self.rows, other.cols)
        acc = {}
        for (i, k), v in self.entries.items():
            for j, w in by_row.get(k, ()):
                key = (i, j)
                acc[key] = acc.get(key, 0) + v * w
        for key, v in acc.items():
            if v:
                out.entries[key] = v
        return out

    def apply(self, vec):
        """Matrix-vector product; vec indexed by columns."""
        out = [0] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] += v * vec[j]
        return out

    def is_zero(self):
        return not self.entries

    def mod2(self):
        """Rows of the matrix as a BitMatrix over GF(2)."""
        bits = [0] * self.rows
        for (i, j), v in self.entries.items():
            if v & 1:
                bits[i] |= 1 << j
        return BitMatrix(self.rows, self.cols, bits)

    def dump_triplets(self):
        """Line-based `row col value` dump for external cross-checking."""
        lines = [f"{self.rows} {self.cols}"]
        for (i, j) in sorted(self.entries):
            lines.append(f"{i} {j} {self.entries[(i, j)]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load_triplets(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols = map(int, lines[0].split())
        m = cls(rows, cols)
        for ln in lines[1:]:
            i, j, v = ln.split()
            m[int(i), int(j)] = int(v)
        return m


class AbelianGroup:
    """Isomorphism class of a finitely generated abelian group.

    torsion is the invariant-factor list d_1 | d_2 | ... with every d_i >= 2.
    """

    def __init__(self, free_rank=0, torsion=()):
        factors = [abs(d) for d in torsion if d not in (0, 1, -1)]
        # Normalize to a divisibility chain via repeated gcd/lcm exchanges.
        changed = True
        while changed:
            changed = False
            for a in range(len(factors)):
                for b in range(a + 1, len(factors)):
                    if factors[b] % factors[a]:
                        g = gcd(factors[a], factors[b])
                        factors[a], factors[b] = g, factors[a] * factors[b] // g
                        changed = True
            factors = [d for d in factors if d != 1]
        self.free_rank = free_rank
        self.torsion = tuple(sorted(factors))

    def __eq__(self, other):
        return (isinstance(other, AbelianGroup)
                and self.free_rank == other.free_rank
                and self.torsion == other.torsion)

    def __hash__(self):
        return hash((self.free_rank, self.torsion))

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        counts = {}
        for d in self.torsion:
            counts[d] = counts.get(d, 0) + 1
        for d in sorted(counts):
            parts.append(f"Z{d}" if counts[d] == 1 else f"Z{d}^{counts[d]}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def is_2_primary(self):
        """True when every torsion element has 2-power order."""
        return all(d & (d - 1) == 0 for d in self.torsion)

    def exponent(self):
        """Largest invariant factor (1 for torsion-free groups)."""
        return self.torsion[-1] if self.torsion else 1

    def torsion_dim_mod2(self):
        return sum(1 for d in self.torsion if d % 2 == 0)

    def dim_mod2(self):
        """Dimension of G (x) Z/2, i.e. free rank plus even torsion factors."""
        return self.free_rank + self.torsion_dim_mod2()

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


@dataclass
class SmithForm:
    """U * M * V = diag(invariant_factors), with U, V unimodular."""

    invariant_factors: tuple
    U: SparseIntMatrix
    V: SparseIntMatrix

    def diagonal(self, rows, cols):
        d = SparseIntMatrix(rows, cols)
        for k, v in enumerate(self.invariant_factors):
            if v:
                d[k, k] = v
        return d


def smith_normal_form(M: SparseIntMatrix) -> SmithForm:
    """Full SNF with unimodular transforms U, V such that U*M*V is diagonal.

    Dense working copy; intended for matrices up to a few hundred rows/cols.
    """
    rows, cols = M.rows, M.cols
    m = M.to_rows()
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def row_op(src, dst, q):
        # row dst += q * row src
        ms, md = m[src], m[dst]
        for j in range(cols):
            if ms[j]:
                md[j] += q * ms[j]
        us, ud = U[src], U[dst]
        for j in range(rows):
            if us[j]:
                ud[j] += q * us[j]

    def col_op(src, dst, q):
        # col dst += q * col src (V tracked column-wise)
        for i in range(rows):
            if m[i][src]:
                m[i][dst] += q * m[i][src]
        for i in range(cols):
            if V[i][src]:
                V[i][dst] += q * V[i][src]

    def swap_rows(a, b):
        if a != b:
            m[a], m[b] = m[b], m[a]
            U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        if a != b:
            for i in range(rows):
                m[i][a], m[i][b] = m[i][b], m[i][a]
            for i in range(cols):
                V[i][a], V[i][b] = V[i][b], V[i][a]

    def negate_row(a):
        m[a] = [-x for x in m[a]]
        U[a] = [-x for x in U[a]]

    def clear_block(t):
        """Euclidean clearing of row/column t of the trailing block."""
        while True:
            done = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    row_op(t, i, -q)
                    if m[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    col_op(t, j, -q)
                    if m[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                return

    t = 0
    n = min(rows, cols)
    while t < n:
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = abs(m[i][j])
                if v and (best is None or v < best):
                    best, pivot = v, (i, j)
                    if v == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        clear_block(t)
        if m[t][t] < 0:
            negate_row(t)
        t += 1

    # Enforce the divisibility chain d_i | d_{i+1} by absorbing each bad pair
    # back into a 2x2 re-diagonalization.
    changed = True
    while changed:
        changed = False
        for a in range(t):
            for b in range(a + 1, t):
                if m[b][b] % m[a][a]:
                    col_op(b, a, 1)
                    # The block is now [[da, 0], [db, db]]; re-diagonalize it.
                    swap_rows(a, a)
                    _euclid_pair(m, U, V, rows, cols, a, b)
                    changed = True

    factors = tuple(m[k][k] for k in range(t))
    Vm = SparseIntMatrix.from_rows(V, cols) if cols else SparseIntMatrix(0, 0)
    form = SmithForm(factors, SparseIntMatrix.from_rows(U, rows), Vm)
    if SELF_CHECK:
        check_smith_form(M, form)
    return form


def _euclid_pair(m, U, V, rows, cols, a, b):
    """Re-diagonalize rows/cols a, b (all other entries in them are zero)."""
    def row_op(src, dst, q):
        ms, md = m[src], m[dst]
        for j in range(cols):
            if ms[j]:
                md[j] += q * ms[j]
        us, ud = U[src], U[dst]
        for j in range(rows):
            if us[j]:
                ud[j] += q * us[j]

    def col_op(src, dst, q):
        for i in range(rows):
            if m[i][src]:
                m[i][dst] += q * m[i][src]
        for i in range(cols):
            if V[i][src]:
                V[i][dst] += q * V[i][src]

    while True:
        if m[b][a]:
            if m[a][a]:
                row_op(a, b, -(m[b][a] // m[a][a]))
            if m[b][a]:
                m[a], m[b] = m[b], m[a]
                U[a], U[b] = U[b], U[a]
                continue
        if m[a][b]:
            if m[a][a]:
                col_op(a, b, -(m[a][b] // m[a][a]))
            if m[a][b]:
                for i in range(rows):
                    m[i][a], m[i][b] = m[i][b], m[i][a]
                for i in range(cols):
                    V[i][a], V[i][b] = V[i][b], V[i][a]
                continue
        break
    for k in (a, b):
        if m[k][k] < 0:
            m[k] = [-x for x in m[k]]
            U[k] = [-x for x in U[k]]


def check_smith_form(M, form):
    prod = form.U.mul(M).mul(form.V)
    assert prod == form.diagonal(M.rows, M.cols), "SNF re-multiplication failed"
    for a, b in zip(form.invariant_factors, form.invariant_factors[1:]):
        assert a > 0 and b % a == 0, "invariant factors not a divisibility chain"
    assert abs(det(form.U.to_rows())) == 1, "U not unimodular"
    assert abs(det(form.V.to_rows())) == 1, "V not unimodular"


def det(rows):
    """Fraction-free (Bareiss) determinant of a small dense square matrix."""
    n = len(rows)
    if n == 0:
        return 1
    m = [row[:] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not m[k][k]:
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


def invariant_factors(M: SparseIntMatrix):
    """Invariant factors of M (including any trailing 1s), without transforms.

    Sparse elimination with Markowitz-style pivoting: prefer unit pivots with
    minimal fill-in, otherwise the smallest nonzero absolute value. Pivots
    need not divide the remaining entries; the collected diagonal is
    normalized into a divisibility chain at the end, which yields the same
    invariant factors.
    """
    row = {}
    col = {}
    for (i, j), v in M.entries.items():
        row.setdefault(i, {})[j] = v
        col.setdefault(j, set()).add(i)

    def put(i, j, v):
        r = row.get(i)
        if v:
            if r is None:
                r = row[i] = {}
            r[j] = v
            col.setdefault(j, set()).add(i)
        elif r and j in r:
            del r[j]
            if not r:
                del row[i]
            c = col[j]
            c.discard(i)
            if not c:
                del col[j]

    diagonal = []
    while row:
        # Pivot search: unit entries first (no coefficient growth).
        best = None
        best_cost = None
        for i, r in row.items():
            for j, v in r.items():
                if abs(v) == 1:
                    cost = (len(r) - 1) * (len(col[j]) - 1)
                    if best_cost is None or cost < best_cost:
                        best, best_cost = (i, j), cost
                        if cost == 0:
                            break
            if best_cost == 0:
                break
        if best is None:
            best_val = None
            for i, r in row.items():
                for j, v in r.items():
                    if best_val is None or abs(v) < best_val:
                        best_val, best = abs(v), (i, j)
        i0, j0 = best
        piv = row[i0][j0]

        # Clear the pivot column. Floor-division remainders are strictly
        # smaller than |piv|; if one appears, promote it to pivot and retry.
        remainder = False
        for i in sorted(col[j0]):
            if i == i0:
                continue
            q = row[i][j0] // piv
            if q:
                for j, w in list(row[i0].items()):
                    put(i, j, row.get(i, {}).get(j, 0) - q * w)
            if row.get(i, {}).get(j0, 0):
                remainder = True
                break
        if remainder:
            continue
        # Clear the pivot row by column operations (only the pivot column has
        # other entries cleared already, so these touch no other rows' j0).
        for j in sorted(row[i0].keys()):
            if j == j0:
                continue
            q = row[i0][j] // piv
            if q:
                for i in sorted(col[j0]):
                    put(i, j, row.get(i, {}).get(j, 0) - q * row[i][j0])
            if row.get(i0, {}).get(j, 0):
                remainder = True
                break
        if remainder:
            continue
        put(i0, j0, 0)
        diagonal.append(abs(piv))

    ones = sum(1 for d in diagonal if d == 1)
    chain = AbelianGroup(0, diagonal).torsion
    return (1,) * ones + chain


def rank(M: SparseIntMatrix):
    """Rank over the rationals."""
    return len(invariant_factors(M))


def cokernel(M: SparseIntMatrix) -> AbelianGroup:
    """Z^rows / (column span of M)."""
    facs = invariant_factors(M)
    return AbelianGroup(M.rows - len(facs), facs)


def cohomology_at(d_in: SparseIntMatrix, d_out: SparseIntMatrix) -> AbelianGroup:
    """ker(d_out) / im(d_in) as an abstract abelian group.

    d_in maps into the middle term, d_out maps out of it. For a complex of
    free modules the torsion of the cohomology equals the torsion of
    coker(d_in), and the free rank is dim(middle) - rank(d_in) - rank(d_out).
    """
    if d_in.rows != d_out.cols:
        raise ValueError("middle dimensions disagree")
    if not d_out.mul(d_in).is_zero():
        raise ValueError("not a complex")
    facs_in = invariant_factors(d_in)
    free = d_in.rows - len(facs_in) - rank(d_out)
    assert free >= 0
    return AbelianGroup(free, facs_in)


class BitMatrix:
    """Dense matrix over GF(2), one Python int per row (bit j = column j)."""

    def __init__(self, rows, cols, bits=None):
        self.rows = rows
        self.cols = cols
        self.bits = list(bits) if bits is not None else [0] * rows

    @classmethod
    def from_rows(cls, rows_list, cols=None):
        rows = len(rows_list)
        if cols is None:
            cols = len(rows_list[0]) if rows_list else 0
        bits = []
        for row in rows_list:
            b = 0
            for j, v in enumerate(row):
                if v & 1:
                    b |= 1 << j
            bits.append(b)
        return cls(rows, cols, bits)

    def _echelon(self):
        """List of (pivot, row) sorted by pivot descending.

        Each stored row has its pivot as highest set bit, so a single pass in
        descending pivot order fully reduces any vector.
        """
        basis = []  # kept sorted by pivot descending
        for b in self.bits:
            b = _reduce_bits(b, basis)
            if b:
                p = b.bit_length() - 1
                basis.append((p, b))
                basis.sort(key=lambda pr: -pr[0])
        return basis

    def rank(self):
        return len(self._echelon())

    def nullspace(self):
        """Basis of the right kernel, each vector an int bitmask."""
        basis = self._echelon()
        pivot_set = {p for p, _ in basis}
        out = []
        for j in range(self.cols):
            if j in pivot_set:
                continue
            v = 1 << j
            # Fix pivot coordinates in increasing pivot order; each row's
            # support lies at or below its pivot.
            for p, r in sorted(basis):
                if bin(r & v).count("1") & 1:
                    v ^= 1 << p
            out.append(v)
        for v in out:
            assert all(bin(row & v).count("1") % 2 == 0 for row in self.bits)
        return out

    def left_nullspace(self):
        return self.transpose().nullspace()

    def transpose(self):
        out = [0] * self.cols
        for i, b in enumerate(self.bits):
            while b:
                low = b & (-b)
                out[low.bit_length() - 1] |= 1 << i
                b ^= low
        return BitMatrix(self.cols, self.rows, out)

    def apply(self, vec_mask):
        """Image of a column vector (bitmask over columns) as a row bitmask."""
        out = 0
        for i, b in enumerate(self.bits):
            if bin(b & vec_mask).count("1") & 1:
                out |= 1 << i
        return out


def _reduce_bits(b, basis):
    for p, r in basis:
        if (b >> p) & 1:
            b ^= r
    return b


def rank_mod2(M) -> int:
    """Rank over GF(2) of a SparseIntMatrix or BitMatrix."""
    if isinstance(M, SparseIntMatrix):
        M = M.mod2()
    return M.rank()


def solve_int(M: SparseIntMatrix, target):
    """One integer solution x of M x = target (list over rows), or None."""
    form = smith_normal_form(M)
    d = form.invariant_factors
    u_t = form.U.apply(target)
    y = [0] * M.cols
    for k in range(M.rows):
        dk = d[k] if k < len(d) else 0
        if dk:
            if u_t[k] % dk:
                return None
            if k < M.cols:
                y[k] = u_t[k] // dk
        elif u_t[k]:
            return None
    x = form.V.apply(y)
    if SELF_CHECK:
        assert M.apply(x) == list(target)
    return x
