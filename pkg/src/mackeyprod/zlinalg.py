"""Exact integer linear algebra: Smith normal form and cokernels.

Relation systems are stored sparsely (`IntMatrix`).  The Smith form itself is
computed densely with min-absolute-value pivoting; `cokernel_structure` first
eliminates unit pivots sparsely, which keeps the large naive-oracle systems
tractable without changing the quotient group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from typing import Iterable, Sequence


class IntMatrix:
    """Sparse integer matrix; duplicate coordinates are summed on insertion."""

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int, int]] = ()):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        for i, j, v in entries:
            self.add(i, j, v)

    def add(self, i: int, j: int, v: int) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols}")
        v += self.entries.get((i, j), 0)
        if v:
            self.entries[(i, j)] = v
        else:
            self.entries.pop((i, j), None)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        m = cls(len(rows), ncols)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if v:
                    m.add(i, j, int(v))
        return m

    @classmethod
    def from_sparse_rows(cls, rows: Sequence[dict[int, int]], cols: int) -> "IntMatrix":
        m = cls(len(rows), cols)
        for i, r in enumerate(rows):
            for j, v in r.items():
                if v:
                    m.add(i, j, v)
        return m

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, ((i, i, 1) for i in range(n)))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def sparse_rows(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        right = other.sparse_rows()
        out = IntMatrix(self.rows, other.cols)
        for (i, k), v in self.entries.items():
            for j, w in right[k].items():
                out.add(i, j, v * w)
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and (self.rows, self.cols) == (other.rows, other.cols)
                and self.entries == other.entries)

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def determinant(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    a = m.to_dense()
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


# --- Smith normal form --------------------------------------------------------

def _snf_dense(a: list[list[int]], track: bool):
    nr = len(a)
    nc = len(a[0]) if nr else 0
    U = [[int(i == j) for j in range(nr)] for i in range(nr)] if track else None
    V = [[int(i == j) for j in range(nc)] for i in range(nc)] if track else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        if track:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        rd, rs = a[dst], a[src]
        for k in range(nc):
            if rs[k]:
                rd[k] += q * rs[k]
        if track:
            ud, us = U[dst], U[src]
            for k in range(nr):
                if us[k]:
                    ud[k] += q * us[k]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for r in a:
            if r[src]:
                r[dst] += q * r[src]
        if track:
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]

    t = 0
    while t < min(nr, nc):
        while True:
            best = None
            for i in range(t, nr):
                row = a[i]
                for j in range(t, nc):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            piv = a[t][t]
            clean = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // piv))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // piv))
                    if a[t][j]:
                        clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if best is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if track:
                U[t] = [-x for x in U[t]]
        t += 1
    return a, U, V


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, S, V) with U @ m @ V == S, U and V unimodular, S in Smith form."""
    a, U, V = _snf_dense(m.to_dense(), track=True)
    return (IntMatrix.from_dense(U, m.rows), IntMatrix.from_dense(a, m.cols),
            IntMatrix.from_dense(V, m.cols))


def diagonal(s: IntMatrix) -> list[int]:
    return [s.entries.get((i, i), 0) for i in range(min(s.rows, s.cols))]


# --- sparse unit-pivot elimination ---------------------------------------------

def _eliminate_units(rows: list[dict[int, int]], ncols: int) -> tuple[list[dict[int, int]], list[int]]:
    """Eliminate generators that some relation expresses with coefficient +-1.

    Returns the residual relations over the surviving columns (reindexed) and
    the list of surviving original column indices.  The cokernel is unchanged.
    """
    subst: dict[int, dict[int, int]] = {}

    def resolve(row: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        stack = list(row.items())
        while stack:
            c, v = stack.pop()
            if not v:
                continue
            expr = subst.get(c)
            if expr is None:
                out[c] = out.get(c, 0) + v
                if not out[c]:
                    del out[c]
            else:
                stack.extend((k, v * w) for k, w in expr.items())
        return out

    residual: list[dict[int, int]] = []
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), i))
    for idx in order:
        r = resolve(rows[idx])
        if not r:
            continue
        units = sorted(c for c, v in r.items() if v in (1, -1))
        if not units:
            residual.append(r)
            continue
        c = units[-1]
        u = r.pop(c)
        # e_c = -u * (rest); substitute eagerly into existing expressions
        expr = {k: -u * v for k, v in r.items()}
        for k, e in subst.items():
            if c in e:
                w = e.pop(c)
                for kk, vv in expr.items():
                    e[kk] = e.get(kk, 0) + w * vv
                    if not e[kk]:
                        del e[kk]
        subst[c] = expr
    residual = [r for r in (resolve(r) for r in residual) if r]
    keep = [c for c in range(ncols) if c not in subst]
    index = {c: i for i, c in enumerate(keep)}
    return [{index[c]: v for c, v in r.items()} for r in residual], keep


# --- cokernels ------------------------------------------------------------------

@dataclass
class CokernelStructure:
    """Z^n / rowspan as torsion invariant factors plus free rank."""

    invariant_factors: list[int]
    free_rank: int
    ambient_rank: int
    diagonal: list[int] = field(default_factory=list)

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors


def cokernel_structure(m: IntMatrix, ambient_rank: int | None = None) -> CokernelStructure:
    n = m.cols if ambient_rank is None else ambient_rank
    if m.cols != n:
        raise ValueError(f"relation matrix has {m.cols} columns, expected {n}")
    rows = [r for r in m.sparse_rows() if r]
    residual, keep = _eliminate_units(rows, n)
    k = len(keep)
    if not residual:
        return CokernelStructure([], k, n)
    # canonical order so that the dense pass is independent of input order
    residual.sort(key=lambda r: sorted(r.items()))
    dense = [[r.get(j, 0) for j in range(k)] for r in residual]
    s, _, _ = _snf_dense(dense, track=False)
    diag = [s[i][i] for i in range(min(len(s), k))]
    nonzero = [d for d in diag if d]
    return CokernelStructure([d for d in nonzero if d != 1], k - len(nonzero), n, diag)


def kernel_basis_of_functional(w: Sequence[int]) -> list[list[int]]:
    """Z-basis of {x : w . x = 0}."""
    n = len(w)
    if not any(w):
        return [[int(i == j) for j in range(n)] for i in range(n)]
    _, _, V = _snf_dense([list(w)], track=True)
    return [[V[i][j] for i in range(n)] for j in range(1, n)]


# --- membership -----------------------------------------------------------------

class RowLattice:
    """The row lattice of a relation matrix, prepared once for many membership tests."""

    def __init__(self, m: IntMatrix):
        self.matrix = m
        self.U, self.S, self.V = smith_normal_form(m)
        self.diag = diagonal(self.S)
        self._U = self.U.sparse_rows()
        self._V = self.V.to_dense()

    def contains(self, v: Sequence[int]) -> tuple[bool, dict]:
        m = self.matrix
        if len(v) != m.cols:
            raise ValueError(f"vector of length {len(v)} against {m.cols} columns")
        w = [sum(v[i] * self._V[i][j] for i in range(m.cols) if v[i]) for j in range(m.cols)]
        z: dict[int, int] = {}
        for j, wj in enumerate(w):
            d = self.diag[j] if j < len(self.diag) else 0
            if d == 0:
                if wj:
                    return False, {"reason": "outside the rational span", "coordinate": j, "value": wj}
                continue
            if wj % d:
                return False, {"reason": "divisibility", "coordinate": j, "invariant": d, "value": wj}
            if wj:
                z[j] = wj // d
        combo: dict[int, int] = {}
        for j, zj in z.items():
            for r, u in self._U[j].items():
                combo[r] = combo.get(r, 0) + zj * u
        return True, {"combination": {r: c for r, c in sorted(combo.items()) if c}}


def image_contains(m: IntMatrix, v: Sequence[int]) -> tuple[bool, dict]:
    """Is v an integer combination of the rows of m?

    On success the certificate maps row index -> coefficient; on failure it
    names the Smith coordinate that obstructs membership.
    """
    return RowLattice(m).contains(v)


def check_combination(m: IntMatrix, v: Sequence[int], combination: dict[int, int]) -> bool:
    total = [0] * m.cols
    for (i, j), x in m.entries.items():
        c = combination.get(i)
        if c:
            total[j] += c * x
    return total == list(v)
