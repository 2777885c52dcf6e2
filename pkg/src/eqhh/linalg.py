"""Exact sparse linear algebra over Q and Q(zeta_n).

Elimination is fraction-free: every connected block of a matrix is scaled to
an integral form (Z, or Z[zeta] for cyclotomic entries), rows are combined as
``p*row - a*pivot_row`` and divided by their content.  Pivots are chosen
deterministically (first column, then first row carrying it), so the reduced
echelon form, and hence every returned basis, is canonical.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import config
from .scalars import (
    Cyclotomic,
    Scalar,
    _cyclotomic_polynomial,
    as_scalar,
    euler_phi,
    lcm,
    make_cyclotomic,
)


class NotASubspace(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class SparseMatrix:
    """Immutable sparse matrix with exact entries; zero entries are never stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry {(r, c)} outside {rows}x{cols}")
            if v:
                clean[(r, c)] = v if isinstance(v, (Fraction, Cyclotomic)) else as_scalar(v)
        self.entries = clean

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(data) for j, v in enumerate(row) if v}
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence, rows: int) -> "SparseMatrix":
        """Columns given as dense sequences or as ``{row: value}`` dicts."""
        entries = {}
        for j, col in enumerate(columns):
            items = col.items() if isinstance(col, dict) else enumerate(col)
            for i, v in items:
                if v:
                    entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> list[list[Scalar]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def column(self, c: int) -> list[Scalar]:
        out = [Fraction(0)] * self.rows
        for (r, cc), v in self.entries.items():
            if cc == c:
                out[r] = v
        return out

    def columns(self) -> list[list[Scalar]]:
        out = [[Fraction(0)] * self.rows for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot compose {self.shape} with {other.shape}")
        by_row: dict[int, list] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc: dict = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                key = (r, c)
                acc[key] = acc[key] + v * w if key in acc else v * w
        return SparseMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc[k] + v if k in acc else v
        return SparseMatrix(self.rows, self.cols, acc)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scaled(-1)

    def scaled(self, s) -> "SparseMatrix":
        s = as_scalar(s)
        return SparseMatrix(self.rows, self.cols, {k: v * s for k, v in self.entries.items()})

    def apply(self, vec: Sequence) -> list[Scalar]:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        out: list = [Fraction(0)] * self.rows
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] = out[r] + v * vec[c]
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    __hash__ = None

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def __getstate__(self):
        return (self.rows, self.cols, self.entries)

    def __setstate__(self, state):
        self.rows, self.cols, self.entries = state


# -- integral rings used during elimination --------------------------------

class _ZZeta:
    """Element of Z[zeta_n] as an integer coefficient tuple of length phi(n)."""

    __slots__ = ("c", "n")

    def __init__(self, c: tuple, n: int):
        self.c = c
        self.n = n

    def __mul__(self, other):
        if isinstance(other, int):
            return _ZZeta(tuple(x * other for x in self.c), self.n)
        a, b = self.c, other.c
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        phi = _cyclotomic_polynomial(self.n)
        deg = len(phi) - 1
        for i in range(len(out) - 1, deg - 1, -1):
            c = out[i]
            if c:
                base = i - deg
                for j in range(deg):
                    if phi[j]:
                        out[base + j] -= c * phi[j]
        return _ZZeta(tuple(out[:deg]), self.n)

    __rmul__ = __mul__

    def __sub__(self, other):
        return _ZZeta(tuple(x - y for x, y in zip(self.c, other.c)), self.n)

    def __bool__(self):
        return any(self.c)

    def content(self) -> int:
        g = 0
        for x in self.c:
            g = gcd(g, x)
        return g

    def divexact(self, k: int) -> "_ZZeta":
        return _ZZeta(tuple(x // k for x in self.c), self.n)

    def to_field(self) -> Scalar:
        return make_cyclotomic(self.n, self.c)

    @classmethod
    def from_field(cls, x: Scalar, n: int, scale: int) -> "_ZZeta":
        coeffs = x.lifted(n) if isinstance(x, Cyclotomic) else [Fraction(x)] + [Fraction(0)] * (euler_phi(n) - 1)
        out = []
        for c in coeffs:
            v = c * scale
            assert v.denominator == 1
            out.append(v.numerator)
        return cls(tuple(out), n)


def _content(x) -> int:
    return abs(x) if isinstance(x, int) else x.content()


def _divexact(x, k: int):
    return x // k if isinstance(x, int) else x.divexact(k)


def _ring_divexact(a, b):
    """Exact quotient a/b inside the integral ring (Bareiss step)."""
    if isinstance(a, int):
        q, r = divmod(a, b)
        assert r == 0, "inexact Bareiss division"
        return q
    q = a.to_field() / b.to_field()
    return _ZZeta.from_field(q, a.n, 1)


def _to_field(x) -> Scalar:
    return Fraction(x) if isinstance(x, int) else x.to_field()


def _denominators(x) -> int:
    if isinstance(x, Cyclotomic):
        d = 1
        for c in x.coeffs:
            d = lcm(d, c.denominator)
        return d
    return x.denominator


def _integral_rows(rows: dict[int, dict[int, Scalar]]) -> dict[int, dict]:
    """Scale each row to an integral representation (ints or Z[zeta_n])."""
    order = 1
    for row in rows.values():
        for v in row.values():
            if isinstance(v, Cyclotomic):
                order = lcm(order, v.order)
    out = {}
    for r, row in rows.items():
        scale = 1
        for v in row.values():
            scale = lcm(scale, _denominators(v))
        if order == 1:
            irow = {}
            for c, v in row.items():
                q = v * scale
                irow[c] = q.numerator
        else:
            irow = {c: _ZZeta.from_field(v, order, scale) for c, v in row.items()}
        out[r] = _normalize_row(irow)
    return out


def _normalize_row(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, _content(v))
        if g == 1:
            return row
    if g > 1:
        return {c: _divexact(v, g) for c, v in row.items()}
    return row


def _components(M: SparseMatrix) -> list[tuple[list[int], list[int]]]:
    """Connected blocks of the bipartite row/column incidence graph."""
    parent = list(range(M.cols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first_col: dict[int, int] = {}
    for (r, c) in M.entries:
        if r in first_col:
            a, b = find(first_col[r]), find(c)
            if a != b:
                parent[max(a, b)] = min(a, b)
        else:
            first_col[r] = c
    groups: dict[int, tuple[list, list]] = {}
    for c in range(M.cols):
        groups.setdefault(find(c), ([], []))[1].append(c)
    for r, c in first_col.items():
        groups[find(c)][0].append(r)
    return [(sorted(rs), cs) for _, (rs, cs) in sorted(groups.items())]


def _echelon(rows: list[dict], cols: list[int], reduced: bool) -> list[tuple[int, dict]]:
    """Fraction-free echelon form with first-column, first-row pivoting.

    Returns ``[(pivot_col, row), ...]`` in pivot order.  With ``reduced`` the
    pivot columns are cleared above as well (scaled reduced echelon form).
    """
    remaining = [r for r in rows if r]
    pivots: list[tuple[int, dict]] = []
    for c in cols:
        idx = next((i for i, r in enumerate(remaining) if c in r), None)
        if idx is None:
            continue
        prow = remaining.pop(idx)
        p = prow[c]
        targets = [i for i, r in enumerate(remaining) if c in r]
        for i in targets:
            remaining[i] = _combine(remaining[i], prow, p, c)
        if reduced:
            for k, (pc, r) in enumerate(pivots):
                if c in r:
                    pivots[k] = (pc, _combine(r, prow, p, c))
        remaining = [r for r in remaining if r]
        pivots.append((c, prow))
        if not remaining and not reduced:
            break
    return pivots


def _combine(row: dict, prow: dict, p, c: int) -> dict:
    """p*row - row[c]*prow, with the content divided out."""
    a = row[c]
    out = {}
    for k, v in row.items():
        out[k] = v * p
    for k, v in prow.items():
        if k in out:
            nv = out[k] - v * a
            if nv:
                out[k] = nv
            else:
                del out[k]
        else:
            out[k] = _neg(v * a)
    out.pop(c, None)
    return _normalize_row(out)


def _neg(x):
    return -x if isinstance(x, int) else _ZZeta(tuple(-y for y in x.c), x.n)


def _bareiss_rank(rows: list[dict], cols: list[int]) -> int:
    """Classical dense Bareiss elimination; used for narrow blocks."""
    if not rows:
        return 0
    zero = 0 if all(isinstance(v, int) for r in rows for v in r.values()) else None
    if zero is None:
        n = next(v.n for r in rows for v in r.values() if not isinstance(v, int))
        zero = _ZZeta(tuple([0] * euler_phi(n)), n)
    A = [[r.get(c, zero) for c in cols] for r in rows]
    m, ncol = len(A), len(cols)
    integral = isinstance(zero, int)
    prev = 1
    rank = 0
    for col in range(ncol):
        piv = next((i for i in range(rank, m) if A[i][col]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank][col]
        if integral:
            for i in range(rank + 1, m):
                a = A[i][col]
                for j in range(col + 1, ncol):
                    A[i][j] = _ring_divexact(A[i][j] * p - A[rank][j] * a, prev)
                A[i][col] = zero
        else:
            # one field inversion per step: x / prev = (x * num) / den with num in Z[zeta]
            num, den = _integral_inverse(prev, zero)
            for i in range(rank + 1, m):
                a = A[i][col]
                for j in range(col + 1, ncol):
                    x = A[i][j] * p - A[rank][j] * a
                    A[i][j] = (x * num).divexact(den) if x else zero
                A[i][col] = zero
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def _integral_inverse(x, zero: "_ZZeta") -> tuple["_ZZeta", int]:
    n = zero.n
    if isinstance(x, int):
        return _ZZeta((1 if x > 0 else -1,) + (0,) * (len(zero.c) - 1), n), abs(x)
    inv = 1 / x.to_field()
    den = _denominators(inv)
    num = _ZZeta.from_field(inv, n, den)
    return num, den


def _rows_of(M: SparseMatrix) -> dict[int, dict[int, Scalar]]:
    rows: dict[int, dict[int, Scalar]] = {}
    for (r, c), v in M.entries.items():
        rows.setdefault(r, {})[c] = v
    return rows


def rank(M: SparseMatrix) -> int:
    rows = _rows_of(M)
    total = 0
    for rs, cs in _components(M):
        if not rs:
            continue
        block = _integral_rows({r: rows[r] for r in rs})
        if len(rs) == 1:
            total += 1
        elif len(cs) <= config.GUARDS.dense_threshold:
            total += _bareiss_rank([block[r] for r in rs], cs)
        else:
            total += len(_echelon([block[r] for r in rs], cs, reduced=False))
    return total


def rref_pivots(M: SparseMatrix) -> list[int]:
    """Pivot columns of the reduced echelon form (first independent columns)."""
    rows = _rows_of(M)
    piv = []
    for rs, cs in _components(M):
        if rs:
            block = _integral_rows({r: rows[r] for r in rs})
            piv.extend(c for c, _ in _echelon([block[r] for r in rs], cs, reduced=False))
    return sorted(piv)


def kernel_basis(M: SparseMatrix) -> list[tuple[Scalar, ...]]:
    """Canonical basis of the right kernel, one vector per free column, in column order."""
    rows = _rows_of(M)
    vectors: list[tuple[int, dict[int, Scalar]]] = []
    for rs, cs in _components(M):
        if not rs:
            vectors.extend((c, {c: Fraction(1)}) for c in cs)
            continue
        block = _integral_rows({r: rows[r] for r in rs})
        pivots = _echelon([block[r] for r in rs], cs, reduced=True)
        pivot_cols = {c for c, _ in pivots}
        for f in cs:
            if f in pivot_cols:
                continue
            vec = {f: Fraction(1)}
            for pc, prow in pivots:
                if f in prow:
                    vec[pc] = -_to_field(prow[f]) / _to_field(prow[pc])
            vectors.append((f, vec))
    vectors.sort(key=lambda t: t[0])
    out = []
    for _, vec in vectors:
        dense = [Fraction(0)] * M.cols
        for c, v in vec.items():
            dense[c] = v
        out.append(tuple(dense))
    return out


def nullity(M: SparseMatrix) -> int:
    return M.cols - rank(M)


def span_rank(vectors: Iterable[Sequence], dim: int | None = None) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    n = len(vectors[0]) if dim is None else dim
    return rank(SparseMatrix.from_columns(vectors, n))


def independent_subset(vectors: Sequence[Sequence], dim: int, start: int = 0) -> list[int]:
    """Indices (>= start) of the first maximal independent subfamily, extending vectors[:start]."""
    if not vectors:
        return []
    piv = rref_pivots(SparseMatrix.from_columns(list(vectors), dim))
    return [i for i in piv if i >= start]


def quotient_dim(A: Sequence[Sequence], B: Sequence[Sequence], dim: int | None = None) -> int:
    """dim span(A) - dim span(B), after checking span(B) is inside span(A)."""
    A, B = list(A), list(B)
    if dim is None:
        lengths = {len(v) for v in A + B}
        if len(lengths) > 1:
            raise DimensionMismatch(f"vectors of mixed lengths {sorted(lengths)}")
        dim = lengths.pop() if lengths else 0
    ra = span_rank(A, dim)
    rb = span_rank(B, dim)
    if span_rank(A + B, dim) != ra:
        raise NotASubspace("span(B) is not contained in span(A)")
    return ra - rb


def is_zero_vector(v: Sequence) -> bool:
    return not any(v)


# -- small dense matrix helpers (group elements, parametrizations) ----------

Matrix = tuple  # tuple of row tuples of scalars


def mat(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(as_scalar(x) for x in row) for row in rows)


def mat_identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    inner = len(b)
    if a and len(a[0]) != inner:
        raise DimensionMismatch("matrix shapes do not compose")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            s = Fraction(0)
            for k in range(inner):
                x = row[k]
                if x:
                    y = b[k][j]
                    if y:
                        s = s + x * y
            new.append(s)
        out.append(tuple(new))
    return tuple(out)


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def mat_is_diagonal(a: Matrix) -> bool:
    return all(not a[i][j] for i in range(len(a)) for j in range(len(a)) if i != j)


def mat_to_sparse(a: Matrix) -> SparseMatrix:
    return SparseMatrix.from_dense(a, len(a[0]) if a else 0)


def mat_inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse over the field; raises ZeroDivisionError when singular."""
    n = len(a)
    aug = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def solve_columns(basis: Sequence[Sequence], targets: Sequence[Sequence]) -> Matrix:
    """Coordinates X with basis @ X = targets, for column families of full rank."""
    dim = len(basis[0]) if basis else 0
    f = len(basis)
    out_cols = []
    for t in targets:
        M = SparseMatrix.from_columns(list(basis) + [t], dim)
        ker = kernel_basis(M)
        sol = next((v for v in ker if v[f]), None)
        if sol is None:
            raise NotASubspace("target not in the span of the basis")
        scale = -1 / sol[f]
        out_cols.append([sol[i] * scale for i in range(f)])
    return tuple(tuple(out_cols[j][i] for j in range(len(targets))) for i in range(f))
