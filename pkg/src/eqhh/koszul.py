"""Contraction (Koszul) complexes of polynomial forms, graded piece by graded piece.

The differential is i_Y for a linear vector field Y.  For Y_h(v) = v - hv the
homology is the space of forms on the fixed subspace of h; the explicit
homotopy below realizes this on eigen-monomials.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import config
from .config import GuardError
from .forms import (ComplexPairs, CoordinateSpace, PolyForm, PolyVectorField, Real, contraction_matrix,
                    from_vector, full_matrix, graded_keys, monomial_count)
from .groups import CircleAction, LoopStratum, circle_stratum
from .linalg import (Matrix, SparseMatrix, independent_subset, kernel_basis, mat, mat_identity,
                     mat_is_diagonal, mat_sub, rank)
from .parallel import parallel_map


class ResonantWeight(ArithmeticError):
    pass


class NotDiagonal(ValueError):
    pass


def check_bounds(kmax: int, nmax: int) -> None:
    g = config.GUARDS
    if nmax > g.nmax or kmax > g.kmax:
        raise GuardError(f"(kmax={kmax}, nmax={nmax}) exceeds guards (kmax={g.kmax}, nmax={g.nmax})")


@dataclass
class GradedComplex:
    space: CoordinateSpace
    Y: PolyVectorField
    label: str
    nmax: int
    form_vars: tuple | None = None     # restrict dx's to these variables (None = all)
    _mats: dict = field(default_factory=dict, repr=False)

    @property
    def top(self) -> int:
        return self.space.nvars if self.form_vars is None else len(self.form_vars)

    def keys(self, k: int, n: int):
        return graded_keys(self.space, k, n, self.form_vars)

    def dim(self, k: int, n: int) -> int:
        return len(self.keys(k, n))

    def differential(self, k: int, n: int) -> SparseMatrix:
        """i_Y : (k, n) -> (k-1, n)."""
        key = (k, n)
        if key not in self._mats:
            if k <= 0 or k > self.top:
                self._mats[key] = SparseMatrix(self.dim(k - 1, n), self.dim(k, n))
            else:
                self._mats[key] = contraction_matrix(self.Y, k, n, self.form_vars)
        return self._mats[key]

    def check_d2(self) -> bool:
        for n in range(self.nmax + 1):
            for k in range(2, self.top + 1):
                if not (self.differential(k - 1, n) @ self.differential(k, n)).is_zero():
                    return False
        return True


@dataclass
class HomologyReport:
    stratum: str
    dims: dict                                   # (k, n) -> int
    reps: dict = field(default_factory=dict)     # (k, n) -> list of PolyForm

    def __getitem__(self, kn) -> int:
        return self.dims.get(kn, 0)

    def table(self) -> list[dict]:
        return [{"k": k, "n": n, "dim": d} for (k, n), d in sorted(self.dims.items(), key=lambda t: (t[0][1], t[0][0]))]

    def to_json(self) -> dict:
        out = {"stratum": self.stratum, "table": self.table()}
        if self.reps:
            out["representatives"] = {f"{k},{n}": [str(r) for r in v] for (k, n), v in sorted(self.reps.items())}
        return out

    def to_csv(self) -> str:
        rows = [{"stratum": self.stratum, **r} for r in self.table()]
        return aligned_csv(["stratum", "k", "n", "dim"], rows)


def aligned_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    """CSV whose columns are padded to equal width (readable with skipinitialspace)."""
    cells = [list(columns)] + [[str(r[c]) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in cells:
        w.writerow([v.rjust(widths[i]) if i else v.ljust(widths[i]) for i, v in enumerate(row)])
    return buf.getvalue()


def report_json(reports) -> str:
    if isinstance(reports, HomologyReport):
        reports = [reports]
    return json.dumps([r.to_json() for r in reports], indent=1, sort_keys=False)


def homology(C: GradedComplex, kmax: int, nmax: int, representatives: bool = False,
             jobs: int = 1, label: str | None = None) -> HomologyReport:
    """Exact dim ker / im on every (k, n) piece with k <= kmax, n <= nmax."""
    check_bounds(kmax, nmax)
    units = [(k, n) for n in range(nmax + 1) for k in range(min(kmax, n, C.top) + 1)]
    needed = sorted({(k, n) for k, n in units} | {(k + 1, n) for k, n in units if k + 1 <= min(n, C.top)})
    ranks = dict(zip(needed, parallel_map(rank, [C.differential(k, n) for k, n in needed], jobs)))
    dims, reps = {}, {}
    for k, n in units:
        r_out = ranks.get((k, n), 0)
        r_in = ranks.get((k + 1, n), 0)
        dims[(k, n)] = C.dim(k, n) - r_out - r_in
        if representatives:
            reps[(k, n)] = homology_representatives(C, k, n)
    return HomologyReport(label or C.label, dims, reps)


def homology_representatives(C: GradedComplex, k: int, n: int) -> list[PolyForm]:
    """Cycles completing a basis of the image of i_Y, chosen in graded-basis order."""
    keys = C.keys(k, n)
    cycles = kernel_basis(C.differential(k, n)) if k > 0 else [
        tuple(Fraction(int(i == j)) for j in range(len(keys))) for i in range(len(keys))]
    boundary = C.differential(k + 1, n).columns() if k + 1 <= C.top else []
    boundary = [b for b in boundary if any(b)]
    pick = independent_subset(boundary + list(cycles), len(keys), start=len(boundary))
    allv = boundary + list(cycles)
    return [from_vector(C.space, allv[i], keys) for i in pick]


def twist_field(space: CoordinateSpace, h: Matrix) -> PolyVectorField:
    """Y_h(v) = v - h v."""
    H = full_matrix(space, mat(h))
    return PolyVectorField.linear(space, mat_sub(mat_identity(space.nvars), H))


def _space_for(h: Matrix, space: CoordinateSpace | None) -> CoordinateSpace:
    return space if space is not None else Real(len(h))


def build_twisted_koszul(h: Matrix, nmax: int, space: CoordinateSpace | None = None) -> GradedComplex:
    check_bounds(0, nmax)
    sp = _space_for(h, space)
    C = GradedComplex(sp, twist_field(sp, h), f"twisted[{sp}]", nmax)
    if not C.check_d2():
        raise AssertionError("contraction complex does not square to zero")
    return C


# -- explicit homotopy ---------------------------------------------------------------

def _eigenvalues(space: CoordinateSpace, h: Matrix) -> list:
    H = full_matrix(space, mat(h))
    if not mat_is_diagonal(H):
        raise NotDiagonal("the homotopy needs h in eigencoordinates (diagonal)")
    return [H[i][i] for i in range(space.nvars)]


def fixed_part(h: Matrix, omega: PolyForm) -> PolyForm:
    """pi* iota*: keep the monomials built from fixed eigencoordinates only."""
    mu = _eigenvalues(omega.space, h)
    moving = {i for i, x in enumerate(mu) if x != 1}
    return PolyForm(omega.space, {(e, I): c for (e, I), c in omega.terms.items()
                                  if not any(e[i] for i in moving) and not moving.intersection(I)})


def koszul_homotopy(h: Matrix, omega: PolyForm) -> PolyForm:
    """S with i_Y S + S i_Y = id - pi* iota*, on eigen-monomials S = (1/c) d_W."""
    sp = omega.space
    mu = _eigenvalues(sp, h)
    moving = [i for i, x in enumerate(mu) if x != 1]
    acc: dict = {}
    for (exp, idx), coeff in omega.terms.items():
        c = Fraction(0)
        involved = False
        for i in moving:
            mult = exp[i] + (1 if i in idx else 0)
            if mult:
                involved = True
                c = c + mult * (1 - mu[i])
        if not involved:
            continue
        if not c:
            raise ResonantWeight(f"zero weight on the monomial {(exp, idx)}")
        scale = coeff / c
        for i in moving:
            e = exp[i]
            if not e or i in idx:
                continue
            pos = sum(1 for x in idx if x < i)
            new_idx = idx[:pos] + (i,) + idx[pos:]
            new_exp = exp[:i] + (e - 1,) + exp[i + 1:]
            v = scale * e if pos % 2 == 0 else -(scale * e)
            key = (new_exp, new_idx)
            acc[key] = acc[key] + v if key in acc else v
    return PolyForm(sp, acc)


# -- Euler-like fields -----------------------------------------------------------------

def euler_field(space: CoordinateSpace, fixed: Sequence[int]) -> PolyVectorField:
    """Y = sum_{j not in fixed} x_j d/dx_j."""
    fixed = set(fixed)
    return PolyVectorField.diagonal(space, [0 if i in fixed else 1 for i in range(space.nvars)])


def euler_koszul_check(space: CoordinateSpace, fixed: Sequence[int], kmax: int, nmax: int,
                       normal: bool = False) -> HomologyReport:
    """Homology of i_Y for the Euler field of the non-fixed variables.

    With ``normal=False`` the complex uses all forms and its homology is the
    forms in the fixed variables.  With ``normal=True`` only the normal
    differentials dx_j (j not fixed) appear, giving the Koszul resolution of
    functions on the zero locus: exact for k >= 1, polynomials in x_S at k = 0.
    """
    fixed = tuple(sorted(set(fixed)))
    fv = tuple(i for i in range(space.nvars) if i not in fixed) if normal else None
    label = f"euler[{space},fixed={list(fixed)}{',normal' if normal else ''}]"
    C = GradedComplex(space, euler_field(space, fixed), label, nmax, form_vars=fv)
    return homology(C, kmax, nmax)


def zero_locus_dims(n_fixed: int, kmax: int, nmax: int) -> dict:
    """Expected homology of the normal Koszul resolution."""
    return {(k, n): (monomial_count(n_fixed, n) if k == 0 else 0)
            for n in range(nmax + 1) for k in range(min(kmax, n) + 1)}


# -- circle stalks -------------------------------------------------------------------

def fundamental_field(space: CoordinateSpace, weights: Sequence[int]) -> PolyVectorField:
    """E = sum_k w_k (z_k d/dz_k - zbar_k d/dzbar_k) on ComplexPairs(len(weights))."""
    return PolyVectorField.diagonal(space, list(weights) + [-w for w in weights])


def _stalk_pieces(A: CircleAction, s: LoopStratum):
    K = s.fixed
    N = tuple(k for k in range(A.m) if k not in K)
    fixed_space = ComplexPairs(len(K))
    E = fundamental_field(fixed_space, [A.weights[k] for k in K])
    g = A.element(1, 2 * A.w) if s.j is None else A.element(s.j)
    normal_space = ComplexPairs(len(N))
    h = tuple(tuple(g[a][b] for b in N) for a in N)
    return fixed_space, E, normal_space, h


def circle_stalk_homology(A: CircleAction, j: int | None, kmax: int, nmax: int, jobs: int = 1) -> HomologyReport:
    """Stalk homology at t0 = j/w (j=None: generic witness).

    Near t0 the field splits as Y = Y1 + (t - t0) Y2 with Y1 the twisted
    field on the non-fixed coordinates and Y2 a unit multiple of E_j on
    the fixed ones.  The Y1 part is computed as honest twisted Koszul
    homology, the fixed part as ker i_E, and the two are combined by Kunneth.
    """
    check_bounds(kmax, nmax)
    s = circle_stratum(A, j)
    fixed_space, E, normal_space, h = _stalk_pieces(A, s)
    H1 = homology(GradedComplex(normal_space, twist_field(normal_space, h), "Y1", nmax), kmax, nmax, jobs=jobs)
    KE = kernel_dims(E, kmax, nmax, jobs=jobs)
    dims = {}
    for n in range(nmax + 1):
        for k in range(min(kmax, n) + 1):
            dims[(k, n)] = sum(H1[(k1, n1)] * KE.get((k - k1, n - n1), 0)
                               for k1 in range(k + 1) for n1 in range(n + 1))
    return HomologyReport(f"circle{list(A.weights)}:{s.label}", dims)


def kernel_dims(E: PolyVectorField, kmax: int, nmax: int, jobs: int = 1) -> dict:
    sp = E.space
    units = [(k, n) for n in range(nmax + 1) for k in range(min(kmax, n) + 1)]
    mats = [contraction_matrix(E, k, n) if 0 < k <= sp.nvars else None for k, n in units]
    rks = parallel_map(_rank_or_zero, mats, jobs)
    return {(k, n): len(graded_keys(sp, k, n)) - r for (k, n), r in zip(units, rks)}


def _rank_or_zero(M):
    return 0 if M is None else rank(M)


def fixed_form_dims(f: int, kmax: int, nmax: int) -> dict:
    """C(f, k) * #monomials of degree n-k in f variables (convention: f = 0 gives only (0, 0))."""
    from math import comb
    return {(k, n): comb(f, k) * monomial_count(f, n - k) for n in range(nmax + 1) for k in range(min(kmax, n) + 1)}
