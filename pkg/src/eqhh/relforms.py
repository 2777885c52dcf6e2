"""Relative, horizontal and basic relative forms on loop-space strata.

Circle strata are handled in the polynomial model Q[s, z, zbar] with
s = t - t0 a parameter of degree 1 that carries no differential.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .forms import (ComplexPairs, CoordinateSpace, PolyForm, contract, d_rel, from_vector,
                    graded_dim, graded_keys, monomials, operator_matrix, weight, wedge)
from .groups import CircleAction, FiniteGroup, LoopStratum, circle_singular_points, circle_stratum, generic_stratum
from .hochschild import crossed_product_hh_finite
from .koszul import aligned_csv, check_bounds, fundamental_field
from .linalg import DimensionMismatch, SparseMatrix, kernel_basis, rank


def _fixed_data(s: LoopStratum):
    sp = ComplexPairs(len(s.fixed))
    E = fundamental_field(sp, [s.weights[k] for k in s.fixed])
    return sp, E


def _kernel_forms(sp, E, keys, k, n) -> list[PolyForm]:
    if k == 0 or not keys:
        return [PolyForm(sp, {key: Fraction(1)}) for key in keys]
    M = operator_matrix(lambda a: contract(E, a), sp, keys, graded_keys(sp, k - 1, n))
    return [from_vector(sp, v, keys) for v in kernel_basis(M)]


def horizontal_basis(s: LoopStratum, k: int, n: int) -> list[PolyForm]:
    """Kernel of i_E on the (k, n) forms in the fixed coordinates of a circle stratum."""
    sp, E = _fixed_data(s)
    return _kernel_forms(sp, E, graded_keys(sp, k, n), k, n)


def basic_basis(s: LoopStratum, k: int, n: int) -> list[PolyForm]:
    """Horizontal forms of total weight zero (i_E preserves weight, so restrict first)."""
    sp, E = _fixed_data(s)
    ws = [s.weights[i] for i in s.fixed]
    keys = tuple(key for key in graded_keys(sp, k, n) if weight(sp, key, ws) == 0)
    return _kernel_forms(sp, E, keys, k, n)


# -- local models of the vanishing ideal ----------------------------------------------

@dataclass
class LocalModel:
    """Generators of the vanishing ideal and the loop-space branches near one point."""
    label: str
    space: CoordinateSpace          # ComplexPairs(m, params=1); last variable is s = t - t0
    generators: list                # exponent vectors of monomial generators
    branches: list                  # (kept variable set, form variables of F) per branch


def local_model(A: CircleAction, j: int | None, where: str = "origin") -> LocalModel:
    """where: 'origin' (near (t0, 0)) or 'off' (near a nonzero fixed point at t0)."""
    s = circle_stratum(A, j)
    m = A.m
    sp = ComplexPairs(m, params=1)
    S = 2 * m
    K = set(s.fixed)
    zs = lambda k: (k, m + k)

    def mono(*idx):
        e = [0] * sp.npoly
        for i in idx:
            e[i] += 1
        return tuple(e)

    gens = []
    if j is None:
        gens = [mono(i) for k in range(m) for i in zs(k)]
        branches = [(frozenset([S]), ())]
    elif where == "origin":
        for k in range(m):
            for i in zs(k):
                gens.append(mono(S, i) if k in K else mono(i))
        fixed_vars = frozenset(i for k in K for i in zs(k))
        branches = [(fixed_vars, tuple(sorted(fixed_vars))), (frozenset([S]), ())]
    elif where == "off":
        if not K:
            raise ValueError("no nonzero fixed points at this stratum")
        gens = [mono(S)] + [mono(i) for k in range(m) if k not in K for i in zs(k)]
        fixed_vars = frozenset(i for k in K for i in zs(k))
        branches = [(fixed_vars, tuple(sorted(fixed_vars)))]
    else:
        raise ValueError(f"unknown model {where!r}")
    label = f"circle{list(A.weights)}:{s.label}:{where if j is not None else 'generic'}"
    return LocalModel(label, sp, gens, branches)


def local_models(A: CircleAction) -> list[tuple[int | None, str]]:
    out = []
    for s in circle_singular_points(A):
        out.append((s.j, "origin"))
        if s.fixed:
            out.append((s.j, "off"))
    out.append((None, "generic"))
    return out


def _restriction_matrix(model: LocalModel, k: int, n: int) -> SparseMatrix:
    """Forms -> sections of wedge^k F on every branch (set other variables to 0, drop other dx's)."""
    sp = model.space
    src = graded_keys(sp, k, n)
    rows: dict = {}
    entries = {}
    for b, (keep, fvars) in enumerate(model.branches):
        if k > len(fvars):
            continue
        for col, (exp, idx) in enumerate(src):
            if any(e for i, e in enumerate(exp) if i not in keep) or any(i not in fvars for i in idx):
                continue
            r = rows.setdefault((b, exp, idx), len(rows))
            entries[(r, col)] = Fraction(1)
    return SparseMatrix(len(rows), len(src), entries)


@dataclass
class CheckReport:
    name: str
    rows: list = field(default_factory=list)     # dicts with degree data
    ok: bool = True
    witness: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "rows": self.rows, "witness": self.witness}


def _span_vectors(model: LocalModel, k: int, n: int) -> list[dict]:
    """J.Omega^k + dJ ^ Omega^{k-1} in degree n, as sparse column dicts over graded_keys."""
    sp = model.space
    keys = graded_keys(sp, k, n)
    index = {key: i for i, key in enumerate(keys)}
    cols = []
    for g in model.generators:
        dg = sum(g)
        for mono in monomials(sp.npoly, n - k - dg):
            e = tuple(a + b for a, b in zip(g, mono))
            for (_, idx) in graded_keys(sp, k, k):
                cols.append({index[(e, idx)]: Fraction(1)})
        if k >= 1:
            dgf = d_rel(PolyForm(sp, {(g, ()): Fraction(1)}))
            for key in graded_keys(sp, k - 1, n - dg):
                w = wedge(dgf, PolyForm(sp, {key: Fraction(1)}))
                if w:
                    cols.append({index[kk]: c for kk, c in w.terms.items()})
    return cols


def vanishing_ideal_check(A: CircleAction, j: int | None, nmax: int, where: str = "origin",
                          strict: bool = False) -> CheckReport:
    """Per degree: dim of the generator span equals dim of the kernel of restriction to the loop space."""
    check_bounds(0, nmax)
    model = local_model(A, j, where)
    rep = CheckReport(f"vanishing-ideal[{model.label}]")
    sp = model.space
    for n in range(nmax + 1):
        dim = len(graded_keys(sp, 0, n))
        cols = _span_vectors(model, 0, n)
        span = rank(SparseMatrix.from_columns(cols, dim)) if cols else 0
        R = _restriction_matrix(model, 0, n)
        ker = dim - rank(R)
        contained = all(not any(R.apply(_dense(c, dim))) for c in cols)
        row = {"n": n, "ideal": span, "kernel": ker, "contained": contained}
        rep.rows.append(row)
        if rep.ok and (span != ker or not contained):
            rep.ok = False
            rep.witness = _witness(model, R, cols, 0, n)
    if strict and not rep.ok:
        raise DimensionMismatch(f"{rep.name}: {rep.witness}")
    return rep


def _dense(col: dict, dim: int) -> list:
    v = [Fraction(0)] * dim
    for i, c in col.items():
        v[i] = c
    return v


def _witness(model: LocalModel, R: SparseMatrix, cols: list, k: int, n: int) -> str:
    keys = graded_keys(model.space, k, n)
    dim = len(keys)
    base = rank(SparseMatrix.from_columns(cols, dim)) if cols else 0
    for v in kernel_basis(R) if R.rows else [_dense({i: 1}, dim) for i in range(dim)]:
        if rank(SparseMatrix.from_columns(cols + [v], dim)) > base:
            return f"degree {n}: {from_vector(model.space, v, keys)} restricts to 0 but is not in the ideal"
    for c in cols:
        if any(R.apply(_dense(c, dim))):
            return f"degree {n}: ideal element {from_vector(model.space, _dense(c, dim), keys)} does not restrict to 0"
    return f"degree {n}"


def theta_injectivity_check(A: CircleAction, j: int | None, k: int, nmax: int, where: str = "origin",
                            strict: bool = False) -> CheckReport:
    """Per degree n: dim Omega^k_n / (J Omega^k + dJ ^ Omega^{k-1}) equals the rank of restriction to F."""
    check_bounds(k, nmax)
    model = local_model(A, j, where)
    rep = CheckReport(f"theta[{model.label},k={k}]")
    sp = model.space
    for n in range(nmax + 1):
        dim = len(graded_keys(sp, k, n))
        cols = _span_vectors(model, k, n)
        span = rank(SparseMatrix.from_columns(cols, dim)) if cols else 0
        R = _restriction_matrix(model, k, n)
        image = rank(R)
        contained = all(not any(R.apply(_dense(c, dim))) for c in cols)
        row = {"n": n, "quotient": dim - span, "restricted": image, "contained": contained}
        rep.rows.append(row)
        if rep.ok and (dim - span != image or not contained):
            rep.ok = False
            rep.witness = _witness(model, R, cols, k, n)
    if strict and not rep.ok:
        raise DimensionMismatch(f"{rep.name}: {rep.witness}")
    return rep


# -- summary tables ----------------------------------------------------------------------

TABLE_COLUMNS = ["stratum", "k", "n", "dim_relative", "dim_horizontal", "dim_basic"]


@dataclass
class BasicFormsTable:
    rows: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"table": self.rows}

    def to_csv(self) -> str:
        return aligned_csv(TABLE_COLUMNS, self.rows)

    def lookup(self, stratum: str) -> dict:
        return {(r["k"], r["n"]): r for r in self.rows if r["stratum"] == stratum}


def basic_forms_table(A: CircleAction, kmax: int, nmax: int) -> BasicFormsTable:
    check_bounds(kmax, nmax)
    table = BasicFormsTable()
    for s in circle_singular_points(A) + [generic_stratum(A)]:
        sp = ComplexPairs(len(s.fixed))
        for n in range(nmax + 1):
            for k in range(min(kmax, n) + 1):
                table.rows.append({"stratum": s.label, "k": k, "n": n,
                                   "dim_relative": graded_dim(sp, k, n),
                                   "dim_horizontal": len(horizontal_basis(s, k, n)),
                                   "dim_basic": len(basic_basis(s, k, n))})
    return table


def finite_basic_forms_table(G: FiniteGroup, kmax: int, nmax: int) -> BasicFormsTable:
    """Finite isotropy: horizontality is vacuous and basic forms are the centralizer invariants."""
    from .groups import loop_space_finite
    per_class, total = crossed_product_hh_finite(G, kmax, nmax)
    strata = loop_space_finite(G)
    table = BasicFormsTable()
    for cls, rep in zip(G.conjugacy_classes(), per_class):
        fs = strata[cls[0]].fixed_space()
        for (k, n), d in sorted(rep.dims.items(), key=lambda t: (t[0][1], t[0][0])):
            rel = graded_dim(fs, k, n) if fs.nvars else int(k == 0 and n == 0)
            table.rows.append({"stratum": rep.stratum, "k": k, "n": n, "dim_relative": rel,
                               "dim_horizontal": rel, "dim_basic": d})
    return table
