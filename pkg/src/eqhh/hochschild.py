"""Bar complexes of polynomial algebras, twisted and equivariant, plus the HKR map.

Conventions.  A = Q[x_1..x_N] (N = number of polynomial variables; z and
zbar both count on complex spaces).  For a matrix h, (p o h)(v) = p(hv).
A group element acts on functions from the left by g.p = p o g^{-1}.
Chains are homogeneous in the total polynomial degree n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Sequence

from . import config
from .config import GuardError
from .forms import CoordinateSpace, PolyForm, Real, d_rel, full_matrix, monomials, pullback, wedge
from .groups import FiniteGroup, centralizer_action, fixed_subspace, loop_space_finite
from .koszul import HomologyReport, check_bounds
from .linalg import Matrix, SparseMatrix, mat, mat_identity, rank
from .parallel import parallel_map


class SizeGuardExceeded(GuardError):
    pass


Mono = tuple


@lru_cache(maxsize=200000)
def compose(h: Matrix, mono: Mono) -> tuple:
    """p o h for the monomial p, as a tuple of (monomial, coefficient)."""
    sp = Real(len(mono))
    out = pullback(h, PolyForm(sp, {(mono, ()): Fraction(1)}))
    return tuple((e, c) for (e, _), c in sorted(out.terms.items()))


def _mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _acc(d: dict, key, v) -> None:
    if key in d:
        s = d[key] + v
        if s:
            d[key] = s
        else:
            del d[key]
    elif v:
        d[key] = v


@dataclass
class TensorChain:
    """Element of A^{(k+1)}: {(m_0, ..., m_k): coeff}."""
    k: int
    nv: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {t: c for t, c in self.terms.items() if c}
        for t in self.terms:
            if len(t) != self.k + 1 or any(len(m) != self.nv for m in t):
                raise ValueError(f"tensor {t} does not match k={self.k}, nv={self.nv}")

    @classmethod
    def pure(cls, monos: Sequence[Mono], coeff=1) -> "TensorChain":
        monos = tuple(tuple(m) for m in monos)
        return cls(len(monos) - 1, len(monos[0]), {monos: Fraction(coeff)})

    def degrees(self) -> set[int]:
        return {sum(sum(m) for m in t) for t in self.terms}

    def __add__(self, other):
        acc = dict(self.terms)
        for t, c in other.terms.items():
            _acc(acc, t, c)
        return TensorChain(self.k, self.nv, acc)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return TensorChain(self.k, self.nv, {t: c * s for t, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, TensorChain) and self.k == other.k and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> list:
        from .scalars import format_scalar
        return [{"coeff": format_scalar(c), "monomials": [list(m) for m in t]}
                for t, c in sorted(self.terms.items())]


def bar_differential_twisted(c: TensorChain, h: Matrix | None = None) -> TensorChain:
    """b = sum_{i<k} (-1)^i b_i + (-1)^k b_k with b_k(a_0..a_k) = (a_k o h) a_0 (x) a_1 .. a_{k-1}."""
    k = c.k
    if k == 0:
        return _empty(c.nv)
    h = mat_identity(c.nv) if h is None else h
    acc: dict = {}
    for t, coeff in c.terms.items():
        for i in range(k):
            new = t[:i] + (_mul(t[i], t[i + 1]),) + t[i + 2:]
            _acc(acc, new, coeff if i % 2 == 0 else -coeff)
        sign = coeff if k % 2 == 0 else -coeff
        for mono, hc in compose(h, t[k]):
            _acc(acc, (_mul(mono, t[0]),) + t[1:k], sign * hc)
    return TensorChain(k - 1, c.nv, acc)


def _empty(nv: int) -> TensorChain:
    ch = TensorChain.__new__(TensorChain)
    ch.k, ch.nv, ch.terms = -1, nv, {}
    return ch


@lru_cache(maxsize=None)
def bar_basis(nv: int, k: int, n: int) -> tuple:
    """Homogeneous basis of A^{(k+1)} in total degree n."""
    out = []
    for parts in _compositions(n, k + 1):
        out.extend(product(*(monomials(nv, p) for p in parts)))
    return tuple(out)


def bar_dim(nv: int, k: int, n: int) -> int:
    return comb(n + nv * (k + 1) - 1, n) if nv * (k + 1) else int(n == 0)


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def bar_matrix(h: Matrix, nv: int, k: int, n: int) -> SparseMatrix:
    """Matrix of the twisted b: C_{k,n} -> C_{k-1,n}."""
    src = bar_basis(nv, k, n)
    if k == 0:
        return SparseMatrix(0, len(src))
    dst = bar_basis(nv, k - 1, n)
    index = {t: i for i, t in enumerate(dst)}
    entries = {}
    for j, t in enumerate(src):
        img = bar_differential_twisted(TensorChain(k, nv, {t: Fraction(1)}), h)
        for t2, c in img.terms.items():
            entries[(index[t2], j)] = c
    return SparseMatrix(len(dst), len(src), entries)


def _guard_bar(nv: int, k: int, n: int) -> None:
    g = config.GUARDS
    if k > g.bar_k or n > g.bar_n:
        raise SizeGuardExceeded(f"bar oracle at (k={k}, n={n}) exceeds guards (k<={g.bar_k}, n<={g.bar_n})")
    for kk in (k, k + 1):
        d = bar_dim(nv, kk, n)
        if d > g.bar_dim:
            raise SizeGuardExceeded(f"C_{kk} in degree {n} has dimension {d} > {g.bar_dim}")


def brute_twisted_hh(h: Matrix, k: int, n: int, space: CoordinateSpace | None = None) -> int:
    """dim ker b_k / im b_{k+1} on the degree n piece of the h-twisted bar complex."""
    sp = space or Real(len(h))
    H = full_matrix(sp, mat(h))
    nv = sp.nvars
    _guard_bar(nv, k, n)
    r_out = rank(bar_matrix(H, nv, k, n)) if k > 0 else 0
    r_in = rank(bar_matrix(H, nv, k + 1, n))
    return bar_dim(nv, k, n) - r_out - r_in


def brute_twisted_report(h: Matrix, kmax: int, nmax: int, space: CoordinateSpace | None = None,
                         jobs: int = 1, label: str = "bar") -> HomologyReport:
    units = [(k, n) for n in range(nmax + 1) for k in range(min(kmax, n) + 1)]
    dims = parallel_map(_brute_unit, [(h, k, n, space) for k, n in units], jobs)
    return HomologyReport(label, dict(zip(units, dims)))


def _brute_unit(args):
    h, k, n, space = args
    return brute_twisted_hh(h, k, n, space)


# -- HKR ---------------------------------------------------------------------------

def hkr_form(c: TensorChain, space: CoordinateSpace) -> PolyForm:
    """f_0 df_1 ^ ... ^ df_k on the ambient space."""
    acc = PolyForm(space)
    for t, coeff in c.terms.items():
        term = PolyForm(space, {(t[0], ()): coeff})
        for m in t[1:]:
            term = wedge(term, d_rel(PolyForm(space, {(m, ()): Fraction(1)})))
            if not term:
                break
        acc = acc + term
    return acc


def hkr_map(c: TensorChain, gamma: Matrix, space: CoordinateSpace | None = None) -> PolyForm:
    """HKR form restricted to the fixed subspace of gamma (in its kernel-basis coordinates)."""
    sp = space or Real(c.nv)
    B = fixed_subspace(mat(gamma))
    n = sp.n
    P = tuple(tuple(v[i] for v in B) for i in range(n))
    target = CoordinateSpace(sp.kind, len(B))
    form = hkr_form(c, sp)
    if not B:
        P = tuple(() for _ in range(n))
    return pullback(P, form, target)


# -- equivariant chains (finite groups) ---------------------------------------------

def act(G: FiniteGroup, g: int, mono: Mono) -> tuple:
    """g . m = m o g^{-1}."""
    return compose(G.full(G.inverse[g]), mono)


def act_tensor(G: FiniteGroup, gs: Sequence[int], t: tuple, coeff) -> dict:
    """Factorwise action of (g_0, ..., g_k) on a pure tensor."""
    out = {(): coeff}
    for g, m in zip(gs, t):
        img = act(G, g, m) if g != G.identity_index else ((m, Fraction(1)),)
        new = {}
        for pre, c in out.items():
            for mono, mc in img:
                _acc(new, pre + (mono,), c * mc)
        out = new
    return out


@dataclass
class EquivariantChain:
    """g -> TensorChain of degree k (finite support)."""
    k: int
    nv: int
    values: dict = field(default_factory=dict)   # group index -> TensorChain

    def at(self, g: int) -> TensorChain:
        return self.values.get(g) or TensorChain(self.k, self.nv)

    def __eq__(self, other):
        keys = set(self.values) | set(other.values)
        return all(self.at(g) == other.at(g) for g in keys)

    def __add__(self, other):
        keys = set(self.values) | set(other.values)
        return EquivariantChain(self.k, self.nv, {g: self.at(g) + other.at(g) for g in sorted(keys)})

    def scale(self, s):
        return EquivariantChain(self.k, self.nv, {g: v.scale(s) for g, v in self.values.items()})

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())


def twisted_equivariant_differential(F: EquivariantChain, G: FiniteGroup) -> EquivariantChain:
    """(b_tw F)(g) = sum_{i<k} (-1)^i b_i F(g) + (-1)^k b_k^g F(g), last face twisted by a_k o g."""
    if F.k == 0:
        return EquivariantChain(-1, F.nv, {})
    return EquivariantChain(F.k - 1, F.nv, {g: bar_differential_twisted(v, G.full(g))
                                            for g, v in sorted(F.values.items())})


def conjugate_chain(F: EquivariantChain, G: FiniteGroup, x: int) -> EquivariantChain:
    """(x.F)(g) = x . F(x^{-1} g x)  (diagonal action on tensors)."""
    out = {}
    for g, v in F.values.items():
        target = G.conjugate(g, x)
        acc: dict = {}
        for t, c in v.terms.items():
            for t2, c2 in act_tensor(G, [x] * (F.k + 1), t, c).items():
                _acc(acc, t2, c2)
        out[target] = TensorChain(F.k, F.nv, acc)
    return EquivariantChain(F.k, F.nv, out)


def is_invariant(F: EquivariantChain, G: FiniteGroup) -> bool:
    """F(x g x^{-1}) = x . F(g) for all x, g."""
    return all(conjugate_chain(F, G, x) == F for x in range(G.order))


def average_invariant(F: EquivariantChain, G: FiniteGroup) -> EquivariantChain:
    acc = EquivariantChain(F.k, F.nv, {})
    for x in range(G.order):
        acc = acc + conjugate_chain(F, G, x)
    return acc.scale(Fraction(1, G.order))


# -- crossed product A x| G ---------------------------------------------------------

@dataclass
class CrossedChain:
    """Hochschild k-chain of A x| G: {((g_0..g_k), (m_0..m_k)): coeff} for sum a_0 d_{g_0} (x) ... ."""
    k: int
    nv: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {t: c for t, c in self.terms.items() if c}

    def __eq__(self, other):
        return self.k == other.k and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms


def crossed_product(G: FiniteGroup, a: tuple, b: tuple) -> dict:
    """(p d_g) * (q d_h) = (1/|G|) p (g.q) d_{gh}; a, b = (group index, monomial)."""
    g, p = a
    h, q = b
    gh = G.mul_table[g][h]
    inv = Fraction(1, G.order)
    out: dict = {}
    for mono, c in (act(G, g, q) if g != G.identity_index else ((q, Fraction(1)),)):
        _acc(out, (gh, _mul(p, mono)), c * inv)
    return out


def crossed_differential(c: CrossedChain, G: FiniteGroup) -> CrossedChain:
    k = c.k
    acc: dict = {}
    if k == 0:
        return CrossedChain(-1, c.nv)
    for (gs, ms), coeff in c.terms.items():
        factors = list(zip(gs, ms))
        for i in range(k + 1):
            if i < k:
                prod = crossed_product(G, factors[i], factors[i + 1])
                pre, post = factors[:i], factors[i + 2:]
                sign = coeff if i % 2 == 0 else -coeff
                for (g, m), v in prod.items():
                    new = pre + [(g, m)] + post
                    _acc(acc, (tuple(x[0] for x in new), tuple(x[1] for x in new)), sign * v)
            else:
                prod = crossed_product(G, factors[k], factors[0])
                sign = coeff if k % 2 == 0 else -coeff
                for (g, m), v in prod.items():
                    new = [(g, m)] + factors[1:k]
                    _acc(acc, (tuple(x[0] for x in new), tuple(x[1] for x in new)), sign * v)
    return CrossedChain(k - 1, c.nv, acc)


def qism_tilde(F: CrossedChain, G: FiniteGroup, average: bool = True) -> EquivariantChain:
    """F~(g) = |G|^{-k} sum_{h_1..h_k} (g^{-1}h_1..h_k (x) 1 (x) h_1 (x) .. (x) h_1..h_{k-1}) . F(h_k^{-1}..h_1^{-1} g, h_1, .., h_k).

    With ``average`` the result is projected onto conjugation invariants.
    """
    k = F.k
    mt, inv = G.mul_table, G.inverse
    by_groups: dict = {}
    for (gs, ms), c in F.terms.items():
        by_groups.setdefault(gs, []).append((ms, c))
    values: dict = {}
    scale = Fraction(1, G.order ** k)
    for gs, tensors in by_groups.items():
        hs = gs[1:]
        prefix = [G.identity_index]          # h_1 ... h_i, i = 0..k
        for hh in hs:
            prefix.append(mt[prefix[-1]][hh])
        g = mt[prefix[-1]][gs[0]]             # g0 = (h_1..h_k)^{-1} g
        # factor actions: g^{-1} h_1..h_k, 1, h_1, h_1 h_2, ..., h_1..h_{k-1}
        acts = [mt[inv[g]][prefix[-1]]] + ([G.identity_index] + prefix[1:k] if k else [])
        acc = values.setdefault(g, {})
        for ms, c in tensors:
            for t2, c2 in act_tensor(G, acts, ms, c * scale).items():
                _acc(acc, t2, c2)
    out = EquivariantChain(k, F.nv, {g: TensorChain(k, F.nv, v) for g, v in sorted(values.items())})
    return average_invariant(out, G) if average else out


# -- HH of the finite crossed product ----------------------------------------------------

def _stratum_invariant_dim(G: FiniteGroup, s, k: int, n: int) -> int:
    from .groups import average_pullbacks
    fs = s.fixed_space()
    mats = centralizer_action(G, s)
    if not mats or fs.nvars == 0:
        return int(k == 0 and n == 0)
    P = average_pullbacks(mats, fs, k, n)
    return rank(P)


def crossed_product_hh_finite(G: FiniteGroup, kmax: int, nmax: int, jobs: int = 1):
    """HH_k of A x| G in degree n as (sum_gamma Omega^k_n(V^gamma))^G.

    Computed per conjugacy class: invariants of the centralizer Z(gamma) on
    forms on V^gamma.  Returns (per-class reports, total report).
    """
    check_bounds(kmax, nmax)
    strata = loop_space_finite(G)
    classes = G.conjugacy_classes()
    units = [(k, n) for n in range(nmax + 1) for k in range(min(kmax, n) + 1)]
    per_class = []
    total = {u: 0 for u in units}
    for ci, cls in enumerate(classes):
        s = strata[cls[0]]
        dims = parallel_map(_class_unit, [(G, s, k, n) for k, n in units], jobs)
        rep = HomologyReport(f"class{ci}:g{cls[0]}:size{len(cls)}:dimV{s.dim}", dict(zip(units, dims)))
        per_class.append(rep)
        for u, d in rep.dims.items():
            total[u] += d
    return per_class, HomologyReport("total", total)


def _class_unit(args):
    G, s, k, n = args
    return _stratum_invariant_dim(G, s, k, n)


def loop_character_dims(G: FiniteGroup, kmax: int, nmax: int) -> dict:
    """dim (sum_gamma Omega^k_n(V^gamma))^G = (1/|G|) sum_x trace(x on the direct sum).

    x maps the gamma summand to the x gamma x^{-1} summand, so only gamma in
    Z(x) contributes to the trace.
    """
    strata = loop_space_finite(G)
    out = {}
    from .forms import pullback_matrix
    for n in range(nmax + 1):
        for k in range(min(kmax, n) + 1):
            tr = Fraction(0)
            for s in strata:
                fs = s.fixed_space()
                for z, M in zip(s.centralizer, centralizer_action(G, s)):
                    if fs.nvars == 0:
                        tr += int(k == 0 and n == 0)
                        continue
                    P = pullback_matrix(M, fs, k, n)
                    tr = tr + sum((P.entries.get((i, i), 0) for i in range(P.rows)), Fraction(0))
            val = tr / G.order
            if not isinstance(val, Fraction) or val.denominator != 1:
                raise ArithmeticError(f"non-integral character average {val}")
            out[(k, n)] = int(val)
    return out


def brute_crossed_hh0(G: FiniteGroup, n: int) -> int:
    """dim of (A x| G)_n modulo commutators [p d_g, q d_h] with deg p + deg q = n."""
    nv = G.space.nvars
    basis = [(g, m) for g in range(G.order) for m in monomials(nv, n)]
    index = {b: i for i, b in enumerate(basis)}
    cols = []
    for i in range(n + 1):
        for p in monomials(nv, i):
            for q in monomials(nv, n - i):
                for g in range(G.order):
                    for h in range(G.order):
                        col: dict = {}
                        for key, v in crossed_product(G, (g, p), (h, q)).items():
                            _acc(col, index[key], v)
                        for key, v in crossed_product(G, (h, q), (g, p)).items():
                            _acc(col, index[key], -v)
                        if col:
                            cols.append(col)
    if not cols:
        return len(basis)
    return len(basis) - rank(SparseMatrix.from_columns(cols, len(basis)))
