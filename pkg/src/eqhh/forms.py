"""Polynomial-coefficient differential forms on R^d or on C^m with z, zbar split.

Internal degree convention: deg x_i = deg dx_i = 1.  Extra "parameter"
variables (e.g. the circle coordinate t) may appear in coefficients but carry
no differentials, which makes ``d_rel`` the fiberwise (relative) de Rham
differential.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

from .linalg import DimensionMismatch, Matrix, SparseMatrix, mat_is_diagonal
from .scalars import Cyclotomic, Scalar, as_scalar, conj, format_scalar, parse_scalar

BAR = "̄"  # combining macron: z̄


class SpaceMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CoordinateSpace:
    kind: str          # "real" or "complex"
    n: int             # d for real, m (number of pairs) for complex
    params: int = 0    # coefficient-only variables without differentials

    def __post_init__(self):
        if self.kind not in ("real", "complex"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.n < 0 or self.params < 0:
            raise ValueError("negative dimension")

    @property
    def nvars(self) -> int:
        return self.n if self.kind == "real" else 2 * self.n

    @property
    def npoly(self) -> int:
        return self.nvars + self.params

    def var_name(self, i: int) -> str:
        if i >= self.nvars:
            p = i - self.nvars
            return "t" if self.params == 1 else f"t{p + 1}"
        if self.kind == "real":
            return f"x{i + 1}"
        if i < self.n:
            return f"z{i + 1}"
        return f"z{BAR}{i - self.n + 1}"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.var_name(i) for i in range(self.npoly))

    def conj_index(self, i: int) -> int:
        if self.kind == "real" or i >= self.nvars:
            return i
        return i + self.n if i < self.n else i - self.n

    def with_params(self, params: int) -> "CoordinateSpace":
        return CoordinateSpace(self.kind, self.n, params)

    def __str__(self):
        base = f"R^{self.n}" if self.kind == "real" else f"C^{self.n}"
        return base + (f"+{self.params}p" if self.params else "")


def Real(d: int, params: int = 0) -> CoordinateSpace:
    return CoordinateSpace("real", d, params)


def ComplexPairs(m: int, params: int = 0) -> CoordinateSpace:
    return CoordinateSpace("complex", m, params)


Key = tuple  # (exponent tuple, increasing index tuple)


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    lst = list(idx)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(lst, lst[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(lst)


class PolyForm:
    """Sparse polynomial form: ``{(exponents, indices): coefficient}``."""

    __slots__ = ("space", "terms")

    def __init__(self, space: CoordinateSpace, terms: dict | None = None):
        self.space = space
        clean = {}
        for (exp, idx), c in (terms or {}).items():
            if c:
                if len(exp) != space.npoly:
                    raise SpaceMismatch(f"exponent {exp} does not fit {space}")
                clean[(tuple(exp), tuple(idx))] = c if isinstance(c, (Fraction, Cyclotomic)) else as_scalar(c)
        self.terms = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, space):
        return cls(space)

    @classmethod
    def constant(cls, space, c=1):
        return cls(space, {((0,) * space.npoly, ()): as_scalar(c)})

    @classmethod
    def var(cls, space, i: int):
        exp = [0] * space.npoly
        exp[i] = 1
        return cls(space, {(tuple(exp), ()): Fraction(1)})

    @classmethod
    def dvar(cls, space, i: int):
        if not 0 <= i < space.nvars:
            raise IndexError(f"no differential d{space.var_name(i)} in {space}")
        return cls(space, {((0,) * space.npoly, (i,)): Fraction(1)})

    @classmethod
    def monomial(cls, space, exp, idx=(), coeff=1):
        sign, sidx = _sort_sign(idx)
        return cls(space, {(tuple(exp), sidx): as_scalar(coeff) * sign})

    # -- vector space structure -------------------------------------------
    def _check(self, other: "PolyForm"):
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def __add__(self, other):
        if not isinstance(other, PolyForm):
            if other == 0:
                return self
            other = PolyForm.constant(self.space, other)
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc[k] + v if k in acc else v
        return PolyForm(self.space, acc)

    __radd__ = __add__

    def __neg__(self):
        return PolyForm(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "PolyForm":
        s = as_scalar(s)
        if not s:
            return PolyForm(self.space)
        return PolyForm(self.space, {k: v * s for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PolyForm):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, PolyForm):
            return self.space == other.space and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    # -- grading -----------------------------------------------------------
    def form_degrees(self) -> set[int]:
        return {len(idx) for _, idx in self.terms}

    def internal_degrees(self) -> set[int]:
        return {sum(exp) + len(idx) for exp, idx in self.terms}

    def is_homogeneous(self) -> bool:
        return len({(len(i), sum(e) + len(i)) for e, i in self.terms}) <= 1

    def homogeneous_part(self, k: int, n: int) -> "PolyForm":
        return PolyForm(self.space, {(e, i): c for (e, i), c in self.terms.items()
                                     if len(i) == k and sum(e) + len(i) == n})

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"PolyForm({self.space}, {format_form(self)!r})"


def _mul_mono(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    a._check(b)
    acc: dict = {}
    for (ea, ia), ca in a.terms.items():
        for (eb, ib), cb in b.terms.items():
            if set(ia) & set(ib):
                continue
            sign, idx = _sort_sign(ia + ib)
            key = (_mul_mono(ea, eb), idx)
            v = ca * cb if sign > 0 else -(ca * cb)
            acc[key] = acc[key] + v if key in acc else v
    return PolyForm(a.space, acc)


def d_rel(a: PolyForm) -> PolyForm:
    """Exterior derivative in the space variables (parameters are constants)."""
    acc: dict = {}
    nv = a.space.nvars
    for (exp, idx), c in a.terms.items():
        for i in range(nv):
            e = exp[i]
            if not e or i in idx:
                continue
            sign, new_idx = _sort_sign((i,) + idx)
            new_exp = exp[:i] + (e - 1,) + exp[i + 1:]
            v = c * e if sign > 0 else -(c * e)
            key = (new_exp, new_idx)
            acc[key] = acc[key] + v if key in acc else v
    return PolyForm(a.space, acc)


class PolyVectorField:
    """Vector field with polynomial components, one 0-form per space variable."""

    __slots__ = ("space", "components")

    def __init__(self, space: CoordinateSpace, components: Sequence[PolyForm]):
        if len(components) != space.nvars:
            raise SpaceMismatch(f"{len(components)} components for {space.nvars} variables")
        for comp in components:
            if comp.space != space or comp.form_degrees() - {0}:
                raise SpaceMismatch("vector field components must be functions on the same space")
        self.space = space
        self.components = tuple(components)

    @classmethod
    def linear(cls, space: CoordinateSpace, A: Matrix) -> "PolyVectorField":
        """Y^i = sum_j A[i][j] x_j."""
        n = space.nvars
        if len(A) != n or any(len(r) != n for r in A):
            raise DimensionMismatch(f"need a {n}x{n} matrix")
        comps = []
        for i in range(n):
            terms = {}
            for j in range(n):
                if A[i][j]:
                    e = [0] * space.npoly
                    e[j] = 1
                    terms[(tuple(e), ())] = A[i][j]
            comps.append(PolyForm(space, terms))
        return cls(space, comps)

    @classmethod
    def diagonal(cls, space: CoordinateSpace, coeffs: Sequence) -> "PolyVectorField":
        """Y = sum_i c_i x_i d/dx_i."""
        n = space.nvars
        A = tuple(tuple(as_scalar(coeffs[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))
        return cls.linear(space, A)

    def linear_matrix(self) -> Matrix | None:
        """The matrix of a purely linear field, or None."""
        n = self.space.nvars
        A = [[Fraction(0)] * n for _ in range(n)]
        for i, comp in enumerate(self.components):
            for (exp, _), c in comp.terms.items():
                if sum(exp) != 1 or any(exp[self.space.nvars:]):
                    return None
                A[i][exp.index(1)] = c
        return tuple(tuple(r) for r in A)

    def is_zero(self) -> bool:
        return not any(c.terms for c in self.components)

    def __call__(self, f: PolyForm) -> PolyForm:
        """Directional derivative of a function."""
        acc = PolyForm(self.space)
        for i, comp in enumerate(self.components):
            if comp:
                acc = acc + comp * _partial(f, i)
        return acc


def _partial(f: PolyForm, i: int) -> PolyForm:
    acc: dict = {}
    for (exp, idx), c in f.terms.items():
        e = exp[i]
        if e:
            key = (exp[:i] + (e - 1,) + exp[i + 1:], idx)
            acc[key] = acc[key] + c * e if key in acc else c * e
    return PolyForm(f.space, acc)


def contract(Y: PolyVectorField, a: PolyForm) -> PolyForm:
    """Interior product i_Y a."""
    if Y.space != a.space:
        raise SpaceMismatch(f"{Y.space} vs {a.space}")
    acc: dict = {}
    for (exp, idx), c in a.terms.items():
        for p, i in enumerate(idx):
            comp = Y.components[i]
            if not comp.terms:
                continue
            rest = idx[:p] + idx[p + 1:]
            sc = c if p % 2 == 0 else -c
            for (ey, _), cy in comp.terms.items():
                key = (_mul_mono(exp, ey), rest)
                v = sc * cy
                acc[key] = acc[key] + v if key in acc else v
    return PolyForm(a.space, acc)


def lie_derivative(Y: PolyVectorField, a: PolyForm) -> PolyForm:
    """L_Y = d i_Y + i_Y d, with d the relative differential."""
    return d_rel(contract(Y, a)) + contract(Y, d_rel(a))


def full_matrix(space: CoordinateSpace, g: Matrix) -> Matrix:
    """Extend an m x f matrix on z-coordinates to the 2m x 2f block matrix diag(g, conj g)."""
    n = space.nvars
    if space.kind == "complex" and len(g) == space.n and space.n != n:
        m, f = space.n, (len(g[0]) if g else 0)
        full = [[Fraction(0)] * (2 * f) for _ in range(n)]
        for i in range(m):
            for j in range(f):
                full[i][j] = g[i][j]
                full[m + i][f + j] = conj(g[i][j])
        return tuple(tuple(r) for r in full)
    return g


def pullback(g: Matrix, a: PolyForm, target: CoordinateSpace | None = None) -> PolyForm:
    """Pullback along the linear map v -> g v, i.e. x_i -> sum_j g[i][j] y_j.

    ``g`` is nvars x nvars (or m x m on a complex space, acting as z -> g z,
    zbar -> conj(g) zbar).  A rectangular ``g`` maps forms on ``a.space`` to
    forms on ``target``, as for restriction to a linear subspace.
    """
    src = a.space
    g = full_matrix(src, g)
    tgt = target or src
    if len(g) != src.nvars or any(len(r) != tgt.nvars for r in g):
        raise DimensionMismatch(f"matrix shape does not map {tgt} into {src}")
    if tgt.params != src.params:
        raise DimensionMismatch("parameter counts differ")
    if tgt == src and mat_is_diagonal(g):
        return _diagonal_pullback(g, a)
    nv_s, nv_t = src.nvars, tgt.nvars
    lin = [{j: g[i][j] for j in range(nv_t) if g[i][j]} for i in range(nv_s)]
    powers: dict = {}

    def lin_power(i, e):
        key = (i, e)
        if key not in powers:
            if e == 0:
                powers[key] = {(0,) * nv_t: Fraction(1)}
            else:
                prev = lin_power(i, e - 1)
                out: dict = {}
                for mono, c in prev.items():
                    for j, gij in lin[i].items():
                        m2 = mono[:j] + (mono[j] + 1,) + mono[j + 1:]
                        v = c * gij
                        out[m2] = out[m2] + v if m2 in out else v
                powers[key] = {k: v for k, v in out.items() if v}
        return powers[key]

    acc: dict = {}
    for (exp, idx), c in a.terms.items():
        poly = {(0,) * nv_t: c}
        for i in range(nv_s):
            if exp[i]:
                factor = lin_power(i, exp[i])
                new: dict = {}
                for m1, c1 in poly.items():
                    for m2, c2 in factor.items():
                        mm = _mul_mono(m1, m2)
                        v = c1 * c2
                        new[mm] = new[mm] + v if mm in new else v
                poly = {k: v for k, v in new.items() if v}
        forms = {(): Fraction(1)}
        for i in idx:
            new = {}
            for fidx, fc in forms.items():
                for j, gij in lin[i].items():
                    if j in fidx:
                        continue
                    sign, sidx = _sort_sign(fidx + (j,))
                    v = fc * gij if sign > 0 else -(fc * gij)
                    new[sidx] = new[sidx] + v if sidx in new else v
            forms = {k: v for k, v in new.items() if v}
        tail = exp[nv_s:]
        for mono, pc in poly.items():
            for fidx, fc in forms.items():
                key = (mono + tail, fidx)
                v = pc * fc
                acc[key] = acc[key] + v if key in acc else v
    return PolyForm(tgt, acc)


def _diagonal_pullback(g: Matrix, a: PolyForm) -> PolyForm:
    nv = a.space.nvars
    diag = [g[i][i] for i in range(nv)]
    out = {}
    for (exp, idx), c in a.terms.items():
        v = c
        for i in range(nv):
            if exp[i]:
                v = v * diag[i] ** exp[i]
        for i in idx:
            v = v * diag[i]
        if v:
            out[(exp, idx)] = v
    return PolyForm(a.space, out)


def conjugate(a: PolyForm) -> PolyForm:
    """Formal complex conjugation: swap z and zbar, conjugate scalars."""
    sp = a.space
    acc = {}
    for (exp, idx), c in a.terms.items():
        new_exp = [0] * sp.npoly
        for i, e in enumerate(exp):
            new_exp[sp.conj_index(i)] = e
        sign, sidx = _sort_sign(tuple(sp.conj_index(i) for i in idx))
        acc[(tuple(new_exp), sidx)] = conj(c) * sign
    return PolyForm(sp, acc)


# -- graded bases ---------------------------------------------------------------

@lru_cache(maxsize=None)
def monomials(nvars: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``deg``, first variable varying slowest (x1^deg first)."""
    if deg < 0:
        return ()
    if nvars == 0:
        return ((),) if deg == 0 else ()
    out = []
    for e in range(deg, -1, -1):
        for rest in monomials(nvars - 1, deg - e):
            out.append((e,) + rest)
    return tuple(out)


def monomial_count(nvars: int, deg: int) -> int:
    if deg < 0:
        return 0
    if nvars == 0:
        return 1 if deg == 0 else 0
    return comb(deg + nvars - 1, nvars - 1)


@lru_cache(maxsize=None)
def graded_keys(space: CoordinateSpace, k: int, n: int, form_vars: tuple | None = None) -> tuple[Key, ...]:
    """Keys of the (k, n) graded piece, ordered by index tuple then monomial."""
    fv = tuple(range(space.nvars)) if form_vars is None else form_vars
    if k < 0 or k > len(fv) or n < k:
        return ()
    monos = monomials(space.npoly, n - k)
    return tuple((m, idx) for idx in combinations(fv, k) for m in monos)


def graded_basis(space: CoordinateSpace, k: int, n: int) -> list[PolyForm]:
    return [PolyForm(space, {key: Fraction(1)}) for key in graded_keys(space, k, n)]


def graded_dim(space: CoordinateSpace, k: int, n: int) -> int:
    """C(d, k) * #monomials of degree n-k; the count used as a closed form everywhere."""
    if k < 0 or k > space.nvars or n < k:
        return 0
    return comb(space.nvars, k) * monomial_count(space.npoly, n - k)


def to_vector(a: PolyForm, keys: Sequence[Key], index: dict | None = None) -> list[Scalar]:
    index = index if index is not None else {k: i for i, k in enumerate(keys)}
    out: list = [Fraction(0)] * len(keys)
    for key, c in a.terms.items():
        if key not in index:
            raise ValueError(f"term {key} outside the given graded piece")
        out[index[key]] = c
    return out


def from_vector(space: CoordinateSpace, vec: Sequence, keys: Sequence[Key]) -> PolyForm:
    return PolyForm(space, {k: v for k, v in zip(keys, vec) if v})


def operator_matrix(op, space: CoordinateSpace, src: Sequence[Key], dst: Sequence[Key]) -> SparseMatrix:
    """Matrix of a linear operator on forms between two ordered key lists."""
    index = {k: i for i, k in enumerate(dst)}
    entries = {}
    for j, key in enumerate(src):
        img = op(PolyForm(space, {key: Fraction(1)}))
        for k2, c in img.terms.items():
            if k2 not in index:
                raise ValueError(f"operator leaves the target piece: {k2}")
            entries[(index[k2], j)] = c
    return SparseMatrix(len(dst), len(src), entries)


def contraction_matrix(Y: PolyVectorField, k: int, n: int, form_vars: tuple | None = None) -> SparseMatrix:
    """i_Y on the (k, n) piece; the target is the (k-1, n) piece (linear Y)."""
    sp = Y.space
    return operator_matrix(lambda a: contract(Y, a), sp,
                           graded_keys(sp, k, n, form_vars), graded_keys(sp, k - 1, n, form_vars))


def pullback_matrix(g: Matrix, space: CoordinateSpace, k: int, n: int) -> SparseMatrix:
    keys = graded_keys(space, k, n)
    return operator_matrix(lambda a: pullback(g, a), space, keys, keys)


def weight(space: CoordinateSpace, key: Key, weights: Sequence[int]) -> int:
    """Circle weight of a complex monomial form: sum w_k (a_k - b_k + c_k - d_k)."""
    if space.kind != "complex":
        raise SpaceMismatch("weights are defined on complex spaces")
    exp, idx = key
    m = space.n
    total = 0
    for k in range(m):
        total += weights[k] * (exp[k] - exp[m + k])
    for i in idx:
        total += weights[i] if i < m else -weights[i - m]
    return total


# -- text serialization -----------------------------------------------------------

def _format_monomial(space: CoordinateSpace, exp) -> str:
    parts = []
    for i, e in enumerate(exp):
        if e:
            parts.append(space.var_name(i) + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def format_form(a: PolyForm) -> str:
    if not a.terms:
        return "0"
    sp = a.space
    items = sorted(a.terms.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], [-e for e in kv[0][0]]))
    out = []
    for (exp, idx), c in items:
        mono = _format_monomial(sp, exp)
        dforms = "∧".join("d" + sp.var_name(i) for i in idx)
        body = " ".join(p for p in (mono, dforms) if p)
        neg = False
        if isinstance(c, Cyclotomic):
            coeff = f"({format_scalar(c)})"
        else:
            neg = c < 0
            r = -c if neg else c
            coeff = "" if (r == 1 and body) else format_scalar(r)
        if coeff and body:
            text = f"{coeff}*{body}" if mono else f"{coeff} {body}"
        else:
            text = coeff or body
        out.append(("- " if neg else "+ ") + text)
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


class FormParseError(ValueError):
    pass


_VAR = re.compile(r"(z" + BAR + r"|zb|z|x|t)(\d*)(?:\^(\d+))?$")


def _var_index(space: CoordinateSpace, base: str, num: str) -> int:
    if base == "t":
        if space.params == 0:
            raise FormParseError("no parameter variable in this space")
        return space.nvars + (int(num) - 1 if num else 0)
    if not num:
        raise FormParseError(f"variable {base!r} needs an index")
    i = int(num) - 1
    if space.kind == "real":
        if base != "x" or not 0 <= i < space.n:
            raise FormParseError(f"unknown variable {base}{num} on {space}")
        return i
    if base == "x" or not 0 <= i < space.n:
        raise FormParseError(f"unknown variable {base}{num} on {space}")
    return i if base == "z" else space.n + i


def _split_terms(text: str) -> list[str]:
    terms, depth, cur = [], 0, ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.strip() and not cur.rstrip().endswith(("*", "^", "/")):
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    if cur.strip():
        terms.append(cur)
    return terms


def parse_form(text: str, space: CoordinateSpace) -> PolyForm:
    """Inverse of ``format_form``; accepts ``zb`` for z-bar and ``^`` or spaces between dx's."""
    s = text.strip()
    if s == "0":
        return PolyForm(space)
    acc = PolyForm(space)
    for raw in _split_terms(s):
        t = raw.strip()
        sign = 1
        if t[0] in "+-":
            sign = -1 if t[0] == "-" else 1
            t = t[1:].strip()
        coeff: Scalar = Fraction(1)
        if t.startswith("("):
            close = t.index(")")
            coeff = parse_scalar(t[1:close])
            t = t[close + 1:].lstrip().lstrip("*").strip()
        else:
            m = re.match(r"(\d+(?:/\d+)?)\s*\*?\s*", t)
            if m:
                coeff = parse_scalar(m.group(1))
                t = t[m.end():]
        if re.search(r"\*\s*\*|∧\s*∧|^[*∧]|[*∧]\s*$", t):
            raise FormParseError(f"dangling operator in {raw.strip()!r}")
        exp = [0] * space.npoly
        idx: list[int] = []
        tokens = [tok for tok in re.split(r"[\s*∧]+", t) if tok]
        for tok in tokens:
            if tok.startswith("d") and len(tok) > 1:
                for part in tok.split("^d") if "^d" in tok else [tok]:
                    name = part[1:] if part.startswith("d") else part
                    m = _VAR.match(name)
                    if not m or m.group(3):
                        raise FormParseError(f"bad differential {tok!r}")
                    i = _var_index(space, m.group(1), m.group(2))
                    if i >= space.nvars:
                        raise FormParseError("parameters have no differential")
                    idx.append(i)
            else:
                m = _VAR.match(tok)
                if not m:
                    raise FormParseError(f"cannot parse {tok!r} in {text!r}")
                i = _var_index(space, m.group(1), m.group(2))
                exp[i] += int(m.group(3) or 1)
        acc = acc + PolyForm.monomial(space, tuple(exp), tuple(idx), coeff * sign)
    return acc
