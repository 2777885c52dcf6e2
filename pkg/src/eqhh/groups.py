"""Finite matrix groups, weighted circle actions and their loop-space strata."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

from . import config
from .forms import ComplexPairs, CoordinateSpace, Real, full_matrix, graded_keys, pullback_matrix
from .linalg import (DimensionMismatch, Matrix, SparseMatrix, kernel_basis, mat, mat_identity,
                     mat_inverse, mat_mul, mat_sub, mat_to_sparse, mat_transpose, solve_columns)
from .scalars import conj, zeta


class NotClosedWithinBound(ValueError):
    pass


class NonInvertibleGenerator(ValueError):
    pass


class NotUnitary(ValueError):
    pass


class ZeroWeight(ValueError):
    pass


class NotASingularPoint(ValueError):
    pass


def adjoint(g: Matrix) -> Matrix:
    return tuple(tuple(conj(x) for x in row) for row in mat_transpose(g))


def is_unitary(g: Matrix) -> bool:
    return mat_mul(g, adjoint(g)) == mat_identity(len(g))


def fixed_subspace(g: Matrix) -> list[tuple]:
    """Basis of ker(g - I), canonical pivots."""
    n = len(g)
    return kernel_basis(mat_to_sparse(mat_sub(g, mat_identity(n)))) if n else []


@dataclass
class FiniteGroup:
    space: CoordinateSpace
    elements: list            # matrices acting on coordinates (m x m on z for complex spaces)
    mul_table: list           # mul_table[a][b] = index of elements[a] @ elements[b]
    identity_index: int
    inverse: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, g: Matrix) -> int:
        return self._lookup[g]

    def __post_init__(self):
        self._lookup = {g: i for i, g in enumerate(self.elements)}
        if not self.inverse:
            e = self.identity_index
            self.inverse = [row.index(e) for row in self.mul_table]

    def conjugate(self, a: int, x: int) -> int:
        """Index of x a x^-1."""
        return self.mul_table[self.mul_table[x][a]][self.inverse[x]]

    def conjugacy_classes(self) -> list[list[int]]:
        seen, classes = set(), []
        for a in range(self.order):
            if a in seen:
                continue
            cls = sorted({self.conjugate(a, x) for x in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes

    def centralizer(self, a: int) -> list[int]:
        return [x for x in range(self.order) if self.mul_table[x][a] == self.mul_table[a][x]]

    def full(self, i: int) -> Matrix:
        """Matrix on all polynomial variables (z and zbar blocks for complex spaces)."""
        return full_matrix(self.space, self.elements[i])


def close_generators(gens: Sequence, space: CoordinateSpace | None = None, bound: int | None = None,
                     check_unitary: bool = True) -> FiniteGroup:
    """Breadth-first closure of a generating set under multiplication."""
    bound = config.GUARDS.group_bound if bound is None else bound
    gens = [mat(g) for g in gens]
    if not gens:
        raise ValueError("need at least one generator (use the identity for the trivial group)")
    n = len(gens[0])
    if any(len(g) != n or any(len(r) != n for r in g) for g in gens):
        raise DimensionMismatch("generators must be square of equal size")
    if space is None:
        space = Real(n)
    elif space.n != n:
        raise DimensionMismatch(f"{n}x{n} generators do not act on {space}")
    for g in gens:
        try:
            mat_inverse(g)
        except ZeroDivisionError:
            raise NonInvertibleGenerator(f"singular generator {g}") from None
        if check_unitary and not is_unitary(g):
            raise NotUnitary(f"generator is not orthogonal/unitary: {g}")
    e = mat_identity(n)
    elements, lookup = [e], {e: 0}
    queue = deque([e])
    while queue:
        a = queue.popleft()
        for g in gens:
            b = mat_mul(a, g)
            if b not in lookup:
                if len(elements) >= bound:
                    raise NotClosedWithinBound(f"more than {bound} elements")
                lookup[b] = len(elements)
                elements.append(b)
                queue.append(b)
    table = [[lookup[mat_mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(space, elements, table, 0)


def trivial_group(space: CoordinateSpace) -> FiniteGroup:
    return close_generators([mat_identity(space.n)], space)


def cyclic_scalar_group(order: int, m: int = 1) -> FiniteGroup:
    """Z/order acting on C^m by zeta_order scaling."""
    z = zeta(order)
    g = tuple(tuple(z if i == j else Fraction(0) for j in range(m)) for i in range(m))
    return close_generators([g], ComplexPairs(m))


@dataclass(frozen=True)
class LoopStratum:
    label: str
    space: CoordinateSpace          # ambient space
    fixed_basis: tuple              # basis of V^gamma in the coordinate (z-half for complex) space
    element: int | None = None      # finite groups: index into G.elements
    conj_class: int | None = None
    centralizer: tuple = ()
    j: int | None = None            # circle actions: point t0 = j / w (None for the generic witness)
    t0: Fraction | None = None
    fixed: tuple = ()               # circle actions: K_j as 0-based coordinate indices
    weights: tuple = ()
    isotropy: str = ""

    @property
    def dim(self) -> int:
        return len(self.fixed_basis)

    def fixed_space(self) -> CoordinateSpace:
        return CoordinateSpace(self.space.kind, self.dim)

    def parametrization(self) -> Matrix:
        """Columns = fixed basis; maps V^gamma coordinates into ambient coordinates."""
        n = self.space.n
        return tuple(tuple(v[i] for v in self.fixed_basis) for i in range(n))


def loop_space_finite(G: FiniteGroup) -> list[LoopStratum]:
    classes = G.conjugacy_classes()
    class_of = {a: ci for ci, cls in enumerate(classes) for a in cls}
    out = []
    for a, g in enumerate(G.elements):
        out.append(LoopStratum(label=f"g{a}", space=G.space, fixed_basis=tuple(fixed_subspace(g)),
                               element=a, conj_class=class_of[a], centralizer=tuple(G.centralizer(a)),
                               isotropy=f"Z(g{a})"))
    return out


def centralizer_action(G: FiniteGroup, s: LoopStratum) -> list[Matrix]:
    """Matrices M_z with z B = B M_z for z in the centralizer, B the fixed basis."""
    B = s.fixed_basis
    if not B:
        return [() for _ in s.centralizer]
    out = []
    for z in s.centralizer:
        zB = [tuple(sum((G.elements[z][i][k] * v[k] for k in range(len(v)) if v[k]), Fraction(0))
                    for i in range(len(v))) for v in B]
        out.append(solve_columns(B, zB))
    return out


def reynolds_projector(G: FiniteGroup, k: int, n: int) -> SparseMatrix:
    """(1/|G|) sum_g g^* on the (k, n) graded piece."""
    return average_pullbacks([G.full(i) for i in range(G.order)], G.space, k, n)


def average_pullbacks(mats: Sequence[Matrix], space: CoordinateSpace, k: int, n: int) -> SparseMatrix:
    dim = len(graded_keys(space, k, n))
    acc = SparseMatrix(dim, dim)
    for g in mats:
        acc = acc + pullback_matrix(g, space, k, n)
    return acc.scaled(Fraction(1, len(mats)))


# -- circle actions -------------------------------------------------------------

@dataclass(frozen=True)
class CircleAction:
    """S^1 acting on C^m by z_k -> e^{2 pi i w_k t} z_k."""
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if not self.weights:
            raise ValueError("empty weight vector")
        if any(w == 0 for w in self.weights):
            raise ZeroWeight(f"zero weight in {self.weights}; split off the trivial factor first")

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def w(self) -> int:
        return reduce(lambda a, b: a * b // gcd(a, b), (abs(x) for x in self.weights))

    @property
    def space(self) -> CoordinateSpace:
        return ComplexPairs(self.m)

    def fixed_set(self, j: int) -> tuple[int, ...]:
        return tuple(k for k, wk in enumerate(self.weights) if (wk * j) % self.w == 0)

    def element(self, j: int, order: int | None = None) -> Matrix:
        """diag(exp(2 pi i w_k j / order)); order defaults to w."""
        N = order or self.w
        return tuple(tuple(zeta(N, (wk * j) % N) if a == b else Fraction(0)
                           for b in range(self.m)) for a, wk in enumerate(self.weights))

    def generic_element(self) -> Matrix:
        """Witness t0 = 1/(2w): no coordinate is fixed there."""
        return self.element(1, 2 * self.w)


def _circle_stratum(A: CircleAction, j: int | None) -> LoopStratum:
    m = A.m
    if j is None:
        K, t0, label = (), Fraction(1, 2 * A.w), "generic"
    else:
        K, t0, label = A.fixed_set(j), Fraction(j, A.w), f"j={j}"
    basis = tuple(tuple(Fraction(1 if i == k else 0) for i in range(m)) for k in K)
    iso = "S1" if j == 0 else (f"Z/{A.w // gcd(j, A.w)}" if j is not None else "trivial")
    return LoopStratum(label=label, space=A.space, fixed_basis=basis, j=j, t0=t0, fixed=K,
                       weights=A.weights, isotropy=iso)


def circle_singular_points(A: CircleAction) -> list[LoopStratum]:
    """Strata at t = j/w, 0 <= j < w; strata with empty K_j are kept (fixed space {0})."""
    return [_circle_stratum(A, j) for j in range(A.w)]


def generic_stratum(A: CircleAction) -> LoopStratum:
    return _circle_stratum(A, None)


def circle_stratum(A: CircleAction, j: int | None) -> LoopStratum:
    if j is not None and not 0 <= j < A.w:
        raise NotASingularPoint(f"j={j} is not in 0..{A.w - 1}")
    return _circle_stratum(A, j)
