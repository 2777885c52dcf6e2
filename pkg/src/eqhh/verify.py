"""Cross-check suites shared by the command line and the test-suite.

Each check returns a ``Check`` with a pass flag and a short witness string;
nothing here raises on a failed comparison.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import config
from .forms import CoordinateSpace, PolyForm, PolyVectorField, contract, d_rel, graded_keys, monomials
from .groups import (CircleAction, FiniteGroup, circle_singular_points, generic_stratum, loop_space_finite,
                     reynolds_projector)
from .hochschild import (CrossedChain, EquivariantChain, TensorChain, bar_differential_twisted,
                         brute_crossed_hh0, brute_twisted_hh, crossed_differential, crossed_product_hh_finite,
                         hkr_map, is_invariant, loop_character_dims, qism_tilde, twisted_equivariant_differential)
from .koszul import (build_twisted_koszul, circle_stalk_homology, fixed_form_dims, fixed_part, homology,
                     koszul_homotopy, twist_field)
from .linalg import mat_is_diagonal
from .relforms import (basic_forms_table, finite_basic_forms_table, horizontal_basis, local_models,
                       theta_injectivity_check, vanishing_ideal_check)
from .scalars import zeta


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  [{self.detail}]" if self.detail and not self.ok else "")


def _diff(a: dict, b: dict) -> str:
    bad = [(k, a.get(k), b.get(k)) for k in sorted(set(a) | set(b)) if a.get(k) != b.get(k)]
    return "; ".join(f"{k}: {x} vs {y}" for k, x, y in bad[:5])


def compare(name: str, a: dict, b: dict) -> Check:
    return Check(name, a == b, _diff(a, b))


# -- random instances ------------------------------------------------------------------

def random_scalar(rng: random.Random, cyclotomic: bool = False):
    c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    if cyclotomic and rng.random() < 0.5:
        c = c + Fraction(rng.randint(-2, 2)) * zeta(rng.choice([3, 4, 5, 8]), rng.randint(1, 3))
    return c


def random_form(space: CoordinateSpace, k: int, n: int, rng: random.Random, terms: int = 4,
                cyclotomic: bool = False) -> PolyForm:
    keys = graded_keys(space, k, n)
    if not keys:
        return PolyForm(space)
    return PolyForm(space, {rng.choice(keys): random_scalar(rng, cyclotomic) for _ in range(terms)})


def random_tensor(nv: int, k: int, n: int, rng: random.Random, terms: int = 3) -> TensorChain:
    out = {}
    for _ in range(terms):
        parts = [0] * (k + 1)
        for _ in range(n):
            parts[rng.randrange(k + 1)] += 1
        out[tuple(rng.choice(monomials(nv, p)) for p in parts)] = random_scalar(rng)
    return TensorChain(k, nv, out)


def random_crossed_chain(G: FiniteGroup, k: int, n: int, rng: random.Random, terms: int = 3) -> CrossedChain:
    t = random_tensor(G.space.nvars, k, n, rng, terms)
    return CrossedChain(k, t.nv, {(tuple(rng.randrange(G.order) for _ in range(k + 1)), ms): c
                                  for ms, c in t.terms.items()})


def random_equivariant_chain(G: FiniteGroup, k: int, n: int, rng: random.Random) -> EquivariantChain:
    nv = G.space.nvars
    return EquivariantChain(k, nv, {g: random_tensor(nv, k, n, rng) for g in range(G.order)
                                    if rng.random() < 0.7})


# -- single-matrix checks ----------------------------------------------------------------

def twisted_hkr_checks(h, space: CoordinateSpace, f: int, kmax: int, nmax: int, label: str,
                       with_bar: bool = True, jobs: int = 1) -> list[Check]:
    """Koszul homology = bar homology = C(f,k) #monomials(f, n-k), f = fixed polynomial variables."""
    K = homology(build_twisted_koszul(h, nmax, space), kmax, nmax, jobs=jobs).dims
    expected = fixed_form_dims(f, kmax, nmax)
    out = [compare(f"koszul=closed-form {label}", K, expected)]
    if with_bar:
        g = config.GUARDS
        units = [u for u in K if u[0] <= g.bar_k and u[1] <= g.bar_n]
        B = {u: brute_twisted_hh(h, u[0], u[1], space) for u in units}
        out.append(compare(f"bar=koszul {label}", B, {u: K[u] for u in units}))
    return out


def homotopy_check(h, space: CoordinateSpace, nmax: int, label: str) -> Check:
    """i_Y S + S i_Y + pi* iota* = id on every monomial basis form up to nmax."""
    Y = twist_field(space, h)
    for n in range(nmax + 1):
        for k in range(min(n, space.nvars) + 1):
            for key in graded_keys(space, k, n):
                w = PolyForm(space, {key: Fraction(1)})
                lhs = contract(Y, koszul_homotopy(h, w)) + koszul_homotopy(h, contract(Y, w)) + fixed_part(h, w)
                if lhs != w:
                    return Check(f"homotopy {label}", False, f"fails on {w}: got {lhs}")
    return Check(f"homotopy {label}", True)


# -- finite groups -----------------------------------------------------------------------

def finite_group_checks(G: FiniteGroup, kmax: int, nmax: int, seed: int = 0, jobs: int = 1,
                        with_bar: bool = True) -> list[Check]:
    rng = random.Random(seed)
    checks: list[Check] = []
    sp = G.space
    strata = loop_space_finite(G)
    reps = [cls[0] for cls in G.conjugacy_classes()]
    for a in reps:
        s = strata[a]
        h = G.elements[a]
        f = s.fixed_space().nvars
        checks += twisted_hkr_checks(h, sp, f, kmax, nmax, f"g{a}", with_bar=with_bar, jobs=jobs)
        if mat_is_diagonal(G.full(a)):
            checks.append(homotopy_check(h, sp, min(nmax, 5), f"g{a}"))
        # HKR kills twisted boundaries
        bad = ""
        for _ in range(5):
            k = rng.randint(1, 3)
            c = random_tensor(sp.nvars, k, rng.randint(k, k + 2), rng)
            if hkr_map(bar_differential_twisted(c, G.full(a)), h, sp):
                bad = f"nonzero on b({c.terms})"
        checks.append(Check(f"hkr∘b=0 g{a}", not bad, bad))
    per_class, total = crossed_product_hh_finite(G, kmax, nmax, jobs=jobs)
    checks.append(compare("crossed-product=character-average", total.dims, loop_character_dims(G, kmax, nmax)))
    h0 = {(0, n): brute_crossed_hh0(G, n) for n in range(nmax + 1)}
    checks.append(compare("crossed-product HH0=brute", {u: total[u] for u in h0}, h0))
    ft = finite_basic_forms_table(G, kmax, nmax)
    tot = {}
    for r in ft.rows:
        tot[(r["k"], r["n"])] = tot.get((r["k"], r["n"]), 0) + r["dim_basic"]
    checks.append(compare("basic-forms table=crossed product", tot, total.dims))
    checks += structural_checks_finite(G, rng)
    return checks


def structural_checks_finite(G: FiniteGroup, rng: random.Random, trials: int = 4) -> list[Check]:
    out = []
    sp = G.space
    nv = sp.nvars
    ok = True
    for _ in range(trials):
        k = rng.randint(2, 3)
        c = random_tensor(nv, k, rng.randint(0, 3), rng)
        g = G.full(rng.randrange(G.order))
        ok &= bar_differential_twisted(bar_differential_twisted(c, g), g).is_zero()
    out.append(Check("b^2=0", ok))
    ok = True
    for _ in range(trials):
        F = random_equivariant_chain(G, rng.randint(2, 3), rng.randint(0, 3), rng)
        ok &= twisted_equivariant_differential(twisted_equivariant_differential(F, G), G).is_zero()
    out.append(Check("b_tw^2=0", ok))
    ok, inv = True, True
    for _ in range(trials):
        k = rng.randint(1, 2)
        c = random_crossed_chain(G, k, rng.randint(0, 2), rng)
        t = qism_tilde(c, G)
        inv &= _is_inv(t, G)
        ok &= qism_tilde(crossed_differential(c, G), G) == twisted_equivariant_differential(t, G)
    out.append(Check("tilde is a chain map", ok))
    out.append(Check("tilde lands in invariants", inv))
    ok = True
    for k, n in [(0, 1), (1, 2), (2, 3)]:
        if k > nv:
            continue
        P = reynolds_projector(G, k, n)
        ok &= (P @ P) == P
    out.append(Check("reynolds idempotent", ok))
    return out


def _is_inv(F, G):
    return is_invariant(F, G)


# -- circle actions ----------------------------------------------------------------------

def circle_checks(A: CircleAction, kmax: int, nmax: int, seed: int = 0, jobs: int = 1,
                  with_bar: bool = True) -> list[Check]:
    rng = random.Random(seed)
    checks: list[Check] = []
    sp = A.space
    strata = circle_singular_points(A) + [generic_stratum(A)]
    for s in strata:
        st = circle_stalk_homology(A, s.j, kmax, nmax, jobs=jobs)
        hz = {u: len(horizontal_basis(s, *u)) for u in st.dims}
        checks.append(compare(f"stalk=horizontal {s.label}", st.dims, hz))
        h = A.element(s.j) if s.j is not None else A.generic_element()
        checks += twisted_hkr_checks(h, sp, 2 * len(s.fixed), kmax, nmax, f"t={s.t0}",
                                     with_bar=with_bar and A.m <= 2, jobs=jobs)
        checks.append(homotopy_check(h, sp, min(nmax, 4), f"t={s.t0}"))
    for j, where in local_models(A):
        r = vanishing_ideal_check(A, j, nmax, where)
        checks.append(Check(r.name, r.ok, r.witness))
        for k in range(min(kmax, 2 * A.m) + 1):
            r = theta_injectivity_check(A, j, k, nmax, where)
            checks.append(Check(r.name, r.ok, r.witness))
    table = basic_forms_table(A, kmax, nmax)
    mono = all(r["dim_basic"] <= r["dim_horizontal"] <= r["dim_relative"] for r in table.rows)
    checks.append(Check("basic<=horizontal<=relative", mono))
    sym = True
    for s in circle_singular_points(A):
        other = (A.w - s.j) % A.w
        a = {u: (r["dim_relative"], r["dim_horizontal"], r["dim_basic"]) for u, r in table.lookup(s.label).items()}
        b = {u: (r["dim_relative"], r["dim_horizontal"], r["dim_basic"]) for u, r in table.lookup(f"j={other}").items()}
        sym &= a == b
    checks.append(Check("conjugate strata agree", sym))
    checks += structural_checks_forms(sp, rng)
    return checks


def structural_checks_forms(space: CoordinateSpace, rng: random.Random, trials: int = 6) -> list[Check]:
    ok_d, ok_i = True, True
    for _ in range(trials):
        k = rng.randint(0, space.nvars)
        n = rng.randint(k, k + 3)
        a = random_form(space, k, n, rng, cyclotomic=True)
        ok_d &= not d_rel(d_rel(a))
        A = tuple(tuple(random_scalar(rng) for _ in range(space.nvars)) for _ in range(space.nvars))
        Y = PolyVectorField.linear(space, A)
        ok_i &= not contract(Y, contract(Y, a))
    return [Check("d^2=0", ok_d), Check("i_Y^2=0", ok_i)]


def run_checks(suite: Callable[..., list[Check]], *args, **kw) -> tuple[bool, list[Check]]:
    checks = suite(*args, **kw)
    return all(c.ok for c in checks), checks
