from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from eqhh import config
from eqhh.forms import ComplexPairs, PolyForm, Real, contract, graded_dim, graded_keys, monomial_count
from eqhh.groups import CircleAction
from eqhh.koszul import (NotDiagonal, build_twisted_koszul, circle_stalk_homology, euler_koszul_check,
                         fixed_form_dims, fixed_part, homology, homology_representatives, koszul_homotopy,
                         twist_field, zero_locus_dims)
from eqhh.scalars import zeta

MINUS_I2 = ((-1, 0), (0, -1))
B3 = ((-1, 0, 0), (0, -1, 0), (0, 0, 1))


def test_identity_twist_has_zero_differentials():
    C = build_twisted_koszul(((1, 0), (0, 1)), 4)
    for n in range(5):
        for k in range(1, 3):
            assert C.differential(k, n).is_zero()
    H = homology(C, 2, 4)
    assert all(H[(k, n)] == graded_dim(Real(2), k, n) for k, n in H.dims)


def test_minus_identity_piece():
    C = build_twisted_koszul(MINUS_I2, 2)
    M = C.differential(1, 1)
    assert M.shape == (2, 2) and set(M.entries.values()) == {2}
    H = homology(C, 2, 4)
    assert H[(0, 0)] == 1 and sum(H.dims.values()) == 1


def test_block_twist_matches_fixed_axis():
    H = homology(build_twisted_koszul(B3, 4), 2, 4)
    for (k, n), d in H.dims.items():
        assert d == (1 if k == 0 or (k == 1 and n >= 1) else 0)


def test_d_squared_on_complexes():
    for h in (MINUS_I2, B3, ((zeta(3),),)):
        sp = ComplexPairs(1) if len(h) == 1 else None
        assert build_twisted_koszul(h, 4, sp).check_d2()


def test_homotopy_examples():
    R1 = Real(1)
    x = PolyForm.var(R1, 0)
    S = koszul_homotopy(((-1,),), x)
    assert S == PolyForm.dvar(R1, 0).scale(Fraction(1, 2))
    assert contract(twist_field(R1, ((-1,),)), S) == x
    C1 = ComplexPairs(1)
    w = PolyForm.var(C1, 0) * PolyForm.dvar(C1, 1)
    h = ((zeta(4),),)
    S = koszul_homotopy(h, w)
    assert S == (PolyForm.dvar(C1, 0) * PolyForm.dvar(C1, 1)).scale(Fraction(1, 2))
    Y = twist_field(C1, h)
    assert contract(Y, S) + koszul_homotopy(h, contract(Y, w)) + fixed_part(h, w) == w


def test_homotopy_vanishes_on_fixed_forms():
    R3 = Real(3)
    w = PolyForm.var(R3, 2) * PolyForm.dvar(R3, 2)
    assert not koszul_homotopy(B3, w)
    assert fixed_part(B3, w) == w


def test_homotopy_needs_diagonal():
    with pytest.raises(NotDiagonal):
        koszul_homotopy(((0, -1), (1, 0)), PolyForm.var(Real(2), 0))


def test_representatives_are_cycles():
    C = build_twisted_koszul(B3, 3)
    reps = homology_representatives(C, 1, 2)
    assert len(reps) == 1
    assert not contract(C.Y, reps[0])


def test_euler_examples():
    full = euler_koszul_check(Real(2), [0, 1], 2, 4)
    assert all(full[u] == graded_dim(Real(2), *u) for u in full.dims)
    assert euler_koszul_check(Real(1), [], 1, 4).dims == {u: int(u == (0, 0)) for u in fixed_form_dims(1, 1, 4)}
    H = euler_koszul_check(Real(2), [1], 2, 4)
    assert H.dims == fixed_form_dims(1, 2, 4)


@pytest.mark.parametrize("d,fixed", [(1, []), (2, [1]), (3, [0]), (3, [])])
def test_euler_normal_resolution(d, fixed):
    H = euler_koszul_check(Real(d), fixed, 3, 4, normal=True)
    expected = zero_locus_dims(len(fixed), 3, 4)
    assert max(k for k, _ in H.dims) == d - len(fixed)
    assert H.dims == {u: expected[u] for u in H.dims}


def test_circle_stalk_examples():
    A = CircleAction((1,))
    assert circle_stalk_homology(A, 0, 2, 2)[(1, 2)] == 1
    assert circle_stalk_homology(CircleAction((1, 2)), 1, 0, 0)[(0, 0)] == 1
    gen = circle_stalk_homology(A, None, 2, 4)
    assert gen.dims == {u: int(u == (0, 0)) for u in gen.dims}


def test_equal_weights_stalk_is_kernel_of_euler_rotation():
    # all weights equal, j = 0: every coordinate is fixed and E = sum z d/dz - zbar d/dzbar
    from eqhh.forms import contraction_matrix
    from eqhh.koszul import fundamental_field
    from eqhh.linalg import kernel_basis
    sp = ComplexPairs(2)
    E = fundamental_field(sp, [1, 1])
    st_ = circle_stalk_homology(CircleAction((1, 1)), 0, 2, 3)
    for (k, n), d in st_.dims.items():
        brute = len(graded_keys(sp, k, n)) if k == 0 else len(kernel_basis(contraction_matrix(E, k, n)))
        assert d == brute


def test_report_serialization():
    H = homology(build_twisted_koszul(MINUS_I2, 2), 1, 2, label="minus")
    js = H.to_json()
    assert js["stratum"] == "minus" and {"k": 0, "n": 0, "dim": 1} in js["table"]
    lines = H.to_csv().splitlines()
    assert lines[0].replace(" ", "") == "stratum,k,n,dim" and len(lines) == 1 + len(H.dims)


def test_guard():
    with pytest.raises(config.GuardError):
        homology(build_twisted_koszul(MINUS_I2, 2), 2, config.GUARDS.nmax + 1)


diag = st.lists(st.sampled_from([1, -1]), min_size=1, max_size=3)


@given(diag, st.integers(0, 4))
def test_twisted_homology_closed_form(signs, n):
    h = tuple(tuple(signs[i] if i == j else 0 for j in range(len(signs))) for i in range(len(signs)))
    f = signs.count(1)
    H = homology(build_twisted_koszul(h, n), len(signs), n)
    for k in range(min(len(signs), n) + 1):
        assert H[(k, n)] == (comb(f, k) * monomial_count(f, n - k) if (f or k == n == 0) else 0)


@given(st.lists(st.sampled_from([1, 2, 3, 4, 6]), min_size=1, max_size=2), st.integers(0, 3), st.data())
def test_homotopy_identity_random(orders, n, data):
    m = len(orders)
    h = tuple(tuple(zeta(orders[i], data.draw(st.integers(0, orders[i] - 1))) if i == j else Fraction(0)
                    for j in range(m)) for i in range(m))
    sp = ComplexPairs(m)
    Y = twist_field(sp, h)
    k = data.draw(st.integers(0, min(n, 2 * m)))
    keys = graded_keys(sp, k, n)
    if not keys:
        return
    w = PolyForm(sp, {data.draw(st.sampled_from(keys)): Fraction(1)})
    assert contract(Y, koszul_homotopy(h, w)) + koszul_homotopy(h, contract(Y, w)) + fixed_part(h, w) == w
