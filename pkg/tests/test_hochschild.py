import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eqhh.forms import PolyForm, Real, graded_dim
from eqhh.groups import close_generators, cyclic_scalar_group, trivial_group
from eqhh.hochschild import (CrossedChain, EquivariantChain, SizeGuardExceeded, TensorChain,
                             bar_differential_twisted, brute_crossed_hh0, brute_twisted_hh, crossed_differential,
                             crossed_product_hh_finite, hkr_map, is_invariant, loop_character_dims, qism_tilde,
                             twisted_equivariant_differential)
from eqhh.koszul import build_twisted_koszul, fixed_form_dims, homology
from eqhh.verify import random_crossed_chain, random_equivariant_chain, random_tensor

X, ONE, X2 = (1,), (0,), (2,)
Z2_R1 = close_generators([((-1,),)])
Z2_R2 = close_generators([((-1, 0), (0, -1))])
S3 = close_generators([((0, 1, 0), (1, 0, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 1), (1, 0, 0))])


def test_bar_examples():
    c = TensorChain.pure([X, X])
    assert bar_differential_twisted(c, ((-1,),)) == TensorChain.pure([X2], 2)
    assert bar_differential_twisted(c, ((1,),)).is_zero()
    assert bar_differential_twisted(c).is_zero()
    # 1 (x) x  ->  x - x o h
    for a in (-1, 2, Fraction(1, 3)):
        got = bar_differential_twisted(TensorChain.pure([ONE, X]), ((a,),))
        assert got == TensorChain(0, 1, {(X,): 1 - Fraction(a)})


def test_brute_examples():
    assert brute_twisted_hh(((-1,),), 0, 0) == 1
    assert brute_twisted_hh(((-1,),), 0, 1) == 0
    assert brute_twisted_hh(((-1, 0), (0, -1)), 1, 2) == 0
    assert brute_twisted_hh(((1, 0), (0, 1)), 1, 2) == graded_dim(Real(2), 1, 2)


def test_bar_guard():
    with pytest.raises(SizeGuardExceeded):
        brute_twisted_hh(((1, 0, 0), (0, 1, 0), (0, 0, 1)), 3, 12)


def test_hkr_examples():
    R1, R2 = Real(1), Real(2)
    assert hkr_map(TensorChain.pure([X, X]), ((1,),), R1) == PolyForm.var(R1, 0) * PolyForm.dvar(R1, 0)
    w = hkr_map(TensorChain.pure([(0, 0), (1, 0), (0, 1)]), ((1, 0), (0, 1)), R2)
    assert w == PolyForm.monomial(R2, (0, 0), (0, 1))
    w = hkr_map(TensorChain.pure([(1, 0), (1, 0)]), ((1, 0), (0, -1)), R2)
    assert w == PolyForm.var(R1, 0) * PolyForm.dvar(R1, 0)


def test_twisted_equivariant_examples():
    F = EquivariantChain(1, 1, {1: TensorChain.pure([X, X])})
    assert twisted_equivariant_differential(F, Z2_R1).at(1) == TensorChain.pure([X2], 2)
    closed = EquivariantChain(1, 1, {0: TensorChain.pure([X, X])})
    assert twisted_equivariant_differential(closed, Z2_R1).is_zero()
    zero = EquivariantChain(2, 1, {})
    assert twisted_equivariant_differential(zero, Z2_R1).is_zero()


def test_qism_tilde_examples():
    G1 = trivial_group(Real(1))
    F = CrossedChain(1, 1, {((0, 0), (X, X2)): Fraction(3)})
    assert qism_tilde(F, G1) == EquivariantChain(1, 1, {0: TensorChain(1, 1, {(X, X2): 3})})
    # k = 0: F~(g) = g^{-1} . F(g)
    F = CrossedChain(0, 1, {((0,), (ONE,)): 1})
    out = qism_tilde(F, Z2_R1)
    assert out.at(0) == TensorChain.pure([ONE]) and out.at(1).is_zero()
    F = CrossedChain(0, 1, {((1,), (X,)): 1})
    assert qism_tilde(F, Z2_R1, average=False).at(1) == TensorChain.pure([X], -1)
    assert qism_tilde(F, Z2_R1).at(1).is_zero()     # -x is not fixed by the centralizer
    # k = 1, supported on (I, I): only h_1 = I contributes, with weight 1/|G|
    F = CrossedChain(1, 1, {((0, 0), (X, X)): 1})
    out = qism_tilde(F, Z2_R1)
    assert out.at(0) == TensorChain.pure([X, X], Fraction(1, 2)) and out.at(1).is_zero()
    # (g0, h1) = (-I, I): factor actions (-I, 1)
    F = CrossedChain(1, 1, {((1, 0), (X, X)): 1})
    assert qism_tilde(F, Z2_R1).at(1) == TensorChain.pure([X, X], Fraction(-1, 2))


def test_crossed_product_examples():
    per, total = crossed_product_hh_finite(trivial_group(Real(2)), 2, 4)
    assert total.dims == fixed_form_dims(2, 2, 4)
    per, total = crossed_product_hh_finite(Z2_R2, 2, 4)
    assert total[(1, 2)] == 4 and total[(0, 0)] == 2
    assert len(per) == 2
    per, total = crossed_product_hh_finite(cyclic_scalar_group(3), 2, 4)
    assert total[(0, 0)] == 3


@pytest.mark.parametrize("G", [Z2_R2, cyclic_scalar_group(3), cyclic_scalar_group(4), S3],
                         ids=["Z2", "Z3", "Z4", "S3"])
def test_crossed_product_oracles(G):
    _, total = crossed_product_hh_finite(G, 2, 3)
    assert total.dims == loop_character_dims(G, 2, 3)
    for n in range(3):
        assert total[(0, n)] == brute_crossed_hh0(G, n)


@pytest.mark.parametrize("h", [((-1,),), ((-1, 0), (0, 1)), ((0, -1), (1, 0))])
def test_bar_equals_koszul(h):
    K = homology(build_twisted_koszul(h, 3), 2, 3)
    for (k, n), d in K.dims.items():
        assert brute_twisted_hh(h, k, n) == d


seeds = st.integers(0, 10_000)


@given(seeds)
def test_b_squared(seed):
    rng = random.Random(seed)
    c = random_tensor(2, rng.randint(2, 3), rng.randint(0, 4), rng)
    for h in (None, ((-1, 0), (0, 1)), ((0, -1), (1, 0))):
        assert bar_differential_twisted(bar_differential_twisted(c, h), h).is_zero()


@given(seeds)
def test_hkr_kills_twisted_boundaries(seed):
    rng = random.Random(seed)
    gamma = ((1, 0, 0), (0, -1, 0), (0, 0, 1))
    c = random_tensor(3, rng.randint(1, 3), rng.randint(1, 4), rng)
    assert not hkr_map(bar_differential_twisted(c, gamma), gamma, Real(3))


@settings(max_examples=15)
@given(seeds, st.sampled_from(["Z2", "rot4", "S3"]))
def test_tilde_chain_map_and_invariance(seed, name):
    G = {"Z2": Z2_R2, "rot4": close_generators([((0, -1), (1, 0))]), "S3": S3}[name]
    rng = random.Random(seed)
    c = random_crossed_chain(G, rng.randint(1, 2), rng.randint(0, 2), rng)
    t = qism_tilde(c, G)
    assert is_invariant(t, G)
    assert qism_tilde(crossed_differential(c, G), G) == twisted_equivariant_differential(t, G)


@settings(max_examples=15)
@given(seeds)
def test_b_tw_squared(seed):
    rng = random.Random(seed)
    F = random_equivariant_chain(S3, rng.randint(2, 3), rng.randint(0, 3), rng)
    assert twisted_equivariant_differential(twisted_equivariant_differential(F, S3), S3).is_zero()


def test_crossed_differential_squared():
    rng = random.Random(7)
    for _ in range(5):
        c = random_crossed_chain(Z2_R2, 2, 2, rng)
        assert crossed_differential(crossed_differential(c, Z2_R2), Z2_R2).is_zero()
