"""Structural properties that must hold for every input, checked on random data."""

import random
from fractions import Fraction

import numpy as np
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cupform.analysis import honest, is_wf_member
from cupform.errors import DependentSlices
from cupform.exactpoly import Form, LinearChange, ProjPoint, apply_change, embed
from cupform.tensor import (
    HyperTensor,
    SubtensorSpec,
    cayley_hyperdet_222,
    flattening_lower_bound,
    from_rank_one,
    is_rank_le_one,
    lemma_trick_bound,
    matrix,
    matrix_rank,
    rank_222,
    rank_bounds,
    slice_along,
    subtensor,
)
from strategies import forms, points, rand_form, rand_rational


def invertible(rng, k, bound=2):
    while True:
        try:
            return LinearChange([[rng.randint(-bound, bound) for _ in range(k)] for _ in range(k)])
        except ValueError:
            pass


def test_rank_one_sums():
    rng = random.Random(11)
    for _ in range(1000):
        k = rng.randint(2, 3)
        shape = [rng.randint(2, 3) for _ in range(k)]
        a = [[rand_rational(rng, 9) or 1 for _ in range(s)] for s in shape]
        b = [[rand_rational(rng, 9) or 1 for _ in range(s)] for s in shape]
        T = from_rank_one(a)
        assert is_rank_le_one(T)
        S = T + from_rank_one(b)
        # non-proportional in at least two factors means rank exactly 2
        nonprop = sum(matrix_rank(matrix([u, v])) == 2 for u, v in zip(a, b))
        if nonprop >= 2:
            assert not is_rank_le_one(S)


def test_matrix_rank_oracle():
    rng = random.Random(12)
    for _ in range(500):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        rows = [[rand_rational(rng, 20) if rng.random() < 0.6 else 0 for _ in range(c)] for _ in range(r)]
        if rng.random() < 0.4 and r > 1:
            rows[-1] = [x + 2 * y for x, y in zip(rows[0], rows[1 % r])]
        want = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x for x in row] for row in rows]).rank()
        assert matrix_rank(matrix(rows)) == want


@given(st.lists(st.integers(-3, 3), min_size=18, max_size=18), st.data())
def test_subtensor_monotonicity(v, data):
    T = HyperTensor(np.array(v, dtype=object).reshape(3, 3, 2))
    maps = []
    for size in T.shape:
        idx = data.draw(st.lists(st.integers(0, size - 1), min_size=1, max_size=size, unique=True))
        maps.append(tuple(sorted(idx)))
    S = subtensor(T, SubtensorSpec(tuple(maps)))
    upper = rank_bounds(T).upper
    assert flattening_lower_bound(S) <= upper
    if S.shape == (2, 2, 2):
        assert rank_222(S) <= upper


@given(st.lists(st.integers(-4, 4), min_size=8, max_size=8))
def test_lemma_bound_below_exact_rank(v):
    T = HyperTensor(np.array(v, dtype=object).reshape(2, 2, 2))
    A0, A1 = slice_along(T, 2, 0).tolist(), slice_along(T, 2, 1).tolist()
    try:
        lb = lemma_trick_bound([A0, A1], samples=20).lower
    except DependentSlices:
        return
    assert lb <= rank_222(T)


@given(st.lists(st.integers(-4, 4), min_size=8, max_size=8), st.integers(0, 2), st.data())
def test_cayley_sl2_invariance(v, axis, data):
    a = np.array(v, dtype=object).reshape(2, 2, 2)
    # a determinant-one substitution on one factor
    p, q, r = data.draw(st.integers(-3, 3)), data.draw(st.integers(-3, 3)), data.draw(st.integers(-3, 3))
    M = np.array([[1, p], [0, 1]], dtype=object) @ np.array([[1, 0], [q, 1]], dtype=object) @ np.array([[1, r], [0, 1]], dtype=object)
    b = np.moveaxis(np.tensordot(M, np.moveaxis(a, axis, 0), axes=([1], [0])), 0, axis)
    assert cayley_hyperdet_222(HyperTensor(a)) == cayley_hyperdet_222(HyperTensor(b))
    assert cayley_hyperdet_222(HyperTensor(np.swapaxes(a, 0, 2))) == cayley_hyperdet_222(HyperTensor(a))


@given(forms(max_vars=3, max_degree=4), st.integers(0, 10**6))
def test_honest_witness_eliminates_variable(G, seed):
    # both directions: hide a variable, detect it, and eliminate it again with A e_0 = witness
    rng = random.Random(seed)
    k = G.num_vars + 1
    F = apply_change(embed(G, k, list(range(1, k))), invertible(rng, k))
    rep = honest(F)
    assert not rep.honest
    w = list(rep.witness.coords)
    j = next(i for i, c in enumerate(w) if c)
    cols = [w] + [[Fraction(int(r == i)) for r in range(k)] for i in range(k) if i != j]
    assert not apply_change(F, LinearChange.from_columns(cols)).involves(0)


def test_honest_forms_have_no_eliminable_direction():
    rng = random.Random(13)
    for _ in range(100):
        k = rng.randint(1, 3)
        F = rand_form(rng, k, 3)
        if honest(F).honest:
            for _ in range(5):
                A = invertible(rng, k)
                assert apply_change(F, A).involves(0)


@given(forms(max_vars=3, max_degree=4, density=0.4), st.integers(0, 10**6), st.data())
def test_wf_covariance(F, seed, data):
    rng = random.Random(seed)
    A = invertible(rng, F.num_vars)
    p = ProjPoint(data.draw(points(F.num_vars)))
    G = apply_change(F, A)
    q = A.inverse().apply_to(p)
    assert (is_wf_member(F, p) is None) == (is_wf_member(G, q) is None)


def test_planted_points_are_covariant():
    rng = random.Random(14)
    for _ in range(100):
        k, n = rng.randint(2, 4), rng.randint(3, 4)
        y = [Form.variable(k, i) for i in range(k)]
        G = Form(k, n, {e: c for e, c in rand_form(rng, k, n).terms.items() if e[0] == 0})
        F0 = y[0] ** n + G
        A = invertible(rng, k)
        F = apply_change(F0, A)
        assert is_wf_member(F, A.inverse().apply_to(ProjPoint.basis(k, 0))) is not None
