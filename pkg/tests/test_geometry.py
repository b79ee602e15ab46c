import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cupform.analysis import hessian_at, is_wf_member
from cupform.errors import DegreeMismatch, NotBlowupShape, NotHonest
from cupform.exactpoly import Form, ProjPoint, monomials, restrict
from cupform.fixtures import curve_blowup, fermat, fermat_phi, p1_p3, surface_blowup
from cupform.geometry import (
    BlowupSpec,
    IntersectionData,
    _diagonalize_quadric,
    blowup_form,
    blowup_point,
    candidate_exceptionals,
    default_point_self_intersection,
    exceptional_rank_report,
    form_from_intersection,
    hessian_basis_identity_check,
    intersection_from_form,
)
from cupform.tensor import rank_bounds
from strategies import rand_rational


def xs(k):
    return [Form.variable(k, i) for i in range(k)]


@st.composite
def phis(draw, max_basis=4):
    n = draw(st.integers(1, 4))
    k = draw(st.integers(1, max_basis))
    vals = {}
    for m in monomials(k, n):
        if draw(st.booleans()):
            vals[m] = draw(st.fractions(min_value=-100, max_value=100, max_denominator=100))
    return IntersectionData(n, k, vals)


class TestIntersection:
    def test_p1p3(self):
        F = form_from_intersection(p1_p3())
        x = xs(2)
        assert F == 4 * x[0] * x[1] ** 3
        assert intersection_from_form(F).value((1, 3)) == 1

    def test_trivial(self):
        assert form_from_intersection(IntersectionData(3, 2, {})).is_zero()
        F = form_from_intersection(IntersectionData(3, 1, {(3,): 7}))
        assert F == 7 * xs(1)[0] ** 3
        assert intersection_from_form(xs(1)[0] ** 3).value((3,)) == 1

    def test_bad_monomial(self):
        with pytest.raises(DegreeMismatch):
            IntersectionData(3, 2, {(1, 1): 1})

    @given(phis())
    def test_round_trip(self, phi):
        assert intersection_from_form(form_from_intersection(phi)) == phi
        assert IntersectionData.from_json(phi.to_json()) == phi

    @given(phis())
    def test_multilinear_polarization(self, phi):
        # F(x) = phi(x, ..., x)
        rng = random.Random(len(phi.values))
        x = [Fraction(rng.randint(-3, 3)) for _ in range(phi.basis_size)]
        import itertools

        total = Fraction(0)
        for idx in itertools.product(range(phi.basis_size), repeat=phi.n):
            term = phi.multilinear(idx)
            for i in idx:
                term *= x[i]
            total += term
        assert form_from_intersection(phi)(x) == total


class TestHessianIdentity:
    def test_zero_and_corruption(self):
        phi = IntersectionData(3, 2, {})
        assert hessian_basis_identity_check(phi, 0)
        phi = IntersectionData(3, 3, {(1, 1, 1): 2, (3, 0, 0): 1})
        F = form_from_intersection(phi)
        bad = IntersectionData(3, 3, {(1, 1, 1): 3, (3, 0, 0): 1})
        assert hessian_basis_identity_check(phi, 0, F)
        assert not hessian_basis_identity_check(bad, 0, F)

    @given(phis(max_basis=4).filter(lambda p: p.n >= 3), st.data())
    def test_random(self, phi, data):
        i = data.draw(st.integers(0, phi.basis_size - 1))
        assert hessian_basis_identity_check(phi, i)


class TestBlowup:
    def test_point_defaults(self):
        x = xs(2)
        assert default_point_self_intersection(3) == 1
        assert default_point_self_intersection(4) == -1
        assert blowup_point(xs(1)[0] ** 3) == x[0] ** 3 + x[1] ** 3
        assert blowup_point(xs(1)[0] ** 4) == -x[0] ** 4 + x[1] ** 4
        assert blowup_point(xs(1)[0] ** 3, a=Fraction(-2)) == -2 * x[0] ** 3 + x[1] ** 3

    def test_curve_shape(self):
        y = xs(1)
        x = xs(2)
        G = blowup_form(y[0] ** 3, BlowupSpec(1, Fraction(2), [5 * y[0], Form.zero(1, 2)]))
        assert G == 2 * x[0] ** 3 + 5 * x[0] ** 2 * x[1] + x[1] ** 3

    def test_surface_shape(self):
        y = xs(2)
        x = xs(3)
        FX = y[0] ** 4 + y[1] ** 4
        L, Q = y[0] - y[1], y[0] ** 2 + y[1] ** 2
        G = blowup_form(FX, BlowupSpec(2, Fraction(1), [L, Q]))
        assert G == x[0] ** 4 + x[0] ** 3 * (x[1] - x[2]) + x[0] ** 2 * (x[1] ** 2 + x[2] ** 2) + x[1] ** 4 + x[2] ** 4

    def test_spec_errors(self):
        y = xs(1)
        with pytest.raises(DegreeMismatch):
            blowup_form(y[0] ** 3, BlowupSpec(1, Fraction(1), [y[0] ** 2]))
        with pytest.raises(DegreeMismatch):
            blowup_form(y[0] ** 3, BlowupSpec(3, Fraction(1), []))
        with pytest.raises(DegreeMismatch):
            blowup_point(xs(1)[0])
        with pytest.raises(DegreeMismatch):
            blowup_form(y[0] ** 2, BlowupSpec(0, Fraction(1), [y[0], y[0] ** 2]))

    @given(st.integers(0, 10**6), st.integers(3, 4), st.integers(0, 2))
    def test_restriction_to_exceptional_hyperplane(self, seed, n, k):
        rng = random.Random(seed)
        b1 = rng.randint(1, 3)
        FX = Form(b1, n, {m: rand_rational(rng, 9) for m in monomials(b1, n) if rng.random() < 0.5})
        R = [Form(b1, i, {m: rand_rational(rng, 9) for m in monomials(b1, i) if rng.random() < 0.5})
             for i in range(1, min(n - k, n - 1) + 1)]
        G = blowup_form(FX, BlowupSpec(min(k, n - 1), rand_rational(rng), R))
        # x0 = 0
        kept = Form(G.num_vars, n, {e: c for e, c in G.terms.items() if e[0] == 0})
        assert restrict(kept, range(1, G.num_vars)) == FX

    def test_spec_json(self):
        spec = BlowupSpec(1, Fraction(-3, 2), [xs(2)[0] + xs(2)[1]])
        back = BlowupSpec.from_json(spec.to_json())
        assert back.k == 1 and back.a == Fraction(-3, 2) and back.R == spec.R


class TestExceptionalRank:
    def test_point(self):
        for FX in (xs(1)[0] ** 3, xs(2)[0] ** 4 + xs(2)[1] ** 4):
            G = blowup_point(FX)
            w = is_wf_member(G, ProjPoint.basis(G.num_vars, 0))
            assert w is not None and w.f_value == default_point_self_intersection(FX.degree)
            rep = exceptional_rank_report(G, k=0)
            assert rep.rank_exact == 1

    def test_curve_family(self):
        for a in (0, 1, -1, 5):
            rep = exceptional_rank_report(curve_blowup(3, a), k=1)
            assert rep.rank_lower == 2 and rep.rank_exact == 2
            rep = exceptional_rank_report(curve_blowup(4, a), k=1)
            assert rep.rank_exact == 3

    def test_surface(self):
        for q in (1, 2, 3):
            rep = exceptional_rank_report(surface_blowup(q), k=2)
            assert rep.rank_lower >= 2 * q
        rep = exceptional_rank_report(surface_blowup(2), k=2, q=2)
        assert rep.rank_lower == 4 and rep.certificate["justification"] == "constant_minor"

    def test_surface_bound_is_a_real_bound(self):
        # the certified lower bound never exceeds a constructive upper bound
        for q in (1, 2, 3):
            F = surface_blowup(q)
            rb = rank_bounds(hessian_at(F, ProjPoint.basis(F.num_vars, 0)))
            assert exceptional_rank_report(F, k=2).rank_lower <= rb.upper

    def test_wrong_shapes(self):
        with pytest.raises(NotBlowupShape):
            exceptional_rank_report(fermat(3, 2) + xs(2)[0] * xs(2)[1] ** 2, k=0)
        with pytest.raises(NotBlowupShape):
            exceptional_rank_report(fermat(4, 5), k=2)
        with pytest.raises(NotBlowupShape):
            exceptional_rank_report(surface_blowup(2), k=2, q=3)

    def test_other_point_is_moved(self):
        # exceptional class sitting at e_1 instead of e_0
        x = xs(2)
        H = x[1] ** 3 + 2 * x[0] ** 3
        assert exceptional_rank_report(H, ProjPoint([0, 1]), k=0).rank_exact == 1

    def test_diagonalize(self):
        x = xs(3)
        Q = x[0] * x[1] + x[1] * x[2]  # no diagonal entries at all
        P, d = _diagonalize_quadric(Q)
        from cupform.exactpoly import apply_change

        D = apply_change(Q, P)
        assert all(sum(1 for v in e if v) == 1 for e in D.terms)
        assert sum(1 for v in d if v) == 2


class TestCandidates:
    def test_fermat3(self):
        cs = candidate_exceptionals(fermat_phi(3, 3))
        assert cs.complete and [w.point for w in cs.points] == [ProjPoint.basis(3, i) for i in range(3)]
        doc = cs.to_json()
        assert doc["cap"] == 3 and len(doc["candidates"]) == 3

    def test_p1p3_has_none(self):
        cs = candidate_exceptionals(p1_p3(), starts=8)
        assert cs.points == [] and not cs.complete

    def test_blowup_point_contains_e0(self):
        rng = random.Random(3)
        for _ in range(5):
            FX = fermat(3, 2) + Form(2, 3, {(1, 2): rand_rational(rng, 5)})
            G = blowup_point(FX)
            cs = candidate_exceptionals(G, starts=6)
            assert ProjPoint.basis(3, 0) in {w.point for w in cs.points}
            assert len(cs.points) <= 3

    def test_dishonest(self):
        with pytest.raises(NotHonest):
            candidate_exceptionals(xs(2)[0] ** 3)
