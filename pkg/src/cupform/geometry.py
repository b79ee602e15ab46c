"""Intersection data, blow-up forms and candidate exceptional classes.

The degree-n form of a cohomology basis ``h_0..h_b`` is
``F = sum_m multinomial(n; m) * phi(h^m) * x^m``, i.e. ``F(x) = phi(x, ..., x)``
for the symmetric multilinear intersection pairing phi.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial

from cupform import linalg
from cupform.analysis import (
    WfPoint,
    hessian_at,
    is_wf_member,
    rank_one_by_minors,
    wf_search,
)
from cupform.errors import DegreeMismatch, DimensionMismatch, NotBlowupShape, VerificationFailure
from cupform.exactpoly import (
    Form,
    LinearChange,
    ProjPoint,
    apply_change,
    embed,
    form_from_json,
    form_to_json,
    format_rational,
    monomials,
    multinomial,
    parse_rational,
)
from cupform.tensor import (
    HyperTensor,
    flatten,
    flattening_lower_bound,
    is_rank_le_one,
    lemma_trick_bound,
    matrix_rank,
    rank_222,
    subtensor,
)


@dataclass
class IntersectionData:
    """``phi(h_0^{m_0} ... h_b^{m_b})`` for every monomial of degree n."""

    n: int
    basis_size: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, val in dict(self.values).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.basis_size:
                raise DimensionMismatch(f"monomial {mono} for a basis of size {self.basis_size}")
            if sum(mono) != self.n or any(e < 0 for e in mono):
                raise DegreeMismatch(f"monomial {mono} is not of degree {self.n}")
            val = Fraction(val)
            if val:
                clean[mono] = val
        self.values = clean

    def value(self, mono):
        return self.values.get(tuple(mono), Fraction(0))

    def multilinear(self, indices):
        """``phi(h_{i_1}, ..., h_{i_n})``."""
        e = [0] * self.basis_size
        for i in indices:
            e[i] += 1
        return self.value(e)

    def to_json(self):
        return {
            "n": self.n,
            "basis": self.basis_size,
            "values": [{"mono": list(m), "value": format_rational(v)} for m, v in sorted(self.values.items(), reverse=True)],
        }

    @classmethod
    def from_json(cls, doc):
        return cls(int(doc["n"]), int(doc["basis"]), {tuple(v["mono"]): parse_rational(v["value"]) for v in doc["values"]})


def form_from_intersection(phi):
    terms = {m: multinomial(m) * v for m, v in phi.values.items()}
    return Form(phi.basis_size, phi.n, terms)


def intersection_from_form(F):
    if F.degree < 1:
        raise DegreeMismatch("intersection data needs degree >= 1")
    return IntersectionData(F.degree, F.num_vars, {e: c / multinomial(e) for e, c in F.terms.items()})


def hessian_basis_identity_check(phi, i, F=None):
    """``H_F(e_i) == n! * [phi(h_i, h_j2, ..., h_jn)]``, entry by entry.

    ``F`` defaults to the form built from ``phi``; passing another form lets
    callers detect a mismatch between a form and its claimed data.
    """
    if F is None:
        F = form_from_intersection(phi)
    n, k = phi.n, phi.basis_size
    if not 0 <= i < k:
        raise DimensionMismatch(f"basis index {i} out of range")
    H = hessian_at(F, ProjPoint.basis(k, i))
    nf = factorial(n)
    for J in product(range(k), repeat=n - 1):
        if H[J] != nf * phi.multilinear((i,) + J):
            return False
    return True


@dataclass
class BlowupSpec:
    """Data of a blow-up along a centre of dimension k: ``a = E^n`` and R_1..R_{n-k}."""

    k: int
    a: Fraction
    R: list = field(default_factory=list)

    def to_json(self):
        return {"k": self.k, "a": format_rational(self.a), "R": [form_to_json(r) for r in self.R]}

    @classmethod
    def from_json(cls, doc):
        return cls(int(doc["k"]), parse_rational(doc["a"]), [form_from_json(r) for r in doc.get("R", [])])


def blowup_form(F_X, spec):
    """``a x0^n + sum_i x0^(n-i) R_i + F_X``, with the old variables shifted up by one."""
    n, b1 = F_X.degree, F_X.num_vars
    if not 0 <= spec.k < n:
        raise DegreeMismatch(f"centre dimension {spec.k} must satisfy 0 <= k < n = {n}")
    if len(spec.R) > n - spec.k:
        raise DegreeMismatch(f"at most n - k = {n - spec.k} forms R_i, got {len(spec.R)}")
    k_new = b1 + 1
    shift = list(range(1, k_new))
    x0 = Form.variable(k_new, 0)
    F_Y = embed(F_X, k_new, shift) + Form(k_new, n, {(n,) + (0,) * b1: spec.a})
    for i, R in enumerate(spec.R, start=1):
        if R.num_vars != b1:
            raise DimensionMismatch(f"R_{i} is in {R.num_vars} variables, F_X in {b1}")
        if R.degree != i and not R.is_zero():
            raise DegreeMismatch(f"R_{i} must have degree {i}, got {R.degree}")
        if R.is_zero():
            continue
        if i == n:
            # x0^0 R_n would be indistinguishable from F_X
            raise DegreeMismatch("R_n must vanish: a degree-n form without x0 belongs to F_X")
        F_Y = F_Y + x0 ** (n - i) * embed(R, k_new, shift)
    return F_Y


def default_point_self_intersection(n):
    """``E^n`` for the blow-up of a smooth point in dimension n: ``(-1)^(n-1)``."""
    return Fraction((-1) ** (n - 1))


def blowup_point(F_X, n=None, a=None):
    if n is None:
        n = F_X.degree
    if F_X.degree != n:
        raise DegreeMismatch(f"F_X has degree {F_X.degree}, expected {n}")
    if n < 2:
        raise DegreeMismatch("point blow-up needs n >= 2")
    if a is None:
        a = default_point_self_intersection(n)
    return blowup_form(F_X, BlowupSpec(0, Fraction(a), []))


def _diagonalize_quadric(Q):
    """Rational congruence ``P`` with ``Q(P y) = sum d_i y_i^2`` (d_i nonzero first).

    Returns ``(P, diag)``; symmetric Gaussian elimination over Q.
    """
    k = Q.num_vars
    S = [[Fraction(0)] * k for _ in range(k)]
    for e, c in Q.terms.items():
        idx = [i for i, v in enumerate(e) for _ in range(v)]
        i, j = idx
        if i == j:
            S[i][i] += c
        else:
            S[i][j] += c / 2
            S[j][i] += c / 2
    P = [[Fraction(int(r == s)) for s in range(k)] for r in range(k)]
    M = [row[:] for row in S]

    def congruence(T):
        # M <- T^t M T, P <- P T
        nonlocal M, P
        Tt = [list(r) for r in zip(*T)]
        M = linalg.matmul(Tt, linalg.matmul(M, T))
        P = linalg.matmul(P, T)

    for c in range(k):
        piv = next((r for r in range(c, k) if M[r][r] != 0), None)
        if piv is None:
            off = next(((r, s) for r in range(c, k) for s in range(r + 1, k) if M[r][s] != 0), None)
            if off is None:
                break
            r, s = off
            T = [[Fraction(int(u == v)) for v in range(k)] for u in range(k)]
            T[s][r] = Fraction(1)  # y_r -> y_r + y_s makes M[r][r] = 2 M[r][s] + ...
            congruence(T)
            if M[r][r] == 0:
                T = [[Fraction(int(u == v)) for v in range(k)] for u in range(k)]
                T[s][r] = Fraction(-2)
                congruence(T)
            piv = r
        if piv != c:
            T = [[Fraction(int(u == v)) for v in range(k)] for u in range(k)]
            T[c][c] = T[piv][piv] = Fraction(0)
            T[c][piv] = T[piv][c] = Fraction(1)
            congruence(T)
        T = [[Fraction(int(u == v)) for v in range(k)] for u in range(k)]
        for r in range(c + 1, k):
            T[c][r] = -M[c][r] / M[c][c]
        congruence(T)
    diag = [M[i][i] for i in range(k)]
    return P, diag


@dataclass
class ExceptionalRankReport:
    k: int
    rank_lower: int
    rank_exact: int | None
    certificate: dict
    caller_certified: bool = False

    def to_json(self):
        return {
            "k": self.k,
            "rank_lower": self.rank_lower,
            "rank_exact": self.rank_exact,
            "certificate": self.certificate,
            "caller_certified": self.caller_certified,
            "heuristic": self.caller_certified,
        }


def exceptional_rank_report(F_Y, p=None, k=0, q=None, samples=1000, seed=0):
    """Certify the rank of ``H_{F_Y}`` at the exceptional class (e_0 by default).

    k = 0: rank exactly 1. k = 1: lower bound 2 from the flattening containing
    the matrix ``(d_0^{n-3} d_i d_j F_Y(p))``. k = 2: lower bound 2q from the
    slice system ``A_h = (d_0^{n-4} d_h d_i d_j F_Y(p))``, h = 0..q, after
    diagonalizing the quadric coefficient of ``x0^{n-2}``.
    """
    n, nv = F_Y.degree, F_Y.num_vars
    if p is None:
        p = ProjPoint.basis(nv, 0)
    if not isinstance(p, ProjPoint):
        p = ProjPoint(p)
    if p != ProjPoint.basis(nv, 0):
        # move p to e_0 first
        cols = [list(p.coords)] + [list(ProjPoint.basis(nv, i).coords) for i in range(nv) if i != _first_nz(p)]
        A = LinearChange.from_columns(cols)
        F_Y = apply_change(F_Y, A)
        p = ProjPoint.basis(nv, 0)
    if k == 0:
        if n < 2:
            raise DegreeMismatch("k = 0 needs n >= 2")
        H = hessian_at(F_Y, p)
        member = is_wf_member(F_Y, p) if n >= 3 else None
        ok = (not H.is_zero()) and is_rank_le_one(H) and (n < 3 or member is not None)
        if not ok:
            raise NotBlowupShape("rank at the exceptional class is not 1: input is not a point blow-up form")
        return ExceptionalRankReport(0, 1, 1, {"kind": "rank_le_one_proof", "pure_power": member.certificate.to_json() if member else None})
    if k == 1:
        if n < 3:
            raise DegreeMismatch("k = 1 needs n >= 3")
        H = hessian_at(F_Y, p)
        face = subtensor(H, [(0,)] * (n - 3) + [tuple(range(nv))] * 2) if n > 3 else H
        face_rank = matrix_rank(HyperTensor(face.array.reshape(nv, nv)))
        lower = flattening_lower_bound(H)
        exact = rank_222(H) if H.shape == (2, 2, 2) else (lower if H.order == 2 else None)
        if face_rank < 2 or lower < 2:
            raise NotBlowupShape("no rank-2 face d_0^{n-3} d_i d_j: input is not a curve blow-up form")
        cert = {"kind": "flattening", "face_rank": face_rank, "flattening_bound": lower}
        return ExceptionalRankReport(1, max(lower, exact or 0), exact, cert)
    if k == 2:
        return _surface_report(F_Y, n, nv, q, samples, seed)
    raise ValueError("exceptional_rank_report supports k in {0, 1, 2}")


def _first_nz(p):
    return next(i for i, c in enumerate(p.coords) if c)


def _surface_report(F_Y, n, nv, q, samples, seed):
    if n < 4:
        raise DegreeMismatch("k = 2 needs n >= 4")
    # quadric Q(x1..xb): coefficient of x0^(n-2), rescaled to the x0^(n-2)/(2(n-2)!) convention
    Qterms = {}
    for e, c in F_Y.terms.items():
        if e[0] == n - 2:
            Qterms[e[1:]] = c
    b = nv - 1
    Q = Form(b, 2, Qterms)
    P, diag = _diagonalize_quadric(Q)
    q_found = sum(1 for d in diag if d != 0)
    if q is not None and q != q_found:
        raise NotBlowupShape(f"quadric has rank {q_found}, caller claimed {q}")
    q = q_found
    if q < 1:
        raise NotBlowupShape("quadric coefficient of x0^(n-2) vanishes: not a surface blow-up form")
    # extend the congruence by x0 -> x0
    full = [[Fraction(int(r == s == 0)) for s in range(nv)] for r in range(nv)]
    for r in range(b):
        for s in range(b):
            full[r + 1][s + 1] = P[r][s]
    G = apply_change(F_Y, LinearChange(full))
    H = hessian_at(G, ProjPoint.basis(nv, 0))
    lead = (0,) * (n - 4)
    slices = [[[H[lead + (h, i, j)] for j in range(nv)] for i in range(nv)] for h in range(q + 1)]
    minor = (tuple(range(1, q + 1)), tuple(range(1, q + 1)))
    bounds = lemma_trick_bound(slices, t=q, justification="prop52_quadric_block", minor=minor, samples=samples, seed=seed)
    cert = dict(bounds.lower_certificate)
    cert["quadric_rank"] = q
    cert["diagonal"] = [format_rational(d) for d in diag]
    if bounds.lower < 2 * q:
        raise NotBlowupShape("slice bound below 2q")
    return ExceptionalRankReport(2, bounds.lower, None, cert, bounds.caller_certified)


@dataclass
class CandidateSet:
    points: list
    cap: int
    complete: bool
    numeric_candidates: list = field(default_factory=list)

    def to_json(self):
        return {
            "cap": self.cap,
            "complete": self.complete,
            "heuristic": not self.complete,
            "candidates": [w.to_json() for w in self.points],
            "numeric_candidates": self.numeric_candidates,
        }


def candidate_exceptionals(phi_or_F, seed=0, starts=24, rat_depth=10**6, numeric=True):
    """Classes e with ``e^n != 0`` and ``rank H_F(e) = 1``: the possible exceptional
    divisors of divisorial contractions to a point."""
    F = form_from_intersection(phi_or_F) if isinstance(phi_or_F, IntersectionData) else phi_or_F
    res = wf_search(F, seed=seed, starts=starts, rat_depth=rat_depth, numeric=numeric)
    pts = [w for w in res.certified_points if w.f_value != 0]
    if len(pts) > F.num_vars:
        raise VerificationFailure("candidate count exceeds b+1")
    for w in pts:
        if not rank_one_by_minors(F, w.point):
            raise VerificationFailure("candidate failed the minor cross-check")
    numeric_nv = [c for c in res.numeric_candidates]
    return CandidateSet(pts, F.num_vars, res.complete, numeric_nv)


__all__ = [
    "BlowupSpec",
    "CandidateSet",
    "ExceptionalRankReport",
    "IntersectionData",
    "WfPoint",
    "blowup_form",
    "blowup_point",
    "candidate_exceptionals",
    "default_point_self_intersection",
    "exceptional_rank_report",
    "form_from_intersection",
    "hessian_basis_identity_check",
    "intersection_from_form",
    "monomials",
]
