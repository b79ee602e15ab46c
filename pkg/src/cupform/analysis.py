"""The derivative hypermatrix H_F of a form and the locus of its rank-one points.

``H_F`` is the order-(n-1) symmetric array of all (n-1)-th partial derivatives
of a degree-n form F; its entries are linear forms. ``W_F`` is the set of
projective points p with ``rank H_F(p) = 1``.

Rank one at p is tested through the identity ``H_F(p) = full derivative
tensor of D_p F``: a symmetric tensor has rank one exactly when the
underlying form is a pure power, so ``p in W_F`` iff ``D_p F = c * l^(n-1)``.
The same ``l`` drives the normal-form reductions.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial, gcd, lcm, prod

import numpy as np

from cupform import linalg, search
from cupform.errors import (
    DegreeTooLow,
    DimensionMismatch,
    NotCertified,
    NotHonest,
    VerificationFailure,
)
from cupform.exactpoly import (
    Form,
    LinearChange,
    ProjPoint,
    apply_change,
    directional_derivative,
    evaluate,
    format_rational,
    iterated_partial,
    partial_derivative,
    point_to_json,
    restrict,
)
from cupform.tensor import HyperTensor, cayley_hyperdet_222, is_rank_le_one

log = logging.getLogger(__name__)


def _require_degree(F, n_min, what):
    if F.degree < n_min:
        raise DegreeTooLow(f"{what} needs degree >= {n_min}, got {F.degree}")


def symmetric_entry_fn(F):
    """``value(J)`` = the constant ``d_J F`` for a sorted multi-index J of size n."""
    n = F.num_vars

    @lru_cache(maxsize=None)
    def value(J):
        e = [0] * n
        for i in J:
            e[i] += 1
        return F.coefficient(e) * prod(factorial(k) for k in e)

    return value


def _symmetric_array(nvars, order, value):
    a = np.empty((nvars,) * order, dtype=object)
    for idx in product(range(nvars), repeat=order):
        a[idx] = value(tuple(sorted(idx)))
    return a


def coeff_tensor(F):
    """Order-n symmetric tensor of the (constant) n-th partial derivatives."""
    _require_degree(F, 2, "coeff_tensor")
    return HyperTensor(_symmetric_array(F.num_vars, F.degree, symmetric_entry_fn(F)))


def hessian_at(F, p):
    """``H_F(p)``: the order-(n-1) tensor of ``d_J F`` evaluated at p."""
    _require_degree(F, 2, "hessian_at")
    coords = p.coords if isinstance(p, ProjPoint) else tuple(Fraction(c) for c in p)
    if len(coords) != F.num_vars:
        raise DimensionMismatch(f"point of length {len(coords)} for a form in {F.num_vars} variables")
    value = symmetric_entry_fn(F)
    nz = [(i, c) for i, c in enumerate(coords) if c]

    @lru_cache(maxsize=None)
    def contracted(J):
        return sum((c * value(tuple(sorted(J + (i,)))) for i, c in nz), Fraction(0))

    return HyperTensor(_symmetric_array(F.num_vars, F.degree - 1, contracted))


def hessian_symbolic(F):
    """Order-(n-1) numpy object array whose entry at J is the linear form ``d_J F``."""
    _require_degree(F, 3, "hessian_symbolic")
    cache = {}

    def entry(J):
        if J not in cache:
            cache[J] = iterated_partial(F, J)
        return cache[J]

    a = _symmetric_array(F.num_vars, F.degree - 1, entry)
    a.flags.writeable = False
    return a


def symbolic_to_json(a):
    from cupform.exactpoly import form_to_json

    def conv(x):
        if isinstance(x, np.ndarray):
            return [conv(y) for y in x]
        return {"text": str(x), "form": form_to_json(x)}

    return conv(a)


def form_determinant(rows):
    """Determinant of a square matrix of Forms by memoized Laplace expansion."""
    n = len(rows)
    nvars = rows[0][0].num_vars

    @lru_cache(maxsize=None)
    def minor(r, cols):
        if r == n:
            return Form.constant(nvars, 1)
        total = None
        for k, c in enumerate(cols):
            entry = rows[r][c]
            if not entry:
                continue
            rest = minor(r + 1, cols[:k] + cols[k + 1:])
            if not rest:
                continue
            term = entry * rest
            if k % 2:
                term = -term
            total = term if total is None else total + term
        return total if total is not None else Form.zero(nvars, 0)

    return minor(0, tuple(range(n)))


@dataclass
class HonestyReport:
    honest: bool
    witness: ProjPoint | None = None

    def to_json(self):
        doc = {"honest": self.honest}
        if self.witness is not None:
            doc["witness"] = point_to_json(self.witness)
        return doc


def honest(F):
    """Decide whether ``H_F(v) != 0`` for every nonzero v.

    ``H_F(v) = 0`` iff ``D_v F = 0``, and v -> coefficients of ``D_v F`` is a
    rational linear map, so a rational kernel vector decides the question.
    """
    _require_degree(F, 2, "honest")
    derivs = [partial_derivative(F, i).coefficient_vector() for i in range(F.num_vars)]
    rows = [list(r) for r in zip(*derivs)]
    kernel = linalg.nullspace(rows, F.num_vars)
    if not kernel:
        return HonestyReport(True)
    return HonestyReport(False, ProjPoint(kernel[0]).canonical())


@dataclass
class NondegeneracyReport:
    status: str  # "yes", "no" or "inconclusive"
    witness: ProjPoint | None = None
    certificate: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        doc = {"status": self.status, "heuristic": self.status == "inconclusive"}
        if self.witness is not None:
            doc["witness"] = point_to_json(self.witness)
        if self.certificate:
            doc["certificate"] = self.certificate
        if self.diagnostics:
            doc["diagnostics"] = self.diagnostics
        return doc


def _grid_witness(P, nvars):
    # a nonzero polynomial of degree d cannot vanish on all of S^nvars when |S| > d
    size = P.degree + 1
    for v in product(range(size), repeat=nvars):
        if any(v) and evaluate(P, v) != 0:
            return ProjPoint(v)
    raise VerificationFailure("nonzero polynomial vanished on a full grid")


def nondegenerate(F):
    """Is ``det H_F(v) != 0`` for some nonzero v?

    Exact for cubics (matrix determinant), for quartics in two variables
    (Cayley's 2x2x2 hyperdeterminant) and for one variable; otherwise
    ``inconclusive``.
    """
    _require_degree(F, 3, "nondegenerate")
    H = hessian_symbolic(F)
    k = F.num_vars
    if F.degree == 3:
        D = form_determinant([list(r) for r in H])
        kind = "matrix_determinant"
    elif k == 2 and F.degree == 4:
        D = cayley_hyperdet_222(H)
        kind = "cayley_hyperdeterminant"
    elif k == 1:
        # a 1 x ... x 1 hypermatrix is its own hyperdeterminant
        D = H[(0,) * (F.degree - 1)]
        kind = "single_entry"
    else:
        return NondegeneracyReport(
            "inconclusive",
            diagnostics={"reason": f"no exact hyperdeterminant for format {k}^(x{F.degree - 1})"},
        )
    if D.is_zero():
        return NondegeneracyReport("no", certificate={"kind": kind, "identically_zero": True})
    w = _grid_witness(D, k)
    return NondegeneracyReport(
        "yes",
        witness=w,
        certificate={"kind": kind, "value_at_witness": format_rational(evaluate(D, w)), "polynomial": str(D)},
    )


def _primitive(vec):
    """Scale a nonzero rational vector to coprime integers, first nonzero positive."""
    vec = [Fraction(v) for v in vec]
    m = lcm(*(v.denominator for v in vec))
    ints = [int(v * m) for v in vec]
    g = 0
    for a in ints:
        g = gcd(g, a)
    ints = [a // g for a in ints]
    if next(a for a in ints if a) < 0:
        ints = [-a for a in ints]
    return [Fraction(a) for a in ints]


@dataclass
class PurePowerResult:
    is_pure: bool
    c: Fraction = Fraction(0)
    ell: tuple = ()

    def linear_form(self):
        return Form.linear(list(self.ell))

    def to_json(self):
        return {
            "is_pure": self.is_pure,
            "c": format_rational(self.c),
            "ell": [format_rational(x) for x in self.ell],
        }


def _pure_root(G):
    d = G.degree
    if d == 1:
        return _primitive(G.linear_coeffs())
    i = next(i for i in range(G.num_vars) if G.involves(i))
    sub = _pure_root(partial_derivative(G, i))
    if sub is None:
        return None
    j = next(t for t, v in enumerate(sub) if v)
    e = [0] * G.num_vars
    e[j] = d
    c = G.coefficient(e) / sub[j] ** d
    if not c:
        return None
    if Form.linear(sub) ** d * c != G:
        return None
    return sub


def pure_power_test(G):
    """Decide exactly whether ``G = c * l^d`` with l a linear form and c != 0.

    ``l`` is returned as a primitive integer vector (coprime entries, first
    nonzero positive), which fixes the scaling ambiguity.
    """
    _require_degree(G, 1, "pure_power_test")
    if G.is_zero():
        return PurePowerResult(False)
    ell = _pure_root(G)
    if ell is None:
        return PurePowerResult(False)
    j = next(t for t, v in enumerate(ell) if v)
    e = [0] * G.num_vars
    e[j] = G.degree
    c = G.coefficient(e) / ell[j] ** G.degree
    return PurePowerResult(True, c, tuple(ell))


@dataclass
class WfPoint:
    point: ProjPoint
    f_value: Fraction
    certificate: PurePowerResult

    @property
    def vanishing(self):
        return self.f_value == 0

    def to_json(self):
        return {
            "point": point_to_json(self.point),
            "f_value": format_rational(self.f_value),
            "c": format_rational(self.certificate.c),
            "ell": [format_rational(x) for x in self.certificate.ell],
        }


def is_wf_member(F, p):
    """Certified membership of p in W_F, or None."""
    _require_degree(F, 3, "is_wf_member")
    if not isinstance(p, ProjPoint):
        p = ProjPoint(p)
    if p.dim != F.num_vars:
        raise DimensionMismatch(f"point of length {p.dim} for a form in {F.num_vars} variables")
    D = directional_derivative(F, p)
    if D.is_zero():
        return None
    cert = pure_power_test(D)
    if not cert.is_pure:
        return None
    return WfPoint(p, evaluate(F, p), cert)


def rank_one_by_minors(F, p):
    """Independent check: ``H_F(p)`` nonzero with every flattening of rank <= 1."""
    H = hessian_at(F, p)
    return (not H.is_zero()) and is_rank_le_one(H)


@dataclass
class NormalFormResult:
    case: str  # "nonvanishing" or "vanishing"
    change: LinearChange
    residual: Form
    leading_scalar: Fraction
    transformed: Form
    refined: bool = False

    def to_json(self):
        from cupform.exactpoly import change_to_json, form_to_json

        return {
            "case": self.case,
            "change_matrix": change_to_json(self.change)["matrix"],
            "leading_scalar": format_rational(self.leading_scalar),
            "residual_form": form_to_json(self.residual),
            "transformed_form": form_to_json(self.transformed),
            "refined": self.refined,
        }


def _kernel_basis(ell, j):
    """Basis ``e_i - (l_i / l_j) e_j`` (i != j) of the hyperplane ``l = 0``."""
    k = len(ell)
    out = []
    for i in range(k):
        if i == j:
            continue
        v = [Fraction(0)] * k
        v[i] = Fraction(1)
        v[j] = -Fraction(ell[i]) / ell[j]
        out.append((i, v))
    return out


def _mono(k, **exps):
    e = [0] * k
    for key, val in exps.items():
        e[int(key[1:])] = val
    return tuple(e)


def normal_form_at(F, wp, refine=True):
    """Coordinates placing a certified rank-one point at e_0 in normal form.

    Nonvanishing case: ``F(A y) = F(p) y0^n + G(y1..yb)``.
    Vanishing case: ``F(A y) = c y0 y1^(n-1) + G(y1..yb)``; with ``refine``
    the substitution ``y0 -> y0 - T/c`` also clears every monomial of G with
    ``y1``-degree >= n - 1, so ``G = y1 H + R`` with ``deg_{y1} H <= n - 3``.
    The result is re-expanded and checked before it is returned.
    """
    if not isinstance(wp, WfPoint):
        raise NotCertified("normal_form_at needs a certified WfPoint")
    again = is_wf_member(F, wp.point)
    if again is None:
        raise NotCertified("point is not in W_F")
    n, k = F.degree, F.num_vars
    p = list(wp.point.coords)
    ell = list(again.certificate.ell)
    c = again.certificate.c
    j = next(t for t, v in enumerate(ell) if v)
    lp = sum(a * b for a, b in zip(ell, p))
    kernel = _kernel_basis(ell, j)
    if wp.f_value != 0:
        cols = [p] + [v for _, v in kernel]
        A = LinearChange.from_columns(cols)
        Fp = apply_change(F, A)
        lead = Fp.coefficient(_mono(k, x0=n))
        G = Fp - Form(k, n, {_mono(k, x0=n): lead})
        if lead != wp.f_value or any(e[0] for e in G.terms):
            raise VerificationFailure("nonvanishing normal form failed its expansion check")
        return NormalFormResult("nonvanishing", A, G, lead, Fp)

    if lp != 0:
        raise VerificationFailure("l(p) must vanish when F(p) = 0")
    # basis of ker l containing p: swap p in for a kernel vector it depends on
    m = next(i for i, _ in kernel if p[i] != 0)
    rest = [v for i, v in kernel if i != m]
    u = [Fraction(0)] * k
    u[j] = 1 / Fraction(ell[j])
    A = LinearChange.from_columns([p, u] + rest)
    Fp = apply_change(F, A)
    lead_mono = (1, n - 1) + (0,) * (k - 2)
    lead = Fp.coefficient(lead_mono)
    if lead != c:
        raise VerificationFailure("vanishing normal form: leading coefficient mismatch")
    refined = False
    if refine and k >= 2:
        # T = sum of G's terms with y1-degree >= n-1, divided by y1^(n-1)
        T = {}
        for e, coef in Fp.terms.items():
            if e[0] == 0 and e[1] >= n - 1:
                ne = list(e)
                ne[1] -= n - 1
                T[tuple(ne)] = coef
        if T:
            t_coeffs = Form(k, 1, T).linear_coeffs()
            rows = [[Fraction(int(r == s)) for s in range(k)] for r in range(k)]
            for s in range(k):
                rows[0][s] -= t_coeffs[s] / lead
            B = LinearChange(rows)
            A = A @ B
            Fp = apply_change(F, A)
            refined = True
    G = Fp - Form(k, n, {lead_mono: lead})
    if Fp.coefficient(lead_mono) != lead or any(e[0] for e in G.terms):
        raise VerificationFailure("vanishing normal form failed its expansion check")
    if refined and any(e[1] >= n - 1 for e in G.terms):
        raise VerificationFailure("refined normal form still has y1-degree >= n-1 terms")
    return NormalFormResult("vanishing", A, G, lead, Fp, refined)


def _candidate_directions(k):
    seen = set()
    for i in range(k):
        p = ProjPoint.basis(k, i)
        seen.add(p)
        yield p
    for v in product((0, 1, -1), repeat=k):
        if any(v):
            p = ProjPoint(v)
            if p not in seen:
                seen.add(p)
                yield p


def peel(F, extra_candidates=()):
    """Exact rational points of ``W_F`` off ``{F = 0}``, found by repeated splitting.

    Each hit p gives ``F = F(p) y0^n + G(y1..yb)`` after a change of
    coordinates; the remaining such points lie in ``{y0 = 0}`` and are points
    of ``W_G``, so the search recurses on G and lifts its hits back.
    """
    _require_degree(F, 3, "peel")
    rep = honest(F)
    if not rep.honest:
        raise NotHonest("peel needs an honest form", rep.witness)
    found = _peel(F, list(extra_candidates))
    if len(found) > F.num_vars:
        raise VerificationFailure("more than b+1 nonvanishing rank-one points")
    return found


def _peel(F, extra):
    k = F.num_vars
    for p in list(extra) + list(_candidate_directions(k)):
        if p.dim != k or evaluate(F, p) == 0:
            continue
        wp = is_wf_member(F, p)
        if wp is None:
            continue
        nf = normal_form_at(F, wp)
        out = [WfPoint(wp.point.canonical(), evaluate(F, wp.point.canonical()), wp.certificate)]
        if k == 1:
            return out
        G = restrict(nf.residual, range(1, k))
        for q in _peel(G, []):
            lifted = nf.change.apply_to(ProjPoint((Fraction(0),) + q.point.coords)).canonical()
            cert = is_wf_member(F, lifted)
            if cert is None or cert.f_value == 0:
                raise VerificationFailure("lifted peel point failed certification")
            out.append(cert)
        return out
    return []


@dataclass
class WfSearchResult:
    certified_points: list
    complete: bool
    numeric_candidates: list = field(default_factory=list)
    cap: int = 0

    @property
    def nonvanishing(self):
        return [w for w in self.certified_points if w.f_value != 0]

    def to_json(self):
        return {
            "certified_points": [w.to_json() for w in self.certified_points],
            "complete": self.complete,
            "heuristic": not self.complete,
            "cap": self.cap,
            "numeric_candidates": self.numeric_candidates,
        }


def _sort_points(points):
    return sorted(points, key=lambda w: w.point.sort_key(), reverse=True)


def wf_search(F, seed=0, starts=24, rat_depth=10**6, tol=1e-20, initial_points=(), numeric=True):
    """Locate and certify points of W_F.

    Exact peeling finds rational points off ``{F = 0}``; multistart least
    squares on the 2x2 minors of ``H_F(p)`` proposes further points, which
    are rationalized and certified exactly. ``complete`` is true only when
    b+1 certified points off ``{F = 0}`` exist, the most there can be.
    """
    _require_degree(F, 3, "wf_search")
    rep = honest(F)
    if not rep.honest:
        raise NotHonest("wf_search needs an honest form", rep.witness)
    k = F.num_vars
    found = {}
    for w in peel(F):
        found[w.point] = w
    numeric_only = []
    if numeric and k >= 2:
        C = search.flattening_coefficients(F)
        pts = search.multistart(F, seed=seed, starts=starts, tol=tol, initial_points=initial_points)
        for x, cost in pts:
            got = search.certify_near(F, x, lambda q: is_wf_member(F, q), C=C, max_den=rat_depth)
            if got is None:
                numeric_only.append({"point": [float(f"{v:.12g}") for v in x], "residual": float(f"{cost:.3g}")})
                continue
            canon = got.point.canonical()
            if canon not in found:
                found[canon] = WfPoint(canon, evaluate(F, canon), got.certificate)
    points = _sort_points(found.values())
    nonvan = [w for w in points if w.f_value != 0]
    if len(nonvan) > k:
        raise VerificationFailure(f"{len(nonvan)} nonvanishing rank-one points exceed the cap {k}")
    numeric_only = _dedupe_numeric(numeric_only)
    return WfSearchResult(points, len(nonvan) == k, numeric_only, k)


def _dedupe_numeric(items):
    out = []
    for it in items:
        x = np.array(it["point"])
        if any(min(np.linalg.norm(x - np.array(o["point"])), np.linalg.norm(x + np.array(o["point"]))) < 1e-6 for o in out):
            continue
        out.append(it)
    return out
