"""Worked inputs shipped with the package, usable as regression fixtures."""

from fractions import Fraction

from cupform.exactpoly import Form, ProjPoint
from cupform.geometry import IntersectionData


def _x(k):
    return [Form.variable(k, i) for i in range(k)]


def degenerate_cubic():
    """``x0 x1^2/2 + x1 x3 x4 + x2 x3^2/2``: honest, with det H_F identically zero."""
    x = _x(5)
    return x[0] * x[1] ** 2 / 2 + x[1] * x[3] * x[4] + x[2] * x[3] ** 2 / 2


# its Hessian, rows of linear forms written as {variable: coefficient}
DEGENERATE_CUBIC_HESSIAN = [
    [{}, {1: 1}, {}, {}, {}],
    [{1: 1}, {0: 1}, {}, {4: 1}, {3: 1}],
    [{}, {}, {}, {3: 1}, {}],
    [{}, {4: 1}, {3: 1}, {2: 1}, {1: 1}],
    [{}, {3: 1}, {}, {1: 1}, {}],
]


def degenerate_cubic_hessian():
    return [[Form.linear([Fraction(e.get(i, 0)) for i in range(5)]) for e in row] for row in DEGENERATE_CUBIC_HESSIAN]


def conic_point(t):
    """Point of the conic ``x1 = x3 = x0 x2 - x4^2 = 0``, the rank-one locus of the cubic above."""
    t = Fraction(t)
    return ProjPoint([t * t, 0, 1, 0, t])


CONIC_PARAMETERS = (0, 1, -1, 2, Fraction(1, 2))

# points of {F = 0} off the conic (a couple) and generic points
CONIC_CONTROLS = (
    ProjPoint([1, 0, 1, 0, 0]),
    ProjPoint([0, 1, 0, 0, 0]),
    ProjPoint([1, 1, 1, 1, 1]),
    ProjPoint([0, 0, 0, 1, 0]),
    ProjPoint([2, 0, 1, 0, 1]),
)


def p1_p3():
    """Intersection data of P^1 x P^3 with the pulled-back hyperplane classes."""
    return IntersectionData(4, 2, {(1, 3): 1})


def curve_blowup(n, a):
    """``a/n! x0^n + x0^(n-1) x1/(n-1)! + x1^n``: blow-up of a curve when b2 = 1."""
    x = _x(2)
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    return Fraction(a) / fact * x[0] ** n + x[0] ** (n - 1) * x[1] / (fact // n) + x[1] ** n


CURVE_BLOWUP_A = (0, 1, -1, 5)


def fermat(n, k):
    return sum((v**n for v in _x(k)), Form.zero(k, n))


def fermat_phi(n, k):
    return IntersectionData(n, k, {tuple(n if j == i else 0 for j in range(k)): 1 for i in range(k)})


def surface_blowup(q, n=4, b=4, a=3, L=None):
    """A form with the shape ``a x0^n + x0^(n-1) L + x0^(n-2) Q + F_X``, Q of rank q.

    Q is deliberately not diagonal so the report has to diagonalize it.
    """
    x = _x(b + 1)
    if L is None:
        L = x[1] + 2 * x[b]
    # sum of squares of q independent combinations
    Q = Form.zero(b + 1, 2)
    for i in range(1, q + 1):
        lin = x[i] + x[i + 1] if i < q else x[i]
        Q = Q + lin**2
    FX = sum((x[i] ** n for i in range(1, b + 1)), Form.zero(b + 1, n)) + x[1] * x[2] ** (n - 1)
    return a * x[0] ** n + x[0] ** (n - 1) * L + x[0] ** (n - 2) * Q + FX


def paper_examples():
    """All shipped fixtures, keyed by a short name."""
    from cupform.exactpoly import form_to_json

    examples = {
        "degenerate_cubic": {"form": form_to_json(degenerate_cubic())},
        "conic_points": {"points": [[str(c) for c in conic_point(t).coords] for t in CONIC_PARAMETERS]},
        "p1_p3": {"phi": p1_p3().to_json()},
        "fermat3": {"phi": fermat_phi(3, 3).to_json()},
    }
    for n in (3, 4):
        for a in CURVE_BLOWUP_A:
            examples[f"curve_blowup_n{n}_a{a}"] = {"form": form_to_json(curve_blowup(n, a))}
    return examples
