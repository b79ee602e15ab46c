"""Exact homogeneous polynomials over Q and linear changes of coordinates.

A :class:`Form` is a homogeneous polynomial in ``num_vars`` variables
``x0, ..., x_{num_vars-1}`` with :class:`fractions.Fraction` coefficients,
stored as a dict from exponent tuples to nonzero coefficients. Monomials are
ordered graded-lexicographically (``x0^n`` first) wherever an order is
observable: iteration, printing and serialization.
"""

from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from types import MappingProxyType

from cupform import linalg
from cupform.errors import (
    DegreeMismatch,
    DimensionMismatch,
    IndexOutOfRange,
    SingularMatrix,
    ZeroVector,
)


def parse_rational(value):
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction. Floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not an exact fraction string: {value!r}")
        return Fraction(s)
    raise TypeError(f"cannot read {type(value).__name__} as an exact rational")


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def monomials(num_vars, degree):
    """Exponent tuples of total ``degree`` in graded-lex order (``x0^d`` first)."""
    out = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        e = [0] * num_vars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def multinomial(exps):
    n = factorial(sum(exps))
    for e in exps:
        n //= factorial(e)
    return n


def _mono_key(exps):
    return tuple(-e for e in exps)


class Form:
    """Homogeneous polynomial with exact rational coefficients. Immutable."""

    __slots__ = ("_nvars", "_degree", "_terms", "_hash")

    def __init__(self, num_vars, degree, terms=()):
        if num_vars < 1:
            raise ValueError("a form needs at least one variable")
        if degree < 0:
            raise ValueError("degree must be non-negative")
        items = terms.items() if hasattr(terms, "items") else terms
        clean = {}
        for exps, coef in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise DimensionMismatch(f"monomial {exps} has {len(exps)} exponents, expected {num_vars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if sum(exps) != degree:
                raise DegreeMismatch(f"monomial {exps} is not of degree {degree}")
            coef = Fraction(coef)
            if coef:
                clean[exps] = clean.get(exps, Fraction(0)) + coef
                if not clean[exps]:
                    del clean[exps]
        self._nvars = num_vars
        self._degree = degree
        self._terms = dict(sorted(clean.items(), key=lambda kv: _mono_key(kv[0])))
        self._hash = None

    @classmethod
    def _raw(cls, num_vars, degree, terms):
        # terms already validated and free of zeros
        obj = cls.__new__(cls)
        obj._nvars = num_vars
        obj._degree = degree
        obj._terms = dict(sorted(terms.items(), key=lambda kv: _mono_key(kv[0])))
        obj._hash = None
        return obj

    # construction helpers

    @classmethod
    def zero(cls, num_vars, degree):
        return cls._raw(num_vars, degree, {})

    @classmethod
    def constant(cls, num_vars, value):
        return cls(num_vars, 0, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars, i):
        if not 0 <= i < num_vars:
            raise IndexOutOfRange(f"variable index {i} out of range for {num_vars} variables")
        e = [0] * num_vars
        e[i] = 1
        return cls(num_vars, 1, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, 1, terms)

    # accessors

    @property
    def num_vars(self):
        return self._nvars

    @property
    def degree(self):
        return self._degree

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def involves(self, i):
        return any(e[i] for e in self._terms)

    def variable_degree(self, i):
        return max((e[i] for e in self._terms), default=0)

    def linear_coeffs(self):
        """Coefficient vector of a degree-1 form."""
        if self._degree != 1:
            raise DegreeMismatch("linear_coeffs needs a degree-1 form")
        return [self._terms.get(tuple(int(j == i) for j in range(self._nvars)), Fraction(0)) for i in range(self._nvars)]

    def coefficient_vector(self):
        """Coefficients on the full graded-lex monomial basis of this degree."""
        return [self._terms.get(m, Fraction(0)) for m in monomials(self._nvars, self._degree)]

    # arithmetic

    def _check_compatible(self, other):
        if other._nvars != self._nvars:
            raise DimensionMismatch(f"forms in {self._nvars} and {other._nvars} variables")
        if other._degree != self._degree:
            if not self._terms:
                return other
            if not other._terms:
                return self
            raise DegreeMismatch(f"cannot add forms of degree {self._degree} and {other._degree}")
        return None

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, Form):
            return NotImplemented
        shortcut = self._check_compatible(other)
        if shortcut is not None:
            return shortcut
        terms = dict(self._terms)
        for e, c in other._terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Form._raw(self._nvars, self._degree, terms)

    __radd__ = __add__

    def __neg__(self):
        return Form._raw(self._nvars, self._degree, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, int) and other == 0:
            return -self
        return NotImplemented

    def scale(self, s):
        s = Fraction(s)
        if not s:
            return Form.zero(self._nvars, self._degree)
        return Form._raw(self._nvars, self._degree, {e: c * s for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Form):
            return NotImplemented
        if other._nvars != self._nvars:
            raise DimensionMismatch(f"forms in {self._nvars} and {other._nvars} variables")
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Form._raw(self._nvars, self._degree + other._degree, {e: c for e, c in terms.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative int")
        result = Form.constant(self._nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, Form):
            return NotImplemented
        if self._nvars != other._nvars:
            return False
        if self._terms != other._terms:
            return False
        return self._degree == other._degree or not self._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._nvars, self._degree if self._terms else None, tuple(self._terms.items())))
        return self._hash

    def __call__(self, point):
        return evaluate(self, point)

    def __repr__(self):
        return f"Form({self._nvars}, {self._degree}, {str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k)
            num, den = abs(c.numerator), c.denominator
            sign = "-" if c < 0 else "+"
            if not mono:
                body = format_rational(abs(c))
            elif num == 1 and den == 1:
                body = mono
            elif num == 1:
                body = f"{mono}/{den}"
            elif den == 1:
                body = f"{num}*{mono}"
            else:
                body = f"{num}*{mono}/{den}"
            parts.append((sign, body))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return " ".join([head] + [f"{s} {b}" for s, b in parts[1:]])


class ProjPoint:
    """A point of projective space given by a nonzero rational representative.

    Equality and hashing are projective: representatives differing by a
    nonzero scalar compare equal.
    """

    __slots__ = ("coords", "_canon")

    def __init__(self, coords):
        coords = tuple(Fraction(c) for c in coords)
        if not coords:
            raise ValueError("empty coordinate vector")
        if not any(coords):
            raise ZeroVector("the zero vector is not a projective point")
        self.coords = coords
        first = next(c for c in coords if c)
        self._canon = tuple(c / first for c in coords)

    @classmethod
    def basis(cls, dim, i):
        if not 0 <= i < dim:
            raise IndexOutOfRange(f"basis index {i} out of range for dimension {dim}")
        return cls([int(j == i) for j in range(dim)])

    def canonical(self):
        """Representative whose first nonzero coordinate is 1."""
        return ProjPoint(self._canon)

    @property
    def dim(self):
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self._canon == other._canon

    def __hash__(self):
        return hash(self._canon)

    def sort_key(self):
        return self._canon

    def __repr__(self):
        return "ProjPoint([" + ", ".join(format_rational(c) for c in self.coords) + "])"


class LinearChange:
    """Invertible square rational matrix acting by ``x = A y``."""

    __slots__ = ("matrix", "_inv")

    def __init__(self, matrix):
        rows = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("a linear change needs a non-empty square matrix")
        if linalg.det(rows) == 0:
            raise SingularMatrix("linear change of coordinates must be invertible")
        self.matrix = rows
        self._inv = None

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns):
        return cls([list(r) for r in zip(*columns)])

    @property
    def size(self):
        return len(self.matrix)

    def columns(self):
        return [list(c) for c in zip(*self.matrix)]

    def inverse(self):
        if self._inv is None:
            self._inv = LinearChange(linalg.inverse(self.matrix))
        return self._inv

    def __matmul__(self, other):
        if not isinstance(other, LinearChange):
            return NotImplemented
        if other.size != self.size:
            raise DimensionMismatch("composing changes of different sizes")
        return LinearChange(linalg.matmul(self.matrix, other.matrix))

    def apply_to(self, v):
        """``A v`` for a coordinate vector or ProjPoint."""
        coords = v.coords if isinstance(v, ProjPoint) else v
        if len(coords) != self.size:
            raise DimensionMismatch(f"vector of length {len(coords)} for a {self.size}x{self.size} change")
        out = linalg.matvec(self.matrix, coords)
        return ProjPoint(out) if isinstance(v, ProjPoint) else out

    def __eq__(self, other):
        return isinstance(other, LinearChange) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"LinearChange({[[format_rational(x) for x in r] for r in self.matrix]})"


def _coords(p):
    return p.coords if isinstance(p, ProjPoint) else tuple(Fraction(c) for c in p)


def partial_derivative(F, i):
    """``d F / d x_i``; the zero form of degree ``n - 1`` (or 0 when n = 0)."""
    if not 0 <= i < F.num_vars:
        raise IndexOutOfRange(f"variable index {i} out of range for {F.num_vars} variables")
    new_deg = max(F.degree - 1, 0)
    terms = {}
    for e, c in F.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
    return Form._raw(F.num_vars, new_deg, terms)


def iterated_partial(F, indices):
    """Mixed partial derivative along the multi-index ``indices``.

    Computed in one pass from exponent counts, so the result is manifestly
    independent of the order of ``indices``.
    """
    counts = [0] * F.num_vars
    for i in indices:
        if not 0 <= i < F.num_vars:
            raise IndexOutOfRange(f"variable index {i} out of range for {F.num_vars} variables")
        counts[i] += 1
    k = len(indices)
    if k > F.degree:
        return Form.zero(F.num_vars, 0)
    terms = {}
    for e, c in F.terms.items():
        factor = 1
        for ei, ki in zip(e, counts):
            if ei < ki:
                factor = 0
                break
            for t in range(ki):
                factor *= ei - t
        if factor:
            terms[tuple(ei - ki for ei, ki in zip(e, counts))] = c * factor
    return Form._raw(F.num_vars, F.degree - k, terms)


def evaluate(F, p):
    """Exact value of F at the given affine representative."""
    x = _coords(p)
    if len(x) != F.num_vars:
        raise DimensionMismatch(f"point of length {len(x)} for a form in {F.num_vars} variables")
    total = Fraction(0)
    for e, c in F.terms.items():
        term = c
        for xi, ei in zip(x, e):
            if ei:
                term *= xi**ei
                if not term:
                    break
        total += term
    return total


def directional_derivative(F, v):
    """``D_v F = sum_i v_i dF/dx_i``."""
    x = _coords(v)
    if len(x) != F.num_vars:
        raise DimensionMismatch(f"direction of length {len(x)} for a form in {F.num_vars} variables")
    terms = {}
    for e, c in F.terms.items():
        for i, ei in enumerate(e):
            if ei and x[i]:
                ne = list(e)
                ne[i] -= 1
                ne = tuple(ne)
                terms[ne] = terms.get(ne, 0) + c * ei * x[i]
    return Form._raw(F.num_vars, max(F.degree - 1, 0), {e: c for e, c in terms.items() if c})


def apply_change(F, A):
    """Return ``F(A y)``: substitute ``x_i = sum_j A[i][j] y_j``."""
    if not isinstance(A, LinearChange):
        A = LinearChange(A)
    if A.size != F.num_vars:
        raise DimensionMismatch(f"{A.size}x{A.size} change for a form in {F.num_vars} variables")
    n = F.num_vars
    images = [Form.linear(A.matrix[i]) for i in range(n)]
    powers = [[Form.constant(n, 1)] for _ in range(n)]

    def power(i, k):
        cache = powers[i]
        while len(cache) <= k:
            cache.append(cache[-1] * images[i])
        return cache[k]

    result = Form.zero(n, F.degree)
    for e, c in F.terms.items():
        term = Form.constant(n, c)
        for i, ei in enumerate(e):
            if ei:
                term = term * power(i, ei)
        result = result + term
    return result


def restrict(F, keep):
    """Drop the variables not in ``keep``; F must not involve them."""
    keep = list(keep)
    for e in F.terms:
        if any(e[i] for i in range(F.num_vars) if i not in keep):
            raise ValueError("form involves a dropped variable")
    return Form(len(keep), F.degree, {tuple(e[i] for i in keep): c for e, c in F.terms.items()})


def embed(F, num_vars, positions):
    """Place F's variables at ``positions`` inside a form in ``num_vars`` variables."""
    if len(positions) != F.num_vars:
        raise DimensionMismatch("one position per variable required")
    terms = {}
    for e, c in F.terms.items():
        ne = [0] * num_vars
        for i, k in zip(positions, e):
            ne[i] = k
        terms[tuple(ne)] = c
    return Form(num_vars, F.degree, terms)


def form_to_json(F):
    return {
        "vars": F.num_vars,
        "degree": F.degree,
        "terms": [{"exps": list(e), "coef": format_rational(c)} for e, c in F.terms.items()],
    }


def form_from_json(doc):
    return Form(
        int(doc["vars"]),
        int(doc["degree"]),
        [(t["exps"], parse_rational(t["coef"])) for t in doc["terms"]],
    )


def point_to_json(p):
    return {"coords": [format_rational(c) for c in _coords(p)]}


def point_from_json(doc):
    coords = doc["coords"] if isinstance(doc, dict) else doc
    return ProjPoint([parse_rational(c) for c in coords])


def change_to_json(A):
    return {"matrix": [[format_rational(x) for x in row] for row in A.matrix]}


def change_from_json(doc):
    return LinearChange([[parse_rational(x) for x in row] for row in doc["matrix"]])


__all__ = [
    "Form",
    "LinearChange",
    "ProjPoint",
    "apply_change",
    "change_from_json",
    "change_to_json",
    "directional_derivative",
    "embed",
    "evaluate",
    "form_from_json",
    "form_to_json",
    "format_rational",
    "iterated_partial",
    "monomials",
    "multinomial",
    "parse_rational",
    "partial_derivative",
    "point_from_json",
    "point_to_json",
    "restrict",
]
