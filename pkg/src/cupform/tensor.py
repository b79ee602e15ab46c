"""Dense exact hypermatrices and certified rank bounds.

Entries are :class:`fractions.Fraction` held in a read-only numpy object
array in row-major order. Nothing in this module touches floating point.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from cupform import linalg, upoly
from cupform.errors import (
    CertificateFalsified,
    DependentSlices,
    DimensionMismatch,
    IndexOutOfRange,
    ShapeError,
    ZeroVector,
)
from cupform.exactpoly import format_rational, parse_rational


class HyperTensor:
    """Order-k array of exact rationals. Immutable."""

    __slots__ = ("_a",)

    def __init__(self, entries, shape=None):
        a = np.array(entries, dtype=object)
        if shape is not None:
            shape = tuple(int(s) for s in shape)
            if a.size != int(np.prod(shape)):
                raise DimensionMismatch(f"{a.size} entries for shape {shape}")
            a = a.reshape(shape)
        if a.ndim < 1 or any(s < 1 for s in a.shape):
            raise ShapeError(f"invalid tensor shape {a.shape}")
        flat = a.reshape(-1)
        for i in range(flat.size):
            flat[i] = Fraction(flat[i])
        a.flags.writeable = False
        self._a = a

    @classmethod
    def zeros(cls, shape):
        return cls([Fraction(0)] * int(np.prod(shape)), shape)

    @property
    def shape(self):
        return self._a.shape

    @property
    def order(self):
        return self._a.ndim

    @property
    def array(self):
        return self._a

    def entries(self):
        return list(self._a.reshape(-1))

    def __getitem__(self, idx):
        return self._a[idx]

    def is_zero(self):
        return not any(self._a.reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, HyperTensor):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._a == other._a))

    __hash__ = None

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch("adding tensors of different shapes")
        return HyperTensor(self._a + other._a)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch("subtracting tensors of different shapes")
        return HyperTensor(self._a - other._a)

    def scale(self, s):
        return HyperTensor(self._a * Fraction(s))

    def tolist(self):
        return self._a.tolist()

    def __repr__(self):
        return f"HyperTensor(shape={self.shape})"


def matrix(rows):
    """Build an order-2 HyperTensor from nested rows."""
    t = rows if isinstance(rows, HyperTensor) else HyperTensor(rows)
    if t.order != 2:
        raise ShapeError(f"expected a matrix, got order {t.order}")
    return t


@dataclass(frozen=True)
class SubtensorSpec:
    """One strictly increasing index map per axis (0-based)."""

    index_maps: tuple

    def __post_init__(self):
        maps = tuple(tuple(int(i) for i in m) for m in self.index_maps)
        for m in maps:
            if not m:
                raise ShapeError("empty index map")
            if any(b <= a for a, b in zip(m, m[1:])):
                raise ShapeError(f"index map {m} is not strictly increasing")
        object.__setattr__(self, "index_maps", maps)


@dataclass
class RankBounds:
    lower: int
    upper: int | None = None
    lower_certificate: dict = field(default_factory=dict)
    upper_certificate: list | None = None
    caller_certified: bool = False

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise AssertionError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def to_json(self):
        doc = {
            "lower": self.lower,
            "upper": self.upper if self.upper is not None else "unknown",
            "lower_certificate": self.lower_certificate,
            "caller_certified": self.caller_certified,
        }
        if self.upper_certificate is not None:
            doc["upper_certificate"] = [
                {"coef": format_rational(c), "vectors": [[format_rational(x) for x in v] for v in vs]}
                for c, vs in self.upper_certificate
            ]
        return doc


def from_rank_one(vectors):
    """Outer product ``v_1 (x) ... (x) v_k`` of nonzero rational vectors."""
    vecs = [[Fraction(x) for x in v] for v in vectors]
    if not vecs:
        raise ShapeError("need at least one vector")
    for v in vecs:
        if not v or not any(v):
            raise ZeroVector("rank-one factors must be nonzero")
    a = np.array(vecs[0], dtype=object)
    for v in vecs[1:]:
        a = np.multiply.outer(a, np.array(v, dtype=object))
    return HyperTensor(a)


def subtensor(T, spec):
    if not isinstance(spec, SubtensorSpec):
        spec = SubtensorSpec(spec)
    if len(spec.index_maps) != T.order:
        raise ShapeError(f"{len(spec.index_maps)} index maps for an order-{T.order} tensor")
    for m, a in zip(spec.index_maps, T.shape):
        if m[0] < 0 or m[-1] >= a:
            raise ShapeError(f"index map {m} leaves range 0..{a - 1}")
    return HyperTensor(T.array[np.ix_(*spec.index_maps)])


def slice_along(T, axis, index):
    """The order-(k-1) face with ``index`` fixed on ``axis``."""
    if T.order < 2:
        raise ShapeError("cannot slice an order-1 tensor")
    if not 0 <= axis < T.order:
        raise IndexOutOfRange(f"axis {axis} out of range")
    if not 0 <= index < T.shape[axis]:
        raise IndexOutOfRange(f"index {index} out of range on axis {axis}")
    return HyperTensor(np.take(T.array, index, axis=axis))


def stack(slices, axis):
    """Inverse of slicing: reassemble faces along ``axis``."""
    return HyperTensor(np.stack([s.array for s in slices], axis=axis))


def flatten(T, axis):
    """``a_axis x prod(other axes)`` matrix, columns in row-major order."""
    if not 0 <= axis < T.order:
        raise IndexOutOfRange(f"axis {axis} out of range")
    a = np.moveaxis(T.array, axis, 0)
    return HyperTensor(a.reshape(T.shape[axis], -1))


def _rows(M):
    if isinstance(M, HyperTensor):
        if M.order != 2:
            raise ShapeError("matrix_rank needs an order-2 tensor")
        return M.tolist()
    return [list(r) for r in M]


def matrix_rank(M):
    """Exact rank over Q by fraction-free elimination."""
    return linalg.rank(_rows(M))


def is_rank_le_one(T):
    """True iff T is zero or a single outer product (every flattening has rank <= 1)."""
    if T.order == 1:
        return True
    return all(matrix_rank(flatten(T, ax)) <= 1 for ax in range(T.order))


def flattening_lower_bound(T):
    if T.order == 1:
        return 0 if T.is_zero() else 1
    return max(matrix_rank(flatten(T, ax)) for ax in range(T.order))


def _minor_polys(A0, A1, s):
    """All s x s minors of A0 + mu*A1 as polynomials in mu, lazily."""
    l, m = len(A0), len(A0[0])
    xs = list(range(s + 1))
    pencils = [[[a + x * b for a, b in zip(r0, r1)] for r0, r1 in zip(A0, A1)] for x in xs]
    for rows in combinations(range(l), s):
        for cols in combinations(range(m), s):
            ys = [linalg.det([[P[r][c] for c in cols] for r in rows]) for P in pencils]
            yield upoly.interpolate(xs, ys)


def pencil_min_rank(A0, A1):
    """Exact ``min over complex mu of rank(A0 + mu*A1)``.

    The rank is >= s for every mu iff the s x s minors, as polynomials in mu,
    have no common complex root, i.e. their gcd is a nonzero constant.
    """
    A0 = [[Fraction(x) for x in r] for r in _rows(A0)]
    A1 = [[Fraction(x) for x in r] for r in _rows(A1)]
    if len(A0) != len(A1) or len(A0[0]) != len(A1[0]):
        raise DimensionMismatch("pencil matrices differ in shape")
    # the generic rank is attained at all but finitely many mu; probe a few
    generic = max(
        linalg.rank([[a + x * b for a, b in zip(r0, r1)] for r0, r1 in zip(A0, A1)]) for x in (0, 1, 2, 3, 5)
    )
    for s in range(generic, 0, -1):
        g = None
        for poly in _minor_polys(A0, A1, s):
            if not poly:
                continue
            g = poly if g is None else upoly.gcd(g, poly)
            if upoly.degree(g) == 0:
                return s
    return 0


def _check_constant_minor(slices, rows, cols):
    # a minor untouched by every mu-slice and nonsingular in A0 bounds the pencil rank for all mu
    A0 = slices[0]
    for A in slices[1:]:
        if any(A[r][c] != 0 for r in rows for c in cols):
            return False
    return linalg.det([[A0[r][c] for c in cols] for r in rows]) != 0


def lemma_trick_bound(slices, t=None, justification=None, minor=None, samples=1000, seed=0):
    """Lower bound ``q + t`` on the rank of the order-3 tensor with the given slices.

    ``slices`` is ``[A_0, ..., A_q]``; ``t`` must bound ``rank(A_0 + sum mu_j A_j)``
    from below for every complex ``mu``. With ``q = 1`` it is computed exactly.
    With ``q >= 2`` the caller supplies it: if ``minor = (rows, cols)`` names a
    ``t x t`` minor that no ``A_j`` (j >= 1) touches and that is nonsingular in
    ``A_0``, the bound is verified exactly; otherwise it is flagged
    caller-certified. Random mu samples are checked in every case and a
    violation raises :class:`CertificateFalsified`.
    """
    mats = [[[Fraction(x) for x in r] for r in _rows(A)] for A in slices]
    if not mats:
        raise ShapeError("need at least one slice")
    shape = (len(mats[0]), len(mats[0][0]))
    if any((len(A), len(A[0])) != shape for A in mats):
        raise DimensionMismatch("slices differ in shape")
    q = len(mats) - 1
    if q == 0:
        r = linalg.rank(mats[0])
        return RankBounds(lower=r, lower_certificate={"kind": "lemma_trick", "q": 0, "t": r})
    flat = [[x for r in A for x in r] for A in mats[1:]]
    if linalg.rank(flat) < q:
        raise DependentSlices("A_1, ..., A_q must be linearly independent")

    caller = False
    if q == 1:
        computed = pencil_min_rank(mats[0], mats[1])
        if t is not None and t > computed:
            raise CertificateFalsified(f"claimed pencil rank {t} exceeds exact minimum {computed}")
        t = computed
        how = "exact_pencil_gcd"
    else:
        if t is None:
            raise ValueError("q >= 2 requires a caller-supplied t")
        how = justification or "caller"
        caller = True
        if minor is not None:
            rows, cols = (tuple(minor[0]), tuple(minor[1]))
            if len(rows) != t or len(cols) != t:
                raise ValueError("minor size must equal t")
            if not _check_constant_minor(mats, rows, cols):
                raise CertificateFalsified("named minor is not a constant nonsingular block")
            caller = False
            how = "constant_minor"

    rng = random.Random(seed)
    for _ in range(samples):
        mu = [Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**3)) for _ in range(q)]
        P = [row[:] for row in mats[0]]
        for mj, A in zip(mu, mats[1:]):
            for i, row in enumerate(A):
                for j, v in enumerate(row):
                    if v:
                        P[i][j] += mj * v
        if linalg.rank(P) < t:
            raise CertificateFalsified(f"rank {linalg.rank(P)} < {t} at mu = {mu}")
    cert = {"kind": "lemma_trick", "q": q, "t": t, "justification": how, "samples": samples}
    return RankBounds(lower=q + t, lower_certificate=cert, caller_certified=caller)


def _entries_222(T):
    a = T.array if isinstance(T, HyperTensor) else np.asarray(T, dtype=object)
    if a.shape != (2, 2, 2):
        raise ShapeError(f"Cayley hyperdeterminant needs a 2x2x2 tensor, got {a.shape}")
    return a


def cayley_hyperdet_222(T):
    """Cayley's quartic hyperdeterminant of a 2x2x2 array.

    Works over any commutative ring whose elements support ``+``, ``-`` and
    ``*`` with ints, so symbolic (Form-valued) arrays are accepted as well.
    """
    a = _entries_222(T)
    a000, a001, a010, a011 = a[0, 0, 0], a[0, 0, 1], a[0, 1, 0], a[0, 1, 1]
    a100, a101, a110, a111 = a[1, 0, 0], a[1, 0, 1], a[1, 1, 0], a[1, 1, 1]
    squares = (a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110
               + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011)
    cross = (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111
             + a000 * a100 * a011 * a111 + a001 * a010 * a101 * a110
             + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
    quad = a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111
    return squares - 2 * cross + 4 * quad


def rank_222(T):
    """Exact rank over C of a rational 2x2x2 tensor."""
    _entries_222(T)
    if T.is_zero():
        return 0
    if is_rank_le_one(T):
        return 1
    if cayley_hyperdet_222(T) != 0:
        return 2
    A0 = slice_along(T, 2, 0).tolist()
    A1 = slice_along(T, 2, 1).tolist()
    if linalg.rank([[x for r in A0 for x in r], [x for r in A1 for x in r]]) < 2:
        # one-dimensional slice span: rank equals the matrix rank of the nonzero slice
        return 2
    # det(x A0 + y A1) = P x^2 + Q x y + R y^2; Det = 0 means a repeated root
    P = linalg.det(A0)
    R = linalg.det(A1)
    Q = linalg.det([[a + b for a, b in zip(r0, r1)] for r0, r1 in zip(A0, A1)]) - P - R
    if P == 0 and Q == 0 and R == 0:
        return 2  # every member singular, so two independent rank-one members span it
    return 3


def _matrix_decomposition(rows):
    """``M = sum_i col_i (x) row_i`` from the reduced row echelon form."""
    red, pivots = linalg.rref(rows)
    terms = []
    for k, pc in enumerate(pivots):
        col = [Fraction(r[pc]) for r in rows]
        terms.append((Fraction(1), [col, red[k]]))
    return terms


def rank_decomposition(T):
    """Explicit rank-one decomposition (an upper-bound certificate).

    Recurses over axis-0 slices down to matrices; not minimal in general.
    """
    if T.order == 1:
        v = [Fraction(x) for x in T.entries()]
        return [] if not any(v) else [(Fraction(1), [v])]
    if T.order == 2:
        return _matrix_decomposition(T.tolist())
    out = []
    for i in range(T.shape[0]):
        sub = slice_along(T, 0, i)
        e = [Fraction(int(j == i)) for j in range(T.shape[0])]
        for c, vecs in rank_decomposition(sub):
            out.append((c, [e] + vecs))
    return out


def expand_decomposition(terms, shape):
    acc = np.zeros(shape, dtype=object)
    acc[...] = Fraction(0)
    for c, vecs in terms:
        acc = acc + from_rank_one(vecs).array * c
    return HyperTensor(acc)


def rank_bounds(T):
    """Best certified bounds available for an arbitrary tensor."""
    if T.is_zero():
        return RankBounds(0, 0, {"kind": "zero"}, [])
    if is_rank_le_one(T):
        return RankBounds(1, 1, {"kind": "rank_le_one_proof"}, _rank_one_factors(T))
    if T.shape == (2, 2, 2):
        r = rank_222(T)
        return RankBounds(r, r, {"kind": "cayley_classification"})
    lower = flattening_lower_bound(T)
    axis = max(range(T.order), key=lambda ax: matrix_rank(flatten(T, ax)))
    terms = rank_decomposition(T)
    return RankBounds(lower, len(terms), {"kind": "flattening", "axis": axis}, terms)


def _rank_one_factors(T):
    """Factor a rank-one tensor exactly as ``c * v_1 (x) ... (x) v_k``."""
    a = T.array
    nz = next(idx for idx in np.ndindex(a.shape) if a[idx] != 0)
    pivot = a[nz]
    vecs = []
    for ax in range(T.order):
        sel = list(nz)
        sel[ax] = slice(None)
        vecs.append([Fraction(x) for x in a[tuple(sel)]])
    coef = Fraction(1) / pivot ** (T.order - 1)
    return [(coef, vecs)]


def tensor_to_json(T):
    return {"shape": list(T.shape), "entries": [format_rational(x) for x in T.entries()]}


def tensor_from_json(doc):
    return HyperTensor([parse_rational(x) for x in doc["entries"]], doc["shape"])


def all_indices(shape):
    return product(*(range(s) for s in shape))
