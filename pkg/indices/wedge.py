"""
Cusp regions and monomial maps on the unit square.

A wedge is the set {lo_const * x**lo_exponent <= y <= hi_const * x**hi_exponent}
near the origin. A missing lower bound is stored as lo_exponent = inf and a
missing upper bound as hi_exponent = -inf. Bounds that cannot bind near 0
are dropped when a wedge is built, so a built wedge always has
lo_exponent in (0, inf] and hi_exponent in {-inf} or (0, inf).
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from models.exceptions import NonGeneric, UnsupportedForm
from models.extended_real import ExtReal, POS_INF, NEG_INF

TOL_GENERIC = 1e-9
_SAME = 1e-12

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class MonomialMap2:
    """(x, y) -> (k1 x^p11 y^p12, k2 x^p21 y^p22)"""

    p11: float
    p12: float
    p21: float
    p22: float
    k1: float = 1.0
    k2: float = 1.0

    def __post_init__(self):
        if abs(self.determinant) < _SAME:
            raise UnsupportedForm(f"Singular exponent matrix {self.matrix}")
        if self.k1 <= 0 or self.k2 <= 0:
            raise UnsupportedForm("Monomial map constants must be positive")

    @classmethod
    def from_matrix(cls, matrix, consts=(1.0, 1.0)) -> "MonomialMap2":
        (p11, p12), (p21, p22) = matrix
        return cls(float(p11), float(p12), float(p21), float(p22), float(consts[0]), float(consts[1]))

    @classmethod
    def identity(cls) -> "MonomialMap2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        return (self.p11, self.p12), (self.p21, self.p22)

    @property
    def determinant(self) -> float:
        return self.p11 * self.p22 - self.p12 * self.p21

    @property
    def is_sparse(self) -> bool:
        return any(abs(p) < _SAME for p in (self.p11, self.p12, self.p21, self.p22))

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def __call__(self, x: float, y: float) -> Tuple[float, float]:
        return (self.k1 * x ** self.p11 * y ** self.p12,
                self.k2 * x ** self.p21 * y ** self.p22)

    def compose(self, inner: "MonomialMap2") -> "MonomialMap2":
        """self after inner"""
        product = self.as_array() @ inner.as_array()
        k1 = self.k1 * inner.k1 ** self.p11 * inner.k2 ** self.p12
        k2 = self.k2 * inner.k1 ** self.p21 * inner.k2 ** self.p22
        return MonomialMap2.from_matrix(product, (k1, k2))

    def output_bounds(self, margin: float) -> Optional[List["Bound"]]:
        """Domain {every output < margin} as bounds on y; None if empty near 0"""
        bounds = []
        for k, px, py in ((self.k1, self.p11, self.p12), (self.k2, self.p21, self.p22)):
            bound = _monomial_less_than(k, px, py, margin)
            if bound is _EMPTY:
                return None
            if bound is not _DROP:
                bounds.append(bound)
        return bounds


@dataclass(frozen=True)
class Bound:
    """y >= const * x^exponent (lower) or y <= const * x^exponent (upper)"""

    kind: str
    exponent: float
    const: float = 1.0

    def holds(self, x, y):
        edge = self.const * np.power(x, self.exponent)
        return y >= edge if self.kind == LOWER else y <= edge

    def flipped(self) -> "Bound":
        return Bound(UPPER if self.kind == LOWER else LOWER, self.exponent, self.const)


_DROP = object()
_EMPTY = object()


def _monomial_less_than(k: float, px: float, py: float, bound: float):
    """Rewrite k x^px y^py < bound as a Bound on y"""
    if abs(py) < _SAME:
        if abs(px) < _SAME:
            return _DROP if k < bound else _EMPTY
        return _DROP if px > 0 else _EMPTY
    exponent = -px / py
    const = (bound / k) ** (1.0 / py)
    return Bound(UPPER if py > 0 else LOWER, exponent, const)


def pull_back_bound(m: MonomialMap2, bound: Bound):
    """Preimage of one bound under m: a Bound, _DROP or _EMPTY (near 0)"""
    a = bound.exponent
    d = m.p22 - a * m.p12
    e = a * m.p11 - m.p21
    c = bound.const * m.k1 ** a / m.k2
    if abs(d) < _SAME:
        # condition reduces to x^e against a constant
        if bound.kind == LOWER:
            # 1 >= c x^e
            if abs(e) < _SAME:
                return _DROP if c <= 1 else _EMPTY
            return _DROP if e > 0 else _EMPTY
        # 1 <= c x^e
        if abs(e) < _SAME:
            return _DROP if c >= 1 else _EMPTY
        return _DROP if e < 0 else _EMPTY
    kind = bound.kind if d > 0 else bound.flipped().kind
    return Bound(kind, e / d, c ** (1.0 / d))


def preimage_bounds(m: MonomialMap2, bounds: Iterable[Bound]) -> Optional[List[Bound]]:
    result = []
    for bound in bounds:
        pulled = pull_back_bound(m, bound)
        if pulled is _EMPTY:
            return None
        if pulled is not _DROP:
            result.append(pulled)
    return result


@dataclass(frozen=True)
class Wedge:
    lo_exponent: float
    hi_exponent: float
    lo_const: float = 1.0
    hi_const: float = 1.0

    @classmethod
    def between(cls, lo_exponent: float, hi_exponent: float,
                lo_const: float = 1.0, hi_const: float = 1.0) -> Optional["Wedge"]:
        return cls.build([Bound(LOWER, lo_exponent, lo_const), Bound(UPPER, hi_exponent, hi_const)])

    @classmethod
    def build(cls, bounds: Iterable[Bound]) -> Optional["Wedge"]:
        """Dominant lower and upper bound near 0; None when empty near 0"""
        lo, lo_c = math.inf, 1.0
        hi, hi_c = -math.inf, 1.0
        for bound in bounds:
            if bound.kind == LOWER:
                # smaller exponent is the larger function near 0
                if bound.exponent < lo - _SAME or (abs(bound.exponent - lo) <= _SAME and bound.const > lo_c):
                    lo, lo_c = bound.exponent, bound.const
            else:
                if hi == -math.inf or bound.exponent > hi + _SAME or (
                        abs(bound.exponent - hi) <= _SAME and bound.const < hi_c):
                    hi, hi_c = bound.exponent, bound.const

        if lo <= _SAME:
            return None
        if hi != -math.inf and hi <= _SAME:
            hi, hi_c = -math.inf, 1.0
        if math.isfinite(lo) and hi != -math.inf:
            if hi > lo + _SAME:
                return None
            if abs(hi - lo) <= _SAME and hi_c <= lo_c:
                return None
        return cls(lo, hi, lo_c, hi_c)

    @property
    def has_lower(self) -> bool:
        return math.isfinite(self.lo_exponent)

    @property
    def has_upper(self) -> bool:
        return self.hi_exponent != -math.inf

    def bounds(self) -> List[Bound]:
        result = []
        if self.has_lower:
            result.append(Bound(LOWER, self.lo_exponent, self.lo_const))
        if self.has_upper:
            result.append(Bound(UPPER, self.hi_exponent, self.hi_const))
        return result

    def interval(self) -> Tuple[float, float]:
        """Exponent interval [hi, lo] covered by the wedge"""
        return self.hi_exponent, self.lo_exponent

    def contains(self, x, y):
        inside = np.ones(np.broadcast(x, y).shape, dtype=bool)
        for bound in self.bounds():
            inside &= bound.holds(x, y)
        return inside

    def intersect(self, bounds: Iterable[Bound]) -> Optional["Wedge"]:
        return Wedge.build(self.bounds() + list(bounds))

    def same_shape(self, other: "Wedge") -> bool:
        return _same(self.lo_exponent, other.lo_exponent) and _same(self.hi_exponent, other.hi_exponent)

    def __str__(self) -> str:
        lower = f"{self.lo_const:.3g}*x^{self.lo_exponent:.6g}" if self.has_lower else "0"
        upper = f"{self.hi_const:.3g}*x^{self.hi_exponent:.6g}" if self.has_upper else "1"
        return f"{{{lower} <= y <= {upper}}}"


def _same(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= _SAME * max(1.0, abs(a))


def preimage(m: MonomialMap2, w: Wedge) -> Optional[Wedge]:
    """Exact preimage of w under m; None when it is empty near 0"""
    if not m.is_sparse:
        raise UnsupportedForm(f"Dense exponent matrix {m.matrix} is not supported")
    pulled = preimage_bounds(m, w.bounds())
    if pulled is None:
        return None
    return Wedge.build(pulled)


def complement(bounds: Sequence[Bound]) -> List[Wedge]:
    """Complement of an intersection of bounds, as a union of wedges"""
    if not bounds:
        return []
    pieces = [Wedge.build([bound.flipped()]) for bound in bounds]
    return [w for w in pieces if w is not None]


# ==========================================
# Index calculation
# ==========================================

def merge_intervals(ws: Iterable[Wedge]) -> List[Tuple[float, float]]:
    """Union of the exponent intervals [hi, lo] of the wedges"""
    intervals = sorted(w.interval() for w in ws)
    merged: List[List[float]] = []
    for hi, lo in intervals:
        if merged and hi <= merged[-1][1] + _SAME:
            merged[-1][1] = max(merged[-1][1], lo)
        else:
            merged.append([hi, lo])
    return [(hi, lo) for hi, lo in merged]


def _check_generic(value: float):
    if math.isfinite(value) and abs(value - 1.0) < TOL_GENERIC:
        raise NonGeneric(f"Escape exponent {value:.12g} is too close to 1")


def wedge_index_detail(ws: Iterable[Wedge]) -> Tuple[ExtReal, bool]:
    """Stability index of the complement of the wedges and whether it came from a thick cusp"""
    ws = list(ws)
    for w in ws:
        if w.lo_exponent <= 0.0 or (w.has_upper and w.hi_exponent <= 0.0):
            raise UnsupportedForm(f"Wedge {w} has a non-positive exponent; only cusps at the origin have an index")
    intervals = merge_intervals(ws)
    if not intervals:
        return POS_INF, False

    alpha_max = None
    alpha_min = None
    for hi, lo in intervals:
        _check_generic(hi)
        _check_generic(lo)
        if hi < 1.0 < lo:
            # attracted parts: above x^hi and below x^lo
            rates = []
            if 0.0 < hi < 1.0:
                rates.append(1.0 / hi - 1.0)
            if math.isfinite(lo):
                rates.append(lo - 1.0)
            if not rates:
                return NEG_INF, True
            return ExtReal(-min(rates)), True
        if lo < 1.0:
            alpha_max = lo if alpha_max is None else max(alpha_max, lo)
        else:
            alpha_min = hi if alpha_min is None else min(alpha_min, hi)

    candidates = []
    if alpha_max is not None:
        candidates.append(1.0 / alpha_max)
    if alpha_min is not None:
        candidates.append(alpha_min)
    return ExtReal(-1.0 + min(candidates)), False


def wedge_index(ws: Iterable[Wedge]) -> ExtReal:
    return wedge_index_detail(ws)[0]


def wedge_measure_fraction(w: Wedge, eps: float) -> float:
    """Area of w inside [0, eps]^2 divided by eps^2"""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")

    def lower(x):
        return w.lo_const * x ** w.lo_exponent if w.has_lower else 0.0

    def upper(x):
        return min(eps, w.hi_const * x ** w.hi_exponent) if w.has_upper else eps

    def length(x):
        return max(0.0, upper(x) - lower(x))

    points = []
    if w.has_lower:
        points.append((eps / w.lo_const) ** (1.0 / w.lo_exponent))
    if w.has_upper:
        points.append((eps / w.hi_const) ** (1.0 / w.hi_exponent))
    if w.has_lower and w.has_upper and not _same(w.lo_exponent, w.hi_exponent):
        points.append((w.hi_const / w.lo_const) ** (1.0 / (w.lo_exponent - w.hi_exponent)))
    points = sorted(p for p in points if 0.0 < p < eps)

    area, _ = integrate.quad(length, 0.0, eps, points=points or None,
                             epsabs=0.0, epsrel=1e-6, limit=200)
    return area / eps ** 2
