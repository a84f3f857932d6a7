"""
Polynomial vector fields in R^4 equivariant under the sign changes of
x2, x3 and x4, carrying a B2+ heteroclinic network on the planes P12,
P13 and P14.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from models.exceptions import EquivarianceViolation, InvalidInput, NoSaddlePair
from models.network import B2B2Spec
from utils.logger import setup_logger

logger = setup_logger(__name__)

DIM = 4
_ROOT_TOL = 1e-12


class PlanarFieldCoeffs(BaseModel):
    """
    Coefficients of the field restricted to P1j:
      x1' = a1 x1 + b1 x1^2 + c1 x1^3 + q xj^2
      xj' = xj (a2 + d1 x1 + b2 x1^2 + mu xj^2)
    q defaults to b1 and mu to b2.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    d1: float
    q: Optional[float] = None
    mu: Optional[float] = None

    @property
    def push(self) -> float:
        return self.b1 if self.q is None else self.q

    @property
    def saturation(self) -> float:
        return self.b2 if self.mu is None else self.mu

    @model_validator(mode="after")
    def _check_axes(self):
        if self.c1 >= 0:
            raise ValueError(f"c1 < 0 fails (c1 = {self.c1})")
        if self.a2 * self.b2 <= 0 and self.push == 0:
            raise ValueError("a2*b2 > 0 fails and there is no push term: the xj-axis may carry equilibria")
        return self


def planar_equilibria(coeffs: PlanarFieldCoeffs) -> Tuple[float, float]:
    """Nonzero equilibria (xi_a < 0 < xi_b) on the x1-axis"""
    discriminant = coeffs.b1 ** 2 - 4.0 * coeffs.a1 * coeffs.c1
    if discriminant <= 0:
        raise NoSaddlePair(f"b1^2 - 4 a1 c1 > 0 fails (= {discriminant:.6g})")
    roots = np.sort(np.roots([coeffs.c1, coeffs.b1, coeffs.a1]).real)
    if not roots[0] < 0 < roots[1]:
        raise NoSaddlePair(f"x1-axis equilibria {roots.tolist()} are not of opposite sign")
    return float(roots[0]), float(roots[1])


# ==========================================
# Polynomial fields
# ==========================================

@dataclass(frozen=True)
class Monomial:
    component: int
    coefficient: float
    powers: Tuple[int, int, int, int]


class PolynomialField:
    """x' = f(x) with f a sum of monomials per component"""

    def __init__(self, terms: Sequence[Monomial], name: str = "field"):
        self.name = name
        self.terms = list(terms)
        self._coeffs = np.array([t.coefficient for t in self.terms], dtype=float)
        self._powers = np.array([t.powers for t in self.terms], dtype=int).reshape(-1, DIM)
        self._components = np.array([t.component for t in self.terms], dtype=int)
        self.check_equivariance()

    def check_equivariance(self):
        """
        x1' must be even in each of x2, x3, x4; xj' must be odd in xj and
        even in the other two transverse coordinates.
        """
        for t in self.terms:
            for j in range(1, DIM):
                odd_wanted = t.component == j
                if (t.powers[j] % 2 == 1) != odd_wanted:
                    raise EquivarianceViolation(
                        f"Term {t.coefficient:g}*x^{t.powers} in x{t.component + 1}' breaks the sign change of x{j + 1}")

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        values = self._coeffs * np.prod(x ** self._powers, axis=1)
        return np.bincount(self._components, weights=values, minlength=DIM)

    def jacobian(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        jac = np.zeros((DIM, DIM))
        for coeff, powers, comp in zip(self._coeffs, self._powers, self._components):
            for k in range(DIM):
                if powers[k] == 0:
                    continue
                reduced = powers.copy()
                reduced[k] -= 1
                jac[comp, k] += coeff * powers[k] * np.prod(x ** reduced)
        return jac

    def axis_polynomial(self) -> np.ndarray:
        """Coefficients (highest degree first) of x1' restricted to the x1-axis"""
        degree = 0
        collected: Dict[int, float] = {}
        for coeff, powers, comp in zip(self._coeffs, self._powers, self._components):
            if comp == 0 and not powers[1:].any():
                collected[powers[0]] = collected.get(powers[0], 0.0) + coeff
                degree = max(degree, int(powers[0]))
        return np.array([collected.get(p, 0.0) for p in range(degree, -1, -1)])

    def axis_equilibria(self) -> Tuple[float, float]:
        roots = np.roots(self.axis_polynomial())
        real = sorted(r.real for r in roots if abs(r.imag) < _ROOT_TOL and abs(r.real) > _ROOT_TOL)
        negative = [r for r in real if r < 0]
        positive = [r for r in real if r > 0]
        if len(negative) != 1 or len(positive) != 1:
            raise NoSaddlePair(f"{self.name}: x1-axis equilibria {real} are not one negative and one positive")
        return negative[0], positive[0]


def load_field(path: str) -> PolynomialField:
    """
    Read a whitespace table `component coefficient p1 p2 p3 p4`,
    component written as x1..x4, one monomial per line.
    """
    terms: List[Monomial] = []
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 + DIM:
            raise InvalidInput(f"{path}:{number}: expected {2 + DIM} columns, got {len(parts)}")
        try:
            component = int(parts[0].lower().lstrip("x")) - 1
            coefficient = float(parts[1])
            powers = tuple(int(p) for p in parts[2:])
        except ValueError as e:
            raise InvalidInput(f"{path}:{number}: {e}")
        if not 0 <= component < DIM or min(powers) < 0:
            raise InvalidInput(f"{path}:{number}: bad component or negative power")
        terms.append(Monomial(component, coefficient, powers))
    logger.info(f"📊 Loaded {len(terms)} monomials from {path}")
    return PolynomialField(terms, name=Path(path).stem)


def build_4d_field(planes: Mapping[int, PlanarFieldCoeffs]) -> PolynomialField:
    """
    Glue planar coefficient sets for P12, P13, P14 (keys 2, 3, 4) into one
    field. The planes must share the x1-axis dynamics.
    """
    if sorted(planes) != [2, 3, 4]:
        raise InvalidInput(f"Expected coefficients for planes 2, 3, 4, got {sorted(planes)}")
    axis = {(p.a1, p.b1, p.c1) for p in planes.values()}
    if len(axis) != 1:
        raise InvalidInput(f"Planes disagree on the x1-axis dynamics: {sorted(axis)}")
    a1, b1, c1 = axis.pop()

    def powers(**exps) -> Tuple[int, int, int, int]:
        p = [0] * DIM
        for key, value in exps.items():
            p[int(key[1:]) - 1] = value
        return tuple(p)

    terms = [
        Monomial(0, a1, powers(x1=1)),
        Monomial(0, b1, powers(x1=2)),
        Monomial(0, c1, powers(x1=3)),
    ]
    for j, p in sorted(planes.items()):
        xj = f"x{j}"
        terms.append(Monomial(0, p.push, powers(**{xj: 2})))
        terms.append(Monomial(j - 1, p.a2, powers(**{xj: 1})))
        terms.append(Monomial(j - 1, p.d1, powers(x1=1, **{xj: 1})))
        terms.append(Monomial(j - 1, p.b2, powers(x1=2, **{xj: 1})))
        terms.append(Monomial(j - 1, p.saturation, powers(**{xj: 3})))
    return PolynomialField([t for t in terms if t.coefficient != 0.0], name="glued")


# ==========================================
# Linearization at the axis equilibria
# ==========================================

def jacobian_eigs(field: PolynomialField, point: Sequence[float]) -> np.ndarray:
    return np.linalg.eigvals(field.jacobian(point))


def axis_rates(field: PolynomialField, x1: float) -> np.ndarray:
    """Diagonal of the jacobian at (x1, 0, 0, 0), ordered x1..x4"""
    jac = field.jacobian([x1, 0.0, 0.0, 0.0])
    off_diagonal = jac - np.diag(np.diag(jac))
    if np.abs(off_diagonal).max() > 1e-12:
        raise EquivarianceViolation(f"Jacobian at x1 = {x1:.6g} is not diagonal")
    return np.diag(jac)


def field_b2b2_spec(field: PolynomialField) -> B2B2Spec:
    """Eigenvalue data of the field at xi_a and xi_b"""
    xi_a, xi_b = field.axis_equilibria()
    at_a = axis_rates(field, xi_a)
    at_b = axis_rates(field, xi_b)
    logger.debug(f"Rates at xi_a = {xi_a:.6g}: {at_a}, at xi_b = {xi_b:.6g}: {at_b}")
    return B2B2Spec(
        ea2=float(at_a[1]), ca3=float(-at_a[2]), ca4=float(-at_a[3]), ra=float(-at_a[0]),
        cb2=float(-at_b[1]), eb3=float(at_b[2]), eb4=float(at_b[3]), rb=float(-at_b[0]),
    )
