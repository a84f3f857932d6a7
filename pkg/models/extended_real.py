import math
from functools import total_ordering
from typing import Any, Union

from pydantic_core import core_schema

from models.exceptions import HetNetError


@total_ordering
class ExtReal:
    """
    A value in [-inf, +inf]

    Infinite values are kept as flags rather than float('inf') so that
    reports never depend on floating overflow. Instances are immutable.
    """

    __slots__ = ("_value", "_inf")

    def __init__(self, value: float = 0.0, inf: int = 0):
        if inf not in (-1, 0, 1):
            raise ValueError(f"inf flag must be -1, 0 or 1, got {inf}")
        if inf == 0:
            value = float(value)
            if math.isnan(value):
                raise ValueError("ExtReal cannot hold NaN")
            if math.isinf(value):
                inf = 1 if value > 0 else -1
                value = 0.0
        else:
            value = 0.0
        object.__setattr__(self, "_value", value)
        object.__setattr__(self, "_inf", inf)

    def __setattr__(self, key, value):
        raise AttributeError("ExtReal is immutable")

    @classmethod
    def finite(cls, value: float) -> "ExtReal":
        if not math.isfinite(value):
            raise ValueError(f"Expected a finite value, got {value}")
        return cls(value)

    # ==========================================
    # Properties
    # ==========================================

    @property
    def is_finite(self) -> bool:
        return self._inf == 0

    @property
    def is_pos_inf(self) -> bool:
        return self._inf == 1

    @property
    def is_neg_inf(self) -> bool:
        return self._inf == -1

    @property
    def value(self) -> float:
        """Finite value; raises for infinities"""
        if self._inf:
            raise HetNetError(f"{self} has no finite value")
        return self._value

    def sign(self) -> int:
        if self._inf:
            return self._inf
        if self._value > 0:
            return 1
        if self._value < 0:
            return -1
        return 0

    def is_positive(self) -> bool:
        return self.sign() > 0

    def is_negative(self) -> bool:
        return self.sign() < 0

    # ==========================================
    # Arithmetic (only what the library needs)
    # ==========================================

    def __neg__(self) -> "ExtReal":
        if self._inf:
            return ExtReal(inf=-self._inf)
        return ExtReal(-self._value)

    def __add__(self, other: Union["ExtReal", float]) -> "ExtReal":
        other = to_ext(other)
        if self._inf and other._inf and self._inf != other._inf:
            raise HetNetError("Undefined sum inf - inf")
        if self._inf:
            return self
        if other._inf:
            return other
        return ExtReal(self._value + other._value)

    __radd__ = __add__

    def __sub__(self, other: Union["ExtReal", float]) -> "ExtReal":
        return self + (-to_ext(other))

    def to_float(self) -> float:
        if self._inf:
            return math.inf if self._inf > 0 else -math.inf
        return self._value

    # ==========================================
    # Ordering
    # ==========================================

    def _key(self):
        return (self._inf, self._value)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, float)) and not isinstance(other, bool):
            other = ExtReal(other)
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other: Any) -> bool:
        if isinstance(other, (int, float)) and not isinstance(other, bool):
            other = ExtReal(other)
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def is_close(self, other: Union["ExtReal", float], tol: float = 1e-9) -> bool:
        other = to_ext(other)
        if self._inf or other._inf:
            return self._inf == other._inf
        return abs(self._value - other._value) <= tol * max(1.0, abs(other._value))

    # ==========================================
    # Text / JSON
    # ==========================================

    def to_json(self) -> Union[float, str]:
        if self._inf > 0:
            return "inf"
        if self._inf < 0:
            return "-inf"
        return float(f"{self._value:.12g}")

    def __str__(self) -> str:
        if self._inf > 0:
            return "+inf"
        if self._inf < 0:
            return "-inf"
        return f"{self._value:.6g}"

    def __repr__(self) -> str:
        return f"ExtReal({self})"

    @classmethod
    def __get_pydantic_core_schema__(cls, source_type, handler):
        # accepts floats, "inf"/"-inf" strings and ExtReal; dumps as float or string in JSON mode
        return core_schema.no_info_plain_validator_function(
            to_ext,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda v: v.to_json(), when_used="json"
            ),
        )


POS_INF = ExtReal(inf=1)
NEG_INF = ExtReal(inf=-1)


def to_ext(value: Any) -> ExtReal:
    """Coerce floats, JSON strings and ExtReal into ExtReal"""
    if isinstance(value, ExtReal):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "+infinity"):
            return POS_INF
        if text in ("-inf", "-infinity"):
            return NEG_INF
        return ExtReal(float(text))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return ExtReal(value)
    raise TypeError(f"Cannot convert {value!r} to ExtReal")


def ext_min(*values: ExtReal) -> ExtReal:
    return min(to_ext(v) for v in values)


def ext_max(*values: ExtReal) -> ExtReal:
    return max(to_ext(v) for v in values)
