from typing import ClassVar, Dict, FrozenSet, List, Tuple, Union

from pydantic import BaseModel, ConfigDict


class NodeEigenvalues(BaseModel):
    """Linearization rates at one node, relative to one cycle.

    r, c and e are stored positive (eigenvalues -r, -c, e); t keeps its sign.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    r: float
    c: float
    e: float
    t: float


class CycleNodeParams(BaseModel):
    """a = c/e and b = -t/e for one node of a cycle"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float
    b: float


class NetworkSpec(BaseModel):
    """Common behaviour of the eigenvalue specifications"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    network: ClassVar[str] = ""
    positive_fields: ClassVar[Tuple[str, ...]] = ()

    def replace(self, **changes) -> "NetworkSpec":
        """Copy with some eigenvalues changed (validated again)"""
        data = self.model_dump()
        data.update(changes)
        return type(self).model_validate(data)

    def eigenvalues(self) -> Dict[str, float]:
        return self.model_dump()


class B3B3Spec(NetworkSpec):
    """Eigenvalues of the network made of the xi3- and xi4-cycles"""

    network: ClassVar[str] = "B3B3"
    positive_fields: ClassVar[Tuple[str, ...]] = (
        "e12", "e23", "e24", "e31", "e41",
        "c13", "c14", "c21", "c32", "c42",
        "r1", "r2", "r3", "r4",
    )

    e12: float
    e23: float
    e24: float
    e31: float
    e41: float
    c13: float
    c14: float
    c21: float
    c32: float
    c42: float
    c34: float
    c43: float
    r1: float = 1.0
    r2: float = 1.0
    r3: float = 1.0
    r4: float = 1.0


class B2B2Spec(NetworkSpec):
    """Eigenvalues of the network made of the C3- and C4-cycles"""

    network: ClassVar[str] = "B2B2"
    positive_fields: ClassVar[Tuple[str, ...]] = (
        "ea2", "eb3", "eb4", "ca3", "ca4", "cb2", "ra", "rb",
    )

    ea2: float
    eb3: float
    eb4: float
    ca3: float
    ca4: float
    cb2: float
    ra: float = 1.0
    rb: float = 1.0


SPEC_TYPES = {
    "B3B3": B3B3Spec,
    "B2B2": B2B2Spec,
}


class ValidatedSpec(BaseModel):
    """A spec that passed validation, with its regime tags"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    spec: Union[B3B3Spec, B2B2Spec]
    assumptions: FrozenSet[str]
    tags: Dict[str, str]

    @property
    def network(self) -> str:
        return self.spec.network


class DerivedQuantities(BaseModel):
    """Return-map parameters of the xi4-cycle (plain) and xi3-cycle (_t)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    rho: float
    nu: float
    delta: float
    tau: float
    sigma: float
    rho_t: float
    nu_t: float
    delta_t: float
    tau_t: float
    sigma_t: float
    # dom(h1~) exponent, e24/e23 - c21*c34/(e23*e31)
    alpha: float
    beta: float
    # dom(h1) exponent, e23/e24 - c21*c43/(e24*e41)
    lam: float
    nu_display: float
    nu_t_display: float


class B2DerivedQuantities(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rho: float
    delta: float
    rho_t: float
    delta_t: float


ASSUMPTIONS: List[str] = ["contracting_returns", "weak_transverse"]
