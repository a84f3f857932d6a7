"""
Point iteration of the local and return maps, with domain checks.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from models.exceptions import UnknownMap
from networks.skeleton import LocalMap, Skeleton, skeleton_for


class SectionPoint(BaseModel):
    """Reduced coordinates on a section, optionally with the full 4-component state"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    section_id: str
    coords: Tuple[float, float]
    full: Optional[Tuple[float, float, float, float]] = None

    @model_validator(mode="after")
    def _inside_unit_section(self):
        if not all(0.0 <= c < 1.0 for c in self.coords):
            raise ValueError(f"Section coordinates must lie in [0, 1), got {self.coords}")
        return self


@dataclass(frozen=True)
class Escaped:
    section_id: str
    map_id: str
    step: int
    violation: str


def as_skeleton(model, margin: float = 0.95) -> Skeleton:
    return model if isinstance(model, Skeleton) else skeleton_for(model, margin)


def step_point(skeleton: Skeleton, m: LocalMap, point: SectionPoint, step: int = 0) -> Union[SectionPoint, Escaped]:
    """One local map; raises DomainUnderflow when a coordinate leaves the float range"""
    if point.section_id != m.source:
        raise UnknownMap(f"{m.map_id} starts at {m.source}, not at {point.section_id}")
    target = skeleton.sections[m.target]
    if point.full is not None:
        out, violation = skeleton.apply_full(m, point.full)
        coords = tuple(out[c] for c in target.coords)
        full = tuple(out)
    else:
        coords, violation = skeleton.apply_reduced(m, point.coords)
        full = None
    if violation is not None:
        return Escaped(point.section_id, m.map_id, step, violation)
    return SectionPoint(section_id=m.target, coords=coords, full=full)


def apply_map(model, map_id: str, point: SectionPoint, margin: float = 0.95) -> Union[SectionPoint, Escaped]:
    """
    Image of a point under a local map (phi_*) or a named return map.
    Escaped names the first domain inequality that fails.
    """
    skeleton = as_skeleton(model, margin)
    current: Union[SectionPoint, Escaped] = point
    for step, m in enumerate(skeleton.resolve(map_id)):
        current = step_point(skeleton, m, current, step)
        if isinstance(current, Escaped):
            return current
    return current


# ==========================================
# Logarithmic coordinates
# ==========================================

class LoopCertificate:
    """
    Exact attraction test for one cycle at the junction section, in
    coordinates w = (-ln x, -ln y) where every reduced map is linear.

    A point stays in the loop forever iff its current loop is admissible
    and no loop inequality decreases along the dominant eigen-direction.
    """

    def __init__(self, skeleton: Skeleton, cycle: str):
        self.cycle = cycle
        chain = skeleton.loop_from(cycle, skeleton.junction)
        prefixes: List[np.ndarray] = []
        current = np.eye(2)
        for m in chain:
            current = m.monomial.as_array() @ current
            prefixes.append(current)
        self.rows = np.vstack(prefixes)
        self.threshold = -np.log(skeleton.margin)

        values, vectors = np.linalg.eig(current)
        order = np.argsort(-values.real)
        vectors = vectors[:, order].real
        self.rho = float(values.real[order[0]])
        self._to_eigen = np.linalg.inv(vectors)
        self._slopes = self.rows @ vectors[:, 0]

    def admissible(self, w: np.ndarray) -> np.ndarray:
        return np.all(w @ self.rows.T > self.threshold, axis=1)

    def certify(self, w: np.ndarray) -> np.ndarray:
        w = np.atleast_2d(w)
        alpha = w @ self._to_eigen[0]
        growing = np.all(alpha[:, None] * self._slopes[None, :] >= 0.0, axis=1)
        return self.admissible(w) & growing & (self.rho > 1.0)


def to_log(coords) -> np.ndarray:
    return -np.log(np.asarray(coords, dtype=float))
