from dataclasses import dataclass, field
from typing import Dict, List, Optional

from models.exceptions import DomainUnderflow, UnknownMap
from simulation.maps import Escaped, LoopCertificate, SectionPoint, as_skeleton, step_point, to_log

NETWORK = "network"
ATTRACTED = "attracted"
ESCAPED = "escaped"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class Outcome:
    kind: str
    step: int
    cycle: Optional[str] = None
    reason: str = ""


@dataclass
class Itinerary:
    points: List[SectionPoint] = field(default_factory=list)
    outcome: Optional[Outcome] = None

    @property
    def attracted(self) -> bool:
        return self.outcome is not None and self.outcome.kind == ATTRACTED

    @property
    def escaped(self) -> bool:
        return self.outcome is not None and self.outcome.kind == ESCAPED


def level_cycles(skeleton, level: str) -> List[str]:
    if level == NETWORK:
        return list(skeleton.cycles)
    if level not in skeleton.cycles:
        raise UnknownMap(f"{skeleton.network} has no cycle {level!r}")
    return [level]


def follow(model, start: SectionPoint, level: str = NETWORK, max_steps: int = 200,
           margin: float = 0.95, certificates: Optional[Dict[str, LoopCertificate]] = None) -> Itinerary:
    """
    Iterate the admissible local map until the point is certified to stay
    near a cycle, fails a domain inequality, or max_steps maps were applied.
    """
    skeleton = as_skeleton(model, margin)
    cycles = level_cycles(skeleton, level)
    if not set(skeleton.cycles_through(start.section_id)) & set(cycles):
        raise UnknownMap(f"Section {start.section_id} is not on {level}")
    if certificates is None:
        certificates = {cycle: LoopCertificate(skeleton, cycle) for cycle in cycles}

    itinerary = Itinerary(points=[start])
    point = start
    for step in range(max_steps + 1):
        if point.section_id == skeleton.junction:
            w = to_log(point.coords)
            for cycle in cycles:
                if certificates[cycle].certify(w)[0]:
                    itinerary.outcome = Outcome(ATTRACTED, step, cycle, "certified")
                    return itinerary
        if step == max_steps:
            break

        candidates = [m for m in skeleton.maps_from(point.section_id)
                      if any(m in skeleton.cycles[cycle] for cycle in cycles)]
        result = None
        try:
            for m in candidates:
                result = step_point(skeleton, m, point, step)
                if not isinstance(result, Escaped):
                    break
        except DomainUnderflow:
            cycle = next(c for c in cycles if m in skeleton.cycles[c])
            itinerary.outcome = Outcome(ATTRACTED, step, cycle, "floor")
            return itinerary

        if isinstance(result, Escaped):
            reason = result.violation if len(candidates) == 1 else "outside every return domain"
            itinerary.outcome = Outcome(ESCAPED, step, reason=reason)
            return itinerary
        point = result
        itinerary.points.append(point)

    itinerary.outcome = Outcome(UNDECIDED, max_steps, reason="max_steps")
    return itinerary
