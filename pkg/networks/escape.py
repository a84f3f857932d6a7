"""
Escape sets of a network near each connection.

Points leave the network at the junction section when they lie outside the
domains of all return maps there. Every other escaping point reaches that
region after finitely many returns, or fails the domain of a local map on
the way to the junction. Both sets are unions of wedges.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from indices.wedge import Bound, MonomialMap2, Wedge, complement, preimage, wedge_index_detail
from models.exceptions import CapExceeded
from models.extended_real import ExtReal
from networks.skeleton import Skeleton
from utils.logger import setup_logger

HORIZON = 1e3
TINY = 1e-3


@dataclass
class EscapeSet:
    section_id: str
    wedges: List[Wedge]
    index: ExtReal
    thick: bool
    # the section's own local map has a restricted domain
    restricted: bool = False
    generations: int = 0
    notes: List[str] = field(default_factory=list)


def _full_square() -> Wedge:
    return Wedge(math.inf, -math.inf)


def _intersect_all(pieces: Sequence[List[Wedge]]) -> List[Wedge]:
    """Intersection of unions: pieces[i] is a union of wedges"""
    result = [_full_square()]
    for union in pieces:
        combined = []
        for left in result:
            for right in union:
                w = left.intersect(right.bounds())
                if w is not None:
                    combined.append(w)
        result = combined
    return result


def _negligible(w: Wedge) -> bool:
    hi, lo = w.interval()
    return hi > HORIZON or lo < TINY


class EscapeEngine:
    """Wedge calculus of the escape sets of one network"""

    def __init__(self, skeleton: Skeleton, cycles: Optional[Sequence[str]] = None, n_cap: int = 10000):
        self.logger = setup_logger(__name__)
        self.skeleton = skeleton
        self.cycles = list(cycles) if cycles else list(skeleton.cycles)
        self.n_cap = n_cap
        self._junction: Optional[List[Wedge]] = None
        self._generations = 0

        self.returns: Dict[str, Tuple[MonomialMap2, Optional[List[Bound]]]] = {}
        for cycle in self.cycles:
            chain = skeleton.loop_from(cycle, skeleton.junction)
            self.returns[cycle] = (skeleton.compose(chain), skeleton.domain_bounds(chain))

    def junction_seed(self) -> List[Wedge]:
        """Points at the junction outside every return-map domain"""
        pieces = []
        for cycle in self.cycles:
            _, domain = self.returns[cycle]
            if domain is None:
                pieces.append([_full_square()])
            else:
                pieces.append(complement(domain))
        return _intersect_all(pieces)

    def junction_escape(self) -> List[Wedge]:
        if self._junction is not None:
            return self._junction

        seed = self.junction_seed()
        found = list(seed)
        seen = {self._key(w) for w in seed}
        frontier = deque((w, 0) for w in seed)
        generations = 0

        while frontier:
            w, depth = frontier.popleft()
            for cycle in self.cycles:
                ret, domain = self.returns[cycle]
                if domain is None:
                    continue
                pulled = preimage(ret, w)
                if pulled is None:
                    continue
                pulled = pulled.intersect(domain)
                if pulled is None or _negligible(pulled) or pulled.same_shape(w):
                    continue
                key = self._key(pulled)
                if key in seen:
                    continue
                seen.add(key)
                found.append(pulled)
                frontier.append((pulled, depth + 1))
                generations = max(generations, depth + 1)
                if len(found) > self.n_cap:
                    raise CapExceeded(f"Escape set at {self.skeleton.junction} exceeded {self.n_cap} wedges")

        self.logger.debug(f"Junction escape set: {len(found)} wedges, {generations} generations")
        self._junction = found
        self._generations = generations
        return found

    @staticmethod
    def _key(w: Wedge) -> Tuple[float, float]:
        hi, lo = w.interval()
        return round(hi, 9), round(lo, 9)

    def escape_set(self, section_id: str) -> EscapeSet:
        junction = self.junction_escape()
        if section_id == self.skeleton.junction:
            index, thick = wedge_index_detail(junction)
            return EscapeSet(section_id, list(junction), index, thick, generations=self._generations)

        path = self.skeleton.path_to_junction(section_id)
        domain = self.skeleton.domain_bounds(path)
        if domain is None:
            index, thick = wedge_index_detail([_full_square()])
            return EscapeSet(section_id, [_full_square()], index, thick, restricted=True)

        own = complement(domain)
        chain = self.skeleton.compose(path)
        wedges = list(own)
        for w in junction:
            pulled = preimage(chain, w)
            if pulled is None:
                continue
            pulled = pulled.intersect(domain)
            if pulled is not None:
                wedges.append(pulled)

        index, thick = wedge_index_detail(wedges)
        return EscapeSet(section_id, wedges, index, thick, restricted=bool(own), generations=self._generations)

    def n_index(self, connection: str) -> EscapeSet:
        section = self.skeleton.section_of(connection)
        return self.escape_set(section.section_id)
