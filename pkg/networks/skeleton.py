"""
Map skeleton of a network: cross-sections, local maps built from the
linearization at each node, and the return maps around each cycle.

Global maps between sections are the identity. Every reduced map keeps the
two coordinates transverse to the connection; the full maps also carry the
radial coordinate.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from indices.wedge import Bound, MonomialMap2, preimage_bounds
from models.exceptions import DomainUnderflow, UnknownMap
from models.network import B2B2Spec, B3B3Spec

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class Section:
    section_id: str
    node: str
    coords: Tuple[int, int]
    connection: str


@dataclass(frozen=True)
class LocalMap:
    map_id: str
    node: str
    source: str
    target: str
    driver: int
    fixed_in: int
    monomial: MonomialMap2


class Skeleton:
    """Sections and local maps of one network with unit constants"""

    def __init__(self, network: str, rates: Dict[str, Tuple[float, ...]], names: Dict[str, Tuple[str, ...]],
                 radial: Dict[str, int],
                 sections: Sequence[Section], maps: Sequence[dict], junction: str,
                 cycles: Dict[str, Sequence[str]], return_maps: Dict[str, Tuple[str, str]],
                 margin: float = 0.95):
        self.network = network
        self.rates = rates
        self.names = names
        self.radial = radial
        self.sections = {s.section_id: s for s in sections}
        self.junction = junction
        self.margin = margin
        self.maps: Dict[str, LocalMap] = {}
        for m in maps:
            self.maps[m["map_id"]] = self._build_local_map(**m)
        self.cycles = {tag: [self.maps[map_id] for map_id in ids] for tag, ids in cycles.items()}
        self.return_map_names = dict(return_maps)

    def _build_local_map(self, map_id: str, node: str, source: str, target: str,
                         driver: int, fixed_in: int) -> LocalMap:
        rates = self.rates[node]
        coords_in = self.sections[source].coords
        coords_out = self.sections[target].coords
        expanding = rates[driver]
        rows = []
        for out in coords_out:
            row = [0.0, 0.0]
            row[coords_in.index(driver)] = -rates[out] / expanding
            if out != fixed_in:
                row[coords_in.index(out)] += 1.0
            rows.append(row)
        return LocalMap(map_id, node, source, target, driver, fixed_in, MonomialMap2.from_matrix(rows))

    # ==========================================
    # Lookups
    # ==========================================

    def local_map(self, map_id: str) -> LocalMap:
        try:
            return self.maps[map_id]
        except KeyError:
            raise UnknownMap(f"{self.network} has no local map {map_id!r}")

    def maps_from(self, section_id: str) -> List[LocalMap]:
        return [m for m in self.maps.values() if m.source == section_id]

    def section_of(self, connection: str) -> Section:
        for section in self.sections.values():
            if section.connection == connection:
                return section
        raise UnknownMap(f"{self.network} has no connection {connection!r}")

    def cycles_through(self, section_id: str) -> List[str]:
        return [tag for tag, loop in self.cycles.items() if any(m.source == section_id for m in loop)]

    def loop_from(self, cycle: str, section_id: str) -> List[LocalMap]:
        """Local maps of one cycle starting at a section"""
        loop = self.cycles[cycle]
        for i, m in enumerate(loop):
            if m.source == section_id:
                return loop[i:] + loop[:i]
        raise UnknownMap(f"Section {section_id} is not on cycle {cycle}")

    def path_to_junction(self, section_id: str) -> List[LocalMap]:
        path = []
        current = section_id
        while current != self.junction:
            outgoing = self.maps_from(current)
            if len(outgoing) != 1:
                raise UnknownMap(f"Section {current} does not lead to the junction")
            path.append(outgoing[0])
            current = outgoing[0].target
        return path

    def return_map_chain(self, name: str) -> List[LocalMap]:
        try:
            cycle, section_id = self.return_map_names[name]
        except KeyError:
            raise UnknownMap(f"{self.network} has no return map {name!r}")
        return self.loop_from(cycle, section_id)

    def resolve(self, map_id: str) -> List[LocalMap]:
        """Local map or named return map as a chain of local maps"""
        if map_id in self.maps:
            return [self.maps[map_id]]
        return self.return_map_chain(map_id)

    # ==========================================
    # Reduced calculus
    # ==========================================

    @staticmethod
    def compose(chain: Sequence[LocalMap]) -> MonomialMap2:
        result = MonomialMap2.identity()
        for m in chain:
            result = m.monomial.compose(result)
        return result

    def domain_bounds(self, chain: Sequence[LocalMap]) -> Optional[List[Bound]]:
        """Domain of a chain in the coordinates of its first section; None if empty near 0"""
        bounds: List[Bound] = []
        prefix = MonomialMap2.identity()
        for m in chain:
            own = m.monomial.output_bounds(self.margin)
            if own is None:
                return None
            pulled = preimage_bounds(prefix, own)
            if pulled is None:
                return None
            bounds.extend(pulled)
            prefix = m.monomial.compose(prefix)
        return bounds

    def return_matrix(self, cycle: str, section_id: Optional[str] = None) -> np.ndarray:
        chain = self.loop_from(cycle, section_id or self.junction)
        return self.compose(chain).as_array()

    # ==========================================
    # Point maps
    # ==========================================

    def apply_reduced(self, m: LocalMap, point: Tuple[float, float]) -> Tuple[Tuple[float, float], Optional[str]]:
        """Image of a reduced point and the violated inequality (None when admissible)"""
        out = m.monomial(*point)
        for value, coord in zip(out, self.sections[m.target].coords):
            if value >= self.margin:
                return out, self._violation(m, coord)
        for value in out:
            if value < UNDERFLOW:
                raise DomainUnderflow(f"Coordinate below {UNDERFLOW:g} after {m.map_id}")
        return out, None

    def apply_full(self, m: LocalMap, state: Sequence[float]) -> Tuple[List[float], Optional[str]]:
        """Image of a full 4-component state expressed at the source section"""
        source = self.sections[m.source]
        x = list(state)
        x[self.radial[m.node]] = state[self.radial[source.node]]
        x[m.fixed_in] = 1.0
        rates = self.rates[m.node]
        expanding = rates[m.driver]
        drive = x[m.driver]
        out = [1.0] * 4
        for k in range(4):
            if k != m.driver:
                out[k] = x[k] * drive ** (-rates[k] / expanding)
        for coord in self.sections[m.target].coords:
            if out[coord] >= self.margin:
                return out, self._violation(m, coord)
        if min(out) < UNDERFLOW:
            raise DomainUnderflow(f"Coordinate below {UNDERFLOW:g} after {m.map_id}")
        return out, None

    def _violation(self, m: LocalMap, coord: int) -> str:
        """Domain inequality of m that fails when output coordinate coord is too large"""
        names = self.names[m.node]
        driver = f"x{m.driver + 1}"
        # output = x_coord * driver^(-rate/expanding); bound written as x_coord < driver^(rate/expanding)
        ratio = f"{names[coord]}/{names[m.driver]}"
        if coord == m.fixed_in:
            return f"{driver}^({_negate(ratio)}) < {self.margin:g}"
        return f"x{coord + 1} < {driver}^({ratio})"


def _negate(expression: str) -> str:
    return expression[1:] if expression.startswith("-") else f"-{expression}"


# ==========================================
# The two networks
# ==========================================

def b3b3_skeleton(spec: B3B3Spec, margin: float = 0.95) -> Skeleton:
    s = spec
    rates = {
        "xi1": (-s.r1, s.e12, -s.c13, -s.c14),
        "xi2": (-s.c21, -s.r2, s.e23, s.e24),
        "xi3": (s.e31, -s.c32, -s.r3, -s.c34),
        "xi4": (s.e41, -s.c42, -s.c43, -s.r4),
    }
    names = {
        "xi1": ("-r1", "e12", "-c13", "-c14"),
        "xi2": ("-c21", "-r2", "e23", "e24"),
        "xi3": ("e31", "-c32", "-r3", "-c34"),
        "xi4": ("e41", "-c42", "-c43", "-r4"),
    }
    radial = {"xi1": 0, "xi2": 1, "xi3": 2, "xi4": 3}
    sections = [
        Section("H1out2", "xi1", (2, 3), "12"),
        Section("H2out3", "xi2", (0, 3), "23"),
        Section("H3out1", "xi3", (1, 3), "31"),
        Section("H2out4", "xi2", (0, 2), "24"),
        Section("H4out1", "xi4", (1, 2), "41"),
    ]
    maps = [
        dict(map_id="phi_123", node="xi2", source="H1out2", target="H2out3", driver=2, fixed_in=0),
        dict(map_id="phi_231", node="xi3", source="H2out3", target="H3out1", driver=0, fixed_in=1),
        dict(map_id="phi_312", node="xi1", source="H3out1", target="H1out2", driver=1, fixed_in=2),
        dict(map_id="phi_124", node="xi2", source="H1out2", target="H2out4", driver=3, fixed_in=0),
        dict(map_id="phi_241", node="xi4", source="H2out4", target="H4out1", driver=0, fixed_in=1),
        dict(map_id="phi_412", node="xi1", source="H4out1", target="H1out2", driver=1, fixed_in=3),
    ]
    cycles = {
        "xi3": ["phi_123", "phi_231", "phi_312"],
        "xi4": ["phi_124", "phi_241", "phi_412"],
    }
    return_maps = {
        "h1_tilde": ("xi3", "H1out2"),
        "h2_tilde": ("xi3", "H2out3"),
        "h3_tilde": ("xi3", "H3out1"),
        "h1": ("xi4", "H1out2"),
        "h2": ("xi4", "H2out4"),
        "h4": ("xi4", "H4out1"),
    }
    return Skeleton("B3B3", rates, names, radial, sections, maps, "H1out2", cycles, return_maps, margin)


def b2b2_skeleton(spec: B2B2Spec, margin: float = 0.95) -> Skeleton:
    s = spec
    rates = {
        "xia": (-s.ra, s.ea2, -s.ca3, -s.ca4),
        "xib": (-s.rb, -s.cb2, s.eb3, s.eb4),
    }
    names = {
        "xia": ("-ra", "ea2", "-ca3", "-ca4"),
        "xib": ("-rb", "-cb2", "eb3", "eb4"),
    }
    radial = {"xia": 0, "xib": 0}
    sections = [
        Section("Ha2out", "xia", (2, 3), "ab"),
        Section("Hb3out", "xib", (1, 3), "ba3"),
        Section("Hb4out", "xib", (1, 2), "ba4"),
    ]
    maps = [
        dict(map_id="phi_b3", node="xib", source="Ha2out", target="Hb3out", driver=2, fixed_in=1),
        dict(map_id="phi_a3", node="xia", source="Hb3out", target="Ha2out", driver=1, fixed_in=2),
        dict(map_id="phi_b4", node="xib", source="Ha2out", target="Hb4out", driver=3, fixed_in=1),
        dict(map_id="phi_a4", node="xia", source="Hb4out", target="Ha2out", driver=1, fixed_in=3),
    ]
    cycles = {
        "C3": ["phi_b3", "phi_a3"],
        "C4": ["phi_b4", "phi_a4"],
    }
    return_maps = {
        "g3b": ("C3", "Ha2out"),
        "g3a": ("C3", "Hb3out"),
        "g4b": ("C4", "Ha2out"),
        "g4a": ("C4", "Hb4out"),
    }
    return Skeleton("B2B2", rates, names, radial, sections, maps, "Ha2out", cycles, return_maps, margin)


def skeleton_for(spec, margin: float = 0.95) -> Skeleton:
    if isinstance(spec, B3B3Spec):
        return b3b3_skeleton(spec, margin)
    if isinstance(spec, B2B2Spec):
        return b2b2_skeleton(spec, margin)
    raise UnknownMap(f"No skeleton for {type(spec).__name__}")
