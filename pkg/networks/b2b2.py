"""
The network of two B2+ cycles C3 = [xi_a -> xi_b -> xi_a] through x3 and
C4 through x4, sharing the connection from xi_a to xi_b in the (x1, x2) plane.
"""

from typing import Dict, Iterable, List, Optional, Tuple

from indices.index_kernel import b2_cycle_indices, node_ab
from indices.wedge import Wedge, wedge_index
from models.exceptions import AssumptionViolation, CapExceeded, NonGeneric, UnsupportedRegime
from models.extended_real import ExtReal
from models.network import B2B2Spec, B2DerivedQuantities, CycleNodeParams, NodeEigenvalues, ValidatedSpec
from models.report import IndexReport, SequenceReport
from networks.base_network import BaseNetwork
from networks.escape import EscapeSet
from utils.validators import validate_spec

TOL_GENERIC = 1e-9

CYCLES = ("C3", "C4")
CONNECTIONS = ("ab", "ba3", "ba4")
CYCLE_CONNECTIONS = {
    "C3": ("ab", "ba3"),
    "C4": ("ab", "ba4"),
}


def cycle_nodes(spec: B2B2Spec, cycle: str) -> List[NodeEigenvalues]:
    """Eigenvalues at xi_b then xi_a, relative to one cycle"""
    s = spec
    if cycle == "C3":
        return [
            NodeEigenvalues(r=s.rb, c=s.cb2, e=s.eb3, t=s.eb4),
            NodeEigenvalues(r=s.ra, c=s.ca3, e=s.ea2, t=-s.ca4),
        ]
    if cycle == "C4":
        return [
            NodeEigenvalues(r=s.rb, c=s.cb2, e=s.eb4, t=s.eb3),
            NodeEigenvalues(r=s.ra, c=s.ca4, e=s.ea2, t=-s.ca3),
        ]
    raise KeyError(f"Unknown cycle {cycle!r}")


def cycle_params(spec: B2B2Spec, cycle: str) -> List[CycleNodeParams]:
    return [node_ab(node) for node in cycle_nodes(spec, cycle)]


def derived_b2(spec: B2B2Spec) -> B2DerivedQuantities:
    s = spec
    return B2DerivedQuantities(
        rho=s.ca4 * s.cb2 / (s.ea2 * s.eb4),
        delta=s.ca3 / s.ea2 - s.eb3 * s.ca4 / (s.ea2 * s.eb4),
        rho_t=s.ca3 * s.cb2 / (s.ea2 * s.eb3),
        delta_t=s.ca4 / s.ea2 - s.eb4 * s.ca3 / (s.ea2 * s.eb3),
    )


def c_indices(spec: B2B2Spec) -> Dict[str, Dict[str, ExtReal]]:
    result: Dict[str, Dict[str, ExtReal]] = {connection: {} for connection in CONNECTIONS}
    for cycle in CYCLES:
        values = b2_cycle_indices(cycle_params(spec, cycle))
        for connection, value in zip(CYCLE_CONNECTIONS[cycle], values):
            result[connection][cycle] = value
    return result


def _check_term(name: str, n: int, value: float):
    if abs(value - 1.0) < TOL_GENERIC:
        raise NonGeneric(f"{name}_{n} = {value:.12g} is within {TOL_GENERIC:g} of 1")


def _run(name: str, term, n_cap: int) -> List[float]:
    values = []
    for n in range(n_cap):
        value = term(n)
        _check_term(name, n, value)
        values.append(value)
        if value > 1.0:
            return values
    raise CapExceeded(f"{name} sequence undecided after {n_cap} terms")


def b2_escape_sequences(spec: B2B2Spec, n_cap: int = 10000) -> SequenceReport:
    """
    Exponents of the same-exponent escape cusps when the C4 returns contract.
    alpha belongs to the connection from xi_b to xi_a through x3, beta to the
    common connection.
    """
    d = derived_b2(spec)
    if d.delta <= 0:
        raise UnsupportedRegime("Escape sequences need delta > 0")
    r = d.rho_t
    q = spec.eb4 / spec.eb3

    def partial(n: int) -> float:
        return sum(r ** k for k in range(n))

    sequences = {
        "alpha": _run("alpha", lambda n: -d.delta_t * partial(n + 1), n_cap),
        "beta": _run("beta", lambda n: q * (r ** n - (d.rho - 1.0) * partial(n)), n_cap),
    }
    monotone = {name: all(b > a for a, b in zip(values, values[1:])) for name, values in sequences.items()}
    # same-exponent cusps are always thin
    crossing = {name: None for name in sequences}
    return SequenceReport(sequences=sequences, crossing=crossing, monotone=monotone)


def sequence_index(values: Iterable[float]) -> ExtReal:
    """Index of a union of cusps {k x^a <= y <= k' x^a}, one per exponent"""
    return wedge_index([Wedge(a, a, 1.0, 2.0) for a in values if a > 0])


class B2B2Network(BaseNetwork):
    cycles = CYCLES
    connections = CONNECTIONS

    def __init__(self, validated: ValidatedSpec, margin: float = 0.95, n_cap: int = 10000):
        super().__init__(validated, margin, n_cap)
        self._derived = derived_b2(self.spec)

    def derived(self) -> Dict[str, float]:
        return self._derived.model_dump()

    def regime(self) -> str:
        d = self._derived
        if d.rho <= 1 or d.rho_t <= 1:
            raise AssumptionViolation(f"rho > 1 and rho~ > 1 fail (rho = {d.rho:.6g}, rho~ = {d.rho_t:.6g})")
        return "c3_contracting" if d.delta < 0 else "c4_contracting"

    def c_indices(self) -> Dict[str, Dict[str, ExtReal]]:
        return c_indices(self.spec)

    def expectations(self) -> Dict[str, str]:
        if self.regime() == "c3_contracting":
            return {"ab": "pos", "ba4": "pos", "ba3": "inf"}
        return {"ab": "pos", "ba3": "pos", "ba4": "inf"}

    def describe(self, connection: str, escape: EscapeSet) -> Tuple[str, List[str]]:
        regime = self.regime()
        notes = []
        if escape.index.is_pos_inf:
            mechanism = "no escape region near the connection"
        else:
            mechanism = f"same-exponent escape cusps ({len(escape.wedges)} wedges)"

        expected = self.expectations()[connection]
        matches = escape.index.is_pos_inf if expected == "inf" else escape.index.is_positive()
        if not matches:
            self.logger.warning(f"⚠️ {connection}: n-index {escape.index} does not match the expected '{expected}'")
            notes.append("sign_pattern_mismatch")

        if regime == "c4_contracting" and connection in ("ab", "ba3"):
            name = "beta" if connection == "ab" else "alpha"
            predicted = sequence_index(b2_escape_sequences(self.spec, self.n_cap).sequences[name])
            mechanism = f"{name} sequence; {mechanism}"
            if not predicted.is_close(escape.index, 1e-6):
                self.logger.warning(f"⚠️ {connection}: {name} sequence gives {predicted}, escape sets give {escape.index}")
                notes.append("sequence_mismatch")
        return f"{regime}: {mechanism}", notes


def network_for(spec, assumptions: Iterable[str] = (), margin: float = 0.95, n_cap: int = 10000) -> B2B2Network:
    return B2B2Network(validate_spec(spec, assumptions), margin, n_cap)


def b2_network_indices(spec, assumptions: Iterable[str] = (), margin: float = 0.95,
                       n_cap: int = 10000) -> Dict[str, Dict]:
    network = network_for(spec, assumptions, margin, n_cap)
    network.regime()
    return {"c": network.c_indices(), "n": network.n_indices()}


def analyze(spec, assumptions: Iterable[str] = (), margin: float = 0.95, n_cap: int = 10000) -> IndexReport:
    return network_for(spec, assumptions, margin, n_cap).analyze()
