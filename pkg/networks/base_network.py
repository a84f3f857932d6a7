from abc import ABC, abstractmethod
from typing import Dict, List, Tuple

from models.extended_real import ExtReal
from models.network import ValidatedSpec
from models.report import ConnectionRecord, IndexReport, PasReport
from networks.escape import EscapeEngine, EscapeSet
from networks.skeleton import skeleton_for
from utils.logger import setup_logger

MODEL_EXTRAPOLATED = "model_extrapolated"


def pas_report(c: Dict[str, Dict[str, ExtReal]], n: Dict[str, ExtReal], cycles) -> PasReport:
    """
    A cycle is p.a.s. when every c-index along it is positive,
    the network when every n-index is.
    """
    flags = {}
    for cycle in cycles:
        flags[cycle] = all(values[cycle].is_positive() for values in c.values() if cycle in values)
    return PasReport(cycles=flags, network=all(value.is_positive() for value in n.values()))


class BaseNetwork(ABC):
    """Indices of one heteroclinic network built from its map skeleton"""

    cycles: Tuple[str, ...] = ()
    connections: Tuple[str, ...] = ()

    def __init__(self, validated: ValidatedSpec, margin: float = 0.95, n_cap: int = 10000):
        self.logger = setup_logger(self.__class__.__name__)
        self.validated = validated
        self.spec = validated.spec
        self.margin = margin
        self.n_cap = n_cap
        self.skeleton = skeleton_for(self.spec, margin)
        self._engine = None

    @property
    def engine(self) -> EscapeEngine:
        if self._engine is None:
            self._engine = EscapeEngine(self.skeleton, n_cap=self.n_cap)
        return self._engine

    @abstractmethod
    def derived(self) -> Dict[str, float]:
        """Return-map quantities of both cycles, keyed by name"""
        pass

    @abstractmethod
    def regime(self) -> str:
        """
        Name of the parameter regime.
        Raises UnsupportedRegime when no index formulas cover the parameters.
        """
        pass

    @abstractmethod
    def c_indices(self) -> Dict[str, Dict[str, ExtReal]]:
        """Connection -> {cycle tag: index relative to that cycle}"""
        pass

    @abstractmethod
    def describe(self, connection: str, escape: EscapeSet) -> Tuple[str, List[str]]:
        """Provenance tag and caveats for one n-index"""
        pass

    def report_caveats(self) -> List[str]:
        return []

    def escape_sets(self) -> Dict[str, EscapeSet]:
        return {connection: self.engine.n_index(connection) for connection in self.connections}

    def n_indices(self) -> Dict[str, ExtReal]:
        self.regime()
        return {connection: escape.index for connection, escape in self.escape_sets().items()}

    def analyze(self) -> IndexReport:
        regime = self.regime()
        self.logger.info(f"🔍 Analyzing {self.spec.network} network ({regime})")

        c = self.c_indices()
        escapes = self.escape_sets()
        n = {connection: escape.index for connection, escape in escapes.items()}
        caveats = self.report_caveats()

        records = []
        for connection in self.connections:
            source, notes = self.describe(connection, escapes[connection])
            if escapes[connection].thick:
                notes = notes + [MODEL_EXTRAPOLATED]
            floor = max(c[connection].values())
            if n[connection] < floor:
                self.logger.warning(f"⚠️ n-index of {connection} is below its c-index ({n[connection]} < {floor})")
                notes = notes + ["n_below_c"]
            records.append(ConnectionRecord(connection=connection, c_index=c[connection],
                                            n_index=n[connection], source=source, caveats=notes))

        pas = pas_report(c, n, self.cycles)
        if pas.network and not any(pas.cycles.values()):
            caveats.append("stabilized_network")

        self.logger.info(f"✅ {self.spec.network}: network p.a.s. = {pas.network}, cycles = {pas.cycles}")
        return IndexReport(network=self.spec.network, regime=regime, derived=self.derived(),
                           records=records, pas=pas, caveats=caveats)
