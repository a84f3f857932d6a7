from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from models.exceptions import InvalidSignPattern, NonGeneric
from models.extended_real import ExtReal
from models.network import CycleNodeParams
from utils.logger import setup_logger

TOL_GENERIC = 1e-9


@dataclass(frozen=True)
class CycleIndices:
    """Indices in the caller's node order plus how the case was reached"""

    indices: List[ExtReal]
    rotation: int
    case: str


def check_generic(name: str, value: float, boundary: float = 0.0):
    if abs(value - boundary) < TOL_GENERIC * max(1.0, abs(boundary)):
        raise NonGeneric(f"{name} = {value:.12g} is on the case boundary {boundary:g}")


class BaseCycleTable(ABC):
    """Index table of one cycle type, evaluated in canonical sign order"""

    size: int = 0

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)

    @abstractmethod
    def canonical_patterns(self) -> List[Tuple[int, ...]]:
        """
        Sign patterns of b, in the order they are tried.
        Inputs are rotated until their signs match one of these.
        """
        pass

    @abstractmethod
    def canonical_indices(self, p: Sequence[CycleNodeParams], pattern: Tuple[int, ...]) -> Tuple[List[ExtReal], str]:
        """
        Indices for nodes already rotated into a canonical pattern.
        Returns the indices and the name of the case used.
        """
        pass

    def evaluate(self, p: Sequence[CycleNodeParams]) -> CycleIndices:
        if len(p) != self.size:
            raise ValueError(f"{self.__class__.__name__} needs {self.size} nodes, got {len(p)}")
        for i, node in enumerate(p, 1):
            if node.a <= 0:
                raise ValueError(f"a{i} must be positive, got {node.a}")
            check_generic(f"b{i}", node.b)

        signs = tuple(1 if node.b > 0 else -1 for node in p)
        for pattern in self.canonical_patterns():
            for rotation in range(self.size):
                rotated = tuple(signs[(i + rotation) % self.size] for i in range(self.size))
                if rotated != pattern:
                    continue
                q = [p[(i + rotation) % self.size] for i in range(self.size)]
                canonical, case = self.canonical_indices(q, pattern)
                indices = [None] * self.size
                for i, value in enumerate(canonical):
                    indices[(i + rotation) % self.size] = value
                if rotation:
                    self.logger.debug(f"Rotated nodes by {rotation} into case {case}")
                return CycleIndices(indices, rotation, case)

        raise InvalidSignPattern(f"No case of the {self.size}-node table matches signs {signs}")
