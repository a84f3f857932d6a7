"""
Single-cycle stability indices for the B2+ and B3- cycle types
"""

from typing import List, Sequence, Tuple

from indices.base_cycle import BaseCycleTable, CycleIndices, check_generic
from models.extended_real import ExtReal, POS_INF, NEG_INF, ext_min
from models.network import CycleNodeParams, NodeEigenvalues
from utils.validators import validate_node


def f_index(alpha: float) -> ExtReal:
    """Index function with second argument 1"""
    check_generic("f_index argument + 1", alpha + 1.0)
    if alpha >= 0:
        return POS_INF
    if alpha > -1.0:
        return ExtReal(-1.0 / alpha - 1.0)
    return ExtReal(alpha + 1.0)


def node_ab(n: NodeEigenvalues) -> CycleNodeParams:
    validate_node(n)
    return CycleNodeParams(a=n.c / n.e, b=-n.t / n.e)


def _all(value: ExtReal, size: int) -> List[ExtReal]:
    return [value] * size


class B2CycleTable(BaseCycleTable):
    size = 2

    def canonical_patterns(self) -> List[Tuple[int, ...]]:
        return [(-1, -1), (1, 1), (-1, 1)]

    def canonical_indices(self, p: Sequence[CycleNodeParams], pattern: Tuple[int, ...]) -> Tuple[List[ExtReal], str]:
        (a1, b1), (a2, b2) = ((n.a, n.b) for n in p)
        rho = a1 * a2

        if pattern == (-1, -1):
            return _all(NEG_INF, 2), "i"

        check_generic("a1*a2", rho, 1.0)
        if pattern == (1, 1):
            if rho < 1:
                return _all(NEG_INF, 2), "ii.a"
            return _all(POS_INF, 2), "ii.b"

        delta = b1 * a2 + b2
        check_generic("b1*a2 + b2", delta)
        if rho < 1 or delta < 0:
            return _all(NEG_INF, 2), "iii.a"
        return [f_index(b1), POS_INF], "iii.b"


class B3CycleTable(BaseCycleTable):
    size = 3

    def canonical_patterns(self) -> List[Tuple[int, ...]]:
        return [(-1, -1, -1), (1, 1, 1), (-1, 1, 1), (-1, -1, 1)]

    def canonical_indices(self, p: Sequence[CycleNodeParams], pattern: Tuple[int, ...]) -> Tuple[List[ExtReal], str]:
        (a1, b1), (a2, b2), (a3, b3) = ((n.a, n.b) for n in p)
        rho = a1 * a2 * a3

        if pattern == (-1, -1, -1):
            return _all(NEG_INF, 3), "i"

        check_generic("a1*a2*a3", rho, 1.0)
        if pattern == (1, 1, 1):
            if rho < 1:
                return _all(NEG_INF, 3), "ii.a"
            return _all(POS_INF, 3), "ii.b"

        delta = b1 * a2 * a3 + b3 * a2 + b2
        check_generic("b1*a2*a3 + b3*a2 + b2", delta)

        if pattern == (-1, 1, 1):
            if rho < 1 or delta < 0:
                return _all(NEG_INF, 3), "iii.a"
            return [f_index(b1), POS_INF, f_index(b3 + b1 * a3)], "iii.b"

        # two negative b: (-1, -1, 1)
        second = b2 * a1 * a3 + b1 * a3 + b3
        check_generic("b2*a1*a3 + b1*a3 + b3", second)
        if rho < 1 or second < 0 or delta < 0:
            return _all(NEG_INF, 3), "iv.a"
        return [ext_min(f_index(b1), f_index(b1 + b2 * a1)), f_index(b2), POS_INF], "iv.b"


_B2_TABLE = B2CycleTable()
_B3_TABLE = B3CycleTable()


def b2_cycle_indices_detail(p: Sequence[CycleNodeParams]) -> CycleIndices:
    return _B2_TABLE.evaluate(p)


def b3_cycle_indices_detail(p: Sequence[CycleNodeParams]) -> CycleIndices:
    return _B3_TABLE.evaluate(p)


def b2_cycle_indices(p: Sequence[CycleNodeParams]) -> List[ExtReal]:
    """Indices of a B2+ cycle; entry j belongs to the connection arriving at node j"""
    return b2_cycle_indices_detail(p).indices


def b3_cycle_indices(p: Sequence[CycleNodeParams]) -> List[ExtReal]:
    """Indices of a B3- cycle; entry j belongs to the connection arriving at node j"""
    return b3_cycle_indices_detail(p).indices
