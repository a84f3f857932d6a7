"""
Validation of eigenvalue specifications against the standing assumptions
"""

from typing import Dict, Iterable, Union

from models.exceptions import AssumptionViolation, InvalidInput, NonGeneric, PositivityViolation, UnsupportedRegime
from models.network import ASSUMPTIONS, B2B2Spec, B3B3Spec, NodeEigenvalues, ValidatedSpec

TOL_GENERIC = 1e-9


def _generic(name: str, value: float, boundary: float = 0.0):
    if abs(value - boundary) < TOL_GENERIC * max(1.0, abs(boundary)):
        raise NonGeneric(f"{name} = {value:.12g} is within {TOL_GENERIC:g} of {boundary:g}")


def _require(condition: bool, inequality: str, **values):
    if not condition:
        shown = ", ".join(f"{k} = {v:.6g}" for k, v in values.items())
        raise AssumptionViolation(f"{inequality} fails ({shown})")


def _sign(value: float) -> str:
    return "+" if value > 0 else "-"


def _position(value: float) -> str:
    if value < 0:
        return "<0"
    return "(0,1)" if value < 1 else ">1"


def validate_node(n: NodeEigenvalues) -> NodeEigenvalues:
    """Positive r, c, e and pairwise distinct non-radial eigenvalues -c, e, t"""
    for name in ("r", "c", "e"):
        if getattr(n, name) <= 0:
            raise PositivityViolation(f"{name} must be positive, got {getattr(n, name)}")
    eigenvalues = {"-c": -n.c, "e": n.e, "t": n.t}
    names = list(eigenvalues)
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            if abs(eigenvalues[first] - eigenvalues[second]) < TOL_GENERIC:
                raise NonGeneric(f"Double eigenvalue {first} = {second} = {eigenvalues[first]:g}")
    return n


def check_positive(spec: Union[B3B3Spec, B2B2Spec]):
    for name in spec.positive_fields:
        value = getattr(spec, name)
        if not value > 0:
            raise PositivityViolation(f"{name} must be positive, got {value}")


def _check_assumption_names(assumptions: Iterable[str]):
    unknown = [name for name in assumptions if name not in ASSUMPTIONS]
    if unknown:
        raise InvalidInput(f"Unknown assumptions {unknown}; expected any of {ASSUMPTIONS}")


def _validate_b3b3(spec: B3B3Spec, assumptions: frozenset) -> Dict[str, str]:
    from networks.b3b3 import cycle_nodes, derived, regime_of

    for cycle in ("xi3", "xi4"):
        for node in cycle_nodes(spec, cycle):
            validate_node(node)

    d = derived(spec)
    g = spec.e24 / spec.e23

    if "contracting_returns" in assumptions:
        _require(d.rho > 1, "rho > 1", rho=d.rho)
        _require(d.rho_t > 1, "rho~ > 1", rho_t=d.rho_t)
        _require(0 < g < 1, "0 < e24/e23 < 1", ratio=g)

    if "weak_transverse" in assumptions:
        for name, value in (("tau", d.tau), ("tau~", d.tau_t), ("delta", d.delta), ("delta~", d.delta_t)):
            _require(value > 0, f"{name} > 0", **{name.replace("~", "_t"): value})
        if spec.c34 < 0:
            _require(-spec.c34 < spec.e31, "|c34| < e31", c34=spec.c34, e31=spec.e31)
        if spec.c43 < 0:
            _require(-spec.c43 < spec.e41, "|c43| < e41", c43=spec.c43, e41=spec.e41)

    _generic("c34", spec.c34)
    _generic("c43", spec.c43)
    _generic("rho", d.rho, 1.0)
    _generic("rho~", d.rho_t, 1.0)
    _generic("e24/e23", g, 1.0)
    _generic("delta", d.delta)
    _generic("delta~", d.delta_t)
    _generic("sigma", d.sigma, 1.0)
    _generic("sigma~", d.sigma_t, 1.0)
    _generic("alpha", d.alpha, 1.0)

    tags = {
        "c34": _sign(spec.c34),
        "c43": _sign(spec.c43),
        "delta": _sign(d.delta),
        "delta_t": _sign(d.delta_t),
        "sigma": _position(d.sigma),
        "sigma_t": _position(d.sigma_t),
    }
    try:
        tags["regime"] = regime_of(spec, d)
    except UnsupportedRegime:
        tags["regime"] = "unsupported"
    return tags


def _validate_b2b2(spec: B2B2Spec, assumptions: frozenset) -> Dict[str, str]:
    from networks.b2b2 import derived_b2

    if not spec.eb3 > spec.eb4:
        raise AssumptionViolation(f"eb3 > eb4 fails (eb3 = {spec.eb3:g}, eb4 = {spec.eb4:g})")
    if "weak_transverse" in assumptions:
        raise InvalidInput("weak_transverse applies to B3B3 networks only")

    d = derived_b2(spec)
    if "contracting_returns" in assumptions:
        _require(d.rho > 1, "rho > 1", rho=d.rho)
        _require(d.rho_t > 1, "rho~ > 1", rho_t=d.rho_t)

    _generic("rho", d.rho, 1.0)
    _generic("rho~", d.rho_t, 1.0)
    _generic("delta", d.delta)
    _generic("delta~", d.delta_t)

    return {
        "delta": _sign(d.delta),
        "delta_t": _sign(d.delta_t),
        "case": "i" if d.delta < 0 else "ii",
    }


def validate_spec(spec: Union[B3B3Spec, B2B2Spec, ValidatedSpec], assumptions: Iterable[str] = ()) -> ValidatedSpec:
    """Check positivity, flagged assumptions and genericity; tag the regime"""
    assumptions = frozenset(assumptions)
    if isinstance(spec, ValidatedSpec):
        assumptions = assumptions | spec.assumptions
        spec = spec.spec
    _check_assumption_names(assumptions)
    check_positive(spec)

    if isinstance(spec, B3B3Spec):
        tags = _validate_b3b3(spec, assumptions)
    elif isinstance(spec, B2B2Spec):
        tags = _validate_b2b2(spec, assumptions)
    else:
        raise InvalidInput(f"Unknown spec type {type(spec).__name__}")

    return ValidatedSpec(spec=spec, assumptions=assumptions, tags=tags)
