"""
The network of two B3- cycles sharing the connection from xi1 to xi2.

The xi3-cycle visits xi1 -> xi2 -> xi3 -> xi1 and the xi4-cycle visits
xi1 -> xi2 -> xi4 -> xi1. Quantities of the xi3-cycle carry the suffix _t.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from indices.index_kernel import b3_cycle_indices, node_ab
from models.exceptions import HetNetError, CapExceeded, NonGeneric, SearchFailed, UnsupportedRegime
from models.extended_real import ExtReal
from models.network import B3B3Spec, CycleNodeParams, DerivedQuantities, NodeEigenvalues, ValidatedSpec
from models.report import IndexReport, SequenceReport
from networks.base_network import BaseNetwork
from networks.escape import EscapeSet
from networks.skeleton import b3b3_skeleton
from utils.logger import setup_logger
from utils.validators import validate_spec

logger = setup_logger(__name__)

TOL_GENERIC = 1e-9

CYCLES = ("xi3", "xi4")
CONNECTIONS = ("12", "23", "31", "24", "41")
CYCLE_CONNECTIONS = {
    "xi3": ("12", "23", "31"),
    "xi4": ("12", "24", "41"),
}
# (connection, cycle) in the order sigma~12, sigma~23, sigma~31, sigma12, sigma24, sigma41
INDEX_ORDER = [("12", "xi3"), ("23", "xi3"), ("31", "xi3"), ("12", "xi4"), ("24", "xi4"), ("41", "xi4")]

REGIMES = ["contracting_network", "competing_cycles", "negative_c34", "negative_c43", "stabilizing_mechanism"]

# centred on parameter sets with the wanted index pattern
NONPAS_BASE = dict(e12=1.0, e23=2.0, e24=1.0, e31=1.0, e41=1.0, c13=0.8, c14=1.0, c21=1.0,
                   c32=3.0, c34=-0.4, c42=1.5, c43=2.0)
NONPAS_BOX = {
    "c13": (0.7, 0.9), "c14": (0.9, 1.1), "c21": (0.9, 1.1), "c32": (2.5, 3.5),
    "c34": (-0.5, -0.3), "c42": (1.2, 1.8), "c43": (1.5, 2.5),
}
STABILIZING_BASE = dict(e12=1.0, e23=2.0, e24=1.0, e31=1.0, e41=1.0, c13=3.5, c14=0.5, c21=1.5,
                        c32=1.0, c34=-0.5, c42=2.0, c43=1.0)
STABILIZING_BOX = {
    "c13": (3.0, 4.0), "c14": (0.4, 0.6), "c21": (1.4, 1.6), "c32": (0.9, 1.1),
    "c34": (-0.6, -0.4), "c42": (1.5, 2.5), "c43": (0.5, 1.5),
}


# ==========================================
# Node data and derived quantities
# ==========================================

def cycle_nodes(spec: B3B3Spec, cycle: str) -> List[NodeEigenvalues]:
    """Eigenvalues at xi2, the cycle's own node and xi1, relative to that cycle"""
    s = spec
    if cycle == "xi3":
        return [
            NodeEigenvalues(r=s.r2, c=s.c21, e=s.e23, t=s.e24),
            NodeEigenvalues(r=s.r3, c=s.c32, e=s.e31, t=-s.c34),
            NodeEigenvalues(r=s.r1, c=s.c13, e=s.e12, t=-s.c14),
        ]
    if cycle == "xi4":
        return [
            NodeEigenvalues(r=s.r2, c=s.c21, e=s.e24, t=s.e23),
            NodeEigenvalues(r=s.r4, c=s.c42, e=s.e41, t=-s.c43),
            NodeEigenvalues(r=s.r1, c=s.c14, e=s.e12, t=-s.c13),
        ]
    raise KeyError(f"Unknown cycle {cycle!r}")


def cycle_params(spec: B3B3Spec, cycle: str) -> List[CycleNodeParams]:
    return [node_ab(node) for node in cycle_nodes(spec, cycle)]


def _loop_quantities(p: Sequence[CycleNodeParams]) -> Tuple[float, float, float]:
    """rho, delta and nu of a three-node loop"""
    (a1, b1), (a2, b2), (a3, b3) = ((n.a, n.b) for n in p)
    rho = a1 * a2 * a3
    delta = b1 * a2 * a3 + b3 * a2 + b2
    nu = b1 + a1 * b2 + a1 * a2 * b3
    return rho, delta, nu


def derived(spec: B3B3Spec, nu_convention: str = "composed") -> DerivedQuantities:
    s = spec
    rho, delta, nu = _loop_quantities(cycle_params(spec, "xi4"))
    rho_t, delta_t, nu_t = _loop_quantities(cycle_params(spec, "xi3"))

    tau = s.c13 / s.e12 - s.e23 * s.c14 / (s.e12 * s.e24) + s.c14 * s.c21 * s.c43 / (s.e12 * s.e41 * s.e24)
    tau_t = s.c14 / s.e12 - s.e24 * s.c13 / (s.e12 * s.e23) + s.c13 * s.c21 * s.c34 / (s.e12 * s.e31 * s.e23)
    sigma = (s.c14 / s.e12) * (s.e23 / s.e24 - s.c13 / s.c14)
    sigma_t = (s.c13 / s.e12) * (s.e24 / s.e23 - s.c14 / s.c13)

    alpha = s.e24 / s.e23 - s.c21 * s.c34 / (s.e23 * s.e31)
    lam = s.e23 / s.e24 - s.c21 * s.c43 / (s.e24 * s.e41)

    nu_display = nu + 2.0 * s.e23 / s.e24
    nu_t_display = nu_t + 2.0 * s.e24 / s.e23
    if nu_convention == "display":
        nu, nu_t = nu_display, nu_t_display
    elif nu_convention != "composed":
        raise ValueError(f"Unknown nu convention {nu_convention!r}")

    return DerivedQuantities(
        rho=rho, nu=nu, delta=delta, tau=tau, sigma=sigma,
        rho_t=rho_t, nu_t=nu_t, delta_t=delta_t, tau_t=tau_t, sigma_t=sigma_t,
        alpha=alpha, beta=tau_t / alpha, lam=lam,
        nu_display=nu_display, nu_t_display=nu_t_display,
    )


def weak_transverse_holds(spec: B3B3Spec, d: DerivedQuantities) -> bool:
    if min(d.tau, d.tau_t, d.delta, d.delta_t) <= 0:
        return False
    if spec.c34 < 0 and -spec.c34 >= spec.e31:
        return False
    if spec.c43 < 0 and -spec.c43 >= spec.e41:
        return False
    return True


def regime_of(spec: B3B3Spec, d: Optional[DerivedQuantities] = None) -> str:
    d = d or derived(spec)
    if d.rho <= 1 or d.rho_t <= 1:
        raise UnsupportedRegime(f"Return maps do not contract (rho = {d.rho:.6g}, rho~ = {d.rho_t:.6g})")

    if spec.c34 > 0 and spec.c43 > 0:
        if d.delta > 0 and d.delta_t > 0:
            return "contracting_network"
        if d.delta * d.delta_t < 0:
            return "competing_cycles"
        raise UnsupportedRegime("Both delta and delta~ are negative")

    if spec.c34 < 0 and spec.c43 > 0:
        if d.delta_t < 0 < d.delta:
            return "stabilizing_mechanism"
        if weak_transverse_holds(spec, d):
            return "negative_c34"
        raise UnsupportedRegime("c34 < 0 outside the weak-transverse and stabilizing regimes")

    if spec.c43 < 0 and spec.c34 > 0:
        if weak_transverse_holds(spec, d):
            return "negative_c43"
        raise UnsupportedRegime("c43 < 0 outside the weak-transverse regime")

    raise UnsupportedRegime("c34 < 0 and c43 < 0 together: regime not covered by any known index result")


# ==========================================
# Cycle indices
# ==========================================

def c_indices(spec: B3B3Spec) -> Dict[str, Dict[str, ExtReal]]:
    """Connection -> {cycle: c-index}"""
    result: Dict[str, Dict[str, ExtReal]] = {connection: {} for connection in CONNECTIONS}
    for cycle in CYCLES:
        values = b3_cycle_indices(cycle_params(spec, cycle))
        for connection, value in zip(CYCLE_CONNECTIONS[cycle], values):
            result[connection][cycle] = value
    return result


def c_index_list(spec: B3B3Spec) -> List[ExtReal]:
    c = c_indices(spec)
    return [c[connection][cycle] for connection, cycle in INDEX_ORDER]


# ==========================================
# Escape sequences of the stabilizing mechanism
# ==========================================

def _check_term(name: str, n: int, value: float):
    if abs(value - 1.0) < TOL_GENERIC:
        raise NonGeneric(f"{name}_{n} = {value:.12g} is within {TOL_GENERIC:g} of 1")


def _run_pair(name: str, plain, bar, n_cap: int) -> Tuple[List[float], List[float], Optional[int]]:
    """Iterate one (plain, bar) exponent pair until the smaller term passes 1"""
    plains: List[float] = []
    bars: List[float] = []
    crossing = None
    for n in range(n_cap):
        p, b = plain(n), bar(n)
        _check_term(name, n, p)
        _check_term(f"{name}_bar", n, b)
        plains.append(p)
        bars.append(b)
        if crossing is None and b < 1.0 < p:
            crossing = n
        if min(p, b) > 1.0:
            return plains, bars, crossing
    raise CapExceeded(f"{name} sequences undecided after {n_cap} terms")


def _increasing(values: List[float]) -> bool:
    return all(later > earlier for earlier, later in zip(values, values[1:]))


def escape_sequences(spec: B3B3Spec, n_cap: int = 10000, nu_convention: str = "composed") -> SequenceReport:
    s = spec
    d = derived(spec, nu_convention)
    if not (s.c34 < 0 and d.delta_t < 0 < d.delta):
        raise UnsupportedRegime("Escape sequences need c34 < 0 and delta~ < 0 < delta")

    r = d.rho_t
    g = s.e24 / s.e23

    def partial(n: int) -> float:
        # sum of r^k for k < n
        return sum(r ** k for k in range(n))

    pairs = {
        "gamma": (lambda n: r ** n * d.alpha - d.nu_t * partial(n),
                  lambda n: r ** n * g - d.nu_t * partial(n)),
        "zeta": (lambda n: -d.tau_t * partial(n + 1),
                 lambda n: r ** n * d.sigma_t - d.tau_t * partial(n)),
        "eta": (lambda n: -(s.c34 / s.e31) * r ** (n + 1) - d.delta_t * partial(n + 1),
                lambda n: -d.delta_t * partial(n + 1)),
    }

    sequences: Dict[str, List[float]] = {}
    crossing: Dict[str, Optional[int]] = {}
    monotone: Dict[str, bool] = {}
    for name, (plain, bar) in pairs.items():
        plains, bars, n_star = _run_pair(name, plain, bar, n_cap)
        sequences[name] = plains
        sequences[f"{name}_bar"] = bars
        crossing[name] = n_star
        monotone[name] = _increasing(plains) and _increasing(bars)
        if not monotone[name]:
            logger.warning(f"⚠️ {name} sequences are not increasing for {spec}")

    return SequenceReport(sequences=sequences, crossing=crossing, monotone=monotone)


def nu_convention_comparison(spec: B3B3Spec, n_terms: int = 6) -> Dict[str, float]:
    """
    Largest residual of the increment identity
    gamma_(n+1) - gamma_n = rho~^n ((rho~ - 1)(alpha - e24/e23) - (c21/e23) delta~)
    with gamma built from each convention of nu~.
    """
    s = spec
    d = derived(spec)
    r = d.rho_t
    g = s.e24 / s.e23
    result = {"nu_t_composed": d.nu_t, "nu_t_display": d.nu_t_display}
    for label, nu_t in (("composed", d.nu_t), ("display", d.nu_t_display)):
        gamma = [r ** n * d.alpha - nu_t * sum(r ** k for k in range(n)) for n in range(n_terms + 1)]
        residual = 0.0
        for n in range(n_terms):
            expected = r ** n * ((r - 1.0) * (d.alpha - g) - (s.c21 / s.e23) * d.delta_t)
            residual = max(residual, abs(gamma[n + 1] - gamma[n] - expected))
        result[f"{label}_residual"] = residual
    return result


def return_map_matrix(spec: B3B3Spec, map_id: str) -> np.ndarray:
    skeleton = b3b3_skeleton(spec)
    return skeleton.compose(skeleton.resolve(map_id)).as_array()


def stabilization_condition(spec: B3B3Spec) -> bool:
    """Sufficient condition for all n-indices to be positive when c34 < 0"""
    s = spec
    if not (s.c34 < 0 and -s.c34 < s.e31):
        return False
    d = derived(spec)
    bound = min(-s.e23 / s.e24, -s.e23 * (s.e31 + s.c34) / (s.e24 * s.c32))
    ratio = s.e24 / s.e23
    lower = 1.0 - s.c21 / s.e23
    upper = 1.0 - (s.c21 / s.e23) * (-s.c34 / s.e31)
    return d.sigma < bound and lower < ratio < upper


# ==========================================
# Network indices
# ==========================================

def _matches(value: ExtReal, expected: str) -> bool:
    if expected == "inf":
        return value.is_pos_inf
    if expected == "pos":
        return value.is_positive()
    if expected == "finite_pos":
        return value.is_positive() and value.is_finite
    if expected == "neg":
        return value.is_negative()
    if expected == "finite":
        return value.is_finite
    raise ValueError(expected)


class B3B3Network(BaseNetwork):
    cycles = CYCLES
    connections = CONNECTIONS

    def __init__(self, validated: ValidatedSpec, margin: float = 0.95, n_cap: int = 10000,
                 nu_convention: str = "composed"):
        super().__init__(validated, margin, n_cap)
        self.nu_convention = nu_convention
        self._derived = derived(self.spec, nu_convention)
        self._regime = None
        self._sequences = None
        self._expected = None

    def derived(self) -> Dict[str, float]:
        return self._derived.model_dump()

    def regime(self) -> str:
        if self._regime is None:
            self._regime = regime_of(self.spec, derived(self.spec))
        return self._regime

    def c_indices(self) -> Dict[str, Dict[str, ExtReal]]:
        return c_indices(self.spec)

    def sequences(self) -> Optional[SequenceReport]:
        if self.regime() != "stabilizing_mechanism":
            return None
        if self._sequences is None:
            self._sequences = escape_sequences(self.spec, self.n_cap, self.nu_convention)
        return self._sequences

    def report_caveats(self) -> List[str]:
        caveats = []
        if self.nu_convention == "display":
            caveats.append("nu_display_convention")
        if self.regime() == "negative_c34":
            caveats.append("sigma14_read_as_sigma24")
            d = self._derived
            if not (d.sigma_t < 0 < d.sigma):
                self.logger.warning("⚠️ c34 < 0 with weak transverse rates should force sigma~ < 0 < sigma")
                caveats.append("sigma_sign_mismatch")
        return caveats

    def expectations(self) -> Dict[str, str]:
        """Signs of the n-indices the regime's results predict"""
        if self._expected is None:
            self._expected = self._expectations()
        return self._expected

    def _expectations(self) -> Dict[str, str]:
        regime = self.regime()
        d = self._derived
        c = self.c_indices()

        if regime == "contracting_network":
            return {conn: ("inf" if max(c[conn].values()).is_pos_inf else "finite_pos") for conn in CONNECTIONS}

        if regime == "competing_cycles":
            if d.delta < 0:
                return {"12": "pos", "24": "pos", "41": "pos", "23": "inf", "31": "inf"}
            return {"12": "pos", "23": "pos", "31": "pos", "24": "inf", "41": "inf"}

        if regime == "negative_c34":
            if c["12"]["xi3"].is_negative() and c["41"]["xi4"].is_positive():
                return {"31": "inf", "24": "inf", "23": "finite_pos", "41": "finite_pos", "12": "neg"}
            return {"23": "finite_pos", "24": "inf"}

        if regime == "negative_c43":
            if c["31"]["xi3"].is_negative():
                return {"23": "inf", "41": "inf", "12": "finite_pos", "24": "finite_pos",
                        "31": "neg" if -d.lam < -d.tau else "finite_pos"}
            return {"23": "inf"}

        # stabilizing mechanism
        seq = self.sequences()
        expected = {"24": "inf"}
        for name, conn in (("gamma", "12"), ("zeta", "31"), ("eta", "23")):
            expected[conn] = "neg" if seq.crossing[name] is not None else "finite_pos"
        if d.sigma < 0:
            expected["41"] = "inf"
        elif d.sigma < 1:
            expected["41"] = "finite_pos"
        else:
            expected["41"] = "neg"
        return expected

    def describe(self, connection: str, escape: EscapeSet) -> Tuple[str, List[str]]:
        regime = self.regime()
        if escape.index.is_pos_inf:
            mechanism = "no escape region near the connection"
        elif escape.thick:
            mechanism = "thick escape cusp"
        else:
            mechanism = f"thin escape cusps ({len(escape.wedges)} wedges)"
        if escape.restricted:
            mechanism += ", restricted local domain"

        if regime == "stabilizing_mechanism":
            seq = self.sequences()
            names = {"12": "gamma", "31": "zeta", "23": "eta"}
            if connection in names:
                n_star = seq.crossing[names[connection]]
                crossing = "no crossing" if n_star is None else f"crossing at n={n_star}"
                mechanism = f"{names[connection]} sequences, {crossing}; {mechanism}"
            elif connection == "41":
                mechanism = f"sign of sigma; {mechanism}"

        notes = []
        expected = self.expectations().get(connection)
        if expected and not _matches(escape.index, expected):
            self.logger.warning(f"⚠️ {connection}: n-index {escape.index} does not match the expected '{expected}'")
            notes.append("sign_pattern_mismatch")
        return f"{regime}: {mechanism}", notes


def network_for(spec, assumptions: Iterable[str] = (), margin: float = 0.95, n_cap: int = 10000,
                nu_convention: str = "composed") -> B3B3Network:
    validated = validate_spec(spec, assumptions)
    return B3B3Network(validated, margin, n_cap, nu_convention)


def n_indices(spec, assumptions: Iterable[str] = (), margin: float = 0.95, n_cap: int = 10000) -> Dict[str, ExtReal]:
    return network_for(spec, assumptions, margin, n_cap).n_indices()


def analyze(spec, assumptions: Iterable[str] = (), margin: float = 0.95, n_cap: int = 10000,
            nu_convention: str = "composed") -> IndexReport:
    return network_for(spec, assumptions, margin, n_cap, nu_convention).analyze()


# ==========================================
# Witness searches
# ==========================================

def _draw(rng: np.random.Generator, base: B3B3Spec, box: Dict[str, Tuple[float, float]]) -> B3B3Spec:
    values = {name: float(rng.uniform(lo, hi)) for name, (lo, hi) in sorted(box.items())}
    return base.replace(**values)


def _nonpas_inequalities(spec: B3B3Spec) -> bool:
    d = derived(spec)
    kappa = d.alpha
    return spec.c34 < 0 < spec.c43 and 0 < d.tau_t < kappa < 1 and d.sigma > 1


def find_nonpas_witness(box: Optional[Dict[str, Tuple[float, float]]] = None, seed: int = 0,
                        base: Optional[B3B3Spec] = None, max_draws: int = 20000) -> B3B3Spec:
    """
    Rejection-sample a network whose xi3-cycle is p.a.s. while the
    network is not, because sigma41 turns negative.
    """
    box = box if box is not None else NONPAS_BOX
    base = base or B3B3Spec(**NONPAS_BASE)
    rng = np.random.default_rng(seed)
    logger.info(f"🔍 Searching for a non-p.a.s. network ({max_draws} draws, seed {seed})")

    for draw in range(max_draws):
        spec = _draw(rng, base, box)
        if not _nonpas_inequalities(spec):
            continue
        try:
            report = analyze(spec, ["contracting_returns", "weak_transverse"])
        except HetNetError as e:
            logger.debug(f"Draw {draw} rejected: {e}")
            continue
        if report.pas.cycles["xi3"] and report.n_index("41").is_negative():
            logger.info(f"✅ Witness found after {draw + 1} draws")
            return spec

    raise SearchFailed(f"No non-p.a.s. witness in {max_draws} draws")


def find_stabilizing_witnesses(box: Optional[Dict[str, Tuple[float, float]]] = None, seed: int = 0,
                               count: int = 5, base: Optional[B3B3Spec] = None,
                               max_draws: int = 20000) -> List[B3B3Spec]:
    """Networks with all n-indices positive although neither cycle is p.a.s."""
    box = box if box is not None else STABILIZING_BOX
    base = base or B3B3Spec(**STABILIZING_BASE)
    rng = np.random.default_rng(seed)
    found: List[B3B3Spec] = []
    logger.info(f"🔍 Searching for {count} stabilizing witnesses ({max_draws} draws, seed {seed})")

    for draw in range(max_draws):
        spec = _draw(rng, base, box)
        if not stabilization_condition(spec):
            continue
        try:
            report = analyze(spec, ["contracting_returns"])
        except HetNetError as e:
            logger.debug(f"Draw {draw} rejected: {e}")
            continue
        if report.pas.network and not any(report.pas.cycles.values()):
            found.append(spec)
            if len(found) == count:
                logger.info(f"✅ {count} witnesses after {draw + 1} draws")
                return found

    raise SearchFailed(f"Found {len(found)} of {count} stabilizing witnesses in {max_draws} draws")
