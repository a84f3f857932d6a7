"""
Monte-Carlo estimates of local stability indices on the map skeleton.

Points are drawn uniformly in [0, eps]^2 of the section at a connection and
iterated in logarithmic coordinates. Each (eps, chunk) pair has its own RNG
stream, so the estimate does not depend on how chunks are scheduled.
"""

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from tqdm import tqdm

from models.exceptions import InsufficientSamples, UnknownMap
from models.extended_real import ExtReal, NEG_INF, POS_INF
from models.report import IndexEstimate
from simulation.follow import NETWORK, follow, level_cycles
from simulation.maps import LoopCertificate, SectionPoint, as_skeleton
from utils.config import worker_count
from utils.logger import setup_logger

logger = setup_logger(__name__)

UNDECIDED, ATTRACTED, ESCAPED = 0, 1, 2
OUTCOME_NAMES = {UNDECIDED: "undecided", ATTRACTED: "attracted", ESCAPED: "escaped"}
MIN_EVENTS = 10
MAX_UNDECIDED = 1e-3


@dataclass
class ChunkResult:
    eps_index: int
    chunk_index: int
    points: np.ndarray
    outcome: np.ndarray
    steps: np.ndarray
    reasons: List[str]


class SkeletonSimulator:
    """Vectorized iteration of many points on the map skeleton"""

    def __init__(self, skeleton, level: str = NETWORK, max_steps: int = 200, floor: float = 1e-300):
        self.skeleton = skeleton
        self.level = level
        self.cycles = level_cycles(skeleton, level)
        self.max_steps = max_steps
        self.log_floor = -math.log(floor)
        self.threshold = -math.log(skeleton.margin)
        self.certificates = {cycle: LoopCertificate(skeleton, cycle) for cycle in self.cycles}

        self.section_ids = list(skeleton.sections)
        self.moves: Dict[str, List[Tuple[str, np.ndarray, int]]] = {}
        for section_id in self.section_ids:
            self.moves[section_id] = [
                (m.map_id, m.monomial.as_array(), self.section_ids.index(m.target))
                for m in skeleton.maps_from(section_id)
                if any(m in skeleton.cycles[cycle] for cycle in self.cycles)
            ]

    def run(self, coords: np.ndarray, section_id: str) -> Tuple[np.ndarray, np.ndarray, List[str]]:
        if not set(self.skeleton.cycles_through(section_id)) & set(self.cycles):
            raise UnknownMap(f"Section {section_id} is not on {self.level}")
        n = len(coords)
        w = -np.log(coords)
        section = np.full(n, self.section_ids.index(section_id))
        outcome = np.full(n, UNDECIDED, dtype=np.int8)
        steps = np.zeros(n, dtype=np.int32)
        reasons = [""] * n
        junction = self.section_ids.index(self.skeleton.junction)

        active = np.arange(n)
        for step in range(self.max_steps + 1):
            if active.size == 0:
                break
            floored = active[np.min(w[active], axis=1) > self.log_floor]
            outcome[floored] = ATTRACTED
            for i in floored:
                reasons[i] = "floor"
            active = active[outcome[active] == UNDECIDED]

            current = section[active].copy()
            for index, section_name in enumerate(self.section_ids):
                selected = active[current == index]
                if selected.size == 0:
                    continue
                if index == junction:
                    for cycle, certificate in self.certificates.items():
                        ok = certificate.certify(w[selected])
                        outcome[selected[ok]] = ATTRACTED
                        for i in selected[ok]:
                            reasons[i] = f"certified:{cycle}"
                        selected = selected[~ok]
                if step == self.max_steps or selected.size == 0:
                    continue

                remaining = selected
                for map_id, matrix, target in self.moves[section_name]:
                    out = w[remaining] @ matrix.T
                    ok = np.all(out > self.threshold, axis=1)
                    moved = remaining[ok]
                    w[moved] = out[ok]
                    section[moved] = target
                    steps[moved] += 1
                    remaining = remaining[~ok]
                    if remaining.size == 0:
                        break
                outcome[remaining] = ESCAPED
                label = f"escaped:{self.moves[section_name][0][0]}" if len(self.moves[section_name]) == 1 \
                    else f"escaped:{section_name}"
                for i in remaining:
                    reasons[i] = label
            active = active[outcome[active] == UNDECIDED]

        for i in active:
            reasons[i] = "max_steps"
        return outcome, steps, reasons


def _sample(seed: int, eps_index: int, chunk_index: int, size: int, eps: float) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, eps_index, chunk_index]))
    # (0, eps]: no point on the axes
    return eps * (1.0 - rng.random((size, 2)))


def _run_full(skeleton, level: str, section_id: str, points: np.ndarray, eps: float, rng_seed: Sequence[int],
              max_steps: int) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """Scalar iteration carrying the radial coordinate as well"""
    section = skeleton.sections[section_id]
    radial = skeleton.radial[section.node]
    rng = np.random.default_rng(np.random.SeedSequence(list(rng_seed) + [1]))
    certificates = {cycle: LoopCertificate(skeleton, cycle) for cycle in level_cycles(skeleton, level)}
    outcome = np.zeros(len(points), dtype=np.int8)
    steps = np.zeros(len(points), dtype=np.int32)
    reasons = []
    for i, (x, y) in enumerate(points):
        full = [1.0] * 4
        full[section.coords[0]], full[section.coords[1]] = x, y
        full[radial] = eps * (1.0 - rng.random())
        start = SectionPoint(section_id=section_id, coords=(x, y), full=tuple(full))
        itinerary = follow(skeleton, start, level, max_steps, certificates=certificates)
        kind = itinerary.outcome.kind
        outcome[i] = ATTRACTED if kind == "attracted" else ESCAPED if kind == "escaped" else UNDECIDED
        steps[i] = len(itinerary.points) - 1
        reasons.append(itinerary.outcome.reason)
    return outcome, steps, reasons


def _slope(eps: np.ndarray, fractions: np.ndarray, counts: np.ndarray, what: str) -> Tuple[ExtReal, Optional[float]]:
    """Slope of ln(fraction) against ln(eps) over cells with enough events"""
    if not counts.any():
        return POS_INF, None
    usable = counts >= MIN_EVENTS
    if usable.sum() < 2:
        raise InsufficientSamples(f"Only {int(usable.sum())} eps cells have {MIN_EVENTS}+ {what} points")
    fit = stats.linregress(np.log(eps[usable]), np.log(fractions[usable]))
    return ExtReal(fit.slope), float(fit.stderr)


def _dump_csv(path: str, eps_grid: Sequence[float], chunks: Sequence[ChunkResult]):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["eps", "x", "y", "outcome", "steps", "exit_reason"])
        writer.writeheader()
        for chunk in chunks:
            eps = eps_grid[chunk.eps_index]
            for (x, y), outcome, steps, reason in zip(chunk.points, chunk.outcome, chunk.steps, chunk.reasons):
                writer.writerow({"eps": f"{eps:.12g}", "x": f"{x:.12g}", "y": f"{y:.12g}",
                                 "outcome": OUTCOME_NAMES[int(outcome)], "steps": int(steps),
                                 "exit_reason": reason})


def summary_path(csv_path: str) -> str:
    stem, ext = os.path.splitext(csv_path)
    return f"{stem}_summary{ext or '.csv'}"


def _dump_summary(path: str, eps_grid: Sequence[float], attracted: np.ndarray, escaped: np.ndarray,
                  undecided: np.ndarray, samples: int):
    """One row per eps; undecided points count as not attracted in the fraction"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["eps", "samples", "attracted", "escaped", "undecided",
                                               "attracted_fraction", "undecided_fraction"])
        writer.writeheader()
        for i, eps in enumerate(eps_grid):
            writer.writerow({"eps": f"{eps:.12g}", "samples": samples, "attracted": int(attracted[i]),
                             "escaped": int(escaped[i]), "undecided": int(undecided[i]),
                             "attracted_fraction": f"{attracted[i] / samples:.12g}",
                             "undecided_fraction": f"{undecided[i] / samples:.12g}"})


def estimate_sigma_mc(spec, connection: str, level: str = NETWORK,
                      eps_grid: Sequence[float] = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4),
                      samples: int = 100000, seed: int = 2024, margin: float = 0.95,
                      max_steps: int = 200, floor: float = 1e-300, chunk_size: int = 20000,
                      workers: Optional[int] = None, show_progress: bool = False,
                      csv_path: Optional[str] = None, full_state: bool = False) -> IndexEstimate:
    """
    Estimate sigma = sigma_plus - sigma_minus at a connection, relative to
    one cycle (level = cycle tag) or to the whole network.
    """
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid or any(not 0.0 < e < margin for e in eps_grid):
        raise ValueError(f"eps grid must lie in (0, {margin})")
    if samples <= 0:
        raise ValueError("samples must be positive")

    skeleton = as_skeleton(spec, margin)
    section_id = skeleton.section_of(connection).section_id
    simulator = SkeletonSimulator(skeleton, level, max_steps, floor)

    tasks = []
    for eps_index in range(len(eps_grid)):
        for chunk_index, start in enumerate(range(0, samples, chunk_size)):
            tasks.append((eps_index, chunk_index, min(chunk_size, samples - start)))

    def run_task(task) -> ChunkResult:
        eps_index, chunk_index, size = task
        eps = eps_grid[eps_index]
        points = _sample(seed, eps_index, chunk_index, size, eps)
        if full_state:
            outcome, steps, reasons = _run_full(skeleton, level, section_id, points, eps,
                                                (seed, eps_index, chunk_index), max_steps)
        else:
            outcome, steps, reasons = simulator.run(points, section_id)
        return ChunkResult(eps_index, chunk_index, points, outcome, steps, reasons)

    logger.info(f"🔍 MC estimate at {connection} ({level}): {samples} samples x {len(eps_grid)} eps values")
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        results = pool.map(run_task, tasks)
        chunks = list(tqdm(results, total=len(tasks), desc=f"sigma {connection}", disable=not show_progress))

    attracted = np.zeros(len(eps_grid), dtype=int)
    escaped = np.zeros(len(eps_grid), dtype=int)
    undecided = np.zeros(len(eps_grid), dtype=int)
    for chunk in chunks:
        attracted[chunk.eps_index] += int(np.sum(chunk.outcome == ATTRACTED))
        escaped[chunk.eps_index] += int(np.sum(chunk.outcome == ESCAPED))
        undecided[chunk.eps_index] += int(np.sum(chunk.outcome == UNDECIDED))

    if csv_path:
        _dump_csv(csv_path, eps_grid, chunks)
        _dump_summary(summary_path(csv_path), eps_grid, attracted, escaped, undecided, samples)

    worst = undecided.max() / samples
    if undecided.any():
        logger.warning(f"⚠️ {int(undecided.sum())} undecided points counted as not attracted (worst cell {worst:.3%})")
    if worst > MAX_UNDECIDED:
        raise InsufficientSamples(f"{worst:.2%} of the samples stayed undecided after {max_steps} steps")

    eps = np.array(eps_grid)
    fraction = attracted / samples
    sigma_plus, stderr_plus = _slope(eps, 1.0 - fraction, escaped, "escaping")
    sigma_minus, stderr_minus = _slope(eps, fraction, attracted, "attracted")
    if sigma_plus.is_pos_inf:
        sigma = POS_INF
    elif sigma_minus.is_pos_inf:
        sigma = NEG_INF
    else:
        sigma = sigma_plus - sigma_minus

    logger.info(f"✅ {connection} ({level}): sigma ~ {sigma} (plus {sigma_plus}, minus {sigma_minus})")
    return IndexEstimate(
        network=skeleton.network, connection=connection, level=level, eps_grid=eps_grid,
        attracted_fraction=fraction.tolist(), attracted=attracted.tolist(), escaped=escaped.tolist(),
        undecided=undecided.tolist(), sigma_plus=sigma_plus, sigma_minus=sigma_minus, sigma=sigma,
        stderr_plus=stderr_plus, stderr_minus=stderr_minus, samples=samples, seed=seed,
    )
