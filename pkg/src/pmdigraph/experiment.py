"""Monte Carlo trials over independent per-trial seeds."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .matching import components, hall_witness, max_matching
from .model import ModelParams, generate, one_round_graph
from .rng import derive_seed


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    derived_seed: int
    matching_size: int
    has_pm: bool
    witness_K_size: int | None
    n_components: int
    largest_component_size: int


def run_trial(n: int, m, seed: int, trial_index: int, one_round: bool = False) -> TrialResult:
    s = derive_seed(seed, trial_index)
    g = one_round_graph(n, s) if one_round else generate(ModelParams(n, m, s))
    res = max_matching(g)
    wit = None if res.is_perfect else hall_witness(g, res)
    comps = components(g)
    return TrialResult(trial_index, s, res.size, res.is_perfect,
                       None if wit is None else len(wit.K), len(comps), comps[0][2])


def _run_star(args):
    return run_trial(*args)


def run_trials(n: int, m, trials: int, seed: int, one_round: bool = False,
               workers: int = 1) -> list[TrialResult]:
    """Results are identical for any ``workers``; only wall time changes."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(n, m, seed, i, one_round) for i in range(trials)]
    if workers <= 1:
        return [run_trial(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_star, jobs, chunksize=max(1, trials // (4 * workers))))


def summarize(results: list[TrialResult], n: int) -> dict:
    return {
        "trials": len(results),
        "pm_fraction": float(np.mean([r.has_pm for r in results])),
        "mean_matching_ratio": float(np.mean([r.matching_size / n for r in results])),
    }
