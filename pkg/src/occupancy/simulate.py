"""Monte Carlo simulation of allocation by sets.

Trials are grouped into fixed-size blocks and each block draws from its own
Philox stream keyed by (seed, block index), so counts do not depend on how
many worker threads run the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .exact import ExactPmf
from .scheme import SchemeParams

BLOCK_SIZE = 4096


@dataclass(frozen=True)
class SimConfig:
    params: SchemeParams
    trials: int
    seed: int = 0
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class EmpiricalPmf:
    params: SchemeParams
    trials: int
    counts: Dict[int, int] = field(default_factory=dict)

    def frequency(self, k: int) -> float:
        return self.counts.get(k, 0) / self.trials

    def stderr(self, k: int) -> float:
        f = self.frequency(k)
        return math.sqrt(f * (1 - f) / self.trials)

    def rows(self) -> list:
        return [
            {"k": k, "count": c, "freq": c / self.trials, "stderr": self.stderr(k)}
            for k, c in sorted(self.counts.items())
        ]

    def to_json(self) -> dict:
        return {"trials": self.trials, "counts": {str(k): c for k, c in sorted(self.counts.items())},
                "rows": self.rows()}

    def to_csv(self) -> str:
        lines = ["k,count,freq,stderr"]
        lines += [f"{r['k']},{r['count']},{r['freq']!r},{r['stderr']!r}" for r in self.rows()]
        return "\n".join(lines) + "\n"


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def sample_sets(params: SchemeParams, rng: np.random.Generator, size: int) -> list:
    """Cells chosen by each set in ``size`` independent allocations.

    Returns one (size, n_l) integer array per set, drawn by a partial
    Fisher-Yates shuffle of the cell indices (uniform over the C(N, n_l)
    subsets).
    """
    N = params.N
    rows = np.arange(size)
    base = np.broadcast_to(np.arange(N), (size, N))
    chosen = []
    for nl in params.n:
        buf = base.copy()
        for j in range(nl):
            pick = rng.integers(j, N, size=size)
            held = buf[rows, j].copy()
            buf[rows, j] = buf[rows, pick]
            buf[rows, pick] = held
        chosen.append(buf[:, :nl].copy())
    return chosen


def allocate_block(params: SchemeParams, rng: np.random.Generator, size: int) -> np.ndarray:
    """Empty-cell counts of ``size`` independent allocations."""
    occupied = np.zeros((size, params.N), dtype=bool)
    rows = np.arange(size)[:, None]
    for cells in sample_sets(params, rng, size):
        occupied[rows, cells] = True
    return params.N - occupied.sum(axis=1)


def allocate_once(params: SchemeParams, rng: np.random.Generator) -> int:
    return int(allocate_block(params, rng, 1)[0])


def _run_block(config: SimConfig, block: int) -> np.ndarray:
    start = block * config.block_size
    size = min(config.block_size, config.trials - start)
    ks = allocate_block(config.params, block_rng(config.seed, block), size)
    return np.bincount(ks, minlength=config.params.N + 1)


def empirical_pmf(config: SimConfig, threads: Optional[int] = None) -> EmpiricalPmf:
    n_blocks = -(-config.trials // config.block_size)
    threads = max(1, threads or 1)
    total = np.zeros(config.params.N + 1, dtype=np.int64)
    if threads == 1:
        for b in range(n_blocks):
            total += _run_block(config, b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for counts in pool.map(lambda b: _run_block(config, b), range(n_blocks)):
                total += counts
    counts = {int(k): int(c) for k, c in enumerate(total) if c}
    return EmpiricalPmf(config.params, config.trials, counts)


def mc_mean_ci(emp: EmpiricalPmf):
    """Sample mean and a 4-standard-error half width."""
    if emp.trials < 2:
        raise ValueError("need at least 2 trials")
    n = emp.trials
    mean = sum(k * c for k, c in emp.counts.items()) / n
    var = sum(c * (k - mean) ** 2 for k, c in emp.counts.items()) / (n - 1)
    return mean, 4 * math.sqrt(var / n)


def tv_distance(emp: EmpiricalPmf, pmf: ExactPmf) -> float:
    keys = set(emp.counts) | set(pmf.probs)
    return 0.5 * sum(abs(emp.frequency(k) - float(pmf[k])) for k in keys)
