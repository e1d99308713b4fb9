"""Monte Carlo estimation of ensemble error rates.

Two estimators: the worst-case threshold rate (a trial counts as an error
when at least m classifiers err) and the full decoding rate (flip the true
codeword's bits where the sampled error vector is 1, decode, count
mismatches).

Randomness is counter-based: trials are processed in fixed-size chunks and
chunk j draws from a Philox stream keyed by (seed, j), so every trial's
randomness is a pure function of (seed, trial index).  Results are therefore
bit-identical for a given seed regardless of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .code_matrix import CodeMatrix
from .prob_engine import (
    DependenceModel,
    ExchangeableModel,
    Independent,
    PairModel,
    exchangeable_pmf,
)

DEFAULT_SEED = 60428  # 0xEC0C

CHUNK_TRIALS = 1 << 15

MODE_THRESHOLD = "threshold"
MODE_FULL_DECODE = "full-decode"


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int = DEFAULT_SEED
    mode: str = MODE_THRESHOLD
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials={self.trials} must be at least 1")
        if self.workers < 1:
            raise ValueError(f"workers={self.workers} must be at least 1")
        if self.mode not in (MODE_THRESHOLD, MODE_FULL_DECODE):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class SimResult:
    error_rate: float
    std_err: float
    trials: int
    mode: str


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_outcome(model: DependenceModel, rng: np.random.Generator) -> np.ndarray:
    """One error vector of length n drawn from the model's joint law."""
    return _sample_block(model, rng, 1)[0]


def _sample_block(
    model: DependenceModel, rng: np.random.Generator, count: int
) -> np.ndarray:
    """(count, n) uint8 error vectors."""
    n = model.n
    if isinstance(model, Independent):
        rates = np.asarray(model.profile.rates)
        return (rng.random((count, n)) < rates).astype(np.uint8)
    if isinstance(model, PairModel):
        rates = np.asarray(model.profile.rates[:-2])
        bits = np.zeros((count, n), dtype=np.uint8)
        if n > 2:
            bits[:, :-2] = rng.random((count, n - 2)) < rates
        p11, p10, p01, _ = model.joint_cells
        u = rng.random(count)
        bits[:, -2] = u < p11 + p10
        bits[:, -1] = (u < p11) | ((u >= p11 + p10) & (u < p11 + p10 + p01))
        return bits
    if isinstance(model, ExchangeableModel):
        # Outcome probability depends on the error vector only through its
        # count k, so draw k first and then a uniformly random k-subset of
        # positions (the positions of the k smallest of n iid uniforms).
        pmf = np.array([exchangeable_pmf(n, k, model.e_bar, model.c) for k in range(n + 1)])
        pmf = np.clip(pmf, 0.0, None)
        pmf /= pmf.sum()
        ks = rng.choice(n + 1, size=count, p=pmf)
        u = rng.random((count, n))
        ranks = u.argsort(axis=1).argsort(axis=1)
        return (ranks < ks[:, None]).astype(np.uint8)
    raise TypeError(f"unknown model type {type(model).__name__}")


def _run_chunks(cfg: SimConfig, count_fn) -> int:
    """Sum count_fn(chunk_rng, chunk_size) over fixed-size trial chunks."""
    chunks = []
    remaining = cfg.trials
    index = 0
    while remaining > 0:
        size = min(CHUNK_TRIALS, remaining)
        chunks.append((index, size))
        remaining -= size
        index += 1

    def work(item):
        idx, size = item
        return count_fn(_chunk_rng(cfg.seed, idx), size)

    if cfg.workers == 1 or len(chunks) == 1:
        return sum(work(item) for item in chunks)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return sum(pool.map(work, chunks))


def _result(errors: int, cfg: SimConfig, mode: str) -> SimResult:
    p = errors / cfg.trials
    return SimResult(
        error_rate=p,
        std_err=math.sqrt(p * (1.0 - p) / cfg.trials),
        trials=cfg.trials,
        mode=mode,
    )


def mc_threshold_error(model: DependenceModel, m: int, cfg: SimConfig) -> SimResult:
    """Fraction of trials in which at least m classifiers err."""
    if m > model.n:
        raise ValueError(f"m={m} exceeds n={model.n}")

    def count(rng, size):
        bits = _sample_block(model, rng, size)
        return int((bits.sum(axis=1) >= m).sum())

    return _result(_run_chunks(cfg, count), cfg, MODE_THRESHOLD)


def mc_decode_error(
    model: DependenceModel,
    code: CodeMatrix,
    cfg: SimConfig,
    true_class: int | None = None,
) -> SimResult:
    """Fraction of trials whose corrupted codeword decodes to a wrong class.

    Each trial picks a true class (uniformly unless true_class pins one),
    flips its codeword at the sampled error positions, and decodes by nearest
    row with lowest-index tie breaking.
    """
    if model.n != code.n:
        raise ValueError(f"model n={model.n} does not match code n={code.n}")
    if true_class is not None and not 0 <= true_class < code.num_classes:
        raise ValueError(f"true_class={true_class} outside 0..{code.num_classes - 1}")
    rows = code.matrix.astype(np.int32)
    row_sums = rows.sum(axis=1)

    def count(rng, size):
        bits = _sample_block(model, rng, size)
        if true_class is None:
            classes = rng.integers(0, code.num_classes, size=size)
        else:
            classes = np.full(size, true_class)
        received = np.bitwise_xor(code.matrix[classes], bits).astype(np.int32)
        # Hamming distance via dot products: |x| + |row| - 2 x.row.
        dist = received.sum(axis=1)[:, None] + row_sums[None, :] - 2 * received @ rows.T
        decoded = dist.argmin(axis=1)
        return int((decoded != classes).sum())

    return _result(_run_chunks(cfg, count), cfg, MODE_FULL_DECODE)
