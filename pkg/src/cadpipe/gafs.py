"""Genetic-algorithm wrapper feature selection with SVM cross-validated fitness.

A chromosome is a boolean mask over the candidate columns. Fitness is the
mean test-fold accuracy of an SVM trained on the masked columns. Folds are
fixed once per run (from the master seed), so fitness is a pure function of
the mask and can be cached by mask.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import DataError
from .evaluation import stratified_kfold
from .svm import SvmConfig, kernel_matrix, solve_dual

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None: 1 / mask length
    elitism_count: int = 2
    max_generations: int = 100
    target_fitness: float | None = None
    seed: int = 0
    fitness_folds: int = 5
    tournament_size: int = 2
    threads: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must be in [0, population_size)")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.fitness_folds < 2:
            raise ValueError("fitness_folds must be >= 2")


def cv_decision_values(X: np.ndarray, y: np.ndarray, config: SvmConfig,
                       splits: Sequence[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Out-of-fold SVM decision values for every row.

    The Gram matrix is computed once on all rows; each fold trains on its
    block. ``config`` is resolved against the width of ``X``.
    """
    X = np.asarray(X, dtype=float)
    labels = np.where(np.asarray(y, dtype=bool), 1.0, -1.0)
    config = config.resolved(X.shape[1])
    K = kernel_matrix(X, X, config)
    scores = np.empty(len(labels))
    for train_idx, test_idx in splits:
        yt = labels[train_idx]
        if (yt > 0).all() or (yt < 0).all():
            raise DataError("a training fold contains a single class")
        res = solve_dual(K[np.ix_(train_idx, train_idx)], yt, config.C, config.tol,
                         config.max_iter, config.seed)
        coef = res.alpha * yt
        scores[test_idx] = coef @ K[np.ix_(train_idx, test_idx)] + res.bias
    return scores


class FitnessEvaluator:
    """Cached cross-validated accuracy of an SVM restricted to a column mask."""

    def __init__(self, X, target, svm_config: SvmConfig, folds: int = 5, seed: int = 0):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(target, dtype=bool)
        if self.y.all() or not self.y.any():
            raise DataError("fitness needs both classes")
        self.svm_config = svm_config
        self.splits = stratified_kfold(len(self.y), self.y, folds, seed)
        self.cache: dict[bytes, float] = {}
        self.evaluations = 0

    def evaluate(self, mask: np.ndarray) -> float:
        """Fresh (uncached) fitness of ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise DataError("cannot evaluate an empty feature mask")
        scores = cv_decision_values(self.X[:, mask], self.y, self.svm_config, self.splits)
        hits = (scores >= 0.0) == self.y
        self.evaluations += 1
        return float(np.mean([hits[test].mean() for _, test in self.splits]))

    def __call__(self, mask: np.ndarray) -> float:
        key = np.packbits(np.asarray(mask, dtype=bool)).tobytes()
        if key not in self.cache:
            self.cache[key] = self.evaluate(mask)
        return self.cache[key]


def fitness(mask, data, svm_config: SvmConfig = SvmConfig(), folds: int = 5, seed: int = 0) -> float:
    """Mean stratified k-fold accuracy of an SVM on ``data``'s masked columns."""
    return FitnessEvaluator(data.X, data.target, svm_config, folds, seed).evaluate(mask)


def _repair(child: np.ndarray, pool: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if not child.any():
        on = np.flatnonzero(pool)
        pos = rng.choice(on) if on.size else rng.integers(child.size)
        child[pos] = True
    return child


def crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniform crossover: each position is swapped with probability 1/2."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"parent lengths differ: {a.size} vs {b.size}")
    swap = rng.random(a.size) < 0.5
    c1 = np.where(swap, b, a)
    c2 = np.where(swap, a, b)
    either = a | b
    return _repair(c1, either, rng), _repair(c2, either, rng)


def mutate(mask: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ``rate``."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    mask = np.asarray(mask, dtype=bool)
    out = mask ^ (rng.random(mask.size) < rate)
    return _repair(out, mask, rng)


@dataclass
class GaResult:
    best_mask: np.ndarray
    fitness: float
    history: list[dict[str, float]] = field(default_factory=list)
    evaluations: int = 0

    @property
    def n_selected(self) -> int:
        return int(self.best_mask.sum())

    def history_csv(self) -> str:
        lines = ["generation,best_fitness,best_n_selected,mean_fitness"]
        for h in self.history:
            lines.append(
                f"{h['generation']},{h['best_fitness']:.6f},{h['best_n_selected']},{h['mean_fitness']:.6f}"
            )
        return "\n".join(lines) + "\n"


def _key(fit: float, mask: np.ndarray) -> tuple[float, int]:
    # higher accuracy first, then fewer selected columns
    return (fit, -int(mask.sum()))


def run_ga(data, ga_config: GaConfig = GaConfig(), svm_config: SvmConfig = SvmConfig(),
           evaluator: FitnessEvaluator | None = None) -> GaResult:
    """Evolve feature masks over ``data`` (anything with ``X`` and ``target``)."""
    if evaluator is None:
        evaluator = FitnessEvaluator(data.X, data.target, svm_config,
                                     ga_config.fitness_folds, ga_config.seed)
    n = evaluator.X.shape[1]
    if n == 0:
        raise DataError("no candidate features")
    rng = np.random.default_rng(ga_config.seed)
    rate = ga_config.mutation_rate if ga_config.mutation_rate is not None else 1.0 / n

    population = [np.ones(n, dtype=bool)]
    while len(population) < ga_config.population_size:
        population.append(_repair(rng.random(n) < 0.5, np.ones(n, dtype=bool), rng))

    pool = ThreadPoolExecutor(ga_config.threads) if ga_config.threads > 1 else None
    best_mask, best_fit = None, -1.0
    history = []
    try:
        for gen in range(1, ga_config.max_generations + 1):
            if pool is not None:
                fits = list(pool.map(evaluator, population))
            else:
                fits = [evaluator(m) for m in population]
            order = sorted(range(len(population)), key=lambda i: _key(fits[i], population[i]), reverse=True)
            top = order[0]
            if best_mask is None or _key(fits[top], population[top]) > _key(best_fit, best_mask):
                best_mask, best_fit = population[top].copy(), fits[top]
            history.append({
                "generation": gen,
                "best_fitness": best_fit,
                "best_n_selected": int(best_mask.sum()),
                "mean_fitness": float(np.mean(fits)),
            })
            log.debug("generation %d: best %.4f (%d cols), mean %.4f",
                      gen, best_fit, best_mask.sum(), history[-1]["mean_fitness"])
            if ga_config.target_fitness is not None and best_fit >= ga_config.target_fitness:
                break
            if gen == ga_config.max_generations:
                break

            def pick() -> np.ndarray:
                contenders = rng.integers(len(population), size=ga_config.tournament_size)
                winner = max(contenders, key=lambda i: _key(fits[i], population[i]))
                return population[winner]

            nxt = [population[i].copy() for i in order[: ga_config.elitism_count]]
            while len(nxt) < ga_config.population_size:
                a, b = pick(), pick()
                if rng.random() < ga_config.crossover_rate:
                    a, b = crossover(a, b, rng)
                nxt.append(mutate(a, rate, rng))
                if len(nxt) < ga_config.population_size:
                    nxt.append(mutate(b, rate, rng))
            population = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    return GaResult(best_mask, best_fit, history, evaluator.evaluations)
