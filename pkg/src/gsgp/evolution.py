"""Generational loop with elitist survival, plus lineage replay.

Every generation mutates all parents (no selection operator; elitism is
the only pressure), evaluates the offspring, and keeps the offspring
population except that the best parent is copied over the worst offspring
when the parents still hold the best individual.  Offspring never get a
syntax: the engine carries semantics only, and the lineage log plus the
initial structures are enough to rebuild the winner exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .backend import get_backend
from .core import (
    ConfigError,
    Dataset,
    EliteRecord,
    LineageEntry,
    LineageError,
    LineageLog,
    RunConfig,
    RunStats,
    StageTimings,
)
from .fitness import compute_fitness, rmse
from .interpreter import compute_semantics
from .mutation import _gsm_squashed, build_mutation_plan, gsm, sigmoid_array
from .population import create_population


def argmin_fitness(fitness: np.ndarray) -> int:
    """Index of the best (smallest) fitness; ties go to the lowest index."""
    if fitness.shape[0] == 0:
        raise ConfigError("empty fitness vector")
    return int(np.argmin(fitness))


def argmax_fitness(fitness: np.ndarray) -> int:
    """Index of the worst (largest) fitness; ties go to the lowest index."""
    if fitness.shape[0] == 0:
        raise ConfigError("empty fitness vector")
    return int(np.argmax(fitness))


@dataclass
class GenerationState:
    """Everything survival needs about one population."""

    train_semantics: np.ndarray
    fitness: np.ndarray
    test_semantics: np.ndarray

    def _check_shapes(self, other: "GenerationState") -> None:
        if (self.train_semantics.shape != other.train_semantics.shape
                or self.fitness.shape != other.fitness.shape
                or self.test_semantics.shape != other.test_semantics.shape):
            raise ConfigError("parent and offspring states must have equal shapes")


def survive(parent: GenerationState, offspring: GenerationState) -> tuple[GenerationState, EliteRecord]:
    """Generational replacement with elitism; returns the next state.

    The offspring population survives wholesale; only when the parents'
    best is strictly better does it overwrite the worst offspring slot.
    The offspring arrays are reused as the next state.
    """
    parent._check_shapes(offspring)
    b_p = argmin_fitness(parent.fitness)
    b_o = argmin_fitness(offspring.fitness)
    if parent.fitness[b_p] < offspring.fitness[b_o]:
        worst = argmax_fitness(offspring.fitness)
        offspring.train_semantics[worst] = parent.train_semantics[b_p]
        offspring.test_semantics[worst] = parent.test_semantics[b_p]
        offspring.fitness[worst] = parent.fitness[b_p]
        elite = EliteRecord("parent", b_p, worst, float(parent.fitness[b_p]))
    else:
        elite = EliteRecord("offspring", b_o, b_o, float(offspring.fitness[b_o]))
    return offspring, elite


@dataclass
class RunResult:
    """Outcome of one evolutionary run."""

    config: RunConfig
    train_fitness: np.ndarray  # per generation, index 0 = initial population
    test_fitness: np.ndarray   # same individual's test error
    lineage: LineageLog
    timings: StageTimings
    elite_slot: int
    elite_train_semantics: np.ndarray
    overflow_replacements: int


def run_evolution(cfg: RunConfig, train: Dataset, test: Dataset) -> RunResult:
    """Run the full algorithm and trace the elite per generation.

    Train and test semantics are evaluated in one interpreter pass over
    the stacked fitness cases; the test side is observed for reporting
    only and never influences survival.
    """
    if train.n_features != test.n_features:
        raise ConfigError(
            f"train has {train.n_features} features but test has {test.n_features}"
        )
    m, r, g = cfg.population_size, cfg.random_trees, cfg.generations
    stats = RunStats()
    t_start = time.perf_counter()

    with get_backend(cfg.backend, cfg.threads) as backend:
        t0 = time.perf_counter()
        pop = create_population(m, cfg, 0, train.n_features, backend)
        trees = create_population(r, cfg, m, train.n_features, backend)
        create_ms = (time.perf_counter() - t0) * 1e3

        t0 = time.perf_counter()
        stacked = np.vstack([train.features, test.features])
        n_train = train.n_cases
        s_pop = compute_semantics(pop, stacked, cfg, backend, stats)
        s_trees = compute_semantics(trees, stacked, cfg, backend, stats)
        pop_train = np.ascontiguousarray(s_pop[:, :n_train])
        pop_test = np.ascontiguousarray(s_pop[:, n_train:])
        trees_train = np.ascontiguousarray(s_trees[:, :n_train])
        trees_test = np.ascontiguousarray(s_trees[:, n_train:])
        semantics_ms = (time.perf_counter() - t0) * 1e3

        state = GenerationState(pop_train,
                                compute_fitness(pop_train, train.target, backend),
                                pop_test)
        squashed_train = sigmoid_array(trees_train)
        squashed_test = sigmoid_array(trees_test)

        best0 = argmin_fitness(state.fitness)
        log = LineageLog(EliteRecord("initial", best0, best0, float(state.fitness[best0])))
        train_trace = np.empty(g + 1)
        test_trace = np.empty(g + 1)
        train_trace[0] = state.fitness[best0]
        test_trace[0] = rmse(state.test_semantics[best0], test.target)

        t0 = time.perf_counter()
        for generation in range(1, g + 1):
            plan = build_mutation_plan(m, r, cfg, generation)
            off_train = _gsm_squashed(state.train_semantics, squashed_train, plan,
                                      cfg.gsm_sign, backend, stats)
            off_test = _gsm_squashed(state.test_semantics, squashed_test, plan,
                                     cfg.gsm_sign, backend, stats)
            off = GenerationState(off_train,
                                  compute_fitness(off_train, train.target, backend),
                                  off_test)
            state, elite = survive(state, off)
            log.entries.append(LineageEntry(plan, elite))
            train_trace[generation] = elite.fitness
            test_trace[generation] = rmse(state.test_semantics[elite.slot], test.target)
        evolution_ms = (time.perf_counter() - t0) * 1e3

    final_slot = log.final_elite().slot
    total_ms = (time.perf_counter() - t_start) * 1e3
    timings = StageTimings(
        create_population_ms=create_ms,
        compute_semantics_ms=semantics_ms,
        evolution_ms=evolution_ms,
        per_generation_ms=evolution_ms / g if g else 0.0,
        total_ms=total_ms,
    )
    return RunResult(
        config=cfg,
        train_fitness=train_trace,
        test_fitness=test_trace,
        lineage=log,
        timings=timings,
        elite_slot=final_slot,
        elite_train_semantics=state.train_semantics[final_slot].copy(),
        overflow_replacements=stats.overflow_replacements,
    )


def replay_lineage(log: LineageLog, initial_semantics: np.ndarray,
                   tree_semantics: np.ndarray, cfg: RunConfig) -> np.ndarray:
    """Re-apply every recorded plan and survival decision.

    Returns the final elite's semantics, bitwise equal to the live run's.
    The log must cover exactly ``cfg.generations`` generations.
    """
    if log.generations != cfg.generations:
        raise LineageError(
            f"log covers {log.generations} generations, config expects {cfg.generations}"
        )
    m = initial_semantics.shape[0]
    current = initial_semantics.copy()
    for entry in log.entries:
        if len(entry.plan) != m:
            raise LineageError("plan length does not match the population size")
        offspring = gsm(current, tree_semantics, entry.plan, cfg)
        if entry.elite.source == "parent":
            offspring[entry.elite.slot] = current[entry.elite.index]
        current = offspring
    return current[log.final_elite().slot].copy()
