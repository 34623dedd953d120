"""Domain types for the semantic-GP engine.

Genomes are fixed-length and live in flat numpy arrays (one row per
individual) so that every kernel can be expressed as an array operation.
Semantic matrices, fitness vectors and mutation plans are plain float64 /
int64 arrays; the classes here add the invariants and conversions around
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from . import rng

#: Fitness assigned whenever a computation turns non-finite.  Positive
#: infinity keeps the survival ordering total without special cases.
WORST_FITNESS = math.inf


class GsgpError(Exception):
    """Base class for engine errors."""


class ConfigError(GsgpError):
    """Invalid run configuration."""


class DatasetFormatError(GsgpError):
    """Malformed dataset file or inconsistent dataset arrays."""


class LineageError(GsgpError):
    """Incomplete or inconsistent lineage log."""


class GeneTag(IntEnum):
    FUNCTION = 0
    FEATURE = 1
    CONSTANT = 2


class FunctionOp(IntEnum):
    ADD = 0
    SUB = 1
    MUL = 2
    DIV = 3  # protected division


N_FUNCTIONS = len(FunctionOp)


@dataclass(frozen=True)
class Gene:
    """One genome position: a function, an input feature, or a constant.

    ``code`` is the function id (FunctionOp) or feature index; ``value`` is
    the constant payload and is meaningful only for CONSTANT genes.
    """

    tag: GeneTag
    code: int = 0
    value: float = 0.0

    def validate(self, n_features: int) -> None:
        if self.tag == GeneTag.FUNCTION:
            if not 0 <= self.code < N_FUNCTIONS:
                raise ConfigError(f"unknown function id {self.code}")
        elif self.tag == GeneTag.FEATURE:
            if not 0 <= self.code < n_features:
                raise ConfigError(
                    f"feature index {self.code} out of range for {n_features} features"
                )
        else:
            if not math.isfinite(self.value):
                raise ConfigError("constant gene must be finite")


class Chromosome:
    """Fixed-length linear genome, a view over one population row."""

    __slots__ = ("tags", "codes", "consts")

    def __init__(self, tags: np.ndarray, codes: np.ndarray, consts: np.ndarray):
        if not (tags.shape == codes.shape == consts.shape) or tags.ndim != 1:
            raise ConfigError("chromosome arrays must be 1-D and equally sized")
        self.tags = tags
        self.codes = codes
        self.consts = consts

    def __len__(self) -> int:
        return self.tags.shape[0]

    def genes(self) -> list[Gene]:
        return [
            Gene(GeneTag(int(t)), int(c), float(v))
            for t, c, v in zip(self.tags, self.codes, self.consts)
        ]

    @classmethod
    def from_genes(cls, genes: list[Gene]) -> "Chromosome":
        tags = np.array([g.tag for g in genes], dtype=np.uint8)
        codes = np.array([g.code for g in genes], dtype=np.int32)
        consts = np.array([g.value for g in genes], dtype=np.float64)
        return cls(tags, codes, consts)


class Population:
    """A stack of equally sized chromosomes in three parallel arrays."""

    __slots__ = ("tags", "codes", "consts")

    def __init__(self, tags: np.ndarray, codes: np.ndarray, consts: np.ndarray):
        if not (tags.shape == codes.shape == consts.shape) or tags.ndim != 2:
            raise ConfigError("population arrays must be 2-D and equally shaped")
        self.tags = tags
        self.codes = codes
        self.consts = consts

    def __len__(self) -> int:
        return self.tags.shape[0]

    @property
    def genome_length(self) -> int:
        return self.tags.shape[1]

    def chromosome(self, i: int) -> Chromosome:
        return Chromosome(self.tags[i], self.codes[i], self.consts[i])

    @classmethod
    def from_chromosomes(cls, members: list[Chromosome]) -> "Population":
        if not members:
            raise ConfigError("population must be nonempty")
        k = len(members[0])
        if any(len(c) != k for c in members):
            raise ConfigError("all chromosomes must share one genome length")
        return cls(
            np.stack([c.tags for c in members]),
            np.stack([c.codes for c in members]),
            np.stack([c.consts for c in members]),
        )


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (n cases x l features) with a length-n target."""

    features: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        t = np.asarray(self.target, dtype=np.float64)
        if f.ndim != 2 or t.ndim != 1:
            raise DatasetFormatError("features must be 2-D and target 1-D")
        if f.shape[0] != t.shape[0]:
            raise DatasetFormatError(
                f"feature rows ({f.shape[0]}) != target length ({t.shape[0]})"
            )
        if f.shape[0] == 0 or f.shape[1] == 0:
            raise DatasetFormatError("dataset must have at least one row and one feature")
        if not (np.isfinite(f).all() and np.isfinite(t).all()):
            raise DatasetFormatError("dataset values must all be finite")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "target", t)

    @property
    def n_cases(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def split(self, train_fraction: float, seed: int) -> tuple["Dataset", "Dataset"]:
        """Deterministic shuffled train/test split driven by the engine RNG."""
        if not 0.0 < train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        n = self.n_cases
        order = np.argsort(
            rng.uniform_array(seed, rng.SPLIT_STREAM, np.arange(n)), kind="stable"
        )
        n_train = max(1, min(n - 1, round(n * train_fraction)))
        tr, te = order[:n_train], order[n_train:]
        return (
            Dataset(self.features[tr], self.target[tr]),
            Dataset(self.features[te], self.target[te]),
        )


@dataclass(frozen=True)
class MutationPlan:
    """Per-offspring random-tree indices and mutation steps.

    ``u`` and ``v`` index the random-tree set, ``ms`` scales the
    perturbation.  One plan drives one whole generation, so applying it on
    any backend, in any order, yields the same offspring.
    """

    u: np.ndarray
    v: np.ndarray
    ms: np.ndarray

    def __post_init__(self):
        if not (self.u.shape == self.v.shape == self.ms.shape) or self.u.ndim != 1:
            raise ConfigError("plan arrays must be 1-D and equally sized")

    def __len__(self) -> int:
        return self.u.shape[0]

    def validate(self, n_trees: int) -> None:
        if len(self) == 0:
            return
        if self.u.min() < 0 or self.u.max() >= n_trees:
            raise ConfigError("plan index u out of range")
        if self.v.min() < 0 or self.v.max() >= n_trees:
            raise ConfigError("plan index v out of range")
        if (self.u == self.v).any():
            raise ConfigError("plan requires distinct tree indices per slot")


@dataclass(frozen=True)
class EliteRecord:
    """Where the generation's best individual came from and where it sits.

    ``index`` is its position inside the source population (parents or
    offspring); ``slot`` is its position in the surviving generation.
    """

    source: str  # "parent" | "offspring" | "initial"
    index: int
    slot: int
    fitness: float


@dataclass(frozen=True)
class LineageEntry:
    plan: MutationPlan
    elite: EliteRecord


@dataclass
class LineageLog:
    """Audit trail that makes every offspring reconstructible.

    Offspring never get genomes; the log of mutation plans plus survival
    decisions, together with the initial population and random trees, is
    what turns the winning semantics back into a reproducible model.
    """

    initial_elite: EliteRecord
    entries: list[LineageEntry] = field(default_factory=list)

    @property
    def generations(self) -> int:
        return len(self.entries)

    def final_elite(self) -> EliteRecord:
        return self.entries[-1].elite if self.entries else self.initial_elite


@dataclass(frozen=True)
class StageTimings:
    """Wall-clock milliseconds per evolutionary stage."""

    create_population_ms: float
    compute_semantics_ms: float
    evolution_ms: float
    per_generation_ms: float
    total_ms: float


@dataclass
class RunStats:
    """Counters reported in logs; never consulted by the search itself."""

    overflow_replacements: int = 0


_GSM_SIGNS = ("minus", "plus")
_BACKENDS = ("sequential", "threads")


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run; two equal configs give bitwise-equal runs."""

    population_size: int = 1024
    random_trees: int = 1024
    program_size: int = 1024
    generations: int = 1024
    runs: int = 1
    seed: int = 1
    p_function: float = 0.8
    p_feature: float = 0.14
    p_constant: float = 0.04
    erc_low: float = 1.0
    erc_high: float = 10.0
    mutation_step: float | str = "uniform"
    division_eps: float = 1e-6
    gsm_sign: str = "minus"
    backend: str = "threads"
    threads: int = 0  # 0 = use all available cores
    fitness_cases: int | None = None  # optional cross-check against the dataset
    features: int | None = None

    def __post_init__(self):
        for name in ("population_size", "random_trees", "program_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.generations < 0:
            raise ConfigError("generations must be >= 0")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        probs = (self.p_function, self.p_feature, self.p_constant)
        if any(p < 0 for p in probs) or sum(probs) <= 0:
            raise ConfigError("gene probabilities must be non-negative with positive sum")
        if self.erc_high < self.erc_low:
            raise ConfigError("erc_high must be >= erc_low")
        if self.division_eps <= 0:
            raise ConfigError("division_eps must be > 0")
        if self.gsm_sign not in _GSM_SIGNS:
            raise ConfigError(f"gsm_sign must be one of {_GSM_SIGNS}")
        if self.backend not in _BACKENDS:
            raise ConfigError(f"backend must be one of {_BACKENDS}")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0")
        if isinstance(self.mutation_step, str):
            if self.mutation_step != "uniform":
                raise ConfigError("mutation_step must be 'uniform' or a positive number")
        elif not (math.isfinite(self.mutation_step) and self.mutation_step > 0):
            raise ConfigError("constant mutation_step must be finite and > 0")

    @property
    def gene_probabilities(self) -> tuple[float, float, float]:
        """(function, feature, constant) renormalized to sum to one."""
        total = self.p_function + self.p_feature + self.p_constant
        return (self.p_function / total, self.p_feature / total, self.p_constant / total)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)


def ensure_finite_matrix(values: np.ndarray, stats: RunStats | None = None) -> np.ndarray:
    """Replace non-finite entries with 0.0 in place, counting replacements."""
    bad = ~np.isfinite(values)
    n_bad = int(bad.sum())
    if n_bad:
        values[bad] = 0.0
        if stats is not None:
            stats.overflow_replacements += n_bad
    return values
