"""Data-parallel geometric semantic genetic programming for regression.

The engine evolves fixed-length linear genomes whose semantics (output
vectors over all fitness cases) are the objects the search operators act
on.  After initialization only semantic matrices are updated; mutation is
an elementwise affine map and survival is elitist generational
replacement.  Sequential and parallel backends produce bitwise-identical
results thanks to counter-based random numbers and disjoint-write
kernels.
"""

from .backend import (
    BackendDescriptor,
    SequentialBackend,
    ThreadBackend,
    choose_chunk,
    get_backend,
)
from .core import (
    Chromosome,
    ConfigError,
    Dataset,
    DatasetFormatError,
    EliteRecord,
    FunctionOp,
    Gene,
    GeneTag,
    GsgpError,
    LineageEntry,
    LineageError,
    LineageLog,
    MutationPlan,
    Population,
    RunConfig,
    RunStats,
    StageTimings,
    WORST_FITNESS,
)
from .evolution import (
    GenerationState,
    RunResult,
    argmax_fitness,
    argmin_fitness,
    replay_lineage,
    run_evolution,
    survive,
)
from .fitness import compute_fitness, rmse
from .harness import make_benchmark_dataset, sweep, timed_run
from .interpreter import compute_semantics, interpret
from .io_cli import (
    load_config,
    load_dataset,
    read_lineage_sidecar,
    run_cli,
    write_dataset,
    write_lineage_sidecar,
    write_traces,
)
from .mutation import build_mutation_plan, gsm, gsm_paired, sigmoid, sigmoid_array
from .population import create_population, sample_gene
from .rng import derive_seed, rng_stream, uniform_array

__version__ = "0.1.0"
