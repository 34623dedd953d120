import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsgp import (
    Chromosome,
    ConfigError,
    FunctionOp,
    Gene,
    GeneTag,
    Population,
    RunConfig,
    RunStats,
    SequentialBackend,
    ThreadBackend,
    compute_semantics,
    interpret,
)
from conftest import toy_dataset
from oracles import oracle_interpret, random_genes

EPS = 1e-6

F = lambda op: Gene(GeneTag.FUNCTION, op)
X = lambda i: Gene(GeneTag.FEATURE, i)
C = lambda v: Gene(GeneTag.CONSTANT, 0, v)


def run(genes, case, eps=EPS):
    return interpret(Chromosome.from_genes(genes), case, eps)


def test_single_addition():
    assert run([X(0), X(1), F(FunctionOp.ADD)], (2.0, 3.0)) == 5.0


def test_skipped_function_falls_back_to_stack_top():
    # Add sees an empty stack, is skipped, and no function ever fires
    assert run([F(FunctionOp.ADD), X(0)], (7.0,)) == 7.0


def test_protected_division_returns_one():
    assert run([C(4.0), C(0.0), F(FunctionOp.DIV)], ()) == 1.0


def test_operand_order_is_second_pop_minus_first_pop():
    # (2*3) pushed first, then 10: Sub must compute 6 - 10, not 10 - 6
    genes = [C(2.0), C(3.0), F(FunctionOp.MUL), C(10.0), F(FunctionOp.SUB)]
    assert run(genes, ()) == -4.0
    assert oracle_interpret(genes, ()) == -4.0


def test_output_register_beats_later_terminals():
    # a terminal pushed after the last fired function does not become the result
    genes = [C(2.0), C(3.0), F(FunctionOp.ADD), C(99.0)]
    assert run(genes, ()) == 5.0
    assert oracle_interpret(genes, ()) == 5.0


def test_empty_everything_returns_zero():
    assert run([F(FunctionOp.MUL)], ()) == 0.0


def test_no_function_gene_returns_last_terminal():
    assert run([C(1.5), X(0), C(-2.5)], (9.0,)) == -2.5


def test_division_near_eps_threshold():
    assert run([C(1.0), C(5e-7), F(FunctionOp.DIV)], ()) == 1.0
    assert run([C(1.0), C(2e-6), F(FunctionOp.DIV)], ()) == 1.0 / 2e-6


def test_hundred_random_chromosomes_match_oracle():
    pyrng = random.Random(1234)
    cases = [[pyrng.uniform(-3, 3), pyrng.uniform(-3, 3)] for _ in range(20)]
    for _ in range(100):
        genes = random_genes(pyrng, pyrng.randint(1, 15), n_features=2)
        chromo = Chromosome.from_genes(genes)
        for case in cases:
            assert interpret(chromo, case, EPS) == pytest.approx(
                oracle_interpret(genes, case, EPS), abs=1e-9)


@given(data=st.data())
@settings(max_examples=150, deadline=None)
def test_interpreter_equals_oracle_property(data):
    seed = data.draw(st.integers(0, 2**32 - 1))
    pyrng = random.Random(seed)
    genes = random_genes(pyrng, pyrng.randint(1, 15), n_features=2)
    case = [pyrng.uniform(-5, 5), pyrng.uniform(-5, 5)]
    assert interpret(Chromosome.from_genes(genes), case, EPS) == pytest.approx(
        oracle_interpret(genes, case, EPS), abs=1e-9)


def random_population(pyrng, count, k, n_features):
    return Population.from_chromosomes(
        [Chromosome.from_genes(random_genes(pyrng, k, n_features)) for _ in range(count)]
    )


def test_semantics_matrix_matches_scalar_interpreter_bitwise():
    pyrng = random.Random(77)
    data = toy_dataset(n_cases=13, n_features=3, seed=5)
    pop = random_population(pyrng, 20, 31, 3)
    cfg = RunConfig(population_size=20, program_size=31)
    matrix = compute_semantics(pop, data, cfg)
    for i in range(len(pop)):
        chromo = pop.chromosome(i)
        expected = [interpret(chromo, data.features[j], cfg.division_eps)
                    for j in range(data.n_cases)]
        assert np.array_equal(matrix[i], expected)


def test_constant_program_gives_constant_row():
    data = toy_dataset(n_cases=9)
    pop = Population.from_chromosomes([Chromosome.from_genes([C(4.25)])])
    row = compute_semantics(pop, data, RunConfig(program_size=1))
    assert np.array_equal(row, np.full((1, 9), 4.25))


def test_case_permutation_permutes_columns():
    pyrng = random.Random(5)
    data = toy_dataset(n_cases=11, n_features=2, seed=2)
    pop = random_population(pyrng, 8, 15, 2)
    cfg = RunConfig(program_size=15)
    base = compute_semantics(pop, data, cfg)
    perm = np.random.default_rng(0).permutation(11)
    shuffled = compute_semantics(pop, data.features[perm], cfg)
    assert np.array_equal(shuffled, base[:, perm])


def test_interpretation_is_pure():
    pyrng = random.Random(6)
    data = toy_dataset(n_cases=6, n_features=2, seed=3)
    pop = random_population(pyrng, 4, 9, 2)
    cfg = RunConfig(program_size=9)
    first = compute_semantics(pop, data, cfg)
    second = compute_semantics(pop, data, cfg)
    assert np.array_equal(first, second)


def test_semantics_shape_is_population_by_cases():
    pyrng = random.Random(7)
    data = toy_dataset(n_cases=64, n_features=4, seed=4)
    pop = random_population(pyrng, 33, 21, 4)
    matrix = compute_semantics(pop, data, RunConfig(program_size=21))
    assert matrix.shape == (33, 64)


def test_parallel_backend_matches_sequential_bitwise():
    pyrng = random.Random(8)
    data = toy_dataset(n_cases=40, n_features=3, seed=6)
    pop = random_population(pyrng, 17, 25, 3)
    cfg = RunConfig(program_size=25)
    seq = compute_semantics(pop, data, cfg, SequentialBackend())
    with ThreadBackend(4) as backend:
        par = compute_semantics(pop, data, cfg, backend)
    assert np.array_equal(seq, par)


def test_overflow_outputs_replaced_and_counted():
    big = 1e200
    pop = Population.from_chromosomes([
        Chromosome.from_genes([C(big), C(big), F(FunctionOp.MUL)]),
        Chromosome.from_genes([C(1.0), C(1.0), F(FunctionOp.ADD)]),
    ])
    data = toy_dataset(n_cases=5)
    stats = RunStats()
    matrix = compute_semantics(pop, data, RunConfig(program_size=3), stats=stats)
    assert np.array_equal(matrix[0], np.zeros(5))
    assert np.array_equal(matrix[1], np.full(5, 2.0))
    assert stats.overflow_replacements == 5
    assert np.isfinite(matrix).all()


def test_feature_index_beyond_dataset_rejected():
    pop = Population.from_chromosomes([Chromosome.from_genes([X(5)])])
    with pytest.raises(ConfigError):
        compute_semantics(pop, toy_dataset(n_features=3), RunConfig(program_size=1))
