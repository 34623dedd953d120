"""Linear-genome interpreter producing semantic vectors.

The genome is scanned left to right with a LIFO stack: terminals push
their value, a binary function fires only when two operands are stacked
(otherwise it is skipped and the stack is untouched), and an output
register keeps the result of the last function that fired.  The value of
a program is that register; if no function ever fired it is the top of
the stack, and 0.0 for an empty stack.

Whether a gene fires depends only on the tag sequence, never on operand
values, so one scan evaluates an individual over every fitness case at
once: each stack slot holds a vector across cases and each gene costs one
array operation.  The scalar ``interpret`` below is the single-case
reference; the vectorized path used by ``compute_semantics`` performs the
same IEEE operations case-wise.
"""

from __future__ import annotations

import numpy as np

from .backend import SequentialBackend
from .core import (
    Chromosome,
    ConfigError,
    Dataset,
    FunctionOp,
    GeneTag,
    Population,
    RunConfig,
    RunStats,
    ensure_finite_matrix,
)

_ARITY = 2

# hot-loop int constants (plain ints compare much faster than enum members)
_FUNCTION = int(GeneTag.FUNCTION)
_FEATURE = int(GeneTag.FEATURE)
_ADD = int(FunctionOp.ADD)
_SUB = int(FunctionOp.SUB)
_MUL = int(FunctionOp.MUL)


def interpret(chromosome: Chromosome, case_features, eps: float) -> float:
    """Evaluate one genome on one fitness case."""
    stack: list[float] = []
    out = 0.0
    fired = False
    genes = zip(chromosome.tags.tolist(), chromosome.codes.tolist(),
                chromosome.consts.tolist())
    for tag, code, value in genes:
        if tag == _FUNCTION:
            if len(stack) < _ARITY:
                continue  # skipped: operands unavailable
            right = stack.pop()
            left = stack.pop()
            if code == _ADD:
                res = left + right
            elif code == _SUB:
                res = left - right
            elif code == _MUL:
                res = left * right
            else:
                res = 1.0 if abs(right) < eps else left / right
            stack.append(res)
            out = res
            fired = True
        elif tag == _FEATURE:
            stack.append(float(case_features[code]))
        else:
            stack.append(value)
    if fired:
        return out
    return stack[-1] if stack else 0.0


def _interpret_cases(tags, codes, consts, columns: np.ndarray, eps: float) -> np.ndarray:
    """One genome over all cases; ``columns`` is the (l, n) feature matrix.

    Stack entries are either scalars (constants) or length-n vectors;
    mixed arithmetic broadcasts, so a run of constant folding stays cheap.
    The loop works on plain Python ints/floats: the arithmetic is the same
    IEEE operations as the scalar ``interpret``, case by case.
    """
    tag_list = tags.tolist()
    code_list = codes.tolist()
    const_list = consts.tolist()
    stack: list = []
    push = stack.append
    pop = stack.pop
    out = None
    for position, tag in enumerate(tag_list):
        if tag == _FUNCTION:
            if len(stack) < _ARITY:
                continue
            right = pop()
            left = pop()
            code = code_list[position]
            if code == _ADD:
                res = left + right
            elif code == _SUB:
                res = left - right
            elif code == _MUL:
                res = left * right
            elif isinstance(right, float):
                res = 1.0 if abs(right) < eps else left / right
            else:
                res = np.where(np.abs(right) < eps, 1.0, left / right)
            push(res)
            out = res
        elif tag == _FEATURE:
            push(columns[code_list[position]])
        else:
            push(const_list[position])
    result = out if out is not None else (stack[-1] if stack else 0.0)
    if isinstance(result, np.ndarray):
        return result
    return np.full(columns.shape[1], float(result))


def compute_semantics(pop: Population, data: Dataset | np.ndarray, cfg: RunConfig,
                      backend: SequentialBackend | None = None,
                      stats: RunStats | None = None) -> np.ndarray:
    """Semantic matrix: row i is individual i evaluated on every case.

    Rows are independent, so the backend parallelizes over individuals.
    Non-finite outputs (overflow in long products) are replaced by 0.0 and
    counted into ``stats``.
    """
    features = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    if len(pop) == 0 or features.shape[0] == 0:
        raise ConfigError("compute_semantics needs a nonempty population and dataset")
    if int(pop.codes[pop.tags == GeneTag.FEATURE].max(initial=-1)) >= features.shape[1]:
        raise ConfigError("genome references a feature beyond the dataset width")

    columns = np.ascontiguousarray(features.T)
    out = np.empty((len(pop), features.shape[0]), dtype=np.float64)
    eps = cfg.division_eps

    def block(lo: int, hi: int) -> None:
        with np.errstate(all="ignore"):
            for i in range(lo, hi):
                out[i] = _interpret_cases(pop.tags[i], pop.codes[i], pop.consts[i],
                                          columns, eps)

    (backend or SequentialBackend()).map_row_blocks(len(pop), block)
    return ensure_finite_matrix(out, stats)
