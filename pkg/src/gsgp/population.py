"""Population initialization.

Gene (i, j) of the population is a pure function of
``(seed, stream_base + i, j)``: two RNG draws decide the gene tag and its
payload.  Sampling a genome row is therefore a single vectorized kernel,
and sampling serially or in parallel gives the same arrays.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .backend import SequentialBackend
from .core import (
    ConfigError,
    Gene,
    GeneTag,
    N_FUNCTIONS,
    Population,
    RunConfig,
)

_DRAWS_PER_GENE = 2  # tag draw at counter 2j, payload draw at 2j+1


def sample_gene(cfg: RunConfig, stream: int, position: int, n_features: int) -> Gene:
    """Draw the gene at one genome position.

    ``stream`` addresses the individual, ``position`` the gene within it.
    Tag probabilities are the configured (function, feature, constant)
    triple renormalized to sum to one; payloads are uniform over their
    respective domains.
    """
    if n_features < 1:
        raise ConfigError("n_features must be >= 1")
    p_fun, p_feat, _ = cfg.gene_probabilities
    tag_draw = rng.rng_stream(cfg.seed, stream, _DRAWS_PER_GENE * position)
    payload = rng.rng_stream(cfg.seed, stream, _DRAWS_PER_GENE * position + 1)
    if tag_draw < p_fun:
        return Gene(GeneTag.FUNCTION, min(int(payload * N_FUNCTIONS), N_FUNCTIONS - 1))
    if tag_draw < p_fun + p_feat:
        return Gene(GeneTag.FEATURE, min(int(payload * n_features), n_features - 1))
    return Gene(GeneTag.CONSTANT, 0, cfg.erc_low + payload * (cfg.erc_high - cfg.erc_low))


def _sample_row(cfg: RunConfig, stream: int, k: int, n_features: int,
                tags_out: np.ndarray, codes_out: np.ndarray, consts_out: np.ndarray) -> None:
    """Vectorized equivalent of k sample_gene calls for one individual."""
    positions = np.arange(k, dtype=np.uint64)
    tag_draw = rng.uniform_array(cfg.seed, stream, _DRAWS_PER_GENE * positions)
    payload = rng.uniform_array(cfg.seed, stream, _DRAWS_PER_GENE * positions + np.uint64(1))

    p_fun, p_feat, _ = cfg.gene_probabilities
    is_fun = tag_draw < p_fun
    is_feat = ~is_fun & (tag_draw < p_fun + p_feat)
    is_const = ~is_fun & ~is_feat

    tags_out[is_fun] = GeneTag.FUNCTION
    tags_out[is_feat] = GeneTag.FEATURE
    tags_out[is_const] = GeneTag.CONSTANT

    codes_out[...] = 0
    ops = np.minimum((payload * N_FUNCTIONS).astype(np.int32), N_FUNCTIONS - 1)
    feats = np.minimum((payload * n_features).astype(np.int32), n_features - 1)
    codes_out[is_fun] = ops[is_fun]
    codes_out[is_feat] = feats[is_feat]

    consts_out[...] = 0.0
    consts_out[is_const] = (cfg.erc_low + payload * (cfg.erc_high - cfg.erc_low))[is_const]


def create_population(count: int, cfg: RunConfig, stream_base: int,
                      n_features: int, backend: SequentialBackend | None = None) -> Population:
    """Sample ``count`` genomes of length ``cfg.program_size``.

    Individual i draws from stream ``stream_base + i``, so the result is
    identical for any backend and any worker count.
    """
    if count < 1:
        raise ConfigError("population count must be >= 1")
    k = cfg.program_size
    tags = np.empty((count, k), dtype=np.uint8)
    codes = np.empty((count, k), dtype=np.int32)
    consts = np.empty((count, k), dtype=np.float64)

    def block(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            _sample_row(cfg, stream_base + i, k, n_features, tags[i], codes[i], consts[i])

    (backend or SequentialBackend()).map_row_blocks(count, block)
    return Population(tags, codes, consts)
