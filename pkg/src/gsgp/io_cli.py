"""Config parsing, dataset I/O, result traces, and the command line.

File formats:

* Config: INI-style ``key = value`` lines (``#`` / ``;`` comments, optional
  ``[section]`` headers ignored).  Unknown keys are rejected.
* Dataset: whitespace-separated reals, one fitness case per row, last
  column is the target.
* Traces: one real per line (``%.17g``); the train file holds the elite's
  training RMSE per generation and the test file the same individual's
  test RMSE, starting with a generation-0 line for the initial population,
  appended run after run.
* Lineage sidecar (one per run): enough to replay the run and rebuild the
  winning semantics.  Line grammar, in order::

      # gsgp lineage v1
      <key> = <value>                          (the effective config)
      init_elite initial <index> <slot> <fitness>
      gen <generation>
      <u> <v> <ms>                             (one line per offspring slot)
      elite parent|offspring <index> <slot> <fitness>
      ...                                      (one gen block per generation)
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import rng
from .core import (
    ConfigError,
    Dataset,
    DatasetFormatError,
    EliteRecord,
    GsgpError,
    LineageEntry,
    LineageError,
    LineageLog,
    MutationPlan,
    RunConfig,
)
from .evolution import RunResult, run_evolution
from .harness import timing_rows, write_timing_csv

FMT = "%.17g"  # lossless for 64-bit reals

_INT_KEYS = {"program_size", "population_size", "random_trees", "generations",
             "runs", "seed", "threads", "fitness_cases", "features"}
_FLOAT_KEYS = {"p_function", "p_feature", "p_constant", "erc_low", "erc_high",
               "division_eps"}
_STR_KEYS = {"backend", "gsm_sign"}
_CONFIG_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"mutation_step"}


def _parse_value(key: str, raw: str, path: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "mutation_step":
            return raw if raw == "uniform" else float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: cannot parse value {raw!r} for {key}") from None


def load_config(path) -> RunConfig:
    """Read a config file; missing keys fall back to the defaults."""
    path = Path(path)
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw.strip(), str(path), lineno)
    return RunConfig(**values)


def config_lines(cfg: RunConfig) -> list[str]:
    """Serialize a config as key=value lines (round-trips via load_config)."""
    out = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, float):
            out.append(f"{f.name} = {FMT % value}")
        else:
            out.append(f"{f.name} = {value}")
    return out


def load_dataset(path) -> Dataset:
    """Parse a whitespace-separated matrix; last column is the target."""
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            row = [float(t) for t in tokens]
        except ValueError:
            raise DatasetFormatError(f"{path}:{lineno}: non-numeric token in {line!r}") from None
        if not all(np.isfinite(row)):
            raise DatasetFormatError(f"{path}:{lineno}: non-finite value")
        if width is None:
            width = len(row)
            if width < 2:
                raise DatasetFormatError(f"{path}:{lineno}: need at least 2 columns")
        elif len(row) != width:
            raise DatasetFormatError(
                f"{path}:{lineno}: ragged row ({len(row)} columns, expected {width})"
            )
        rows.append(row)
    if not rows:
        raise DatasetFormatError(f"{path}: empty dataset")
    matrix = np.asarray(rows, dtype=np.float64)
    return Dataset(matrix[:, :-1], matrix[:, -1])


def write_dataset(path, dataset: Dataset) -> None:
    """Tab-separated full-precision dump; load_dataset round-trips it."""
    with open(path, "w") as fh:
        for x, t in zip(dataset.features, dataset.target):
            fh.write("\t".join(FMT % v for v in x) + "\t" + FMT % t + "\n")


def _write_elite(fh, label: str, elite: EliteRecord) -> None:
    fh.write(f"{label} {elite.source} {elite.index} {elite.slot} {FMT % elite.fitness}\n")


def write_lineage_sidecar(path, cfg: RunConfig, log: LineageLog) -> None:
    with open(path, "w") as fh:
        fh.write("# gsgp lineage v1\n")
        for line in config_lines(cfg):
            fh.write(line + "\n")
        _write_elite(fh, "init_elite", log.initial_elite)
        for generation, entry in enumerate(log.entries, start=1):
            fh.write(f"gen {generation}\n")
            for u, v, ms in zip(entry.plan.u, entry.plan.v, entry.plan.ms):
                fh.write(f"{u} {v} {FMT % ms}\n")
            _write_elite(fh, "elite", entry.elite)


def _parse_elite(tokens: list[str], lineno: int, path) -> EliteRecord:
    if len(tokens) != 4:
        raise LineageError(f"{path}:{lineno}: malformed elite record")
    return EliteRecord(tokens[0], int(tokens[1]), int(tokens[2]), float(tokens[3]))


def read_lineage_sidecar(path) -> tuple[RunConfig, LineageLog]:
    """Parse a sidecar; raises LineageError on truncation or corruption."""
    path = Path(path)
    lines = path.read_text().splitlines()
    values = {}
    log: LineageLog | None = None
    i = 0
    lineno = 0
    while i < len(lines):
        line = lines[i].strip()
        lineno = i + 1
        i += 1
        if not line or line.startswith("#"):
            continue
        if log is None:
            if line.startswith("init_elite "):
                log = LineageLog(_parse_elite(line.split()[1:], lineno, path))
                continue
            key, _, raw = line.partition("=")
            values[key.strip()] = _parse_value(key.strip(), raw.strip(), str(path), lineno)
            continue
        if not line.startswith("gen "):
            raise LineageError(f"{path}:{lineno}: expected generation header")
        cfg_m = values.get("population_size", RunConfig.population_size)
        triples = lines[i:i + cfg_m]
        if len(triples) < cfg_m:
            raise LineageError(f"{path}: truncated plan for {line!r}")
        u = np.empty(cfg_m, dtype=np.int64)
        v = np.empty(cfg_m, dtype=np.int64)
        ms = np.empty(cfg_m, dtype=np.float64)
        for j, triple in enumerate(triples):
            parts = triple.split()
            if len(parts) != 3:
                raise LineageError(f"{path}:{i + j + 1}: malformed plan triple")
            u[j], v[j], ms[j] = int(parts[0]), int(parts[1]), float(parts[2])
        i += cfg_m
        if i >= len(lines) or not lines[i].startswith("elite "):
            raise LineageError(f"{path}: missing elite record for {line!r}")
        elite = _parse_elite(lines[i].split()[1:], i + 1, path)
        i += 1
        log.entries.append(LineageEntry(MutationPlan(u, v, ms), elite))
    if log is None:
        raise LineageError(f"{path}: no lineage data found")
    cfg = RunConfig(**values)
    if log.generations != cfg.generations:
        raise LineageError(
            f"{path}: sidecar holds {log.generations} generations, config says {cfg.generations}"
        )
    return cfg, log


def write_traces(result: RunResult, out_dir, run_index: int = 0) -> dict[str, Path]:
    """Append this run's trace lines and write its lineage sidecar.

    Line 1 of each run block is the generation-0 elite, followed by one
    line per evolved generation (g + 1 lines per run in total).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_path = out_dir / "fitnesstrain.txt"
    test_path = out_dir / "fitnesstest.txt"
    mode = "a" if run_index > 0 else "w"
    with open(train_path, mode) as fh:
        fh.writelines(FMT % v + "\n" for v in result.train_fitness)
    with open(test_path, mode) as fh:
        fh.writelines(FMT % v + "\n" for v in result.test_fitness)
    sidecar = out_dir / f"lineage_run{run_index:03d}.txt"
    write_lineage_sidecar(sidecar, result.config, result.lineage)
    return {"train": train_path, "test": test_path, "lineage": sidecar}


def _cross_check(cfg: RunConfig, train: Dataset) -> None:
    if cfg.fitness_cases is not None and cfg.fitness_cases != train.n_cases:
        raise ConfigError(
            f"config says {cfg.fitness_cases} fitness cases, train file has {train.n_cases}"
        )
    if cfg.features is not None and cfg.features != train.n_features:
        raise ConfigError(
            f"config says {cfg.features} features, train file has {train.n_features}"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsgp-run",
        description="Geometric semantic GP for symbolic regression.",
    )
    parser.add_argument("-train_file", required=True, help="training dataset (last column = target)")
    parser.add_argument("-test_file", required=True, help="test dataset (same layout)")
    parser.add_argument("-config", help="config file with key=value run parameters")
    parser.add_argument("-output_dir", default=".", help="directory for trace/lineage/timing files")
    parser.add_argument("-seed", type=int, help="override the config seed")
    parser.add_argument("-backend", choices=("sequential", "threads"), help="execution backend")
    parser.add_argument("-threads", type=int, help="worker count for the threads backend (0 = all cores)")
    return parser


def run_cli(argv: list[str]) -> int:
    """Execute the configured number of runs; returns a process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.backend is not None:
            overrides["backend"] = args.backend
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            cfg = RunConfig(**{**{f.name: getattr(cfg, f.name) for f in fields(cfg)}, **overrides})
        train = load_dataset(args.train_file)
        test = load_dataset(args.test_file)
        _cross_check(cfg, train)

        out_dir = Path(args.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        all_rows = []
        for run_index in range(cfg.runs):
            run_cfg = cfg.with_seed(rng.derive_seed(cfg.seed, run_index))
            result = run_evolution(run_cfg, train, test)
            write_traces(result, out_dir, run_index)
            all_rows.extend(timing_rows(run_cfg, train.n_cases, result.timings))
            note = ""
            if result.overflow_replacements:
                note = f" (replaced {result.overflow_replacements} non-finite outputs)"
            print(
                f"run {run_index}: seed={run_cfg.seed} "
                f"train RMSE={result.train_fitness[-1]:.6g} "
                f"test RMSE={result.test_fitness[-1]:.6g}{note}"
            )
        write_timing_csv(out_dir / "timings.csv", all_rows)
    except (GsgpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
