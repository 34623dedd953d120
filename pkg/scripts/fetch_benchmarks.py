#!/usr/bin/env python3
"""Download the real-world benchmark datasets into data/.

Needs outbound network access.  Each dataset is validated against its
published shape before being written; nothing is ever synthesized.  The
engine's own loader accepts the files as written (whitespace-separated,
last column = target).

  yacht  308 rows x 7 columns (6 features + residuary resistance)
         UCI Machine Learning Repository, "Yacht Hydrodynamics"
  tower  5000 rows x 26 columns (25 features + propylene concentration)
         Vladislavleva et al. industrial "tower" benchmark
"""

from __future__ import annotations

import io
import sys
import urllib.request
import zipfile
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

YACHT_URLS = [
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00243/yacht_hydrodynamics.data",
    "https://archive.ics.uci.edu/static/public/243/yacht+hydrodynamics.zip",
]
TOWER_URLS = [
    "http://www.vanillamodeling.com/pdfs/towerData.txt",
    "http://symbolicregression.com/sites/default/files/DataSets/towerData.txt",
]


def fetch(url: str) -> bytes:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read()


def first_available(urls: list[str]) -> bytes:
    errors = []
    for url in urls:
        try:
            raw = fetch(url)
            if url.endswith(".zip"):
                with zipfile.ZipFile(io.BytesIO(raw)) as archive:
                    name = next(n for n in archive.namelist() if n.endswith(".data"))
                    raw = archive.read(name)
            return raw
        except Exception as exc:  # noqa: BLE001 - report and try the next mirror
            errors.append(f"{url}: {exc}")
    raise RuntimeError("all sources failed:\n  " + "\n  ".join(errors))


def parse_matrix(raw: bytes, skip_header: bool) -> list[list[float]]:
    rows = []
    for line in raw.decode("utf-8", errors="replace").splitlines():
        tokens = line.split()
        if not tokens:
            continue
        if skip_header:
            skip_header = False
            try:
                [float(t) for t in tokens]
            except ValueError:
                continue  # drop a non-numeric header line
        rows.append([float(t) for t in tokens])
    return rows


def normalize(name: str, urls: list[str], n_rows: int, n_cols: int,
              skip_header: bool = False) -> None:
    out_path = DATA_DIR / name
    if out_path.exists():
        print(f"{name}: already present, skipping")
        return
    print(f"{name}:")
    rows = parse_matrix(first_available(urls), skip_header)
    if len(rows) != n_rows or any(len(r) != n_cols for r in rows):
        raise RuntimeError(
            f"{name}: expected {n_rows} rows x {n_cols} columns, "
            f"got {len(rows)} rows with widths {sorted({len(r) for r in rows})}"
        )
    DATA_DIR.mkdir(exist_ok=True)
    with open(out_path, "w") as fh:
        for row in rows:
            fh.write("\t".join(repr(v) for v in row) + "\n")
    print(f"  wrote {out_path} ({n_rows} x {n_cols})")


def main() -> int:
    try:
        normalize("yacht_hydrodynamics.data", YACHT_URLS, n_rows=308, n_cols=7)
        normalize("tower.txt", TOWER_URLS, n_rows=5000, n_cols=26, skip_header=True)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
