#!/usr/bin/env python3
"""Convert UCR/UEA time-series classification files to the ts-cls v1 format.

Supported inputs:
  * UCR 2018 univariate text: one sample per line, label first, values
    separated by tabs or commas.
  * sktime/UEA .ts files: @-header lines followed by @data, one sample per
    line, dimensions separated by ':' with the class label last.

Labels are remapped to 0..C-1 in sorted order of their original values.

Usage:
  ucr_to_tscls.py INPUT OUTPUT
  ucr_to_tscls.py --dir UCR_DIR DATASET OUTPUT_DIR   # converts _TRAIN/_TEST
"""

import argparse
import sys
from pathlib import Path


def parse_ts_file(path):
    """Parse a sktime .ts file -> (samples, labels). samples: list of [T][D]."""
    samples, labels = [], []
    in_data = False
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.lower().startswith("@data"):
                in_data = True
                continue
            if line.startswith("@"):
                continue
            if not in_data:
                continue
            parts = line.split(":")
            if len(parts) < 2:
                raise SystemExit(f"{path}: malformed @data line: {line[:60]}")
            labels.append(parts[-1])
            dims = [[float(v) for v in dim.split(",") if v] for dim in parts[:-1]]
            length = len(dims[0])
            if any(len(d) != length for d in dims):
                raise SystemExit(f"{path}: ragged dimensions in line: {line[:60]}")
            # time-major, channel-minor
            series = [[d[t] for d in dims] for t in range(length)]
            samples.append(series)
    return samples, labels


def parse_flat_file(path):
    """Parse UCR 2018 univariate text (label first on each line)."""
    samples, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            toks = line.replace(",", " ").split()
            labels.append(toks[0])
            samples.append([[float(v)] for v in toks[1:]])
    return samples, labels


def convert(in_path, out_path):
    in_path = Path(in_path)
    if in_path.suffix.lower() == ".ts":
        samples, labels = parse_ts_file(in_path)
    else:
        samples, labels = parse_flat_file(in_path)
    if not samples:
        raise SystemExit(f"{in_path}: no samples found")

    lengths = {len(s) for s in samples}
    if len(lengths) != 1:
        raise SystemExit(
            f"{in_path}: variable-length series ({sorted(lengths)[:5]}...) are not "
            "supported by ts-cls v1"
        )
    T = lengths.pop()
    D = len(samples[0][0])
    classes = sorted(set(labels), key=lambda v: (len(v), v))
    index = {c: i for i, c in enumerate(classes)}

    with open(out_path, "w", encoding="utf-8", newline="\n") as out:
        out.write(f"ts-cls v1 T={T} D={D} C={len(classes)}\n")
        for series, label in zip(samples, labels):
            flat = " ".join(repr(v) for t in series for v in t)
            out.write(f"{index[label]}\t{flat}\n")
    print(f"{in_path} -> {out_path}  (T={T} D={D} C={len(classes)} N={len(samples)})")


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dir", help="UCR archive root holding <DATASET>/<DATASET>_TRAIN.*")
    ap.add_argument("args", nargs="+")
    opts = ap.parse_args()

    if opts.dir:
        if len(opts.args) != 2:
            ap.error("--dir mode needs: DATASET OUTPUT_DIR")
        dataset, out_dir = opts.args
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        base = Path(opts.dir) / dataset
        for split in ("TRAIN", "TEST"):
            src = None
            for suffix in (".ts", ".tsv", ".txt", ""):
                cand = base / f"{dataset}_{split}{suffix}"
                if cand.exists():
                    src = cand
                    break
            if src is None:
                raise SystemExit(f"no {split} file found under {base}")
            convert(src, out / f"{dataset}_{split}.tscls")
    else:
        if len(opts.args) != 2:
            ap.error("need: INPUT OUTPUT")
        convert(opts.args[0], opts.args[1])


if __name__ == "__main__":
    sys.exit(main())
