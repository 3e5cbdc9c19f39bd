#!/usr/bin/env python3
"""Convert the digits bundled in the npm `mnist` package into IDX files.

The package ships 10,000 MNIST digits as per-class JSON arrays of pixel
intensities scaled to [0, 1] with three decimals. This script restores the
unsigned-byte pixels, interleaves the classes with a fixed permutation and
writes gzip-compressed IDX3 images / IDX1 labels.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_from_npm.py package/src/digits data/mnist
"""
import argparse
import gzip
import json
import pathlib
import struct

import numpy as np


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--seed", type=int, default=20240229)
    args = ap.parse_args()

    images, labels = [], []
    for digit in range(10):
        raw = json.loads((args.digits_dir / f"{digit}.json").read_text())["data"]
        px = np.rint(np.asarray(raw, dtype=np.float64) * 255.0)
        px = px.clip(0, 255).astype(np.uint8).reshape(-1, 28 * 28)
        images.append(px)
        labels.append(np.full(px.shape[0], digit, dtype=np.uint8))
    images = np.concatenate(images)
    labels = np.concatenate(labels)

    order = np.random.default_rng(args.seed).permutation(len(labels))
    images, labels = images[order], labels[order]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(args.out_dir / "images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, len(labels), 28, 28))
        f.write(images.tobytes())
    with gzip.GzipFile(args.out_dir / "labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.tobytes())
    print(f"wrote {len(labels)} samples to {args.out_dir}")


if __name__ == "__main__":
    main()
