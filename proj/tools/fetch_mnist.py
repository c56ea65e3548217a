#!/usr/bin/env python3
"""Fetch MNIST digits and write them as IDX files.

Obtains the 28x28 handwritten-digit images bundled with the npm
"mnist" package (about 1000 samples per class) and converts them to
the standard IDX container layout:

    <out>/train-images-idx3-ubyte
    <out>/train-labels-idx1-ubyte
    <out>/t10k-images-idx3-ubyte
    <out>/t10k-labels-idx1-ubyte

Samples are interleaved by class (0,1,...,9,0,1,...), so any prefix of
either file is class-balanced. The test split takes the first 100
samples of each class; the rest go to the training split.

If you already have the canonical MNIST files, point the trainer at
them directly and skip this script.
"""

import argparse
import json
import os
import shutil
import struct
import subprocess
import sys
import tempfile


def npm_install_mnist(workdir):
    npm = shutil.which("npm")
    if npm is None:
        sys.exit("error: npm not found on PATH (needed to fetch the mnist package)")
    subprocess.run(
        [npm, "install", "mnist@1.1.0", "--prefix", workdir, "--no-audit", "--no-fund"],
        check=True,
        stdout=subprocess.DEVNULL,
    )
    return os.path.join(workdir, "node_modules", "mnist", "src", "digits")


def load_digit_samples(digits_dir, digit):
    path = os.path.join(digits_dir, f"{digit}.json")
    with open(path) as fh:
        flat = json.load(fh)["data"]
    if len(flat) % 784 != 0:
        sys.exit(f"error: {path} length {len(flat)} is not a multiple of 784")
    samples = []
    for i in range(0, len(flat), 784):
        # values are stored as v/255 rounded to 3 decimals; this recovers
        # the original byte exactly (quantization step 0.001 < 1/510)
        samples.append(bytes(round(v * 255) for v in flat[i : i + 784]))
    return samples


def write_idx_images(path, images):
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", 2051, len(images), 28, 28))
        for img in images:
            fh.write(img)


def write_idx_labels(path, labels):
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", 2049, len(labels)))
        fh.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data", help="output directory (default: data)")
    ap.add_argument(
        "--digits-dir",
        default=None,
        help="existing node_modules/mnist/src/digits directory (skips npm install)",
    )
    ap.add_argument(
        "--test-per-class", type=int, default=100, help="test samples per class"
    )
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    tmp = None
    digits_dir = args.digits_dir
    if digits_dir is None:
        tmp = tempfile.mkdtemp(prefix="mnist-npm-")
        digits_dir = npm_install_mnist(tmp)

    try:
        per_class = [load_digit_samples(digits_dir, d) for d in range(10)]
    finally:
        if tmp is not None:
            shutil.rmtree(tmp, ignore_errors=True)

    n_min = min(len(s) for s in per_class)
    n_test = args.test_per_class
    if n_test >= n_min:
        sys.exit(f"error: test-per-class {n_test} >= available per-class count {n_min}")

    test_images, test_labels = [], []
    for i in range(n_test):
        for d in range(10):
            test_images.append(per_class[d][i])
            test_labels.append(d)

    train_images, train_labels = [], []
    for i in range(n_test, n_min):
        for d in range(10):
            train_images.append(per_class[d][i])
            train_labels.append(d)

    write_idx_images(os.path.join(args.out, "train-images-idx3-ubyte"), train_images)
    write_idx_labels(os.path.join(args.out, "train-labels-idx1-ubyte"), train_labels)
    write_idx_images(os.path.join(args.out, "t10k-images-idx3-ubyte"), test_images)
    write_idx_labels(os.path.join(args.out, "t10k-labels-idx1-ubyte"), test_labels)
    print(f"wrote {len(train_images)} train / {len(test_images)} test images to {args.out}")


if __name__ == "__main__":
    main()
