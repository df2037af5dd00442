#!/usr/bin/env python3
# Copyright 2026 The qtrojan-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rebuild data/mnist/*.gz from the `mnist` npm package (10k MNIST digits).

Usage: npm pack mnist && tar xzf mnist-*.tgz
       python3 tools/scripts/mnist_from_npm.py package/src/digits data/mnist
"""
import gzip
import json
import random
import struct
import sys
from pathlib import Path

N_TEST = 2000


def write_idx(path, magic, dims, payload):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(struct.pack(">I", magic))
        for d in dims:
            f.write(struct.pack(">I", d))
        f.write(bytes(payload))


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    samples = []
    for digit in range(10):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        for i in range(0, len(flat), 784):
            pix = [max(0, min(255, round(v * 255))) for v in flat[i:i + 784]]
            samples.append((pix, digit))
    random.Random(20221019).shuffle(samples)
    splits = {"train": samples[N_TEST:], "t10k": samples[:N_TEST]}
    for name, rows in splits.items():
        images = [p for pix, _ in rows for p in pix]
        labels = [lab for _, lab in rows]
        write_idx(out / f"{name}-images-idx3-ubyte.gz", 0x803, [len(rows), 28, 28], images)
        write_idx(out / f"{name}-labels-idx1-ubyte.gz", 0x801, [len(rows)], labels)
        print(name, len(rows))


if __name__ == "__main__":
    main()
