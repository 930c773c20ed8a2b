#!/usr/bin/env python3
"""Convert the raw Planetoid pickles in data/raw/planetoid into the TSV
dataset layout consumed by the toolkit, and unpack the gzipped LINQS Cora
text files for the `glt-bench convert` round-trip test.

Output layout, per dataset:
    <out>/<name>/edges.tsv      one undirected edge per line, "i\tj" with i<j,
                                lexicographically sorted, self-loops dropped
    <out>/<name>/features.tsv   "<node>\t<f0>\t<f1>..." raw feature values
    <out>/<name>/labels.tsv     "<node>\t<class>"; -1 marks unlabeled nodes
    <out>/<name>/split.tsv      "<node>\t{train|val|test}", assigned nodes only

Split assignment is the canonical Planetoid split: train = the labeled
x/y nodes, val = the next 500 node ids, test = test.index. Citeseer has 15
node ids inside the test.index range with no feature/label data; they get
zero features, label -1, and no split role.

Requires scipy (the pickles contain scipy sparse matrices).
"""

import argparse
import gzip
import os
import pickle
import shutil

import numpy as np


def load_part(raw_dir, dataset, part):
    path = os.path.join(raw_dir, "planetoid", f"ind.{dataset}.{part}")
    if part == "test.index":
        with open(path) as fh:
            return [int(line) for line in fh]
    with open(path, "rb") as fh:
        return pickle.load(fh, encoding="latin1")


def assemble(raw_dir, dataset):
    x, y, tx, ty, allx, ally, graph, test_index = (
        load_part(raw_dir, dataset, p)
        for p in ["x", "y", "tx", "ty", "allx", "ally", "graph", "test.index"]
    )
    test_sorted = np.sort(test_index)
    full_range = np.arange(test_sorted.min(), test_sorted.max() + 1)
    n = allx.shape[0] + len(full_range)

    feats = np.zeros((n, allx.shape[1]))
    feats[: allx.shape[0]] = allx.toarray()
    # tx rows are stored in test.index order; place them at their node ids.
    feats[np.asarray(test_index)] = tx.toarray()

    onehot = np.zeros((n, ally.shape[1]))
    onehot[: ally.shape[0]] = ally
    onehot[np.asarray(test_index)] = ty
    labels = np.where(onehot.sum(axis=1) > 0, onehot.argmax(axis=1), -1)

    edges = set()
    for u, nbrs in graph.items():
        for v in nbrs:
            if u != v:
                edges.add((min(u, v), max(u, v)))

    split = {i: "train" for i in range(y.shape[0])}
    for i in range(y.shape[0], y.shape[0] + 500):
        split[i] = "val"
    for i in test_index:
        split[i] = "test"

    return feats, labels, sorted(edges), split


def write_dataset(out_dir, feats, labels, edges, split):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "edges.tsv"), "w") as fh:
        for i, j in edges:
            fh.write(f"{i}\t{j}\n")
    integral = np.all(feats == np.round(feats))
    with open(os.path.join(out_dir, "features.tsv"), "w") as fh:
        for i, row in enumerate(feats):
            if integral:
                vals = "\t".join(str(int(v)) for v in row)
            else:
                vals = "\t".join(repr(float(v)) for v in row)
            fh.write(f"{i}\t{vals}\n")
    with open(os.path.join(out_dir, "labels.tsv"), "w") as fh:
        for i, lab in enumerate(labels):
            fh.write(f"{i}\t{int(lab)}\n")
    with open(os.path.join(out_dir, "split.tsv"), "w") as fh:
        for i in sorted(split):
            fh.write(f"{i}\t{split[i]}\n")


def unpack_linqs(raw_dir, out_dir):
    src = os.path.join(raw_dir, "linqs-cora")
    os.makedirs(out_dir, exist_ok=True)
    for name in ["cora.content", "cora.cites"]:
        with gzip.open(os.path.join(src, name + ".gz"), "rb") as fin, open(
            os.path.join(out_dir, name), "wb"
        ) as fout:
            shutil.copyfileobj(fin, fout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--raw", required=True, help="directory holding planetoid/ and linqs-cora/")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--datasets", default="cora,citeseer")
    args = ap.parse_args()

    for name in args.datasets.split(","):
        feats, labels, edges, split = assemble(args.raw, name)
        write_dataset(os.path.join(args.out, name), feats, labels, edges, split)
        n_lab = int((labels >= 0).sum())
        print(
            f"{name}: {feats.shape[0]} nodes, {len(edges)} edges, "
            f"{feats.shape[1]} features, {n_lab} labeled, "
            f"split sizes {sum(1 for r in split.values() if r == 'train')}/"
            f"{sum(1 for r in split.values() if r == 'val')}/"
            f"{sum(1 for r in split.values() if r == 'test')}"
        )
    unpack_linqs(args.raw, os.path.join(args.out, "linqs-cora"))
    print("linqs-cora: unpacked")


if __name__ == "__main__":
    main()
