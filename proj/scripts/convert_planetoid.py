#!/usr/bin/env python3
"""Convert Planetoid-style citation datasets (ind.<name>.* files) into the
edge/feature text format used by this toolchain.

Input: the eight ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index} files as
distributed with the Planetoid benchmark suite.

Output:
  <out>/<name>.edges     first line "n m", then one edge per line "u<TAB>v"
  <out>/<name>.features  one sparse triplet per line "node<TAB>attr<TAB>value"

Usage: convert_planetoid.py --input-dir DIR --dataset cora --out data/
"""

import argparse
import os
import pickle
import sys

import numpy as np
import scipy.sparse as sp


def load_pickle(path):
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def load_dataset(input_dir, name):
    objs = {}
    for ext in ("x", "tx", "allx", "graph"):
        objs[ext] = load_pickle(os.path.join(input_dir, f"ind.{name}.{ext}"))
    with open(os.path.join(input_dir, f"ind.{name}.test.index")) as f:
        test_idx = np.array([int(line.strip()) for line in f if line.strip()])

    allx, tx, graph = objs["allx"], objs["tx"], objs["graph"]

    num_nodes = max(len(graph), int(test_idx.max()) + 1)

    # Rows of tx follow the order of test.index; scatter them back to the
    # node ids listed there. Ids in the test range that never appear in
    # test.index are isolated nodes with all-zero features (CiteSeer has a
    # handful of these).
    features = sp.lil_matrix((num_nodes, allx.shape[1]), dtype=np.float64)
    features[: allx.shape[0]] = allx.todense()
    tx_dense = tx.todense()
    for row, node in enumerate(test_idx):
        features[node] = tx_dense[row]
    features = features.tocsr()

    edges = set()
    self_loops = 0
    for u, nbrs in graph.items():
        for v in nbrs:
            if u == v:
                self_loops += 1
                continue
            edges.add((min(u, v), max(u, v)))
    return num_nodes, features, sorted(edges), self_loops


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--input-dir", required=True)
    ap.add_argument("--dataset", required=True, help="e.g. cora, citeseer, pubmed")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    n, features, edges, self_loops = load_dataset(args.input_dir, args.dataset)
    m = features.shape[1]

    os.makedirs(args.out, exist_ok=True)
    edge_path = os.path.join(args.out, f"{args.dataset}.edges")
    feat_path = os.path.join(args.out, f"{args.dataset}.features")

    with open(edge_path, "w") as f:
        f.write(f"{n} {m}\n")
        for u, v in edges:
            f.write(f"{u}\t{v}\n")

    coo = features.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(feat_path, "w") as f:
        for i in order:
            val = coo.data[i]
            text = f"{val:.17g}".rstrip("0").rstrip(".") if "." in f"{val:.17g}" else f"{val:.17g}"
            f.write(f"{coo.row[i]}\t{coo.col[i]}\t{text}\n")

    print(f"{args.dataset}: n={n} edges={len(edges)} attrs={m} "
          f"feature_nnz={features.nnz} self_loops_skipped={self_loops}")
    print(f"wrote {edge_path}, {feat_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
