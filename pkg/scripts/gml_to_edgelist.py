"""Convert a GML network with a node ``value`` attribute into edge-list and label files.

Usage: python scripts/gml_to_edgelist.py football.gml out_prefix [--unlabeled VALUE ...]

Node ids are written 1-based in GML id order. Community labels are ``value + 1``;
nodes whose value is listed with ``--unlabeled`` get the ``-`` marker.
"""

import argparse

import networkx as nx


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("gml")
    ap.add_argument("prefix")
    ap.add_argument("--unlabeled", type=int, nargs="*", default=[])
    args = ap.parse_args()

    g = nx.read_gml(args.gml, label="id")
    order = sorted(g.nodes)
    index = {v: i + 1 for i, v in enumerate(order)}
    edges = sorted({tuple(sorted((index[u], index[v]))) for u, v in g.edges if u != v})
    with open(f"{args.prefix}_edges.txt", "w", encoding="utf-8") as fh:
        fh.write(f"# converted from {args.gml}: n={len(order)} m={len(edges)}\n")
        fh.writelines(f"{u} {v}\n" for u, v in edges)
    with open(f"{args.prefix}_labels.tsv", "w", encoding="utf-8") as fh:
        fh.write("# node\tconference (value + 1); '-' = unlabeled\n")
        for v in order:
            value = g.nodes[v]["value"]
            label = "-" if value in args.unlabeled else str(value + 1)
            fh.write(f"{index[v]}\t{label}\n")


if __name__ == "__main__":
    main()
