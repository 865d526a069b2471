"""Bundled real-world networks."""

from importlib import resources

from .graph import Graph, GroundTruth, load_edge_list, load_labels

FOOTBALL_COMMUNITIES = 11


def data_path(name: str):
    return resources.files("semicomm") / "data" / name


def football() -> tuple[Graph, GroundTruth]:
    """College football network (115 teams, 613 games); the five Independents are unlabeled."""
    with data_path("football_edges.txt").open(encoding="utf-8") as fh:
        g = load_edge_list(fh)
    with data_path("football_labels.tsv").open(encoding="utf-8") as fh:
        gt = load_labels(fh)
    gt.check_range(g.n)
    return g, gt


def football_names() -> dict[int, str]:
    """1-based team id -> team name."""
    names = {}
    with data_path("football_names.tsv").open(encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            node, name = line.rstrip("\n").split("\t")
            names[int(node)] = name
    return names
