"""File formats: edge lists, feature CSVs, label files, JSON sidecars, and
the heterogeneous dataset manifest.

Edge lists are UTF-8 text, one ``src<TAB>dst[<TAB>weight]`` edge per line
with 0-indexed ids; ``#`` starts a comment line. Loaders symmetrize and
deduplicate (summing duplicate weights), default missing weights to 1.0,
and drop self loops with a warning. All JSON is written with sorted keys so
identical runs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .coarsen import CoarsenedGraph, CoarseningMatrix
from .exceptions import MalformedInput
from .graph import Graph
from .hetero import HeteroGraph

__all__ = [
    "read_edge_list",
    "read_features",
    "read_labels",
    "load_graph",
    "write_edge_list",
    "write_features",
    "write_labels",
    "write_assignment",
    "write_json",
    "write_coarsened_graph",
    "load_coarsened_graph",
    "load_hetero_manifest",
    "write_hetero_outputs",
]

_FLOAT_FMT = "%.17g"  # round-trips float64 exactly


def read_edge_list(path):
    """Parse an edge-list file into (rows, cols, weights) arrays."""
    path = Path(path)
    rows, cols, weights = [], [], []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MalformedInput(f"cannot read edge list: {exc}", path=str(path)) from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) not in (2, 3):
            raise MalformedInput(
                f"expected 'src dst [weight]', got {len(parts)} fields",
                path=str(path),
                line=lineno,
            )
        try:
            src = int(parts[0])
            dst = int(parts[1])
            weight = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise MalformedInput(
                f"non-numeric field: {exc}", path=str(path), line=lineno
            ) from exc
        if src < 0 or dst < 0:
            raise MalformedInput(
                "node ids must be non-negative", path=str(path), line=lineno
            )
        if weight < 0:
            raise MalformedInput(
                "edge weights must be non-negative", path=str(path), line=lineno
            )
        rows.append(src)
        cols.append(dst)
        weights.append(weight)
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(weights, dtype=np.float64),
    )


def read_features(path) -> np.ndarray:
    """Headerless CSV of N rows by d real columns."""
    path = Path(path)
    try:
        data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except OSError as exc:
        raise MalformedInput(f"cannot read features: {exc}", path=str(path)) from exc
    except ValueError as exc:
        raise MalformedInput(f"bad feature row: {exc}", path=str(path)) from exc
    return data


def read_labels(path) -> np.ndarray:
    """One integer label per line."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MalformedInput(f"cannot read labels: {exc}", path=str(path)) from exc
    labels = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            labels.append(int(text))
        except ValueError as exc:
            raise MalformedInput(
                f"label is not an integer: {text!r}", path=str(path), line=lineno
            ) from exc
    return np.asarray(labels, dtype=np.int64)


def load_graph(edges_path, features_path=None, labels_path=None, num_nodes=None) -> Graph:
    """Assemble a graph from its edge-list, feature, and label files."""
    rows, cols, weights = read_edge_list(edges_path)
    loops = rows == cols
    if loops.any():
        warnings.warn(
            f"{edges_path}: dropped {int(loops.sum())} self loop(s)", stacklevel=2
        )
        rows, cols, weights = rows[~loops], cols[~loops], weights[~loops]
    features = read_features(features_path) if features_path else None
    if num_nodes is not None:
        n = int(num_nodes)
    elif features is not None:
        n = features.shape[0]
    elif rows.size:
        n = int(max(rows.max(), cols.max())) + 1
    else:
        raise MalformedInput(
            "cannot infer node count from an empty edge list; "
            "provide features or an explicit node count",
            path=str(edges_path),
        )
    if rows.size and max(rows.max(), cols.max()) >= n:
        raise MalformedInput(
            f"edge references node {int(max(rows.max(), cols.max()))} "
            f"but only {n} nodes exist",
            path=str(edges_path),
        )
    half = sp.coo_matrix((weights, (rows, cols)), shape=(n, n)).tocsr()
    adjacency = half + half.T
    if features is None:
        features = np.zeros((n, 0))
    labels = None
    if labels_path:
        labels = read_labels(labels_path)
        if labels.shape[0] != n:
            raise MalformedInput(
                f"{labels.shape[0]} labels for {n} nodes", path=str(labels_path)
            )
    return Graph(adjacency=adjacency, features=features, labels=labels)


def write_edge_list(path, adjacency: sp.spmatrix):
    """Write the upper triangle, one tab-separated edge per line."""
    coo = sp.triu(adjacency, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        for r, c, w in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{int(r)}\t{int(c)}\t{float(w)!r}\n")


def write_relation_edges(path, matrix: sp.spmatrix):
    """Write a (possibly rectangular) relation matrix as an edge list."""
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        for r, c, w in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{int(r)}\t{int(c)}\t{float(w)!r}\n")


def write_features(path, features: np.ndarray):
    np.savetxt(path, np.atleast_2d(features), delimiter=",", fmt=_FLOAT_FMT)


def write_labels(path, labels: np.ndarray):
    np.savetxt(path, np.asarray(labels, dtype=np.int64), fmt="%d")


def write_assignment(path, assignment: np.ndarray):
    np.savetxt(path, np.asarray(assignment, dtype=np.int64), fmt="%d")


def write_json(path, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_coarsened_graph(out_dir, tag: str, coarse: CoarsenedGraph, meta: dict) -> Path:
    """Write one coarsened graph plus its self-describing JSON sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    edges_file = f"{tag}_edges.tsv"
    assignment_file = f"{tag}_assignment.txt"
    self_weights_file = f"{tag}_self_weights.csv"
    write_edge_list(out_dir / edges_file, coarse.adjacency)
    features_file = None
    if coarse.features.shape[1]:
        features_file = f"{tag}_features.csv"
        write_features(out_dir / features_file, coarse.features)
    write_features(out_dir / self_weights_file, coarse.self_weights[:, None])
    write_assignment(out_dir / assignment_file, coarse.provenance.assignment)
    sidecar = {
        "assignment_file": assignment_file,
        "edges_file": edges_file,
        "features_file": features_file,
        "labels_file": None,
        "num_supernodes": int(coarse.num_supernodes),
        "self_weights_file": self_weights_file,
    }
    if coarse.labels is not None:
        labels_file = f"{tag}_labels.txt"
        write_labels(out_dir / labels_file, coarse.labels)
        sidecar["labels_file"] = labels_file
    sidecar.update(meta)
    sidecar_path = out_dir / f"{tag}.json"
    write_json(sidecar_path, sidecar)
    return sidecar_path


def load_coarsened_graph(sidecar_path) -> tuple[CoarsenedGraph, dict]:
    """Rebuild a coarsened graph from its sidecar (paths are sidecar-relative)."""
    sidecar_path = Path(sidecar_path)
    try:
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read sidecar: {exc}", path=str(sidecar_path)) from exc
    base = sidecar_path.parent
    for key in ("assignment_file", "edges_file", "num_supernodes"):
        if key not in meta:
            raise MalformedInput(f"sidecar missing {key!r}", path=str(sidecar_path))
    assignment = read_labels(base / meta["assignment_file"])
    cm = CoarseningMatrix.from_assignment(assignment)
    n = int(meta["num_supernodes"])
    if cm.num_supernodes != n:
        raise MalformedInput(
            f"assignment has {cm.num_supernodes} supernodes, sidecar says {n}",
            path=str(sidecar_path),
        )
    rows, cols, weights = read_edge_list(base / meta["edges_file"])
    half = sp.coo_matrix((weights, (rows, cols)), shape=(n, n)).tocsr()
    adjacency = half + half.T
    features = (
        read_features(base / meta["features_file"])
        if meta.get("features_file")
        else np.zeros((n, 0))
    )
    self_weights = (
        read_features(base / meta["self_weights_file"]).ravel()
        if meta.get("self_weights_file")
        else np.zeros(n)
    )
    labels = (
        read_labels(base / meta["labels_file"]) if meta.get("labels_file") else None
    )
    coarse = CoarsenedGraph(
        adjacency=adjacency,
        self_weights=self_weights,
        features=features,
        labels=labels,
        provenance=cm,
    )
    return coarse, meta


def _read_relation(path, n_src: int, n_dst: int) -> sp.csr_matrix:
    rows, cols, weights = read_edge_list(path)
    if rows.size:
        bad = np.flatnonzero((rows >= n_src) | (cols >= n_dst))
        if bad.size:
            raise MalformedInput(
                f"edge ({int(rows[bad[0]])}, {int(cols[bad[0]])}) outside "
                f"type ranges ({n_src}, {n_dst})",
                path=str(path),
            )
    mat = sp.coo_matrix((weights, (rows, cols)), shape=(n_src, n_dst)).tocsr()
    mat.sum_duplicates()
    return mat


def load_hetero_manifest(path) -> HeteroGraph:
    """Load the JSON manifest describing a heterogeneous dataset.

    Schema::

        {"types": {name: {"count": int,
                          "features_file": str?,
                          "labels_file": str?}},
         "relations": [{"src": str, "rel": str, "dst": str,
                        "edges_file": str}],
         "target_type": str}

    File paths are resolved relative to the manifest location.
    """
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read manifest: {exc}", path=str(path)) from exc
    base = path.parent
    for key in ("types", "relations", "target_type"):
        if key not in manifest:
            raise MalformedInput(f"manifest missing {key!r}", path=str(path))
    counts = {}
    features = {}
    labels_by_type = {}
    for name, info in manifest["types"].items():
        if "count" not in info:
            raise MalformedInput(f"type {name!r} missing 'count'", path=str(path))
        counts[name] = int(info["count"])
        features[name] = (
            read_features(base / info["features_file"])
            if info.get("features_file")
            else None
        )
        if info.get("labels_file"):
            labels_by_type[name] = read_labels(base / info["labels_file"])
    target = manifest["target_type"]
    if target not in counts:
        raise MalformedInput(
            f"target type {target!r} is not declared in 'types'", path=str(path)
        )
    relations = {}
    for entry in manifest["relations"]:
        for key in ("src", "rel", "dst", "edges_file"):
            if key not in entry:
                raise MalformedInput(
                    f"relation entry missing {key!r}", path=str(path)
                )
        src, rel, dst = entry["src"], entry["rel"], entry["dst"]
        if src not in counts or dst not in counts:
            raise MalformedInput(
                f"relation ({src}, {rel}, {dst}) uses an undeclared type",
                path=str(path),
            )
        key = (src, rel, dst)
        if key in relations:
            raise MalformedInput(
                f"duplicate relation ({src}, {rel}, {dst})", path=str(path)
            )
        relations[key] = _read_relation(
            base / entry["edges_file"], counts[src], counts[dst]
        )
    return HeteroGraph(
        node_types=list(manifest["types"].keys()),
        counts=counts,
        features=features,
        relations=relations,
        target_type=target,
        target_labels=labels_by_type.get(target),
    )


def write_hetero_outputs(out_dir, result, meta: dict) -> Path:
    """Write per-type and per-relation artifacts plus the run sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    types_info = {}
    for t in result.node_types:
        cm = result.partitions[t]
        assignment_file = f"type_{t}_assignment.txt"
        write_assignment(out_dir / assignment_file, cm.assignment)
        info = {
            "assignment_file": assignment_file,
            "features_file": None,
            "num_supernodes": int(cm.num_supernodes),
        }
        if result.features.get(t) is not None:
            features_file = f"type_{t}_features.csv"
            write_features(out_dir / features_file, result.features[t])
            info["features_file"] = features_file
        types_info[t] = info
    labels_file = f"type_{result.target_type}_labels.txt"
    write_labels(out_dir / labels_file, result.target_labels)
    relations_info = []
    for (src, rel, dst), mat in sorted(result.relations.items()):
        edges_file = f"rel_{src}__{rel}__{dst}.tsv"
        write_relation_edges(out_dir / edges_file, mat)
        relations_info.append(
            {"dst": dst, "edges_file": edges_file, "rel": rel, "src": src}
        )
    sidecar = {
        "purity_percent": result.purity(),
        "relations": relations_info,
        "target_labels_file": labels_file,
        "target_type": result.target_type,
        "types": types_info,
    }
    sidecar.update(meta)
    sidecar_path = out_dir / "hetero.json"
    write_json(sidecar_path, sidecar)
    return sidecar_path
