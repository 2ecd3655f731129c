import json

import numpy as np
import pytest

from coarsekit import AdaptiveCoarsener, random_graph
from coarsekit.exceptions import MalformedInput
from coarsekit.io import (
    load_coarsened_graph,
    load_graph,
    load_hetero_manifest,
    read_edge_list,
    read_features,
    read_labels,
    write_coarsened_graph,
    write_edge_list,
    write_features,
    write_json,
    write_labels,
)


def test_graph_file_round_trip(tmp_path):
    g = random_graph(25, seed=3)
    write_edge_list(tmp_path / "edges.tsv", g.adjacency)
    write_features(tmp_path / "x.csv", g.features)
    write_labels(tmp_path / "y.txt", g.labels)
    loaded = load_graph(tmp_path / "edges.tsv", tmp_path / "x.csv", tmp_path / "y.txt")
    np.testing.assert_array_equal(loaded.adjacency.toarray(), g.adjacency.toarray())
    np.testing.assert_array_equal(loaded.features, g.features)
    np.testing.assert_array_equal(loaded.labels, g.labels)


def test_loader_symmetrizes_and_sums_duplicates(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text(
        "# comment line\n"
        "0\t1\t2.0\n"
        "1\t0\t3.0\n"  # reverse listing sums into the same edge
        "1\t2\n"  # missing weight defaults to 1.0
        "1\t2\t0.5\n"  # duplicate same-direction entry sums
        "\n"
    )
    g = load_graph(path, num_nodes=3)
    dense = g.adjacency.toarray()
    assert dense[0, 1] == dense[1, 0] == 5.0
    assert dense[1, 2] == dense[2, 1] == 1.5


def test_loader_drops_self_loops_with_warning(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t0\t4.0\n0\t1\t1.0\n")
    with pytest.warns(UserWarning, match="self loop"):
        g = load_graph(path, num_nodes=2)
    assert g.adjacency.diagonal().sum() == 0.0
    assert g.adjacency[0, 1] == 1.0


def test_loader_reports_line_numbers(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\n0\t1\t2\t9\n")
    with pytest.raises(MalformedInput) as err:
        read_edge_list(path)
    assert ":2:" in str(err.value)

    path.write_text("0\tx\n")
    with pytest.raises(MalformedInput, match="non-numeric"):
        read_edge_list(path)

    path.write_text("0\t-1\n")
    with pytest.raises(MalformedInput, match="non-negative"):
        read_edge_list(path)


def test_loader_missing_file_names_path(tmp_path):
    missing = tmp_path / "nope.tsv"
    with pytest.raises(MalformedInput) as err:
        read_edge_list(missing)
    assert "nope.tsv" in str(err.value)
    with pytest.raises(MalformedInput) as err:
        read_features(tmp_path / "ghost.csv")
    assert "ghost.csv" in str(err.value)


def test_loader_validates_node_count(tmp_path):
    edges = tmp_path / "edges.tsv"
    edges.write_text("0\t5\n")
    feats = tmp_path / "x.csv"
    np.savetxt(feats, np.zeros((3, 2)), delimiter=",")
    with pytest.raises(MalformedInput, match="node 5"):
        load_graph(edges, feats)


def test_loader_label_count_mismatch(tmp_path):
    edges = tmp_path / "edges.tsv"
    edges.write_text("0\t1\n")
    labels = tmp_path / "y.txt"
    labels.write_text("0\n1\n2\n")
    with pytest.raises(MalformedInput, match="labels"):
        load_graph(edges, labels_path=labels, num_nodes=2)


def test_empty_edge_list_needs_node_count(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("# nothing\n")
    with pytest.raises(MalformedInput, match="node count"):
        load_graph(path)
    g = load_graph(path, num_nodes=4)
    assert g.num_nodes == 4
    assert g.edge_count == 0


def test_labels_reader_strictness(tmp_path):
    path = tmp_path / "y.txt"
    path.write_text("1\n2\nthree\n")
    with pytest.raises(MalformedInput) as err:
        read_labels(path)
    assert ":3:" in str(err.value)


def test_sidecar_round_trip(tmp_path):
    g = random_graph(20, seed=5)
    est = AdaptiveCoarsener(ratios=(0.5,), random_state=2).fit(g)
    coarse = est.coarsen_at(0.5)
    sidecar = write_coarsened_graph(
        tmp_path, "r0.5000", coarse, {"ratio": 0.5, "seed": 2, "alpha": est.alpha_,
                                      "projectors": 10}
    )
    loaded, meta = load_coarsened_graph(sidecar)
    assert meta["ratio"] == 0.5
    assert meta["num_supernodes"] == coarse.num_supernodes
    np.testing.assert_allclose(
        loaded.adjacency.toarray(), coarse.adjacency.toarray(), atol=0
    )
    np.testing.assert_array_equal(
        loaded.provenance.assignment, coarse.provenance.assignment
    )
    np.testing.assert_allclose(loaded.self_weights, coarse.self_weights, atol=0)
    np.testing.assert_array_equal(loaded.labels, coarse.labels)


def test_json_keys_sorted(tmp_path):
    path = tmp_path / "x.json"
    write_json(path, {"zeta": 1, "alpha": 2, "mid": {"b": 1, "a": 2}})
    text = path.read_text()
    assert text.index('"alpha"') < text.index('"mid"') < text.index('"zeta"')
    assert json.loads(text) == {"zeta": 1, "alpha": 2, "mid": {"b": 1, "a": 2}}


def _write_manifest(tmp_path, rng):
    np.savetxt(tmp_path / "a.csv", rng.standard_normal((6, 2)), delimiter=",")
    (tmp_path / "a_y.txt").write_text("".join(f"{i % 2}\n" for i in range(6)))
    (tmp_path / "ab.tsv").write_text("0\t0\t1.0\n5\t3\t2.0\n")
    manifest = {
        "types": {
            "a": {"count": 6, "features_file": "a.csv", "labels_file": "a_y.txt"},
            "b": {"count": 4},
        },
        "relations": [
            {"src": "a", "rel": "r", "dst": "b", "edges_file": "ab.tsv"}
        ],
        "target_type": "a",
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    return path, manifest


def test_manifest_loads(tmp_path):
    rng = np.random.default_rng(0)
    path, _ = _write_manifest(tmp_path, rng)
    h = load_hetero_manifest(path)
    assert h.node_types == ["a", "b"]
    assert h.counts == {"a": 6, "b": 4}
    assert h.features["b"] is None
    assert h.relations[("a", "r", "b")].shape == (6, 4)
    assert h.relations[("a", "r", "b")].sum() == 3.0
    np.testing.assert_array_equal(h.target_labels, [0, 1, 0, 1, 0, 1])


def test_manifest_schema_errors(tmp_path):
    rng = np.random.default_rng(0)
    path, manifest = _write_manifest(tmp_path, rng)

    bad = dict(manifest)
    bad.pop("target_type")
    path.write_text(json.dumps(bad))
    with pytest.raises(MalformedInput, match="target_type"):
        load_hetero_manifest(path)

    bad = json.loads(json.dumps(manifest))
    bad["target_type"] = "ghost"
    path.write_text(json.dumps(bad))
    with pytest.raises(MalformedInput, match="ghost"):
        load_hetero_manifest(path)

    bad = json.loads(json.dumps(manifest))
    bad["relations"][0]["dst"] = "ghost"
    path.write_text(json.dumps(bad))
    with pytest.raises(MalformedInput, match="undeclared"):
        load_hetero_manifest(path)


def test_manifest_rejects_out_of_range_endpoints(tmp_path):
    rng = np.random.default_rng(0)
    path, manifest = _write_manifest(tmp_path, rng)
    (tmp_path / "ab.tsv").write_text("0\t9\t1.0\n")  # dst type has 4 nodes
    with pytest.raises(MalformedInput, match="outside"):
        load_hetero_manifest(path)


def test_edge_list_written_deterministically(tmp_path):
    g = random_graph(15, seed=9)
    write_edge_list(tmp_path / "a.tsv", g.adjacency)
    write_edge_list(tmp_path / "b.tsv", g.adjacency)
    assert (tmp_path / "a.tsv").read_bytes() == (tmp_path / "b.tsv").read_bytes()


def test_sidecar_validation_errors(tmp_path):
    g = random_graph(10, seed=1)
    est = AdaptiveCoarsener(ratios=(0.5,), random_state=0).fit(g)
    sidecar = write_coarsened_graph(
        tmp_path, "x", est.coarsen_at(0.5), {"ratio": 0.5}
    )
    meta = json.loads(sidecar.read_text())
    meta.pop("edges_file")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(meta))
    with pytest.raises(MalformedInput, match="edges_file"):
        load_coarsened_graph(bad)

    meta = json.loads(sidecar.read_text())
    meta["num_supernodes"] = 99
    bad.write_text(json.dumps(meta))
    with pytest.raises(MalformedInput, match="99"):
        load_coarsened_graph(bad)

    bad.write_text("{not json")
    with pytest.raises(MalformedInput, match="sidecar"):
        load_coarsened_graph(bad)
