import json

import numpy as np
import pytest

from coarsekit import random_graph
from coarsekit.cli import main
from coarsekit.io import (
    load_graph,
    read_edge_list,
    read_labels,
    write_edge_list,
    write_features,
    write_labels,
)


def _write_inputs(tmp_path, n=60, seed=5):
    g = random_graph(n, seed=seed)
    write_edge_list(tmp_path / "edges.tsv", g.adjacency)
    write_features(tmp_path / "x.csv", g.features)
    write_labels(tmp_path / "y.txt", g.labels)
    return g


def _coarsen_args(tmp_path, out, **overrides):
    args = {
        "--edges": str(tmp_path / "edges.tsv"),
        "--features": str(tmp_path / "x.csv"),
        "--labels": str(tmp_path / "y.txt"),
        "--ratios": "0.5,0.3",
        "--seed": "4",
        "--out": str(out),
    }
    args.update(overrides)
    argv = ["coarsen"]
    for key, value in args.items():
        if value is None:
            continue
        argv.extend([key, value])
    return argv


def test_coarsen_full_ratio_identity(tmp_path):
    g = _write_inputs(tmp_path, n=20)
    out = tmp_path / "out"
    assert main(_coarsen_args(tmp_path, out, **{"--ratios": "1.0"})) == 0
    assignment = read_labels(out / "r1.0000_assignment.txt")
    np.testing.assert_array_equal(assignment, np.arange(20))
    coarse = load_graph(
        out / "r1.0000_edges.tsv", out / "r1.0000_features.csv"
    )
    np.testing.assert_allclose(
        coarse.adjacency.toarray(), g.adjacency.toarray(), atol=0
    )
    np.testing.assert_allclose(coarse.features, g.features, atol=0)


def test_coarsen_ratios_nest(tmp_path):
    _write_inputs(tmp_path, n=100)
    out = tmp_path / "out"
    assert main(_coarsen_args(tmp_path, out)) == 0
    fine = read_labels(out / "r0.5000_assignment.txt")
    coarse = read_labels(out / "r0.3000_assignment.txt")
    assert fine.max() + 1 == 50
    assert coarse.max() + 1 == 30
    pairs = np.unique(np.stack([fine, coarse], axis=1), axis=0)
    assert pairs.shape[0] == 50  # every fine supernode maps into one coarse one


def test_coarsen_sidecar_contents(tmp_path):
    _write_inputs(tmp_path, n=30)
    out = tmp_path / "out"
    assert main(_coarsen_args(tmp_path, out, **{"--ratios": "0.5"})) == 0
    meta = json.loads((out / "r0.5000.json").read_text())
    for key in ("alpha", "assignment_file", "edges_file", "num_supernodes",
                "projectors", "ratio", "seed"):
        assert key in meta
    assert meta["num_supernodes"] == 15
    assert (out / "timing.csv").exists()


def test_coarsen_missing_features_file_exits_2(tmp_path, capsys):
    _write_inputs(tmp_path)
    code = main(
        _coarsen_args(
            tmp_path, tmp_path / "out", **{"--features": str(tmp_path / "nope.csv")}
        )
    )
    assert code == 2
    assert "nope.csv" in capsys.readouterr().err


def test_coarsen_bad_ratios_exit_3(tmp_path, capsys):
    _write_inputs(tmp_path)
    assert main(_coarsen_args(tmp_path, tmp_path / "o1", **{"--ratios": "0.3,0.5"})) == 3
    assert main(_coarsen_args(tmp_path, tmp_path / "o2", **{"--ratios": "0"})) == 3
    assert main(_coarsen_args(tmp_path, tmp_path / "o3", **{"--alpha": "1.5"})) == 3
    assert "error" in capsys.readouterr().err


def test_coarsen_percent_ratios(tmp_path):
    _write_inputs(tmp_path, n=40)
    out = tmp_path / "out"
    assert main(_coarsen_args(tmp_path, out, **{"--ratios": "55,30"})) == 0
    assert (out / "r0.5500.json").exists()
    assert (out / "r0.3000.json").exists()


def test_coarsen_deterministic_artifacts(tmp_path):
    _write_inputs(tmp_path, n=50)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(_coarsen_args(tmp_path, out_a)) == 0
    assert main(_coarsen_args(tmp_path, out_b)) == 0
    for name in sorted(p.name for p in out_a.iterdir()):
        if name == "timing.csv":
            continue
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def _write_p3(tmp_path):
    (tmp_path / "p3_edges.tsv").write_text("0\t1\t1.0\n1\t2\t1.0\n")
    write_features(tmp_path / "p3_x.csv", np.eye(3))


def _write_p3_split_sidecar(tmp_path):
    """Coarsened artifacts for the partition {{0, 1}, {2}} of the 3-path."""
    out = tmp_path / "pre"
    out.mkdir()
    (out / "c_edges.tsv").write_text("0\t1\t1.0\n")
    (out / "c_assignment.txt").write_text("0\n0\n1\n")
    sidecar = {
        "assignment_file": "c_assignment.txt",
        "edges_file": "c_edges.tsv",
        "num_supernodes": 2,
        "ratio": 2 / 3,
    }
    path = out / "c.json"
    path.write_text(json.dumps(sidecar, sort_keys=True))
    return path


def test_metrics_frozen_p3_constants(tmp_path, capsys):
    _write_p3(tmp_path)
    sidecar = _write_p3_split_sidecar(tmp_path)
    code = main(
        [
            "metrics",
            "--edges", str(tmp_path / "p3_edges.tsv"),
            "--features", str(tmp_path / "p3_x.csv"),
            "--sidecar", str(sidecar),
            "--ree-k", "2",
            "--json", str(tmp_path / "report.json"),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    # Frozen by straight-line evaluation of the formulas on this fixture.
    assert report["he"] == pytest.approx(1.510547750473207, abs=1e-10)
    assert report["rce_raw"] == pytest.approx(11.0, abs=1e-10)
    assert report["rce_log10"] == pytest.approx(np.log10(11.0), abs=1e-10)
    assert report["ree"] == pytest.approx(1.0, abs=1e-10)
    assert report["k"] == 1
    assert report["skipped"] == 1


def test_metrics_identity_is_zero(tmp_path):
    _write_inputs(tmp_path, n=20)
    out = tmp_path / "out"
    assert main(_coarsen_args(tmp_path, out, **{"--ratios": "1.0"})) == 0
    code = main(
        [
            "metrics",
            "--edges", str(tmp_path / "edges.tsv"),
            "--features", str(tmp_path / "x.csv"),
            "--sidecar", str(out / "r1.0000.json"),
            "--ree-k", "5",
            "--json", str(tmp_path / "report.json"),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["ree"] <= 1e-9
    assert report["he"] <= 1e-9
    assert report["rce_raw"] <= 1e-9
    assert report["rce_log10"] is None  # exact reconstruction has no log


def test_metrics_dense_limit_exit_4(tmp_path, capsys):
    _write_p3(tmp_path)
    sidecar = _write_p3_split_sidecar(tmp_path)
    code = main(
        [
            "metrics",
            "--edges", str(tmp_path / "p3_edges.tsv"),
            "--features", str(tmp_path / "p3_x.csv"),
            "--sidecar", str(sidecar),
            "--ree-k", "2",
            "--dense-eig-limit", "2",
        ]
    )
    assert code == 4
    assert "dense" in capsys.readouterr().err


def _write_hetero_manifest(tmp_path, bad_edge=False):
    rng = np.random.default_rng(7)
    base = tmp_path / "het"
    base.mkdir(exist_ok=True)
    np.savetxt(base / "a.csv", rng.standard_normal((30, 4)), delimiter=",")
    np.savetxt(base / "b.csv", rng.standard_normal((20, 3)), delimiter=",")
    (base / "a_y.txt").write_text("".join(f"{i % 3}\n" for i in range(30)))
    with open(base / "ab.tsv", "w") as fh:
        for _ in range(50):
            fh.write(f"{rng.integers(0, 30)}\t{rng.integers(0, 20)}\n")
        if bad_edge:
            fh.write("0\t99\n")
    with open(base / "bc.tsv", "w") as fh:
        for _ in range(30):
            fh.write(f"{rng.integers(0, 20)}\t{rng.integers(0, 10)}\t2.0\n")
    manifest = {
        "types": {
            "a": {"count": 30, "features_file": "a.csv", "labels_file": "a_y.txt"},
            "b": {"count": 20, "features_file": "b.csv"},
            "c": {"count": 10},
        },
        "relations": [
            {"src": "a", "rel": "r1", "dst": "b", "edges_file": "ab.tsv"},
            {"src": "b", "rel": "r2", "dst": "c", "edges_file": "bc.tsv"},
        ],
        "target_type": "a",
    }
    path = base / "manifest.json"
    path.write_text(json.dumps(manifest))
    return path


def test_coarsen_hetero_cli(tmp_path, capsys):
    manifest = _write_hetero_manifest(tmp_path)
    out = tmp_path / "het_out"
    code = main(
        [
            "coarsen-hetero",
            "--manifest", str(manifest),
            "--eta", "0.5",
            "--eta-type", "c=0.3",
            "--seed", "6",
            "--out", str(out),
        ]
    )
    assert code == 0
    assert "purity: 100.0%" in capsys.readouterr().out
    sidecar = json.loads((out / "hetero.json").read_text())
    assert sidecar["purity_percent"] == 100.0
    assert sidecar["types"]["a"]["num_supernodes"] == 15
    assert sidecar["types"]["c"]["num_supernodes"] == 3
    # Per-relation weight conservation through the files.
    _, _, w_in = read_edge_list(tmp_path / "het" / "bc.tsv")
    _, _, w_out = read_edge_list(out / "rel_b__r2__c.tsv")
    assert w_in.sum() == pytest.approx(w_out.sum())


def test_coarsen_hetero_identity_preserves_relations(tmp_path):
    manifest = _write_hetero_manifest(tmp_path)
    out = tmp_path / "het_out"
    assert main(
        ["coarsen-hetero", "--manifest", str(manifest), "--eta", "1.0",
         "--seed", "1", "--out", str(out)]
    ) == 0
    rows_in, cols_in, w_in = read_edge_list(tmp_path / "het" / "ab.tsv")
    rows_out, cols_out, w_out = read_edge_list(out / "rel_a__r1__b.tsv")
    seen_in = {}
    for r, c, w in zip(rows_in, cols_in, w_in):
        seen_in[(r, c)] = seen_in.get((r, c), 0.0) + w
    seen_out = dict(zip(zip(rows_out, cols_out), w_out))
    assert seen_in == seen_out


def test_coarsen_hetero_bad_manifest_exit_2(tmp_path, capsys):
    manifest = _write_hetero_manifest(tmp_path, bad_edge=True)
    code = main(
        ["coarsen-hetero", "--manifest", str(manifest), "--eta", "0.5",
         "--out", str(tmp_path / "o")]
    )
    assert code == 2
    assert "outside" in capsys.readouterr().err


def test_coarsen_hetero_bad_eta_exit_3(tmp_path):
    manifest = _write_hetero_manifest(tmp_path)
    assert main(
        ["coarsen-hetero", "--manifest", str(manifest), "--eta", "0",
         "--out", str(tmp_path / "o")]
    ) == 3


def test_validate_theory_cli(tmp_path, capsys):
    code = main(
        [
            "validate-theory",
            "--trials", "5000",
            "--trials-load-balance", "20",
            "--lb-n", "500",
            "--lb-k", "20",
            "--seed", "0",
            "--json", str(tmp_path / "checks.json"),
            "--curve-csv", str(tmp_path / "curve.csv"),
        ]
    )
    assert code == 0
    checks = json.loads((tmp_path / "checks.json").read_text())
    assert {c["name"] for c in checks} == {"load-balance", "proximity", "separation"}
    for check in checks:
        assert check["pass"] is True
        for key in ("analytic", "empirical", "params", "tolerance", "trials"):
            assert key in check
    curve = (tmp_path / "curve.csv").read_text().splitlines()
    assert curve[0] == "epsilon,empirical,analytic"
    assert len(curve) == 34
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3


def test_validate_theory_unknown_check_exit_3(tmp_path):
    assert main(["validate-theory", "--checks", "ghost"]) == 3


def test_bench_cli(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(
        [
            "bench",
            "--sizes", "400,800",
            "--ratios", "0.5,0.3",
            "--seed", "0",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,mode,phase,ratio,seconds"
    assert any(",adaptive,schedule," in line for line in lines)
    assert any(",naive,project," in line for line in lines)
    assert "speedup=" in capsys.readouterr().out


def test_coarsen_non_numeric_alpha_exit_3(tmp_path):
    _write_inputs(tmp_path)
    assert main(_coarsen_args(tmp_path, tmp_path / "o", **{"--alpha": "sideways"})) == 3


def test_validate_theory_single_check(tmp_path, capsys):
    code = main(
        ["validate-theory", "--checks", "load-balance",
         "--trials-load-balance", "10", "--lb-n", "200", "--lb-k", "10",
         "--json", str(tmp_path / "c.json")]
    )
    assert code == 0
    checks = json.loads((tmp_path / "c.json").read_text())
    assert [c["name"] for c in checks] == ["load-balance"]


def test_coarsen_hetero_deterministic_artifacts(tmp_path):
    manifest = _write_hetero_manifest(tmp_path)
    out_a, out_b = tmp_path / "ha", tmp_path / "hb"
    args = ["coarsen-hetero", "--manifest", str(manifest), "--eta", "0.4",
            "--seed", "3"]
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    for name in sorted(p.name for p in out_a.iterdir()):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
