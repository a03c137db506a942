import json
import time

import numpy as np
import pytest

from sgfs.cli import main


def read_jsonl(path):
    lines = path.read_text().strip().splitlines()
    meta = json.loads(lines[0])["meta"]
    rows = [json.loads(ln) for ln in lines[1:]]
    return meta, rows


def write_spike_dataset(tmp_path):
    (tmp_path / "m.csv").write_text("1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n")
    (tmp_path / "y.csv").write_text("5\n0\n0\n0\n")
    (tmp_path / "g.csv").write_text("0\n0\n1\n1\n")
    return [str(tmp_path / n) for n in ("m.csv", "y.csv", "g.csv")]


class TestProject:
    def test_feasible_vector_passthrough(self, tmp_path):
        vec = tmp_path / "v.csv"
        np.savetxt(vec, [0.1, 0.2, -0.1, 0.05], fmt="%.17g")
        out = tmp_path / "x.csv"
        rc = main(["project", "--method", "sglp", "--input", str(vec),
                   "--n-groups", "2", "--s1", "10", "--s2", "10",
                   "--out", str(out)])
        assert rc == 0
        x = np.loadtxt(out)
        assert np.array_equal(x, [0.1, 0.2, -0.1, 0.05])

    def test_methods_agree_on_objective(self, tmp_path):
        objs = {}
        for method in ("sglp", "admm", "dykstra"):
            rep = tmp_path / f"{method}.jsonl"
            rc = main(["project", "--method", method, "--p", "100",
                       "--seed", "7", "--report", str(rep)])
            assert rc == 0
            _, rows = read_jsonl(rep)
            objs[method] = rows[0]["objective"]
        assert abs(objs["admm"] - objs["sglp"]) <= 1e-3
        assert abs(objs["dykstra"] - objs["sglp"]) <= 1e-3

    def test_large_p_fast(self, tmp_path):
        t0 = time.perf_counter()
        rc = main(["project", "--method", "sglp", "--p", "100000"])
        elapsed = time.perf_counter() - t0
        assert rc == 0
        assert elapsed < 1.0

    def test_missing_radii_with_input_rejected(self, tmp_path):
        vec = tmp_path / "v.csv"
        np.savetxt(vec, [1.0, 2.0], fmt="%.17g")
        with pytest.raises(SystemExit):
            main(["project", "--input", str(vec), "--n-groups", "1"])

    def test_report_meta(self, tmp_path):
        rep = tmp_path / "r.jsonl"
        rc = main(["project", "--p", "100", "--seed", "3",
                   "--report", str(rep)])
        assert rc == 0
        meta, rows = read_jsonl(rep)
        assert meta["command"] == "project"
        assert meta["seed"] == 3
        assert "version" in meta
        assert rows[0]["seed"] == 3


class TestBenchProj:
    def test_schema_and_determinism(self, tmp_path):
        reports = []
        for name in ("a.jsonl", "b.jsonl"):
            rep = tmp_path / name
            rc = main(["bench-proj", "--p-list", "100", "--reps", "1",
                       "--seed", "5", "--report", str(rep)])
            assert rc == 0
            reports.append(read_jsonl(rep)[1])
        first, second = reports
        methods = [r["method"] for r in first]
        assert methods == ["sglp", "admm", "dykstra"]
        assert all(r["p"] == 100 for r in first)
        # deterministic math: distances repeat exactly; times may differ
        for r1, r2 in zip(first, second):
            assert r1["distance_to_reference"] == r2["distance_to_reference"]

    def test_baseline_subset(self, tmp_path):
        rep = tmp_path / "r.jsonl"
        rc = main(["bench-proj", "--p-list", "100", "--reps", "2",
                   "--baselines", "dykstra", "--report", str(rep)])
        assert rc == 0
        _, rows = read_jsonl(rep)
        assert [r["method"] for r in rows] == ["sglp", "dykstra"]


class TestBenchSynth:
    def test_smoke_run_under_a_minute(self, tmp_path):
        rep = tmp_path / "r.jsonl"
        t0 = time.perf_counter()
        rc = main(["bench-synth", "--reps", "2", "--folds", "3",
                   "--dc-s2-grid", "2,4", "--dc-s1-grid", "2,4",
                   "--sgl-grid", "0.3,0.6", "--agm-rel-tol", "1e-4",
                   "--report", str(rep)])
        elapsed = time.perf_counter() - t0
        assert rc == 0
        assert elapsed < 60
        _, rows = read_jsonl(rep)
        assert {r["method"] for r in rows} == {"dc", "constrained_sgl"}
        for r in rows:
            assert {"esti", "pred", "prec", "rec"} <= set(r)
            assert r["reps"] == 2


class TestSolve:
    def test_dc_recovers_spike(self, tmp_path):
        m, y, g = write_spike_dataset(tmp_path)
        out = tmp_path / "x.csv"
        rep = tmp_path / "r.jsonl"
        rc = main(["solve", "--matrix", m, "--response", y, "--groups", g,
                   "--method", "dc", "--s1", "1", "--s2", "1",
                   "--out", str(out), "--report", str(rep)])
        assert rc == 0
        x = np.loadtxt(out)
        assert np.allclose(x, [5.0, 0.0, 0.0, 0.0], atol=1e-10)
        _, rows = read_jsonl(rep)
        assert rows[0]["n_features"] == 1
        assert rows[0]["n_groups"] == 1
        trace = rows[0]["objective_trace"]
        assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))

    def test_sgl_huge_radii_is_least_squares(self, tmp_path):
        m, y, g = write_spike_dataset(tmp_path)
        out = tmp_path / "x.csv"
        rc = main(["solve", "--matrix", m, "--response", y, "--groups", g,
                   "--method", "sgl", "--s1", "1000", "--s2", "1000",
                   "--out", str(out)])
        assert rc == 0
        # identity design: the least-squares solution is y itself
        assert np.allclose(np.loadtxt(out), [5.0, 0.0, 0.0, 0.0], atol=1e-6)

    def test_cv_single_point_equals_direct_fit(self, tmp_path):
        m, y, g = write_spike_dataset(tmp_path)
        direct = tmp_path / "direct.csv"
        main(["solve", "--matrix", m, "--response", y, "--groups", g,
              "--method", "dc", "--s1", "2", "--s2", "1",
              "--out", str(direct)])
        cv = tmp_path / "cv.csv"
        table = tmp_path / "table.csv"
        rc = main(["solve", "--matrix", m, "--response", y, "--groups", g,
                   "--method", "dc", "--cv", "--folds", "2",
                   "--cv-s2-grid", "1", "--cv-s1-grid", "2",
                   "--cv-table", str(table), "--out", str(cv)])
        assert rc == 0
        assert np.allclose(np.loadtxt(direct), np.loadtxt(cv))
        assert table.read_text().splitlines()[0] == "s1,s2,fold,score"

    def test_missing_budget_rejected(self, tmp_path):
        m, y, g = write_spike_dataset(tmp_path)
        with pytest.raises(SystemExit):
            main(["solve", "--matrix", m, "--response", y, "--groups", g,
                  "--method", "dc"])

    def test_seed_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SGFS_SEED", "42")
        rep = tmp_path / "r.jsonl"
        rc = main(["project", "--p", "100", "--report", str(rep)])
        assert rc == 0
        meta, _ = read_jsonl(rep)
        assert meta["seed"] == 42
